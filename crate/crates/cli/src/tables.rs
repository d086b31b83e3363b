use std::path::PathBuf;

use liqscreen_core::bilateral::{cash_intensity, solve_optimal, sweep_r};
use liqscreen_core::portfolio::{contagion_share, contagion_threshold, value_reduction, PortfolioEconomy};

use crate::output::{Cell, Table};
use crate::Run;

/// Tightness levels shared by the three tables.
pub const TABLE_R: [f64; 5] = [0.5, 1.0, 2.0, 3.0, 5.0];
/// Value scales of the two surplus panels (top-type margin 1 and 2).
pub const SURPLUS_PANELS: [(&str, f64); 2] = [("base", 2.0), ("high", 3.0)];
pub const SURPLUS_RATIOS: [f64; 3] = [1.5, 2.0, 3.0];

pub fn sensitivity(run: &Run) -> Result<PathBuf, crate::CliError> {
    let mut header = vec!["R".to_string()];
    for (tag, _) in SURPLUS_PANELS {
        for col in ["a", "ell", "beta", "share"] {
            header.push(format!("{col}_{tag}"));
        }
    }
    let mut table = Table::with_header(header);
    let sweeps = SURPLUS_PANELS
        .iter()
        .map(|(_, v)| Ok(sweep_r(&run.cfg.economy_with_value(*v)?, &TABLE_R)?))
        .collect::<Result<Vec<_>, crate::CliError>>()?;
    for (k, r) in TABLE_R.iter().enumerate() {
        let mut row: Vec<Cell> = vec![(*r).into()];
        for s in &sweeps {
            let x = &s.rows[k];
            row.extend([x.advance.into(), x.exposure.into(), x.cash_intensity.into(), x.financing_share.into()]);
        }
        table.push(row);
    }
    table.write(&run.out, "table_sensitivity.csv")
}

/// Rows are value-to-cost ratios, each with an advance-share and a
/// cash-intensity line; columns are tightness levels.
pub fn menu(run: &Run) -> Result<PathBuf, crate::CliError> {
    let mut header = vec!["v_over_c".to_string(), "measure".to_string()];
    header.extend(TABLE_R.iter().map(|r| format!("R={r}")));
    let mut table = Table::with_header(header);
    for ratio in SURPLUS_RATIOS {
        let base = run.cfg.economy_with_value(ratio)?;
        let mut share: Vec<Cell> = vec![ratio.into(), "advance_share".into()];
        let mut beta: Vec<Cell> = vec![ratio.into(), "cash_intensity".into()];
        for r in TABLE_R {
            let e = base.with_tightness(r)?;
            let sol = solve_optimal(&e)?;
            share.push((sol.contract.advance / e.working_capital).into());
            beta.push(cash_intensity(&e, &sol)?.into());
        }
        table.push(share);
        table.push(beta);
    }
    table.write(&run.out, "table_menu.csv")
}

pub fn contagion(run: &Run) -> Result<PathBuf, crate::CliError> {
    let mut table = Table::new(&["R", "delta_star", "delta_star_empirical", "value_reduction", "contagion_share"]);
    let base = run.cfg.economy()?;
    let rule = run.cfg.slope_rule();
    for r in TABLE_R {
        let e = base.with_tightness(r)?;
        let t = contagion_threshold(&e, &rule)?;
        let port = PortfolioEconomy::symmetric(&e, run.cfg.portfolio.delta, rule.clone())?;
        table.push(vec![
            r.into(),
            t.formula.into(),
            t.empirical.into(),
            value_reduction(&port)?.into(),
            contagion_share(&e, &rule)?.into(),
        ]);
    }
    table.write(&run.out, "table_contagion.csv")
}

/// Full bilateral sweep over `grid` tightness levels on `(0, 5]`.
pub fn sweep(run: &Run) -> Result<PathBuf, crate::CliError> {
    let grid = crate::figures::tightness_grid(run.grid.unwrap_or(50), 5.0);
    let s = sweep_r(&run.cfg.economy()?, &grid)?;
    let mut table = Table::new(&["R", "a_star", "ell_star", "beta_star", "phi_share", "W_M", "W_A", "W_C"]);
    for x in &s.rows {
        table.push(vec![
            x.tightness.into(),
            x.advance.into(),
            x.exposure.into(),
            x.cash_intensity.into(),
            x.financing_share.into(),
            x.mixed_value.into(),
            x.advance_value.into(),
            x.contingent_value.into(),
        ]);
    }
    table.write(&run.out, "table_sweep.csv")
}
