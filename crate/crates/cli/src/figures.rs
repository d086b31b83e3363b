use std::path::PathBuf;

use liqscreen_core::bilateral::{pure_contingent_slope, sweep_r};
use liqscreen_core::numerics::linspace;
use liqscreen_core::oracle::mimic_payoff;
use liqscreen_core::portfolio::{contagion_region as region_scan, contagion_threshold, delta_grid, hump_scan};

use crate::output::Table;
use crate::{CliError, Run};

/// `n` evenly spaced points on `(0, top]`.
pub fn tightness_grid(n: usize, top: f64) -> Vec<f64> {
    let n = n.max(2);
    (1..=n).map(|k| top * k as f64 / n as f64).collect()
}

pub fn payoff(run: &Run) -> Result<PathBuf, CliError> {
    let e = run.cfg.economy()?;
    let k = e.working_capital;
    let contingent = pure_contingent_slope(&e)?;
    let mixed = run.cfg.slope_rule().solve(&e)?.contract;
    let mut table = Table::new(&["theta", "pure_advance", "pure_contingent", "mixed"]);
    for t in linspace(e.lower(), e.upper(), run.grid.unwrap_or(101)) {
        table.push(vec![
            t.into(),
            mimic_payoff(&e, k, 0.0, t).into(),
            mimic_payoff(&e, 0.0, contingent, t).into(),
            mimic_payoff(&e, mixed.advance, mixed.slope, t).into(),
        ]);
    }
    table.write(&run.out, "figure_payoff.csv")
}

pub fn advance(run: &Run) -> Result<PathBuf, CliError> {
    let s = sweep_r(&run.cfg.economy()?, &tightness_grid(run.grid.unwrap_or(50), 5.0))?;
    let mut table = Table::new(&["R", "a_star", "ell_star"]);
    for x in &s.rows {
        table.push(vec![x.tightness.into(), x.advance.into(), x.exposure.into()]);
    }
    table.write(&run.out, "figure_advance.csv")
}

pub fn dominance(run: &Run) -> Result<PathBuf, CliError> {
    let s = sweep_r(&run.cfg.economy()?, &tightness_grid(run.grid.unwrap_or(50), 5.0))?;
    let mut table = Table::new(&["R", "W_M", "W_A", "W_C"]);
    for x in &s.rows {
        table.push(vec![
            x.tightness.into(),
            x.mixed_value.into(),
            x.advance_value.into(),
            x.contingent_value.into(),
        ]);
    }
    table.write(&run.out, "figure_dominance.csv")
}

/// Scan file plus a boundary file with the threshold at each tightness.
pub fn contagion_region(run: &Run) -> Result<Vec<PathBuf>, CliError> {
    let e = run.cfg.economy()?;
    let rule = run.cfg.slope_rule();
    let r_grid = tightness_grid(run.grid.unwrap_or(10), 5.0);
    let deltas: Vec<f64> = delta_grid().into_iter().step_by(2).collect();
    let mut scan = Table::new(&["R", "delta", "dPi_dRj", "direct", "spillover", "in_region"]);
    for p in region_scan(&e, &rule, &r_grid, &deltas)? {
        scan.push(vec![
            p.tightness.into(),
            p.delta.into(),
            p.derivative.total.into(),
            p.derivative.direct.into(),
            p.derivative.spillover.into(),
            p.in_region.into(),
        ]);
    }
    let mut boundary = Table::new(&["R", "delta_star", "delta_star_empirical"]);
    for &r in &r_grid {
        let t = contagion_threshold(&e.with_tightness(r)?, &rule)?;
        boundary.push(vec![r.into(), t.formula.into(), t.empirical.into()]);
    }
    Ok(vec![
        scan.write(&run.out, "figure_contagion_region.csv")?,
        boundary.write(&run.out, "figure_contagion_boundary.csv")?,
    ])
}

pub fn hump(run: &Run) -> Result<PathBuf, CliError> {
    let port = run.cfg.portfolio()?;
    let grid = linspace(0.5, 3.0, run.grid.unwrap_or(26));
    let scan = hump_scan(&port, &grid)?;
    let mut table = Table::new(&["R", "portfolio_value"]);
    for (r, v) in scan.tightness.iter().zip(&scan.values) {
        table.push(vec![(*r).into(), (*v).into()]);
    }
    table.write(&run.out, "figure_hump.csv")
}
