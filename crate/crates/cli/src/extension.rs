use std::path::PathBuf;

use liqscreen_core::extensions::auction::{default_offset, solve_bid_function};
use liqscreen_core::extensions::dynamic::{dynamic_path, PosteriorState};
use liqscreen_core::extensions::monitoring::{solve_monitoring, MonitoringCorner};
use liqscreen_core::extensions::renegotiation::renegotiation_sweep;
use liqscreen_core::numerics::linspace;

use crate::figures::tightness_grid;
use crate::output::Table;
use crate::{CliError, Run};

/// Rows written for the bid function; the solver grid is much finer.
const BID_ROWS: usize = 1000;

pub fn dynamic(run: &Run) -> Result<PathBuf, CliError> {
    let e = run.cfg.economy()?;
    let x = &run.cfg.extensions;
    let path = dynamic_path(&e, PosteriorState::prior(&e)?, x.true_type, x.periods, run.seed)?;
    let mut table = Table::new(&["t", "a", "b1", "cutoff", "hazard_shrink_ok"]);
    for p in &path.periods {
        table.push(vec![
            p.period.into(),
            p.contract.advance.into(),
            p.contract.slope.into(),
            p.cutoff.into(),
            p.hazard_shrink_ok.into(),
        ]);
    }
    table.write(&run.out, "extension_dynamic.csv")
}

pub fn bids(run: &Run) -> Result<PathBuf, CliError> {
    let e = run.cfg.economy()?;
    let bf = solve_bid_function(&e, &run.cfg.slope_rule(), run.cfg.extensions.bidders, default_offset(&e))?;
    let n = bf.grid.len();
    let stride = n.div_ceil(BID_ROWS).max(1);
    let mut table = Table::new(&["theta", "beta", "beta_fb"]);
    for k in (0..n).filter(|k| k % stride == 0 || *k == n - 1) {
        table.push(vec![bf.grid[k].into(), bf.bids[k].into(), bf.full_info[k].into()]);
    }
    table.write(&run.out, "extension_bids.csv")
}

pub fn monitoring(run: &Run) -> Result<PathBuf, CliError> {
    let e = run.cfg.economy()?;
    let cfg = run.cfg.monitoring()?;
    let rule = run.cfg.slope_rule();
    let mut table = Table::new(&["R", "sigma", "foc_residual", "corner"]);
    for r in tightness_grid(run.grid.unwrap_or(10), 5.0) {
        let s = solve_monitoring(&e.with_tightness(r)?, &rule, &cfg)?;
        let corner = match s.corner {
            MonitoringCorner::Interior => "interior",
            MonitoringCorner::None => "none",
            MonitoringCorner::Bound => "bound",
        };
        table.push(vec![r.into(), s.sigma.into(), s.foc_residual.into(), corner.into()]);
    }
    table.write(&run.out, "extension_monitoring.csv")
}

pub fn renegotiation(run: &Run) -> Result<PathBuf, CliError> {
    let e = run.cfg.economy()?;
    let lambdas = linspace(0.0, 1.0, run.grid.unwrap_or(11));
    let mut table = Table::new(&["lambda", "a", "b1", "value"]);
    for (l, s) in lambdas.iter().zip(renegotiation_sweep(&e, &lambdas)?) {
        table.push(vec![(*l).into(), s.contract.advance.into(), s.contract.slope.into(), s.value.into()]);
    }
    table.write(&run.out, "extension_renegotiation.csv")
}
