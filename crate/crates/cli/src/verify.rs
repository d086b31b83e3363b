//! Oracle suite: each check compares a solver against an independent
//! computation or a structural property and reports its worst violation.

use std::fs;
use std::path::PathBuf;

use liqscreen_core::bilateral::{binding_ir_advance, solve_optimal, Contract};
use liqscreen_core::calibration::SlopeRule;
use liqscreen_core::economy::Economy;
use liqscreen_core::extensions::renegotiation::renegotiation_sweep;
use liqscreen_core::numerics::linspace;
use liqscreen_core::oracle::{grid_search_optimal, ic_verify, rent_identity_check, DiscreteMechanism};
use liqscreen_core::portfolio::{solve_with_contracts, symmetric_cutoff, PortfolioEconomy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::figures::tightness_grid;
use crate::{CliError, Run};

const GRID_TOL: f64 = 1e-3;
const RENT_TOL: f64 = 1e-5;
const FIXED_POINT_TOL: f64 = 1e-8;
const SWEEP_TOL: f64 = 1e-9;
const RENT_DRAWS: usize = 100;
const IC_TYPES: usize = 50;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub check: &'static str,
    pub status: &'static str,
    pub worst_violation: f64,
    pub location: String,
}

impl CheckResult {
    fn within(check: &'static str, worst: f64, tol: f64, location: String) -> Self {
        CheckResult {
            check,
            status: if worst <= tol { "pass" } else { "fail" },
            worst_violation: worst,
            location,
        }
    }

    fn errored(check: &'static str, err: CliError) -> Self {
        CheckResult {
            check,
            status: "fail",
            worst_violation: f64::INFINITY,
            location: err.to_string(),
        }
    }

    pub fn failed(&self) -> bool {
        self.status == "fail"
    }
}

fn midpoints(econ: &Economy, n: usize) -> Vec<f64> {
    let (lo, hi) = (econ.lower(), econ.upper());
    let h = (hi - lo) / n as f64;
    (0..n).map(|k| lo + (k as f64 + 0.5) * h).collect()
}

/// Keeps the first location with the largest violation.
struct Worst {
    value: f64,
    location: String,
}

impl Worst {
    fn new() -> Self {
        Worst {
            value: 0.0,
            location: String::new(),
        }
    }

    fn see(&mut self, v: f64, location: impl FnOnce() -> String) {
        if self.location.is_empty() || v > self.value {
            self.value = v;
            self.location = location();
        }
    }
}

fn grid_agreement(run: &Run, econ: &Economy) -> Result<CheckResult, CliError> {
    let n = run.grid.unwrap_or(200);
    let mut w = Worst::new();
    for r in [0.5, 1.0, 2.0] {
        let e = econ.with_tightness(r)?;
        let gap = (solve_optimal(&e)?.value - grid_search_optimal(&e, n, n)?.best_value).abs();
        w.see(gap, || format!("R={r}"));
    }
    Ok(CheckResult::within("grid_agreement", w.value, run.tol.unwrap_or(GRID_TOL), w.location))
}

fn rent_identity(run: &Run, econ: &Economy) -> Result<CheckResult, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(run.seed);
    let (lo, hi) = (econ.lower(), econ.upper());
    let mut w = Worst::new();
    for _ in 0..RENT_DRAWS {
        let a = rng.gen::<f64>() * econ.working_capital;
        let b1 = rng.gen::<f64>() * 3.0;
        let cut = lo + rng.gen::<f64>() * (hi - lo);
        let gap = rent_identity_check(econ, a, b1, cut)?.gap;
        w.see(gap, || format!("a={a:.6},b1={b1:.6},cutoff={cut:.6}"));
    }
    Ok(CheckResult::within("rent_identity", w.value, RENT_TOL, w.location))
}

fn ic_solved(econ: &Economy) -> Result<CheckResult, CliError> {
    let sol = solve_optimal(econ)?;
    let mech = DiscreteMechanism::uniform(econ, midpoints(econ, IC_TYPES), sol.contract, sol.cutoff, sol.empty)?;
    let rep = ic_verify(&mech, econ);
    let location = rep.violating_pair.map(|(i, j)| format!("type {i} reports {j}")).unwrap_or_default();
    Ok(CheckResult {
        check: "ic_solved_mechanism",
        status: if rep.ok { "pass" } else { "fail" },
        worst_violation: rep.worst_violation,
        location,
    })
}

/// A slope that falls in type must be caught. Needs an informative signal,
/// so a flat one is swapped for the benchmark with a positive signal floor.
fn ic_detects_decreasing(econ: &Economy) -> Result<CheckResult, CliError> {
    let reference;
    let e = if econ.is_informative() {
        econ
    } else {
        reference = Economy::benchmark(2.0, 0.1, econ.tightness())?;
        &reference
    };
    let n = 10;
    let types = midpoints(e, n);
    let mech = DiscreteMechanism::new(e, types, vec![true; n], vec![0.2; n], linspace(1.0, 0.0, n))?;
    let rep = ic_verify(&mech, e);
    Ok(CheckResult {
        check: "ic_detects_decreasing_schedule",
        status: if !rep.ok && rep.violating_pair.is_some() { "pass" } else { "fail" },
        worst_violation: rep.worst_violation,
        location: rep.violating_pair.map(|(i, j)| format!("type {i} reports {j}")).unwrap_or_default(),
    })
}

/// Coupled cutoffs of the uniform-quadratic pair against their closed form.
fn symmetric_fixed_point(econ: &Economy) -> Result<CheckResult, CliError> {
    let e = Economy::benchmark(2.0, 0.0, econ.tightness())?;
    let a = binding_ir_advance(&e, 0.0)?;
    let mut w = Worst::new();
    for delta in linspace(0.0, 1.5, 10) {
        for b1 in linspace(0.0, 2.0, 10) {
            if 1.0 + b1 - delta <= 0.05 {
                continue;
            }
            let port = PortfolioEconomy::symmetric(&e, delta, SlopeRule::Optimized)?;
            let sol = solve_with_contracts(&port, &[Contract::new(a, b1), Contract::new(a, b1)])?;
            let closed = symmetric_cutoff(a, b1, delta)?.theta;
            let gap = sol.cutoffs.iter().map(|c| (c - closed).abs()).fold(0.0, f64::max);
            w.see(gap, || format!("delta={delta:.6},b1={b1:.6}"));
        }
    }
    Ok(CheckResult::within("symmetric_fixed_point", w.value, FIXED_POINT_TOL, w.location))
}

fn advance_monotone(econ: &Economy) -> Result<CheckResult, CliError> {
    let grid = tightness_grid(20, 5.0);
    let mut prev: Option<f64> = None;
    let mut w = Worst::new();
    for &r in &grid {
        let a = solve_optimal(&econ.with_tightness(r)?)?.contract.advance;
        if let Some(p) = prev {
            w.see((p - a).max(0.0), || format!("R={r:.6}"));
        }
        prev = Some(a);
    }
    Ok(CheckResult::within("advance_monotone_in_tightness", w.value, SWEEP_TOL, w.location))
}

fn renegotiation_monotone(econ: &Economy) -> Result<CheckResult, CliError> {
    let lambdas = linspace(0.0, 1.0, 11);
    let sols = renegotiation_sweep(econ, &lambdas)?;
    let mut w = Worst::new();
    for k in 1..sols.len() {
        let fall = (sols[k - 1].contract.advance - sols[k].contract.advance).max(0.0);
        let rise = (sols[k].value - sols[k - 1].value).max(0.0);
        w.see(fall.max(rise), || format!("lambda={:.6}", lambdas[k]));
    }
    Ok(CheckResult::within("renegotiation_monotone", w.value, SWEEP_TOL, w.location))
}

/// With a flat signal the slope has no screening use and must be zero.
fn uninformative_slope(econ: &Economy) -> Result<CheckResult, CliError> {
    if econ.is_informative() {
        return Ok(CheckResult {
            check: "uninformative_slope",
            status: "skipped",
            worst_violation: 0.0,
            location: "signal is informative".into(),
        });
    }
    let b1 = solve_optimal(econ)?.contract.slope;
    Ok(CheckResult::within("uninformative_slope", b1.abs(), SWEEP_TOL, format!("R={}", econ.tightness())))
}

pub fn run_checks(run: &Run) -> Result<Vec<CheckResult>, CliError> {
    let econ = run.cfg.economy()?;
    type CheckFn<'a> = Box<dyn Fn() -> Result<CheckResult, CliError> + 'a>;
    let checks: Vec<(&'static str, CheckFn)> = vec![
        ("grid_agreement", Box::new(|| grid_agreement(run, &econ))),
        ("rent_identity", Box::new(|| rent_identity(run, &econ))),
        ("ic_solved_mechanism", Box::new(|| ic_solved(&econ))),
        ("ic_detects_decreasing_schedule", Box::new(|| ic_detects_decreasing(&econ))),
        ("symmetric_fixed_point", Box::new(|| symmetric_fixed_point(&econ))),
        ("advance_monotone_in_tightness", Box::new(|| advance_monotone(&econ))),
        ("renegotiation_monotone", Box::new(|| renegotiation_monotone(&econ))),
        ("uninformative_slope", Box::new(|| uninformative_slope(&econ))),
    ];
    Ok(checks
        .into_iter()
        .map(|(name, f)| f().unwrap_or_else(|e| CheckResult::errored(name, e)))
        .collect())
}

/// Writes `verify.json` and fails with the names of failing checks.
pub fn verify(run: &Run) -> Result<PathBuf, CliError> {
    let results = run_checks(run)?;
    fs::create_dir_all(&run.out).map_err(|source| CliError::Io {
        path: run.out.display().to_string(),
        source,
    })?;
    let path = run.out.join("verify.json");
    let mut text = serde_json::to_string_pretty(&results)?;
    text.push('\n');
    fs::write(&path, &text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    print!("{text}");
    let failed: Vec<String> = results.iter().filter(|c| c.failed()).map(|c| c.check.to_string()).collect();
    if failed.is_empty() {
        Ok(path)
    } else {
        Err(CliError::Checks(failed))
    }
}
