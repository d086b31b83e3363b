//! Repeated contracting while the principal learns the type from binary
//! signals with `P(x = 1 | t) = t`.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bilateral::Contract;
use crate::economy::Economy;
use crate::error::{Error, Result};
use crate::oracle::{discrete_hazard, solve_discrete};

/// Grid points used for the prior.
pub const PRIOR_POINTS: usize = 50;
const WEIGHT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorState {
    pub grid: Vec<f64>,
    pub weights: Vec<f64>,
}

impl PosteriorState {
    pub fn new(grid: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if grid.is_empty() || grid.len() != weights.len() {
            return Err(Error::Invalid("posterior grid and weights must match"));
        }
        if grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Invalid("posterior grid must be ascending"));
        }
        if grid.iter().any(|t| !(0.0..=1.0).contains(t)) {
            return Err(Error::Invalid("signal probabilities need types in [0, 1]"));
        }
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|w| !(*w >= 0.0)) || (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::Invalid("posterior weights must sum to one"));
        }
        Ok(PosteriorState { grid, weights })
    }

    /// Midpoint grid on the support with weights proportional to the density.
    pub fn prior(econ: &Economy) -> Result<Self> {
        let (lo, hi) = (econ.lower(), econ.upper());
        let h = (hi - lo) / PRIOR_POINTS as f64;
        let grid: Vec<f64> = (0..PRIOR_POINTS).map(|k| lo + (k as f64 + 0.5) * h).collect();
        let raw: Vec<f64> = grid.iter().map(|t| econ.dist.pdf(*t)).collect();
        let total: f64 = raw.iter().sum();
        PosteriorState::new(grid, raw.iter().map(|w| w / total).collect())
    }

    /// All mass on the grid point nearest `theta`.
    pub fn point_mass(grid: Vec<f64>, theta: f64) -> Result<Self> {
        let at = grid
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - theta).abs().total_cmp(&(b.1 - theta).abs()))
            .map(|(i, _)| i)
            .ok_or(Error::Invalid("empty grid"))?;
        let mut weights = alloc::vec![0.0; grid.len()];
        weights[at] = 1.0;
        PosteriorState::new(grid, weights)
    }

    pub fn hazard(&self, i: usize) -> Option<f64> {
        discrete_hazard(&self.weights, i)
    }
}

pub fn bayes_update(post: &PosteriorState, x: bool) -> Result<PosteriorState> {
    let raw: Vec<f64> = post
        .grid
        .iter()
        .zip(&post.weights)
        .map(|(t, w)| w * if x { *t } else { 1.0 - t })
        .collect();
    let total: f64 = raw.iter().sum();
    if !(total > 0.0) {
        return Err(Error::Degenerate("signal has zero likelihood under the posterior"));
    }
    Ok(PosteriorState {
        grid: post.grid.clone(),
        weights: raw.iter().map(|w| w / total).collect(),
    })
}

/// Discrete hazard of `after` is no larger than that of `before` at every
/// point below the top where both put mass.
pub fn hazard_shrink_check(before: &PosteriorState, after: &PosteriorState) -> Result<bool> {
    if before.grid != after.grid {
        return Err(Error::Invalid("posteriors must share a grid"));
    }
    let n = before.grid.len();
    for i in 0..n.saturating_sub(1) {
        if let (Some(b), Some(a)) = (before.hazard(i), after.hazard(i)) {
            if a > b * (1.0 + 1e-12) + 1e-15 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodRecord {
    pub period: usize,
    pub contract: Contract,
    pub cutoff: f64,
    pub posterior: PosteriorState,
    /// Hazard shrank from the previous period; true in the first period.
    pub hazard_shrink_ok: bool,
    /// Signal observed at the end of the period.
    pub signal: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DynamicPath {
    pub periods: Vec<PeriodRecord>,
}

impl DynamicPath {
    /// On every step where the hazard shrank, the advance did not fall and
    /// the slope did not rise.
    pub fn monotone_on_shrinking_steps(&self) -> bool {
        self.periods.windows(2).all(|w| {
            !w[1].hazard_shrink_ok
                || (w[1].contract.advance >= w[0].contract.advance - 1e-9 && w[1].contract.slope <= w[0].contract.slope + 1e-9)
        })
    }

    pub fn advance_monotone_on_shrinking_steps(&self) -> bool {
        self.periods
            .windows(2)
            .all(|w| !w[1].hazard_shrink_ok || w[1].contract.advance >= w[0].contract.advance - 1e-9)
    }
}

/// Solves periods `0..=periods`, drawing each period's signal from the true
/// type with a seeded generator.
pub fn dynamic_path(econ: &Economy, prior: PosteriorState, true_type: f64, periods: usize, seed: u64) -> Result<DynamicPath> {
    if !(0.0..=1.0).contains(&true_type) {
        return Err(Error::Domain { what: "true type", value: true_type });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(periods + 1);
    let mut post = prior;
    let mut shrink_ok = true;
    for t in 0..=periods {
        let sol = solve_discrete(econ, &post.grid, &post.weights)?;
        let signal = if t < periods { Some(rng.gen::<f64>() < true_type) } else { None };
        out.push(PeriodRecord {
            period: t,
            contract: sol.contract,
            cutoff: sol.cutoff,
            posterior: post.clone(),
            hazard_shrink_ok: shrink_ok,
            signal,
        });
        if let Some(x) = signal {
            let next = bayes_update(&post, x)?;
            shrink_ok = hazard_shrink_check(&post, &next)?;
            post = next;
        }
    }
    Ok(DynamicPath { periods: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn bench() -> Economy {
        Economy::benchmark(2.0, 0.1, 1.0).unwrap()
    }

    #[test]
    fn success_reweights_by_type() {
        let prior = PosteriorState::prior(&bench()).unwrap();
        let post = bayes_update(&prior, true).unwrap();
        let ratio = post.weights[0] / prior.grid[0];
        for (w, t) in post.weights.iter().zip(&prior.grid) {
            assert_abs_diff_eq!(w / t, ratio, epsilon = 1e-12);
        }
    }

    #[test]
    fn point_mass_is_absorbing() {
        let pm = PosteriorState::point_mass(PosteriorState::prior(&bench()).unwrap().grid, 0.6).unwrap();
        assert_eq!(bayes_update(&pm, false).unwrap(), pm);
        assert_eq!(bayes_update(&pm, true).unwrap(), pm);
    }

    #[test]
    fn updates_commute() {
        let prior = PosteriorState::prior(&bench()).unwrap();
        let a = bayes_update(&bayes_update(&prior, true).unwrap(), false).unwrap();
        let b = bayes_update(&bayes_update(&prior, false).unwrap(), true).unwrap();
        for (x, y) in a.weights.iter().zip(&b.weights) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-15);
        }
    }

    #[test]
    fn zero_likelihood_is_degenerate() {
        let p = PosteriorState::new(alloc::vec![0.0, 0.5], alloc::vec![1.0, 0.0]).unwrap();
        assert!(matches!(bayes_update(&p, true), Err(Error::Degenerate(_))));
    }

    #[test]
    fn hazard_shrink_examples() {
        let prior = PosteriorState::prior(&bench()).unwrap();
        assert!(hazard_shrink_check(&prior, &prior).unwrap());
        // a success moves mass up, so tail-over-point ratios grow
        let up = bayes_update(&prior, true).unwrap();
        let n = prior.grid.len();
        let direct = (0..n - 1).all(|i| up.hazard(i).unwrap() <= prior.hazard(i).unwrap());
        assert_eq!(hazard_shrink_check(&prior, &up).unwrap(), direct);
        assert!(!direct);

        let mut w = prior.weights.clone();
        w[0] *= 0.5;
        let total: f64 = w.iter().sum();
        let lowered = PosteriorState::new(prior.grid.clone(), w.iter().map(|x| x / total).collect()).unwrap();
        assert!(!hazard_shrink_check(&prior, &lowered).unwrap());
    }

    #[test]
    fn zero_periods_is_the_static_solve() {
        let e = bench();
        let prior = PosteriorState::prior(&e).unwrap();
        let path = dynamic_path(&e, prior.clone(), 0.5, 0, 42).unwrap();
        assert_eq!(path.periods.len(), 1);
        let s = solve_discrete(&e, &prior.grid, &prior.weights).unwrap();
        assert_eq!(path.periods[0].contract, s.contract);
    }

    #[test]
    fn paths_keep_valid_posteriors_and_are_reproducible() {
        let e = bench();
        let prior = PosteriorState::prior(&e).unwrap();
        let a = dynamic_path(&e, prior.clone(), 0.7, 20, 42).unwrap();
        let b = dynamic_path(&e, prior, 0.7, 20, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.periods.len(), 21);
        for p in &a.periods {
            let s: f64 = p.posterior.weights.iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
            assert!(p.posterior.weights.iter().all(|w| *w >= 0.0));
        }
    }
}
