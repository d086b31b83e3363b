//! Brute-force cross-checks for the continuous solvers: grid enumeration of
//! contracts, pairwise incentive checks on a type grid, the rent identity by
//! two separate quadratures, and a solver for discrete type distributions.

use alloc::vec;
use alloc::vec::Vec;

// inherent float methods shadow the trait whenever std is linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::bilateral::{Contract, Problem, SLOPE_CAP};
use crate::economy::Economy;
use crate::error::{Error, Result};
use crate::numerics::{find_root, integrate, linspace, maximize_scalar, Bracket, Tolerance};

/// Midpoints used by the oracle's own value quadrature.
pub const ORACLE_POINTS: usize = 4000;
/// Largest incentive violation treated as rounding.
pub const IC_TOL: f64 = 1e-9;

/// Value of `(a, b1)` by midpoint quadrature, implementing every type whose
/// virtual surplus is positive; zero if no type is.
pub fn quadrature_value(econ: &Economy, a: f64, b1: f64) -> f64 {
    let d = &econ.dist;
    let (lo, hi) = (econ.lower(), econ.upper());
    let h = (hi - lo) / ORACLE_POINTS as f64;
    let phi = econ.financing.phi(econ.working_capital - a);
    let mut total = 0.0;
    let mut any = false;
    for k in 0..ORACLE_POINTS {
        let t = lo + (k as f64 + 0.5) * h;
        // psi f, written without dividing by the density
        let g = (econ.surplus.value(t) - econ.cost.value(t) - phi) * d.pdf(t)
            - b1 * econ.signal.slope(t) * (1.0 - d.cdf(t));
        if g > 0.0 {
            total += g * h;
            any = true;
        }
    }
    if any {
        total - a
    } else {
        0.0
    }
}

/// Largest slope with a non-negative participation advance, doubled and
/// capped at [`SLOPE_CAP`].
pub fn slope_search_bound(econ: &Economy) -> f64 {
    (2.0 * Problem::baseline(econ).slope_cap()).min(SLOPE_CAP)
}

fn ir_gap(econ: &Economy, at: f64, a: f64, b1: f64) -> f64 {
    a + b1 * econ.signal.value(at) - econ.cost.value(at) - econ.financing.phi(econ.working_capital - a)
}

/// Participation advance of the type `at`, found by bisection and clamped
/// to `[0, K]`.
fn participation_advance(econ: &Economy, at: f64, b1: f64) -> f64 {
    let k = econ.working_capital;
    if ir_gap(econ, at, 0.0, b1) >= 0.0 {
        return 0.0;
    }
    if ir_gap(econ, at, k, b1) <= 0.0 {
        return k;
    }
    let (mut lo, mut hi) = (0.0, k);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ir_gap(econ, at, mid, b1) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSearch {
    pub best_advance: f64,
    pub best_slope: f64,
    pub best_value: f64,
    /// Spread of the advance across the enumerated participation manifold.
    pub advance_spread: f64,
}

/// Enumerates `nb` slopes (advance projected onto the participation
/// constraint) and `na` advances (slope from the same constraint), and keeps
/// the best pair. Ties keep the first pair found, so the slope sweep starting
/// at zero wins them.
pub fn grid_search_optimal(econ: &Economy, na: usize, nb: usize) -> Result<GridSearch> {
    if na < 50 || nb < 50 {
        return Err(Error::Invalid("grid search needs at least 50 points per instrument"));
    }
    let lo = econ.lower();
    let mut candidates: Vec<(f64, f64)> = linspace(0.0, slope_search_bound(econ), nb)
        .into_iter()
        .map(|b1| (participation_advance(econ, lo, b1), b1))
        .collect();
    let mu_low = econ.signal.value(lo);
    if mu_low > 0.0 {
        for a in linspace(0.0, econ.working_capital, na) {
            let b1 = (econ.cost.value(lo) + econ.financing.phi(econ.working_capital - a) - a) / mu_low;
            if b1 >= 0.0 {
                candidates.push((a, b1));
            }
        }
    }
    let mut best = GridSearch {
        best_advance: 0.0,
        best_slope: 0.0,
        best_value: f64::NEG_INFINITY,
        advance_spread: 0.0,
    };
    let (mut a_min, mut a_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for (a, b1) in candidates {
        a_min = a_min.min(a);
        a_max = a_max.max(a);
        let w = quadrature_value(econ, a, b1);
        if w > best.best_value {
            best.best_advance = a;
            best.best_slope = b1;
            best.best_value = w;
        }
    }
    best.advance_spread = a_max - a_min;
    Ok(best)
}

/// Direct mechanism on a finite type grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMechanism {
    pub types: Vec<f64>,
    pub allocation: Vec<bool>,
    pub advances: Vec<f64>,
    pub slopes: Vec<f64>,
    /// Truthful payoff of each implemented type; zero when excluded.
    pub rents: Vec<f64>,
}

impl DiscreteMechanism {
    pub fn new(econ: &Economy, types: Vec<f64>, allocation: Vec<bool>, advances: Vec<f64>, slopes: Vec<f64>) -> Result<Self> {
        let n = types.len();
        if n == 0 || allocation.len() != n || advances.len() != n || slopes.len() != n {
            return Err(Error::Invalid("mechanism arrays must share the type grid length"));
        }
        for i in 0..n {
            Contract::new(advances[i], slopes[i]).validate(econ.working_capital)?;
        }
        let rents = (0..n)
            .map(|i| {
                if allocation[i] {
                    mimic_payoff(econ, advances[i], slopes[i], types[i])
                } else {
                    0.0
                }
            })
            .collect();
        Ok(DiscreteMechanism {
            types,
            allocation,
            advances,
            slopes,
            rents,
        })
    }

    /// One contract for every type at or above `cutoff`.
    pub fn uniform(econ: &Economy, types: Vec<f64>, contract: Contract, cutoff: f64, empty: bool) -> Result<Self> {
        let n = types.len();
        let allocation = types.iter().map(|t| !empty && *t >= cutoff).collect();
        DiscreteMechanism::new(econ, types, allocation, vec![contract.advance; n], vec![contract.slope; n])
    }

    /// Every type implemented with a non-decreasing slope schedule. Adjacent
    /// downward constraints bind; the lowest type gets `lowest_advance`.
    pub fn from_slope_schedule(econ: &Economy, types: Vec<f64>, slopes: Vec<f64>, lowest_advance: f64) -> Result<Self> {
        let n = types.len();
        if slopes.len() != n || slopes.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Invalid("slope schedule must be non-decreasing on the type grid"));
        }
        let k = econ.working_capital;
        let fixed = |a: f64| a - econ.financing.phi(k - a);
        let mut advances = vec![lowest_advance; n];
        let mut m = fixed(lowest_advance);
        for j in 1..n {
            m -= (slopes[j] - slopes[j - 1]) * econ.signal.value(types[j]);
            if m < fixed(0.0) || m > fixed(k) {
                return Err(Error::Invalid("schedule needs an advance outside [0, K]"));
            }
            let target = m;
            advances[j] = if fixed(0.0) == target {
                0.0
            } else {
                find_root(|a| fixed(a) - target, Bracket::new(0.0, k)?, &Tolerance::default())?
            };
        }
        DiscreteMechanism::new(econ, types, vec![true; n], advances, slopes)
    }
}

/// Payoff of type `theta` taking the contract `(a, b1)`.
pub fn mimic_payoff(econ: &Economy, a: f64, b1: f64, theta: f64) -> f64 {
    a + b1 * econ.signal.value(theta) - econ.cost.value(theta) - econ.financing.phi(econ.working_capital - a)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IcReport {
    pub ok: bool,
    pub worst_violation: f64,
    /// `(true type, report)` of the worst violation.
    pub violating_pair: Option<(usize, usize)>,
}

/// Checks every type against every report that is implemented.
pub fn ic_verify(mech: &DiscreteMechanism, econ: &Economy) -> IcReport {
    let n = mech.types.len();
    let mut worst = 0.0;
    let mut pair = None;
    for i in 0..n {
        for j in 0..n {
            if i == j || !mech.allocation[j] {
                continue;
            }
            let gain = mimic_payoff(econ, mech.advances[j], mech.slopes[j], mech.types[i]) - mech.rents[i];
            if gain > worst {
                worst = gain;
                pair = Some((i, j));
            }
        }
    }
    IcReport {
        ok: worst <= IC_TOL,
        worst_violation: worst,
        violating_pair: if worst > IC_TOL { pair } else { None },
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RentIdentity {
    /// Expected rent of implemented types from the nested integral.
    pub direct: f64,
    /// Same quantity by integration by parts against the survival function.
    pub hazard_form: f64,
    pub gap: f64,
    pub direct_slope_part: f64,
    pub hazard_slope_part: f64,
}

const RENT_PANELS: usize = 256;

/// Rent with the lowest type's participation payoff as the constant.
pub fn rent_identity_check(econ: &Economy, a: f64, b1: f64, cutoff: f64) -> Result<RentIdentity> {
    let (lo, hi) = (econ.lower(), econ.upper());
    if !(lo..=hi).contains(&cutoff) {
        return Err(Error::Domain { what: "cutoff", value: cutoff });
    }
    let d = &econ.dist;
    let base = mimic_payoff(econ, a, b1, lo);
    let slope_gain = |from: f64, to: f64| -> Result<f64> {
        if to <= from {
            return Ok(0.0);
        }
        integrate(|s| b1 * econ.signal.slope(s), from, to, RENT_PANELS)
    };
    let cost_rise = |from: f64, to: f64| -> Result<f64> {
        if to <= from {
            return Ok(0.0);
        }
        integrate(|s| econ.cost.slope(s), from, to, RENT_PANELS)
    };
    let rent_at = |t: f64| -> f64 {
        base + slope_gain(lo, t).unwrap_or(f64::NAN) - cost_rise(lo, t).unwrap_or(f64::NAN)
    };
    let (direct, direct_slope_part) = if cutoff < hi {
        (
            integrate(|t| rent_at(t) * d.pdf(t), cutoff, hi, RENT_PANELS)?,
            integrate(|t| slope_gain(cutoff, t).unwrap_or(f64::NAN) * d.pdf(t), cutoff, hi, RENT_PANELS)?,
        )
    } else {
        (0.0, 0.0)
    };
    let survival = |t: f64| 1.0 - d.cdf(t);
    let hazard_slope_part = if cutoff < hi {
        b1 * d.integrate(|t| econ.signal.slope(t) * survival(t), cutoff, hi)?
    } else {
        0.0
    };
    let cost_part = if cutoff < hi {
        d.integrate(|t| econ.cost.slope(t) * survival(t), cutoff, hi)?
    } else {
        0.0
    };
    let hazard_form = survival(cutoff) * rent_at(cutoff) + hazard_slope_part - cost_part;
    if !(direct.is_finite() && hazard_form.is_finite()) {
        return Err(Error::Invalid("rent integrals are not finite"));
    }
    Ok(RentIdentity {
        direct,
        hazard_form,
        gap: (direct - hazard_form).abs(),
        direct_slope_part,
        hazard_slope_part,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcavityProfile {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub first_differences: Vec<f64>,
    pub second_differences: Vec<f64>,
    /// Sign changes in the first differences, ignoring exact zeros.
    pub slope_sign_changes: usize,
}

impl ConcavityProfile {
    pub fn is_concave(&self, tol: f64) -> bool {
        self.second_differences.iter().all(|d| *d <= tol)
    }

    pub fn is_decreasing(&self, tol: f64) -> bool {
        self.first_differences.iter().all(|d| *d <= tol)
    }
}

pub fn profile_of<F: Fn(f64) -> f64>(f: F, grid: &[f64]) -> ConcavityProfile {
    profile_from_values(grid, grid.iter().map(|x| f(*x)).collect())
}

fn profile_from_values(grid: &[f64], values: Vec<f64>) -> ConcavityProfile {
    let first: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    let second: Vec<f64> = first.windows(2).map(|w| w[1] - w[0]).collect();
    let signs: Vec<f64> = first.iter().filter(|d| **d != 0.0).map(|d| d.signum()).collect();
    let changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
    ConcavityProfile {
        grid: grid.to_vec(),
        values,
        first_differences: first,
        second_differences: second,
        slope_sign_changes: changes,
    }
}

/// Second-difference profile of the bilateral value in the slope.
pub fn concavity_probe(econ: &Economy, b1_grid: &[f64]) -> Result<ConcavityProfile> {
    let p = Problem::baseline(econ);
    let values: Vec<f64> = b1_grid.iter().map(|b| p.value(*b).map(|v| v.value)).collect::<Result<_>>()?;
    Ok(profile_from_values(b1_grid, values))
}

/// Right-tail mass over point mass, `(sum_{k>i} w_k) / w_i`.
pub fn discrete_hazard(weights: &[f64], i: usize) -> Option<f64> {
    let w = *weights.get(i)?;
    if w <= 0.0 {
        return None;
    }
    Some(weights[i + 1..].iter().sum::<f64>() / w)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteSolution {
    pub contract: Contract,
    /// Lowest implemented grid index, or the grid length when none is.
    pub cutoff_index: usize,
    pub cutoff: f64,
    pub empty: bool,
    pub value: f64,
}

struct DiscreteProblem<'a> {
    econ: &'a Economy,
    grid: &'a [f64],
    weights: &'a [f64],
    lowest: usize,
}

impl DiscreteProblem<'_> {
    fn psi(&self, k: usize, a: f64, b1: f64) -> f64 {
        let e = self.econ;
        let t = self.grid[k];
        let base = e.surplus.value(t) - e.cost.value(t) - e.financing.phi(e.working_capital - a);
        if k + 1 == self.grid.len() {
            return base;
        }
        let tail: f64 = self.weights[k + 1..].iter().sum();
        let step = e.signal.value(self.grid[k + 1]) - e.signal.value(t);
        base - b1 * step * tail / self.weights[k]
    }

    /// Best upper set of supported types: `(value, first index, empty)`.
    fn evaluate(&self, b1: f64) -> (f64, f64, usize, bool) {
        let a = participation_advance(self.econ, self.grid[self.lowest], b1);
        let n = self.grid.len();
        let mut best = (0.0, n, true);
        let mut tail = 0.0;
        for k in (self.lowest..n).rev() {
            if self.weights[k] <= 0.0 {
                continue;
            }
            tail += self.weights[k] * self.psi(k, a, b1);
            if tail - a > best.0 || (best.2 && tail - a == best.0 && tail > 0.0) {
                best = (tail - a, k, false);
            }
        }
        (best.0, a, best.1, best.2)
    }
}

/// Bilateral problem on a finite posterior: participation binds at the
/// lowest supported type and the principal picks the best upper set.
pub fn solve_discrete(econ: &Economy, grid: &[f64], weights: &[f64]) -> Result<DiscreteSolution> {
    if grid.is_empty() || grid.len() != weights.len() {
        return Err(Error::Invalid("grid and weights must be non-empty and of equal length"));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Invalid("type grid must be ascending"));
    }
    let total: f64 = weights.iter().sum();
    if weights.iter().any(|w| !(*w >= 0.0)) || (total - 1.0).abs() > 1e-9 {
        return Err(Error::Invalid("weights must be a probability vector"));
    }
    let lowest = weights.iter().position(|w| *w > 0.0).ok_or(Error::Invalid("no supported type"))?;
    let problem = DiscreteProblem { econ, grid, weights, lowest };
    let t_low = grid[lowest];
    let mu_low = econ.signal.value(t_low);
    let cap = if mu_low <= 0.0 {
        SLOPE_CAP
    } else {
        ((econ.cost.value(t_low) + econ.financing.phi(econ.working_capital)) / mu_low).clamp(0.0, SLOPE_CAP)
    };
    let b1 = if cap <= 0.0 {
        0.0
    } else {
        maximize_scalar(|b| problem.evaluate(b).0, 0.0, cap, &Tolerance::default())?.0
    };
    let (value, a, index, empty) = problem.evaluate(b1);
    Ok(DiscreteSolution {
        contract: Contract::new(a, b1),
        cutoff_index: index,
        cutoff: if empty { grid[grid.len() - 1] } else { grid[index] },
        empty,
        value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bilateral::solve_optimal;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bench(mu0: f64, r: f64) -> Economy {
        Economy::benchmark(2.0, mu0, r).unwrap()
    }

    #[test]
    fn grid_search_agrees_with_solver() {
        for r in [0.5, 1.0, 2.0] {
            let e = bench(0.1, r);
            let g = grid_search_optimal(&e, 200, 200).unwrap();
            let s = solve_optimal(&e).unwrap();
            assert!((g.best_value - s.value).abs() < 1e-3, "R={r}: {} vs {}", g.best_value, s.value);
        }
    }

    #[test]
    fn grid_search_never_beats_solver_by_more_than_resolution() {
        for r in [0.25, 1.0, 3.0] {
            let e = bench(0.0, r);
            let g = grid_search_optimal(&e, 50, 50).unwrap();
            let s = solve_optimal(&e).unwrap();
            assert!(g.best_value <= s.value + 1e-3);
        }
    }

    #[test]
    fn frictionless_finance_pins_the_advance() {
        // with R = 0 and a zero cost at the bottom, the manifold has one advance
        let g = grid_search_optimal(&bench(0.1, 0.0), 60, 60).unwrap();
        assert_eq!(g.advance_spread, 0.0);
        assert_eq!(g.best_advance, 0.0);
    }

    #[test]
    fn flat_signal_uses_no_slope() {
        let e = bench(0.0, 1.0).with_signal_scale(0.0).unwrap();
        let g = grid_search_optimal(&e, 50, 50).unwrap();
        assert_eq!(g.best_slope, 0.0);
        assert!(grid_search_optimal(&e, 10, 50).is_err());
    }

    #[test]
    fn constant_contract_is_incentive_compatible() {
        let e = bench(0.1, 1.0);
        let types = linspace(0.0, 1.0, 50);
        let m = DiscreteMechanism::uniform(&e, types, Contract::new(0.4, 0.7), 0.0, false).unwrap();
        assert!(ic_verify(&m, &e).ok);
    }

    #[test]
    fn solved_benchmark_mechanism_passes() {
        let e = bench(0.0, 1.0);
        let s = solve_optimal(&e).unwrap();
        let m = DiscreteMechanism::uniform(&e, linspace(0.0, 1.0, 50), s.contract, s.cutoff, s.empty).unwrap();
        let rep = ic_verify(&m, &e);
        assert!(rep.ok, "{rep:?}");
    }

    #[test]
    fn increasing_schedule_passes_and_decreasing_fails() {
        let e = bench(0.1, 1.0);
        let types = linspace(0.0, 1.0, 20);
        let up: Vec<f64> = types.iter().map(|t| 0.5 + 0.3 * t).collect();
        let m = DiscreteMechanism::from_slope_schedule(&e, types.clone(), up, 0.5).unwrap();
        assert!(ic_verify(&m, &e).ok);

        let down: Vec<f64> = types.iter().map(|t| 1.0 - 0.5 * t).collect();
        let m = DiscreteMechanism::new(&e, types.clone(), vec![true; 20], vec![0.5; 20], down).unwrap();
        let rep = ic_verify(&m, &e);
        assert!(!rep.ok);
        let (i, j) = rep.violating_pair.unwrap();
        assert_ne!(i, j);
    }

    #[test]
    fn relabeling_does_not_change_the_verdict() {
        let e = bench(0.1, 1.0);
        let types = linspace(0.0, 1.0, 12);
        let slopes: Vec<f64> = types.iter().map(|t| 1.0 - 0.5 * t).collect();
        let m = DiscreteMechanism::new(&e, types.clone(), vec![true; 12], vec![0.5; 12], slopes.clone()).unwrap();
        let rev = DiscreteMechanism::new(
            &e,
            types.iter().rev().copied().collect(),
            vec![true; 12],
            vec![0.5; 12],
            slopes.iter().rev().copied().collect(),
        )
        .unwrap();
        let (a, b) = (ic_verify(&m, &e), ic_verify(&rev, &e));
        assert_eq!(a.ok, b.ok);
        assert_abs_diff_eq!(a.worst_violation, b.worst_violation, epsilon = 1e-15);
    }

    #[test]
    fn rent_identity_examples() {
        let e = bench(0.1, 1.0);
        let zero = rent_identity_check(&e, 0.3, 0.0, 0.3).unwrap();
        assert_eq!(zero.direct_slope_part, 0.0);
        assert_eq!(zero.hazard_slope_part, 0.0);
        let one = rent_identity_check(&e, 0.3, 1.0, 0.3).unwrap();
        assert!(one.gap < 1e-6);
        assert!((one.direct_slope_part - one.hazard_slope_part).abs() < 1e-6);
    }

    #[test]
    fn rent_identity_random_draws() {
        let e = bench(0.1, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            let a = rng.gen_range(0.0..1.0);
            let b1 = rng.gen_range(0.0..3.0);
            let cut = rng.gen_range(0.0..1.0);
            worst = worst.max(rent_identity_check(&e, a, b1, cut).unwrap().gap);
        }
        assert!(worst < 1e-5, "{worst}");
    }

    #[test]
    fn probe_calibrates_on_quadratic() {
        let p = profile_of(|x| -x * x, &linspace(-1.0, 1.0, 21));
        let d0 = p.second_differences[0];
        assert!(d0 < 0.0);
        assert!(p.second_differences.iter().all(|d| (d - d0).abs() < 1e-12));
        assert_eq!(p.slope_sign_changes, 1);
    }

    #[test]
    fn bilateral_value_is_unimodal_in_slope() {
        let e = bench(0.1, 1.0);
        let cap = Problem::baseline(&e).slope_cap();
        let p = concavity_probe(&e, &linspace(0.0, cap, 100)).unwrap();
        assert!(p.slope_sign_changes <= 1);
        let degenerate = concavity_probe(&bench(0.0, 1.0), &linspace(0.0, 3.0, 100)).unwrap();
        assert!(degenerate.is_decreasing(0.0));
    }

    #[test]
    fn discrete_solver_on_fine_uniform_grid_tracks_continuum() {
        let e = bench(0.0, 1.0);
        let n = 400;
        let grid: Vec<f64> = (0..n).map(|k| (k as f64 + 0.5) / n as f64).collect();
        let w = vec![1.0 / n as f64; n];
        let d = solve_discrete(&e, &grid, &w).unwrap();
        let s = solve_optimal(&e).unwrap();
        assert!((d.value - s.value).abs() < 1e-2);
        assert_eq!(d.contract.slope, 0.0);
    }

    #[test]
    fn discrete_hazard_values() {
        let w = [0.25, 0.25, 0.5];
        assert_eq!(discrete_hazard(&w, 0), Some(3.0));
        assert_eq!(discrete_hazard(&w, 2), Some(0.0));
        assert_eq!(discrete_hazard(&[0.0, 1.0], 0), None);
    }

    proptest! {
        #[test]
        fn constant_contracts_always_pass(a in 0.0..1.0f64, b1 in 0.0..5.0f64) {
            let e = bench(0.1, 1.0);
            let m = DiscreteMechanism::uniform(&e, linspace(0.0, 1.0, 15), Contract::new(a, b1), 0.0, false).unwrap();
            prop_assert!(ic_verify(&m, &e).ok);
        }

        #[test]
        fn rent_identity_holds(a in 0.0..1.0f64, b1 in 0.0..3.0f64, cut in 0.0..1.0f64, mu0 in 0.0..0.5f64) {
            let e = bench(mu0, 1.5);
            prop_assert!(rent_identity_check(&e, a, b1, cut).unwrap().gap < 1e-6);
        }
    }
}
