//! Single-counterparty contract design.
//!
//! The participation constraint of the lowest type binds, which ties the
//! advance to the contingent slope. The principal then picks the slope on
//! `[0, slope_cap]`, and implements every type whose virtual surplus is
//! non-negative.

use alloc::vec::Vec;

// inherent float methods shadow the trait whenever std is linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::economy::Economy;
use crate::error::{Error, Result};
use crate::numerics::{find_root, linspace, maximize_scalar, Bracket, Tolerance};

/// Upper bound on the contingent slope when the participation constraint
/// does not bound it.
pub const SLOPE_CAP: f64 = 10.0;

/// Step in `b1` for the finite differences along the participation manifold.
pub const FD_STEP: f64 = 1e-5;

const CUTOFF_SCAN: usize = 64;
const CORNER_TOL: f64 = 1e-9;

/// Advance `a`, intercept `b0` and slope `b1` of `T(x) = b0 + b1 x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contract {
    pub advance: f64,
    pub intercept: f64,
    pub slope: f64,
}

impl Contract {
    pub fn new(advance: f64, slope: f64) -> Self {
        Contract {
            advance,
            intercept: 0.0,
            slope,
        }
    }

    /// Checks limited liability and `0 <= a <= K`.
    pub fn validate(&self, working_capital: f64) -> Result<()> {
        if !(self.advance >= 0.0 && self.advance <= working_capital) {
            return Err(Error::Domain { what: "advance", value: self.advance });
        }
        if !(self.intercept >= 0.0) {
            return Err(Error::Domain { what: "intercept", value: self.intercept });
        }
        if !(self.slope >= 0.0) {
            return Err(Error::Domain { what: "slope", value: self.slope });
        }
        Ok(())
    }

    /// Moves the intercept into the advance (capped at `K`).
    pub fn fold_intercept(&self, working_capital: f64) -> Self {
        Contract {
            advance: (self.advance + self.intercept).min(working_capital),
            intercept: 0.0,
            slope: self.slope,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Interior,
    SlopeZero,
    AdvanceZero,
    AdvanceFull,
}

/// Value split: `value = productive_surplus - financing_cost -
/// information_rent - advance_outlay`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Decomposition {
    pub productive_surplus: f64,
    pub financing_cost: f64,
    pub information_rent: f64,
    pub advance_outlay: f64,
}

impl Decomposition {
    pub fn value(&self) -> f64 {
        self.productive_surplus - self.financing_cost - self.information_rent - self.advance_outlay
    }
}

/// Lowest implemented type. `empty` marks a negative virtual surplus
/// everywhere, in which case `theta` is the top of the support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cutoff {
    pub theta: f64,
    pub empty: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub advance: f64,
    pub cutoff: Cutoff,
    /// Integral of the virtual surplus over implemented types, minus the advance.
    pub value: f64,
    pub decomposition: Decomposition,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BilateralSolution {
    pub contract: Contract,
    pub cutoff: f64,
    pub empty: bool,
    pub value: f64,
    pub decomposition: Decomposition,
    /// Derivative of the value along the participation manifold per unit of
    /// advance; `None` when the advance does not move with the slope.
    pub foc_residual: Option<f64>,
    pub boundary: Boundary,
    pub slope_cap: f64,
}

/// Response of the binding advance to the slope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IrSlope {
    pub value: f64,
    /// The advance sits at 0 or `K`; `value` is then the derivative from the
    /// side where the constraint still binds.
    pub corner: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SufficientStatistics {
    pub marginal_financing_cost: f64,
    pub marginal_screening_return: f64,
    pub boundary: Boundary,
}

/// Bilateral problem with a given enforcement share: the fraction of the
/// contingent payment the counterparty actually receives. Full enforcement
/// (share one) is the baseline.
#[derive(Debug, Clone, Copy)]
pub struct Problem<'a> {
    pub econ: &'a Economy,
    pub enforcement: f64,
}

impl<'a> Problem<'a> {
    pub fn baseline(econ: &'a Economy) -> Self {
        Problem { econ, enforcement: 1.0 }
    }

    pub fn with_enforcement(econ: &'a Economy, enforcement: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&enforcement) {
            return Err(Error::Domain { what: "enforcement share", value: enforcement });
        }
        Ok(Problem { econ, enforcement })
    }

    fn check_slope(b1: f64) -> Result<()> {
        if !(b1 >= 0.0) || !b1.is_finite() {
            return Err(Error::Domain { what: "slope", value: b1 });
        }
        Ok(())
    }

    /// Advance that makes the lowest type's participation constraint bind,
    /// clamped to `[0, K]`.
    pub fn advance(&self, b1: f64) -> Result<f64> {
        Self::check_slope(b1)?;
        let e = self.econ;
        let k = e.working_capital;
        let lo = e.lower();
        let gap = |a: f64| a + self.enforcement * b1 * e.signal.value(lo) - e.cost.value(lo) - e.financing.phi(k - a);
        if gap(0.0) >= 0.0 {
            return Ok(0.0);
        }
        if gap(k) <= 0.0 {
            return Ok(k);
        }
        find_root(gap, Bracket::new(0.0, k)?, &Tolerance::default())
    }

    pub fn ir_slope(&self, b1: f64) -> Result<IrSlope> {
        let a = self.advance(b1)?;
        let corner = a <= 0.0 || a >= self.econ.working_capital;
        Ok(IrSlope {
            value: self.ir_slope_at_advance(a),
            corner,
        })
    }

    /// `-mu(lower) / (1 + Phi_l(K - a))`, scaled by the enforcement share.
    pub fn ir_slope_at_advance(&self, a: f64) -> f64 {
        let e = self.econ;
        let mu_low = self.enforcement * e.signal.value(e.lower());
        -mu_low / (1.0 + e.financing.phi_l(e.working_capital - a))
    }

    /// Largest slope with a non-negative binding advance, capped at
    /// [`SLOPE_CAP`].
    pub fn slope_cap(&self) -> f64 {
        let e = self.econ;
        let lo = e.lower();
        let mu_low = self.enforcement * e.signal.value(lo);
        if mu_low <= 0.0 {
            return SLOPE_CAP;
        }
        ((e.cost.value(lo) + e.financing.phi(e.working_capital)) / mu_low).clamp(0.0, SLOPE_CAP)
    }

    pub fn virtual_surplus(&self, theta: f64, a: f64, b1: f64) -> Result<f64> {
        let hazard = self.econ.dist.hazard(theta)?;
        Ok(self.surplus_with_hazard(theta, a, b1, hazard))
    }

    fn surplus_with_hazard(&self, theta: f64, a: f64, b1: f64, hazard: f64) -> f64 {
        let e = self.econ;
        e.surplus.value(theta)
            - e.cost.value(theta)
            - e.financing.phi(e.working_capital - a)
            - self.enforcement * b1 * e.signal.slope(theta) * hazard
    }

    pub(crate) fn psi(&self, theta: f64, a: f64, b1: f64) -> f64 {
        self.surplus_with_hazard(theta, a, b1, self.econ.dist.hazard_unchecked(theta))
    }

    /// Smallest type whose virtual surplus plus `shift` is non-negative.
    pub fn cutoff_shifted(&self, a: f64, b1: f64, shift: f64) -> Result<Cutoff> {
        let (lo, hi) = (self.econ.lower(), self.econ.upper());
        let g = |t: f64| self.psi(t, a, b1) + shift;
        if g(lo) >= 0.0 {
            return Ok(Cutoff { theta: lo, empty: false });
        }
        let grid = linspace(lo, hi, CUTOFF_SCAN);
        for w in grid.windows(2) {
            if g(w[1]) >= 0.0 {
                let theta = if g(w[1]) == 0.0 {
                    w[1]
                } else {
                    find_root(g, Bracket::new(w[0], w[1])?, &Tolerance::default())?
                };
                return Ok(Cutoff { theta, empty: false });
            }
        }
        Ok(Cutoff { theta: hi, empty: true })
    }

    pub fn cutoff(&self, a: f64, b1: f64) -> Result<Cutoff> {
        self.cutoff_shifted(a, b1, 0.0)
    }

    /// Value and decomposition of `(a, b1)` at its own cutoff; the advance
    /// is taken as given rather than from the participation constraint.
    pub fn evaluate_at(&self, a: f64, b1: f64) -> Result<Evaluation> {
        let cutoff = self.cutoff(a, b1)?;
        self.evaluate_with_cutoff(a, b1, cutoff)
    }

    pub(crate) fn evaluate_with_cutoff(&self, a: f64, b1: f64, cutoff: Cutoff) -> Result<Evaluation> {
        if cutoff.empty {
            return Ok(Evaluation {
                advance: a,
                cutoff,
                value: 0.0,
                decomposition: Decomposition::default(),
            });
        }
        let e = self.econ;
        let d = &e.dist;
        let (lo, hi) = (cutoff.theta, e.upper());
        let phi = e.financing.phi(e.working_capital - a);
        let productive_surplus = d.integrate(|t| (e.surplus.value(t) - e.cost.value(t)) * d.pdf(t), lo, hi)?;
        let information_rent =
            self.enforcement * b1 * d.integrate(|t| e.signal.slope(t) * (1.0 - d.cdf(t)), lo, hi)?;
        let decomposition = Decomposition {
            productive_surplus,
            financing_cost: phi * (1.0 - d.cdf(lo)),
            information_rent,
            advance_outlay: a,
        };
        let direct = d.integrate(
            |t| {
                (e.surplus.value(t) - e.cost.value(t) - phi) * d.pdf(t)
                    - self.enforcement * b1 * e.signal.slope(t) * (1.0 - d.cdf(t))
            },
            lo,
            hi,
        )? - a;
        Ok(Evaluation {
            advance: a,
            cutoff,
            value: direct,
            decomposition,
        })
    }

    /// Value of the slope `b1` with the advance from the participation
    /// constraint.
    pub fn value(&self, b1: f64) -> Result<Evaluation> {
        let a = self.advance(b1)?;
        self.evaluate_at(a, b1)
    }

    /// Builds the full solution record at a given slope.
    pub fn solution_at(&self, b1: f64) -> Result<BilateralSolution> {
        let cap = self.slope_cap();
        let eval = self.value(b1)?;
        let a = eval.advance;
        let k = self.econ.working_capital;
        let boundary = if b1 <= CORNER_TOL {
            Boundary::SlopeZero
        } else if a <= CORNER_TOL * k {
            Boundary::AdvanceZero
        } else if a >= k * (1.0 - CORNER_TOL) {
            Boundary::AdvanceFull
        } else {
            Boundary::Interior
        };
        Ok(BilateralSolution {
            contract: Contract::new(a, b1),
            cutoff: eval.cutoff.theta,
            empty: eval.cutoff.empty,
            value: eval.value,
            decomposition: eval.decomposition,
            foc_residual: self.manifold_derivative(b1, cap)?,
            boundary,
            slope_cap: cap,
        })
    }

    /// `dW/da` along the participation manifold by central difference in `b1`
    /// (one-sided at the ends of `[0, cap]`).
    fn manifold_derivative(&self, b1: f64, cap: f64) -> Result<Option<f64>> {
        let lo = (b1 - FD_STEP).max(0.0);
        let hi = (b1 + FD_STEP).min(cap.max(b1));
        if !(hi > lo) {
            return Ok(None);
        }
        let (vl, vh) = (self.value(lo)?, self.value(hi)?);
        let da = vh.advance - vl.advance;
        if da.abs() < 1e-14 {
            return Ok(None);
        }
        Ok(Some((vh.value - vl.value) / da))
    }

    /// Maximizes the value over `b1` in `[0, slope_cap]`.
    pub fn solve(&self) -> Result<BilateralSolution> {
        let cap = self.slope_cap();
        if cap <= 0.0 {
            return self.solution_at(0.0);
        }
        let objective = |b1: f64| self.value(b1).map(|v| v.value).unwrap_or(f64::NEG_INFINITY);
        let (b1, _) = maximize_scalar(objective, 0.0, cap, &Tolerance::default())?;
        self.solution_at(b1)
    }
}

pub fn binding_ir_advance(econ: &Economy, b1: f64) -> Result<f64> {
    Problem::baseline(econ).advance(b1)
}

pub fn ir_slope(econ: &Economy, b1: f64) -> Result<IrSlope> {
    Problem::baseline(econ).ir_slope(b1)
}

pub fn virtual_surplus(econ: &Economy, theta: f64, a: f64, b1: f64) -> Result<f64> {
    Problem::baseline(econ).virtual_surplus(theta, a, b1)
}

pub fn cutoff(econ: &Economy, a: f64, b1: f64) -> Result<Cutoff> {
    Problem::baseline(econ).cutoff(a, b1)
}

pub fn principal_value(econ: &Economy, b1: f64) -> Result<Evaluation> {
    Problem::baseline(econ).value(b1)
}

pub fn solve_optimal(econ: &Economy) -> Result<BilateralSolution> {
    Problem::baseline(econ).solve()
}

/// Value of an arbitrary contract at its own cutoff, intercept included as
/// an extra outlay.
pub fn contract_value(econ: &Economy, contract: &Contract) -> Result<f64> {
    contract.validate(econ.working_capital)?;
    let eval = Problem::baseline(econ).evaluate_at(contract.advance, contract.slope)?;
    if eval.cutoff.empty {
        return Ok(0.0);
    }
    Ok(eval.value - contract.intercept)
}

/// Rent of type `theta` before the participation offset:
/// integral of `b1 mu' - c'` from the lowest type.
pub fn rent_schedule(econ: &Economy, b1: f64, theta: f64) -> Result<f64> {
    let lo = econ.lower();
    if !(theta >= lo) {
        return Err(Error::Domain { what: "type", value: theta });
    }
    Ok(b1 * (econ.signal.value(theta) - econ.signal.value(lo)) - (econ.cost.value(theta) - econ.cost.value(lo)))
}

/// Outside-finance exposure at the benchmark optimum, `(sqrt(1 + 2R) - 1) / R`.
pub fn closed_form_ell_star(r: f64) -> Result<f64> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::Domain { what: "tightness R", value: r });
    }
    if r <= 1e-12 {
        return Ok(1.0);
    }
    // rationalized to avoid cancellation at small R
    Ok(2.0 / (1.0 + (1.0 + 2.0 * r).sqrt()))
}

/// Value of paying the full working capital up front: no rent, no
/// financing, implement every type whose surplus covers `K`.
pub fn pure_advance_value(econ: &Economy) -> Result<f64> {
    let k = econ.working_capital;
    let (lo, hi) = (econ.lower(), econ.upper());
    let net = |t: f64| econ.surplus.value(t) - k;
    let cut = if net(lo) >= 0.0 {
        lo
    } else if net(hi) <= 0.0 {
        return Ok(0.0);
    } else {
        find_root(net, Bracket::new(lo, hi)?, &Tolerance::default())?
    };
    econ.dist.integrate(|t| net(t) * econ.dist.pdf(t), cut, hi)
}

/// Slope of the contract with no advance. When the lowest type's signal is
/// positive the participation constraint pins it; otherwise it is chosen
/// on `[0, SLOPE_CAP]` to maximize value.
pub fn pure_contingent_slope(econ: &Economy) -> Result<f64> {
    let p = Problem::baseline(econ);
    let lo = econ.lower();
    let mu_low = econ.signal.value(lo);
    if mu_low > 0.0 {
        let b1 = (econ.cost.value(lo) + econ.financing.phi(econ.working_capital)) / mu_low;
        return Ok(b1.max(0.0));
    }
    let (b1, _) = maximize_scalar(
        |b1| p.evaluate_at(0.0, b1).map(|e| e.value).unwrap_or(f64::NEG_INFINITY),
        0.0,
        SLOPE_CAP,
        &Tolerance::default(),
    )?;
    Ok(b1)
}

/// Value with no advance, at [`pure_contingent_slope`].
pub fn pure_contingent_value(econ: &Economy) -> Result<f64> {
    let b1 = pure_contingent_slope(econ)?;
    Ok(Problem::baseline(econ).evaluate_at(0.0, b1)?.value)
}

/// Tightness at which the contingent-only value falls to the pure-advance
/// value. The upper end of the bracket doubles from 1 up to `1e6`.
pub fn crossing_threshold(econ: &Economy) -> Result<f64> {
    let target = pure_advance_value(econ)?;
    let gap = |r: f64| -> Result<f64> { Ok(pure_contingent_value(&econ.with_tightness(r)?)? - target) };
    if !(gap(0.0)? > 0.0) {
        return Err(Error::Invalid("contingent-only value does not exceed the pure-advance value at R = 0"));
    }
    let mut hi = 1.0;
    while gap(hi)? > 0.0 {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::NotFound { limit: 1e6 });
        }
    }
    // bisection keeps the bracket honest even where the gap is flat
    let (mut lo, mut up) = (0.0, hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + up);
        if gap(mid)? > 0.0 {
            lo = mid;
        } else {
            up = mid;
        }
        if up - lo < 1e-13 {
            break;
        }
    }
    Ok(0.5 * (lo + up))
}

/// Advance share of the expected payment to implemented types.
pub fn cash_intensity(econ: &Economy, sol: &BilateralSolution) -> Result<f64> {
    intensity_of(econ, sol.contract.advance, sol.contract.slope, sol.cutoff)
}

/// `a / (a + b1 E[mu | implemented])` for a cutoff at `cut`.
pub fn intensity_of(econ: &Economy, a: f64, b1: f64, cut: f64) -> Result<f64> {
    let contingent = if b1 == 0.0 {
        0.0
    } else {
        b1 * econ.dist.conditional_mean_above(|t| econ.signal.value(t), cut)?
    };
    if a + contingent <= 0.0 {
        return Ok(0.0);
    }
    Ok(a / (a + contingent))
}

pub fn sufficient_statistics(econ: &Economy, sol: &BilateralSolution) -> SufficientStatistics {
    let marginal_financing_cost = econ.financing.phi_l(econ.working_capital - sol.contract.advance);
    SufficientStatistics {
        marginal_financing_cost,
        marginal_screening_return: marginal_financing_cost - sol.foc_residual.unwrap_or(0.0),
        boundary: sol.boundary,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub tightness: f64,
    pub advance: f64,
    pub exposure: f64,
    pub cash_intensity: f64,
    /// Financing cost at the optimum over the top type's surplus.
    pub financing_share: f64,
    pub mixed_value: f64,
    pub advance_value: f64,
    pub contingent_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub rows: Vec<SweepRow>,
    /// First differences of the advance positive at every step.
    pub advance_increasing: bool,
    /// Second differences of the advance negative at every interior point.
    pub advance_concave: bool,
}

pub fn sweep_r(econ: &Economy, r_grid: &[f64]) -> Result<Sweep> {
    if r_grid.iter().any(|r| !(*r > 0.0)) || r_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Invalid("tightness grid must be positive and ascending"));
    }
    let advance_value = pure_advance_value(econ)?;
    let mut rows = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let e = econ.with_tightness(r)?;
        let sol = solve_optimal(&e)?;
        let exposure = e.working_capital - sol.contract.advance;
        rows.push(SweepRow {
            tightness: r,
            advance: sol.contract.advance,
            exposure,
            cash_intensity: cash_intensity(&e, &sol)?,
            financing_share: e.financing.phi(exposure) / e.top_surplus(),
            mixed_value: sol.value,
            advance_value,
            contingent_value: pure_contingent_value(&e)?,
        });
    }
    let a: Vec<f64> = rows.iter().map(|r| r.advance).collect();
    let x: Vec<f64> = r_grid.to_vec();
    let slopes: Vec<f64> = (1..a.len()).map(|i| (a[i] - a[i - 1]) / (x[i] - x[i - 1])).collect();
    Ok(Sweep {
        advance_increasing: slopes.iter().all(|s| *s > 0.0),
        advance_concave: slopes.windows(2).all(|w| w[1] < w[0]),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::economy::{Curve, FinancingCost, TypeDistribution};
    use approx::assert_abs_diff_eq;

    fn bench(v: f64, mu0: f64, r: f64) -> Economy {
        Economy::benchmark(v, mu0, r).unwrap()
    }

    #[test]
    fn binding_advance_examples() {
        let a = binding_ir_advance(&bench(2.0, 0.0, 1.0), 0.7).unwrap();
        assert_abs_diff_eq!(a, 2.0 - 3.0_f64.sqrt(), epsilon = 1e-10);
        assert_eq!(binding_ir_advance(&bench(2.0, 0.0, 0.0), 0.4).unwrap(), 0.0);
        let e = bench(2.0, 0.1, 1.0);
        let a = binding_ir_advance(&e, 1.0).unwrap();
        // independent bisection on a + 0.1 = (1 - a)^2 / 2
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid + 0.1 - 0.5 * (1.0 - mid) * (1.0 - mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        assert_abs_diff_eq!(a, lo, epsilon = 1e-10);
        assert!((a + 0.1 - 0.5 * (1.0 - a).powi(2)).abs() < 1e-10);
        assert!(binding_ir_advance(&e, -1.0).is_err());
    }

    #[test]
    fn ir_slope_examples() {
        assert_eq!(ir_slope(&bench(2.0, 0.0, 1.0), 0.3).unwrap().value, 0.0);
        let p = bench(2.0, 0.1, 1.0);
        assert_abs_diff_eq!(Problem::baseline(&p).ir_slope_at_advance(0.2), -0.1 / 1.8, epsilon = 1e-15);
        let s = ir_slope(&bench(2.0, 0.1, 0.0), 0.0).unwrap();
        assert_abs_diff_eq!(s.value, -0.1, epsilon = 1e-15);
        assert!(s.corner);
    }

    #[test]
    fn ir_slope_matches_finite_difference() {
        let e = bench(2.0, 0.1, 1.0);
        let b1 = 1.0;
        let h = 1e-6;
        let fd = (binding_ir_advance(&e, b1 + h).unwrap() - binding_ir_advance(&e, b1 - h).unwrap()) / (2.0 * h);
        assert_abs_diff_eq!(ir_slope(&e, b1).unwrap().value, fd, epsilon = 1e-7);
    }

    #[test]
    fn virtual_surplus_examples() {
        let e = bench(2.0, 0.0, 1.0);
        let a = 2.0 - 3.0_f64.sqrt();
        let phi = 0.5 * (1.0 - a) * (1.0 - a);
        assert_abs_diff_eq!(virtual_surplus(&e, 1.0, a, 3.0).unwrap(), 1.0 - phi, epsilon = 1e-12);
        assert_abs_diff_eq!(virtual_surplus(&e, 1.0, a, 3.0).unwrap(), 0.732, epsilon = 1e-3);
        assert_abs_diff_eq!(virtual_surplus(&e, 0.7, 1.0, 0.0).unwrap(), 0.7, epsilon = 1e-15);
        assert_abs_diff_eq!(virtual_surplus(&e, 0.4, 1.0, 0.5).unwrap(), 0.4 - 0.5 * 0.6, epsilon = 1e-15);
        assert!(virtual_surplus(&e, 1.2, 1.0, 0.5).is_err());
    }

    #[test]
    fn cutoff_examples() {
        let e = bench(2.0, 0.0, 1.0);
        let a = 2.0 - 3.0_f64.sqrt();
        let c = cutoff(&e, a, 0.0).unwrap();
        assert_abs_diff_eq!(c.theta, a, epsilon = 1e-10);
        assert!(!c.empty);
        let full = cutoff(&bench(3.0, 0.0, 0.0), 0.0, 0.0).unwrap();
        assert_eq!(full.theta, 0.0);
        let none = cutoff(&bench(2.0, 0.0, 50.0), 0.0, 0.0).unwrap();
        assert!(none.empty);
        assert_eq!(none.theta, 1.0);
    }

    #[test]
    fn principal_value_matches_closed_forms() {
        let e = bench(2.0, 0.0, 1.0);
        let a = 2.0 - 3.0_f64.sqrt();
        let w = principal_value(&e, 0.0).unwrap();
        let closed = 0.5 * (1.0 - a) * (1.0 - a) - a;
        assert_abs_diff_eq!(w.value, closed, epsilon = 1e-9);
        assert_abs_diff_eq!(w.decomposition.value(), w.value, epsilon = 1e-9);
        let frictionless = principal_value(&bench(2.0, 0.0, 0.0), 0.0).unwrap();
        assert_abs_diff_eq!(frictionless.value, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn rent_schedule_examples() {
        let e = bench(2.0, 0.0, 1.0);
        assert_abs_diff_eq!(rent_schedule(&e, 0.0, 0.6).unwrap(), -0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(rent_schedule(&e, 1.0, 0.6).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(rent_schedule(&e, 1.5, 0.4).unwrap(), 0.2, epsilon = 1e-15);
        assert!(rent_schedule(&e, 1.0, -0.1).is_err());
    }

    #[test]
    fn closed_form_exposure_examples() {
        assert_abs_diff_eq!(closed_form_ell_star(1.0).unwrap(), 3.0_f64.sqrt() - 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(closed_form_ell_star(2.0).unwrap(), 0.61803, epsilon = 1e-5);
        assert_eq!(closed_form_ell_star(0.0).unwrap(), 1.0);
        assert_abs_diff_eq!(closed_form_ell_star(1e-9).unwrap(), 1.0, epsilon = 1e-8);
        assert!(closed_form_ell_star(-1.0).is_err());
    }

    #[test]
    fn optimal_advance_at_benchmark() {
        let sol = solve_optimal(&bench(2.0, 0.0, 1.0)).unwrap();
        assert_abs_diff_eq!(sol.contract.advance, 0.26795, epsilon = 1e-5);
        let sol5 = solve_optimal(&bench(2.0, 0.0, 5.0)).unwrap();
        assert_abs_diff_eq!(sol5.contract.advance, 0.537, epsilon = 5e-4);
        assert_eq!(sol.foc_residual, None);
    }

    #[test]
    fn pure_advance_examples() {
        assert_abs_diff_eq!(pure_advance_value(&bench(2.0, 0.0, 1.0)).unwrap(), 0.25, epsilon = 1e-12);
        let flat = Economy::new(
            TypeDistribution::uniform(0.0, 1.0).unwrap(),
            Curve::linear(0.0, 1.0),
            Curve::linear(0.0, 0.5),
            Curve::linear(0.0, 1.0),
            FinancingCost::quadratic(1.0).unwrap(),
            1.0,
        )
        .unwrap();
        assert_eq!(pure_advance_value(&flat).unwrap(), 0.0);
        assert_eq!(
            pure_advance_value(&bench(2.0, 0.0, 0.5)).unwrap(),
            pure_advance_value(&bench(2.0, 0.0, 5.0)).unwrap()
        );
    }

    #[test]
    fn pure_contingent_examples() {
        assert!(pure_contingent_value(&bench(2.0, 0.0, 0.0)).unwrap() > 0.25);
        assert!(pure_contingent_value(&bench(2.0, 0.0, 1.0)).unwrap() > pure_contingent_value(&bench(2.0, 0.0, 1.5)).unwrap());
        assert_abs_diff_eq!(pure_contingent_value(&bench(2.0, 0.0, 1e4)).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn crossing_threshold_brackets() {
        let e = bench(2.0, 0.0, 1.0);
        let r_star = crossing_threshold(&e).unwrap();
        let wa = pure_advance_value(&e).unwrap();
        let wc = |r: f64| pure_contingent_value(&e.with_tightness(r).unwrap()).unwrap();
        assert_abs_diff_eq!(wc(r_star), wa, epsilon = 1e-8);
        assert!(wc(r_star - 0.1) > wa && wc(r_star + 0.1) < wa);
        assert!(r_star > 0.0 && r_star < 5.0);
    }

    #[test]
    fn decomposition_identity_on_random_draws() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let r = rng.gen_range(0.0..5.0);
            let e = bench(2.0, 0.1, r);
            let b1 = rng.gen_range(0.0..Problem::baseline(&e).slope_cap().max(1e-3));
            let w = principal_value(&e, b1).unwrap();
            assert!((w.decomposition.value() - w.value).abs() < 1e-8);
        }
    }

    #[test]
    fn intercept_folding_weakly_helps() {
        let e = bench(2.0, 0.1, 1.0);
        let with_b0 = Contract { advance: 0.2, intercept: 0.1, slope: 0.5 };
        let folded = with_b0.fold_intercept(1.0);
        assert!(contract_value(&e, &folded).unwrap() > contract_value(&e, &with_b0).unwrap());
        let e0 = bench(2.0, 0.1, 0.0);
        assert!(contract_value(&e0, &folded).unwrap() >= contract_value(&e0, &with_b0).unwrap() - 1e-12);
    }

    #[test]
    fn uninformative_signal_uses_advance_only() {
        let e = bench(2.0, 0.0, 1.0).with_signal_scale(0.0).unwrap();
        let sol = solve_optimal(&e).unwrap();
        assert_eq!(sol.contract.slope, 0.0);
        assert_eq!(sol.boundary, Boundary::SlopeZero);
    }

    #[test]
    fn sweep_reports_table_advances() {
        let sweep = sweep_r(&bench(2.0, 0.0, 1.0), &[0.5, 1.0, 2.0, 3.0, 5.0]).unwrap();
        let want = [0.17, 0.27, 0.38, 0.45, 0.54];
        for (row, w) in sweep.rows.iter().zip(want) {
            assert!((row.advance - w).abs() <= 0.005, "{} vs {}", row.advance, w);
            assert_abs_diff_eq!(row.financing_share, row.advance, epsilon = 1e-9);
        }
        assert!(sweep.advance_increasing);
        assert!(sweep.advance_concave);
        assert!(sweep_r(&bench(2.0, 0.0, 1.0), &[1.0, 0.5]).is_err());
    }

    #[test]
    fn matched_statistics_give_matched_contracts() {
        // different surplus levels, same financing and signal
        let a = solve_optimal(&bench(2.0, 0.0, 1.0)).unwrap();
        let b = solve_optimal(&bench(3.0, 0.0, 1.0)).unwrap();
        let ea = bench(2.0, 0.0, 1.0);
        let eb = bench(3.0, 0.0, 1.0);
        let sa = sufficient_statistics(&ea, &a);
        let sb = sufficient_statistics(&eb, &b);
        assert_abs_diff_eq!(sa.marginal_financing_cost, sb.marginal_financing_cost, epsilon = 1e-9);
        assert_abs_diff_eq!(a.contract.advance, b.contract.advance, epsilon = 1e-9);
        assert_abs_diff_eq!(a.contract.slope, b.contract.slope, epsilon = 1e-9);
        assert_abs_diff_eq!(sa.marginal_financing_cost, 0.732, epsilon = 1e-3);
    }
}
