//! How the contingent slope is chosen.
//!
//! `Optimized` maximizes the bilateral value. `Calibrated` instead picks the
//! slope whose cash intensity hits a target curve in the tightness `R`,
//! which is how the multi-counterparty and extension experiments pin a
//! positive slope in economies where the value-maximizing slope is zero.

use crate::bilateral::{intensity_of, BilateralSolution, Problem};
use crate::economy::Economy;
use crate::error::{Error, Result};
use crate::numerics::{find_root, Bracket, MonotoneCubic, Tolerance};

/// Target cash intensity as a monotone cubic in `R`, flat beyond the knots.
#[derive(Debug, Clone, PartialEq)]
pub struct CashIntensityCurve {
    curve: MonotoneCubic,
}

impl CashIntensityCurve {
    pub fn new(tightness: &[f64], intensity: &[f64]) -> Result<Self> {
        if intensity.iter().any(|b| !(0.0..=1.0).contains(b)) {
            return Err(Error::Invalid("cash intensity targets must lie in [0, 1]"));
        }
        Ok(CashIntensityCurve {
            curve: MonotoneCubic::new(tightness, intensity)?,
        })
    }

    /// Uniform-quadratic benchmark with unit surplus margin.
    pub fn baseline() -> Self {
        CashIntensityCurve::new(&[0.0, 0.5, 1.0, 2.0, 3.0, 5.0], &[0.0, 0.21, 0.34, 0.47, 0.55, 0.63])
            .expect("baseline knots are valid")
    }

    pub fn target(&self, r: f64) -> f64 {
        self.curve.eval(r)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub enum SlopeRule {
    #[default]
    Optimized,
    Calibrated(CashIntensityCurve),
}

impl SlopeRule {
    pub fn calibrated_baseline() -> Self {
        SlopeRule::Calibrated(CashIntensityCurve::baseline())
    }

    pub fn solve(&self, econ: &Economy) -> Result<BilateralSolution> {
        self.solve_problem(&Problem::baseline(econ))
    }

    pub fn solve_problem(&self, p: &Problem) -> Result<BilateralSolution> {
        match self {
            SlopeRule::Optimized => p.solve(),
            SlopeRule::Calibrated(curve) => {
                let b1 = calibrated_slope(p, curve.target(p.econ.tightness()))?;
                p.solution_at(b1)
            }
        }
    }
}

/// Slope on `[0, slope_cap]` whose cash intensity equals `target`; the
/// nearer end of the interval when the target is out of reach.
pub fn calibrated_slope(p: &Problem, target: f64) -> Result<f64> {
    let cap = p.slope_cap();
    let beta = |b1: f64| -> f64 {
        p.value(b1)
            .and_then(|v| intensity_of(p.econ, v.advance, b1, v.cutoff.theta))
            .unwrap_or(f64::NAN)
    };
    let (at_zero, at_cap) = (beta(0.0), beta(cap));
    if !(at_zero.is_finite() && at_cap.is_finite()) {
        return Err(Error::Invalid("cash intensity undefined at the slope bounds"));
    }
    if at_zero <= target {
        return Ok(0.0);
    }
    if at_cap >= target {
        return Ok(cap);
    }
    find_root(|b1| beta(b1) - target, Bracket::new(0.0, cap)?, &Tolerance::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bilateral::cash_intensity;
    use approx::assert_abs_diff_eq;

    #[test]
    fn calibrated_slope_hits_target() {
        let curve = CashIntensityCurve::baseline();
        for r in [0.5, 1.0, 2.0, 3.0, 5.0] {
            let e = Economy::benchmark(2.0, 0.0, r).unwrap();
            let sol = SlopeRule::Calibrated(curve.clone()).solve(&e).unwrap();
            assert!(sol.contract.slope > 0.0);
            assert_abs_diff_eq!(cash_intensity(&e, &sol).unwrap(), curve.target(r), epsilon = 1e-8);
        }
    }

    #[test]
    fn calibrated_slope_at_unit_tightness() {
        // a = 2 - sqrt 3; cutoff (a + b1) / (1 + b1); solve a / (a + b1 (1 + cutoff) / 2) = 0.34
        let e = Economy::benchmark(2.0, 0.0, 1.0).unwrap();
        let b1 = SlopeRule::calibrated_baseline().solve(&e).unwrap().contract.slope;
        let a = 2.0 - 3.0_f64.sqrt();
        let cut = (a + b1) / (1.0 + b1);
        assert_abs_diff_eq!(a / (a + b1 * 0.5 * (1.0 + cut)), 0.34, epsilon = 1e-8);
        assert_abs_diff_eq!(b1, 0.667, epsilon = 5e-3);
    }

    #[test]
    fn curve_is_flat_outside_knots() {
        let curve = CashIntensityCurve::baseline();
        assert_eq!(curve.target(7.0), 0.63);
        assert_eq!(curve.target(-1.0), 0.0);
        assert!(CashIntensityCurve::new(&[0.0, 1.0], &[0.0, 1.5]).is_err());
    }
}
