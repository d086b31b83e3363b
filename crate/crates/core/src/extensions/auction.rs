//! First-price reverse auction over the advance among `n` symmetric bidders.
//!
//! Bids solve `b'(t) = (n - 1) h(t) (b(t) - b_fb(t))` with `h = f / (1 - F)`,
//! integrated down from just below the top type where the bid starts at the
//! full-information advance `b_fb`.

use alloc::vec::Vec;

// inherent float methods shadow the trait whenever std is linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::calibration::SlopeRule;
use crate::economy::Economy;
use crate::error::{Error, Result};
use crate::numerics::{find_root, integrate_ode, Bracket, Tolerance};

/// Minimum number of RK4 steps.
pub const MIN_STEPS: usize = 2000;

#[derive(Debug, Clone, PartialEq)]
pub struct BidFunction {
    /// Ascending type points.
    pub grid: Vec<f64>,
    pub bids: Vec<f64>,
    pub full_info: Vec<f64>,
    pub bidders: usize,
}

impl BidFunction {
    /// Largest shortfall of the bid below the full-information advance.
    pub fn shading_violation(&self) -> f64 {
        self.bids
            .iter()
            .zip(&self.full_info)
            .map(|(b, f)| f - b)
            .fold(0.0, f64::max)
    }

    /// Largest rise of the bid between consecutive types.
    pub fn monotonicity_violation(&self) -> f64 {
        self.bids.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    pub fn shading_ok(&self) -> bool {
        self.shading_violation() <= 1e-12
    }

    pub fn monotone_ok(&self) -> bool {
        self.monotonicity_violation() <= 1e-12
    }

    pub fn sup_gap(&self) -> f64 {
        self.bids
            .iter()
            .zip(&self.full_info)
            .map(|(b, f)| (b - f).abs())
            .fold(0.0, f64::max)
    }
}

/// Full-information advance of each type at a fixed slope.
#[derive(Debug, Clone, Copy)]
pub struct FullInformation<'a> {
    econ: &'a Economy,
    slope: f64,
}

impl<'a> FullInformation<'a> {
    /// Uses the slope chosen by `rule` for the bilateral problem.
    pub fn new(econ: &'a Economy, rule: &SlopeRule) -> Result<Self> {
        Ok(FullInformation {
            econ,
            slope: rule.solve(econ)?.contract.slope,
        })
    }

    pub fn slope(&self) -> f64 {
        self.slope
    }

    /// Smallest advance in `[0, K]` that makes type `t`'s participation bind.
    pub fn advance(&self, t: f64) -> Result<f64> {
        let e = self.econ;
        let k = e.working_capital;
        let gap = |a: f64| a + self.slope * e.signal.value(t) - e.cost.value(t) - e.financing.phi(k - a);
        if gap(0.0) >= 0.0 {
            return Ok(0.0);
        }
        if gap(k) <= 0.0 {
            return Ok(k);
        }
        find_root(gap, Bracket::new(0.0, k)?, &Tolerance::default())
    }
}

/// Default boundary offset, a thousandth of the support width.
pub fn default_offset(econ: &Economy) -> f64 {
    1e-3 * (econ.upper() - econ.lower())
}

pub fn default_steps(bidders: usize, offset: f64) -> usize {
    MIN_STEPS.max((2.0 * (bidders as f64 - 1.0) / offset).ceil() as usize)
}

pub fn solve_bid_function(econ: &Economy, rule: &SlopeRule, bidders: usize, offset: f64) -> Result<BidFunction> {
    solve_bid_function_with_steps(econ, rule, bidders, offset, default_steps(bidders, offset))
}

pub fn solve_bid_function_with_steps(
    econ: &Economy,
    rule: &SlopeRule,
    bidders: usize,
    offset: f64,
    steps: usize,
) -> Result<BidFunction> {
    if bidders < 2 {
        return Err(Error::Invalid("an auction needs at least two bidders"));
    }
    let (lo, hi) = (econ.lower(), econ.upper());
    if !(offset > 0.0) || offset >= hi - lo {
        return Err(Error::Domain { what: "boundary offset", value: offset });
    }
    let fb = FullInformation::new(econ, rule)?;
    let top = hi - offset;
    let pull = (bidders - 1) as f64;
    let rhs = |t: f64, b: f64| -> f64 {
        let h = econ.dist.hazard_unchecked(t);
        pull * h * (b - fb.advance(t).unwrap_or(f64::NAN))
    };
    let path = integrate_ode(rhs, top, fb.advance(top)?, lo, steps)?;
    let mut grid = Vec::with_capacity(path.len());
    let mut bids = Vec::with_capacity(path.len());
    let mut full_info = Vec::with_capacity(path.len());
    for (t, b) in path.into_iter().rev() {
        grid.push(t);
        bids.push(b);
        full_info.push(fb.advance(t)?);
    }
    Ok(BidFunction {
        grid,
        bids,
        full_info,
        bidders,
    })
}

/// Sup-norm change in the bid when the step count doubles, on the shared
/// grid points.
pub fn step_halving_change(econ: &Economy, rule: &SlopeRule, bidders: usize, offset: f64) -> Result<f64> {
    let steps = default_steps(bidders, offset);
    let coarse = solve_bid_function_with_steps(econ, rule, bidders, offset, steps)?;
    let fine = solve_bid_function_with_steps(econ, rule, bidders, offset, 2 * steps)?;
    Ok(coarse
        .bids
        .iter()
        .enumerate()
        .map(|(k, b)| (b - fine.bids[2 * k]).abs())
        .fold(0.0, f64::max))
}
