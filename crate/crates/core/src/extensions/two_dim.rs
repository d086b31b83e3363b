//! Two-dimensional types `(alpha, t)` with value `alpha v`, cost `c(t)` and
//! signal mean `alpha mu(t)` collapse to the ratio `xi = alpha mu(t) / c(t)`.
//! The reduced problem has value `v xi`, unit cost and signal `xi`, with
//! `xi` distributed as a histogram of the sample.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bilateral::{BilateralSolution, Problem};
use crate::economy::{Curve, Economy, FinancingCost, TypeDistribution};
use crate::error::{Error, Result};

/// Histogram bins for the reduced type.
pub const XI_BINS: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub enum AlphaLaw {
    Constant(f64),
    /// Equally likely values.
    Choice(Vec<f64>),
}

/// Seeded draws: `t` by inverse cdf, `alpha` from its law.
pub fn sample_population(alpha: &AlphaLaw, types: &TypeDistribution, n: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    if let AlphaLaw::Choice(values) = alpha {
        if values.is_empty() {
            return Err(Error::Invalid("alpha law needs at least one value"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let a = match alpha {
                AlphaLaw::Constant(v) => *v,
                AlphaLaw::Choice(values) => values[rng.gen_range(0..values.len())],
            };
            Ok((a, types.quantile(rng.gen::<f64>())?))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoDimModel {
    /// Scalar `v` in the value `alpha v`.
    pub value_scale: f64,
    pub cost: Curve,
    pub signal: Curve,
    pub financing: FinancingCost,
    pub working_capital: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    pub xi: Vec<f64>,
    pub rejected: usize,
    /// `None` when the ratio is constant across the sample.
    pub economy: Option<Economy>,
    pub solution: Option<BilateralSolution>,
    pub degenerate: bool,
}

/// Fraction of `xi` at or below `x`.
pub fn empirical_cdf(xi: &[f64], x: f64) -> f64 {
    if xi.is_empty() {
        return 0.0;
    }
    xi.iter().filter(|v| **v <= x).count() as f64 / xi.len() as f64
}

fn histogram(xi: &[f64], bins: usize) -> Result<TypeDistribution> {
    let lo = xi.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = (hi - lo) / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|k| if k == bins { hi } else { lo + k as f64 * width }).collect();
    let mut counts = vec![0.0; bins];
    for v in xi {
        let k = (((v - lo) / width) as usize).min(bins - 1);
        counts[k] += 1.0;
    }
    if counts.contains(&0.0) {
        return Err(Error::Degenerate("an empty bin leaves the reduced density without support"));
    }
    TypeDistribution::histogram(edges, counts)
}

pub fn reduce_2d(samples: &[(f64, f64)], model: &TwoDimModel) -> Result<Reduction> {
    let mut xi = Vec::with_capacity(samples.len());
    let mut rejected = 0;
    for (alpha, t) in samples {
        let c = model.cost.value(*t);
        if !(c > 0.0) {
            rejected += 1;
            continue;
        }
        xi.push(alpha * model.signal.value(*t) / c);
    }
    if xi.is_empty() {
        return Err(Error::Invalid("every sample was rejected"));
    }
    let lo = xi.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi - lo > 1e-12 * hi.abs().max(1.0)) {
        return Ok(Reduction {
            xi,
            rejected,
            economy: None,
            solution: None,
            degenerate: true,
        });
    }
    let dist = histogram(&xi, XI_BINS)?;
    let economy = Economy::new(
        dist,
        Curve::linear(0.0, model.value_scale),
        Curve::constant(1.0),
        Curve::linear(0.0, 1.0),
        model.financing.clone(),
        model.working_capital,
    )?;
    let solution = Problem::baseline(&economy).solve()?;
    Ok(Reduction {
        xi,
        rejected,
        economy: Some(economy),
        solution: Some(solution),
        degenerate: false,
    })
}
