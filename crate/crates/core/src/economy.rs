//! Model primitives: type distribution, surplus/cost/signal curves and the
//! outside-finance technology.

use alloc::vec::Vec;

// inherent float methods shadow the trait whenever std is linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::numerics::{find_root, integrate, integrate_open, linspace, Bracket, Tolerance, DEFAULT_PANELS};

/// Grid size used by the shape checks on distributions and curves.
pub const CHECK_GRID: usize = 1000;

/// Distribution of the counterparty's private type on a compact support.
#[derive(Debug, Clone, PartialEq)]
pub enum TypeDistribution {
    Uniform { lower: f64, upper: f64 },
    /// Density proportional to `exp(-rate * (t - lower))`.
    TruncatedExponential { rate: f64, lower: f64, upper: f64 },
    /// `F(t) = (t^k - lower^k) / (upper^k - lower^k)`.
    Power { exponent: f64, lower: f64, upper: f64 },
    /// Piecewise-constant density on the bins `edges[i]..edges[i+1]`.
    Histogram { edges: Vec<f64>, density: Vec<f64> },
}

impl TypeDistribution {
    pub fn uniform(lower: f64, upper: f64) -> Result<Self> {
        check_support(lower, upper)?;
        Ok(TypeDistribution::Uniform { lower, upper })
    }

    pub fn truncated_exponential(rate: f64, lower: f64, upper: f64) -> Result<Self> {
        check_support(lower, upper)?;
        if !rate.is_finite() || rate == 0.0 {
            return Err(Error::Domain { what: "exponential rate", value: rate });
        }
        Ok(TypeDistribution::TruncatedExponential { rate, lower, upper })
    }

    pub fn power(exponent: f64, lower: f64, upper: f64) -> Result<Self> {
        check_support(lower, upper)?;
        if !(exponent > 0.0) || !exponent.is_finite() {
            return Err(Error::Domain { what: "power exponent", value: exponent });
        }
        if lower < 0.0 || (lower == 0.0 && exponent != 1.0) {
            // density must be finite and positive at the bottom of the support
            return Err(Error::Domain { what: "power lower bound", value: lower });
        }
        Ok(TypeDistribution::Power { exponent, lower, upper })
    }

    /// Histogram density; weights are rescaled to integrate to one.
    pub fn histogram(edges: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if edges.len() < 2 || weights.len() + 1 != edges.len() {
            return Err(Error::Invalid("histogram needs one more edge than bins"));
        }
        if edges.windows(2).any(|w| !(w[0] < w[1])) || edges.iter().any(|e| !e.is_finite()) {
            return Err(Error::Invalid("histogram edges must be finite and increasing"));
        }
        if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::Invalid("histogram density must be positive on every bin"));
        }
        let mass: f64 = weights
            .iter()
            .zip(edges.windows(2))
            .map(|(w, e)| w * (e[1] - e[0]))
            .sum();
        let density = weights.iter().map(|w| w / mass).collect();
        Ok(TypeDistribution::Histogram { edges, density })
    }

    pub fn lower(&self) -> f64 {
        match self {
            TypeDistribution::Uniform { lower, .. }
            | TypeDistribution::TruncatedExponential { lower, .. }
            | TypeDistribution::Power { lower, .. } => *lower,
            TypeDistribution::Histogram { edges, .. } => edges[0],
        }
    }

    pub fn upper(&self) -> f64 {
        match self {
            TypeDistribution::Uniform { upper, .. }
            | TypeDistribution::TruncatedExponential { upper, .. }
            | TypeDistribution::Power { upper, .. } => *upper,
            TypeDistribution::Histogram { edges, .. } => edges[edges.len() - 1],
        }
    }

    pub fn cdf(&self, t: f64) -> f64 {
        let (lo, hi) = (self.lower(), self.upper());
        if t <= lo {
            return 0.0;
        }
        if t >= hi {
            return 1.0;
        }
        match self {
            TypeDistribution::Uniform { .. } => (t - lo) / (hi - lo),
            TypeDistribution::TruncatedExponential { rate, .. } => {
                (-(-rate * (t - lo)).exp_m1()) / (-(-rate * (hi - lo)).exp_m1())
            }
            TypeDistribution::Power { exponent, .. } => {
                (t.powf(*exponent) - lo.powf(*exponent)) / (hi.powf(*exponent) - lo.powf(*exponent))
            }
            TypeDistribution::Histogram { edges, density } => {
                let bin = bin_of(edges, t);
                let below: f64 = (0..bin).map(|i| density[i] * (edges[i + 1] - edges[i])).sum();
                (below + density[bin] * (t - edges[bin])).min(1.0)
            }
        }
    }

    /// Density; zero outside the support.
    pub fn pdf(&self, t: f64) -> f64 {
        let (lo, hi) = (self.lower(), self.upper());
        if t < lo || t > hi {
            return 0.0;
        }
        match self {
            TypeDistribution::Uniform { .. } => 1.0 / (hi - lo),
            TypeDistribution::TruncatedExponential { rate, .. } => {
                rate * (-rate * (t - lo)).exp() / (-(-rate * (hi - lo)).exp_m1())
            }
            TypeDistribution::Power { exponent, .. } => {
                exponent * t.powf(exponent - 1.0) / (hi.powf(*exponent) - lo.powf(*exponent))
            }
            TypeDistribution::Histogram { edges, density } => density[bin_of(edges, t)],
        }
    }

    /// `(1 - F) / f`, checked against the support.
    pub fn hazard(&self, t: f64) -> Result<f64> {
        if !(t >= self.lower() && t <= self.upper()) {
            return Err(Error::Domain { what: "type", value: t });
        }
        Ok(self.hazard_unchecked(t))
    }

    pub(crate) fn hazard_unchecked(&self, t: f64) -> f64 {
        let hi = self.upper();
        if t >= hi {
            return 0.0;
        }
        match self {
            TypeDistribution::Uniform { .. } => hi - t,
            TypeDistribution::TruncatedExponential { rate, .. } => -(-rate * (hi - t)).exp_m1() / rate,
            TypeDistribution::Power { exponent, .. } => {
                (hi.powf(*exponent) - t.powf(*exponent)) / (exponent * t.powf(exponent - 1.0))
            }
            TypeDistribution::Histogram { .. } => (1.0 - self.cdf(t)) / self.pdf(t),
        }
    }

    pub fn virtual_type(&self, t: f64) -> Result<f64> {
        Ok(t - self.hazard(t)?)
    }

    /// First grid point where the virtual type fails to increase strictly,
    /// or `None` when the distribution is regular on a 1000-point grid.
    pub fn regularity_violation(&self) -> Option<f64> {
        let grid = linspace(self.lower(), self.upper(), CHECK_GRID);
        let mut prev = f64::NEG_INFINITY;
        for t in grid {
            let vt = t - self.hazard_unchecked(t);
            if !(vt > prev) {
                return Some(t);
            }
            prev = vt;
        }
        None
    }

    pub fn is_regular(&self) -> bool {
        self.regularity_violation().is_none()
    }

    /// Quantile function, used for inverse-cdf sampling.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::Domain { what: "probability", value: u });
        }
        let (lo, hi) = (self.lower(), self.upper());
        Ok(match self {
            TypeDistribution::Uniform { .. } => lo + u * (hi - lo),
            TypeDistribution::TruncatedExponential { rate, .. } => {
                lo - (u * (-rate * (hi - lo)).exp_m1()).ln_1p() / rate
            }
            TypeDistribution::Power { exponent, .. } => {
                let k = *exponent;
                (lo.powf(k) + u * (hi.powf(k) - lo.powf(k))).powf(1.0 / k)
            }
            TypeDistribution::Histogram { .. } => {
                if u == 0.0 {
                    lo
                } else if u == 1.0 {
                    hi
                } else {
                    find_root(|t| self.cdf(t) - u, Bracket::new(lo, hi)?, &Tolerance::default())?
                }
            }
        }
        .clamp(lo, hi))
    }

    /// `E[t | t >= cut]`.
    pub fn mean_above(&self, cut: f64) -> Result<f64> {
        self.conditional_mean_above(|t| t, cut)
    }

    /// `E[g(t) | t >= cut]`.
    pub fn conditional_mean_above<G: Fn(f64) -> f64>(&self, g: G, cut: f64) -> Result<f64> {
        let hi = self.upper();
        let cut = cut.max(self.lower());
        let tail = 1.0 - self.cdf(cut);
        if cut >= hi || tail <= 0.0 {
            return Ok(g(hi));
        }
        Ok(self.integrate(|t| g(t) * self.pdf(t), cut, hi)? / tail)
    }

    /// Integral of `g` over `[lo, hi]`, split at histogram edges so that a
    /// piecewise density does not spoil Simpson's accuracy.
    pub fn integrate<G: Fn(f64) -> f64>(&self, g: G, lo: f64, hi: f64) -> Result<f64> {
        match self {
            TypeDistribution::Histogram { edges, .. } => {
                if lo > hi {
                    return Err(Error::Domain { what: "integration lower limit", value: lo });
                }
                let mut total = 0.0;
                let mut left = lo;
                for &e in edges.iter().filter(|&&e| e > lo && e < hi) {
                    total += integrate_open(&g, left, e, 4)?;
                    left = e;
                }
                Ok(total + integrate_open(&g, left, hi, 4)?)
            }
            _ => integrate(g, lo, hi, DEFAULT_PANELS),
        }
    }
}

fn check_support(lower: f64, upper: f64) -> Result<()> {
    if !lower.is_finite() || !upper.is_finite() || !(lower < upper) {
        return Err(Error::Bracket { lo: lower, hi: upper });
    }
    Ok(())
}

fn bin_of(edges: &[f64], t: f64) -> usize {
    let bins = edges.len() - 1;
    edges.partition_point(|&e| e <= t).saturating_sub(1).min(bins - 1)
}

/// The curve `offset + scale * t^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Curve {
    pub offset: f64,
    pub scale: f64,
    pub exponent: f64,
}

impl Curve {
    pub fn linear(offset: f64, slope: f64) -> Self {
        Curve {
            offset,
            scale: slope,
            exponent: 1.0,
        }
    }

    pub fn constant(level: f64) -> Self {
        Curve::linear(level, 0.0)
    }

    pub fn power(scale: f64, exponent: f64) -> Self {
        Curve {
            offset: 0.0,
            scale,
            exponent,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        if self.scale == 0.0 {
            return self.offset;
        }
        if self.exponent == 1.0 {
            return self.offset + self.scale * t;
        }
        self.offset + self.scale * t.powf(self.exponent)
    }

    pub fn slope(&self, t: f64) -> f64 {
        if self.scale == 0.0 || self.exponent == 0.0 {
            return 0.0;
        }
        if self.exponent == 1.0 {
            return self.scale;
        }
        self.scale * self.exponent * t.powf(self.exponent - 1.0)
    }

    /// Multiplies the slope by `s` while keeping the offset.
    pub fn scaled(&self, s: f64) -> Self {
        Curve {
            scale: self.scale * s,
            ..*self
        }
    }
}

/// Marginal-cost table `(l_k, m_k)` behind a user-supplied financing cost.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalTable {
    ell: Vec<f64>,
    marginal: Vec<f64>,
    cumulative: Vec<f64>,
}

impl MarginalTable {
    /// `ell` must start at zero and increase; `marginal` must be
    /// non-decreasing with a positive value after the first knot.
    pub fn new(ell: Vec<f64>, marginal: Vec<f64>) -> Result<Self> {
        if ell.len() < 2 || ell.len() != marginal.len() {
            return Err(Error::Invalid("financing table needs at least two matching knots"));
        }
        if ell[0] != 0.0 || ell.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Invalid("financing table must start at zero and increase"));
        }
        if marginal[0] < 0.0 || marginal.windows(2).any(|w| w[1] < w[0]) || !(marginal[1] > 0.0) {
            return Err(Error::Invalid("marginal financing cost must be non-negative, non-decreasing and positive away from zero"));
        }
        let mut cumulative = Vec::with_capacity(ell.len());
        cumulative.push(0.0);
        for i in 1..ell.len() {
            let prev = cumulative[i - 1];
            cumulative.push(prev + 0.5 * (marginal[i] + marginal[i - 1]) * (ell[i] - ell[i - 1]));
        }
        Ok(MarginalTable { ell, marginal, cumulative })
    }

    fn segment(&self, l: f64) -> usize {
        let n = self.ell.len();
        self.ell.partition_point(|&e| e <= l).saturating_sub(1).min(n - 2)
    }

    fn slope_on(&self, i: usize) -> f64 {
        (self.marginal[i + 1] - self.marginal[i]) / (self.ell[i + 1] - self.ell[i])
    }

    fn marginal_at(&self, l: f64) -> f64 {
        let i = self.segment(l);
        self.marginal[i] + self.slope_on(i) * (l - self.ell[i])
    }

    fn level_at(&self, l: f64) -> f64 {
        let i = self.segment(l);
        let d = l - self.ell[i];
        self.cumulative[i] + self.marginal[i] * d + 0.5 * self.slope_on(i) * d * d
    }

    fn curvature_at(&self, l: f64) -> f64 {
        self.slope_on(self.segment(l))
    }
}

/// Cost of borrowing `l` when outside finance has tightness `R`.
#[derive(Debug, Clone, PartialEq)]
pub enum FinancingCost {
    /// `(R / 2) l^2`.
    Quadratic { tightness: f64 },
    /// `R * integral of the tabulated marginal cost`, linear between knots.
    Tabulated { tightness: f64, table: MarginalTable },
}

impl FinancingCost {
    pub fn quadratic(tightness: f64) -> Result<Self> {
        check_tightness(tightness)?;
        Ok(FinancingCost::Quadratic { tightness })
    }

    pub fn tabulated(tightness: f64, table: MarginalTable) -> Result<Self> {
        check_tightness(tightness)?;
        Ok(FinancingCost::Tabulated { tightness, table })
    }

    pub fn tightness(&self) -> f64 {
        match self {
            FinancingCost::Quadratic { tightness } | FinancingCost::Tabulated { tightness, .. } => *tightness,
        }
    }

    pub fn with_tightness(&self, r: f64) -> Result<Self> {
        check_tightness(r)?;
        Ok(match self {
            FinancingCost::Quadratic { .. } => FinancingCost::Quadratic { tightness: r },
            FinancingCost::Tabulated { table, .. } => FinancingCost::Tabulated {
                tightness: r,
                table: table.clone(),
            },
        })
    }

    pub fn cost(&self, l: f64) -> Result<f64> {
        check_borrowing(l)?;
        Ok(self.phi(l))
    }

    pub fn marginal_l(&self, l: f64) -> Result<f64> {
        check_borrowing(l)?;
        Ok(self.phi_l(l))
    }

    pub fn marginal_r(&self, l: f64) -> Result<f64> {
        check_borrowing(l)?;
        Ok(self.phi_r(l))
    }

    pub fn second_ll(&self, l: f64) -> Result<f64> {
        check_borrowing(l)?;
        Ok(match self {
            FinancingCost::Quadratic { tightness } => *tightness,
            FinancingCost::Tabulated { tightness, table } => tightness * table.curvature_at(l),
        })
    }

    pub(crate) fn phi(&self, l: f64) -> f64 {
        let l = l.max(0.0);
        match self {
            FinancingCost::Quadratic { tightness } => 0.5 * tightness * l * l,
            FinancingCost::Tabulated { tightness, table } => tightness * table.level_at(l),
        }
    }

    pub(crate) fn phi_l(&self, l: f64) -> f64 {
        let l = l.max(0.0);
        match self {
            FinancingCost::Quadratic { tightness } => tightness * l,
            FinancingCost::Tabulated { tightness, table } => tightness * table.marginal_at(l),
        }
    }

    pub(crate) fn phi_r(&self, l: f64) -> f64 {
        let l = l.max(0.0);
        match self {
            FinancingCost::Quadratic { .. } => 0.5 * l * l,
            FinancingCost::Tabulated { table, .. } => table.level_at(l),
        }
    }
}

fn check_tightness(r: f64) -> Result<()> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::Domain { what: "tightness R", value: r });
    }
    Ok(())
}

fn check_borrowing(l: f64) -> Result<()> {
    if !(l >= 0.0) {
        return Err(Error::Domain { what: "borrowing", value: l });
    }
    Ok(())
}

/// One bilateral relationship.
#[derive(Debug, Clone, PartialEq)]
pub struct Economy {
    pub dist: TypeDistribution,
    /// Value to the principal, `V`.
    pub surplus: Curve,
    /// Production cost, `c`.
    pub cost: Curve,
    /// Mean of the verifiable signal, `mu`.
    pub signal: Curve,
    pub financing: FinancingCost,
    /// Working capital the counterparty must fund, `K`.
    pub working_capital: f64,
}

impl Economy {
    /// Validates the shape restrictions on a grid: `V - c` increasing,
    /// `c` non-decreasing and `mu' >= 0`.
    ///
    /// A flat signal is admitted so the uninformative case can be solved.
    pub fn new(
        dist: TypeDistribution,
        surplus: Curve,
        cost: Curve,
        signal: Curve,
        financing: FinancingCost,
        working_capital: f64,
    ) -> Result<Self> {
        if !(working_capital > 0.0) || !working_capital.is_finite() {
            return Err(Error::Domain { what: "working capital", value: working_capital });
        }
        let econ = Economy {
            dist,
            surplus,
            cost,
            signal,
            financing,
            working_capital,
        };
        let grid = linspace(econ.lower(), econ.upper(), CHECK_GRID);
        let net: Vec<f64> = grid.iter().map(|&t| econ.surplus.value(t) - econ.cost.value(t)).collect();
        if net.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Invalid("surplus net of cost must increase in type"));
        }
        if grid.iter().any(|&t| econ.cost.slope(t) < 0.0) {
            return Err(Error::Invalid("cost must be non-decreasing in type"));
        }
        if grid.iter().any(|&t| !(econ.signal.slope(t) >= 0.0)) {
            return Err(Error::Invalid("signal mean must be non-decreasing in type"));
        }
        Ok(econ)
    }

    /// Uniform types on [0,1], `V = v t`, `c = t`, `mu = mu0 + t`, `K = 1`,
    /// quadratic financing cost.
    pub fn benchmark(v: f64, mu0: f64, r: f64) -> Result<Self> {
        if !(mu0 >= 0.0) {
            return Err(Error::Domain { what: "signal offset", value: mu0 });
        }
        Economy::new(
            TypeDistribution::uniform(0.0, 1.0)?,
            Curve::linear(0.0, v),
            Curve::linear(0.0, 1.0),
            Curve::linear(mu0, 1.0),
            FinancingCost::quadratic(r)?,
            1.0,
        )
    }

    pub fn lower(&self) -> f64 {
        self.dist.lower()
    }

    pub fn upper(&self) -> f64 {
        self.dist.upper()
    }

    pub fn tightness(&self) -> f64 {
        self.financing.tightness()
    }

    pub fn with_tightness(&self, r: f64) -> Result<Self> {
        Ok(Economy {
            financing: self.financing.with_tightness(r)?,
            ..self.clone()
        })
    }

    /// Signal slope multiplied by `s`.
    pub fn with_signal_scale(&self, s: f64) -> Result<Self> {
        if !(s >= 0.0) {
            return Err(Error::Domain { what: "signal scale", value: s });
        }
        Ok(Economy {
            signal: self.signal.scaled(s),
            ..self.clone()
        })
    }

    /// `mu' > 0` across the support.
    pub fn is_informative(&self) -> bool {
        linspace(self.lower(), self.upper(), CHECK_GRID)
            .into_iter()
            .all(|t| self.signal.slope(t) > 0.0)
    }

    /// Surplus at the top type, `V - c` evaluated at the upper bound.
    pub fn top_surplus(&self) -> f64 {
        let t = self.upper();
        self.surplus.value(t) - self.cost.value(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_abs_diff_eq;

    fn unit() -> TypeDistribution {
        TypeDistribution::uniform(0.0, 1.0).unwrap()
    }

    #[test]
    fn hazard_and_virtual_type_examples() {
        let d = unit();
        assert_eq!(d.hazard(0.5).unwrap(), 0.5);
        assert_eq!(d.hazard(0.0).unwrap(), 1.0);
        assert_eq!(d.hazard(1.0).unwrap(), 0.0);
        assert_eq!(d.virtual_type(0.5).unwrap(), 0.0);
        assert_eq!(d.virtual_type(1.0).unwrap(), 1.0);
        assert_eq!(d.virtual_type(0.75).unwrap(), 0.5);
        assert!(d.hazard(1.2).is_err());
        assert!(d.hazard(-0.1).is_err());
    }

    #[test]
    fn analytic_hazards_match_composition() {
        let dists = [
            TypeDistribution::truncated_exponential(1.5, 0.0, 2.0).unwrap(),
            TypeDistribution::truncated_exponential(-0.7, 0.2, 1.0).unwrap(),
            TypeDistribution::power(2.5, 0.1, 1.0).unwrap(),
            TypeDistribution::power(0.6, 0.2, 3.0).unwrap(),
        ];
        for d in &dists {
            for t in linspace(d.lower(), d.upper(), 37).into_iter().take(36) {
                let composed = (1.0 - d.cdf(t)) / d.pdf(t);
                assert_abs_diff_eq!(d.hazard(t).unwrap(), composed, epsilon = 1e-10);
            }
            assert_abs_diff_eq!(d.cdf(d.lower()), 0.0);
            assert_abs_diff_eq!(d.cdf(d.upper()), 1.0);
            let mass = integrate(|t| d.pdf(t), d.lower(), d.upper(), 2048).unwrap();
            assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn regularity_of_standard_families() {
        assert!(unit().is_regular());
        assert!(TypeDistribution::truncated_exponential(2.0, 0.0, 1.0).unwrap().is_regular());
        assert!(TypeDistribution::power(3.0, 0.05, 1.0).unwrap().is_regular());
    }

    #[test]
    fn bimodal_density_is_irregular() {
        let edges = linspace(0.0, 1.0, 11);
        let weights = vec![5.0, 5.0, 5.0, 0.2, 0.2, 0.2, 0.2, 5.0, 5.0, 5.0];
        let d = TypeDistribution::histogram(edges, weights).unwrap();
        let at = d.regularity_violation().expect("bimodal density must fail");
        assert!(at > 0.0 && at < 1.0);
    }

    #[test]
    fn histogram_cdf_and_quantile_round_trip() {
        let d = TypeDistribution::histogram(vec![0.0, 0.5, 2.0], vec![1.0, 3.0]).unwrap();
        assert_abs_diff_eq!(d.cdf(2.0), 1.0);
        for u in [0.1, 0.37, 0.5, 0.93] {
            let t = d.quantile(u).unwrap();
            assert_abs_diff_eq!(d.cdf(t), u, epsilon = 1e-10);
        }
    }

    #[test]
    fn quantiles_invert_cdfs() {
        let dists = [
            unit(),
            TypeDistribution::truncated_exponential(1.5, 0.0, 2.0).unwrap(),
            TypeDistribution::power(2.5, 0.1, 1.0).unwrap(),
        ];
        for d in &dists {
            for u in [0.0, 0.2, 0.5, 0.99, 1.0] {
                assert_abs_diff_eq!(d.cdf(d.quantile(u).unwrap()), u, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn distribution_constructors_validate() {
        assert!(TypeDistribution::uniform(1.0, 0.0).is_err());
        assert!(TypeDistribution::power(2.0, 0.0, 1.0).is_err());
        assert!(TypeDistribution::histogram(vec![0.0, 1.0], vec![0.0]).is_err());
        assert!(TypeDistribution::truncated_exponential(0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn quadratic_financing_examples() {
        assert_eq!(FinancingCost::quadratic(3.0).unwrap().cost(0.0).unwrap(), 0.0);
        let phi = FinancingCost::quadratic(1.0).unwrap();
        assert_eq!(phi.cost(1.0).unwrap(), 0.5);
        assert_abs_diff_eq!(phi.marginal_r(0.73).unwrap(), 0.26645, epsilon = 1e-12);
        assert_eq!(phi.marginal_l(0.4).unwrap(), 0.4);
        assert_eq!(phi.second_ll(0.4).unwrap(), 1.0);
        assert!(phi.cost(-0.1).is_err());
        assert!(FinancingCost::quadratic(-1.0).is_err());
    }

    #[test]
    fn quadratic_financing_properties_on_grid() {
        for r in linspace(0.05, 5.0, 20) {
            let phi = FinancingCost::quadratic(r).unwrap();
            assert_eq!(phi.cost(0.0).unwrap(), 0.0);
            for l in linspace(0.01, 1.0, 20) {
                assert!(phi.marginal_l(l).unwrap() > 0.0);
                assert!(phi.second_ll(l).unwrap() >= 0.0);
                assert!(phi.marginal_r(l).unwrap() > 0.0);
                let h = 1e-5;
                let fd = (phi.cost(l + h).unwrap() - phi.cost(l - h).unwrap()) / (2.0 * h);
                assert_abs_diff_eq!(fd, phi.marginal_l(l).unwrap(), epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn tabulated_financing_reproduces_quadratic() {
        let table = MarginalTable::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 2.0]).unwrap();
        let tab = FinancingCost::tabulated(1.7, table).unwrap();
        let quad = FinancingCost::quadratic(1.7).unwrap();
        for l in linspace(0.0, 2.5, 26) {
            assert_abs_diff_eq!(tab.cost(l).unwrap(), quad.cost(l).unwrap(), epsilon = 1e-12);
            assert_abs_diff_eq!(tab.marginal_l(l).unwrap(), quad.marginal_l(l).unwrap(), epsilon = 1e-12);
            assert_abs_diff_eq!(tab.marginal_r(l).unwrap(), quad.marginal_r(l).unwrap(), epsilon = 1e-12);
        }
        assert!(MarginalTable::new(vec![0.0, 1.0], vec![1.0, 0.5]).is_err());
    }

    #[test]
    fn tabulated_financing_derivative_matches_difference() {
        let table = MarginalTable::new(vec![0.0, 0.3, 0.8, 1.2], vec![0.1, 0.4, 1.5, 1.6]).unwrap();
        let phi = FinancingCost::tabulated(2.0, table).unwrap();
        for l in linspace(0.02, 1.1, 30) {
            let h = 1e-5;
            let fd = (phi.cost(l + h).unwrap() - phi.cost(l - h).unwrap()) / (2.0 * h);
            assert_abs_diff_eq!(fd, phi.marginal_l(l).unwrap(), epsilon = 1e-6);
        }
    }

    #[test]
    fn benchmark_and_validation() {
        let e = Economy::benchmark(2.0, 0.0, 1.0).unwrap();
        assert_eq!(e.top_surplus(), 1.0);
        assert!(e.is_informative());
        assert!(!e.with_signal_scale(0.0).unwrap().is_informative());
        // V - c flat is rejected
        assert!(Economy::benchmark(1.0, 0.0, 1.0).is_err());
        assert!(Economy::benchmark(2.0, -0.1, 1.0).is_err());
    }

    #[test]
    fn mean_above_uniform() {
        let d = unit();
        assert_abs_diff_eq!(d.mean_above(0.4).unwrap(), 0.7, epsilon = 1e-12);
        assert_eq!(d.mean_above(1.0).unwrap(), 1.0);
    }
}
