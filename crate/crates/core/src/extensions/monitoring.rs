//! Costly investment in signal quality. Monitoring level `s` scales the
//! signal slope by `1 + s` at cost `kappa0 s^2`.

use crate::calibration::SlopeRule;
use crate::economy::Economy;
use crate::error::{Error, Result};
use crate::portfolio::{solve_cutoffs, PortfolioEconomy};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonitoringConfig {
    pub kappa0: f64,
    pub sigma_max: f64,
}

impl Default for MonitoringConfig {
    fn default() -> Self {
        MonitoringConfig {
            kappa0: 0.05,
            sigma_max: 10.0,
        }
    }
}

impl MonitoringConfig {
    pub fn new(kappa0: f64, sigma_max: f64) -> Result<Self> {
        if !(kappa0 > 0.0) || !kappa0.is_finite() {
            return Err(Error::Domain { what: "monitoring cost scale", value: kappa0 });
        }
        if !(sigma_max > 0.0) || !sigma_max.is_finite() {
            return Err(Error::Domain { what: "monitoring bound", value: sigma_max });
        }
        Ok(MonitoringConfig { kappa0, sigma_max })
    }

    pub fn cost(&self, sigma: f64) -> f64 {
        self.kappa0 * sigma * sigma
    }

    pub fn marginal_cost(&self, sigma: f64) -> f64 {
        2.0 * self.kappa0 * sigma
    }
}

pub fn monitored(econ: &Economy, sigma: f64) -> Result<Economy> {
    econ.with_signal_scale(1.0 + sigma)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MonitoringCorner {
    Interior,
    /// The marginal return is zero at no monitoring.
    None,
    /// The marginal return still exceeds the marginal cost at the bound.
    Bound,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonitoringSolution {
    pub sigma: f64,
    pub foc_residual: f64,
    pub corner: MonitoringCorner,
}

/// Marginal screening return `b1(s) * int_cut (d mu'/d s)(1 - F)`.
pub fn marginal_return(econ: &Economy, rule: &SlopeRule, sigma: f64) -> Result<f64> {
    let e = monitored(econ, sigma)?;
    let sol = rule.solve(&e)?;
    if sol.empty || sol.contract.slope == 0.0 {
        return Ok(0.0);
    }
    let d = &econ.dist;
    let tail = d.integrate(|t| econ.signal.slope(t) * (1.0 - d.cdf(t)), sol.cutoff, econ.upper())?;
    Ok(sol.contract.slope * tail)
}

pub fn solve_monitoring(econ: &Economy, rule: &SlopeRule, cfg: &MonitoringConfig) -> Result<MonitoringSolution> {
    let gap = |s: f64| -> Result<f64> { Ok(marginal_return(econ, rule, s)? - cfg.marginal_cost(s)) };
    let at_zero = gap(0.0)?;
    if at_zero <= 0.0 {
        return Ok(MonitoringSolution {
            sigma: 0.0,
            foc_residual: at_zero.abs(),
            corner: MonitoringCorner::None,
        });
    }
    let at_max = gap(cfg.sigma_max)?;
    if at_max >= 0.0 {
        return Ok(MonitoringSolution {
            sigma: cfg.sigma_max,
            foc_residual: at_max.abs(),
            corner: MonitoringCorner::Bound,
        });
    }
    let (mut lo, mut hi) = (0.0, cfg.sigma_max);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if gap(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    let sigma = 0.5 * (lo + hi);
    Ok(MonitoringSolution {
        sigma,
        foc_residual: gap(sigma)?.abs(),
        corner: MonitoringCorner::Interior,
    })
}

/// Central difference of the optimal monitoring level in `R`.
pub fn monitoring_tightness_slope(econ: &Economy, rule: &SlopeRule, cfg: &MonitoringConfig, step: f64) -> Result<f64> {
    let r = econ.tightness();
    let up = solve_monitoring(&econ.with_tightness(r + step)?, rule, cfg)?.sigma;
    let dn = solve_monitoring(&econ.with_tightness(r - step)?, rule, cfg)?.sigma;
    Ok((up - dn) / (2.0 * step))
}

/// Mixed difference of portfolio value in monitoring of relationship `i`
/// and tightness of relationship `j`.
pub fn cross_effect(port: &PortfolioEconomy, i: usize, j: usize, sigma: f64, step: f64) -> Result<f64> {
    if i == j || i >= port.len() || j >= port.len() {
        return Err(Error::Invalid("cross effect needs two distinct relationships"));
    }
    let base = port.economies[i].clone();
    let r = port.economies[j].tightness();
    let value = |s: f64, rr: f64| -> Result<f64> {
        let mut p = port.with_tightness(j, rr)?;
        p.economies[i] = monitored(&base, s)?;
        Ok(solve_cutoffs(&p)?.total_value)
    };
    let lo = (sigma - step).max(0.0);
    let hi = sigma + step;
    let pp = value(hi, r + step)?;
    let pm = value(hi, r - step)?;
    let mp = value(lo, r + step)?;
    let mm = value(lo, r - step)?;
    Ok((pp - pm - mp + mm) / ((hi - lo) * 2.0 * step))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bench(r: f64) -> Economy {
        Economy::benchmark(2.0, 0.1, r).unwrap()
    }

    #[test]
    fn prohibitive_cost_means_no_monitoring() {
        let cfg = MonitoringConfig::new(1e9, 10.0).unwrap();
        let s = solve_monitoring(&bench(1.0), &SlopeRule::calibrated_baseline(), &cfg).unwrap();
        assert!(s.sigma < 1e-6);
    }

    #[test]
    fn interior_solution() {
        let s = solve_monitoring(&bench(1.0), &SlopeRule::calibrated_baseline(), &MonitoringConfig::default()).unwrap();
        assert_eq!(s.corner, MonitoringCorner::Interior);
        assert!(s.sigma > 0.0);
        assert!(s.foc_residual < 1e-6);
    }

    #[test]
    fn flat_signal_has_no_return() {
        let e = bench(1.0).with_signal_scale(0.0).unwrap();
        let s = solve_monitoring(&e, &SlopeRule::calibrated_baseline(), &MonitoringConfig::default()).unwrap();
        assert_eq!(s.corner, MonitoringCorner::None);
    }

    #[test]
    fn cost_shape() {
        let c = MonitoringConfig::default();
        assert_eq!(c.cost(0.0), 0.0);
        assert_eq!(c.marginal_cost(0.0), 0.0);
        assert!(c.cost(2.0) + c.cost(0.0) > 2.0 * c.cost(1.0));
        assert!(MonitoringConfig::new(0.0, 1.0).is_err());
    }
}
