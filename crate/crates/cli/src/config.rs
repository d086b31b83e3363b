//! JSON run configuration. Every field has a default, so `{}` is the
//! uniform-quadratic benchmark with `v = 2`, `mu0 = 0`, `K = 1`, `R = 1`.

use std::fs;
use std::path::Path;

use liqscreen_core::calibration::SlopeRule;
use liqscreen_core::economy::{Curve, Economy, FinancingCost, MarginalTable, TypeDistribution};
use liqscreen_core::extensions::monitoring::MonitoringConfig;
use liqscreen_core::portfolio::PortfolioEconomy;
use serde::Deserialize;

use crate::error::CliError;

fn one() -> f64 {
    1.0
}

fn two() -> f64 {
    2.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub dist: DistConfig,
    /// Value per unit type, `V(t) = v t`.
    #[serde(default = "two")]
    pub v: f64,
    /// Signal mean at type zero.
    #[serde(default)]
    pub mu0: f64,
    /// Signal mean slope; zero makes the signal uninformative.
    #[serde(default = "one")]
    pub signal_slope: f64,
    #[serde(rename = "K", default = "one")]
    pub k: f64,
    #[serde(rename = "R", default = "one")]
    pub r: f64,
    #[serde(default)]
    pub phi: PhiConfig,
    #[serde(default)]
    pub portfolio: PortfolioConfig,
    #[serde(default)]
    pub extensions: ExtensionConfig,
}

impl Default for Config {
    fn default() -> Self {
        serde_json::from_str("{}").expect("empty config deserializes")
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistConfig {
    Uniform(Bounds),
    TruncatedExponential { rate: f64, lower: f64, upper: f64 },
    Power { exponent: f64, lower: f64, upper: f64 },
    Histogram { edges: Vec<f64>, weights: Vec<f64> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
}

impl Default for DistConfig {
    fn default() -> Self {
        DistConfig::Uniform(Bounds { lower: 0.0, upper: 1.0 })
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case", deny_unknown_fields)]
pub enum PhiConfig {
    #[default]
    Quadratic,
    /// Marginal cost knots; the cost is `R` times its integral.
    Tabulated { ell: Vec<f64>, marginal: Vec<f64> },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleConfig {
    #[default]
    Calibrated,
    Optimized,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PortfolioConfig {
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default)]
    pub slope_rule: RuleConfig,
    /// Symmetric complementarity weights with a zero diagonal.
    #[serde(default)]
    pub adjacency: Option<Vec<Vec<f64>>>,
}

fn default_delta() -> f64 {
    1.2
}

impl Default for PortfolioConfig {
    fn default() -> Self {
        PortfolioConfig {
            delta: default_delta(),
            slope_rule: RuleConfig::default(),
            adjacency: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionConfig {
    #[serde(default = "default_kappa0")]
    pub kappa0: f64,
    #[serde(default = "default_sigma_max")]
    pub sigma_max: f64,
    #[serde(default = "default_bidders")]
    pub bidders: usize,
    #[serde(default = "default_periods")]
    pub periods: usize,
    #[serde(default = "default_true_type")]
    pub true_type: f64,
}

fn default_kappa0() -> f64 {
    0.05
}

fn default_sigma_max() -> f64 {
    10.0
}

fn default_bidders() -> usize {
    10
}

fn default_periods() -> usize {
    20
}

fn default_true_type() -> f64 {
    0.6
}

impl Default for ExtensionConfig {
    fn default() -> Self {
        ExtensionConfig {
            kappa0: default_kappa0(),
            sigma_max: default_sigma_max(),
            bidders: default_bidders(),
            periods: default_periods(),
            true_type: default_true_type(),
        }
    }
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Config::default());
        };
        let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let cfg: Config = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        cfg.economy()?;
        Ok(cfg)
    }

    pub fn economy(&self) -> Result<Economy, CliError> {
        self.economy_with_value(self.v)
    }

    /// Same economy with a different value scale.
    pub fn economy_with_value(&self, v: f64) -> Result<Economy, CliError> {
        let invalid = |e: liqscreen_core::Error| CliError::Config(e.to_string());
        let dist = match &self.dist {
            DistConfig::Uniform(b) => TypeDistribution::uniform(b.lower, b.upper),
            DistConfig::TruncatedExponential { rate, lower, upper } => TypeDistribution::truncated_exponential(*rate, *lower, *upper),
            DistConfig::Power { exponent, lower, upper } => TypeDistribution::power(*exponent, *lower, *upper),
            DistConfig::Histogram { edges, weights } => TypeDistribution::histogram(edges.clone(), weights.clone()),
        }
        .map_err(invalid)?;
        let financing = match &self.phi {
            PhiConfig::Quadratic => FinancingCost::quadratic(self.r),
            PhiConfig::Tabulated { ell, marginal } => {
                MarginalTable::new(ell.clone(), marginal.clone()).and_then(|t| FinancingCost::tabulated(self.r, t))
            }
        }
        .map_err(invalid)?;
        if !(self.mu0 >= 0.0) || !(self.signal_slope >= 0.0) {
            return Err(CliError::Config("signal offset and slope must be non-negative".into()));
        }
        Economy::new(
            dist,
            Curve::linear(0.0, v),
            Curve::linear(0.0, 1.0),
            Curve::linear(self.mu0, self.signal_slope),
            financing,
            self.k,
        )
        .map_err(invalid)
    }

    pub fn slope_rule(&self) -> SlopeRule {
        match self.portfolio.slope_rule {
            RuleConfig::Calibrated => SlopeRule::calibrated_baseline(),
            RuleConfig::Optimized => SlopeRule::Optimized,
        }
    }

    /// The adjacency network when given, otherwise a symmetric pair.
    pub fn portfolio(&self) -> Result<PortfolioEconomy, CliError> {
        let econ = self.economy()?;
        let built = match &self.portfolio.adjacency {
            Some(w) => PortfolioEconomy::new(vec![econ; w.len()], w.clone(), self.slope_rule()),
            None => PortfolioEconomy::symmetric(&econ, self.portfolio.delta, self.slope_rule()),
        };
        built.map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn monitoring(&self) -> Result<MonitoringConfig, CliError> {
        MonitoringConfig::new(self.extensions.kappa0, self.extensions.sigma_max).map_err(|e| CliError::Config(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_the_benchmark() {
        let c: Config = serde_json::from_str("{}").unwrap();
        assert_eq!(c.v, 2.0);
        assert_eq!(c.r, 1.0);
        assert_eq!(c.portfolio.delta, 1.2);
        let e = c.economy().unwrap();
        assert_eq!(e.lower(), 0.0);
        assert_eq!(e.working_capital, 1.0);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(serde_json::from_str::<Config>(r#"{"v": 2, "gamma": 1}"#).is_err());
        assert!(serde_json::from_str::<Config>(r#"{"portfolio": {"delta": 1, "x": 0}}"#).is_err());
        assert!(serde_json::from_str::<Config>(r#"{"dist": {"kind": "uniform", "params": {"lower": 0, "upper": 1, "mode": 2}}}"#).is_err());
    }

    #[test]
    fn full_document_parses() {
        let text = r#"{
            "dist": {"kind": "truncated_exponential", "params": {"rate": 2, "lower": 0, "upper": 1}},
            "v": 3, "mu0": 0.1, "K": 1, "R": 0.5,
            "phi": {"kind": "tabulated", "params": {"ell": [0, 0.5, 1], "marginal": [0, 0.5, 1]}},
            "portfolio": {"delta": 0.4, "slope_rule": "optimized", "adjacency": [[0, 0.4], [0.4, 0]]},
            "extensions": {"bidders": 3}
        }"#;
        let c: Config = serde_json::from_str(text).unwrap();
        c.economy().unwrap();
        assert_eq!(c.portfolio().unwrap().len(), 2);
        assert_eq!(c.extensions.bidders, 3);
        assert_eq!(c.extensions.periods, 20);
    }

    #[test]
    fn invalid_economy_is_a_config_error() {
        let c: Config = serde_json::from_str(r#"{"R": -1}"#).unwrap();
        assert!(matches!(c.economy(), Err(CliError::Config(_))));
    }
}
