//! Renegotiation risk: with probability `lambda` the contingent payment is
//! never made, so the counterparty values it at `1 - lambda` of face value.

use alloc::vec::Vec;

use crate::bilateral::{BilateralSolution, Problem};
use crate::economy::Economy;
use crate::error::{Error, Result};

pub fn solve_renegotiation(econ: &Economy, lambda: f64) -> Result<BilateralSolution> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Domain { what: "renegotiation probability", value: lambda });
    }
    Problem::with_enforcement(econ, 1.0 - lambda)?.solve()
}

pub fn renegotiation_sweep(econ: &Economy, lambdas: &[f64]) -> Result<Vec<BilateralSolution>> {
    lambdas.iter().map(|l| solve_renegotiation(econ, *l)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bilateral::solve_optimal;
    use crate::numerics::linspace;

    #[test]
    fn no_risk_is_the_baseline() {
        let e = Economy::benchmark(2.0, 0.1, 1.0).unwrap();
        assert_eq!(solve_renegotiation(&e, 0.0).unwrap(), solve_optimal(&e).unwrap());
        assert!(solve_renegotiation(&e, 1.5).is_err());
    }

    #[test]
    fn advance_rises_and_value_falls_with_risk() {
        for mu0 in [0.0, 0.1] {
            let e = Economy::benchmark(2.0, mu0, 1.0).unwrap();
            let sols = renegotiation_sweep(&e, &linspace(0.0, 1.0, 11)).unwrap();
            for w in sols.windows(2) {
                assert!(w[1].contract.advance >= w[0].contract.advance - 1e-9);
                assert!(w[1].value <= w[0].value + 1e-9);
            }
        }
    }
}
