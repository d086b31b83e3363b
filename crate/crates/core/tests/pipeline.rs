use liqscreen_core::bilateral::{solve_optimal, sweep_r};
use liqscreen_core::calibration::SlopeRule;
use liqscreen_core::economy::{Curve, Economy, FinancingCost, MarginalTable, TypeDistribution};
use liqscreen_core::oracle::grid_search_optimal;
use liqscreen_core::portfolio::{solve_cutoffs, PortfolioEconomy};
use proptest::prelude::*;

fn economy(dist: TypeDistribution, financing: FinancingCost, mu0: f64) -> Economy {
    Economy::new(dist, Curve::linear(0.0, 2.0), Curve::linear(0.0, 1.0), Curve::linear(mu0, 1.0), financing, 1.0).unwrap()
}

#[test]
fn solver_matches_grid_search_on_skewed_types() {
    let dist = TypeDistribution::truncated_exponential(2.0, 0.0, 1.0).unwrap();
    for r in [0.5, 1.0, 2.0] {
        let e = economy(dist.clone(), FinancingCost::quadratic(r).unwrap(), 0.1);
        let w = solve_optimal(&e).unwrap().value;
        let g = grid_search_optimal(&e, 200, 200).unwrap().best_value;
        assert!((w - g).abs() < 1e-3, "R={r}: {w} vs {g}");
    }
}

#[test]
fn linear_marginal_table_is_the_quadratic_cost() {
    let table = MarginalTable::new(vec![0.0, 0.5, 1.0], vec![0.0, 0.5, 1.0]).unwrap();
    let uniform = TypeDistribution::uniform(0.0, 1.0).unwrap();
    for mu0 in [0.0, 0.1] {
        let q = solve_optimal(&economy(uniform.clone(), FinancingCost::quadratic(1.5).unwrap(), mu0)).unwrap();
        let t = solve_optimal(&economy(uniform.clone(), FinancingCost::tabulated(1.5, table.clone()).unwrap(), mu0)).unwrap();
        assert!((q.value - t.value).abs() < 1e-9);
        assert!((q.contract.advance - t.contract.advance).abs() < 1e-9);
    }
}

#[test]
fn flat_histogram_is_the_uniform() {
    let hist = TypeDistribution::histogram(vec![0.0, 0.25, 0.5, 0.75, 1.0], vec![1.0; 4]).unwrap();
    let uniform = TypeDistribution::uniform(0.0, 1.0).unwrap();
    let a = solve_optimal(&economy(hist, FinancingCost::quadratic(1.0).unwrap(), 0.1)).unwrap();
    let b = solve_optimal(&economy(uniform, FinancingCost::quadratic(1.0).unwrap(), 0.1)).unwrap();
    assert!((a.value - b.value).abs() < 1e-8);
    assert!((a.cutoff - b.cutoff).abs() < 1e-6);
}

#[test]
fn uncoupled_network_adds_up() {
    let e = Economy::benchmark(2.0, 0.0, 1.0).unwrap();
    let rule = SlopeRule::calibrated_baseline();
    let port = PortfolioEconomy::new(vec![e.clone(); 3], vec![vec![0.0; 3]; 3], rule.clone()).unwrap();
    let sol = solve_cutoffs(&port).unwrap();
    let single = rule.solve(&e).unwrap();
    assert!((sol.total_value - 3.0 * single.value).abs() < 1e-10);
}

#[test]
fn benchmark_sweep_advance_is_increasing_and_concave() {
    let s = sweep_r(&Economy::benchmark(2.0, 0.0, 1.0).unwrap(), &[0.5, 1.0, 2.0, 3.0, 5.0]).unwrap();
    assert!(s.advance_increasing);
    assert!(s.advance_concave);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn empty_implementation_is_worth_nothing(r in 0.05f64..5.0, mu0 in 0.0f64..0.5) {
        let sol = solve_optimal(&Economy::benchmark(2.0, mu0, r).unwrap()).unwrap();
        if sol.empty {
            prop_assert_eq!(sol.value, 0.0);
        }
        prop_assert!(sol.contract.advance >= 0.0 && sol.contract.advance <= 1.0);
    }

    #[test]
    fn advance_rises_with_tightness(r in 0.05f64..4.0, step in 0.01f64..1.0) {
        let lo = solve_optimal(&Economy::benchmark(2.0, 0.0, r).unwrap()).unwrap().contract.advance;
        let hi = solve_optimal(&Economy::benchmark(2.0, 0.0, r + step).unwrap()).unwrap().contract.advance;
        prop_assert!(hi >= lo);
    }
}
