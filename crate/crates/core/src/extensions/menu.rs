//! Report-dependent menus `{a(t), b1(t)}` on a finite type grid, searched
//! exactly over a coarse instrument grid and compared with the best single
//! contract on the same grid.
//!
//! Both are scored by the principal's direct payoff
//! `sum_k w_k (V_k - a_k - b1_k mu_k)` over implemented types, subject to
//! participation of every implemented type, no excluded type gaining from
//! any offered contract, and (for the menu) a non-decreasing slope with
//! adjacent incentive constraints in both directions. With `mu` increasing
//! the payoff has increasing differences in slope and type, so those
//! constraints give global incentive compatibility.

use alloc::vec;
use alloc::vec::Vec;

use crate::economy::Economy;
use crate::error::{Error, Result};
use crate::numerics::linspace;
use crate::oracle::{ic_verify, mimic_payoff, slope_search_bound, DiscreteMechanism, IcReport};

/// Advance levels and slopes per instrument grid.
pub const INSTRUMENT_POINTS: usize = 20;
/// Instrument levels for the single-contract search the menu is also
/// measured against; separates real gains from coarse-grid noise.
pub const REFINED_POINTS: usize = 200;
const FEAS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct MenuCheck {
    pub menu_value: f64,
    pub baseline_value: f64,
    pub gap: f64,
    /// Best single contract on the refined instrument grid.
    pub refined_baseline_value: f64,
    /// `menu_value - refined_baseline_value`.
    pub refined_gap: f64,
    pub mechanism: DiscreteMechanism,
    pub ic: IcReport,
}

struct Tables {
    types: Vec<f64>,
    weights: Vec<f64>,
    advances: Vec<f64>,
    slopes: Vec<f64>,
    /// `payoff[c][k]`: type `k` taking contract `c`.
    payoff: Vec<Vec<f64>>,
    /// `gain[c][k]`: principal's payoff from type `k` on contract `c`.
    gain: Vec<Vec<f64>>,
    /// `excluded_max[c][m]`: best payoff of types below `m` on contract `c`.
    excluded_max: Vec<Vec<f64>>,
}

impl Tables {
    fn new(econ: &Economy, n_types: usize, points: usize) -> Self {
        let (lo, hi) = (econ.lower(), econ.upper());
        let h = (hi - lo) / n_types as f64;
        let types: Vec<f64> = if n_types == 1 {
            vec![0.5 * (lo + hi)]
        } else {
            (0..n_types).map(|k| lo + (k as f64 + 0.5) * h).collect()
        };
        let raw: Vec<f64> = types.iter().map(|t| econ.dist.pdf(*t)).collect();
        let total: f64 = raw.iter().sum();
        let weights = raw.iter().map(|w| w / total).collect();
        let mut advances = Vec::new();
        let mut slopes = Vec::new();
        for a in linspace(0.0, econ.working_capital, points) {
            for b in linspace(0.0, slope_search_bound(econ), points) {
                advances.push(a);
                slopes.push(b);
            }
        }
        let payoff: Vec<Vec<f64>> = (0..advances.len())
            .map(|c| types.iter().map(|t| mimic_payoff(econ, advances[c], slopes[c], *t)).collect())
            .collect();
        let gain = (0..advances.len())
            .map(|c| {
                types
                    .iter()
                    .map(|t| econ.surplus.value(*t) - advances[c] - slopes[c] * econ.signal.value(*t))
                    .collect()
            })
            .collect();
        let excluded_max = payoff
            .iter()
            .map(|row| {
                let mut acc = vec![f64::NEG_INFINITY; types.len() + 1];
                for k in 0..types.len() {
                    acc[k + 1] = acc[k].max(row[k]);
                }
                acc
            })
            .collect();
        Tables {
            types,
            weights,
            advances,
            slopes,
            payoff,
            gain,
            excluded_max,
        }
    }

    fn admissible(&self, c: usize, k: usize, m: usize) -> bool {
        self.payoff[c][k] >= -FEAS_TOL && self.excluded_max[c][m] <= FEAS_TOL
    }

    /// Best single contract: `(value, cutoff index, contract)`.
    fn best_uniform(&self) -> (f64, usize, Option<usize>) {
        let n = self.types.len();
        let mut best = (0.0, n, None);
        for m in 0..n {
            for c in 0..self.advances.len() {
                if !(m..n).all(|k| self.admissible(c, k, m)) {
                    continue;
                }
                let v: f64 = (m..n).map(|k| self.weights[k] * self.gain[c][k]).sum();
                if v > best.0 {
                    best = (v, m, Some(c));
                }
            }
        }
        best
    }

    /// Best menu: `(value, cutoff index, contract per implemented type)`.
    fn best_menu(&self) -> (f64, usize, Vec<usize>) {
        let n = self.types.len();
        let nc = self.advances.len();
        let mut best = (0.0, n, Vec::new());
        for m in 0..n {
            let mut value: Vec<f64> = (0..nc)
                .map(|c| {
                    if self.admissible(c, m, m) {
                        self.weights[m] * self.gain[c][m]
                    } else {
                        f64::NEG_INFINITY
                    }
                })
                .collect();
            let mut back: Vec<Vec<usize>> = Vec::new();
            for k in m + 1..n {
                let mut next = vec![f64::NEG_INFINITY; nc];
                let mut from = vec![usize::MAX; nc];
                for c in 0..nc {
                    if !self.admissible(c, k, m) {
                        continue;
                    }
                    for p in 0..nc {
                        if value[p] == f64::NEG_INFINITY || self.slopes[c] < self.slopes[p] {
                            continue;
                        }
                        // neither neighbour envies the other
                        if self.payoff[c][k] < self.payoff[p][k] - FEAS_TOL
                            || self.payoff[p][k - 1] < self.payoff[c][k - 1] - FEAS_TOL
                        {
                            continue;
                        }
                        if value[p] > next[c] {
                            next[c] = value[p];
                            from[c] = p;
                        }
                    }
                    if next[c] > f64::NEG_INFINITY {
                        next[c] += self.weights[k] * self.gain[c][k];
                    }
                }
                back.push(from);
                value = next;
            }
            let (end, v) = value
                .iter()
                .enumerate()
                .fold((usize::MAX, f64::NEG_INFINITY), |acc, (c, v)| if *v > acc.1 { (c, *v) } else { acc });
            if end == usize::MAX || !(v > best.0) {
                continue;
            }
            let mut path = vec![end];
            for from in back.iter().rev() {
                let prev = from[*path.last().expect("path is non-empty")];
                path.push(prev);
            }
            path.reverse();
            best = (v, m, path);
        }
        best
    }
}

pub fn menu_equivalence_check(econ: &Economy, n_types: usize) -> Result<MenuCheck> {
    if n_types == 0 {
        return Err(Error::Invalid("menu check needs at least one type"));
    }
    let tables = Tables::new(econ, n_types, INSTRUMENT_POINTS);
    let (baseline_value, _, _) = tables.best_uniform();
    let (menu_value, m, path) = tables.best_menu();
    let n = tables.types.len();
    let mut advances = vec![0.0; n];
    let mut slopes = vec![0.0; n];
    let mut allocation = vec![false; n];
    for (offset, c) in path.iter().enumerate() {
        advances[m + offset] = tables.advances[*c];
        slopes[m + offset] = tables.slopes[*c];
        allocation[m + offset] = true;
    }
    let mechanism = DiscreteMechanism::new(econ, tables.types.clone(), allocation, advances, slopes)?;
    let ic = ic_verify(&mechanism, econ);
    let refined_baseline_value = Tables::new(econ, n_types, REFINED_POINTS).best_uniform().0;
    Ok(MenuCheck {
        menu_value,
        baseline_value,
        gap: menu_value - baseline_value,
        refined_baseline_value,
        refined_gap: menu_value - refined_baseline_value,
        mechanism,
        ic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_types_do_not_beat_a_single_contract() {
        let e = Economy::benchmark(2.0, 0.1, 1.0).unwrap();
        let m = menu_equivalence_check(&e, 10).unwrap();
        assert!(m.ic.ok);
        assert!(m.refined_gap <= 1e-3, "{m:?}");
    }

    #[test]
    fn single_type_has_no_gap() {
        let e = Economy::benchmark(2.0, 0.1, 1.0).unwrap();
        let m = menu_equivalence_check(&e, 1).unwrap();
        assert_eq!(m.gap, 0.0);
    }

    #[test]
    fn returned_menu_is_incentive_compatible() {
        let e = Economy::benchmark(2.0, 0.1, 1.0).unwrap();
        let m = menu_equivalence_check(&e, 6).unwrap();
        assert!(m.ic.ok, "{:?}", m.ic);
        assert!(m.gap >= 0.0);
        assert!(m.refined_gap <= 1e-3);
        for k in 0..6 {
            if m.mechanism.allocation[k] {
                assert!(m.mechanism.rents[k] >= -1e-12);
            }
        }
    }
}
