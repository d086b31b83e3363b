//! Several relationships whose joint implementation is worth more than the
//! sum of its parts.
//!
//! Each relationship keeps its bilateral contract; complementarity
//! `delta_ij` only shifts cutoffs, which solve the coupled system
//! `psi_i(t_i) + sum_j delta_ij (1 - F_j(t_j)) = 0`.

use alloc::vec;
use alloc::vec::Vec;

use crate::bilateral::{BilateralSolution, Contract, Cutoff, Problem};
use crate::calibration::SlopeRule;
use crate::economy::Economy;
use crate::error::{Error, Result};
use crate::numerics::{fixed_point, linspace, solve_linear, Tolerance};

/// Damping of the cutoff iteration.
pub const DAMPING: f64 = 0.5;
/// Step in `R` for the finite-difference derivatives of portfolio value.
pub const R_STEP: f64 = 1e-4;
const THETA_STEP: f64 = 1e-6;

fn cutoff_tolerance() -> Tolerance {
    Tolerance {
        abs_x: 1e-13,
        abs_f: 1e-11,
        max_iter: 50_000,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PortfolioEconomy {
    pub economies: Vec<Economy>,
    /// Row-major `n x n`, symmetric, zero diagonal.
    complementarity: Vec<f64>,
    pub rule: SlopeRule,
}

impl PortfolioEconomy {
    pub fn new(economies: Vec<Economy>, complementarity: Vec<Vec<f64>>, rule: SlopeRule) -> Result<Self> {
        let n = economies.len();
        if n < 2 {
            return Err(Error::Invalid("a portfolio needs at least two relationships"));
        }
        if complementarity.len() != n || complementarity.iter().any(|row| row.len() != n) {
            return Err(Error::Invalid("complementarity matrix must be n x n"));
        }
        for i in 0..n {
            if complementarity[i][i] != 0.0 {
                return Err(Error::Invalid("complementarity diagonal must be zero"));
            }
            for j in 0..n {
                let d = complementarity[i][j];
                if !(d >= 0.0) || !d.is_finite() {
                    return Err(Error::Domain { what: "complementarity", value: d });
                }
                if d != complementarity[j][i] {
                    return Err(Error::Invalid("complementarity matrix must be symmetric"));
                }
            }
        }
        Ok(PortfolioEconomy {
            economies,
            complementarity: complementarity.into_iter().flatten().collect(),
            rule,
        })
    }

    /// Two copies of `econ` with complementarity `delta`.
    pub fn symmetric(econ: &Economy, delta: f64, rule: SlopeRule) -> Result<Self> {
        PortfolioEconomy::new(
            vec![econ.clone(), econ.clone()],
            vec![vec![0.0, delta], vec![delta, 0.0]],
            rule,
        )
    }

    pub fn len(&self) -> usize {
        self.economies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.economies.is_empty()
    }

    pub fn delta(&self, i: usize, j: usize) -> f64 {
        self.complementarity[i * self.len() + j]
    }

    pub fn with_tightness(&self, j: usize, r: f64) -> Result<Self> {
        let mut next = self.clone();
        next.economies[j] = self.economies[j].with_tightness(r)?;
        Ok(next)
    }

    pub fn with_common_tightness(&self, r: f64) -> Result<Self> {
        let mut next = self.clone();
        for e in next.economies.iter_mut() {
            *e = e.with_tightness(r)?;
        }
        Ok(next)
    }

    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        let n = self.len();
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 0.0 } else { delta }).collect())
            .collect();
        PortfolioEconomy::new(self.economies.clone(), rows, self.rule.clone())
    }

    pub fn bilateral(&self) -> Result<Vec<BilateralSolution>> {
        self.economies.iter().map(|e| self.rule.solve(e)).collect()
    }

    pub fn contracts(&self) -> Result<Vec<Contract>> {
        Ok(self.bilateral()?.into_iter().map(|s| s.contract).collect())
    }

    fn coupling(&self, i: usize, cutoffs: &[f64]) -> f64 {
        (0..self.len())
            .map(|j| self.delta(i, j) * (1.0 - self.economies[j].dist.cdf(cutoffs[j])))
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PortfolioSolution {
    pub contracts: Vec<Contract>,
    pub cutoffs: Vec<f64>,
    /// Cutoff sits at the bottom of the support or the set is empty.
    pub clamped: Vec<bool>,
    pub empty: Vec<bool>,
    pub residuals: Vec<f64>,
    pub per_relationship_value: Vec<f64>,
    pub total_value: f64,
    pub iterations: usize,
    /// The iteration map is not a contraction at the solution, so other
    /// fixed points may exist.
    pub uniqueness_uncertain: bool,
}

/// Cutoff of the symmetric two-relationship benchmark,
/// `(a + b1 - delta) / (1 + b1 - delta)`, clamped to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricCutoff {
    pub theta: f64,
    pub clamped: bool,
}

pub fn symmetric_cutoff(a: f64, b1: f64, delta: f64) -> Result<SymmetricCutoff> {
    let den = 1.0 + b1 - delta;
    if den <= 1e-9 {
        return Err(Error::Degenerate("symmetric cutoff denominator is not positive"));
    }
    let raw = (a + b1 - delta) / den;
    Ok(SymmetricCutoff {
        theta: raw.clamp(0.0, 1.0),
        clamped: !(0.0..=1.0).contains(&raw),
    })
}

/// Contracts from the slope rule, then the coupled cutoffs.
pub fn solve_cutoffs(port: &PortfolioEconomy) -> Result<PortfolioSolution> {
    let contracts = port.contracts()?;
    solve_with_contracts(port, &contracts)
}

fn shifted_cutoff(port: &PortfolioEconomy, contracts: &[Contract], i: usize, shift: f64) -> Result<Cutoff> {
    Problem::baseline(&port.economies[i]).cutoff_shifted(contracts[i].advance, contracts[i].slope, shift)
}

/// Coupled cutoffs for given contracts, iterated from the bilateral cutoffs.
pub fn solve_with_contracts(port: &PortfolioEconomy, contracts: &[Contract]) -> Result<PortfolioSolution> {
    let n = port.len();
    if contracts.len() != n {
        return Err(Error::Invalid("one contract per relationship"));
    }
    let start: Vec<f64> = (0..n)
        .map(|i| shifted_cutoff(port, contracts, i, 0.0).map(|c| c.theta))
        .collect::<Result<_>>()?;
    let fp = fixed_point(
        |x, out| {
            for i in 0..n {
                out[i] = shifted_cutoff(port, contracts, i, port.coupling(i, x))?.theta;
            }
            Ok(())
        },
        &start,
        DAMPING,
        &cutoff_tolerance(),
    )?;
    // settle on an exact image of the map so flags and residuals agree
    let mut cutoffs = Vec::with_capacity(n);
    let mut empty = Vec::with_capacity(n);
    for i in 0..n {
        let c = shifted_cutoff(port, contracts, i, port.coupling(i, &fp.x))?;
        cutoffs.push(c.theta);
        empty.push(c.empty);
    }
    let mut residuals = Vec::with_capacity(n);
    let mut clamped = Vec::with_capacity(n);
    for i in 0..n {
        let e = &port.economies[i];
        let p = Problem::baseline(e);
        let g = p.psi(cutoffs[i], contracts[i].advance, contracts[i].slope) + port.coupling(i, &cutoffs);
        let at_bottom = cutoffs[i] <= e.lower();
        clamped.push(at_bottom || empty[i]);
        let r = if (at_bottom && g >= 0.0) || (empty[i] && g <= 0.0) { 0.0 } else { g.abs() };
        residuals.push(r);
    }
    let (per, total) = portfolio_value_with(port, contracts, &cutoffs, &empty)?;
    let jac = cutoff_jacobian(port, contracts, &cutoffs, &clamped);
    let norm = (0..n)
        .map(|i| (0..n).map(|j| jac[i * n + j].abs()).sum::<f64>())
        .fold(0.0, f64::max);
    Ok(PortfolioSolution {
        contracts: contracts.to_vec(),
        cutoffs,
        clamped,
        empty,
        residuals,
        per_relationship_value: per,
        total_value: total,
        iterations: fp.iterations,
        uniqueness_uncertain: norm >= 1.0,
    })
}

fn psi_slope(e: &Economy, c: &Contract, t: f64) -> f64 {
    let p = Problem::baseline(e);
    let lo = (t - THETA_STEP).max(e.lower());
    let hi = (t + THETA_STEP).min(e.upper());
    (p.psi(hi, c.advance, c.slope) - p.psi(lo, c.advance, c.slope)) / (hi - lo)
}

/// `d t_i / d t_k` of the iteration map; zero rows for clamped cutoffs.
fn cutoff_jacobian(port: &PortfolioEconomy, contracts: &[Contract], cutoffs: &[f64], clamped: &[bool]) -> Vec<f64> {
    let n = port.len();
    let mut jac = vec![0.0; n * n];
    for i in 0..n {
        if clamped[i] {
            continue;
        }
        let slope = psi_slope(&port.economies[i], &contracts[i], cutoffs[i]);
        for k in 0..n {
            if k != i && !clamped[k] {
                jac[i * n + k] = port.delta(i, k) * port.economies[k].dist.pdf(cutoffs[k]) / slope;
            }
        }
    }
    jac
}

/// Total value and its split; each pair term is shared half-half.
pub fn portfolio_value(port: &PortfolioEconomy, contracts: &[Contract], cutoffs: &[f64]) -> Result<(f64, Vec<f64>)> {
    let empty: Vec<bool> = cutoffs
        .iter()
        .zip(&port.economies)
        .map(|(t, e)| *t >= e.upper())
        .collect();
    let (per, total) = portfolio_value_with(port, contracts, cutoffs, &empty)?;
    Ok((total, per))
}

fn portfolio_value_with(
    port: &PortfolioEconomy,
    contracts: &[Contract],
    cutoffs: &[f64],
    empty: &[bool],
) -> Result<(Vec<f64>, f64)> {
    let n = port.len();
    let mut per = Vec::with_capacity(n);
    for i in 0..n {
        let e = &port.economies[i];
        let own = Problem::baseline(e)
            .evaluate_with_cutoff(
                contracts[i].advance,
                contracts[i].slope,
                Cutoff {
                    theta: cutoffs[i],
                    empty: empty[i],
                },
            )?
            .value;
        let tail_i = 1.0 - e.dist.cdf(cutoffs[i]);
        let shared: f64 = (0..n)
            .map(|j| 0.5 * port.delta(i, j) * tail_i * (1.0 - port.economies[j].dist.cdf(cutoffs[j])))
            .sum();
        per.push(own + shared);
    }
    let total = per.iter().sum();
    Ok((per, total))
}

/// `d t_i / d R_j` for every `i`, by implicit differentiation of the
/// cutoff system at `sol`; clamped cutoffs do not move.
pub fn cutoff_sensitivities(port: &PortfolioEconomy, sol: &PortfolioSolution, j: usize) -> Result<Vec<f64>> {
    let n = port.len();
    let e = &port.economies[j];
    let r = e.tightness();
    let h = R_STEP.min(r.max(0.0));
    let psi_at = |rr: f64| -> Result<f64> {
        let er = e.with_tightness(rr)?;
        let c = port.rule.solve(&er)?.contract;
        Ok(Problem::baseline(&er).psi(sol.cutoffs[j], c.advance, c.slope))
    };
    let dpsi_dr = if h > 0.0 {
        (psi_at(r + R_STEP)? - psi_at(r - h)?) / (R_STEP + h)
    } else {
        (psi_at(r + R_STEP)? - psi_at(r)?) / R_STEP
    };
    let free: Vec<usize> = (0..n).filter(|&i| !sol.clamped[i]).collect();
    let mut out = vec![0.0; n];
    if !free.contains(&j) {
        return Ok(out);
    }
    let m = free.len();
    let mut mat = vec![0.0; m * m];
    let mut rhs = vec![0.0; m];
    for (row, &i) in free.iter().enumerate() {
        for (col, &k) in free.iter().enumerate() {
            mat[row * m + col] = if i == k {
                psi_slope(&port.economies[i], &sol.contracts[i], sol.cutoffs[i])
            } else {
                -port.delta(i, k) * port.economies[k].dist.pdf(sol.cutoffs[k])
            };
        }
        if i == j {
            rhs[row] = -dpsi_dr;
        }
    }
    let x = solve_linear(&mat, &rhs)?;
    for (row, &i) in free.iter().enumerate() {
        out[i] = x[row];
    }
    Ok(out)
}

/// `C_j = sum_{i != j} delta_ij d t_i / d R_j`.
pub fn contagion_centrality(port: &PortfolioEconomy, sol: &PortfolioSolution, j: usize) -> Result<f64> {
    let sens = cutoff_sensitivities(port, sol, j)?;
    Ok((0..port.len()).filter(|&i| i != j).map(|i| port.delta(i, j) * sens[i]).sum())
}

pub fn centralities(port: &PortfolioEconomy, sol: &PortfolioSolution) -> Result<Vec<f64>> {
    (0..port.len()).map(|j| contagion_centrality(port, sol, j)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContagionDerivative {
    /// Central difference of the solved portfolio value in `R_j`.
    pub total: f64,
    /// `-Phi_R(K_j - a_j) (1 - F_j(t_j))`.
    pub direct: f64,
    /// Response of `j`'s own contract to `R_j`, cutoffs held fixed.
    pub own_contract: f64,
    /// `sum_{i != j} (-psi_i f_i)(t_i) d t_i / d R_j`.
    pub spillover: f64,
    /// The remaining cutoff terms: `j`'s own cutoff and the pair terms.
    pub complementarity_adjustment: f64,
    /// A cutoff is clamped or a contract sits at a corner.
    pub approximate: bool,
}

impl ContagionDerivative {
    pub fn parts_sum(&self) -> f64 {
        self.direct + self.own_contract + self.spillover + self.complementarity_adjustment
    }
}

fn value_at_tightness(port: &PortfolioEconomy, j: usize, r: f64) -> Result<f64> {
    Ok(solve_cutoffs(&port.with_tightness(j, r)?)?.total_value)
}

/// Central difference of the solved portfolio value in `R_j`
/// (forward at `R_j = 0`).
pub fn value_derivative(port: &PortfolioEconomy, j: usize) -> Result<f64> {
    let r = port.economies[j].tightness();
    if r < R_STEP {
        return Ok((value_at_tightness(port, j, r + R_STEP)? - value_at_tightness(port, j, r)?) / R_STEP);
    }
    Ok((value_at_tightness(port, j, r + R_STEP)? - value_at_tightness(port, j, r - R_STEP)?) / (2.0 * R_STEP))
}

pub fn contagion_derivative(port: &PortfolioEconomy, j: usize) -> Result<ContagionDerivative> {
    let n = port.len();
    if j >= n {
        return Err(Error::Invalid("relationship index out of range"));
    }
    let bil = port.bilateral()?;
    let contracts: Vec<Contract> = bil.iter().map(|s| s.contract).collect();
    let sol = solve_with_contracts(port, &contracts)?;
    let total = value_derivative(port, j)?;

    let e = &port.economies[j];
    let r = e.tightness();
    let cj = contracts[j];
    let direct = -e.financing.phi_r(e.working_capital - cj.advance) * (1.0 - e.dist.cdf(sol.cutoffs[j]));

    let fixed_value = |rr: f64| -> Result<f64> {
        let p = port.with_tightness(j, rr)?;
        let mut cs = contracts.clone();
        cs[j] = p.rule.solve(&p.economies[j])?.contract;
        let (total, _) = portfolio_value(&p, &cs, &sol.cutoffs)?;
        Ok(total)
    };
    let lo = if r < R_STEP { r } else { r - R_STEP };
    let own_total = (fixed_value(r + R_STEP)? - fixed_value(lo)?) / (r + R_STEP - lo);
    let own_contract = own_total - direct;

    let sens = cutoff_sensitivities(port, &sol, j)?;
    let mut spillover = 0.0;
    let mut cutoff_total = 0.0;
    for i in 0..n {
        let ei = &port.economies[i];
        let ci = contracts[i];
        let t = sol.cutoffs[i];
        let psi = Problem::baseline(ei).psi(t, ci.advance, ci.slope);
        let f = ei.dist.pdf(t);
        cutoff_total += -f * (psi + port.coupling(i, &sol.cutoffs)) * sens[i];
        if i != j {
            spillover += -psi * f * sens[i];
        }
    }
    let corner = bil
        .iter()
        .any(|s| s.boundary != crate::bilateral::Boundary::Interior);
    Ok(ContagionDerivative {
        total,
        direct,
        own_contract,
        spillover,
        complementarity_adjustment: cutoff_total - spillover,
        approximate: corner || sol.clamped.iter().any(|c| *c),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContagionThreshold {
    /// `(K - a)(1 + b1) / (b1 (1 - t)) * Phi_R(K - a)`.
    pub formula: f64,
    /// Smallest grid `delta` at which the value derivative turns positive.
    pub empirical: Option<f64>,
}

/// Grid on which the empirical threshold and the contagion share are read.
pub fn delta_grid() -> Vec<f64> {
    linspace(0.0, 2.5, 51)
}

pub fn contagion_threshold(econ: &Economy, rule: &SlopeRule) -> Result<ContagionThreshold> {
    let sol = rule.solve(econ)?;
    let b1 = sol.contract.slope;
    if b1 <= 0.0 {
        return Err(Error::Degenerate("benchmark degeneracy: the contingent slope is zero"));
    }
    let ell = econ.working_capital - sol.contract.advance;
    let tail = 1.0 - econ.dist.cdf(sol.cutoff);
    if tail <= 0.0 {
        return Err(Error::Degenerate("no type is implemented"));
    }
    let formula = ell * (1.0 + b1) / (b1 * tail) * econ.financing.phi_r(ell);
    let base = PortfolioEconomy::symmetric(econ, 0.0, rule.clone())?;
    let mut empirical = None;
    for d in delta_grid() {
        if value_derivative(&base.with_delta(d)?, 0)? > 0.0 {
            empirical = Some(d);
            break;
        }
    }
    Ok(ContagionThreshold { formula, empirical })
}

/// Share of the delta grid on which the value derivative is positive.
pub fn contagion_share(econ: &Economy, rule: &SlopeRule) -> Result<f64> {
    let base = PortfolioEconomy::symmetric(econ, 0.0, rule.clone())?;
    let grid = delta_grid();
    let mut hits = 0usize;
    for &d in &grid {
        if value_derivative(&base.with_delta(d)?, 0)? > 0.0 {
            hits += 1;
        }
    }
    Ok(hits as f64 / grid.len() as f64)
}

/// Relative value change from setting cutoffs as if the relationships were
/// independent, evaluated with the true coupled payoff.
pub fn value_reduction(port: &PortfolioEconomy) -> Result<f64> {
    let contracts = port.contracts()?;
    let sol = solve_with_contracts(port, &contracts)?;
    let naive: Vec<f64> = (0..port.len())
        .map(|i| shifted_cutoff(port, &contracts, i, 0.0).map(|c| c.theta))
        .collect::<Result<_>>()?;
    let (naive_value, _) = portfolio_value(port, &contracts, &naive)?;
    if sol.total_value == 0.0 {
        return Ok(0.0);
    }
    Ok((naive_value - sol.total_value) / sol.total_value.abs())
}

#[derive(Debug, Clone, PartialEq)]
pub struct HumpScan {
    pub tightness: Vec<f64>,
    pub values: Vec<f64>,
    /// Maximal runs of grid cells with a positive value slope.
    pub rising: Vec<(f64, f64)>,
    /// Grid point with the largest value when it is interior.
    pub peak: Option<f64>,
}

pub fn hump_scan(port: &PortfolioEconomy, r_grid: &[f64]) -> Result<HumpScan> {
    if r_grid.len() < 2 || r_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Invalid("tightness grid must be ascending with two or more points"));
    }
    let values: Vec<f64> = r_grid
        .iter()
        .map(|&r| port.with_common_tightness(r).and_then(|p| solve_cutoffs(&p)).map(|s| s.total_value))
        .collect::<Result<_>>()?;
    let mut rising = Vec::new();
    let mut run: Option<f64> = None;
    for k in 1..values.len() {
        if values[k] > values[k - 1] {
            run.get_or_insert(r_grid[k - 1]);
        } else if let Some(start) = run.take() {
            rising.push((start, r_grid[k - 1]));
        }
    }
    if let Some(start) = run {
        rising.push((start, r_grid[r_grid.len() - 1]));
    }
    let best = (0..values.len()).fold(0, |b, k| if values[k] > values[b] { k } else { b });
    let peak = if best > 0 && best + 1 < values.len() { Some(r_grid[best]) } else { None };
    Ok(HumpScan {
        tightness: r_grid.to_vec(),
        values,
        rising,
        peak,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Breadth {
    pub dual_value: f64,
    pub single_value: f64,
    /// `2 W* > Pi*`.
    pub prefer_single: bool,
}

pub fn breadth_comparison(port: &PortfolioEconomy) -> Result<Breadth> {
    let dual_value = solve_cutoffs(port)?.total_value;
    let single_value = port.rule.solve(&port.economies[0])?.value;
    Ok(Breadth {
        dual_value,
        single_value,
        prefer_single: 2.0 * single_value > dual_value,
    })
}

/// Change in each relationship's value when every `R` falls by `dr`.
pub fn uniform_subsidy_effect(port: &PortfolioEconomy, dr: f64) -> Result<Vec<f64>> {
    let r = port.economies[0].tightness();
    if port.economies.iter().any(|e| e.tightness() != r) {
        return Err(Error::Invalid("uniform subsidy needs a common tightness"));
    }
    let before = solve_cutoffs(port)?.per_relationship_value;
    let after = solve_cutoffs(&port.with_common_tightness(r - dr)?)?.per_relationship_value;
    Ok(after.iter().zip(&before).map(|(a, b)| a - b).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionPoint {
    pub tightness: f64,
    pub delta: f64,
    pub derivative: ContagionDerivative,
    pub in_region: bool,
}

/// Contagion derivative for relationship 0 of a symmetric pair over a grid.
pub fn contagion_region(econ: &Economy, rule: &SlopeRule, r_grid: &[f64], delta_grid: &[f64]) -> Result<Vec<RegionPoint>> {
    let mut out = Vec::with_capacity(r_grid.len() * delta_grid.len());
    for &r in r_grid {
        let e = econ.with_tightness(r)?;
        for &d in delta_grid {
            let port = PortfolioEconomy::symmetric(&e, d, rule.clone())?;
            let derivative = contagion_derivative(&port, 0)?;
            out.push(RegionPoint {
                tightness: r,
                delta: d,
                in_region: derivative.total > 0.0,
                derivative,
            });
        }
    }
    Ok(out)
}
