//! Scalar kernels shared by every solver: bracketing root finder, scan plus
//! golden-section maximizer, damped fixed-point iteration, composite Simpson
//! quadrature and fixed-step RK4.

use alloc::vec;
use alloc::vec::Vec;

// inherent float methods shadow the trait whenever std is linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Panels used by solver quadratures unless a caller asks otherwise.
pub const DEFAULT_PANELS: usize = 512;

/// Points in the coarse scan that precedes golden-section refinement.
pub const SCAN_POINTS: usize = 64;

/// Stopping rules for the iterative kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs_x: f64,
    pub abs_f: f64,
    pub max_iter: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs_x: 1e-10,
            abs_f: 1e-12,
            max_iter: 200,
        }
    }
}

impl Tolerance {
    pub fn new(abs_x: f64, abs_f: f64, max_iter: usize) -> Result<Self> {
        if !(abs_x > 0.0) || !abs_x.is_finite() {
            return Err(Error::Domain { what: "abs_x", value: abs_x });
        }
        if !(abs_f > 0.0) || !abs_f.is_finite() {
            return Err(Error::Domain { what: "abs_f", value: abs_f });
        }
        if max_iter == 0 {
            return Err(Error::Invalid("max_iter must be at least 1"));
        }
        Ok(Tolerance { abs_x, abs_f, max_iter })
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter.max(1);
        self
    }
}

/// An interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Bracket { lo, hi });
        }
        Ok(Bracket { lo, hi })
    }
}

fn same_sign(a: f64, b: f64) -> bool {
    (a > 0.0 && b > 0.0) || (a < 0.0 && b < 0.0)
}

/// Root of `f` inside `bracket`.
///
/// Every iteration tries a secant step inside the current bracket and then
/// bisects, so the bracket at least halves per iteration.
pub fn find_root<F: Fn(f64) -> f64>(f: F, bracket: Bracket, tol: &Tolerance) -> Result<f64> {
    let (mut a, mut b) = (bracket.lo, bracket.hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !fa.is_finite() || !fb.is_finite() || same_sign(fa, fb) {
        return Err(Error::Bracket { lo: a, hi: b });
    }
    for _ in 0..tol.max_iter {
        let s = b - fb * (b - a) / (fb - fa);
        if s.is_finite() && s > a && s < b {
            let fs = f(s);
            if fs.abs() <= tol.abs_f {
                return Ok(s);
            }
            if same_sign(fs, fa) {
                a = s;
                fa = fs;
            } else {
                b = s;
                fb = fs;
            }
        }
        if b - a <= tol.abs_x {
            return Ok(if fa.abs() <= fb.abs() { a } else { b });
        }
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm.abs() <= tol.abs_f {
            return Ok(m);
        }
        if same_sign(fm, fa) {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
        if b - a <= tol.abs_x {
            return Ok(if fa.abs() <= fb.abs() { a } else { b });
        }
    }
    Err(Error::Convergence {
        iterations: tol.max_iter,
        last: 0.5 * (a + b),
    })
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// Maximizer of `f` on `[lo, hi]`, returned as `(argmax, max)`.
///
/// A 64-point scan locates the best grid cell (ties go to the left-most
/// point), then golden section refines inside the neighbouring cells. The
/// refined point replaces the grid point only if it is strictly better.
pub fn maximize_scalar<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: &Tolerance) -> Result<(f64, f64)> {
    if !(lo < hi) {
        return Err(Error::Domain { what: "maximize_scalar lo", value: lo });
    }
    let grid = linspace(lo, hi, SCAN_POINTS);
    let mut best = 0;
    let mut best_val = f(grid[0]);
    for (i, &x) in grid.iter().enumerate().skip(1) {
        let v = f(x);
        if v > best_val || (best_val.is_nan() && !v.is_nan()) {
            best = i;
            best_val = v;
        }
    }
    let mut a = grid[best.saturating_sub(1)];
    let mut b = grid[(best + 1).min(grid.len() - 1)];
    let inv_phi = 0.5 * (5.0_f64.sqrt() - 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iter = 0;
    while b - a > tol.abs_x && iter < tol.max_iter {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        iter += 1;
    }
    let (x_ref, f_ref) = if fc >= fd { (c, fc) } else { (d, fd) };
    if f_ref > best_val {
        Ok((x_ref, f_ref))
    } else {
        Ok((grid[best], best_val))
    }
}

/// Result of [`fixed_point`].
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPoint {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

/// Damped iteration `x <- (1-d) x + d g(x)` until `max |x - g(x)| <= abs_f`.
pub fn fixed_point<G>(mut g: G, x0: &[f64], damping: f64, tol: &Tolerance) -> Result<FixedPoint>
where
    G: FnMut(&[f64], &mut [f64]) -> Result<()>,
{
    if !(damping > 0.0 && damping <= 1.0) {
        return Err(Error::Domain { what: "damping", value: damping });
    }
    let mut x = x0.to_vec();
    let mut gx = vec![0.0; x.len()];
    let mut residual = f64::INFINITY;
    for iteration in 0..=tol.max_iter {
        g(&x, &mut gx)?;
        residual = x
            .iter()
            .zip(&gx)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if residual <= tol.abs_f {
            return Ok(FixedPoint { x, iterations: iteration, residual });
        }
        if iteration == tol.max_iter {
            break;
        }
        for (xi, gi) in x.iter_mut().zip(&gx) {
            *xi = (1.0 - damping) * *xi + damping * gi;
        }
    }
    Err(Error::FixedPoint {
        iterations: tol.max_iter,
        residual,
        last: x,
    })
}

/// Composite Simpson rule with `n_panels` (even) panels.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n_panels: usize) -> Result<f64> {
    if lo > hi {
        return Err(Error::Domain { what: "integration lower limit", value: lo });
    }
    if n_panels == 0 || !n_panels.is_multiple_of(2) {
        return Err(Error::Invalid("Simpson panels must be a positive even count"));
    }
    if lo == hi {
        return Ok(0.0);
    }
    let h = (hi - lo) / n_panels as f64;
    let mut odd = 0.0;
    let mut even = 0.0;
    for i in 1..n_panels {
        let v = f(lo + h * i as f64);
        if i % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    Ok(h / 3.0 * (f(lo) + f(hi) + 4.0 * odd + 2.0 * even))
}

/// Composite four-point Gauss-Legendre rule. Never evaluates `f` at the
/// panel ends, so it tolerates jumps placed exactly on `lo` and `hi`.
pub fn integrate_open<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n_panels: usize) -> Result<f64> {
    const NODES: [f64; 2] = [0.339_981_043_584_856_3, 0.861_136_311_594_052_6];
    const WEIGHTS: [f64; 2] = [0.652_145_154_862_546_1, 0.347_854_845_137_453_9];
    if lo > hi {
        return Err(Error::Domain { what: "integration lower limit", value: lo });
    }
    if n_panels == 0 {
        return Err(Error::Invalid("panel count must be positive"));
    }
    let h = (hi - lo) / n_panels as f64;
    let mut total = 0.0;
    for i in 0..n_panels {
        let mid = lo + h * (i as f64 + 0.5);
        for (x, w) in NODES.iter().zip(WEIGHTS) {
            total += w * (f(mid - 0.5 * h * x) + f(mid + 0.5 * h * x));
        }
    }
    Ok(0.5 * h * total)
}

/// Classic RK4 with a fixed step from `t0` to `t1` (either direction).
/// Returns the `steps + 1` sampled points `(t, y)`.
pub fn integrate_ode<F: Fn(f64, f64) -> f64>(rhs: F, t0: f64, y0: f64, t1: f64, steps: usize) -> Result<Vec<(f64, f64)>> {
    if steps == 0 {
        return Err(Error::Invalid("ODE step count must be positive"));
    }
    let h = (t1 - t0) / steps as f64;
    let mut path = Vec::with_capacity(steps + 1);
    let mut y = y0;
    path.push((t0, y));
    let check = |k: f64, t: f64| if k.is_finite() { Ok(k) } else { Err(Error::Singular { t }) };
    for i in 0..steps {
        let t = t0 + h * i as f64;
        let k1 = check(rhs(t, y), t)?;
        let k2 = check(rhs(t + 0.5 * h, y + 0.5 * h * k1), t + 0.5 * h)?;
        let k3 = check(rhs(t + 0.5 * h, y + 0.5 * h * k2), t + 0.5 * h)?;
        let k4 = check(rhs(t + h, y + h * k3), t + h)?;
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        let t_next = if i + 1 == steps { t1 } else { t0 + h * (i + 1) as f64 };
        path.push((t_next, y));
    }
    Ok(path)
}

/// Solves the dense system `m x = rhs` (row-major `n x n`) by Gaussian
/// elimination with partial pivoting.
pub fn solve_linear(m: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = rhs.len();
    if m.len() != n * n {
        return Err(Error::Invalid("matrix and right-hand side sizes disagree"));
    }
    let mut a = m.to_vec();
    let mut b = rhs.to_vec();
    let scale = a.iter().fold(0.0_f64, |s, v| s.max(v.abs())).max(1.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
            .unwrap_or(col);
        if a[pivot * n + col].abs() <= 1e-13 * scale {
            return Err(Error::SingularMatrix);
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            b.swap(col, pivot);
        }
        for row in col + 1..n {
            let factor = a[row * n + col] / a[col * n + col];
            for k in col..n {
                a[row * n + k] -= factor * a[col * n + k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|k| a[row * n + k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row * n + row];
    }
    Ok(x)
}

/// Monotone piecewise-cubic Hermite interpolant (Fritsch-Carlson slopes),
/// held flat outside the knots.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(xs: &[f64], ys: &[f64]) -> Result<Self> {
        let n = xs.len();
        if n < 2 || ys.len() != n {
            return Err(Error::Invalid("interpolation needs at least two matching knots"));
        }
        if xs.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Invalid("interpolation knots must be strictly increasing"));
        }
        let secants: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])).collect();
        let mut slopes = vec![0.0; n];
        slopes[0] = secants[0];
        slopes[n - 1] = secants[n - 2];
        for i in 1..n - 1 {
            slopes[i] = if secants[i - 1] * secants[i] <= 0.0 {
                0.0
            } else {
                0.5 * (secants[i - 1] + secants[i])
            };
        }
        for i in 0..n - 1 {
            if secants[i] == 0.0 {
                slopes[i] = 0.0;
                slopes[i + 1] = 0.0;
                continue;
            }
            let alpha = slopes[i] / secants[i];
            let beta = slopes[i + 1] / secants[i];
            let norm = alpha * alpha + beta * beta;
            if norm > 9.0 {
                let tau = 3.0 / norm.sqrt();
                slopes[i] = tau * alpha * secants[i];
                slopes[i + 1] = tau * beta * secants[i];
            }
        }
        Ok(MonotoneCubic {
            xs: xs.to_vec(),
            ys: ys.to_vec(),
            slopes,
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0];
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        let i = self.xs.partition_point(|&k| k <= x) - 1;
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        (2.0 * t3 - 3.0 * t2 + 1.0) * self.ys[i]
            + (t3 - 2.0 * t2 + t) * h * self.slopes[i]
            + (-2.0 * t3 + 3.0 * t2) * self.ys[i + 1]
            + (t3 - t2) * h * self.slopes[i + 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn root_examples() {
        let r = find_root(|x| x * x - 2.0, Bracket::new(1.0, 2.0).unwrap(), &tol()).unwrap();
        assert_abs_diff_eq!(r, 2.0_f64.sqrt(), epsilon = 1e-8);
        let z = find_root(|x| x, Bracket::new(-1.0, 1.0).unwrap(), &tol()).unwrap();
        assert_abs_diff_eq!(z, 0.0, epsilon = 1e-12);
        let ell = find_root(|l| 0.5 * l * l + l - 1.0, Bracket::new(0.0, 1.0).unwrap(), &tol()).unwrap();
        assert_abs_diff_eq!(ell, 3.0_f64.sqrt() - 1.0, epsilon = 1e-9);
    }

    #[test]
    fn root_rejects_missing_sign_change() {
        let err = find_root(|x| x * x + 1.0, Bracket::new(-1.0, 1.0).unwrap(), &tol());
        assert!(matches!(err, Err(Error::Bracket { .. })));
        assert!(Bracket::new(1.0, 1.0).is_err());
    }

    #[test]
    fn root_reports_iteration_budget() {
        let t = Tolerance::new(1e-300, 1e-300, 3).unwrap();
        let err = find_root(|x| x.powi(3) - 0.3, Bracket::new(0.0, 1.0).unwrap(), &t);
        assert!(matches!(err, Err(Error::Convergence { .. })));
    }

    #[test]
    fn maximize_examples() {
        let (x, v) = maximize_scalar(|x| -(x - 0.3) * (x - 0.3), 0.0, 1.0, &tol()).unwrap();
        assert_abs_diff_eq!(x, 0.3, epsilon = 1e-8);
        assert_abs_diff_eq!(v, 0.0, epsilon = 1e-15);
        let (x, v) = maximize_scalar(|x| x, 0.0, 1.0, &tol()).unwrap();
        assert_eq!((x, v), (1.0, 1.0));
        let (x, v) = maximize_scalar(f64::sin, 0.0, 3.0, &tol()).unwrap();
        assert_abs_diff_eq!(x, core::f64::consts::FRAC_PI_2, epsilon = 1e-6);
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-12);
        assert!(maximize_scalar(|x| x, 1.0, 1.0, &tol()).is_err());
    }

    #[test]
    fn maximize_prefers_left_on_flat_functions() {
        let (x, _) = maximize_scalar(|_| 2.0, 0.0, 5.0, &tol()).unwrap();
        assert_eq!(x, 0.0);
    }

    #[test]
    fn fixed_point_examples() {
        let halve = |x: &[f64], out: &mut [f64]| {
            out[0] = 0.5 * x[0];
            Ok(())
        };
        let fp = fixed_point(halve, &[1.0], 0.5, &tol()).unwrap();
        assert_abs_diff_eq!(fp.x[0], 0.0, epsilon = 1e-10);

        let ident = |x: &[f64], out: &mut [f64]| {
            out.copy_from_slice(x);
            Ok(())
        };
        let fp = fixed_point(ident, &[0.3], 0.5, &tol()).unwrap();
        assert_eq!(fp.x, vec![0.3]);
        assert_eq!(fp.iterations, 0);

        // symmetric two-cutoff map, closed form (a + b1 - d) / (1 + b1 - d)
        let (a, b1, d) = (0.27, 0.5, 0.3);
        let map = |x: &[f64], out: &mut [f64]| {
            out[0] = ((a + b1 - d * (1.0 - x[1])) / (1.0 + b1)).clamp(0.0, 1.0);
            out[1] = ((a + b1 - d * (1.0 - x[0])) / (1.0 + b1)).clamp(0.0, 1.0);
            Ok(())
        };
        let start = (a + b1) / (1.0 + b1);
        let fp = fixed_point(map, &[start, start], 0.5, &tol()).unwrap();
        let closed = (a + b1 - d) / (1.0 + b1 - d);
        assert_abs_diff_eq!(fp.x[0], closed, epsilon = 1e-8);
        assert_abs_diff_eq!(fp.x[1], 0.39167, epsilon = 1e-5);
        assert!(fp.iterations < 200);
    }

    #[test]
    fn fixed_point_failure_carries_last_iterate() {
        let shift = |x: &[f64], out: &mut [f64]| {
            out[0] = x[0] + 1.0;
            Ok(())
        };
        match fixed_point(shift, &[0.0], 1.0, &Tolerance::default().with_max_iter(5)) {
            Err(Error::FixedPoint { last, .. }) => assert_eq!(last, vec![5.0]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn simpson_examples() {
        assert_abs_diff_eq!(integrate(|_| 1.0, 0.0, 1.0, DEFAULT_PANELS).unwrap(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(integrate(|t| t, 0.0, 1.0, DEFAULT_PANELS).unwrap(), 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(
            integrate(|t| 2.0 * t - 1.0, 0.5, 1.0, DEFAULT_PANELS).unwrap(),
            0.25,
            epsilon = 1e-14
        );
        assert!(integrate(|t| t, 1.0, 0.0, 4).is_err());
        assert!(integrate(|t| t, 0.0, 1.0, 3).is_err());
        assert_eq!(integrate(|t| t, 0.4, 0.4, 4).unwrap(), 0.0);
    }

    #[test]
    fn simpson_is_fourth_order() {
        let exact = 1.0 - (-1.0_f64).exp();
        let err = |n| (integrate(|t: f64| (-t).exp(), 0.0, 1.0, n).unwrap() - exact).abs();
        let ratio = err(8) / err(16);
        assert!(ratio > 14.0 && ratio < 18.0, "ratio {ratio}");
    }

    #[test]
    fn rk4_examples() {
        let path = integrate_ode(|_, y| y, 0.0, 1.0, 1.0, 1000).unwrap();
        assert_eq!(path.len(), 1001);
        assert_abs_diff_eq!(path[1000].1, core::f64::consts::E, epsilon = 1e-6);
        let flat = integrate_ode(|_, _| 0.0, 0.0, 3.5, 2.0, 10).unwrap();
        assert!(flat.iter().all(|&(_, y)| y == 3.5));
        let back = integrate_ode(|t, _| t, 1.0, 0.7, 0.0, 50).unwrap();
        assert_eq!(back[0], (1.0, 0.7));
        assert_abs_diff_eq!(back[50].1, 0.7 - 0.5, epsilon = 1e-12);
    }

    #[test]
    fn rk4_reports_singularity() {
        let err = integrate_ode(|t, _| 1.0 / (1.0 - t), 0.0, 0.0, 1.0, 4);
        assert_eq!(err, Err(Error::Singular { t: 1.0 }));
    }

    #[test]
    fn linear_solve() {
        let x = solve_linear(&[2.0, 1.0, 1.0, 3.0], &[3.0, 5.0]).unwrap();
        assert_abs_diff_eq!(x[0], 0.8, epsilon = 1e-14);
        assert_abs_diff_eq!(x[1], 1.4, epsilon = 1e-14);
        assert_eq!(solve_linear(&[1.0, 2.0, 2.0, 4.0], &[1.0, 1.0]), Err(Error::SingularMatrix));
    }

    #[test]
    fn monotone_cubic_hits_knots_and_stays_monotone() {
        let xs = [0.0, 0.5, 1.0, 2.0, 3.0, 5.0];
        let ys = [0.0, 0.21, 0.34, 0.47, 0.55, 0.63];
        let m = MonotoneCubic::new(&xs, &ys).unwrap();
        for (x, y) in xs.iter().zip(ys) {
            assert_abs_diff_eq!(m.eval(*x), y, epsilon = 1e-15);
        }
        let grid = linspace(0.0, 6.0, 601);
        assert!(grid.windows(2).all(|w| m.eval(w[1]) >= m.eval(w[0]) - 1e-15));
        assert_eq!(m.eval(7.0), 0.63);
    }
}
