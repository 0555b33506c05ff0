//! Small numerical building blocks shared by the spectral and control code:
//! bracketed root polishing, quadrature rules, C¹ cubic interpolation and a
//! least-squares slope for log-log trend checks.

use crate::error::{Error, Result};

/// Brent's method on a bracket `[a, b]` with `f(a)·f(b) ≤ 0`.
///
/// Combines bisection, secant and inverse quadratic steps; terminates when the
/// bracket is narrower than `xtol + rtol·|x|` or `f` vanishes exactly.
pub fn brent<F>(mut f: F, a: f64, b: f64, xtol: f64, rtol: f64, max_iter: usize) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (a, b);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::BracketFailure { lo: a.min(b), hi: a.max(b) });
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * (xtol + rtol * b.abs());
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b)?;
    }
    Ok(b)
}

/// Adaptive Simpson quadrature with a relative tolerance and a cap on the
/// number of integrand evaluations.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, rtol: f64, budget: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    struct State<'a, F: Fn(f64) -> f64> {
        f: &'a F,
        evals: usize,
        budget: usize,
    }

    fn recurse<F: Fn(f64) -> f64>(
        st: &mut State<'_, F>,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Option<f64> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = (st.f)(lm);
        let frm = (st.f)(rm);
        st.evals += 2;
        if st.evals > st.budget {
            return None;
        }
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return Some(left + right + delta / 15.0);
        }
        let l = recurse(st, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
        let r = recurse(st, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
        Some(l + r)
    }

    // Seed with a coarse composite rule so the absolute tolerance is scaled
    // by a sensible magnitude estimate.
    let seeds = 16;
    let h = (b - a) / seeds as f64;
    let mut st = State { f: &f, evals: 0, budget };
    let mut coarse = Vec::with_capacity(seeds);
    let mut scale = 0.0;
    for i in 0..seeds {
        let x0 = a + i as f64 * h;
        let x1 = x0 + h;
        let (f0, fm, f1) = (f(x0), f(0.5 * (x0 + x1)), f(x1));
        st.evals += 3;
        let s = h / 6.0 * (f0 + 4.0 * fm + f1);
        scale += s.abs();
        coarse.push((x0, x1, f0, fm, f1, s));
    }
    let tol = rtol * scale.max(f64::MIN_POSITIVE) / seeds as f64;
    let mut total = 0.0;
    for (x0, x1, f0, fm, f1, s) in coarse {
        total += recurse(&mut st, x0, x1, f0, fm, f1, s, tol, 40)
            .ok_or(Error::QuadratureFailure { budget })?;
    }
    Ok(total)
}

/// Composite Simpson weights for `n` uniform intervals of width `h` (n even).
/// Falls back to trapezoid weights when `n` is odd.
pub fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![0.0; n + 1];
    if n % 2 == 0 && n >= 2 {
        for (i, wi) in w.iter_mut().enumerate() {
            *wi = if i == 0 || i == n {
                h / 3.0
            } else if i % 2 == 1 {
                4.0 * h / 3.0
            } else {
                2.0 * h / 3.0
            };
        }
    } else {
        for (i, wi) in w.iter_mut().enumerate() {
            *wi = if i == 0 || i == n { 0.5 * h } else { h };
        }
    }
    w
}

/// Composite Simpson integral of uniformly spaced samples.
pub fn simpson(values: &[f64], h: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    simpson_weights(values.len() - 1, h)
        .iter()
        .zip(values)
        .map(|(w, v)| w * v)
        .sum()
}

/// Composite trapezoid integral of uniformly spaced samples.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => h * (values[1..n - 1].iter().sum::<f64>() + 0.5 * (values[0] + values[n - 1])),
    }
}

/// Clamped cubic spline; end slopes come from the cubic through the four
/// nearest samples so the interpolant stays fourth-order accurate up to the
/// boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    // second derivatives at the knots
    m: Vec<f64>,
}

impl CubicSpline {
    /// `x` must be strictly increasing with at least two entries.
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n < 2 || y.len() != n {
            return Err(Error::InvalidConfig(format!(
                "spline needs >= 2 matching samples, got {} abscissae and {} values",
                n,
                y.len()
            )));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidConfig("spline abscissae must be strictly increasing".into()));
        }
        if n == 2 {
            return Ok(Self { x, y, m: vec![0.0; 2] });
        }
        let d0 = end_slope(&x[..n.min(4)], &y[..n.min(4)], x[0]);
        let dn = end_slope(&x[n - n.min(4)..], &y[n - n.min(4)..], x[n - 1]);

        // Tridiagonal system for the knot second derivatives (clamped ends).
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let mut sub = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut sup = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        diag[0] = h[0] / 3.0;
        sup[0] = h[0] / 6.0;
        rhs[0] = (y[1] - y[0]) / h[0] - d0;
        for i in 1..n - 1 {
            sub[i] = h[i - 1] / 6.0;
            diag[i] = (h[i - 1] + h[i]) / 3.0;
            sup[i] = h[i] / 6.0;
            rhs[i] = (y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1];
        }
        sub[n - 1] = h[n - 2] / 6.0;
        diag[n - 1] = h[n - 2] / 3.0;
        rhs[n - 1] = dn - (y[n - 1] - y[n - 2]) / h[n - 2];
        let m = solve_tridiagonal(&sub, &diag, &sup, &rhs);
        Ok(Self { x, y, m })
    }

    fn locate(&self, t: f64) -> usize {
        let n = self.x.len();
        match self.x.partition_point(|&xi| xi <= t) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        let i = self.locate(t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let i = self.locate(t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        (self.y[i + 1] - self.y[i]) / h - (3.0 * a * a - 1.0) / 6.0 * h * self.m[i]
            + (3.0 * b * b - 1.0) / 6.0 * h * self.m[i + 1]
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }
}

/// Derivative at `t` of the interpolating polynomial through `(x, y)`.
fn end_slope(x: &[f64], y: &[f64], t: f64) -> f64 {
    // d/dt of the Lagrange form
    let n = x.len();
    let mut total = 0.0;
    for j in 0..n {
        let mut denom = 1.0;
        for k in 0..n {
            if k != j {
                denom *= x[j] - x[k];
            }
        }
        let mut num = 0.0;
        for i in 0..n {
            if i == j {
                continue;
            }
            let mut prod = 1.0;
            for k in 0..n {
                if k != j && k != i {
                    prod *= t - x[k];
                }
            }
            num += prod;
        }
        total += y[j] * num / denom;
    }
    total
}

/// Thomas algorithm; the system is diagonally dominant for spline matrices.
pub fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let denom = diag[i] - sub[i] * c[i - 1];
        c[i] = if i + 1 < n { sup[i] / denom } else { 0.0 };
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / denom;
    }
    let mut out = vec![0.0; n];
    out[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        out[i] = d[i] - c[i] * out[i + 1];
    }
    out
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0)
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn brent_finds_cosine_root() {
        let r = brent(|x| Ok(x.cos()), 1.0, 2.0, 0.0, 1e-15, 200).unwrap();
        assert!((r - PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn brent_rejects_same_sign() {
        let e = brent(|x| Ok(x * x + 1.0), -1.0, 1.0, 0.0, 1e-12, 50).unwrap_err();
        assert!(matches!(e, Error::BracketFailure { .. }));
    }

    #[test]
    fn adaptive_simpson_integrates_smooth_function() {
        let v = adaptive_simpson(|x| x.exp(), 0.0, 1.0, 1e-12, 1_000_000).unwrap();
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-11);
    }

    #[test]
    fn adaptive_simpson_reports_budget_exhaustion() {
        let e = adaptive_simpson(|x| (1.0 / x.max(1e-300)).sin(), 0.0, 1.0, 1e-14, 200).unwrap_err();
        assert!(matches!(e, Error::QuadratureFailure { .. }));
    }

    #[test]
    fn simpson_exact_for_cubics() {
        let h = 0.1;
        let v: Vec<f64> = (0..=10).map(|i| (i as f64 * h).powi(3)).collect();
        assert!((simpson(&v, h) - 0.25).abs() < 1e-14);
    }

    #[test]
    fn spline_reproduces_cubic() {
        let x: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
        let f = |t: f64| 1.0 - 2.0 * t + 0.5 * t * t * t;
        let s = CubicSpline::new(x.clone(), x.iter().map(|&t| f(t)).collect()).unwrap();
        for k in 0..=97 {
            let t = k as f64 / 97.0;
            assert!((s.value(t) - f(t)).abs() < 1e-12);
            assert!((s.derivative(t) - (-2.0 + 1.5 * t * t)).abs() < 1e-10);
        }
    }

    #[test]
    fn log_log_slope_of_power_law() {
        let x: Vec<f64> = (1..20).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v.powf(-1.5)).collect();
        assert!((log_log_slope(&x, &y) + 1.5).abs() < 1e-12);
    }
}
