//! Initial-value solves on each string.
//!
//! The left solution `ũ(x,λ)` starts at `x = -1` with `ũ = 0, ũ' = 1`; the
//! right solution `ṽ(x,λ)` starts at `x = 1` with `ṽ = 0, ṽ' = -1`. Both are
//! integrated towards the junction as the first-order system
//! `y' = w/σ, w' = (q - λρ) y` in the momentum `w = σ y'`, so the integrator
//! never needs `σ'`.

use crate::coefficients::{Side, SideCoefficients, SystemConfig};
use crate::error::{Error, Result};

pub const DEFAULT_STEPS: usize = 4096;
pub const MIN_STEPS: usize = 64;
/// Shoots below this spectral parameter are refused: the exponential growth
/// is of no use to the spectral code and only risks overflow.
pub const MOST_NEGATIVE_LAMBDA: f64 = -1e4;

/// Coefficient values at the nodes and midpoints used by the RK4 stages,
/// ordered in the direction of integration.
#[derive(Debug, Clone)]
struct SideTable {
    side: Side,
    rho: Vec<f64>,
    sigma: Vec<f64>,
    q: Vec<f64>,
    /// Signed step (negative on the right side).
    h: f64,
}

impl SideTable {
    fn new(coeffs: &SideCoefficients, n_steps: usize) -> Self {
        let side = coeffs.side();
        let (start, h) = match side {
            Side::Left => (-1.0, 1.0 / n_steps as f64),
            Side::Right => (1.0, -1.0 / n_steps as f64),
        };
        let half = 0.5 * h;
        let xs: Vec<f64> = (0..=2 * n_steps)
            .map(|k| if k == 2 * n_steps { 0.0 } else { start + k as f64 * half })
            .collect();
        Self {
            side,
            rho: xs.iter().map(|&x| coeffs.rho.value(x)).collect(),
            sigma: xs.iter().map(|&x| coeffs.sigma.value(x)).collect(),
            q: xs.iter().map(|&x| coeffs.q.value(x)).collect(),
            h,
        }
    }

    fn n_steps(&self) -> usize {
        (self.rho.len() - 1) / 2
    }

    /// Seed `(y, w)` at the far end.
    fn seed(&self) -> (f64, f64) {
        match self.side {
            Side::Left => (0.0, self.sigma[0]),
            Side::Right => (0.0, -self.sigma[0]),
        }
    }
}

/// Value and plain derivative of a side solution at the junction (one-sided:
/// `0⁻` for the left string, `0⁺` for the right).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Junction {
    pub y: f64,
    pub dy: f64,
}

/// A sampled side solution.
#[derive(Debug, Clone)]
pub struct SideSolution {
    pub lambda: f64,
    pub side: Side,
    /// Uniform abscissae over the side interval, ascending.
    pub grid: Vec<f64>,
    pub y: Vec<f64>,
    /// Plain derivative `y'` (not σ-scaled).
    pub y_prime: Vec<f64>,
    pub junction: Junction,
}

impl SideSolution {
    pub fn step(&self) -> f64 {
        self.grid[1] - self.grid[0]
    }

    /// Sup-norm of `-(σ y')' + q y - λ ρ y` on the interior nodes, using
    /// centered differences of the stored momentum.
    pub fn ode_residual(&self, coeffs: &SideCoefficients) -> f64 {
        let h = self.step();
        let w: Vec<f64> = self
            .grid
            .iter()
            .zip(&self.y_prime)
            .map(|(&x, &dy)| coeffs.sigma.value(x) * dy)
            .collect();
        (1..self.grid.len() - 1)
            .map(|i| {
                let x = self.grid[i];
                let dw = (w[i + 1] - w[i - 1]) / (2.0 * h);
                (-dw + (coeffs.q.value(x) - self.lambda * coeffs.rho.value(x)) * self.y[i]).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// λ-derivatives of a side solution.
#[derive(Debug, Clone)]
pub struct LambdaDerivative {
    pub lambda: f64,
    pub side: Side,
    pub grid: Vec<f64>,
    pub y_lambda: Vec<f64>,
    pub y_lambda_prime: Vec<f64>,
    /// `(∂y/∂λ, ∂y'/∂λ)` at the junction.
    pub junction: Junction,
    /// The base solve that drives the variational system.
    pub base: Junction,
}

/// Precomputed shooting machinery for one configuration and step count.
#[derive(Debug, Clone)]
pub struct Shooter {
    config: SystemConfig,
    left: SideTable,
    right: SideTable,
}

impl Shooter {
    pub fn new(config: &SystemConfig, n_steps: usize) -> Result<Self> {
        if n_steps < MIN_STEPS {
            return Err(Error::InvalidConfig(format!("n_steps must be >= {MIN_STEPS}, got {n_steps}")));
        }
        Ok(Self {
            config: config.clone(),
            left: SideTable::new(config.left(), n_steps),
            right: SideTable::new(config.right(), n_steps),
        })
    }

    pub fn with_default_steps(config: &SystemConfig) -> Self {
        Self::new(config, DEFAULT_STEPS).expect("default step count is valid")
    }

    pub fn config(&self) -> &SystemConfig {
        &self.config
    }

    pub fn n_steps(&self) -> usize {
        self.left.n_steps()
    }

    fn table(&self, side: Side) -> &SideTable {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    fn check_lambda(lambda: f64) -> Result<()> {
        if !lambda.is_finite() || lambda < MOST_NEGATIVE_LAMBDA {
            return Err(Error::NonFiniteState(format!(
                "spectral parameter {lambda} outside the supported range [{MOST_NEGATIVE_LAMBDA}, inf)"
            )));
        }
        Ok(())
    }

    /// Junction values only; no samples are stored.
    pub fn junction(&self, side: Side, lambda: f64) -> Result<Junction> {
        Self::check_lambda(lambda)?;
        let t = self.table(side);
        let (y0, w0) = t.seed();
        let (y, w) = integrate(t, lambda, y0, w0, |_, _, _| ());
        let sigma0 = t.sigma[t.sigma.len() - 1];
        finite_junction(y, w / sigma0)
    }

    /// Full solve from the standard seed.
    pub fn solve(&self, side: Side, lambda: f64) -> Result<SideSolution> {
        let t = self.table(side);
        let (y0, w0) = t.seed();
        self.solve_seeded(side, lambda, y0, w0 / t.sigma[0])
    }

    /// Full solve from an arbitrary seed `(y, y')` at the far end.
    pub fn solve_seeded(&self, side: Side, lambda: f64, y0: f64, dy0: f64) -> Result<SideSolution> {
        Self::check_lambda(lambda)?;
        let t = self.table(side);
        let n = t.n_steps();
        let mut ys = Vec::with_capacity(n + 1);
        let mut dys = Vec::with_capacity(n + 1);
        let w0 = dy0 * t.sigma[0];
        ys.push(y0);
        dys.push(dy0);
        let (y, w) = integrate(t, lambda, y0, w0, |k, y, w| {
            ys.push(y);
            dys.push(w / t.sigma[2 * k]);
        });
        let sigma0 = t.sigma[2 * n];
        let junction = finite_junction(y, w / sigma0)?;
        if ys.iter().chain(&dys).any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteState(format!("side solution overflowed at lambda={lambda}")));
        }
        let mut grid: Vec<f64> = (0..=n).map(|i| -1.0 + i as f64 / n as f64).collect();
        grid[n] = 0.0;
        if side == Side::Right {
            // integrated from x = 1 down to 0; store ascending
            ys.reverse();
            dys.reverse();
            grid = (0..=n).map(|i| i as f64 / n as f64).collect();
        }
        Ok(SideSolution { lambda, side, grid, y: ys, y_prime: dys, junction })
    }

    /// Solve together with the variational system obtained by differentiating
    /// the ODE in λ (forcing `-ρ y`); the seed does not depend on λ so the
    /// derivative starts from zero.
    pub fn lambda_derivative(&self, side: Side, lambda: f64) -> Result<LambdaDerivative> {
        Self::check_lambda(lambda)?;
        let t = self.table(side);
        let n = t.n_steps();
        let h = t.h;
        let (mut y, mut w) = t.seed();
        let (mut yl, mut wl) = (0.0, 0.0);
        let mut yls = Vec::with_capacity(n + 1);
        let mut wls = Vec::with_capacity(n + 1);
        yls.push(0.0);
        wls.push(0.0);
        let rhs = |k: usize, y: f64, w: f64, yl: f64, wl: f64| {
            let s = t.sigma[k];
            let a = t.q[k] - lambda * t.rho[k];
            (w / s, a * y, wl / s, a * yl - t.rho[k] * y)
        };
        for i in 0..n {
            let k = 2 * i;
            let k1 = rhs(k, y, w, yl, wl);
            let k2 = rhs(k + 1, y + 0.5 * h * k1.0, w + 0.5 * h * k1.1, yl + 0.5 * h * k1.2, wl + 0.5 * h * k1.3);
            let k3 = rhs(k + 1, y + 0.5 * h * k2.0, w + 0.5 * h * k2.1, yl + 0.5 * h * k2.2, wl + 0.5 * h * k2.3);
            let k4 = rhs(k + 2, y + h * k3.0, w + h * k3.1, yl + h * k3.2, wl + h * k3.3);
            y += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
            w += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
            yl += h / 6.0 * (k1.2 + 2.0 * k2.2 + 2.0 * k3.2 + k4.2);
            wl += h / 6.0 * (k1.3 + 2.0 * k2.3 + 2.0 * k3.3 + k4.3);
            yls.push(yl);
            wls.push(wl / t.sigma[k + 2]);
        }
        let sigma0 = t.sigma[2 * n];
        let base = finite_junction(y, w / sigma0)?;
        let junction = finite_junction(yl, wl / sigma0)?;
        let mut grid: Vec<f64> = (0..=n).map(|i| -1.0 + i as f64 / n as f64).collect();
        grid[n] = 0.0;
        if side == Side::Right {
            yls.reverse();
            wls.reverse();
            grid = (0..=n).map(|i| i as f64 / n as f64).collect();
        }
        Ok(LambdaDerivative { lambda, side, grid, y_lambda: yls, y_lambda_prime: wls, junction, base })
    }
}

fn finite_junction(y: f64, dy: f64) -> Result<Junction> {
    if y.is_finite() && dy.is_finite() {
        Ok(Junction { y, dy })
    } else {
        Err(Error::NonFiniteState("junction value overflowed".into()))
    }
}

/// Classical RK4 on the stored half-step table. `visit(i+1, y, w)` sees the
/// state after each step.
fn integrate<V: FnMut(usize, f64, f64)>(t: &SideTable, lambda: f64, y0: f64, w0: f64, mut visit: V) -> (f64, f64) {
    let n = t.n_steps();
    let h = t.h;
    let (mut y, mut w) = (y0, w0);
    for i in 0..n {
        let k = 2 * i;
        let a0 = t.q[k] - lambda * t.rho[k];
        let a1 = t.q[k + 1] - lambda * t.rho[k + 1];
        let a2 = t.q[k + 2] - lambda * t.rho[k + 2];
        let (s0, s1, s2) = (t.sigma[k], t.sigma[k + 1], t.sigma[k + 2]);
        let k1y = w / s0;
        let k1w = a0 * y;
        let k2y = (w + 0.5 * h * k1w) / s1;
        let k2w = a1 * (y + 0.5 * h * k1y);
        let k3y = (w + 0.5 * h * k2w) / s1;
        let k3w = a1 * (y + 0.5 * h * k2y);
        let k4y = (w + h * k3w) / s2;
        let k4w = a2 * (y + h * k3y);
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        w += h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
        visit(i + 1, y, w);
    }
    (y, w)
}

pub fn shoot_left(lambda: f64, config: &SystemConfig, n_steps: usize) -> Result<SideSolution> {
    Shooter::new(config, n_steps)?.solve(Side::Left, lambda)
}

pub fn shoot_right(lambda: f64, config: &SystemConfig, n_steps: usize) -> Result<SideSolution> {
    Shooter::new(config, n_steps)?.solve(Side::Right, lambda)
}

pub fn shoot_lambda_derivative(lambda: f64, side: Side, config: &SystemConfig, n_steps: usize) -> Result<LambdaDerivative> {
    Shooter::new(config, n_steps)?.lambda_derivative(side, lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{default_config, CoefficientProfile};
    use std::f64::consts::PI;

    fn unit() -> SystemConfig {
        SystemConfig::unit(1.0)
    }

    #[test]
    fn left_quarter_wave_closed_form() {
        let lam = (PI / 2.0).powi(2);
        let s = shoot_left(lam, &unit(), DEFAULT_STEPS).unwrap();
        assert!((s.junction.y - 2.0 / PI).abs() < 1e-12);
        assert!(s.junction.dy.abs() < 1e-12);
        assert_eq!(s.y[0], 0.0);
        assert_eq!(s.y_prime[0], 1.0);
        for (x, y) in s.grid.iter().zip(&s.y) {
            let oracle = (lam.sqrt() * (x + 1.0)).sin() / lam.sqrt();
            assert!((y - oracle).abs() < 1e-12);
        }
    }

    #[test]
    fn right_quarter_wave_closed_form() {
        let lam = (PI / 2.0).powi(2);
        let s = shoot_right(lam, &unit(), DEFAULT_STEPS).unwrap();
        assert!((s.junction.y - 2.0 / PI).abs() < 1e-12);
        assert!(s.junction.dy.abs() < 1e-12);
        assert_eq!(*s.y.last().unwrap(), 0.0);
        assert_eq!(*s.y_prime.last().unwrap(), -1.0);
        for (x, y) in s.grid.iter().zip(&s.y) {
            let oracle = (lam.sqrt() * (1.0 - x)).sin() / lam.sqrt();
            assert!((y - oracle).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_lambda_gives_linear_solutions() {
        let sh = Shooter::with_default_steps(&unit());
        let l = sh.junction(Side::Left, 0.0).unwrap();
        let r = sh.junction(Side::Right, 0.0).unwrap();
        assert!((l.y - 1.0).abs() < 1e-14 && (l.dy - 1.0).abs() < 1e-14);
        assert!((r.y - 1.0).abs() < 1e-14 && (r.dy + 1.0).abs() < 1e-14);
    }

    #[test]
    fn fourth_order_convergence() {
        // high enough frequency that truncation error dominates round-off
        let lam: f64 = 3600.0;
        let s = lam.sqrt();
        let exact = (s.sin() / s, s.cos());
        let err = |n: usize| {
            let j = Shooter::new(&unit(), n).unwrap().junction(Side::Left, lam).unwrap();
            ((j.y - exact.0).powi(2) + ((j.dy - exact.1) / s).powi(2)).sqrt()
        };
        let ratio = err(1 << 10) / err(1 << 11);
        assert!((ratio - 16.0).abs() < 1.5, "ratio {ratio}");
    }

    #[test]
    fn symmetric_config_reflection() {
        let rho_l = CoefficientProfile::polynomial(Side::Left, vec![1.0, 0.0, 0.4]);
        let sig_l = CoefficientProfile::polynomial(Side::Left, vec![2.0, -0.5]);
        let left = SideCoefficients { rho: rho_l.clone(), sigma: sig_l.clone(), q: CoefficientProfile::constant(Side::Left, 0.5) };
        let right = SideCoefficients { rho: rho_l.reflected(), sigma: sig_l.reflected(), q: CoefficientProfile::constant(Side::Right, 0.5) };
        let cfg = SystemConfig::new(left, right, 1.0).unwrap();
        let sh = Shooter::with_default_steps(&cfg);
        let mut state = 12345u64;
        for _ in 0..20 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let lam = -50.0 + 2000.0 * ((state >> 11) as f64 / (1u64 << 53) as f64);
            let l = sh.junction(Side::Left, lam).unwrap();
            let r = sh.junction(Side::Right, lam).unwrap();
            assert!((l.y - r.y).abs() < 1e-8 * (1.0 + l.y.abs()));
            assert!((l.dy + r.dy).abs() < 1e-8 * (1.0 + l.dy.abs()));
        }
    }

    #[test]
    fn left_and_right_agree_under_reflection() {
        let cfg = default_config();
        let mirrored = cfg.reflected();
        let a = Shooter::with_default_steps(&cfg);
        let b = Shooter::with_default_steps(&mirrored);
        for lam in [-30.0, 3.0, 47.0, 410.0] {
            let r = a.junction(Side::Right, lam).unwrap();
            let l = b.junction(Side::Left, lam).unwrap();
            assert!((r.y - l.y).abs() < 1e-10 * (1.0 + r.y.abs()));
            assert!((r.dy + l.dy).abs() < 1e-10 * (1.0 + r.dy.abs()));
        }
    }

    #[test]
    fn ode_residual_is_small() {
        let cfg = default_config();
        let sh = Shooter::with_default_steps(&cfg);
        for lam in [0.5, 80.0, 900.0] {
            for side in [Side::Left, Side::Right] {
                let s = sh.solve(side, lam).unwrap();
                assert!(s.ode_residual(cfg.side(side)) <= 1e-4 * (1.0 + lam));
            }
        }
    }

    #[test]
    fn wronskian_is_constant() {
        let cfg = default_config();
        let sh = Shooter::with_default_steps(&cfg);
        let lam = 37.0;
        for side in [Side::Left, Side::Right] {
            let x0 = if side == Side::Left { -1.0 } else { 1.0 };
            let a = sh.solve(side, lam).unwrap();
            let b = sh.solve_seeded(side, lam, 1.0, 0.3).unwrap();
            let sigma = &cfg.side(side).sigma;
            let w: Vec<f64> = (0..a.grid.len())
                .map(|i| sigma.value(a.grid[i]) * (a.y[i] * b.y_prime[i] - b.y[i] * a.y_prime[i]))
                .collect();
            let w0 = w[if side == Side::Left { 0 } else { w.len() - 1 }];
            assert!((w0.abs() - sigma.value(x0)).abs() < 1e-12);
            let drift = w.iter().map(|v| (v - w0).abs()).fold(0.0, f64::max);
            assert!(drift <= 1e-8, "drift {drift}");
        }
    }

    #[test]
    fn lambda_derivative_closed_form() {
        // d/dλ [sin(√λ)/√λ] = cos(√λ)/(2λ) - sin(√λ)/(2 λ^{3/2})
        let lam: f64 = 7.0;
        let s = lam.sqrt();
        let oracle = s.cos() / (2.0 * lam) - s.sin() / (2.0 * lam * s);
        let d = shoot_lambda_derivative(lam, Side::Right, &unit(), DEFAULT_STEPS).unwrap();
        assert!((d.junction.y - oracle).abs() < 1e-7);
        assert_eq!(d.y_lambda[d.y_lambda.len() - 1], 0.0);
        assert_eq!(d.y_lambda_prime[d.y_lambda_prime.len() - 1], 0.0);
    }

    #[test]
    fn lambda_derivative_matches_finite_difference() {
        let cfg = default_config();
        let sh = Shooter::with_default_steps(&cfg);
        let h = 1e-5;
        for side in [Side::Left, Side::Right] {
            for lam in [3.0, 55.0, 260.0] {
                let d = sh.lambda_derivative(side, lam).unwrap();
                let p = sh.junction(side, lam + h).unwrap();
                let m = sh.junction(side, lam - h).unwrap();
                assert!(((p.y - m.y) / (2.0 * h) - d.junction.y).abs() < 1e-5);
                assert!(((p.dy - m.dy) / (2.0 * h) - d.junction.dy).abs() < 1e-5 * (1.0 + d.junction.dy.abs()));
            }
        }
    }

    #[test]
    fn negative_lambda_guard() {
        let sh = Shooter::with_default_steps(&unit());
        assert!(matches!(sh.junction(Side::Left, -2e4), Err(Error::NonFiniteState(_))));
        assert!(sh.junction(Side::Left, -1e3).unwrap().y > 0.0);
    }

    #[test]
    fn too_few_steps_rejected() {
        assert!(Shooter::new(&unit(), 32).is_err());
    }

    #[test]
    fn junction_values_vary_continuously() {
        let sh = Shooter::with_default_steps(&default_config());
        let vals: Vec<f64> = (0..200).map(|i| sh.junction(Side::Left, 40.0 + i as f64 * 1e-3).unwrap().y).collect();
        let diffs: Vec<f64> = vals.windows(2).map(|w| (w[1] - w[0]) / 1e-3).collect();
        let scale = diffs.iter().map(|d| d.abs()).fold(0.0, f64::max);
        for w in diffs.windows(2) {
            assert!((w[1] - w[0]).abs() <= 1e-2 * scale);
        }
    }
}
