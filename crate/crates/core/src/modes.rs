//! Eigenfunctions of the coupled problem, their energy norms, modal
//! coordinates of initial states, and the asymmetric norm built on the
//! boundary slopes `φₙ'(1)`.
//!
//! Modes keep the un-normalized representation produced from the shooting
//! solutions. For a fused `Γ*` eigenvalue the mode vanishes at the mass and is
//! `σ₂(0)ṽₓ(0)·ũ` on the left, `σ₁(0)ũₓ(0)·ṽ` on the right; otherwise it is
//! `√λ·ṽ(0)·ũ` on the left and `√λ·ũ(0)·ṽ` on the right.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::coefficients::{Side, SystemConfig};
use crate::error::{Error, Result};
use crate::gaps::{GapClassification, SetLabel};
use crate::numerics::simpson_weights;
use crate::shooting::{Shooter, SideSolution};
use crate::spectrum::SpectrumTable;

/// Relative junction value (against the sup of the side solution) below
/// which a shooting solution counts as vanishing at the mass.
const VANISHING_JUNCTION: f64 = 1e-5;
const JUMP_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `λₙ ∈ Γ*`: the mode vanishes at the junction.
    Lambda,
    Generic,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Lambda => "lambda",
            Branch::Generic => "generic",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ModeShape {
    pub n: usize,
    pub lambda: f64,
    pub branch: Branch,
    pub x_left: Vec<f64>,
    pub phi_left: Vec<f64>,
    pub dphi_left: Vec<f64>,
    pub x_right: Vec<f64>,
    pub phi_right: Vec<f64>,
    pub dphi_right: Vec<f64>,
    /// `φₙ(0)`
    pub phi0: f64,
    /// `φₙ'(1)`
    pub slope1: f64,
    /// `∫|φₙ'|²` over both strings.
    pub norm_w: f64,
    /// `∫ρ|φₙ|² + M|φₙ(0)|²`.
    pub norm_h0: f64,
}

/// Cubic Hermite interpolation on a uniform grid from values and slopes.
fn hermite(xs: &[f64], ys: &[f64], ds: &[f64], x: f64) -> (f64, f64) {
    let n = xs.len() - 1;
    let h = (xs[n] - xs[0]) / n as f64;
    let i = (((x - xs[0]) / h).floor().max(0.0) as usize).min(n - 1);
    let t = (x - xs[i]) / h;
    let (y0, y1, d0, d1) = (ys[i], ys[i + 1], ds[i] * h, ds[i + 1] * h);
    let t2 = t * t;
    let t3 = t2 * t;
    let v = (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * d0 + (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * d1;
    let dv = ((6.0 * t2 - 6.0 * t) * y0 + (3.0 * t2 - 4.0 * t + 1.0) * d0 + (-6.0 * t2 + 6.0 * t) * y1 + (3.0 * t2 - 2.0 * t) * d1) / h;
    (v, dv)
}

impl ModeShape {
    /// `φₙ(x)` on `[-1, 1]`; at `x = 0` both sides agree.
    pub fn value(&self, x: f64) -> f64 {
        if x <= 0.0 {
            hermite(&self.x_left, &self.phi_left, &self.dphi_left, x).0
        } else {
            hermite(&self.x_right, &self.phi_right, &self.dphi_right, x).0
        }
    }

    /// `φₙ'(x)`, one-sided from the left at `x = 0`.
    pub fn derivative(&self, x: f64) -> f64 {
        if x <= 0.0 {
            hermite(&self.x_left, &self.phi_left, &self.dphi_left, x).1
        } else {
            hermite(&self.x_right, &self.phi_right, &self.dphi_right, x).1
        }
    }

    pub fn step(&self) -> f64 {
        self.x_left[1] - self.x_left[0]
    }

    /// `(σ₁(0)φ'(0⁻) - σ₂(0)φ'(0⁺) - λMφ(0))` relative to the size of its
    /// terms.
    pub fn jump_residual(&self, config: &SystemConfig) -> f64 {
        let a = config.left().sigma.value(0.0) * self.dphi_left[self.dphi_left.len() - 1];
        let b = config.right().sigma.value(0.0) * self.dphi_right[0];
        let c = self.lambda * config.mass() * self.phi0;
        (a - b - c).abs() / (a.abs() + b.abs() + c.abs()).max(f64::MIN_POSITIVE)
    }

    /// Mismatch of the two traces at the junction relative to `sup|φ|`.
    pub fn continuity_residual(&self) -> f64 {
        let scale = self.phi_left.iter().chain(&self.phi_right).fold(0.0f64, |m, v| m.max(v.abs()));
        (self.phi_left[self.phi_left.len() - 1] - self.phi_right[0]).abs() / scale
    }

    /// `(∫σφ'² + qφ²) / normH0`, which equals `λₙ` for an exact mode.
    pub fn rayleigh_quotient(&self, config: &SystemConfig) -> f64 {
        let h = self.step();
        let w = simpson_weights(self.x_left.len() - 1, h);
        let mut top = 0.0;
        for (side, xs, phi, dphi) in [
            (config.left(), &self.x_left, &self.phi_left, &self.dphi_left),
            (config.right(), &self.x_right, &self.phi_right, &self.dphi_right),
        ] {
            for i in 0..xs.len() {
                let x = xs[i];
                top += w[i] * (side.sigma.value(x) * dphi[i] * dphi[i] + side.q.value(x) * phi[i] * phi[i]);
            }
        }
        top / self.norm_h0
    }

    /// `φ'(1)` read off the sampled derivative.
    pub fn sampled_slope(&self) -> f64 {
        self.dphi_right[self.dphi_right.len() - 1]
    }

    /// `(x, φ, φ')` rows over `[-1, 1]`; the junction appears twice, once
    /// with each one-sided derivative.
    pub fn rows(&self) -> Vec<(f64, f64, f64)> {
        let left = self.x_left.iter().zip(&self.phi_left).zip(&self.dphi_left);
        let right = self.x_right.iter().zip(&self.phi_right).zip(&self.dphi_right);
        left.chain(right).map(|((x, p), d)| (*x, *p, *d)).collect()
    }
}

fn sup(values: &[f64]) -> f64 {
    values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// H₀-type weights `ρ·w_simpson` on both side grids of a shooter.
#[derive(Debug, Clone)]
pub struct MassWeights {
    pub left: Vec<f64>,
    pub right: Vec<f64>,
    pub mass: f64,
}

impl MassWeights {
    pub fn new(config: &SystemConfig, n_steps: usize) -> Self {
        let h = 1.0 / n_steps as f64;
        let w = simpson_weights(n_steps, h);
        let left = (0..=n_steps).map(|i| w[i] * config.left().rho.value(-1.0 + i as f64 * h)).collect();
        let right = (0..=n_steps).map(|i| w[i] * config.right().rho.value(i as f64 * h)).collect();
        Self { left, right, mass: config.mass() }
    }

    pub fn inner(&self, a: &ModeShape, b: &ModeShape) -> f64 {
        let l: f64 = self.left.iter().zip(a.phi_left.iter().zip(&b.phi_left)).map(|(w, (x, y))| w * x * y).sum();
        let r: f64 = self.right.iter().zip(a.phi_right.iter().zip(&b.phi_right)).map(|(w, (x, y))| w * x * y).sum();
        l + r + self.mass * a.phi0 * b.phi0
    }
}

fn assemble_from(n: usize, lambda: f64, fused: bool, u: SideSolution, v: SideSolution, config: &SystemConfig) -> Result<ModeShape> {
    let (u0, ux0) = (u.junction.y, u.junction.dy);
    let (v0, vx0) = (v.junction.y, v.junction.dy);
    let u_small = u0.abs() <= VANISHING_JUNCTION * sup(&u.y);
    let v_small = v0.abs() <= VANISHING_JUNCTION * sup(&v.y);
    if fused != (u_small && v_small) {
        return Err(Error::BranchAmbiguity {
            n,
            detail: format!("table tag fused={fused}, junction values u(0)={u0:e}, v(0)={v0:e}"),
        });
    }
    let s1 = config.left().sigma.value(0.0);
    let s2 = config.right().sigma.value(0.0);
    let (branch, cl, cr, phi0, slope1) = if fused {
        (Branch::Lambda, s2 * vx0, s1 * ux0, 0.0, -s1 * ux0)
    } else {
        let s = lambda.sqrt();
        (Branch::Generic, s * v0, s * u0, s * u0 * v0, -s * u0)
    };
    let phi_left: Vec<f64> = u.y.iter().map(|y| cl * y).collect();
    let dphi_left: Vec<f64> = u.y_prime.iter().map(|y| cl * y).collect();
    let phi_right: Vec<f64> = v.y.iter().map(|y| cr * y).collect();
    let dphi_right: Vec<f64> = v.y_prime.iter().map(|y| cr * y).collect();

    let h = u.step();
    let w = simpson_weights(u.grid.len() - 1, h);
    let mut norm_w = 0.0;
    let mut norm_h0 = config.mass() * phi0 * phi0;
    for i in 0..w.len() {
        norm_w += w[i] * (dphi_left[i] * dphi_left[i] + dphi_right[i] * dphi_right[i]);
        norm_h0 += w[i]
            * (config.left().rho.value(u.grid[i]) * phi_left[i] * phi_left[i]
                + config.right().rho.value(v.grid[i]) * phi_right[i] * phi_right[i]);
    }
    let mode = ModeShape {
        n,
        lambda,
        branch,
        x_left: u.grid,
        phi_left,
        dphi_left,
        x_right: v.grid,
        phi_right,
        dphi_right,
        phi0,
        slope1,
        norm_w,
        norm_h0,
    };
    let residual = mode.jump_residual(config);
    if !(residual <= JUMP_TOL) {
        return Err(Error::JumpConditionViolation { n, residual });
    }
    if mode.slope1 == 0.0 {
        return Err(Error::NonFiniteState(format!("mode {n} has a vanishing boundary slope")));
    }
    Ok(mode)
}

/// Mode `n` (1-based) from the spectrum table.
pub fn assemble_mode(n: usize, table: &SpectrumTable, shooter: &Shooter) -> Result<ModeShape> {
    let lambda = table.lambda_at(n)?;
    let (u, v) = rayon::join(|| shooter.solve(Side::Left, lambda), || shooter.solve(Side::Right, lambda));
    assemble_from(n, lambda, table.is_fused(n), u?, v?, shooter.config())
}

/// Modes `1..=count` in parallel.
pub fn assemble_modes(count: usize, table: &SpectrumTable, shooter: &Shooter) -> Result<Vec<ModeShape>> {
    if count > table.len() {
        return Err(Error::IndexOutOfRange(count));
    }
    (1..=count).into_par_iter().map(|n| assemble_mode(n, table, shooter)).collect()
}

/// `φₙ'(1)` straight from the junction values, without sampling the mode.
pub fn boundary_slope(n: usize, table: &SpectrumTable, shooter: &Shooter) -> Result<f64> {
    let lambda = table.lambda_at(n)?;
    let u = shooter.junction(Side::Left, lambda)?;
    Ok(if table.is_fused(n) {
        -shooter.config().left().sigma.value(0.0) * u.dy
    } else {
        -lambda.sqrt() * u.y
    })
}

/// `(normW, normH0)` of an assembled mode.
pub fn energy_norms(mode: &ModeShape) -> (f64, f64) {
    (mode.norm_w, mode.norm_h0)
}

/// H₀ Gram matrix of the modes; off-diagonal entries are divided by the
/// geometric mean of the corresponding diagonal entries.
pub fn orthogonality_matrix(modes: &[ModeShape], config: &SystemConfig) -> Vec<Vec<f64>> {
    if modes.is_empty() {
        return Vec::new();
    }
    let weights = MassWeights::new(config, modes[0].x_left.len() - 1);
    let raw: Vec<Vec<f64>> = modes
        .par_iter()
        .map(|a| modes.iter().map(|b| weights.inner(a, b)).collect())
        .collect();
    (0..modes.len())
        .map(|i| {
            (0..modes.len())
                .map(|j| if i == j { raw[i][i] } else { raw[i][j] / (raw[i][i] * raw[j][j]).sqrt() })
                .collect()
        })
        .collect()
}

/// A state `(u, v, z)` sampled on uniform grids over `[-1, 0]` and `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledState {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub z: f64,
}

impl SampledState {
    pub fn zero(n_per_side: usize) -> Self {
        Self { u: vec![0.0; n_per_side + 1], v: vec![0.0; n_per_side + 1], z: 0.0 }
    }

    /// Samples of `f` with `z = f(0)`.
    pub fn from_fn(n_per_side: usize, f: impl Fn(f64) -> f64) -> Self {
        let h = 1.0 / n_per_side as f64;
        let u = (0..=n_per_side).map(|i| f(-1.0 + i as f64 * h)).collect();
        let v = (0..=n_per_side).map(|i| f(i as f64 * h)).collect();
        Self { u, v, z: f(0.0) }
    }

    /// `Σ cₙ φₙ` on a grid with `n_per_side` intervals per string.
    pub fn from_modes(n_per_side: usize, modes: &[ModeShape], coeffs: &[f64]) -> Self {
        let h = 1.0 / n_per_side as f64;
        let eval = |x: f64| modes.iter().zip(coeffs).map(|(m, c)| c * m.value(x)).sum::<f64>();
        let u = (0..=n_per_side).map(|i| eval(-1.0 + i as f64 * h)).collect();
        let v = (0..=n_per_side).map(|i| eval(i as f64 * h)).collect();
        let z = modes.iter().zip(coeffs).map(|(m, c)| c * m.phi0).sum();
        Self { u, v, z }
    }

    pub fn intervals(&self) -> usize {
        self.u.len() - 1
    }

    /// `⟨self, Φ⟩_{H₀}` with the mode interpolated onto the state grid.
    pub fn h0_pairing(&self, mode: &ModeShape, config: &SystemConfig) -> f64 {
        let n = self.intervals();
        let h = 1.0 / n as f64;
        let w = simpson_weights(n, h);
        let mut acc = config.mass() * self.z * mode.phi0;
        let same_grid = mode.x_left.len() == n + 1;
        for i in 0..=n {
            let xl = -1.0 + i as f64 * h;
            let xr = i as f64 * h;
            let (pl, pr) = if same_grid { (mode.phi_left[i], mode.phi_right[i]) } else { (mode.value(xl), mode.value(xr)) };
            acc += w[i] * (config.left().rho.value(xl) * self.u[i] * pl + config.right().rho.value(xr) * self.v[i] * pr);
        }
        acc
    }

    /// `‖self‖²_{H₀}`.
    pub fn h0_norm_sq(&self, config: &SystemConfig) -> f64 {
        let n = self.intervals();
        let h = 1.0 / n as f64;
        let w = simpson_weights(n, h);
        let mut acc = config.mass() * self.z * self.z;
        for i in 0..=n {
            acc += w[i]
                * (config.left().rho.value(-1.0 + i as f64 * h) * self.u[i] * self.u[i]
                    + config.right().rho.value(i as f64 * h) * self.v[i] * self.v[i]);
        }
        acc
    }

    pub fn compatibility_mismatch(&self) -> f64 {
        let n = self.intervals();
        (self.z - self.u[n]).abs().max((self.z - self.v[0]).abs())
    }

    pub fn sub(&self, other: &SampledState) -> SampledState {
        SampledState {
            u: self.u.iter().zip(&other.u).map(|(a, b)| a - b).collect(),
            v: self.v.iter().zip(&other.v).map(|(a, b)| a - b).collect(),
            z: self.z - other.z,
        }
    }
}

/// Two-sided complex modal coefficients `a_k`, `k ∈ ±{1..N}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalData {
    /// `aₙ` at position `n - 1`.
    pub pos: Vec<Complex64>,
    /// `a₋ₙ` at position `n - 1`.
    pub neg: Vec<Complex64>,
}

impl ModalData {
    pub fn zero(n: usize) -> Self {
        Self { pos: vec![Complex64::new(0.0, 0.0); n], neg: vec![Complex64::new(0.0, 0.0); n] }
    }

    /// `aₙ = (ẽₙ - i f̃ₙ)/2`, `a₋ₙ = (ẽₙ + i f̃ₙ)/2`.
    pub fn from_real(e: &[f64], f: &[f64]) -> Self {
        let pos = e.iter().zip(f).map(|(e, f)| Complex64::new(0.5 * e, -0.5 * f)).collect();
        let neg = e.iter().zip(f).map(|(e, f)| Complex64::new(0.5 * e, 0.5 * f)).collect();
        Self { pos, neg }
    }

    /// Real state with the given positive-side coefficients.
    pub fn conjugate_symmetric(pos: Vec<Complex64>) -> Self {
        let neg = pos.iter().map(|a| a.conj()).collect();
        Self { pos, neg }
    }

    pub fn len(&self) -> usize {
        self.pos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pos.is_empty()
    }

    pub fn get(&self, k: i64) -> Complex64 {
        let n = k.unsigned_abs() as usize;
        let v = if k > 0 { &self.pos } else { &self.neg };
        n.checked_sub(1).and_then(|i| v.get(i)).copied().unwrap_or_default()
    }

    /// Two-sided indices in ascending order: `-N..-1, 1..N`.
    pub fn indices(&self) -> Vec<i64> {
        let n = self.len() as i64;
        (-n..=n).filter(|&k| k != 0).collect()
    }

    /// `(ẽₙ, f̃ₙ)` recovered from the pair `(aₙ, a₋ₙ)`.
    pub fn real_parts(&self) -> (Vec<f64>, Vec<f64>) {
        let e = self.pos.iter().zip(&self.neg).map(|(p, m)| (p + m).re).collect();
        let f = self.pos.iter().zip(&self.neg).map(|(p, m)| (m - p).im).collect();
        (e, f)
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self { pos: self.pos.iter().map(|a| a * s).collect(), neg: self.neg.iter().map(|a| a * s).collect() }
    }

    pub fn is_conjugate_symmetric(&self, tol: f64) -> bool {
        self.pos.iter().zip(&self.neg).all(|(p, m)| (p - m.conj()).norm() <= tol * (1.0 + p.norm()))
    }
}

/// Modal coordinates of the initial state `(w⁰, w¹)` against the modes.
pub fn fourier_coefficients(
    displacement: &SampledState,
    velocity: &SampledState,
    modes: &[ModeShape],
    config: &SystemConfig,
) -> Result<ModalData> {
    for state in [displacement, velocity] {
        let scale = 1.0 + state.u.iter().chain(&state.v).fold(0.0f64, |m, v| m.max(v.abs()));
        let mismatch = state.compatibility_mismatch();
        if mismatch > 1e-8 * scale {
            return Err(Error::CompatibilityViolation { mismatch });
        }
    }
    let (e, f): (Vec<f64>, Vec<f64>) = modes
        .par_iter()
        .map(|m| {
            let e = displacement.h0_pairing(m, config) / m.norm_h0;
            let f = velocity.h0_pairing(m, config) / (m.lambda.sqrt() * m.norm_h0);
            (e, f)
        })
        .unzip();
    Ok(ModalData::from_real(&e, &f))
}

/// Slope-scaled coefficient `ã_k = φ_|k|'(1)·a_k`.
fn scaled(data: &ModalData, slopes: &[f64], k: i64) -> Complex64 {
    let n = k.unsigned_abs() as usize;
    match slopes.get(n - 1) {
        Some(s) => data.get(k) * *s,
        None => Complex64::default(),
    }
}

/// `‖U‖²_Y = Σ_{k∈A} [δ²(|ã_k|²+|ã_{k+1}|²) + |ã_k+ã_{k+1}|²] + Σ_{k∈B}|ã_k|²`
/// over both signs of `k`.
pub fn asymmetric_norm(data: &ModalData, classes: &GapClassification, slopes: &[f64], gaps: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (k, k1) in classes.cluster_pairs() {
        let n = k.unsigned_abs().min(k1.unsigned_abs()) as usize;
        let d = gaps[n - 1];
        let (a, b) = (scaled(data, slopes, k), scaled(data, slopes, k1));
        acc += d * d * (a.norm_sqr() + b.norm_sqr()) + (a + b).norm_sqr();
    }
    for k in classes.separated() {
        acc += scaled(data, slopes, k).norm_sqr();
    }
    acc
}

/// Norm in the Riesz coordinates `(ã_k+ã_{k+1}, δ(ã_{k+1}-ã_k))` of each
/// cluster pair, plus `|ã_k|²` on separated indices.
pub fn riesz_coordinate_norm(data: &ModalData, classes: &GapClassification, slopes: &[f64], gaps: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (k, k1) in classes.cluster_pairs() {
        let n = k.unsigned_abs().min(k1.unsigned_abs()) as usize;
        let d = gaps[n - 1];
        let (a, b) = (scaled(data, slopes, k), scaled(data, slopes, k1));
        acc += (a + b).norm_sqr() + (d * (b - a)).norm_sqr();
    }
    for k in classes.separated() {
        acc += scaled(data, slopes, k).norm_sqr();
    }
    acc
}

/// The vectors `qₙ`, `pₙ` of a cluster pair as coefficients on
/// `(Φ̄ₙ, Φ̄ₙ₊₁)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RieszPair {
    pub n: usize,
    pub delta: f64,
    pub q: (f64, f64),
    pub p: (f64, f64),
}

impl RieszPair {
    /// Coordinates `(ãₙ+ãₙ₊₁, δ(ãₙ₊₁-ãₙ))` of `aₙΦ̄ₙ + aₙ₊₁Φ̄ₙ₊₁`.
    pub fn coordinates(&self, slopes: (f64, f64), a: Complex64, b: Complex64) -> (Complex64, Complex64) {
        let (ta, tb) = (a * slopes.0, b * slopes.1);
        (ta + tb, (tb - ta) * self.delta)
    }

    /// Inverse of [`RieszPair::coordinates`]: the coefficients on
    /// `(Φ̄ₙ, Φ̄ₙ₊₁)` of `c·qₙ + d·pₙ`.
    pub fn expand(&self, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
        (c * self.q.0 + d * self.p.0, c * self.q.1 + d * self.p.1)
    }
}

pub fn riesz_vectors(n: usize, slopes: &[f64], table: &SpectrumTable) -> Result<RieszPair> {
    let (s0, s1) = match (slopes.get(n.wrapping_sub(1)), slopes.get(n)) {
        (Some(a), Some(b)) => (*a, *b),
        _ => return Err(Error::IndexOutOfRange(n)),
    };
    let delta = table.gap(n)?;
    Ok(RieszPair {
        n,
        delta,
        q: (0.5 / s0, 0.5 / s1),
        p: (-0.5 / (delta * s0), 0.5 / (delta * s1)),
    })
}

/// Fit quality of the leading-order WKB mode shapes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticFit {
    pub n: usize,
    pub branch: Branch,
    /// Sup error after the best scale fit, relative to `sup|φₙ|`.
    pub error: f64,
    /// The same with the other branch's formula.
    pub other_branch_error: f64,
}

impl AsymptoticFit {
    pub fn branch_mismatch(&self) -> bool {
        self.other_branch_error < self.error
    }
}

/// Cumulative optical distance `∫√(ρ/σ)` along a uniform grid (trapezoid on
/// a refined grid).
fn cumulative_optical(config: &SystemConfig, side: Side, xs: &[f64]) -> Vec<f64> {
    let c = config.side(side);
    let g = |x: f64| (c.rho.value(x) / c.sigma.value(x)).sqrt();
    let mut out = Vec::with_capacity(xs.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in xs.windows(2) {
        // Simpson on each cell
        let m = 0.5 * (w[0] + w[1]);
        acc += (w[1] - w[0]) / 6.0 * (g(w[0]) + 4.0 * g(m) + g(w[1]));
        out.push(acc);
    }
    out
}

/// Leading-order shape of the given branch on both grids.
fn wkb_shape(mode: &ModeShape, branch: Branch, config: &SystemConfig) -> (Vec<f64>, Vec<f64>) {
    let s = mode.lambda.sqrt();
    let (a1, a2) = config.wkb_constants();
    let (g1, g2) = (config.gamma1(), config.gamma2());
    let l = config.left();
    let r = config.right();
    let rs1 = |x: f64| l.rho.value(x) * l.sigma.value(x);
    let rs2 = |x: f64| r.rho.value(x) * r.sigma.value(x);
    let theta1 = cumulative_optical(config, Side::Left, &mode.x_left);
    // θ₂(x) = ∫_x^1, measured from the right end
    let run = cumulative_optical(config, Side::Right, &mode.x_right);
    let total = run[run.len() - 1];
    let theta2: Vec<f64> = run.iter().map(|t| total - t).collect();
    let (fl, fr): (f64, f64) = match branch {
        Branch::Lambda => (-(rs2(0.0)).powf(0.25) * (s * g2).cos(), rs1(0.0).powf(0.25) * (s * g1).cos()),
        Branch::Generic => (rs2(0.0).powf(-0.25) * (s * g2).sin(), rs1(0.0).powf(-0.25) * (s * g1).sin()),
    };
    let left = mode
        .x_left
        .iter()
        .zip(&theta1)
        .map(|(&x, &t)| a1 * a2 * fl * rs1(x).powf(-0.25) * (s * t).sin() / s)
        .collect();
    let right = mode
        .x_right
        .iter()
        .zip(&theta2)
        .map(|(&x, &t)| a1 * a2 * fr * rs2(x).powf(-0.25) * (s * t).sin() / s)
        .collect();
    (left, right)
}

fn fit_error(mode: &ModeShape, shape: &(Vec<f64>, Vec<f64>)) -> f64 {
    let phi: Vec<f64> = mode.phi_left.iter().chain(&mode.phi_right).copied().collect();
    let psi: Vec<f64> = shape.0.iter().chain(&shape.1).copied().collect();
    let pp: f64 = psi.iter().map(|v| v * v).sum();
    if pp == 0.0 {
        return 1.0;
    }
    let c = phi.iter().zip(&psi).map(|(a, b)| a * b).sum::<f64>() / pp;
    let err = phi.iter().zip(&psi).map(|(a, b)| (a - c * b).abs()).fold(0.0, f64::max);
    err / sup(&phi)
}

pub fn verify_mode_asymptotics(modes: &[ModeShape], config: &SystemConfig) -> Vec<AsymptoticFit> {
    modes
        .par_iter()
        .map(|m| {
            let other = match m.branch {
                Branch::Lambda => Branch::Generic,
                Branch::Generic => Branch::Lambda,
            };
            AsymptoticFit {
                n: m.n,
                branch: m.branch,
                error: fit_error(m, &wkb_shape(m, m.branch, config)),
                other_branch_error: fit_error(m, &wkb_shape(m, other, config)),
            }
        })
        .collect()
}

/// Indices from `range` whose label satisfies `pick`.
pub fn indices_with(classes: &GapClassification, range: std::ops::RangeInclusive<usize>, pick: impl Fn(SetLabel, usize) -> bool) -> Vec<usize> {
    range.filter(|&n| classes.labels.get(n - 1).is_some_and(|&l| pick(l, n))).collect()
}
