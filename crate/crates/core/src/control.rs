//! Null control by the moment method on a modal truncation.
//!
//! Projecting the controlled system (`v(1,t) = p(t)`) onto `Φₙ` gives
//! `β̈ₙ + λₙβₙ = gₙ p(t)` with `gₙ = -σ₂(1)φₙ'(1)/‖Φₙ‖²_{H₀}`. In the variable
//! `ηₙ = βₙ + iβ̇ₙ/ωₙ` the state reaches rest at `T` exactly when
//! `∫₀ᵀ p(t) e^{-iω_k t} dt = m_k := -2iω_k a_k / g_|k|` for every `k ∈ ±{1..N}`,
//! where `a_k` are the two-sided modal coefficients of the initial state.
//! The minimum-norm solution lies in the span of `e^{iω_k t}` and solves a
//! Hermitian Gram system.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::coefficients::SystemConfig;
use crate::error::{Error, Result};
use crate::modes::{fourier_coefficients, ModalData, ModeShape, SampledState};
use crate::numerics::CubicSpline;
use crate::observability::{exp_integral, required_samples};
use crate::simulator::{simulate, Boundary, SimulationParams};

pub const MAX_CONDITION: f64 = 1e12;
/// Fraction of initial energy outside the truncation above which a warning is
/// attached to the moment problem.
pub const TRUNCATION_WARNING: f64 = 0.01;
const CONTROL_SAMPLES_PER_PERIOD: usize = 64;

#[derive(Debug, Clone)]
pub struct MomentProblem {
    /// Two-sided indices `-N..-1, 1..N`.
    pub indices: Vec<i64>,
    pub frequencies: Vec<f64>,
    pub targets: Vec<Complex64>,
    /// `g_|k|` for every entry.
    pub gains: Vec<f64>,
    pub t_end: f64,
    /// `ηₙ(0)` for `n = 1..N`.
    pub eta0: Vec<Complex64>,
    pub lambda: Vec<f64>,
    pub norm_h0: Vec<f64>,
    /// Share of the initial displacement energy outside the truncation, when
    /// the problem was built from sampled data.
    pub truncation_tail: Option<f64>,
}

impl MomentProblem {
    pub fn n_modes(&self) -> usize {
        self.lambda.len()
    }

    pub fn truncation_warning(&self) -> bool {
        self.truncation_tail.is_some_and(|t| t > TRUNCATION_WARNING)
    }

    /// `Σ λₙ‖Φₙ‖²|ηₙ|²` (twice the modal energy) for the given `η`.
    pub fn modal_energy(&self, eta: &[Complex64]) -> f64 {
        eta.iter().zip(&self.lambda).zip(&self.norm_h0).map(|((e, l), m)| l * m * e.norm_sqr()).sum()
    }
}

/// Moment problem for the first `modes.len()` modes of the given initial
/// modal data.
pub fn modal_reduction(data: &ModalData, modes: &[ModeShape], config: &SystemConfig, t_end: f64) -> Result<MomentProblem> {
    let critical = config.critical_time();
    if t_end <= critical {
        return Err(Error::TimeHorizonTooShort { t: t_end, critical });
    }
    let n = modes.len();
    if n == 0 {
        return Err(Error::InvalidConfig("the truncation needs at least one mode".into()));
    }
    let sigma1 = config.right().sigma.value(1.0);
    let gain: Vec<f64> = modes.iter().map(|m| -sigma1 * m.slope1 / m.norm_h0).collect();
    let omega: Vec<f64> = modes.iter().map(|m| m.lambda.sqrt()).collect();
    let mut indices = Vec::with_capacity(2 * n);
    let mut frequencies = Vec::with_capacity(2 * n);
    let mut targets = Vec::with_capacity(2 * n);
    let mut gains = Vec::with_capacity(2 * n);
    for k in (-(n as i64)..=n as i64).filter(|&k| k != 0) {
        let i = k.unsigned_abs() as usize - 1;
        let w = k.signum() as f64 * omega[i];
        indices.push(k);
        frequencies.push(w);
        targets.push(Complex64::new(0.0, -2.0 * w) * data.get(k) / gain[i]);
        gains.push(gain[i]);
    }
    let eta0 = (1..=n as i64).map(|k| data.get(-k) * 2.0).collect();
    Ok(MomentProblem {
        indices,
        frequencies,
        targets,
        gains,
        t_end,
        eta0,
        lambda: modes.iter().map(|m| m.lambda).collect(),
        norm_h0: modes.iter().map(|m| m.norm_h0).collect(),
        truncation_tail: None,
    })
}

/// As [`modal_reduction`], from sampled initial displacement and velocity.
pub fn modal_reduction_from_state(
    displacement: &SampledState,
    velocity: &SampledState,
    modes: &[ModeShape],
    config: &SystemConfig,
    t_end: f64,
) -> Result<MomentProblem> {
    let data = fourier_coefficients(displacement, velocity, modes, config)?;
    let mut problem = modal_reduction(&data, modes, config, t_end)?;
    let total = displacement.h0_norm_sq(config);
    if total > 0.0 {
        let (e, _) = data.real_parts();
        let captured: f64 = e.iter().zip(modes).map(|(e, m)| e * e * m.norm_h0).sum();
        problem.truncation_tail = Some((1.0 - captured / total).max(0.0));
    }
    Ok(problem)
}

/// A real boundary control sampled uniformly on `[0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlSignal {
    pub t: Vec<f64>,
    pub p: Vec<f64>,
    pub l2_norm: f64,
}

impl ControlSignal {
    pub fn zero(t_end: f64, samples: usize) -> Self {
        let t = (0..=samples).map(|i| t_end * i as f64 / samples as f64).collect();
        Self { t, p: vec![0.0; samples + 1], l2_norm: 0.0 }
    }

    pub fn t_end(&self) -> f64 {
        self.t[self.t.len() - 1]
    }

    /// C¹ cubic interpolant of the samples.
    pub fn interpolant(&self) -> Result<CubicSpline> {
        CubicSpline::new(self.t.clone(), self.p.clone())
    }
}

#[derive(Debug, Clone)]
pub struct ControlSolution {
    pub signal: ControlSignal,
    /// Coefficients `c_k` of `p(t) = Σ c_k e^{iω_k t}`.
    pub coefficients: Vec<Complex64>,
    pub frequencies: Vec<f64>,
    /// Moments `G c` of the synthesized control.
    pub achieved: Vec<Complex64>,
    /// `max_k |achieved_k - m_k|` relative to `max_k |m_k|`.
    pub moment_residual: f64,
    pub condition: f64,
    pub epsilon: f64,
    /// Largest imaginary part of the sampled exponential sum relative to
    /// `‖p‖`.
    pub max_imag: f64,
}

impl ControlSolution {
    pub fn eval(&self, t: f64) -> Complex64 {
        self.frequencies.iter().zip(&self.coefficients).map(|(w, c)| c * Complex64::from_polar(1.0, w * t)).sum()
    }
}

pub fn gram_matrix(frequencies: &[f64], t_end: f64) -> DMatrix<Complex64> {
    let n = frequencies.len();
    let entries: Vec<Complex64> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            // column-major: idx = row + n·col, G[k][j] = ∫ e^{i(ω_j - ω_k)t}
            let (k, j) = (idx % n, idx / n);
            exp_integral(frequencies[j] - frequencies[k], t_end)
        })
        .collect();
    DMatrix::from_vec(n, n, entries)
}

/// Default Tikhonov weight `1e-10·trace(G)/(2N)`.
pub fn default_regularization(problem: &MomentProblem) -> f64 {
    // every diagonal entry of G equals T, so trace(G)/(2N) = T
    1e-10 * problem.t_end
}

pub fn solve_min_norm(problem: &MomentProblem, regularization: Option<f64>) -> Result<ControlSolution> {
    let eps = regularization.unwrap_or_else(|| default_regularization(problem));
    let t_end = problem.t_end;
    let g = gram_matrix(&problem.frequencies, t_end);
    let n = g.nrows();
    let mut reg = g.clone();
    for i in 0..n {
        reg[(i, i)] += Complex64::new(eps, 0.0);
    }
    let eig = reg.clone().symmetric_eigenvalues();
    let (lo, hi) = eig.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned { condition });
    }
    let m = DVector::from_vec(problem.targets.clone());
    let chol = reg.cholesky().ok_or(Error::IllConditioned { condition })?;
    let c = chol.solve(&m);
    let achieved = &g * &c;
    let scale = problem.targets.iter().fold(0.0f64, |a, v| a.max(v.norm()));
    let moment_residual = if scale > 0.0 {
        achieved.iter().zip(&problem.targets).map(|(a, t)| (a - t).norm()).fold(0.0, f64::max) / scale
    } else {
        achieved.iter().fold(0.0f64, |a, v| a.max(v.norm()))
    };
    let l2_sq = (c.adjoint() * &g * &c)[(0, 0)].re.max(0.0);
    let coefficients: Vec<Complex64> = c.iter().copied().collect();
    let omega_max = problem.frequencies.iter().fold(0.0f64, |a, w| a.max(w.abs()));
    let samples = (required_samples(t_end, omega_max) * CONTROL_SAMPLES_PER_PERIOD).div_ceil(40).max(256);
    let mut solution = ControlSolution {
        signal: ControlSignal { t: Vec::new(), p: Vec::new(), l2_norm: l2_sq.sqrt() },
        coefficients,
        frequencies: problem.frequencies.clone(),
        achieved: achieved.iter().copied().collect(),
        moment_residual,
        condition,
        epsilon: eps,
        max_imag: 0.0,
    };
    let ts: Vec<f64> = (0..=samples).map(|i| t_end * i as f64 / samples as f64).collect();
    let vals: Vec<Complex64> = ts.par_iter().map(|&t| solution.eval(t)).collect();
    let norm = solution.signal.l2_norm;
    solution.max_imag =
        if norm > 0.0 { vals.iter().fold(0.0f64, |a, v| a.max(v.im.abs())) / norm } else { 0.0 };
    solution.signal.t = ts;
    solution.signal.p = vals.iter().map(|v| v.re).collect();
    Ok(solution)
}

/// `ηₙ(T)` predicted by Duhamel's formula with the achieved moments.
pub fn duhamel_final_state(problem: &MomentProblem, solution: &ControlSolution) -> Vec<Complex64> {
    let n = problem.n_modes();
    (0..n)
        .map(|i| {
            let w = problem.lambda[i].sqrt();
            let g = problem.gains[n + i];
            // ∫ p e^{iωt} is the achieved moment at index -n
            let plus = solution.achieved[n - 1 - i];
            let phase = Complex64::from_polar(1.0, -w * problem.t_end);
            phase * (problem.eta0[i] + Complex64::new(0.0, g / w) * plus)
        })
        .collect()
}

/// Residual modal energy after the control relative to the initial energy.
pub fn duhamel_residual(problem: &MomentProblem, solution: &ControlSolution) -> f64 {
    let initial = problem.modal_energy(&problem.eta0);
    if initial == 0.0 {
        return 0.0;
    }
    problem.modal_energy(&duhamel_final_state(problem, solution)) / initial
}

/// Residual of an arbitrary signal by direct quadrature of its moments
/// (Simpson on the samples); used for signals that are not exponential sums.
pub fn quadrature_residual(problem: &MomentProblem, signal: &ControlSignal) -> f64 {
    let n = problem.n_modes();
    let h = signal.t[1] - signal.t[0];
    let w = crate::numerics::simpson_weights(signal.t.len() - 1, h);
    let eta: Vec<Complex64> = (0..n)
        .map(|i| {
            let om = problem.lambda[i].sqrt();
            let g = problem.gains[n + i];
            let plus: Complex64 =
                signal.t.iter().zip(&signal.p).zip(&w).map(|((t, p), w)| Complex64::from_polar(w * p, om * t)).sum();
            Complex64::from_polar(1.0, -om * problem.t_end) * (problem.eta0[i] + Complex64::new(0.0, g / om) * plus)
        })
        .collect();
    let initial = problem.modal_energy(&problem.eta0);
    if initial == 0.0 {
        return 0.0;
    }
    problem.modal_energy(&eta) / initial
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControlReport {
    pub duhamel_residual: f64,
    /// Projected energy on the first N modes at `T` relative to `t = 0`,
    /// both measured on the finite-difference run.
    pub simulator_residual: f64,
    /// `(|z(T)| + |zₜ(T)|)` relative to `sup|w⁰| + sup|w¹|`.
    pub final_mass_state: f64,
    pub moment_residual: f64,
    pub condition: f64,
    pub control_norm: f64,
}

/// Energy `½Σλₙ‖Φₙ‖²(ẽₙ² + f̃ₙ²)` of a sampled state on the given modes.
pub fn projected_energy(displacement: &SampledState, velocity: &SampledState, modes: &[ModeShape], config: &SystemConfig) -> Result<f64> {
    let data = fourier_coefficients(displacement, velocity, modes, config)?;
    let (e, f) = data.real_parts();
    Ok(modes.iter().zip(e.iter().zip(&f)).map(|(m, (e, f))| 0.5 * m.lambda * m.norm_h0 * (e * e + f * f)).sum())
}

/// Initial state `Σ ẽₙφₙ`, `Σ ωₙ f̃ₙ φₙ` on a grid with `n_per_side` cells.
pub fn state_from_modal(data: &ModalData, modes: &[ModeShape], n_per_side: usize) -> (SampledState, SampledState) {
    let (e, f) = data.real_parts();
    let vel: Vec<f64> = f.iter().zip(modes).map(|(f, m)| f * m.lambda.sqrt()).collect();
    (
        SampledState::from_modes(n_per_side, modes, &e[..modes.len()]),
        SampledState::from_modes(n_per_side, modes, &vel[..modes.len()]),
    )
}

/// Duhamel and finite-difference verification of a synthesized control.
pub fn verify_control(
    problem: &MomentProblem,
    solution: &ControlSolution,
    data: &ModalData,
    modes: &[ModeShape],
    config: &SystemConfig,
    dx: f64,
) -> Result<ControlReport> {
    let n_per_side = (1.0 / dx).round() as usize;
    let (w0, w1) = state_from_modal(data, modes, n_per_side);
    let params = SimulationParams::new(dx, None, problem.t_end);
    let run = simulate(config, &w0, &w1, Boundary::Controlled(&solution.signal), &params)?;
    let e0 = projected_energy(&w0, &w1, modes, config)?;
    let e1 = projected_energy(&run.final_displacement, &run.final_velocity, modes, config)?;
    let scale = w0.u.iter().chain(&w0.v).fold(0.0f64, |a, v| a.max(v.abs()))
        + w1.u.iter().chain(&w1.v).fold(0.0f64, |a, v| a.max(v.abs()));
    Ok(ControlReport {
        duhamel_residual: duhamel_residual(problem, solution),
        simulator_residual: if e0 > 0.0 { e1 / e0 } else { 0.0 },
        final_mass_state: if scale > 0.0 { (run.final_displacement.z.abs() + run.final_velocity.z.abs()) / scale } else { 0.0 },
        moment_residual: solution.moment_residual,
        condition: solution.condition,
        control_norm: solution.signal.l2_norm,
    })
}

/// Moment problem on an explicit set of frequencies and targets (conjugate
/// pairs expected), for experiments that bypass the modal reduction.
pub fn custom_problem(frequencies: Vec<f64>, targets: Vec<Complex64>, t_end: f64) -> MomentProblem {
    let len = frequencies.len();
    MomentProblem {
        indices: (0..len as i64).collect(),
        frequencies,
        targets,
        gains: vec![1.0; len],
        t_end,
        eta0: Vec::new(),
        lambda: Vec::new(),
        norm_h0: Vec::new(),
        truncation_tail: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::default_config;
    use crate::modes::assemble_modes;
    use crate::observability::random_modal_data;
    use crate::shooting::Shooter;
    use crate::spectrum::{SpectrumTable, DEFAULT_FUSION_TOL};
    use std::f64::consts::PI;

    fn modes_for(cfg: &SystemConfig, n: usize) -> Vec<ModeShape> {
        let sh = Shooter::with_default_steps(cfg);
        let t = SpectrumTable::build_with(&sh, n, DEFAULT_FUSION_TOL).unwrap();
        assemble_modes(n, &t, &sh).unwrap()
    }

    #[test]
    fn single_pair_closed_form() {
        // p = c e^{iωt} + c̄ e^{-iωt}; with T = 4 and ω = π/2, ωT = 2π so the
        // Gram matrix is diagonal: c = m/T
        let w = PI / 2.0;
        let m = Complex64::new(0.3, -0.7);
        let prob = custom_problem(vec![-w, w], vec![m.conj(), m], 4.0);
        let sol = solve_min_norm(&prob, Some(0.0)).unwrap();
        assert!((sol.coefficients[1] - m / 4.0).norm() < 1e-12);
        assert!(sol.moment_residual < 1e-10);
        assert!(sol.max_imag < 1e-10);
    }

    #[test]
    fn zero_targets_give_zero_control() {
        let cfg = default_config();
        let modes = modes_for(&cfg, 6);
        let prob = modal_reduction(&ModalData::zero(6), &modes, &cfg, cfg.critical_time() + 0.5).unwrap();
        let sol = solve_min_norm(&prob, None).unwrap();
        assert!(sol.signal.p.iter().all(|p| *p == 0.0));
        assert_eq!(duhamel_residual(&prob, &sol), 0.0);
    }

    #[test]
    fn eigenmode_data_has_two_targets() {
        let cfg = default_config();
        let modes = modes_for(&cfg, 6);
        let mut d = ModalData::zero(6);
        d.pos[2] = Complex64::new(0.5, 0.0);
        d.neg[2] = Complex64::new(0.5, 0.0);
        let prob = modal_reduction(&d, &modes, &cfg, cfg.critical_time() + 0.5).unwrap();
        let nonzero: Vec<i64> =
            prob.indices.iter().zip(&prob.targets).filter(|(_, t)| t.norm() > 0.0).map(|(k, _)| *k).collect();
        assert_eq!(nonzero, vec![-3, 3]);
        assert!(prob.gains.iter().all(|g| *g != 0.0));
    }

    #[test]
    fn horizon_below_critical_rejected() {
        let cfg = default_config();
        let modes = modes_for(&cfg, 2);
        assert!(matches!(
            modal_reduction(&ModalData::zero(2), &modes, &cfg, 3.9),
            Err(Error::TimeHorizonTooShort { .. })
        ));
    }

    #[test]
    fn control_drives_modes_to_rest() {
        let cfg = default_config();
        let modes = modes_for(&cfg, 16);
        let data = random_modal_data(16, 4, 0);
        let prob = modal_reduction(&data, &modes, &cfg, cfg.critical_time() + 0.5).unwrap();
        let sol = solve_min_norm(&prob, None).unwrap();
        assert!(duhamel_residual(&prob, &sol) <= 1e-8);
        assert!(sol.max_imag < 1e-10);
        assert!(sol.condition < MAX_CONDITION);
        // the interpolated samples reproduce the exact moments closely
        assert!(quadrature_residual(&prob, &sol.signal) < 1e-6);
    }

    #[test]
    fn control_off_leaves_energy() {
        let cfg = default_config();
        let modes = modes_for(&cfg, 8);
        let data = random_modal_data(8, 1, 0);
        let prob = modal_reduction(&data, &modes, &cfg, cfg.critical_time() + 0.5).unwrap();
        let off = ControlSignal::zero(prob.t_end, 4000);
        assert!((quadrature_residual(&prob, &off) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn linearity_in_the_data() {
        let cfg = default_config();
        let modes = modes_for(&cfg, 10);
        let t_end = cfg.critical_time() + 0.5;
        let d1 = random_modal_data(10, 2, 0);
        let d2 = random_modal_data(10, 2, 1);
        let (a, b) = (0.7, -1.3);
        let combo = ModalData {
            pos: d1.pos.iter().zip(&d2.pos).map(|(x, y)| x * a + y * b).collect(),
            neg: d1.neg.iter().zip(&d2.neg).map(|(x, y)| x * a + y * b).collect(),
        };
        let eps = Some(1e-9);
        let s1 = solve_min_norm(&modal_reduction(&d1, &modes, &cfg, t_end).unwrap(), eps).unwrap();
        let s2 = solve_min_norm(&modal_reduction(&d2, &modes, &cfg, t_end).unwrap(), eps).unwrap();
        let s = solve_min_norm(&modal_reduction(&combo, &modes, &cfg, t_end).unwrap(), eps).unwrap();
        let scale = s.signal.p.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..s.signal.p.len() {
            assert!((s.signal.p[i] - a * s1.signal.p[i] - b * s2.signal.p[i]).abs() < 1e-9 * scale);
        }
    }

    #[test]
    fn regularization_path_converges() {
        // Tikhonov shrinks the solution: the norm grows towards the exact
        // minimum-norm value as ε decreases, by ever smaller amounts
        let cfg = default_config();
        let modes = modes_for(&cfg, 8);
        let prob = modal_reduction(&random_modal_data(8, 3, 0), &modes, &cfg, cfg.critical_time() + 0.5).unwrap();
        let sols: Vec<ControlSolution> = [1e-6, 1e-8, 1e-10].iter().map(|e| solve_min_norm(&prob, Some(*e)).unwrap()).collect();
        let norms: Vec<f64> = sols.iter().map(|s| s.signal.l2_norm).collect();
        assert!(norms[0] <= norms[1] * (1.0 + 1e-12) && norms[1] <= norms[2] * (1.0 + 1e-12));
        assert!((norms[2] - norms[1]) <= (norms[1] - norms[0]).abs() + 1e-14 * norms[2]);
        assert!(duhamel_residual(&prob, &sols[2]) <= 1e-8);
        assert!(duhamel_residual(&prob, &sols[2]) <= duhamel_residual(&prob, &sols[0]));
    }

    #[test]
    fn near_coincident_frequencies_are_ill_conditioned() {
        let w = 10.0;
        let freqs = vec![-w - 1e-9, -w, w, w + 1e-9];
        let targets = vec![Complex64::new(1.0, 0.0); 4];
        let prob = custom_problem(freqs, targets, 4.5);
        assert!(matches!(solve_min_norm(&prob, Some(0.0)), Err(Error::IllConditioned { .. })));
    }
}
