//! Boundary trace `vₓ(1,t) = Σ a_k φ_|k|'(1) e^{iω_k t}` of free solutions,
//! its L² energy over `[0,T]`, and empirical observability constants against
//! the asymmetric norm.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::coefficients::SystemConfig;
use crate::error::{Error, Result};
use crate::gaps::{classify_indices, counting_density, default_delta_prime, GapClassification};
use crate::modes::{asymmetric_norm, boundary_slope, ModalData};
use crate::numerics::trapezoid;
use crate::shooting::Shooter;
use crate::spectrum::{SpectrumTable, DEFAULT_FUSION_TOL};

/// Minimum number of trace samples per shortest period.
pub const SAMPLES_PER_PERIOD: usize = 40;

/// A finite sum `Σ c_k e^{iω_k t}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentialSum {
    pub indices: Vec<i64>,
    pub frequencies: Vec<f64>,
    pub amplitudes: Vec<Complex64>,
}

impl ExponentialSum {
    /// Trace series of modal data: `c_k = a_k φ_|k|'(1)`, `ω_k = sign(k)√λ_|k|`.
    pub fn from_modal(data: &ModalData, slopes: &[f64], table: &SpectrumTable) -> Result<Self> {
        let mut indices = Vec::new();
        let mut frequencies = Vec::new();
        let mut amplitudes = Vec::new();
        for k in data.indices() {
            let a = data.get(k);
            if a == Complex64::default() {
                continue;
            }
            let n = k.unsigned_abs() as usize;
            let slope = *slopes.get(n - 1).ok_or(Error::IndexOutOfRange(n))?;
            indices.push(k);
            frequencies.push(table.omega(k)?);
            amplitudes.push(a * slope);
        }
        Ok(Self { indices, frequencies, amplitudes })
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        self.frequencies
            .iter()
            .zip(&self.amplitudes)
            .map(|(w, c)| c * Complex64::from_polar(1.0, w * t))
            .sum()
    }

    pub fn max_frequency(&self) -> f64 {
        self.frequencies.iter().fold(0.0, |m, w| m.max(w.abs()))
    }

    /// Samples on `samples` uniform intervals of `[0, T]`.
    pub fn sample(&self, t_end: f64, samples: usize) -> (Vec<f64>, Vec<Complex64>) {
        let dt = t_end / samples as f64;
        let ts: Vec<f64> = (0..=samples).map(|i| i as f64 * dt).collect();
        let vals = ts.par_iter().map(|&t| self.eval(t)).collect();
        (ts, vals)
    }

    /// `∫₀ᵀ |Σ c_k e^{iω_k t}|² dt` from the closed-form cross terms.
    pub fn energy_closed_form(&self, t_end: f64) -> f64 {
        let mut acc = Complex64::default();
        for (wj, cj) in self.frequencies.iter().zip(&self.amplitudes) {
            for (wk, ck) in self.frequencies.iter().zip(&self.amplitudes) {
                acc += cj * ck.conj() * exp_integral(wj - wk, t_end);
            }
        }
        acc.re
    }

    /// The sum with every amplitude multiplied by `e^{iω_k τ}`, i.e. the
    /// signal shifted by `τ` in time.
    pub fn shifted(&self, tau: f64) -> Self {
        let amplitudes =
            self.frequencies.iter().zip(&self.amplitudes).map(|(w, c)| c * Complex64::from_polar(1.0, w * tau)).collect();
        Self { amplitudes, ..self.clone() }
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self { amplitudes: self.amplitudes.iter().map(|c| c * s).collect(), ..self.clone() }
    }

    /// The amplitudes as two-sided modal coefficients (for the bracket sums).
    fn as_modal(&self, len: usize) -> ModalData {
        let mut d = ModalData::zero(len);
        for (k, c) in self.indices.iter().zip(&self.amplitudes) {
            let n = k.unsigned_abs() as usize - 1;
            if *k > 0 {
                d.pos[n] = *c;
            } else {
                d.neg[n] = *c;
            }
        }
        d
    }
}

/// `∫₀ᵀ e^{idt} dt = T e^{idT/2} sinc(dT/2)`.
pub fn exp_integral(d: f64, t_end: f64) -> Complex64 {
    let half = 0.5 * d * t_end;
    let sinc = if half.abs() < 1e-8 { 1.0 - half * half / 6.0 } else { half.sin() / half };
    Complex64::from_polar(t_end * sinc, half)
}

pub fn required_samples(t_end: f64, omega_max: f64) -> usize {
    ((SAMPLES_PER_PERIOD as f64 * t_end * omega_max / (2.0 * PI)).ceil() as usize).max(SAMPLES_PER_PERIOD)
}

/// Sampled trace and its trapezoid energy.
#[derive(Debug, Clone)]
pub struct TraceRecord {
    pub t: Vec<f64>,
    pub values: Vec<Complex64>,
    pub integral: f64,
}

pub fn boundary_trace(
    data: &ModalData,
    slopes: &[f64],
    table: &SpectrumTable,
    t_end: f64,
    samples: usize,
) -> Result<(ExponentialSum, TraceRecord)> {
    if !(t_end > 0.0) {
        return Err(Error::InvalidConfig(format!("time horizon must be positive, got {t_end}")));
    }
    let sum = ExponentialSum::from_modal(data, slopes, table)?;
    let needed = required_samples(t_end, sum.max_frequency());
    if samples < needed {
        return Err(Error::UnderResolvedTrace { samples, needed });
    }
    let (t, values) = sum.sample(t_end, samples);
    let integral = trapezoid(&values.iter().map(|v| v.norm_sqr()).collect::<Vec<_>>(), t_end / samples as f64);
    Ok((sum, TraceRecord { t, values, integral }))
}

/// `(S, ∫₀ᵀ|Σ|², S)` where `S` is the divided-difference bracket sum over
/// the amplitudes.
pub fn ingham_sandwich(sum: &ExponentialSum, classes: &GapClassification, table: &SpectrumTable, t_end: f64) -> Result<(f64, f64, f64)> {
    let critical = table.config().critical_time();
    if t_end <= critical {
        return Err(Error::TimeHorizonTooShort { t: t_end, critical });
    }
    let s = bracket_sum(sum, classes, table);
    Ok((s, sum.energy_closed_form(t_end), s))
}

fn bracket_sum(sum: &ExponentialSum, classes: &GapClassification, table: &SpectrumTable) -> f64 {
    let ones = vec![1.0; table.len()];
    asymmetric_norm(&sum.as_modal(table.len()), classes, &ones, &table.gaps)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialResult {
    pub trial: usize,
    pub integral: f64,
    pub y_norm: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone)]
pub struct ObservabilityExperiment {
    pub t_end: f64,
    pub n_modes: usize,
    pub seed: u64,
    pub delta_prime: f64,
    pub d_plus_estimate: f64,
    pub trials: Vec<TrialResult>,
    pub c_min: f64,
    pub c_max: f64,
}

/// Spectrum, classification and slopes shared by the trace experiments.
#[derive(Debug, Clone)]
pub struct TraceSetup {
    pub table: SpectrumTable,
    pub classes: GapClassification,
    pub slopes: Vec<f64>,
}

impl TraceSetup {
    /// `n_modes` classified modes (the table carries one extra eigenvalue so
    /// the last gap is known).
    pub fn new(config: &SystemConfig, n_modes: usize) -> Result<Self> {
        let sh = Shooter::with_default_steps(config);
        let table = SpectrumTable::build_with(&sh, (n_modes + 1).max(4), DEFAULT_FUSION_TOL)?;
        let classes = classify_indices(&table, default_delta_prime(&table))?;
        let slopes = (1..=table.len()).map(|n| boundary_slope(n, &table, &sh)).collect::<Result<Vec<_>>>()?;
        Ok(Self { table, classes, slopes })
    }
}

/// Random real state: `a_n = (x + iy)/n` with `x, y ~ U[-1, 1]`,
/// `a_{-n} = conj(a_n)`. Each trial draws from its own ChaCha8 stream.
pub fn random_modal_data(n_modes: usize, seed: u64, trial: u64) -> ModalData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let pos = (1..=n_modes)
        .map(|n| Complex64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)) / n as f64)
        .collect();
    ModalData::conjugate_symmetric(pos)
}

/// Ratios `∫₀ᵀ|vₓ(1,t)|²dt / ‖U⁰‖²_Y` over random draws, without the
/// horizon check (used to probe horizons below the critical time).
pub fn ratio_experiment(setup: &TraceSetup, t_end: f64, n_modes: usize, trials: usize, seed: u64) -> Result<ObservabilityExperiment> {
    let results: Vec<TrialResult> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut data = random_modal_data(n_modes, seed, trial as u64);
            data.pos.resize(setup.table.len(), Complex64::default());
            data.neg.resize(setup.table.len(), Complex64::default());
            let sum = ExponentialSum::from_modal(&data, &setup.slopes, &setup.table)?;
            let samples = required_samples(t_end, sum.max_frequency());
            let (_, rec) = boundary_trace(&data, &setup.slopes, &setup.table, t_end, samples)?;
            let y_norm = asymmetric_norm(&data, &setup.classes, &setup.slopes, &setup.table.gaps);
            Ok(TrialResult { trial, integral: rec.integral, y_norm, ratio: rec.integral / y_norm })
        })
        .collect::<Result<_>>()?;
    let c_min = results.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let c_max = results.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let span = setup.table.lambda[setup.table.len() - 1].sqrt() - setup.table.lambda[0].sqrt();
    let (_, d_plus_estimate) = counting_density(&setup.table, span.min(20.0))?;
    Ok(ObservabilityExperiment {
        t_end,
        n_modes,
        seed,
        delta_prime: setup.classes.delta_prime,
        d_plus_estimate,
        trials: results,
        c_min,
        c_max,
    })
}

pub fn empirical_constants(config: &SystemConfig, t_end: f64, n_modes: usize, trials: usize, seed: u64) -> Result<ObservabilityExperiment> {
    let critical = config.critical_time();
    if t_end <= critical {
        return Err(Error::TimeHorizonTooShort { t: t_end, critical });
    }
    if trials == 0 {
        return Err(Error::InvalidConfig("at least one trial is required".into()));
    }
    let setup = TraceSetup::new(config, n_modes)?;
    ratio_experiment(&setup, t_end, n_modes, trials, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::default_config;

    fn unit_setup(n: usize) -> TraceSetup {
        TraceSetup::new(&SystemConfig::unit(1.0), n).unwrap()
    }

    #[test]
    fn single_pair_trace_closed_form() {
        let s = unit_setup(6);
        let n = 3;
        let mut d = ModalData::zero(6);
        d.pos[n - 1] = Complex64::new(0.5, 0.0);
        d.neg[n - 1] = Complex64::new(0.5, 0.0);
        let t_end = 4.7;
        let (_, rec) = boundary_trace(&d, &s.slopes, &s.table, t_end, 20000).unwrap();
        let w = s.table.lambda[n - 1].sqrt();
        let slope = s.slopes[n - 1];
        for (t, v) in rec.t.iter().zip(&rec.values) {
            assert!((v.re - slope * (w * t).cos()).abs() < 1e-12 && v.im.abs() < 1e-12);
        }
        let exact = slope * slope * (t_end / 2.0 + (2.0 * w * t_end).sin() / (4.0 * w));
        assert!((rec.integral - exact).abs() < 1e-6 * exact);
    }

    #[test]
    fn zero_data_gives_zero_trace() {
        let s = unit_setup(4);
        let (_, rec) = boundary_trace(&ModalData::zero(4), &s.slopes, &s.table, 4.5, 100).unwrap();
        assert_eq!(rec.integral, 0.0);
    }

    #[test]
    fn coarse_sampling_rejected() {
        let s = unit_setup(8);
        let d = random_modal_data(8, 1, 0);
        assert!(matches!(
            boundary_trace(&d, &s.slopes, &s.table, 4.5, 50),
            Err(Error::UnderResolvedTrace { .. })
        ));
    }

    #[test]
    fn quadrature_matches_closed_form() {
        let s = TraceSetup::new(&default_config(), 20).unwrap();
        let d = random_modal_data(20, 3, 0);
        let t_end = 4.5;
        let sum = ExponentialSum::from_modal(&d, &s.slopes, &s.table).unwrap();
        let samples = 4 * required_samples(t_end, sum.max_frequency());
        let (_, rec) = boundary_trace(&d, &s.slopes, &s.table, t_end, samples).unwrap();
        let exact = sum.energy_closed_form(t_end);
        assert!((rec.integral - exact).abs() < 1e-4 * exact);
        assert!(rec.values.iter().all(|v| v.im.abs() < 1e-10 * (1.0 + v.norm())));
    }

    #[test]
    fn sandwich_single_separated_mode() {
        let s = unit_setup(6);
        let mut d = ModalData::zero(s.table.len());
        d.pos[0] = Complex64::new(1.0, 0.0);
        let sum = ExponentialSum::from_modal(&d, &s.slopes, &s.table).unwrap();
        let t_end = 4.5;
        let (lo, integral, hi) = ingham_sandwich(&sum, &s.classes, &s.table, t_end).unwrap();
        assert_eq!(lo, hi);
        assert!((lo - s.slopes[0].powi(2)).abs() < 1e-14);
        assert!((integral / lo - t_end).abs() < 1e-12);
    }

    #[test]
    fn sandwich_requires_long_horizon() {
        let s = unit_setup(4);
        let sum = ExponentialSum::from_modal(&random_modal_data(4, 0, 0), &s.slopes, &s.table).unwrap();
        assert!(matches!(ingham_sandwich(&sum, &s.classes, &s.table, 4.0), Err(Error::TimeHorizonTooShort { .. })));
    }

    #[test]
    fn shift_and_scale_properties() {
        let s = TraceSetup::new(&default_config(), 12).unwrap();
        let sum = ExponentialSum::from_modal(&random_modal_data(12, 9, 2), &s.slopes, &s.table).unwrap();
        let t_end = 4.5;
        let (lo, i0, hi) = ingham_sandwich(&sum, &s.classes, &s.table, t_end).unwrap();
        let tau = 0.731;
        let shifted = sum.shifted(tau);
        // integral over [τ, τ+T] of the original = integral over [0, T] of the shifted sum
        let n = 200000;
        let h = t_end / n as f64;
        let direct: Vec<f64> = (0..=n).map(|i| sum.eval(tau + i as f64 * h).norm_sqr()).collect();
        let quad = crate::numerics::simpson(&direct, h);
        assert!((quad - shifted.energy_closed_form(t_end)).abs() < 1e-8 * quad);
        let sc = Complex64::new(1.5, -2.0);
        let (lo3, i3, hi3) = ingham_sandwich(&sum.scaled(sc), &s.classes, &s.table, t_end).unwrap();
        let f = sc.norm_sqr();
        assert!((lo3 - f * lo).abs() < 1e-12 * lo3 && (hi3 - f * hi).abs() < 1e-12 * hi3 && (i3 - f * i0).abs() < 1e-10 * i3);
    }

    #[test]
    fn antisymmetric_cluster_collapse_tracks_bracket() {
        // |1 - e^{iδt}|² ≈ δ²t², so the integral is ≈ δ²T³/3 against a
        // bracket of 2δ²: the ratio approaches T³/6 whatever the gap
        let s = unit_setup(41);
        let t_end: f64 = 4.5;
        let limit = t_end.powi(3) / 6.0;
        for &n in s.classes.a.iter().filter(|&&n| (10..=40).contains(&n)) {
            let mut d = ModalData::zero(s.table.len());
            d.pos[n - 1] = Complex64::new(1.0 / s.slopes[n - 1], 0.0);
            d.pos[n] = Complex64::new(-1.0 / s.slopes[n], 0.0);
            let sum = ExponentialSum::from_modal(&d, &s.slopes, &s.table).unwrap();
            let (lo, integral, _) = ingham_sandwich(&sum, &s.classes, &s.table, t_end).unwrap();
            let r = integral / lo;
            assert!((r / limit - 1.0).abs() < 0.1, "n={n} ratio={r}");
        }
    }

    #[test]
    fn empirical_constants_are_positive_and_reproducible() {
        let cfg = default_config();
        let t_end = cfg.critical_time() + 0.5;
        let a = empirical_constants(&cfg, t_end, 15, 12, 42).unwrap();
        let b = empirical_constants(&cfg, t_end, 15, 12, 42).unwrap();
        assert!(a.c_min > 0.0 && a.c_min <= a.c_max);
        assert_eq!(a.trials, b.trials);
        let one = empirical_constants(&cfg, t_end, 15, 1, 42).unwrap();
        assert_eq!(one.c_min, one.c_max);
        assert!(matches!(empirical_constants(&cfg, 3.0, 15, 12, 42), Err(Error::TimeHorizonTooShort { .. })));
    }

    #[test]
    fn longer_horizon_does_not_lower_the_constant() {
        let cfg = default_config();
        let t_end = cfg.critical_time() + 0.5;
        let a = empirical_constants(&cfg, t_end, 15, 30, 5).unwrap();
        let b = empirical_constants(&cfg, 2.0 * t_end, 15, 30, 5).unwrap();
        assert!(b.c_min >= 0.9 * a.c_min);
    }

    #[test]
    fn separated_only_data_is_classically_bounded() {
        let s = TraceSetup::new(&default_config(), 30).unwrap();
        let t_end = s.table.config().critical_time() + 0.5;
        let mut ratios = Vec::new();
        for trial in 0..20 {
            let mut d = random_modal_data(30, 11, trial);
            d.pos.resize(s.table.len(), Complex64::default());
            d.neg.resize(s.table.len(), Complex64::default());
            for n in 1..=s.table.len() {
                if !s.classes.labels[n - 1].is_b() {
                    d.pos[n - 1] = Complex64::default();
                    d.neg[n - 1] = Complex64::default();
                }
            }
            let sum = ExponentialSum::from_modal(&d, &s.slopes, &s.table).unwrap();
            let amp: f64 = sum.amplitudes.iter().map(|c| c.norm_sqr()).sum();
            ratios.push(sum.energy_closed_form(t_end) / amp);
        }
        let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().copied().fold(0.0, f64::max);
        assert!(lo > 0.1 * t_end && hi < 10.0 * t_end, "{lo} {hi}");
    }
}
