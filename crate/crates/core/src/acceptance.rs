//! Acceptance suite shared by the `verify` subcommand and the `acceptance`
//! test target. Each criterion is evaluated independently; a numerical error
//! inside one criterion is reported as a failure of that criterion.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coefficients::{default_config, ConfigFile, ProfileSpec, SideSpec, SystemConfig};
use crate::control::{custom_problem, modal_reduction, solve_min_norm, state_from_modal, verify_control};
use crate::error::Result;
use crate::gaps::{classify_indices, default_delta_prime, verify_gap_asymptotics, GapClassification, SetLabel};
use crate::modes::{assemble_modes, orthogonality_matrix, ModeShape};
use crate::numerics::{log_log_slope, trapezoid};
use crate::observability::{random_modal_data, ratio_experiment, ExponentialSum, TraceSetup};
use crate::shooting::Shooter;
use crate::simulator::{simulate, zero_crossing_frequency, Boundary, SimulationParams};
use crate::spectrum::{SpectrumTable, DEFAULT_FUSION_TOL};

/// Seeds, sizes and tolerances of the suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Manifest {
    pub seed: u64,
    pub random_configs: usize,
    pub spectrum_tol: f64,
    pub interlacing_count: usize,
    pub gap_median_factor: f64,
    pub two_step_factor: f64,
    pub weyl_range: (usize, usize),
    pub weyl_tol: f64,
    pub jump_tol: f64,
    pub gram_tol: f64,
    pub mode_count: usize,
    pub exponent_tol: f64,
    pub sim_dx: f64,
    pub frequency_tol: f64,
    pub drift_tol: f64,
    pub trace_modes: usize,
    pub trace_tol: f64,
    pub observe_modes: usize,
    pub trials: usize,
    pub constant_spread: f64,
    pub control_modes: usize,
    pub control_dx: f64,
    pub duhamel_tol: f64,
    pub reduction_factor: f64,
    pub cluster_range: (usize, usize),
    pub cluster_factor: f64,
    /// Margin added to `2(γ₁+γ₂)` for the horizon of criteria 7–9.
    pub horizon_margin: f64,
}

impl Default for Manifest {
    fn default() -> Self {
        Self {
            seed: 20240601,
            random_configs: 5,
            spectrum_tol: 1e-8,
            interlacing_count: 40,
            gap_median_factor: 3.0,
            two_step_factor: 0.3,
            weyl_range: (30, 40),
            weyl_tol: 0.02,
            jump_tol: 1e-6,
            gram_tol: 1e-5,
            mode_count: 12,
            exponent_tol: 0.3,
            sim_dx: 1.0 / 1024.0,
            frequency_tol: 1e-3,
            drift_tol: 1e-4,
            trace_modes: 20,
            trace_tol: 0.02,
            observe_modes: 30,
            trials: 100,
            constant_spread: 1e3,
            control_modes: 16,
            control_dx: 1.0 / 2048.0,
            duhamel_tol: 1e-8,
            reduction_factor: 1e3,
            cluster_range: (10, 30),
            cluster_factor: 3.0,
            horizon_margin: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    /// Measured quantities, in report order.
    pub measured: Vec<(String, String)>,
}

impl CriterionResult {
    fn new(id: usize, name: &'static str) -> Self {
        Self { id, name, passed: true, measured: Vec::new() }
    }

    fn record(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.measured.push((key.into(), value.into()));
    }

    /// Records a gated measurement `value ≤ bound`.
    fn at_most(&mut self, key: &str, value: f64, bound: f64) {
        let ok = value <= bound;
        self.passed &= ok;
        self.record(key, format!("{} (<= {}){}", sci(value), sci(bound), if ok { "" } else { " VIOLATED" }));
    }

    fn at_least(&mut self, key: &str, value: f64, bound: f64) {
        let ok = value >= bound;
        self.passed &= ok;
        self.record(key, format!("{} (>= {}){}", sci(value), sci(bound), if ok { "" } else { " VIOLATED" }));
    }

    fn failed(id: usize, name: &'static str, err: impl std::fmt::Display) -> Self {
        Self { id, name, passed: false, measured: vec![("error".into(), err.to_string())] }
    }

    pub fn line(&self) -> String {
        let detail: Vec<String> = self.measured.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!(
            "criterion {:>2} [{}] {}: {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            detail.join("; ")
        )
    }
}

fn sci(v: f64) -> String {
    format!("{v:.6e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct AcceptanceReport {
    pub seed: u64,
    pub results: Vec<CriterionResult>,
}

impl AcceptanceReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn render(&self) -> String {
        let mut s = format!("# acceptance report, seed {}\n", self.seed);
        for r in &self.results {
            let _ = writeln!(s, "{}", r.line());
        }
        let passed = self.results.iter().filter(|r| r.passed).count();
        let _ = writeln!(s, "# {passed}/{} criteria passed", self.results.len());
        s
    }
}

/// Smooth positive, non-symmetric coefficients drawn from `(seed, index)`.
pub fn random_config(seed: u64, index: usize) -> Result<SystemConfig> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1000 + index as u64);
    let mut poly = |base: (f64, f64), tilt: f64| {
        let c0 = rng.random_range(base.0..base.1);
        let c1 = rng.random_range(-tilt..tilt);
        let c2 = rng.random_range(-tilt..tilt);
        ProfileSpec::Poly { coeffs: vec![c0, c1, c2] }
    };
    let left = SideSpec { rho: poly((0.8, 2.0), 0.3), sigma: poly((0.8, 2.0), 0.3), q: poly((0.6, 2.0), 0.25) };
    let right = SideSpec { rho: poly((0.8, 2.0), 0.3), sigma: poly((0.8, 2.0), 0.3), q: poly((0.6, 2.0), 0.25) };
    let mass = rng.random_range(0.5..2.0);
    SystemConfig::from_file_spec(&ConfigFile { mass, left, right })
}

/// Root of `2cot s = s` in `(kπ, (k+1)π)`, by bisection on `2cos s - s sin s`.
pub fn cot_root(k: usize) -> f64 {
    let g = |s: f64| 2.0 * s.cos() - s * s.sin();
    let (mut a, mut b) = (k as f64 * PI, (k + 1) as f64 * PI);
    let ga = g(a.max(1e-300));
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (g(m) > 0.0) == (ga > 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

fn run_criterion(id: usize, name: &'static str, f: impl FnOnce(&mut CriterionResult) -> Result<()>) -> CriterionResult {
    let mut r = CriterionResult::new(id, name);
    match f(&mut r) {
        Ok(()) => r,
        Err(e) => CriterionResult::failed(id, name, e),
    }
}

/// Spectra and classifications shared by several criteria.
struct Fixture {
    shooter: Shooter,
    table: SpectrumTable,
    classes: GapClassification,
}

impl Fixture {
    fn new(config: &SystemConfig, count: usize) -> Result<Self> {
        let shooter = Shooter::with_default_steps(config);
        let table = SpectrumTable::build_with(&shooter, count, DEFAULT_FUSION_TOL)?;
        let classes = classify_indices(&table, default_delta_prime(&table))?;
        Ok(Self { shooter, table, classes })
    }
}

pub fn criterion_spectrum_oracle(m: &Manifest) -> CriterionResult {
    run_criterion(1, "closed-form spectrum oracle (unit coefficients, M=1)", |r| {
        let t = SpectrumTable::build(20, &SystemConfig::unit(1.0))?;
        let mut lam_err = 0.0f64;
        let mut prime_err = 0.0f64;
        for n in 1..=20usize {
            let expect = if n % 2 == 0 { (n as f64 * PI / 2.0).powi(2) } else { cot_root((n - 1) / 2).powi(2) };
            lam_err = lam_err.max((t.lambda[n - 1] - expect).abs() / expect);
            let prime = (n as f64 * PI / 2.0).powi(2);
            prime_err = prime_err.max((t.lambda_prime[n - 1] - prime).abs() / prime);
        }
        r.at_most("max_rel_err_lambda", lam_err, m.spectrum_tol);
        r.at_most("max_rel_err_lambda_prime", prime_err, m.spectrum_tol);
        Ok(())
    })
}

/// Violations of `μₙ < λₙ₊₁ < λ′ₙ₊₁ < μₙ₊₁` for `n = 1..count`; a fused
/// `μₙ = μₙ₊₁` forces equality throughout.
pub fn interlacing_violations(t: &SpectrumTable, count: usize) -> usize {
    (1..=count)
        .filter(|&n| {
            let (mu0, mu1) = (&t.mu[n - 1], &t.mu[n]);
            let (l, lp) = (t.lambda[n], t.lambda_prime[n]);
            if mu0.fused_with_next {
                let tol = 1e-9 * mu0.value.abs().max(1.0);
                !((l - mu0.value).abs() <= tol && (lp - mu0.value).abs() <= tol)
            } else {
                !(mu0.value < l && l < lp && lp < mu1.value)
            }
        })
        .count()
}

fn random_tables(m: &Manifest, count: usize) -> Result<Vec<SpectrumTable>> {
    (0..m.random_configs).map(|i| SpectrumTable::build(count, &random_config(m.seed, i)?)).collect()
}

pub fn criterion_interlacing(m: &Manifest) -> CriterionResult {
    run_criterion(2, "interlacing on randomized non-symmetric configs", |r| {
        let tables = random_tables(m, m.interlacing_count + 1)?;
        let counts: Vec<usize> = tables.iter().map(|t| interlacing_violations(t, m.interlacing_count)).collect();
        let total: usize = counts.iter().sum();
        r.record("configs", tables.len().to_string());
        r.record("violations_per_config", format!("{counts:?}"));
        r.at_most("total_violations", total as f64, 0.0);
        Ok(())
    })
}

pub fn criterion_gap_trends(m: &Manifest, config: &SystemConfig) -> CriterionResult {
    run_criterion(3, "gap trends: bounded n·δ over A, uniform two-step gap", |r| {
        let fx = Fixture::new(config, 42)?;
        let report = verify_gap_asymptotics(&fx.table, &fx.classes);
        let in_range: Vec<f64> = report.n_delta_over_a.iter().filter(|(n, _)| *n <= 40).map(|p| p.1).collect();
        r.record("A_indices", in_range.len().to_string());
        if in_range.is_empty() {
            r.record("note", "no cluster pairs detected");
        } else {
            let med = crate::numerics::median(&in_range);
            let max = in_range.iter().copied().fold(0.0, f64::max);
            r.record("median_n_delta", sci(med));
            r.at_most("max_n_delta", max, m.gap_median_factor * med);
        }
        let s = fx.table.sqrt_lambda();
        let two_step = (0..40).map(|i| s[i + 2] - s[i]).fold(f64::INFINITY, f64::min);
        let bound = m.two_step_factor * PI / (config.gamma1() + config.gamma2());
        let ok = two_step > bound;
        r.passed &= ok;
        r.record("min_two_step_gap", format!("{} (> {}){}", sci(two_step), sci(bound), if ok { "" } else { " VIOLATED" }));
        Ok(())
    })
}

pub fn weyl_deviation(t: &SpectrumTable, range: (usize, usize)) -> f64 {
    let g = t.config().gamma1() + t.config().gamma2();
    (range.0..=range.1).map(|n| (t.lambda[n - 1].sqrt() * g / (n as f64 * PI) - 1.0).abs()).fold(0.0, f64::max)
}

pub fn criterion_weyl(m: &Manifest, config: &SystemConfig) -> CriterionResult {
    run_criterion(4, "Weyl asymptotics", |r| {
        let count = m.weyl_range.1;
        let base = SpectrumTable::build(count, config)?;
        let mut worst = weyl_deviation(&base, m.weyl_range);
        let mut per: Vec<String> = vec![sci(worst)];
        for t in random_tables(m, count)? {
            let d = weyl_deviation(&t, m.weyl_range);
            per.push(sci(d));
            worst = worst.max(d);
        }
        r.record("per_config_max_deviation", format!("[{}]", per.join(", ")));
        r.at_most("max_deviation", worst, m.weyl_tol);
        Ok(())
    })
}

/// Expected power-law exponent of `|φₙ'(1)|` per index group: bounded on
/// `Λ* ∪ B⁺`, `O(1/n)` on `A∖Λ*`, the `A+1` partners and `B⁻`.
fn slope_groups(fx: &Fixture, slopes: &[f64], range: (usize, usize)) -> Vec<(&'static str, f64, Vec<f64>, Vec<f64>)> {
    let mut groups: Vec<(&'static str, f64, Vec<f64>, Vec<f64>)> = vec![
        ("lambda_star_or_B+", 0.0, vec![], vec![]),
        ("A_minus_lambda_star", -1.0, vec![], vec![]),
        ("A+1", -1.0, vec![], vec![]),
        ("B-", -1.0, vec![], vec![]),
    ];
    for n in range.0..=range.1 {
        let g = match fx.classes.labels.get(n - 1) {
            _ if fx.classes.in_lambda(n) => 0,
            Some(SetLabel::BPlus) => 0,
            Some(SetLabel::A) => 1,
            Some(SetLabel::APartner) => 2,
            Some(SetLabel::BMinus) => 3,
            _ => continue,
        };
        groups[g].2.push(n as f64);
        groups[g].3.push(slopes[n - 1].abs());
    }
    groups
}

pub fn criterion_eigenfunctions(m: &Manifest, config: &SystemConfig) -> CriterionResult {
    run_criterion(5, "eigenfunction structure and boundary-slope trends", |r| {
        let fx = Fixture::new(config, 42)?;
        let modes: Vec<ModeShape> = assemble_modes(m.mode_count, &fx.table, &fx.shooter)?;
        let jump = modes.iter().map(|md| md.jump_residual(config)).fold(0.0, f64::max);
        let gram = orthogonality_matrix(&modes, config);
        let off = (0..modes.len())
            .flat_map(|i| (0..modes.len()).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| gram[i][j].abs())
            .fold(0.0, f64::max);
        r.at_most("max_jump_residual", jump, m.jump_tol);
        r.at_most("max_gram_offdiag", off, m.gram_tol);
        let unit = Fixture::new(&SystemConfig::unit(1.0), 42)?;
        let mut randoms = Vec::new();
        for i in 0..m.random_configs {
            randoms.push(Fixture::new(&random_config(m.seed, i)?, 42)?);
        }
        // gated on the configuration under test and the unit configuration
        // (which supplies Λ*); randomized configurations are reported only
        let mut checked = 0;
        let labelled = [("config".to_string(), &fx, true), ("unit".to_string(), &unit, true)]
            .into_iter()
            .chain(randoms.iter().enumerate().map(|(i, f)| (format!("random{i}"), f, false)));
        for (label, f, gated) in labelled {
            let slopes: Vec<f64> = (1..=41).map(|n| crate::modes::boundary_slope(n, &f.table, &f.shooter)).collect::<Result<_>>()?;
            for (name, expect, x, y) in slope_groups(f, &slopes, (10, 40)) {
                if x.len() < 5 {
                    continue;
                }
                let e = log_log_slope(&x, &y);
                if gated {
                    checked += 1;
                    let ok = (e - expect).abs() <= m.exponent_tol;
                    r.passed &= ok;
                    r.record(format!("{label}:{name}_exponent"), format!("{} (expect {expect}±{}){}", sci(e), m.exponent_tol, if ok { "" } else { " VIOLATED" }));
                } else {
                    r.record(format!("{label}:{name}_exponent (not gated)"), sci(e));
                }
            }
        }
        r.record("slope_groups_checked", checked.to_string());
        Ok(())
    })
}

pub fn criterion_simulator(m: &Manifest, config: &SystemConfig) -> CriterionResult {
    run_criterion(6, "simulator fidelity", |r| {
        let cells = (1.0 / m.sim_dx).round() as usize;
        let fx = Fixture::new(config, m.trace_modes.max(8))?;
        let modes = assemble_modes(m.trace_modes, &fx.table, &fx.shooter)?;
        // frequency of modes whose junction value is not small
        let mut freq_err = 0.0f64;
        let mut tested = Vec::new();
        for md in modes.iter().take(6) {
            let peak = md.phi_left.iter().chain(&md.phi_right).fold(0.0f64, |a, v| a.max(v.abs()));
            if md.phi0.abs() < 0.1 * peak {
                continue;
            }
            let w0 = crate::modes::SampledState::from_modes(cells, std::slice::from_ref(md), &[1.0]);
            let params = SimulationParams::new(m.sim_dx, None, 10.0);
            let run = simulate(config, &w0, &crate::modes::SampledState::zero(cells), Boundary::Fixed, &params)?;
            let w = zero_crossing_frequency(&run.t, &run.junction).unwrap_or(0.0);
            freq_err = freq_err.max((w - md.lambda.sqrt()).abs() / md.lambda.sqrt());
            tested.push(md.n);
        }
        r.record("frequency_modes", format!("{tested:?}"));
        r.at_most("max_rel_frequency_err", freq_err, m.frequency_tol);

        let data = random_modal_data(m.trace_modes, m.seed, 0);
        let (w0, w1) = state_from_modal(&data, &modes, cells);
        let t_end = config.critical_time();
        let run = simulate(config, &w0, &w1, Boundary::Fixed, &SimulationParams::new(m.sim_dx, None, t_end))?;
        r.at_most("energy_drift", run.energy_drift(), m.drift_tol);

        let slopes: Vec<f64> = modes.iter().map(|md| md.slope1).collect();
        let sum = ExponentialSum::from_modal(&data, &slopes, &fx.table)?;
        let series: Vec<f64> = run.t.iter().map(|&t| sum.eval(t).re).collect();
        let diff: Vec<f64> = series.iter().zip(&run.trace).map(|(a, b)| (a - b).powi(2)).collect();
        let sq: Vec<f64> = series.iter().map(|a| a * a).collect();
        let rel = (trapezoid(&diff, run.dt) / trapezoid(&sq, run.dt)).sqrt();
        r.at_most("trace_rel_l2_err", rel, m.trace_tol);
        Ok(())
    })
}

pub fn criterion_observability(m: &Manifest, config: &SystemConfig) -> CriterionResult {
    run_criterion(7, "observability constants", |r| {
        let setup = TraceSetup::new(config, m.observe_modes)?;
        let t_end = config.critical_time() + m.horizon_margin;
        let exp = ratio_experiment(&setup, t_end, m.observe_modes, m.trials, m.seed)?;
        r.record("T", sci(t_end));
        r.record("trials", exp.trials.len().to_string());
        r.record("c_min", sci(exp.c_min));
        r.record("c_max", sci(exp.c_max));
        let ok = exp.c_min > 0.0;
        r.passed &= ok;
        r.at_most("c_max_over_c_min", exp.c_max / exp.c_min, m.constant_spread);
        let short_t = 0.75 * 2.0 * config.gamma1();
        let short = ratio_experiment(&setup, short_t, m.observe_modes, m.trials, m.seed)?;
        r.record(
            "short_horizon (not gated)",
            format!("T={} c_min={} drop={}", sci(short_t), sci(short.c_min), sci(exp.c_min / short.c_min)),
        );
        Ok(())
    })
}

pub fn criterion_control(m: &Manifest, config: &SystemConfig) -> CriterionResult {
    run_criterion(8, "control to rest", |r| {
        let fx = Fixture::new(config, m.control_modes)?;
        let modes = assemble_modes(m.control_modes, &fx.table, &fx.shooter)?;
        let data = random_modal_data(m.control_modes, m.seed, 0);
        let t_end = config.critical_time() + m.horizon_margin;
        let problem = modal_reduction(&data, &modes, config, t_end)?;
        let solution = solve_min_norm(&problem, None)?;
        let report = verify_control(&problem, &solution, &data, &modes, config, m.control_dx)?;
        r.record("condition", sci(report.condition));
        r.record("control_norm", sci(report.control_norm));
        r.at_most("duhamel_residual", report.duhamel_residual, m.duhamel_tol);
        r.at_least("fd_energy_reduction", 1.0 / report.simulator_residual, m.reduction_factor);
        r.record("final_mass_state (not gated)", sci(report.final_mass_state));
        Ok(())
    })
}

pub fn criterion_cluster_cost(m: &Manifest) -> CriterionResult {
    run_criterion(9, "cluster-cost signature ‖p‖ ~ 1/δ", |r| {
        let cfg = SystemConfig::unit(1.0);
        let fx = Fixture::new(&cfg, m.cluster_range.1 + 2)?;
        let t_end = cfg.critical_time() + m.horizon_margin;
        let one = Complex64::new(1.0, 0.0);
        let mut products = Vec::new();
        for n in m.cluster_range.0..=m.cluster_range.1 {
            if fx.classes.labels.get(n - 1) != Some(&SetLabel::A) {
                continue;
            }
            let (w1, w2) = (fx.table.lambda[n - 1].sqrt(), fx.table.lambda[n].sqrt());
            let problem = custom_problem(vec![-w2, -w1, w1, w2], vec![-one, one, one, -one], t_end);
            let sol = solve_min_norm(&problem, None)?;
            products.push(sol.signal.l2_norm * (w2 - w1));
        }
        if products.is_empty() {
            r.passed = false;
            r.record("error", "no cluster pairs in range");
            return Ok(());
        }
        let hi = products.iter().copied().fold(0.0, f64::max);
        let lo = products.iter().copied().fold(f64::INFINITY, f64::min);
        r.record("pairs", products.len().to_string());
        r.record("norm_times_delta_range", format!("[{}, {}]", sci(lo), sci(hi)));
        r.at_most("spread", hi / lo, m.cluster_factor);
        Ok(())
    })
}

fn criteria_one_to_nine(m: &Manifest, config: &SystemConfig) -> Vec<CriterionResult> {
    vec![
        criterion_spectrum_oracle(m),
        criterion_interlacing(m),
        criterion_gap_trends(m, config),
        criterion_weyl(m, config),
        criterion_eigenfunctions(m, config),
        criterion_simulator(m, config),
        criterion_observability(m, config),
        criterion_control(m, config),
        criterion_cluster_cost(m),
    ]
}

/// Full suite on `config`; criterion 10 re-runs 1–9 and compares the
/// rendered lines byte for byte.
pub fn run_suite(m: &Manifest, config: &SystemConfig) -> AcceptanceReport {
    let first = criteria_one_to_nine(m, config);
    let second = criteria_one_to_nine(m, config);
    let render = |v: &[CriterionResult]| v.iter().map(CriterionResult::line).collect::<Vec<_>>().join("\n");
    let identical = render(&first) == render(&second);
    let mut c10 = CriterionResult::new(10, "reproducibility (second run, same seed)");
    c10.passed = identical;
    c10.record("identical", identical.to_string());
    let mut results = first;
    results.push(c10);
    AcceptanceReport { seed: m.seed, results }
}

pub fn run_default() -> AcceptanceReport {
    run_suite(&Manifest::default(), &default_config())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::brent;

    #[test]
    fn cot_root_satisfies_equation() {
        for k in 0..10 {
            let s = cot_root(k);
            assert!((2.0 * s.cos() / s.sin() - s).abs() < 1e-9 * s.max(1.0));
            assert!(s > k as f64 * PI && s < (k + 1) as f64 * PI);
        }
        // an independent root finder agrees
        let s = brent(|s| Ok(2.0 / s.tan() - s), 0.5, 1.5, 1e-15, 1e-15, 200).unwrap();
        assert!((s - cot_root(0)).abs() < 1e-12);
    }

    #[test]
    fn random_configs_are_valid_and_distinct() {
        let a = random_config(1, 0).unwrap();
        let b = random_config(1, 1).unwrap();
        assert_ne!(a.gamma1(), b.gamma1());
        assert_eq!(random_config(1, 0).unwrap().gamma2(), a.gamma2());
        assert!(a.mass() > 0.0);
    }

    #[test]
    fn failing_measurement_flips_verdict() {
        let mut r = CriterionResult::new(0, "probe");
        r.at_most("x", 1.0, 2.0);
        assert!(r.passed);
        r.at_most("y", 3.0, 2.0);
        assert!(!r.passed);
        assert!(r.line().contains("[FAIL]"));
    }
}
