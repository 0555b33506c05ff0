//! Dirichlet spectra of the two strings, the characteristic function
//! `F(λ)`, and the interlaced eigenvalue families of the coupled problem.
//!
//! The Dirichlet eigenvalues of either string are the poles of `F`. Between
//! consecutive poles `F` decreases from `+∞` to `-∞`, so each inter-pole
//! interval holds exactly one root of `F` (the regular problem, `λ'`) and one
//! root of `F(λ) = Mλ` (the mass problem, `λ`).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coefficients::{Side, SystemConfig};
use crate::error::{Error, Result};
use crate::numerics::brent;
use crate::shooting::{Junction, Shooter};

/// Relative tolerance below which a left and a right Dirichlet eigenvalue are
/// treated as one element of `Γ*`.
pub const DEFAULT_FUSION_TOL: f64 = 1e-7;
/// Relative shrink of each inter-pole bracket at both ends.
pub const POLE_GUARD: f64 = 1e-6;
/// Left end of the first bracket; `F` is positive there.
pub const LOWEST_BRACKET: f64 = -1e3;

const ROOT_RTOL: f64 = 4.0 * f64::EPSILON;
const ROOT_MAX_ITER: usize = 200;

/// `F(λ)` together with the junction data it was built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacteristicValue {
    pub lambda: f64,
    pub f: f64,
    pub u0: f64,
    pub ux0: f64,
    pub v0: f64,
    pub vx0: f64,
    /// `σ₁(0) ũₓ(0)/ũ(0)`
    pub f1: f64,
    /// `σ₂(0) ṽₓ(0)/ṽ(0)`
    pub f2: f64,
}

/// Side of origin of a merged Dirichlet eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MuTag {
    Left,
    Right,
    /// Shared by both strings (an element of `Γ*`).
    Both,
}

impl MuTag {
    pub fn as_str(self) -> &'static str {
        match self {
            MuTag::Left => "left",
            MuTag::Right => "right",
            MuTag::Both => "both",
        }
    }

    pub fn touches(self, side: Side) -> bool {
        matches!((self, side), (MuTag::Both, _) | (MuTag::Left, Side::Left) | (MuTag::Right, Side::Right))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaggedMu {
    pub value: f64,
    pub tag: MuTag,
    /// First slot of a fused pair: the next entry carries the same value.
    pub fused_with_next: bool,
}

/// Dirichlet eigenvalue with its index on its own string.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirichletEigenvalue {
    pub index: usize,
    pub value: f64,
}

/// Evaluation of the characteristic function through a shared [`Shooter`].
pub fn characteristic(shooter: &Shooter, lambda: f64) -> Result<CharacteristicValue> {
    let l = shooter.junction(Side::Left, lambda)?;
    let r = shooter.junction(Side::Right, lambda)?;
    characteristic_from_junctions(shooter.config(), lambda, l, r)
}

fn characteristic_from_junctions(cfg: &SystemConfig, lambda: f64, l: Junction, r: Junction) -> Result<CharacteristicValue> {
    // ũ(0) and ṽ(0) scale like 1/√λ for large λ; undo that before guarding
    let scale = 1.0 + lambda.abs();
    let den = l.y * r.y;
    if !(den.abs() * scale > 1e-30) {
        return Err(Error::PoleProximity { lambda });
    }
    let s1 = cfg.left().sigma.value(0.0);
    let s2 = cfg.right().sigma.value(0.0);
    let f1 = s1 * l.dy / l.y;
    let f2 = s2 * r.dy / r.y;
    let f = (s1 * r.y * l.dy - s2 * l.y * r.dy) / den;
    Ok(CharacteristicValue { lambda, f, u0: l.y, ux0: l.dy, v0: r.y, vx0: r.dy, f1, f2 })
}

pub fn eval_characteristic(lambda: f64, config: &SystemConfig) -> Result<CharacteristicValue> {
    characteristic(&Shooter::with_default_steps(config), lambda)
}

/// The first `count` Dirichlet eigenvalues of one string.
///
/// The junction value is scanned on a uniform grid in `√λ` (a sixteenth of
/// the asymptotic spacing `π/γ`) and every sign change is polished with
/// Brent's method.
pub fn dirichlet_with(shooter: &Shooter, side: Side, count: usize) -> Result<Vec<DirichletEigenvalue>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let cfg = shooter.config();
    let coeffs = cfg.side(side);
    let gamma = cfg.gamma(side);
    let step = std::f64::consts::PI / (16.0 * gamma);
    // comparison with constant coefficients bounds the search range
    let (a, b) = side.interval();
    let grid: Vec<f64> = (0..=64).map(|i| a + (b - a) * i as f64 / 64.0).collect();
    let rho_min = grid.iter().map(|&x| coeffs.rho.value(x)).fold(f64::INFINITY, f64::min);
    let sigma_max = grid.iter().map(|&x| coeffs.sigma.value(x)).fold(0.0, f64::max);
    let q_max = grid.iter().map(|&x| coeffs.q.value(x)).fold(0.0, f64::max);
    let reach = (count + 2) as f64 * std::f64::consts::PI;
    let s_max = (reach / gamma).max((reach * reach * sigma_max / rho_min + q_max / rho_min).sqrt() * 1.1);

    let junction = |lam: f64| shooter.junction(side, lam).map(|j| j.y);
    let mut roots = Vec::with_capacity(count);
    let mut s_prev = 0.0;
    let mut y_prev = junction(0.0)?;
    while roots.len() < count {
        let s = s_prev + step;
        if s > s_max {
            return Err(Error::RootCountShortfall { side, found: roots.len(), wanted: count });
        }
        let y = junction(s * s)?;
        if y == 0.0 || y.signum() != y_prev.signum() {
            let root = brent(junction, s_prev * s_prev, s * s, 0.0, ROOT_RTOL, ROOT_MAX_ITER)?;
            roots.push(DirichletEigenvalue { index: roots.len() + 1, value: root });
            if y == 0.0 {
                // step past an exact hit so the next sign change is a new root
                s_prev = s + 0.5 * step;
                y_prev = junction(s_prev * s_prev)?;
                continue;
            }
        }
        s_prev = s;
        y_prev = y;
    }
    Ok(roots)
}

pub fn dirichlet_eigenvalues(side: Side, count: usize, config: &SystemConfig) -> Result<Vec<DirichletEigenvalue>> {
    dirichlet_with(&Shooter::with_default_steps(config), side, count)
}

/// Merge two sorted Dirichlet lists. Values within `tol·(1+μ)` of each other
/// across the lists are fused: they keep two consecutive slots (the ordering
/// counts multiplicity) and both are tagged [`MuTag::Both`].
pub fn merge_spectra(left: &[f64], right: &[f64], tol: f64) -> Vec<TaggedMu> {
    let mut out = Vec::with_capacity(left.len() + right.len());
    let (mut i, mut j) = (0, 0);
    let single = |value, tag| TaggedMu { value, tag, fused_with_next: false };
    while i < left.len() || j < right.len() {
        match (left.get(i), right.get(j)) {
            (Some(&l), Some(&r)) if (l - r).abs() <= tol * (1.0 + l.abs().max(r.abs())) => {
                let m = 0.5 * (l + r);
                out.push(TaggedMu { value: m, tag: MuTag::Both, fused_with_next: true });
                out.push(single(m, MuTag::Both));
                i += 1;
                j += 1;
            }
            (Some(&l), Some(&r)) if l < r => {
                out.push(single(l, MuTag::Left));
                i += 1;
            }
            (Some(_), Some(&r)) => {
                out.push(single(r, MuTag::Right));
                j += 1;
            }
            (Some(&l), None) => {
                out.push(single(l, MuTag::Left));
                i += 1;
            }
            (None, Some(&r)) => {
                out.push(single(r, MuTag::Right));
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

/// Roots of `F(λ) - mass·λ`, one per inter-pole interval, for the first
/// `count` slots. `mass = 0` gives the regular eigenvalues `λ'`. Returns the
/// roots and, per slot, whether the root is a fused `Γ*` value.
pub fn interval_roots(shooter: &Shooter, mu: &[TaggedMu], count: usize, mass: f64) -> Result<Vec<(f64, bool)>> {
    if mu.len() < count {
        return Err(Error::InvalidConfig(format!("need {count} Dirichlet eigenvalues, have {}", mu.len())));
    }
    (0..count)
        .into_par_iter()
        .map(|k| {
            if k > 0 && mu[k - 1].fused_with_next {
                return Ok((mu[k - 1].value, true));
            }
            let (lo, hi) = if k == 0 {
                let guard = POLE_GUARD * mu[0].value.max(1.0);
                (LOWEST_BRACKET, mu[0].value - guard)
            } else {
                let guard = POLE_GUARD * (mu[k].value - mu[k - 1].value);
                (mu[k - 1].value + guard, mu[k].value - guard)
            };
            let g = |lam: f64| characteristic(shooter, lam).map(|c| c.f - mass * lam);
            let root = brent(g, lo, hi, 0.0, ROOT_RTOL, ROOT_MAX_ITER).map_err(|e| match e {
                Error::BracketFailure { .. } => Error::BracketFailure { lo, hi },
                other => other,
            })?;
            Ok((root, false))
        })
        .collect()
}

fn merged_dirichlet(shooter: &Shooter, count: usize, tol: f64) -> Result<Vec<TaggedMu>> {
    let (left, right) = rayon::join(
        || dirichlet_with(shooter, Side::Left, count),
        || dirichlet_with(shooter, Side::Right, count),
    );
    let vals = |v: Vec<DirichletEigenvalue>| v.into_iter().map(|d| d.value).collect::<Vec<_>>();
    let mut mu = merge_spectra(&vals(left?), &vals(right?), tol);
    mu.truncate(count);
    Ok(mu)
}

pub fn regular_eigenvalues(count: usize, config: &SystemConfig) -> Result<Vec<f64>> {
    let sh = Shooter::with_default_steps(config);
    let mu = merged_dirichlet(&sh, count, DEFAULT_FUSION_TOL)?;
    Ok(interval_roots(&sh, &mu, count, 0.0)?.into_iter().map(|r| r.0).collect())
}

pub fn mass_eigenvalues(count: usize, config: &SystemConfig) -> Result<Vec<f64>> {
    let sh = Shooter::with_default_steps(config);
    let mu = merged_dirichlet(&sh, count, DEFAULT_FUSION_TOL)?;
    Ok(interval_roots(&sh, &mu, count, config.mass())?.into_iter().map(|r| r.0).collect())
}

/// The interleaved record of `μₙ`, `λ'ₙ`, `λₙ` and the gaps `δₙ`.
#[derive(Debug, Clone)]
pub struct SpectrumTable {
    pub mu: Vec<TaggedMu>,
    pub lambda_prime: Vec<f64>,
    pub lambda: Vec<f64>,
    /// `true` where `λₙ` equals a fused `Γ*` value `μₙ₋₁ = μₙ`.
    pub lambda_fused: Vec<bool>,
    /// `δₙ = √λₙ₊₁ - √λₙ`, `n = 1..N-1`.
    pub gaps: Vec<f64>,
    config: SystemConfig,
}

impl SpectrumTable {
    pub fn build(count: usize, config: &SystemConfig) -> Result<Self> {
        Self::build_with(&Shooter::with_default_steps(config), count, DEFAULT_FUSION_TOL)
    }

    pub fn build_with(shooter: &Shooter, count: usize, fusion_tol: f64) -> Result<Self> {
        if count < 2 {
            return Err(Error::InvalidConfig("a spectrum table needs at least two entries".into()));
        }
        let config = shooter.config().clone();
        let mu = merged_dirichlet(shooter, count, fusion_tol)?;
        let (regular, mass) = rayon::join(
            || interval_roots(shooter, &mu, count, 0.0),
            || interval_roots(shooter, &mu, count, config.mass()),
        );
        let lambda_prime: Vec<f64> = regular?.into_iter().map(|r| r.0).collect();
        let mass = mass?;
        let lambda: Vec<f64> = mass.iter().map(|r| r.0).collect();
        let lambda_fused: Vec<bool> = mass.iter().map(|r| r.1).collect();
        let gaps = lambda.windows(2).map(|w| w[1].sqrt() - w[0].sqrt()).collect();
        let table = Self { mu, lambda_prime, lambda, lambda_fused, gaps, config };
        table.check_interlacing()?;
        Ok(table)
    }

    pub fn len(&self) -> usize {
        self.lambda.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda.is_empty()
    }

    pub fn config(&self) -> &SystemConfig {
        &self.config
    }

    /// `λₙ` for a 1-based index.
    pub fn lambda_at(&self, n: usize) -> Result<f64> {
        n.checked_sub(1).and_then(|i| self.lambda.get(i)).copied().ok_or(Error::IndexOutOfRange(n))
    }

    /// `δₙ` for a 1-based index.
    pub fn gap(&self, n: usize) -> Result<f64> {
        n.checked_sub(1).and_then(|i| self.gaps.get(i)).copied().ok_or(Error::IndexOutOfRange(n))
    }

    /// Two-sided frequency `ω_k = sign(k)·√λ_|k|`.
    pub fn omega(&self, k: i64) -> Result<f64> {
        let n = k.unsigned_abs() as usize;
        Ok(k.signum() as f64 * self.lambda_at(n)?.sqrt())
    }

    pub fn sqrt_lambda(&self) -> Vec<f64> {
        self.lambda.iter().map(|l| l.sqrt()).collect()
    }

    /// Whether `λₙ` (1-based) is a fused `Γ*` value.
    pub fn is_fused(&self, n: usize) -> bool {
        n >= 1 && self.lambda_fused.get(n - 1).copied().unwrap_or(false)
    }

    /// The chain `λ₁ < λ'₁ < μ₁`, then `μₙ < λₙ₊₁ < λ'ₙ₊₁ < μₙ₊₁` (or equality
    /// with a fused `μₙ = μₙ₊₁`), positivity and strict growth of `λ`.
    pub fn check_interlacing(&self) -> Result<()> {
        let fail = |index: usize, detail: String| Err(Error::InterlacingViolation { index, detail });
        let (lam, lp, mu) = (&self.lambda, &self.lambda_prime, &self.mu);
        let mass_positive = self.config.mass() > 0.0;
        let ordered = |a: f64, b: f64| if mass_positive { a < b } else { a <= b };
        if !(lam[0] > 0.0 || (!mass_positive && lam[0] > LOWEST_BRACKET)) {
            return fail(1, format!("lambda_1 = {} is not positive", lam[0]));
        }
        if !(ordered(lam[0], lp[0]) && lp[0] < mu[0].value) {
            return fail(1, format!("expected lambda_1 < lambda'_1 < mu_1, got {} {} {}", lam[0], lp[0], mu[0].value));
        }
        for i in 0..self.len() - 1 {
            let n = i + 1;
            if mu[i].fused_with_next {
                if lam[i + 1] != mu[i].value || lp[i + 1] != mu[i].value {
                    return fail(n + 1, "fused value not carried into lambda and lambda'".into());
                }
            } else {
                let chain = mu[i].value < lam[i + 1] && ordered(lam[i + 1], lp[i + 1]) && lp[i + 1] < mu[i + 1].value;
                if !chain {
                    return fail(
                        n + 1,
                        format!(
                            "expected mu_n < lambda_n+1 < lambda'_n+1 < mu_n+1, got {} {} {} {}",
                            mu[i].value,
                            lam[i + 1],
                            lp[i + 1],
                            mu[i + 1].value
                        ),
                    );
                }
            }
            if !(lam[i + 1] > lam[i]) {
                return fail(n + 1, "lambda is not strictly increasing".into());
            }
        }
        Ok(())
    }

    /// `max |F(λₙ) - Mλₙ| / (1 + Mλₙ)` over the non-fused entries.
    pub fn characteristic_residual(&self, shooter: &Shooter) -> Result<f64> {
        let m = self.config.mass();
        let mut worst: f64 = 0.0;
        for (lam, fused) in self.lambda.iter().zip(&self.lambda_fused) {
            if *fused {
                continue;
            }
            let c = characteristic(shooter, *lam)?;
            worst = worst.max((c.f - m * lam).abs() / (1.0 + m * lam));
        }
        Ok(worst)
    }
}

pub fn build_spectrum_table(count: usize, config: &SystemConfig) -> Result<SpectrumTable> {
    SpectrumTable::build(count, config)
}

/// Number of strict sign changes in a sampled function, skipping exact zeros.
pub fn count_sign_changes(values: &[f64]) -> usize {
    let mut last = 0.0f64;
    let mut changes = 0;
    for &v in values {
        if v == 0.0 {
            continue;
        }
        if last != 0.0 && v.signum() != last.signum() {
            changes += 1;
        }
        last = v;
    }
    changes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{default_config, CoefficientProfile, SideCoefficients};
    use std::f64::consts::PI;

    fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if f(a).signum() == f(m).signum() {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn characteristic_closed_form() {
        let cfg = SystemConfig::unit(1.0);
        let c = eval_characteristic((PI / 2.0).powi(2), &cfg).unwrap();
        assert!(c.f.abs() < 1e-10);
        let c = eval_characteristic(1.0, &cfg).unwrap();
        assert!((c.f - 2.0 / 1f64.tan()).abs() < 1e-10);
        assert!((c.f - (c.f1 - c.f2)).abs() <= 1e-8 * c.f.abs());
    }

    #[test]
    fn pole_guard_triggers() {
        let cfg = SystemConfig::unit(1.0);
        let sh = Shooter::with_default_steps(&cfg);
        let l = Junction { y: 1e-20, dy: 1.0 };
        let r = Junction { y: 1e-20, dy: -1.0 };
        assert!(matches!(
            characteristic_from_junctions(sh.config(), 10.0, l, r),
            Err(Error::PoleProximity { .. })
        ));
    }

    #[test]
    fn unit_dirichlet_closed_form() {
        let d = dirichlet_eigenvalues(Side::Left, 5, &SystemConfig::unit(1.0)).unwrap();
        for (j, e) in d.iter().enumerate() {
            let exact = ((j + 1) as f64 * PI).powi(2);
            assert!((e.value - exact).abs() <= 1e-8 * exact);
            assert_eq!(e.index, j + 1);
        }
    }

    #[test]
    fn dirichlet_eigenfunction_zero_count() {
        let cfg = default_config();
        let sh = Shooter::with_default_steps(&cfg);
        for side in [Side::Left, Side::Right] {
            let d = dirichlet_with(&sh, side, 10).unwrap();
            for e in &d {
                let sol = sh.solve(side, e.value).unwrap();
                // drop the clamped ends, where the value is zero up to round-off
                let interior = &sol.y[2..sol.y.len() - 2];
                assert_eq!(count_sign_changes(interior), e.index - 1);
            }
        }
    }

    #[test]
    fn merge_passes_single_list_through() {
        let m = merge_spectra(&[1.0, 4.0], &[], 1e-7);
        assert_eq!(m.len(), 2);
        assert!(m.iter().all(|t| t.tag == MuTag::Left && !t.fused_with_next));
    }

    #[test]
    fn merge_fuses_coincident_values() {
        let m = merge_spectra(&[1.0, 4.0], &[2.0, 4.0 + 1e-9], 1e-7);
        let tags: Vec<MuTag> = m.iter().map(|t| t.tag).collect();
        assert_eq!(tags, vec![MuTag::Left, MuTag::Right, MuTag::Both, MuTag::Both]);
        assert!(m[2].fused_with_next && !m[3].fused_with_next);
        assert_eq!(m[2].value, m[3].value);
    }

    #[test]
    fn unequal_densities_never_fuse() {
        let left = SideCoefficients::uniform(Side::Left, 1.0, 1.0, 0.0);
        let right = SideCoefficients::uniform(Side::Right, 2.0, 1.0, 0.0);
        let cfg = SystemConfig::new(left, right, 1.0).unwrap();
        let sh = Shooter::with_default_steps(&cfg);
        let mu = merged_dirichlet(&sh, 30, DEFAULT_FUSION_TOL).unwrap();
        assert!(mu.iter().all(|m| m.tag != MuTag::Both));
    }

    #[test]
    fn unit_mass_spectrum_closed_form() {
        let t = SpectrumTable::build(6, &SystemConfig::unit(1.0)).unwrap();
        let s1 = bisect(|s| 2.0 / s.tan() - s, 0.5, 1.5);
        assert!((s1 - 1.0769).abs() < 1e-4);
        assert!((t.lambda[0] - s1 * s1).abs() < 1e-9 * s1 * s1);
        assert!((t.lambda[1] - PI * PI).abs() < 1e-9 * PI * PI);
        assert!(t.is_fused(2) && !t.is_fused(1));
        assert!((t.lambda_prime[0] - (PI / 2.0).powi(2)).abs() < 1e-9);
        assert!((t.lambda_prime[2] - (1.5 * PI).powi(2)).abs() < 1e-8 * (1.5 * PI).powi(2));
    }

    #[test]
    fn tiny_mass_approaches_regular_spectrum() {
        let cfg = default_config().with_mass(1e-6);
        let t = SpectrumTable::build(10, &cfg).unwrap();
        for (l, lp) in t.lambda.iter().zip(&t.lambda_prime) {
            assert!((l - lp).abs() < 1e-3);
        }
    }

    #[test]
    fn minimal_table_chain() {
        let t = SpectrumTable::build(2, &default_config()).unwrap();
        assert!(t.lambda[0] < t.lambda_prime[0] && t.lambda_prime[0] < t.mu[0].value && t.mu[0].value < t.lambda[1]);
    }

    #[test]
    fn characteristic_decreases_between_poles() {
        let cfg = default_config();
        let sh = Shooter::with_default_steps(&cfg);
        let t = SpectrumTable::build_with(&sh, 4, DEFAULT_FUSION_TOL).unwrap();
        let (a, b) = (t.mu[0].value, t.mu[1].value);
        let eps = 1e-3 * (b - a);
        let vals: Vec<f64> = (0..50)
            .map(|i| characteristic(&sh, a + eps + (b - a - 2.0 * eps) * i as f64 / 49.0).unwrap().f)
            .collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn characteristic_sign_flip_across_poles() {
        let cfg = default_config();
        let sh = Shooter::with_default_steps(&cfg);
        let t = SpectrumTable::build_with(&sh, 8, DEFAULT_FUSION_TOL).unwrap();
        for m in t.mu.iter().filter(|m| m.tag != MuTag::Both) {
            let eps = 1e-4 * m.value.sqrt();
            assert!(characteristic(&sh, m.value - eps).unwrap().f < 0.0);
            assert!(characteristic(&sh, m.value + eps).unwrap().f > 0.0);
        }
    }

    #[test]
    fn characteristic_negative_lambda_asymptotic() {
        let cfg = default_config();
        let lam = -100.0;
        let f = eval_characteristic(lam, &cfg).unwrap().f;
        let scale = lam.abs().sqrt()
            * ((cfg.left().rho.value(0.0) * cfg.left().sigma.value(0.0)).sqrt()
                + (cfg.right().rho.value(0.0) * cfg.right().sigma.value(0.0)).sqrt());
        assert!(f > 0.0 && f / scale > 0.5 && f / scale < 2.0);
    }

    #[test]
    fn mass_equation_residual_and_simplicity() {
        let cfg = default_config();
        let sh = Shooter::with_default_steps(&cfg);
        let t = SpectrumTable::build_with(&sh, 20, DEFAULT_FUSION_TOL).unwrap();
        assert!(t.characteristic_residual(&sh).unwrap() <= 1e-6);
        assert!(t.lambda.windows(2).all(|w| w[1] - w[0] >= 1e-6 * w[1]));
    }

    #[test]
    fn symmetric_coefficients_fuse_every_dirichlet_value() {
        let rho = CoefficientProfile::polynomial(Side::Left, vec![1.2, 0.3, 0.1]);
        let sigma = CoefficientProfile::polynomial(Side::Left, vec![1.0, -0.2]);
        let q = CoefficientProfile::constant(Side::Left, 0.7);
        let left = SideCoefficients { rho: rho.clone(), sigma: sigma.clone(), q: q.clone() };
        let right = SideCoefficients { rho: rho.reflected(), sigma: sigma.reflected(), q: q.reflected() };
        let cfg = SystemConfig::new(left, right, 0.8).unwrap();
        let t = SpectrumTable::build(12, &cfg).unwrap();
        assert!(t.mu.iter().all(|m| m.tag == MuTag::Both));
        for n in (2..=12).step_by(2) {
            assert!(t.is_fused(n));
            let mu = t.mu[n - 2].value;
            assert!((t.lambda[n - 1] - mu).abs() <= 1e-8 * mu);
        }
    }

    #[test]
    fn sign_change_counter() {
        assert_eq!(count_sign_changes(&[1.0, 0.0, -1.0, -2.0, 3.0]), 2);
        assert_eq!(count_sign_changes(&[]), 0);
    }
}
