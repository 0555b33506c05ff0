//! Gap sequence, cluster/separated index sets and finite-range checks of the
//! gap and density asymptotics.
//!
//! Indices are 1-based. The two-sided frequency sequence is
//! `ω_{-n} = -√λₙ`; a cluster pair `(n, n+1)` on the positive side mirrors
//! to `(-(n+1), -n)` on the negative side, which has the same gap.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::median;
use crate::spectrum::{MuTag, SpectrumTable};

/// Class of an index with respect to the threshold `δ'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetLabel {
    /// First member of a clustered pair.
    A,
    /// Second member of a clustered pair.
    APartner,
    /// Separated, with `μₙ₋₁` a right-string eigenvalue (or `n = 1`).
    BPlus,
    /// Separated, with `μₙ₋₁` a left-string eigenvalue.
    BMinus,
    /// Last table entry when its right gap is not available.
    Unclassified,
}

impl SetLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            SetLabel::A => "A",
            SetLabel::APartner => "A+1",
            SetLabel::BPlus => "B+",
            SetLabel::BMinus => "B-",
            SetLabel::Unclassified => "none",
        }
    }

    pub fn is_b(self) -> bool {
        matches!(self, SetLabel::BPlus | SetLabel::BMinus)
    }
}

#[derive(Debug, Clone)]
pub struct GapClassification {
    pub delta_prime: f64,
    /// Label of index `n` at position `n - 1`.
    pub labels: Vec<SetLabel>,
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub b_plus: Vec<usize>,
    pub b_minus: Vec<usize>,
    /// Indices whose eigenvalue is a fused `Γ*` value.
    pub lambda_set: Vec<usize>,
}

impl GapClassification {
    /// Label of a two-sided index (`n ≠ 0`). The mirror of a pair
    /// `(n, n+1)` is `(-(n+1), -n)`, so `A` and `A+1` swap roles.
    pub fn label(&self, k: i64) -> Option<SetLabel> {
        let n = k.unsigned_abs() as usize;
        let l = *self.labels.get(n.checked_sub(1)?)?;
        Some(if k > 0 {
            l
        } else {
            match l {
                SetLabel::A => SetLabel::APartner,
                SetLabel::APartner => SetLabel::A,
                other => other,
            }
        })
    }

    /// `Λ* = Λ ∪ -Λ`.
    pub fn lambda_star(&self) -> Vec<i64> {
        let mut v: Vec<i64> = self.lambda_set.iter().flat_map(|&n| [-(n as i64), n as i64]).collect();
        v.sort_unstable();
        v
    }

    pub fn in_lambda(&self, n: usize) -> bool {
        self.lambda_set.binary_search(&n).is_ok()
    }

    /// Two-sided cluster pairs `(k, k+1)` with `k ∈ A ∪ -(A+1)`.
    pub fn cluster_pairs(&self) -> Vec<(i64, i64)> {
        let mut v: Vec<(i64, i64)> = Vec::new();
        for &n in &self.a {
            let n = n as i64;
            v.push((n, n + 1));
            v.push((-(n + 1), -n));
        }
        v.sort_unstable();
        v
    }

    /// Two-sided separated indices `±B`.
    pub fn separated(&self) -> Vec<i64> {
        let mut v: Vec<i64> = self.b.iter().flat_map(|&n| [-(n as i64), n as i64]).collect();
        v.sort_unstable();
        v
    }
}

/// Half the smallest two-step gap `min (√λₙ₊₂ - √λₙ)/2`, the largest
/// admissible threshold.
pub fn max_delta_prime(table: &SpectrumTable) -> f64 {
    let s = table.sqrt_lambda();
    0.5 * s.windows(3).map(|w| w[2] - w[0]).fold(f64::INFINITY, f64::min)
}

pub fn default_delta_prime(table: &SpectrumTable) -> f64 {
    0.9 * max_delta_prime(table)
}

pub fn classify_indices(table: &SpectrumTable, delta_prime: f64) -> Result<GapClassification> {
    let n_total = table.len();
    if n_total < 4 {
        return Err(Error::InvalidConfig(format!("classification needs at least 4 eigenvalues, have {n_total}")));
    }
    let bound = max_delta_prime(table);
    if !(delta_prime > 0.0) || delta_prime > bound {
        return Err(Error::ThresholdTooLarge { delta_prime, bound });
    }
    let gaps = &table.gaps;
    let mut labels = vec![SetLabel::Unclassified; n_total];
    for n in 1..n_total {
        let right = gaps[n - 1];
        // index 1 has no left neighbour on the positive side: its left gap
        // counts as infinite
        let left = if n == 1 { f64::INFINITY } else { gaps[n - 2] };
        labels[n - 1] = if right < delta_prime {
            SetLabel::A
        } else if left < delta_prime {
            SetLabel::APartner
        } else if n == 1 || table.mu[n - 2].tag.touches(crate::coefficients::Side::Right) {
            SetLabel::BPlus
        } else {
            SetLabel::BMinus
        };
    }
    if gaps[n_total - 2] < delta_prime {
        labels[n_total - 1] = SetLabel::APartner;
    }
    let pick = |f: &dyn Fn(SetLabel) -> bool| -> Vec<usize> {
        labels.iter().enumerate().filter(|(_, &l)| f(l)).map(|(i, _)| i + 1).collect()
    };
    let a = pick(&|l| l == SetLabel::A);
    let b = pick(&|l| l.is_b());
    let b_plus = pick(&|l| l == SetLabel::BPlus);
    let b_minus = pick(&|l| l == SetLabel::BMinus);
    let lambda_set = (1..=n_total).filter(|&n| table.is_fused(n)).collect();
    Ok(GapClassification { delta_prime, labels, a, b, b_plus, b_minus, lambda_set })
}

/// Finite-range evidence for the gap and Weyl asymptotics.
#[derive(Debug, Clone)]
pub struct GapReport {
    /// `n·δₙ` for every `n ∈ A`.
    pub n_delta_over_a: Vec<(usize, f64)>,
    pub max_n_delta_a: f64,
    pub median_n_delta_a: f64,
    /// `min (√λₙ₊₂ - √λₙ)`.
    pub min_two_step_gap: f64,
    /// `√λₙ - nπ/(γ₁+γ₂)` for every n.
    pub weyl_offsets: Vec<f64>,
    /// `√λₙ(γ₁+γ₂)/(nπ) - 1` for every n.
    pub weyl_relative: Vec<f64>,
    /// Threshold `τ` on `μₙ - μₙ₋₁` defining `Ω`.
    pub tau: f64,
    /// `n·(√λₙ - √μₙ₋₁)` for `n ∈ Ω`.
    pub omega_offsets: Vec<(usize, f64)>,
}

impl GapReport {
    pub fn max_omega_offset(&self) -> f64 {
        self.omega_offsets.iter().map(|p| p.1.abs()).fold(0.0, f64::max)
    }
}

pub fn verify_gap_asymptotics(table: &SpectrumTable, classes: &GapClassification) -> GapReport {
    let s = table.sqrt_lambda();
    let n_delta_over_a: Vec<(usize, f64)> =
        classes.a.iter().filter(|&&n| n < table.len()).map(|&n| (n, n as f64 * table.gaps[n - 1])).collect();
    let vals: Vec<f64> = n_delta_over_a.iter().map(|p| p.1).collect();
    let max_n_delta_a = vals.iter().copied().fold(0.0, f64::max);
    let median_n_delta_a = if vals.is_empty() { 0.0 } else { median(&vals) };
    let min_two_step_gap = s.windows(3).map(|w| w[2] - w[0]).fold(f64::INFINITY, f64::min);
    let g = table.config().gamma1() + table.config().gamma2();
    let weyl_offsets = s.iter().enumerate().map(|(i, v)| v - (i + 1) as f64 * PI / g).collect();
    let weyl_relative = s.iter().enumerate().map(|(i, v)| v * g / ((i + 1) as f64 * PI) - 1.0).collect();
    let mu_gaps: Vec<f64> = table.mu.windows(2).map(|w| w[1].value - w[0].value).collect();
    let tau = if mu_gaps.is_empty() { 0.0 } else { median(&mu_gaps) };
    // n ∈ Ω when μₙ - μₙ₋₁ ≥ τ (2 ≤ n ≤ N)
    let omega_offsets = (2..=table.len())
        .filter(|&n| mu_gaps[n - 2] >= tau)
        .map(|n| (n, n as f64 * (s[n - 1] - table.mu[n - 2].value.sqrt())))
        .collect();
    GapReport {
        n_delta_over_a,
        max_n_delta_a,
        median_n_delta_a,
        min_two_step_gap,
        weyl_offsets,
        weyl_relative,
        tau,
        omega_offsets,
    }
}

/// Largest number of two-sided frequencies `±√λₙ` inside a window of length
/// `r`, and the density estimate `n⁺(r)/r`.
pub fn counting_density(table: &SpectrumTable, r: f64) -> Result<(usize, f64)> {
    let s = table.sqrt_lambda();
    let span = s[s.len() - 1] - s[0];
    if !(r > 0.0) || r > span {
        return Err(Error::InvalidConfig(format!("window length {r} must lie in (0, {span}]")));
    }
    let mut pts: Vec<f64> = s.iter().flat_map(|&v| [-v, v]).collect();
    pts.sort_by(f64::total_cmp);
    let mut best = 0;
    let mut hi = 0;
    for lo in 0..pts.len() {
        while hi < pts.len() && pts[hi] <= pts[lo] + r {
            hi += 1;
        }
        best = best.max(hi - lo);
    }
    Ok((best, best as f64 / r))
}

/// Whether the side tags of `μₙ₋₁` and `μₙ` differ for a cluster index
/// (fused values count as both sides).
pub fn companion_tags_differ(table: &SpectrumTable, n: usize) -> bool {
    if n < 2 {
        return true;
    }
    let (a, b) = (table.mu[n - 2].tag, table.mu[n - 1].tag);
    a == MuTag::Both || b == MuTag::Both || a != b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{default_config, Side, SideCoefficients, SystemConfig};

    fn unit_table(n: usize) -> SpectrumTable {
        SpectrumTable::build(n, &SystemConfig::unit(1.0)).unwrap()
    }

    #[test]
    fn unit_symmetric_clusters_are_even_indices() {
        let t = unit_table(20);
        let c = classify_indices(&t, default_delta_prime(&t)).unwrap();
        let evens: Vec<usize> = (2..20).step_by(2).collect();
        assert_eq!(c.a, evens);
        // only the lowest mode is separated on the truncated positive side
        assert_eq!(c.b, vec![1]);
        assert_eq!(c.lambda_set, (2..=20).step_by(2).collect::<Vec<_>>());
    }

    #[test]
    fn partition_invariant_holds() {
        let t = SpectrumTable::build(30, &default_config()).unwrap();
        let c = classify_indices(&t, default_delta_prime(&t)).unwrap();
        for n in 1..t.len() {
            let l = c.labels[n - 1];
            assert_ne!(l, SetLabel::Unclassified);
            if l == SetLabel::A {
                assert_eq!(c.labels[n], SetLabel::APartner);
            }
            if l == SetLabel::APartner {
                assert_eq!(c.labels[n - 2], SetLabel::A);
            }
        }
        let mut union = c.b_plus.clone();
        union.extend(&c.b_minus);
        union.sort_unstable();
        assert_eq!(union, c.b);
        for &n in &c.a {
            assert!(companion_tags_differ(&t, n));
        }
    }

    #[test]
    fn irrational_ratio_classification_matches_recomputation() {
        let left = SideCoefficients::uniform(Side::Left, 1.0, 1.0, 0.0);
        let right = SideCoefficients::uniform(Side::Right, 2.0, 1.0, 0.0);
        let cfg = SystemConfig::new(left, right, 1.0).unwrap();
        let t = SpectrumTable::build(24, &cfg).unwrap();
        let dp = default_delta_prime(&t);
        let c = classify_indices(&t, dp).unwrap();
        let s: Vec<f64> = t.lambda.iter().map(|l| l.sqrt()).collect();
        for n in 1..t.len() {
            let d = s[n] - s[n - 1];
            assert_eq!(c.labels[n - 1] == SetLabel::A, d < dp, "n={n}");
        }
    }

    #[test]
    fn threshold_above_bound_rejected() {
        let t = unit_table(8);
        let bound = max_delta_prime(&t);
        assert!(matches!(classify_indices(&t, 1.01 * bound), Err(Error::ThresholdTooLarge { .. })));
    }

    #[test]
    fn small_table_without_clusters() {
        let cfg = default_config().with_mass(1e-6);
        let t = SpectrumTable::build(4, &cfg).unwrap();
        let c = classify_indices(&t, 0.5 * max_delta_prime(&t)).unwrap();
        assert!(c.a.is_empty());
        assert_eq!(c.b, vec![1, 2, 3]);
        assert_eq!(c.labels[3], SetLabel::Unclassified);
    }

    #[test]
    fn negative_indices_mirror() {
        let t = unit_table(10);
        let c = classify_indices(&t, default_delta_prime(&t)).unwrap();
        assert_eq!(c.label(2), Some(SetLabel::A));
        assert_eq!(c.label(-3), Some(SetLabel::A));
        assert_eq!(c.label(-2), Some(SetLabel::APartner));
        assert!(c.cluster_pairs().contains(&(-3, -2)));
        assert_eq!(c.lambda_star()[0], -10);
    }

    #[test]
    fn unit_gap_report_matches_closed_form() {
        let t = unit_table(40);
        let c = classify_indices(&t, default_delta_prime(&t)).unwrap();
        let r = verify_gap_asymptotics(&t, &c);
        // odd-slot roots of 2 cot s = s sit at kπ + O(1/k): n·δₙ stays bounded
        for &(n, v) in &r.n_delta_over_a {
            let k = (n / 2) as f64;
            let mut lo = k * PI + 1e-12;
            let mut hi = (k + 1.0) * PI - 1e-12;
            for _ in 0..200 {
                let m = 0.5 * (lo + hi);
                if 2.0 / m.tan() - m > 0.0 { lo = m } else { hi = m }
            }
            assert!((v - n as f64 * (lo - k * PI)).abs() < 1e-6);
            assert!(v < 2.0);
        }
        assert!(r.min_two_step_gap > 0.0);
    }

    #[test]
    fn regular_spectrum_has_no_clusters() {
        let cfg = SystemConfig::unit(1.0).with_mass(0.0);
        let t = SpectrumTable::build(20, &cfg).unwrap();
        let c = classify_indices(&t, default_delta_prime(&t)).unwrap();
        assert!(c.a.is_empty());
        for w in t.gaps.windows(2) {
            assert!((w[1] - w[0]).abs() < 1e-8);
        }
    }

    #[test]
    fn density_estimate_near_optical_length() {
        let t = unit_table(40);
        let (_, d) = counting_density(&t, 20.0).unwrap();
        assert!((d / (2.0 / PI) - 1.0).abs() < 0.15, "{d}");
        let min_gap = t.gaps.iter().copied().fold(f64::INFINITY, f64::min);
        assert_eq!(counting_density(&t, 0.5 * min_gap).unwrap().0, 1);
        let (a, _) = counting_density(&t, 5.0).unwrap();
        let (b, _) = counting_density(&t, 10.0).unwrap();
        assert!(b >= a);
    }

    #[test]
    fn classification_stable_under_small_threshold_changes() {
        let t = SpectrumTable::build(30, &default_config()).unwrap();
        let dp = 0.8 * max_delta_prime(&t);
        let base = classify_indices(&t, dp).unwrap();
        for f in [0.99, 1.01] {
            let other = classify_indices(&t, f * dp).unwrap();
            for n in 1..t.len() {
                if (base.labels[n - 1] == SetLabel::A) != (other.labels[n - 1] == SetLabel::A) {
                    assert!((t.gaps[n - 1] - dp).abs() <= 0.01 * dp);
                }
            }
        }
    }
}
