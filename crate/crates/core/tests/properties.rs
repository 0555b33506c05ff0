use proptest::prelude::*;

use stringmass::acceptance::interlacing_violations;
use stringmass::coefficients::{CoefficientProfile, Side, SideCoefficients, SystemConfig};
use stringmass::control::gram_matrix;
use stringmass::spectrum::SpectrumTable;

fn side(s: Side, rho: (f64, f64), sigma: (f64, f64), q: f64) -> SideCoefficients {
    SideCoefficients {
        rho: CoefficientProfile::polynomial(s, vec![rho.0, rho.1]),
        sigma: CoefficientProfile::polynomial(s, vec![sigma.0, sigma.1]),
        q: CoefficientProfile::constant(s, q),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn interlacing_holds_for_linear_profiles(
        r1 in 0.6f64..2.0, r1s in -0.4f64..0.4, s1 in 0.6f64..2.0, s1s in -0.4f64..0.4, q1 in 0.0f64..3.0,
        r2 in 0.6f64..2.0, r2s in -0.4f64..0.4, s2 in 0.6f64..2.0, s2s in -0.4f64..0.4, q2 in 0.0f64..3.0,
        mass in 0.1f64..3.0,
    ) {
        let cfg = SystemConfig::new(
            side(Side::Left, (r1, r1s), (s1, s1s), q1),
            side(Side::Right, (r2, r2s), (s2, s2s), q2),
            mass,
        ).unwrap();
        let t = SpectrumTable::build(13, &cfg).unwrap();
        prop_assert_eq!(interlacing_violations(&t, 12), 0);
        prop_assert!(t.lambda.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn gram_matrix_is_hermitian_positive(freqs in proptest::collection::vec(-30.0f64..30.0, 2..8), t_end in 1.0f64..6.0) {
        let mut f = freqs.clone();
        f.sort_by(f64::total_cmp);
        f.dedup_by(|a, b| (*a - *b).abs() < 0.5);
        let g = gram_matrix(&f, t_end);
        prop_assert!((&g - g.adjoint()).norm() < 1e-12 * t_end);
        let eig = g.symmetric_eigenvalues();
        prop_assert!(eig.iter().all(|v| *v > 0.0));
    }
}
