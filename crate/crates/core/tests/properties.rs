use fermigauss::basis::dual_matrix;
use fermigauss::correlators::kw_residuals;
use fermigauss::dense;
use fermigauss::pfaffian::{log_pfaffian, pfaffian, pfaffinho, IndexSet};
use fermigauss::sampling::{random_antisymmetric, seeded, well_conditioned};
use fermigauss::{BasisSpec, BitString, GaussianState, RotatedView, SignSequence};
use num_complex::Complex64;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pfaffian_squared_is_determinant(seed in any::<u64>(), l in 1usize..24) {
        let a = random_antisymmetric(&mut seeded(seed), l, 1.0);
        let pf = pfaffian(&a);
        let det = dense::det(a.as_array());
        if l % 2 == 1 {
            prop_assert_eq!(pf, Complex64::new(0.0, 0.0));
        } else {
            prop_assert!((pf * pf - det).norm() <= 1e-9 * det.norm());
        }
    }

    #[test]
    fn pfaffian_scales_with_power_of_half_dimension(seed in any::<u64>(), half in 1usize..8, t in 0.1f64..3.0) {
        let a = random_antisymmetric(&mut seeded(seed), 2 * half, 1.0);
        let lhs = log_pfaffian(&a.scaled(Complex64::new(t, 0.0))).ln_abs;
        let rhs = log_pfaffian(&a).ln_abs + half as f64 * t.ln();
        prop_assert!((lhs - rhs).abs() < 1e-9);
    }

    #[test]
    fn minor_over_empty_set_is_one(seed in any::<u64>(), l in 0usize..10) {
        let a = random_antisymmetric(&mut seeded(seed), l, 1.0);
        prop_assert_eq!(pfaffinho(&a, &IndexSet::empty()), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn occupation_probabilities_sum_to_one(seed in any::<u64>(), l in 1usize..8) {
        let mut rng = seeded(seed);
        let st = GaussianState::new(well_conditioned(&mut rng, l, true), BitString::from_index(seed as usize % (1 << l), l)).unwrap();
        let total: f64 = (0..1 << l).map(|k| st.amplitude_z(&BitString::from_index(k, l)).unwrap().norm_sqr()).sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rotated_probabilities_sum_to_one_and_ignore_alpha(
        seed in any::<u64>(), l in 2usize..7, phi in 0.0f64..3.1, alpha in 0.0f64..6.2,
    ) {
        let mut rng = seeded(seed);
        let st = GaussianState::new(well_conditioned(&mut rng, l, true), BitString::zeros(l)).unwrap();
        let Ok(view) = RotatedView::new(&st, BasisSpec::new(phi, alpha)) else {
            return Ok(());
        };
        let plain = RotatedView::new(&st, BasisSpec::new(phi, 0.0)).unwrap();
        let mut total = 0.0;
        for k in 0..1 << l {
            let s = SignSequence::from_index(k, l);
            let a = view.amplitude(&s).unwrap();
            total += a.norm_sqr();
            prop_assert!((a.norm() - plain.amplitude(&s).unwrap().norm()).abs() < 1e-12);
        }
        prop_assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn dual_satisfies_duality_relations(seed in any::<u64>(), l in 2usize..20) {
        let r = well_conditioned(&mut seeded(seed), l, true);
        let d = dual_matrix(&r).unwrap();
        prop_assert!(kw_residuals(&r, &d.rtilde).unwrap() < 1e-9);
    }

    #[test]
    fn global_sign_flip_preserves_probability(seed in any::<u64>(), l in 2usize..8) {
        // the state has definite fermion parity, which maps S to −S
        let mut rng = seeded(seed);
        let st = GaussianState::new(well_conditioned(&mut rng, l, false), BitString::zeros(l)).unwrap();
        let view = RotatedView::new(&st, BasisSpec::sigma_x()).unwrap();
        let s = SignSequence::from_index(seed as usize % (1 << l), l);
        let (a, b) = (view.probability(&s).unwrap(), view.probability(&s.flipped()).unwrap());
        prop_assert!((a - b).abs() < 1e-12);
    }
}
