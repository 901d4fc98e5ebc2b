use membrane_eig::verify::jacobi_eigen6;
use membrane_eig::*;
use proptest::prelude::*;

fn mat32() -> impl Strategy<Value = Mat32> {
    prop::array::uniform6(-2.0f64..2.0).prop_map(|v| Mat32::from_row_slice(&v))
}

fn nondegenerate() -> impl Strategy<Value = Mat32> {
    mat32().prop_filter("sigma2 > 0.05", |f| svd32(f).sigma[1] > 0.05)
}

fn sheet_region() -> impl Strategy<Value = Mat32> {
    nondegenerate().prop_filter("I3 > 0.05", |f| invariants(&svd32(f)).i3 > 0.05)
}

const ALL: [Invariant; 3] = [Invariant::I1, Invariant::I2, Invariant::I3];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn svd_reconstructs_with_proper_rotations(f in mat32()) {
        let s = svd32(&f);
        prop_assert!((f - s.reconstruct()).norm() <= 1e-12 * f.norm().max(1.0));
        prop_assert!((s.u.determinant() - 1.0).abs() < 1e-12);
        prop_assert!((s.v.determinant() - 1.0).abs() < 1e-12);
        prop_assert!(s.sigma[0] >= s.sigma[1] && s.sigma[1] >= 0.0);
    }

    #[test]
    fn rates_reproduce_the_projected_velocity(f in nondegenerate(), fd in mat32()) {
        let s = svd32(&f);
        prop_assume!(s.sigma[0] - s.sigma[1] > 0.05);
        let rates = svd_rates(&s, &fd).unwrap();
        prop_assert!((rates.frame_velocity(&s) - s.project(&fd)).max_abs() < 1e-10);
    }

    #[test]
    fn invariant_hvps_are_symmetric_and_linear(f in nondegenerate(), x in mat32(), y in mat32(), a in -1.0f64..1.0) {
        let s = svd32(&f);
        for which in ALL {
            let hx = invariant_hvp_single(which, &s, &x).unwrap();
            let hy = invariant_hvp_single(which, &s, &y).unwrap();
            prop_assert!((x.dot(&hy) - y.dot(&hx)).abs() < 1e-10);
            let combo = invariant_hvp_single(which, &s, &(x * a + y)).unwrap();
            prop_assert!((combo - (hx * a + hy)).max_abs() < 1e-12);
        }
    }

    #[test]
    fn invariant_eigensystems_diagonalize_the_hvp(f in nondegenerate(), x in mat32()) {
        let s = svd32(&f);
        for which in ALL {
            let e = invariant_eigensystem(which, &s).unwrap();
            prop_assert!(e.orthonormality_error() < 1e-10);
            let h = invariant_hvp_single(which, &s, &x).unwrap();
            prop_assert!((e.apply(&x) - h).norm() < 1e-8);
        }
    }

    #[test]
    fn sheet_closed_form_matches_generic(f in sheet_region()) {
        let s = svd32(&f);
        let model = NeoHookeanSheet::new(1.0).unwrap();
        let a = sheet_eigensystem(&model, &s).unwrap().sorted_eigenvalues();
        let b = energy_eigensystem(&model, &s).unwrap().sorted_eigenvalues();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-10);
        }
    }

    #[test]
    fn psd_projection_is_psd_and_idempotent(f in sheet_region(), v in mat32()) {
        let s = svd32(&f);
        let model = NeoHookeanSheet::new(1.0).unwrap();
        for e in [sheet_eigensystem(&model, &s).unwrap(), invariant_eigensystem(Invariant::I3, &s).unwrap()] {
            let p = project_psd(&e);
            prop_assert!(jacobi_eigen6(&p.to_dense()).unwrap().values[0] >= -1e-10);
            prop_assert!(v.dot(&p.apply(&v)) >= -1e-10);
            prop_assert_eq!(p.project().eigenvalues(), p.eigenvalues());
        }
    }
}
