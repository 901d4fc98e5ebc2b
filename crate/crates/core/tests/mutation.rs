//! The suite must catch a deliberately broken I3 Hessian.

use membrane_eig::verify::checks::{run_checks_with, Kernels};
use membrane_eig::{invariant_hvp_single, Invariant, Mat32, Result, Svd32};

fn negated_h3(which: Invariant, svd: &Svd32, fdot: &Mat32) -> Result<Mat32> {
    let h = invariant_hvp_single(which, svd, fdot)?;
    Ok(if which == Invariant::I3 { h * -1.0 } else { h })
}

#[test]
fn negated_h3_is_caught_with_counterexample() {
    let kernels = Kernels {
        invariant_hvp: negated_h3,
    };
    let reports = run_checks_with(42, 50, &kernels).unwrap();
    let failed: Vec<_> = reports.iter().filter(|r| !r.passed).collect();
    let names: Vec<&str> = failed.iter().map(|r| r.name.as_str()).collect();
    assert!(names.contains(&"hvp_fd_I3"), "{names:?}");
    assert!(names.contains(&"eigen_residual_I3"), "{names:?}");
    assert!(names.contains(&"sheet_hessian_structure"), "{names:?}");
    for r in &failed {
        let cx = r.counterexample.as_ref().expect("failure carries a counterexample");
        assert_eq!(cx.input.len(), 6);
    }
    // unaffected kernels still pass
    assert!(reports.iter().find(|r| r.name == "hvp_fd_I1").unwrap().passed);
}

#[test]
fn correct_kernels_pass_everything() {
    let reports = run_checks_with(42, 50, &Kernels::default()).unwrap();
    assert!(reports.iter().all(|r| r.passed && r.counterexample.is_none()));
}
