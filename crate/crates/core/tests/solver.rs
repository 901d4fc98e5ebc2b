use membrane_eig::fem::assembly::{assemble, sparse_mul, HessianMode};
use membrane_eig::fem::newton::{newton_solve, SolverConfig, Termination};
use membrane_eig::fem::obj::quad_split_square;
use membrane_eig::fem::{total_energy, MembraneProblem};
use membrane_eig::verify::checks::fan_mesh;
use membrane_eig::*;

fn unit_triangle() -> (Vec<Vec3>, Vec<[usize; 3]>) {
    (
        vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
        ],
        vec![[0, 1, 2]],
    )
}

fn sheet(mu: f64) -> NeoHookeanSheet {
    NeoHookeanSheet::new(mu).unwrap()
}

/// 10×10 unit sheet, left edge pinned at x = 0, right edge at x = `width`.
fn stretched_sheet(width: f64) -> (MembraneProblem, Vec<Vec3>) {
    let n = 10;
    let mesh = quad_split_square(n, 1.0);
    let mut p = MembraneProblem::new(&mesh.positions, mesh.triangles.clone(), sheet(1.0)).unwrap();
    for j in 0..=n {
        let (l, r) = (j * (n + 1), j * (n + 1) + n);
        p.pin(l, Vec3::new(0.0, mesh.positions[l].y(), 0.0)).unwrap();
        p.pin(r, Vec3::new(width, mesh.positions[r].y(), 0.0)).unwrap();
    }
    let x0 = mesh
        .positions
        .iter()
        .map(|q| Vec3::new(width * q.x(), q.y(), 0.0))
        .collect();
    (p, x0)
}

#[test]
fn rest_triangle_has_zero_energy_and_gradient() {
    let (rest, tris) = unit_triangle();
    let p = MembraneProblem::new(&rest, tris, sheet(1.0)).unwrap();
    let asm = assemble(&p, &rest, HessianMode::Projected).unwrap();
    assert!(asm.energy.abs() < 1e-15);
    assert!(asm.gradient.iter().all(|g| g.abs() < 1e-15));
}

#[test]
fn doubled_triangle_energy() {
    let (rest, tris) = unit_triangle();
    let p = MembraneProblem::new(&rest, tris, sheet(1.0)).unwrap();
    let x: Vec<Vec3> = rest.iter().map(|v| v.scale(2.0)).collect();
    assert!((total_energy(&p, &x).unwrap() - 1.265625).abs() < 1e-12);
}

#[test]
fn pinned_dofs_become_identity() {
    let (rest, tris) = fan_mesh();
    let mut p = MembraneProblem::new(&rest, tris, sheet(1.0)).unwrap();
    p.pin(2, Vec3::new(0.3, 1.0, 0.1)).unwrap();
    let x: Vec<Vec3> = rest
        .iter()
        .map(|v| Vec3::new(1.2 * v.x(), v.y(), 0.1 * v.x()))
        .collect();
    let asm = assemble(&p, &x, HessianMode::Projected).unwrap();
    let n = p.dof_count();
    for dof in 6..9 {
        assert_eq!(asm.gradient[dof], 0.0);
        let mut e = vec![0.0; n];
        e[dof] = 1.0;
        assert_eq!(sparse_mul(&asm.hessian, &e), e);
    }
    // symmetric pattern and values
    let dense = |r: usize, c: usize| asm.hessian.get_entry(r, c).map_or(0.0, |v| v.into_value());
    for r in 0..n {
        for c in 0..n {
            assert!((dense(r, c) - dense(c, r)).abs() < 1e-12);
        }
    }
}

#[test]
fn rest_state_converges_immediately() {
    let (rest, tris) = fan_mesh();
    let mut p = MembraneProblem::new(&rest, tris, sheet(1.0)).unwrap();
    p.pin(1, rest[1]).unwrap();
    let (x, report) = newton_solve(&p, &rest, &SolverConfig::default()).unwrap();
    assert_eq!(report.iterations, 0);
    assert_eq!(report.termination, Termination::Converged);
    assert_eq!(x, rest);
}

#[test]
fn stretched_sheet_converges_quadratically() {
    let (p, x0) = stretched_sheet(1.5);
    let (_, report) = newton_solve(&p, &x0, &SolverConfig::default()).unwrap();
    assert_eq!(report.termination, Termination::Converged);
    assert!(report.iterations <= 30);
    let h = &report.history;
    assert!(h.windows(2).all(|w| w[1].energy <= w[0].energy));
    assert!(h
        .windows(2)
        .any(|w| w[1].grad_norm / (w[0].grad_norm * w[0].grad_norm) <= 10.0));
    assert!(report.final_record().grad_norm <= 1e-8);
}

#[test]
fn exact_hessian_mode_holds_the_equilibrium() {
    let (p, x0) = stretched_sheet(1.5);
    let (x, _) = newton_solve(&p, &x0, &SolverConfig::default()).unwrap();
    let cfg = SolverConfig {
        hessian: membrane_eig::fem::newton::HessianModeConfig::Exact,
        ..SolverConfig::default()
    };
    let (_, report) = newton_solve(&p, &x, &cfg).unwrap();
    assert_eq!(report.termination, Termination::Converged);
    assert!(report.iterations <= 1);
}

#[test]
fn max_iterations_termination() {
    let (p, x0) = stretched_sheet(1.5);
    let cfg = SolverConfig {
        max_iters: 1,
        ..SolverConfig::default()
    };
    let (_, report) = newton_solve(&p, &x0, &cfg).unwrap();
    assert_eq!(report.termination, Termination::MaxIterations);
    assert_eq!(report.history.len(), 2);
}

#[test]
fn inadmissible_start_is_reported() {
    let (p, mut x0) = stretched_sheet(1.5);
    // collapse the interior vertex (1, 1) onto its neighbor (2, 1)
    x0[12] = x0[13];
    let err = newton_solve(&p, &x0, &SolverConfig::default()).unwrap_err();
    assert!(matches!(err, Error::ElementDomain { .. }), "{err:?}");
}

#[test]
fn nearly_degenerate_start_recovers() {
    let (p, mut x0) = stretched_sheet(1.5);
    // squash one element to I3 ≈ 1e-3, admissible but far from equilibrium
    x0[12] = x0[13] + (x0[12] - x0[13]).scale(1e-3);
    let (_, report) = newton_solve(&p, &x0, &SolverConfig::default()).unwrap();
    assert_eq!(report.termination, Termination::Converged);
    assert!(report.history.windows(2).all(|w| w[1].energy <= w[0].energy));
}

#[test]
fn rigid_motion_leaves_energy_unchanged() {
    let (p, x0) = stretched_sheet(1.3);
    let rot = Mat33::rotation(Vec3::new(1.0, 2.0, -0.5).scale(1.0 / 5.25f64.sqrt()), 0.7);
    let shift = Vec3::new(0.3, -2.0, 1.1);
    let mut q = p.clone();
    for (v, t) in p.pins.iter() {
        q.pin(*v, rot.mul_vec(t) + shift).unwrap();
    }
    let moved: Vec<Vec3> = x0.iter().map(|v| rot.mul_vec(v) + shift).collect();
    let cfg = SolverConfig::default();
    let (xa, ra) = newton_solve(&p, &x0, &cfg).unwrap();
    let (xb, rb) = newton_solve(&q, &moved, &cfg).unwrap();
    assert!((ra.final_record().energy - rb.final_record().energy).abs() < 1e-10);
    for (a, b) in xa.iter().zip(&xb) {
        assert!((rot.mul_vec(a) + shift - *b).norm() < 1e-7);
    }
}

#[test]
fn gravity_lowers_the_free_sheet() {
    let (mut p, x0) = stretched_sheet(1.2);
    p.external_force = Vec3::new(0.0, 0.0, -0.01);
    // break the planar symmetry so the sag direction is reachable
    let x0: Vec<Vec3> = x0
        .iter()
        .map(|v| *v + Vec3::new(0.0, 0.0, -1e-3 * v.x() * (1.2 - v.x())))
        .collect();
    let (x, report) = newton_solve(&p, &x0, &SolverConfig::default()).unwrap();
    assert_eq!(report.termination, Termination::Converged);
    assert!(x[60].z() < 0.0);
}
