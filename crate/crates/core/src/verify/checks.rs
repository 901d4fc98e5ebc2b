//! Randomized verification of every closed form against independent oracles.
//!
//! Each check draws `trials` seeded inputs, measures a nonnegative error and
//! compares the maximum against a fixed tolerance. Errors described as
//! "scaled" are divided by `max(1, s)` where `s` is the magnitude of the
//! analytic quantity, because the finite-difference and rounding error of
//! the sheet energy grow with its stiffness as `I3 → 0`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::energy::{energy_eigensystem, energy_gradient, energy_hvp, sheet_eigensystem, EnergyModel, NeoHookeanSheet};
use crate::error::{Error, Invariant, Result};
use crate::fem::assembly::{assemble, energy_and_gradient, flatten, sparse_mul, total_energy, HessianMode};
use crate::fem::newton::{newton_solve, solve_spd, SolverConfig};
use crate::fem::problem::MembraneProblem;
use crate::invariants::{invariant_eigensystem, invariant_gradients, invariant_hvp_single, invariants, EigenSystem6};
use crate::linalg::{Mat22, Mat32, Mat33, Vec3};
use crate::par::map_indexed;
use crate::psd::project_psd;
use crate::svd::{lifted_perturbation, svd32, svd_rates, Svd32};
use crate::verify::fd::{fd_directional, fd_gradient, fd_hessian6, fd_scalar, DEFAULT_STEP, HESSIAN_STEP};
use crate::verify::jacobi::{jacobi_eigen6, jacobi_eigen_sym, DenseSym};
use crate::verify::sampling::{random_rotation, sample_f, trial_rng, uniform_mat32, Region};

pub type HvpFn = fn(Invariant, &Svd32, &Mat32) -> Result<Mat32>;

/// Kernels under test. Swapping one out lets the suite be run against a
/// deliberately broken implementation.
#[derive(Clone, Copy)]
pub struct Kernels {
    pub invariant_hvp: HvpFn,
}

impl Default for Kernels {
    fn default() -> Self {
        Kernels {
            invariant_hvp: invariant_hvp_single,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub trial: usize,
    /// Flattened input: `F` row-major for pointwise checks, vertex positions
    /// for mesh checks.
    pub input: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub trials: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub counterexample: Option<Counterexample>,
}

/// Per-trial context handed to a check body.
pub struct Trial<'a> {
    pub rng: ChaCha8Rng,
    pub f: Mat32,
    pub svd: Svd32,
    pub kernels: &'a Kernels,
    input: Vec<f64>,
}

impl Trial<'_> {
    fn direction(&mut self) -> Mat32 {
        uniform_mat32(&mut self.rng, 1.0)
    }

    /// Replaces the recorded input (for mesh checks).
    fn record(&mut self, input: Vec<f64>) {
        self.input = input;
    }
}

type Body = Box<dyn Fn(&mut Trial) -> Result<f64> + Sync + Send>;

struct Check {
    name: String,
    tolerance: f64,
    region: Region,
    body: Body,
}

fn check(
    name: impl Into<String>,
    tolerance: f64,
    region: Region,
    body: impl Fn(&mut Trial) -> Result<f64> + Sync + Send + 'static,
) -> Check {
    Check {
        name: name.into(),
        tolerance,
        region,
        body: Box::new(body),
    }
}

const INVARIANTS: [Invariant; 3] = [Invariant::I1, Invariant::I2, Invariant::I3];

fn invariant_value(which: Invariant, f: &Mat32) -> f64 {
    let inv = invariants(&svd32(f));
    match which {
        Invariant::I1 => inv.i1,
        Invariant::I2 => f.norm_squared(),
        Invariant::I3 => inv.i3,
    }
}

fn invariant_gradient(which: Invariant, f: &Mat32) -> Mat32 {
    invariant_gradients(&svd32(f), f)[which as usize]
}

fn scaled(err: f64, magnitude: f64) -> f64 {
    err / magnitude.max(1.0)
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}

fn sheet() -> NeoHookeanSheet {
    NeoHookeanSheet { mu: 1.0 }
}

fn sheet_psi(f: &Mat32) -> f64 {
    sheet()
        .evaluate(&invariants(&svd32(f)))
        .map(|d| d.psi)
        .unwrap_or(f64::NAN)
}

fn spectrum_scale(l: &[f64]) -> f64 {
    l.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

fn svd_checks() -> Vec<Check> {
    vec![
        check("svd_reconstruction", 1e-12, Region::Any, |t| {
            Ok((t.f - t.svd.reconstruct()).norm() / t.f.norm().max(1.0))
        }),
        check("svd_orthogonality", 1e-12, Region::Any, |t| {
            let u = (t.svd.u.transpose().matmul(&t.svd.u) - Mat33::IDENTITY).norm();
            let v = (t.svd.v.transpose().matmul(&t.svd.v) - Mat22::IDENTITY).norm();
            Ok(u.max(v))
        }),
        check("svd_orientation", 1e-12, Region::Any, |t| {
            let s = &t.svd;
            let order = (s.sigma[1] - s.sigma[0]).max(-s.sigma[1]).max(0.0);
            let normal = (s.normal() - s.u.col(0).cross(&s.u.col(1))).norm();
            Ok((s.u.determinant() - 1.0)
                .abs()
                .max((s.v.determinant() - 1.0).abs())
                .max(order)
                .max(normal))
        }),
        check("svd_rate_consistency", 1e-10, Region::Separated, |t| {
            let fdot = t.direction();
            let rates = svd_rates(&t.svd, &fdot)?;
            Ok((rates.frame_velocity(&t.svd) - t.svd.project(&fdot)).max_abs())
        }),
        check("svd_first_order_prediction", 1e-8, Region::Separated, |t| {
            let fdot = t.direction();
            let h = DEFAULT_STEP;
            let rates = svd_rates(&t.svd, &fdot)?;
            let moved = svd32(&(t.f + fdot * h));
            Ok((0..2)
                .map(|i| (moved.sigma[i] - (t.svd.sigma[i] + h * rates.sigma_dot[i])).abs())
                .fold(0.0, f64::max))
        }),
        check("svd_in_plane_keeps_normal", 1e-8, Region::Nondegenerate, |t| {
            let mut c = t.direction().to_flat();
            c[4] = 0.0;
            c[5] = 0.0;
            let fdot = lifted_perturbation(&t.svd, c);
            let moved = svd32(&(t.f + fdot * DEFAULT_STEP));
            Ok((moved.normal() - t.svd.normal()).norm())
        }),
        check("lifted_perturbation_round_trip", 1e-12, Region::Any, |t| {
            let c = t.direction();
            Ok((t.svd.project(&lifted_perturbation(&t.svd, c.to_flat())) - c).max_abs())
        }),
    ]
}

fn invariant_checks() -> Vec<Check> {
    let mut out = vec![check("invariant_identities", 1e-12, Region::Any, |t| {
        let inv = invariants(&t.svd);
        Ok((inv.i1 * inv.i1 - inv.i2 - 2.0 * inv.i3)
            .abs()
            .max((inv.i2 - t.f.norm_squared()).abs()))
    })];
    for which in INVARIANTS {
        out.push(check(
            format!("gradient_fd_{which}"),
            1e-6,
            Region::Nondegenerate,
            move |t| {
                let fd = fd_gradient(|m| invariant_value(which, m), &t.f, DEFAULT_STEP);
                Ok((fd - invariant_gradients(&t.svd, &t.f)[which as usize]).max_abs())
            },
        ));
    }
    for which in INVARIANTS {
        out.push(check(
            format!("hvp_fd_{which}"),
            1e-6,
            Region::Nondegenerate,
            move |t| {
                let fdot = t.direction();
                let fd = fd_directional(|m| invariant_gradient(which, m), &t.f, &fdot, DEFAULT_STEP);
                Ok((fd - (t.kernels.invariant_hvp)(which, &t.svd, &fdot)?).max_abs())
            },
        ));
    }
    out.push(check("hvp_exact_I2", 1e-12, Region::Any, |t| {
        let fdot = t.direction();
        Ok(((t.kernels.invariant_hvp)(Invariant::I2, &t.svd, &fdot)? - fdot * 2.0).max_abs())
    }));
    out.push(check("hvp_linearity", 1e-12, Region::Nondegenerate, |t| {
        let (x, y) = (t.direction(), t.direction());
        let (a, b): (f64, f64) = (t.rng.random_range(-1.0..1.0), t.rng.random_range(-1.0..1.0));
        let mut err = 0.0_f64;
        for which in INVARIANTS {
            let h = |m: &Mat32| (t.kernels.invariant_hvp)(which, &t.svd, m);
            err = err.max((h(&(x * a + y * b))? - (h(&x)? * a + h(&y)? * b)).max_abs());
        }
        Ok(err)
    }));
    out.push(check("hvp_symmetry", 1e-10, Region::Nondegenerate, |t| {
        let (x, y) = (t.direction(), t.direction());
        let mut err = 0.0_f64;
        for which in INVARIANTS {
            let h = |m: &Mat32| (t.kernels.invariant_hvp)(which, &t.svd, m);
            err = err.max((x.dot(&h(&y)?) - y.dot(&h(&x)?)).abs());
        }
        Ok(err)
    }));
    for which in INVARIANTS {
        out.push(check(
            format!("eigen_orthonormality_{which}"),
            1e-10,
            Region::Nondegenerate,
            move |t| Ok(invariant_eigensystem(which, &t.svd)?.orthonormality_error()),
        ));
        out.push(check(
            format!("eigen_residual_{which}"),
            1e-8,
            Region::Nondegenerate,
            move |t| {
                let e = invariant_eigensystem(which, &t.svd)?;
                let mut err = 0.0_f64;
                for p in &e.pairs {
                    let hq = (t.kernels.invariant_hvp)(which, &t.svd, &p.q)?;
                    err = err.max(scaled((hq - p.q * p.lambda).norm(), p.lambda.abs()));
                }
                Ok(err)
            },
        ));
        out.push(check(
            format!("eigen_reconstruction_{which}"),
            1e-8,
            Region::Nondegenerate,
            move |t| {
                let fdot = t.direction();
                let e = invariant_eigensystem(which, &t.svd)?;
                Ok((e.apply(&fdot) - (t.kernels.invariant_hvp)(which, &t.svd, &fdot)?).norm())
            },
        ));
        out.push(check(
            format!("eigen_padding_{which}"),
            1e-12,
            Region::Nondegenerate,
            move |t| Ok(padding_error(&invariant_eigensystem(which, &t.svd)?, &t.svd)),
        ));
        out.push(check(
            format!("eigen_spectrum_oracle_{which}"),
            1e-5,
            Region::Nondegenerate,
            move |t| {
                let fd = fd_hessian6(|m| invariant_value(which, m), &t.f, HESSIAN_STEP);
                let oracle = jacobi_eigen6(&fd)?;
                Ok(max_abs_diff(
                    &invariant_eigensystem(which, &t.svd)?.sorted_eigenvalues(),
                    &oracle.values,
                ))
            },
        ));
    }
    out.push(check("i1_null_modes", 1e-12, Region::Nondegenerate, |t| {
        let e = invariant_eigensystem(Invariant::I1, &t.svd)?;
        let mut err = 0.0_f64;
        for slot in [0, 1, EigenSystem6::FLIP] {
            err = err.max((t.kernels.invariant_hvp)(Invariant::I1, &t.svd, &e.pairs[slot].q)?.max_abs());
        }
        Ok(err)
    }));
    out
}

/// In-plane slots must have a zero third row in the SVD frame, normal slots a
/// zero upper 2×2 block.
pub fn padding_error(e: &EigenSystem6, svd: &Svd32) -> f64 {
    let mut err = 0.0_f64;
    for (slot, p) in e.pairs.iter().enumerate() {
        let c = svd.project(&p.q);
        if slot < EigenSystem6::NORMAL_E {
            err = err.max(c[(2, 0)].abs()).max(c[(2, 1)].abs());
        } else {
            for r in 0..2 {
                for k in 0..2 {
                    err = err.max(c[(r, k)].abs());
                }
            }
        }
    }
    err
}

/// Block entries `Dᵢ : H : Dⱼ` of the sheet Hessian, via the generic HVP.
pub fn sheet_block(model: &NeoHookeanSheet, svd: &Svd32, f: &Mat32) -> Result<[[f64; 2]; 2]> {
    let d = [svd.lift(&Mat32::unit(0, 0)), svd.lift(&Mat32::unit(1, 1))];
    let mut b = [[0.0; 2]; 2];
    for j in 0..2 {
        let hd = energy_hvp(model, svd, f, &d[j])?;
        for i in 0..2 {
            b[i][j] = d[i].dot(&hd);
        }
    }
    Ok(b)
}

/// Analytic pairing check: the slot holding the lift of `(β + γ, 4 I3)` must
/// carry the larger eigenvalue of the oracle-diagonalized block. Returns the
/// scaled eigenvalue mismatch plus the misalignment of the eigenmatrix.
pub fn pairing_error(model: &NeoHookeanSheet, svd: &Svd32, f: &Mat32) -> Result<f64> {
    let [s1, s2] = svd.sigma;
    let i3 = s1 * s2;
    let beta = 3.0 * (s2 * s2 - s1 * s1);
    let gamma = (16.0 * i3 * i3 + beta * beta).sqrt();
    let raw = Mat32::pad_diag(beta + gamma, 4.0 * i3);
    let q_plus = svd.lift(&raw) * (1.0 / raw.norm());

    let e = sheet_eigensystem(model, svd)?;
    let slot = e
        .pairs
        .iter()
        .enumerate()
        .take(2)
        .max_by(|a, b| a.1.q.dot(&q_plus).abs().total_cmp(&b.1.q.dot(&q_plus).abs()))
        .map(|(i, _)| i)
        .expect("two block slots");
    let paired = e.pairs[slot];
    let block = sheet_block(model, svd, f)?;
    let oracle = jacobi_eigen_sym(&DenseSym::from_row_major(
        2,
        vec![block[0][0], block[0][1], block[1][0], block[1][1]],
    )?)?;
    let larger = oracle.values[1];
    let misalignment = 1.0 - paired.q.dot(&q_plus).abs();
    Ok(scaled((paired.lambda - larger).abs(), larger.abs()).max(misalignment))
}

fn energy_checks() -> Vec<Check> {
    vec![
        check("sheet_partials_fd (scaled)", 1e-7, Region::Sheet, |t| {
            // relative step: ψ's derivatives in I3 scale with powers of 1/I3
            let inv = invariants(&t.svd);
            let h = DEFAULT_STEP * inv.i3;
            let at = |i3: f64| sheet().evaluate(&crate::invariants::Invariants { i3, ..inv });
            let d = at(inv.i3)?;
            let f3 = fd_scalar(|x| at(x).map(|d| d.psi).unwrap_or(f64::NAN), inv.i3, h);
            let f33 = fd_scalar(|x| at(x).map(|d| d.grad[2]).unwrap_or(f64::NAN), inv.i3, h);
            Ok(scaled((f3 - d.grad[2]).abs(), d.grad[2].abs()).max(scaled((f33 - d.hess[2][2]).abs(), d.hess[2][2])))
        }),
        check("sheet_gradient_fd (scaled)", 1e-6, Region::Sheet, |t| {
            let g = energy_gradient(&sheet(), &t.svd, &t.f)?;
            let fd = fd_gradient(sheet_psi, &t.f, DEFAULT_STEP);
            Ok(scaled((fd - g).max_abs(), g.max_abs()))
        }),
        check("sheet_hvp_fd (scaled)", 1e-5, Region::Sheet, |t| {
            let fdot = t.direction();
            let h = energy_hvp(&sheet(), &t.svd, &t.f, &fdot)?;
            let fd = fd_directional(
                |m| energy_gradient(&sheet(), &svd32(m), m).unwrap_or(Mat32::ZERO * f64::NAN),
                &t.f,
                &fdot,
                DEFAULT_STEP,
            );
            Ok(scaled((fd - h).max_abs(), h.max_abs()))
        }),
        check("sheet_hvp_symmetry", 1e-10, Region::Sheet, |t| {
            let (x, y) = (t.direction(), t.direction());
            let hx = energy_hvp(&sheet(), &t.svd, &t.f, &x)?;
            let hy = energy_hvp(&sheet(), &t.svd, &t.f, &y)?;
            Ok((x.dot(&hy) - y.dot(&hx)).abs())
        }),
        check("sheet_hessian_structure", 1e-10, Region::Sheet, |t| {
            let fdot = t.direction();
            let mu = sheet().mu;
            let i3 = invariants(&t.svd).i3;
            let g3 = invariant_gradients(&t.svd, &t.f)[2];
            let h3 = (t.kernels.invariant_hvp)(Invariant::I3, &t.svd, &fdot)?;
            let explicit = (fdot + g3 * (3.0 * g3.dot(&fdot) / i3.powi(4)) - h3 * (1.0 / i3.powi(3))) * mu;
            let h = energy_hvp(&sheet(), &t.svd, &t.f, &fdot)?;
            Ok((h - explicit).max_abs())
        }),
        check("sheet_reduced_block", 1e-10, Region::Sheet, |t| {
            let mu = sheet().mu;
            let [s1, s2] = t.svd.sigma;
            let i3 = s1 * s2;
            let b = sheet_block(&sheet(), &t.svd, &t.f)?;
            let expect = [
                [mu * (1.0 + 3.0 * s2 * s2 / i3.powi(4)), 2.0 * mu / i3.powi(3)],
                [2.0 * mu / i3.powi(3), mu * (1.0 + 3.0 * s1 * s1 / i3.powi(4))],
            ];
            let mut err = 0.0_f64;
            for i in 0..2 {
                for j in 0..2 {
                    err = err.max((b[i][j] - expect[i][j]).abs());
                }
            }
            Ok(err)
        }),
        check("sheet_eigen_orthonormality", 1e-10, Region::Sheet, |t| {
            Ok(sheet_eigensystem(&sheet(), &t.svd)?.orthonormality_error())
        }),
        check("sheet_eigen_residual", 1e-8, Region::Sheet, |t| {
            let e = sheet_eigensystem(&sheet(), &t.svd)?;
            let mut err = 0.0_f64;
            for p in &e.pairs {
                let hq = energy_hvp(&sheet(), &t.svd, &t.f, &p.q)?;
                err = err.max(scaled((hq - p.q * p.lambda).norm(), p.lambda.abs()));
            }
            Ok(err)
        }),
        check("sheet_eigen_reconstruction", 1e-8, Region::Sheet, |t| {
            let fdot = t.direction();
            let e = sheet_eigensystem(&sheet(), &t.svd)?;
            Ok((e.apply(&fdot) - energy_hvp(&sheet(), &t.svd, &t.f, &fdot)?).norm())
        }),
        check("sheet_matches_generic", 1e-10, Region::Sheet, |t| {
            let a = sheet_eigensystem(&sheet(), &t.svd)?.sorted_eigenvalues();
            let b = energy_eigensystem(&sheet(), &t.svd)?.sorted_eigenvalues();
            Ok(max_abs_diff(&a, &b))
        }),
        check("sheet_spectrum_oracle (scaled)", 1e-5, Region::Sheet, |t| {
            let fd = fd_hessian6(sheet_psi, &t.f, HESSIAN_STEP);
            let oracle = jacobi_eigen6(&fd)?;
            let analytic = sheet_eigensystem(&sheet(), &t.svd)?.sorted_eigenvalues();
            Ok(scaled(
                max_abs_diff(&analytic, &oracle.values),
                spectrum_scale(&analytic),
            ))
        }),
        check("sheet_pairing", 1e-8, Region::Sheet, |t| {
            pairing_error(&sheet(), &t.svd, &t.f)
        }),
        check("i3_modes_orthogonal_to_g2", 1e-12, Region::Nondegenerate, |t| {
            let e = invariant_eigensystem(Invariant::I3, &t.svd)?;
            let g2 = invariant_gradients(&t.svd, &t.f)[1];
            Ok([
                EigenSystem6::TWIST,
                EigenSystem6::FLIP,
                EigenSystem6::NORMAL_E,
                EigenSystem6::NORMAL_F,
            ]
            .iter()
            .map(|&s| e.pairs[s].q.dot(&g2).abs())
            .fold(0.0, f64::max))
        }),
        check("psd_min_eigenvalue", 1e-10, Region::Sheet, |t| {
            let p = project_psd(&sheet_eigensystem(&sheet(), &t.svd)?);
            Ok((-jacobi_eigen6(&p.to_dense())?.values[0]).max(0.0))
        }),
        check("psd_invariant_min_eigenvalue", 1e-10, Region::Nondegenerate, |t| {
            let mut err = 0.0_f64;
            for which in INVARIANTS {
                let p = project_psd(&invariant_eigensystem(which, &t.svd)?);
                err = err.max((-jacobi_eigen6(&p.to_dense())?.values[0]).max(0.0));
            }
            Ok(err)
        }),
        check("psd_idempotent_monotone", 1e-10, Region::Sheet, |t| {
            let p = project_psd(&sheet_eigensystem(&sheet(), &t.svd)?);
            let twice = p.project();
            let v = t.direction();
            let quad = v.dot(&p.apply(&v));
            let idem = (0..6)
                .map(|i| (twice.pairs[i].lambda - p.pairs[i].lambda).abs())
                .fold(0.0, f64::max);
            Ok(idem.max((-quad).max(0.0)))
        }),
    ]
}

/// Closed five-triangle fan around vertex 0, rest shape a regular pentagon.
pub fn fan_mesh() -> (Vec<Vec3>, Vec<[usize; 3]>) {
    let mut rest = vec![Vec3::ZERO];
    for k in 0..5 {
        let a = 2.0 * std::f64::consts::PI * k as f64 / 5.0;
        rest.push(Vec3::new(a.cos(), a.sin(), 0.0));
    }
    let tris = (0..5).map(|k| [0, 1 + k, 1 + (k + 1) % 5]).collect();
    (rest, tris)
}

/// Random admissible deformation of the fan: a random stretch and rotation
/// plus small per-vertex noise.
fn deformed_fan(rng: &mut ChaCha8Rng, rest: &[Vec3]) -> Vec<Vec3> {
    let rot = random_rotation(rng);
    let sx = rng.random_range(0.8..1.5);
    let sy = rng.random_range(0.8..1.5);
    rest.iter()
        .map(|p| {
            let noise = Vec3::new(
                rng.random_range(-0.1..0.1),
                rng.random_range(-0.1..0.1),
                rng.random_range(-0.1..0.1),
            );
            rot.mul_vec(&Vec3::new(sx * p.x(), sy * p.y(), 0.0)) + noise
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn random_dofs(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

fn offset(x: &[Vec3], d: &[f64], h: f64) -> Vec<Vec3> {
    x.iter()
        .enumerate()
        .map(|(v, p)| *p + Vec3([d[3 * v], d[3 * v + 1], d[3 * v + 2]]).scale(h))
        .collect()
}

fn mesh_checks() -> Vec<Check> {
    let mut out = vec![
        check("assembly_directional_fd", 1e-6, Region::Any, |t| {
            let (rest, tris) = fan_mesh();
            let problem = MembraneProblem::new(&rest, tris, sheet())?;
            let x = deformed_fan(&mut t.rng, &rest);
            t.record(flatten(&x));
            let d = random_dofs(&mut t.rng, problem.dof_count());
            let (_, g) = energy_and_gradient(&problem, &x)?;
            let h = DEFAULT_STEP;
            let fd = (total_energy(&problem, &offset(&x, &d, h))? - total_energy(&problem, &offset(&x, &d, -h))?)
                / (2.0 * h);
            Ok((fd - dot(&g, &d)).abs())
        }),
        check("assembly_gradient_fd", 1e-5, Region::Any, |t| {
            let (rest, tris) = fan_mesh();
            let problem = MembraneProblem::new(&rest, tris, sheet())?;
            let x = deformed_fan(&mut t.rng, &rest);
            t.record(flatten(&x));
            let (_, g) = energy_and_gradient(&problem, &x)?;
            let h = DEFAULT_STEP;
            let mut err = 0.0_f64;
            for k in 0..problem.dof_count() {
                let mut d = vec![0.0; problem.dof_count()];
                d[k] = 1.0;
                let fd = (total_energy(&problem, &offset(&x, &d, h))? - total_energy(&problem, &offset(&x, &d, -h))?)
                    / (2.0 * h);
                err = err.max((fd - g[k]).abs());
            }
            Ok(err)
        }),
        check("assembly_hessian_fd", 1e-4, Region::Any, |t| {
            let (rest, tris) = fan_mesh();
            let problem = MembraneProblem::new(&rest, tris, sheet())?;
            let x = deformed_fan(&mut t.rng, &rest);
            t.record(flatten(&x));
            let d = random_dofs(&mut t.rng, problem.dof_count());
            let asm = assemble(&problem, &x, HessianMode::Exact)?;
            let h = DEFAULT_STEP;
            let (_, gp) = energy_and_gradient(&problem, &offset(&x, &d, h))?;
            let (_, gm) = energy_and_gradient(&problem, &offset(&x, &d, -h))?;
            let fd: Vec<f64> = gp.iter().zip(&gm).map(|(a, b)| (a - b) / (2.0 * h)).collect();
            Ok(max_abs_diff(&sparse_mul(&asm.hessian, &d), &fd))
        }),
        check("newton_descent_direction", 0.0, Region::Any, |t| {
            let (rest, tris) = fan_mesh();
            let mut problem = MembraneProblem::new(&rest, tris, sheet())?;
            let x = deformed_fan(&mut t.rng, &rest);
            t.record(flatten(&x));
            for v in 1..=2 {
                problem.pin(v, x[v])?;
            }
            let asm = assemble(&problem, &x, HessianMode::Projected)?;
            let rhs: Vec<f64> = asm.gradient.iter().map(|g| -g).collect();
            let (dir, _) = solve_spd(&asm.hessian, &rhs)?;
            Ok(dot(&asm.gradient, &dir).max(0.0))
        }),
    ];
    out.push(check("frame_objectivity", 1e-10, Region::Any, |t| {
        let (rest, tris) = fan_mesh();
        let mut a = MembraneProblem::new(&rest, tris.clone(), sheet())?;
        let mut b = MembraneProblem::new(&rest, tris, sheet())?;
        let x = deformed_fan(&mut t.rng, &rest);
        t.record(flatten(&x));
        let rot = random_rotation(&mut t.rng);
        let shift = Vec3::new(
            t.rng.random_range(-1.0..1.0),
            t.rng.random_range(-1.0..1.0),
            t.rng.random_range(-1.0..1.0),
        );
        let moved: Vec<Vec3> = x.iter().map(|p| rot.mul_vec(p) + shift).collect();
        for v in 1..=5 {
            a.pin(v, x[v])?;
            b.pin(v, moved[v])?;
        }
        let cfg = SolverConfig::default();
        let (_, ra) = newton_solve(&a, &x, &cfg)?;
        let (_, rb) = newton_solve(&b, &moved, &cfg)?;
        Ok((ra.final_record().energy - rb.final_record().energy).abs())
    }));
    out
}

fn harness_checks() -> Vec<Check> {
    vec![
        check("jacobi_reconstruction", 1e-10, Region::Any, |t| {
            let mut a = [[0.0; 6]; 6];
            for i in 0..6 {
                for j in 0..=i {
                    let v = t.rng.random_range(-1.0..1.0);
                    a[i][j] = v;
                    a[j][i] = v;
                }
            }
            let m = DenseSym::from_mat6(&a);
            let s = jacobi_eigen_sym(&m)?;
            Ok((s.reconstruction_error(&m) / m.frobenius_norm()).max(s.orthonormality_error()))
        }),
        check("fd_convergence_order", 0.25, Region::Nondegenerate, |t| {
            // error ratio under step halving should be ≈ 4 for a central stencil
            let g = invariant_gradients(&t.svd, &t.f)[0];
            let err = |h: f64| (fd_gradient(|m| invariant_value(Invariant::I1, m), &t.f, h) - g).max_abs();
            let e = [err(1e-3), err(5e-4), err(2.5e-4)];
            Ok((e[0] / e[1] - 4.0).abs().max((e[1] / e[2] - 4.0).abs()))
        }),
    ]
}

fn all_checks() -> Vec<Check> {
    let mut v = svd_checks();
    v.extend(invariant_checks());
    v.extend(energy_checks());
    v.extend(mesh_checks());
    v.extend(harness_checks());
    v
}

/// Names of every check, in report order.
pub fn check_names() -> Vec<String> {
    all_checks().into_iter().map(|c| c.name).collect()
}

fn run_one(index: usize, c: &Check, seed: u64, trials: usize, kernels: &Kernels) -> CheckReport {
    let outcomes = map_indexed(trials, |trial| {
        let mut rng = trial_rng(seed, index, trial);
        let f = sample_f(&mut rng, c.region);
        let svd = svd32(&f);
        let mut ctx = Trial {
            rng,
            f,
            svd,
            kernels,
            input: f.to_flat().to_vec(),
        };
        let err = match (c.body)(&mut ctx) {
            Ok(e) if e.is_finite() => e,
            _ => f64::INFINITY,
        };
        (err, ctx.input)
    });
    // first trial attaining the maximum, independent of evaluation order
    let (worst, max_error) = outcomes.iter().enumerate().fold(
        (0, 0.0_f64),
        |(wi, we), (i, (e, _))| if *e > we { (i, *e) } else { (wi, we) },
    );
    let passed = max_error <= c.tolerance;
    CheckReport {
        name: c.name.clone(),
        trials,
        max_error,
        tolerance: c.tolerance,
        passed,
        counterexample: (!passed).then(|| Counterexample {
            trial: worst,
            input: outcomes[worst].1.clone(),
        }),
    }
}

/// Runs the full suite against the given kernels.
pub fn run_checks_with(seed: u64, trials: usize, kernels: &Kernels) -> Result<Vec<CheckReport>> {
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be at least 1".into()));
    }
    Ok(all_checks()
        .iter()
        .enumerate()
        .map(|(i, c)| run_one(i, c, seed, trials, kernels))
        .collect())
}

pub fn run_checks(seed: u64, trials: usize) -> Result<Vec<CheckReport>> {
    run_checks_with(seed, trials, &Kernels::default())
}

/// Runs only the named checks (report order preserved).
pub fn run_selected(seed: u64, trials: usize, kernels: &Kernels, names: &[&str]) -> Result<Vec<CheckReport>> {
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be at least 1".into()));
    }
    Ok(all_checks()
        .iter()
        .enumerate()
        .filter(|(_, c)| names.contains(&c.name.as_str()))
        .map(|(i, c)| run_one(i, c, seed, trials, kernels))
        .collect())
}

pub fn format_reports(reports: &[CheckReport]) -> String {
    let width = reports.iter().map(|r| r.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for r in reports {
        out.push_str(&format!(
            "{:<4} {:<width$}  trials={:<5} max_err={:.3e}  tol={:.1e}\n",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.trials,
            r.max_error,
            r.tolerance,
        ));
        if let Some(cx) = &r.counterexample {
            out.push_str(&format!("     counterexample (trial {}): {:?}\n", cx.trial, cx.input));
        }
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    out.push_str(&format!("{} checks, {} failed\n", reports.len(), failed));
    out
}
