//! C ABI for `membrane-eig`.
//!
//! Every function returns a [`MeigStatus`]; on failure a message is available
//! from [`meig_last_error`] on the calling thread. Matrices cross the
//! boundary row-major: `F` is 3×2 as six doubles, an eigensystem is six
//! eigenvalues plus six 3×2 eigenmatrices (36 doubles, one per row of six).
//! Panics never unwind into C; they are reported as `MEIG_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use membrane_eig::fem::newton::{newton_solve, SolverConfig, Termination};
use membrane_eig::fem::{total_energy, MembraneProblem};
use membrane_eig::verify::run_checks;
use membrane_eig::{
    energy_gradient, evaluate_model, invariant_eigensystem, invariants, sheet_eigensystem, svd32, EigenSystem6, Error,
    Invariant, Mat32, NeoHookeanSheet, Vec3,
};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeigStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    /// Singular values too close for the requested quantity.
    Degenerate = 3,
    /// `I3` below the model floor, or an inadmissible element.
    Domain = 4,
    LineSearchFailed = 5,
    LinearSolveFailed = 6,
    Io = 7,
    Panic = 8,
}

/// Opaque membrane problem (neo-Hookean sheet material).
pub struct MeigProblem {
    inner: MembraneProblem<NeoHookeanSheet>,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MeigSolveSummary {
    pub iterations: usize,
    /// 1 if the gradient tolerance was reached, 0 if `max_iters` ran out.
    pub converged: u8,
    pub energy: f64,
    pub grad_norm: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(MeigStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::DegenerateRates { .. } | Error::DegenerateHessian { .. } => MeigStatus::Degenerate,
            Error::Domain { .. } | Error::ElementDomain { .. } => MeigStatus::Domain,
            Error::LineSearchFailed { .. } => MeigStatus::LineSearchFailed,
            Error::LinearSolveFailed { .. } => MeigStatus::LinearSolveFailed,
            Error::Io(_) => MeigStatus::Io,
            _ => MeigStatus::InvalidInput,
        };
        Failure(status, e.to_string())
    }
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(msg));
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> MeigStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => MeigStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(format!("internal panic: {msg}"));
            MeigStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(MeigStatus::NullPointer, format!("`{what}` is NULL"))
}

unsafe fn read<const N: usize>(p: *const f64, what: &str) -> Result<[f64; N], Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    let mut out = [0.0; N];
    out.copy_from_slice(std::slice::from_raw_parts(p, N));
    Ok(out)
}

unsafe fn write(p: *mut f64, values: &[f64], what: &str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    std::slice::from_raw_parts_mut(p, values.len()).copy_from_slice(values);
    Ok(())
}

unsafe fn read_f(f: *const f64) -> Result<Mat32, Failure> {
    let v = read::<6>(f, "f")?;
    if !v.iter().all(|x| x.is_finite()) {
        return Err(Failure(MeigStatus::InvalidInput, "F has non-finite entries".into()));
    }
    Ok(Mat32::from_row_slice(&v))
}

unsafe fn write_eigensystem(e: &EigenSystem6, lambda: *mut f64, q: *mut f64) -> Result<(), Failure> {
    let mut qs = [0.0; 36];
    for (i, p) in e.pairs.iter().enumerate() {
        qs[6 * i..6 * i + 6].copy_from_slice(&p.q.to_flat());
    }
    write(lambda, &e.eigenvalues(), "lambda")?;
    write(q, &qs, "q")
}

unsafe fn problem_ref<'a>(p: *const MeigProblem) -> Result<&'a MeigProblem, Failure> {
    p.as_ref().ok_or_else(|| null("problem"))
}

unsafe fn problem_mut<'a>(p: *mut MeigProblem) -> Result<&'a mut MeigProblem, Failure> {
    p.as_mut().ok_or_else(|| null("problem"))
}

unsafe fn read_positions(p: *const f64, n: usize, what: &str) -> Result<Vec<Vec3>, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, 3 * n)
        .chunks_exact(3)
        .map(|c| Vec3::new(c[0], c[1], c[2]))
        .collect())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn meig_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version string"),
    };
    VERSION.as_ptr()
}

/// Message for the most recent failure on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn meig_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(std::ptr::null(), |m| m.as_ptr()))
}

/// SVD `F = U Σ Vᵀ` with `det U = det V = +1`, `σ1 ≥ σ2 ≥ 0`.
///
/// # Safety
/// `f` must point to 6 doubles, `u` to 9, `sigma` to 2 and `v` to 4.
#[no_mangle]
pub unsafe extern "C" fn meig_svd(f: *const f64, u: *mut f64, sigma: *mut f64, v: *mut f64) -> MeigStatus {
    guard(|| {
        let s = svd32(&read_f(f)?);
        write(u, &s.u.0.concat(), "u")?;
        write(sigma, &s.sigma, "sigma")?;
        write(v, &s.v.0.concat(), "v")
    })
}

/// Eigensystem of the Hessian of invariant `which` (1, 2 or 3) at `F`.
///
/// # Safety
/// `f` must point to 6 doubles, `lambda` to 6 and `q` to 36.
#[no_mangle]
pub unsafe extern "C" fn meig_invariant_eigensystem(
    which: u32,
    f: *const f64,
    lambda: *mut f64,
    q: *mut f64,
) -> MeigStatus {
    guard(|| {
        let which = match which {
            1 => Invariant::I1,
            2 => Invariant::I2,
            3 => Invariant::I3,
            other => {
                return Err(Failure(
                    MeigStatus::InvalidInput,
                    format!("invariant must be 1, 2 or 3, got {other}"),
                ))
            }
        };
        let e = invariant_eigensystem(which, &svd32(&read_f(f)?))?;
        write_eigensystem(&e, lambda, q)
    })
}

/// Closed-form eigensystem of the neo-Hookean sheet Hessian at `F`.
///
/// # Safety
/// `f` must point to 6 doubles, `lambda` to 6 and `q` to 36.
#[no_mangle]
pub unsafe extern "C" fn meig_sheet_eigensystem(mu: f64, f: *const f64, lambda: *mut f64, q: *mut f64) -> MeigStatus {
    guard(|| {
        let e = sheet_eigensystem(&NeoHookeanSheet::new(mu)?, &svd32(&read_f(f)?))?;
        write_eigensystem(&e, lambda, q)
    })
}

/// Sheet energy density and, if `grad` is not NULL, its gradient in `F`.
///
/// # Safety
/// `f` must point to 6 doubles, `psi` to 1, and `grad` to 6 or be NULL.
#[no_mangle]
pub unsafe extern "C" fn meig_sheet_energy(mu: f64, f: *const f64, psi: *mut f64, grad: *mut f64) -> MeigStatus {
    guard(|| {
        let model = NeoHookeanSheet::new(mu)?;
        let fm = read_f(f)?;
        let svd = svd32(&fm);
        let d = evaluate_model(&model, &invariants(&svd))?;
        write(psi, &[d.psi], "psi")?;
        if !grad.is_null() {
            write(grad, &energy_gradient(&model, &svd, &fm)?.to_flat(), "grad")?;
        }
        Ok(())
    })
}

/// Builds a problem from rest positions (`3·n_vertices` doubles) and
/// triangles (`3·n_triangles` zero-based indices). Release with
/// [`meig_problem_free`].
///
/// # Safety
/// Array arguments must hold the stated number of elements; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn meig_problem_new(
    rest: *const f64,
    n_vertices: usize,
    triangles: *const u32,
    n_triangles: usize,
    mu: f64,
    out: *mut *mut MeigProblem,
) -> MeigStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = std::ptr::null_mut();
        if triangles.is_null() {
            return Err(null("triangles"));
        }
        let rest = read_positions(rest, n_vertices, "rest")?;
        let tris: Vec<[usize; 3]> = std::slice::from_raw_parts(triangles, 3 * n_triangles)
            .chunks_exact(3)
            .map(|t| [t[0] as usize, t[1] as usize, t[2] as usize])
            .collect();
        if let Some(bad) = tris.iter().flatten().find(|&&v| v >= n_vertices) {
            return Err(Failure(
                MeigStatus::InvalidInput,
                format!("triangle index {bad} out of range"),
            ));
        }
        let inner = MembraneProblem::new(&rest, tris, NeoHookeanSheet::new(mu)?)?;
        *out = Box::into_raw(Box::new(MeigProblem { inner }));
        Ok(())
    })
}

/// Frees a problem; NULL is ignored.
///
/// # Safety
/// `problem` must come from [`meig_problem_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn meig_problem_free(problem: *mut MeigProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Pins `vertex` at `target` (3 doubles).
///
/// # Safety
/// `problem` must be live; `target` must point to 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn meig_problem_pin(problem: *mut MeigProblem, vertex: usize, target: *const f64) -> MeigStatus {
    guard(|| {
        let p = problem_mut(problem)?;
        let t = read::<3>(target, "target")?;
        p.inner.pin(vertex, Vec3(t))?;
        Ok(())
    })
}

/// Sets the constant per-vertex external force (3 doubles).
///
/// # Safety
/// `problem` must be live; `force` must point to 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn meig_problem_set_external_force(problem: *mut MeigProblem, force: *const f64) -> MeigStatus {
    guard(|| {
        let p = problem_mut(problem)?;
        let f = read::<3>(force, "force")?;
        if !f.iter().all(|x| x.is_finite()) {
            return Err(Failure(MeigStatus::InvalidInput, "force has non-finite entries".into()));
        }
        p.inner.external_force = Vec3(f);
        Ok(())
    })
}

/// Total energy at positions `x` (`3·n_vertices` doubles).
///
/// # Safety
/// `problem` must be live; `x` must hold `3·n_vertices` doubles and
/// `energy` must be writable.
#[no_mangle]
pub unsafe extern "C" fn meig_problem_energy(
    problem: *const MeigProblem,
    x: *const f64,
    energy: *mut f64,
) -> MeigStatus {
    guard(|| {
        let p = problem_ref(problem)?;
        let x = read_positions(x, p.inner.vertex_count, "x")?;
        write(energy, &[total_energy(&p.inner, &x)?], "energy")
    })
}

/// Quasi-static solve from `x0`; the result goes to `x_out` (both
/// `3·n_vertices` doubles, may alias). `tol ≤ 0` or `max_iters = 0` select
/// the defaults (1e-8 and 100). `summary` may be NULL.
///
/// # Safety
/// `problem` must be live; `x0` and `x_out` must hold `3·n_vertices`
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn meig_problem_solve(
    problem: *const MeigProblem,
    x0: *const f64,
    tol: f64,
    max_iters: usize,
    x_out: *mut f64,
    summary: *mut MeigSolveSummary,
) -> MeigStatus {
    guard(|| {
        let p = problem_ref(problem)?;
        let x0 = read_positions(x0, p.inner.vertex_count, "x0")?;
        if x_out.is_null() {
            return Err(null("x_out"));
        }
        let defaults = SolverConfig::default();
        let config = SolverConfig {
            tol: if tol > 0.0 { tol } else { defaults.tol },
            max_iters: if max_iters > 0 { max_iters } else { defaults.max_iters },
            ..defaults
        };
        let (x, report) = newton_solve(&p.inner, &x0, &config)?;
        let flat: Vec<f64> = x.iter().flat_map(|v| v.0).collect();
        write(x_out, &flat, "x_out")?;
        if let Some(s) = summary.as_mut() {
            let last = report.final_record();
            *s = MeigSolveSummary {
                iterations: report.iterations,
                converged: u8::from(report.termination == Termination::Converged),
                energy: last.energy,
                grad_norm: last.grad_norm,
            };
        }
        Ok(())
    })
}

/// Runs the randomized check suite; `failed` receives the number of failing
/// checks.
///
/// # Safety
/// `failed` must be writable.
#[no_mangle]
pub unsafe extern "C" fn meig_run_checks(seed: u64, trials: usize, failed: *mut usize) -> MeigStatus {
    guard(|| {
        if failed.is_null() {
            return Err(null("failed"));
        }
        let reports = run_checks(seed, trials)?;
        *failed = reports.iter().filter(|r| !r.passed).count();
        Ok(())
    })
}
