//! Central finite-difference oracles over 3×2 matrices.

use crate::linalg::{Mat32, Mat6};

/// Default step for first-derivative stencils.
pub const DEFAULT_STEP: f64 = 1e-5;
/// Default step for the second-difference Hessian stencil. Rounding error
/// there scales as `ε |ψ| / h²`, which at `1e-5` is already ~1e-5; truncation
/// dominates above ~1e-4.
pub const HESSIAN_STEP: f64 = 4e-5;

fn shifted(f: &Mat32, k: usize, delta: f64) -> Mat32 {
    let mut v = f.to_flat();
    v[k] += delta;
    Mat32::from_row_slice(&v)
}

/// Entrywise central differences `(ψ(F + hE) − ψ(F − hE)) / 2h`.
pub fn fd_gradient(func: impl Fn(&Mat32) -> f64, f: &Mat32, h: f64) -> Mat32 {
    assert!(h > 0.0, "finite-difference step must be positive");
    let mut out = [0.0; 6];
    for (k, o) in out.iter_mut().enumerate() {
        *o = (func(&shifted(f, k, h)) - func(&shifted(f, k, -h))) / (2.0 * h);
    }
    Mat32::from_row_slice(&out)
}

/// Second-order central stencil for the 6×6 Hessian of a scalar function,
/// symmetrized as `(A + Aᵀ)/2`.
pub fn fd_hessian6(func: impl Fn(&Mat32) -> f64, f: &Mat32, h: f64) -> Mat6 {
    assert!(h > 0.0, "finite-difference step must be positive");
    let base = f.to_flat();
    let eval = |di: (usize, f64), dj: (usize, f64)| {
        let mut v = base;
        v[di.0] += di.1;
        v[dj.0] += dj.1;
        func(&Mat32::from_row_slice(&v))
    };
    let center = func(f);
    let mut a = [[0.0; 6]; 6];
    for i in 0..6 {
        a[i][i] = (eval((i, h), (i, 0.0)) - 2.0 * center + eval((i, -h), (i, 0.0))) / (h * h);
        for j in 0..i {
            let v = (eval((i, h), (j, h)) - eval((i, h), (j, -h)) - eval((i, -h), (j, h)) + eval((i, -h), (j, -h)))
                / (4.0 * h * h);
            a[i][j] = v;
            a[j][i] = v;
        }
    }
    a
}

/// Directional central difference of a matrix-valued function,
/// `(G(F + hḞ) − G(F − hḞ)) / 2h`.
pub fn fd_directional(func: impl Fn(&Mat32) -> Mat32, f: &Mat32, dir: &Mat32, h: f64) -> Mat32 {
    (func(&(*f + *dir * h)) - func(&(*f - *dir * h))) * (0.5 / h)
}

/// Scalar central difference.
pub fn fd_scalar(func: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (func(x + h) - func(x - h)) / (2.0 * h)
}
