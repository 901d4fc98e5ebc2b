//! The three membrane invariants, their gradients, Hessian-vector products
//! and closed-form Hessian eigensystems.
//!
//! All Hessian formulas are written in the SVD frame: a perturbation `Ḟ` is
//! decomposed as `U · [[a, b], [c, d], [e, f]] · Vᵀ`, and the response is
//! lifted back with the same factors.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Invariant, Result};
use crate::linalg::{outer_sum6, Mat32, Mat6};
use crate::svd::{Svd32, EPS_SIGMA};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Invariants {
    /// `σ1 + σ2`
    pub i1: f64,
    /// `F : F = σ1² + σ2²`
    pub i2: f64,
    /// `σ1 σ2`
    pub i3: f64,
}

pub fn invariants(svd: &Svd32) -> Invariants {
    let [s1, s2] = svd.sigma;
    Invariants {
        i1: s1 + s2,
        i2: s1 * s1 + s2 * s2,
        i3: s1 * s2,
    }
}

/// `[∂I1/∂F, ∂I2/∂F, ∂I3/∂F]`.
pub fn invariant_gradients(svd: &Svd32, f: &Mat32) -> [Mat32; 3] {
    let [s1, s2] = svd.sigma;
    [svd.lift(&Mat32::IDENTITY), *f * 2.0, svd.lift(&Mat32::pad_diag(s2, s1))]
}

fn require(cond: bool, invariant: Invariant) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::DegenerateHessian { invariant })
    }
}

fn check_nondegenerate(which: Invariant, svd: &Svd32) -> Result<()> {
    let [s1, s2] = svd.sigma;
    match which {
        Invariant::I1 => require(s1 > EPS_SIGMA && s2 > EPS_SIGMA && s1 + s2 > EPS_SIGMA, which),
        Invariant::I2 => Ok(()),
        Invariant::I3 => require(s1 > EPS_SIGMA && s2 > EPS_SIGMA, which),
    }
}

/// `∂²Iₖ/∂F² : Ḟ` for a single invariant.
pub fn invariant_hvp_single(which: Invariant, svd: &Svd32, fdot: &Mat32) -> Result<Mat32> {
    check_nondegenerate(which, svd)?;
    let [s1, s2] = svd.sigma;
    Ok(match which {
        Invariant::I2 => *fdot * 2.0,
        Invariant::I1 => {
            let w = svd.project(fdot);
            let skew = (w[(0, 1)] - w[(1, 0)]) / (s1 + s2);
            svd.lift(&Mat32([[0.0, skew], [-skew, 0.0], [w[(2, 0)] / s1, w[(2, 1)] / s2]]))
        }
        Invariant::I3 => {
            let w = svd.project(fdot);
            svd.lift(&Mat32([
                [w[(1, 1)], -w[(1, 0)]],
                [-w[(0, 1)], w[(0, 0)]],
                [s2 / s1 * w[(2, 0)], s1 / s2 * w[(2, 1)]],
            ]))
        }
    })
}

/// Hessian-vector products of all three invariants.
pub fn invariant_hvp(svd: &Svd32, fdot: &Mat32) -> Result<[Mat32; 3]> {
    Ok([
        invariant_hvp_single(Invariant::I1, svd, fdot)?,
        invariant_hvp_single(Invariant::I2, svd, fdot)?,
        invariant_hvp_single(Invariant::I3, svd, fdot)?,
    ])
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub lambda: f64,
    pub q: Mat32,
}

/// Six eigenpairs of a fourth-order membrane Hessian.
///
/// Slot order is fixed: `0, 1` are the in-plane diagonal modes, `2` twist,
/// `3` flip, `4` and `5` the normal modes driven by the bottom-row entries
/// `e` and `f`. Eigenmatrices have unit Frobenius norm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenSystem6 {
    pub pairs: [EigenPair; 6],
}

impl EigenSystem6 {
    pub const TWIST: usize = 2;
    pub const FLIP: usize = 3;
    pub const NORMAL_E: usize = 4;
    pub const NORMAL_F: usize = 5;

    pub fn eigenvalues(&self) -> [f64; 6] {
        self.pairs.map(|p| p.lambda)
    }

    /// Eigenvalues sorted ascending.
    pub fn sorted_eigenvalues(&self) -> [f64; 6] {
        let mut l = self.eigenvalues();
        l.sort_by(f64::total_cmp);
        l
    }

    /// `Σ λᵢ (qᵢ : Ḟ) qᵢ`.
    pub fn apply(&self, fdot: &Mat32) -> Mat32 {
        self.pairs
            .iter()
            .fold(Mat32::ZERO, |acc, p| acc + p.q * (p.lambda * p.q.dot(fdot)))
    }

    /// Dense 6×6 operator on row-major flattened matrices.
    pub fn to_dense(&self) -> Mat6 {
        outer_sum6(self.pairs.iter().map(|p| (p.lambda, &p.q)))
    }

    /// `max |qᵢ : qⱼ − δᵢⱼ|`.
    pub fn orthonormality_error(&self) -> f64 {
        let mut err = 0.0_f64;
        for i in 0..6 {
            for j in 0..6 {
                let target = if i == j { 1.0 } else { 0.0 };
                err = err.max((self.pairs[i].q.dot(&self.pairs[j].q) - target).abs());
            }
        }
        err
    }
}

/// Unit-norm eigenmatrix coefficients in the SVD frame, in slot order for
/// the I1 and I3 Hessians.
pub(crate) fn frame_modes() -> [Mat32; 6] {
    let h = FRAC_1_SQRT_2;
    [
        Mat32([[h, 0.0], [0.0, h], [0.0, 0.0]]),
        Mat32([[h, 0.0], [0.0, -h], [0.0, 0.0]]),
        Mat32([[0.0, -h], [h, 0.0], [0.0, 0.0]]),
        Mat32([[0.0, h], [h, 0.0], [0.0, 0.0]]),
        Mat32::unit(2, 0),
        Mat32::unit(2, 1),
    ]
}

fn lifted(svd: &Svd32, lambdas: [f64; 6], coeffs: [Mat32; 6]) -> EigenSystem6 {
    let mut pairs = [EigenPair {
        lambda: 0.0,
        q: Mat32::ZERO,
    }; 6];
    for (p, (lambda, c)) in pairs.iter_mut().zip(lambdas.into_iter().zip(coeffs)) {
        *p = EigenPair {
            lambda,
            q: svd.lift(&c),
        };
    }
    EigenSystem6 { pairs }
}

/// Closed-form Hessian eigensystem of one invariant.
///
/// I2's Hessian is `2·Id`; its basis is the lifted unit matrices ordered
/// `E11, E22, E12, E21, E31, E32` so the slot layout matches the other two.
pub fn invariant_eigensystem(which: Invariant, svd: &Svd32) -> Result<EigenSystem6> {
    check_nondegenerate(which, svd)?;
    let [s1, s2] = svd.sigma;
    Ok(match which {
        Invariant::I1 => lifted(svd, [0.0, 0.0, 2.0 / (s1 + s2), 0.0, 1.0 / s1, 1.0 / s2], frame_modes()),
        Invariant::I2 => {
            let basis = [(0, 0), (1, 1), (0, 1), (1, 0), (2, 0), (2, 1)].map(|(r, c)| Mat32::unit(r, c));
            lifted(svd, [2.0; 6], basis)
        }
        Invariant::I3 => lifted(svd, [1.0, -1.0, 1.0, -1.0, s2 / s1, s1 / s2], frame_modes()),
    })
}
