//! Thin SVD of 3×2 deformation gradients and its first-order variation.
//!
//! Conventions: `σ1 ≥ σ2 ≥ 0`, `det U = det V = +1`, and the third column of
//! `U` is the deformed surface normal `u1 × u2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Rate, Result};
use crate::linalg::{Mat22, Mat32, Mat33, Vec2, Vec3};

/// Absolute threshold below which a singular value (or a sum/difference of
/// singular values) is treated as zero.
pub const EPS_SIGMA: f64 = 1e-10;

/// Relative noise floor used when completing `U` for rank-deficient inputs.
const RANK_FLOOR: f64 = 1e-13;

/// `F = U · pad(σ1, σ2) · Vᵀ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Svd32 {
    pub u: Mat33,
    pub sigma: [f64; 2],
    pub v: Mat22,
}

impl Svd32 {
    /// Builds an SVD from explicit factors. The caller is responsible for the
    /// orientation conventions.
    pub fn from_parts(u: Mat33, sigma: [f64; 2], v: Mat22) -> Self {
        Svd32 { u, sigma, v }
    }

    pub fn sigma1(&self) -> f64 {
        self.sigma[0]
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma[1]
    }

    /// Deformed surface normal (third column of `U`).
    pub fn normal(&self) -> Vec3 {
        self.u.col(2)
    }

    /// `U · c · Vᵀ` for a coefficient matrix `c` expressed in the SVD frame.
    pub fn lift(&self, coeffs: &Mat32) -> Mat32 {
        self.u.mul32(coeffs).mul22_t(&self.v)
    }

    /// `Uᵀ · m · V`: coordinates of `m` in the SVD frame.
    pub fn project(&self, m: &Mat32) -> Mat32 {
        self.u.tr_mul32(m).mul22(&self.v)
    }

    pub fn reconstruct(&self) -> Mat32 {
        self.lift(&Mat32::pad_diag(self.sigma[0], self.sigma[1]))
    }
}

/// Smallest-magnitude coordinate axis, used to seed Gram–Schmidt completion.
fn least_aligned_axis(dirs: &[Vec3]) -> Vec3 {
    let mut best = 0;
    let mut best_score = f64::INFINITY;
    for k in 0..3 {
        let score: f64 = dirs.iter().map(|d| d.0[k].abs()).sum();
        if score < best_score {
            best_score = score;
            best = k;
        }
    }
    let mut e = Vec3::ZERO;
    e.0[best] = 1.0;
    e
}

fn complete_against(u1: &Vec3) -> Vec3 {
    let e = least_aligned_axis(std::slice::from_ref(u1));
    let w = e - u1.scale(u1.dot(&e));
    w.scale(1.0 / w.norm())
}

/// Thin SVD of a 3×2 matrix.
///
/// `V` comes from the closed-form eigendecomposition of `FᵀF` (rotation angle
/// `½·atan2(2c01, c00 − c11)`, which is zero at exact ties). `U`'s first two
/// columns are `F vᵢ` normalized, the second orthogonalized against the
/// first; deficient columns are completed by Gram–Schmidt and the third column
/// is `u1 × u2`.
pub fn svd32(f: &Mat32) -> Svd32 {
    let c = f.gram();
    let (a, b, d) = (c.0[0][0], c.0[0][1], c.0[1][1]);
    let theta = 0.5 * (2.0 * b).atan2(a - d);
    let (sn, cs) = theta.sin_cos();
    let v1 = Vec2::new(cs, sn);
    let v2 = Vec2::new(-sn, cs);
    let v = Mat22::from_cols(v1, v2);

    let lambda1 = 0.5 * (a + d) + (0.5 * (a - d)).hypot(b);
    let sigma1 = lambda1.max(0.0).sqrt();
    // σ1σ2 is the area spanned by the columns; dividing avoids the
    // cancellation in the smaller eigenvalue of FᵀF.
    let area = f.col(0).cross(&f.col(1)).norm();
    let sigma2 = if sigma1 > 0.0 { (area / sigma1).min(sigma1) } else { 0.0 };

    let floor = RANK_FLOOR * f.norm().max(1.0);
    let w1 = f.mul_vec(&v1);
    let n1 = w1.norm();
    let u1 = if n1 > floor {
        w1.scale(1.0 / n1)
    } else {
        Vec3::new(1.0, 0.0, 0.0)
    };

    let fv2 = f.mul_vec(&v2);
    let w2 = fv2 - u1.scale(u1.dot(&fv2));
    let n2 = w2.norm();
    let u2 = if n2 > floor {
        w2.scale(1.0 / n2)
    } else {
        complete_against(&u1)
    };
    let u3 = u1.cross(&u2);

    Svd32 {
        u: Mat33::from_cols(u1, u2, u3),
        sigma: [sigma1, sigma2],
        v,
    }
}

/// Rates `(σ̇1, σ̇2, ωx, ωy, ωz, α)` induced by a velocity `Ḟ`.
///
/// `ω` parameterizes the skew matrix `UᵀU̇` and `α` parameterizes `V̇ᵀV`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvdRates {
    pub sigma_dot: [f64; 2],
    /// `(ωx, ωy, ωz)`
    pub omega: [f64; 3],
    pub alpha: f64,
}

impl SvdRates {
    /// `Uᵀ Ḟ V` rebuilt from the rates.
    pub fn frame_velocity(&self, svd: &Svd32) -> Mat32 {
        let [s1, s2] = svd.sigma;
        let [wx, wy, wz] = self.omega;
        let al = self.alpha;
        Mat32([
            [self.sigma_dot[0], -(s2 * wz + s1 * al)],
            [s1 * wz + s2 * al, self.sigma_dot[1]],
            [-s1 * wy, s2 * wx],
        ])
    }

    /// The velocity `Ḟ` these rates describe.
    pub fn to_fdot(&self, svd: &Svd32) -> Mat32 {
        svd.lift(&self.frame_velocity(svd))
    }
}

/// Differentiates the SVD along `fdot`.
///
/// With `W = Uᵀ Ḟ V` and `b = W12`, `c = W21`, the in-plane rotations solve
/// `σ2 ωz + σ1 α = −b`, `σ1 ωz + σ2 α = c`.
pub fn svd_rates(svd: &Svd32, fdot: &Mat32) -> Result<SvdRates> {
    let [s1, s2] = svd.sigma;
    if s1 <= EPS_SIGMA {
        return Err(Error::DegenerateRates { which: Rate::OmegaY });
    }
    if s2 <= EPS_SIGMA {
        return Err(Error::DegenerateRates { which: Rate::OmegaX });
    }
    if (s1 - s2).abs() <= EPS_SIGMA || s1 + s2 <= EPS_SIGMA {
        return Err(Error::DegenerateRates { which: Rate::InPlane });
    }
    let w = svd.project(fdot);
    let b = w[(0, 1)];
    let c = w[(1, 0)];
    let gap = s1 * s1 - s2 * s2;
    Ok(SvdRates {
        sigma_dot: [w[(0, 0)], w[(1, 1)]],
        omega: [w[(2, 1)] / s2, -w[(2, 0)] / s1, (b * s2 + c * s1) / gap],
        alpha: -(b * s1 + c * s2) / gap,
    })
}

/// `U · [[a, b], [c, d], [e, f]] · Vᵀ` for coefficients in row-major order.
pub fn lifted_perturbation(svd: &Svd32, coeffs: [f64; 6]) -> Mat32 {
    svd.lift(&Mat32::from_row_slice(&coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_svd(s1: f64, s2: f64) -> Svd32 {
        Svd32::from_parts(Mat33::IDENTITY, [s1, s2], Mat22::IDENTITY)
    }

    #[test]
    fn identity_is_its_own_svd() {
        let s = svd32(&Mat32::IDENTITY);
        assert_eq!(s.sigma, [1.0, 1.0]);
        assert!((s.u - Mat33::IDENTITY).max_abs() < 1e-15);
        assert!((s.v - Mat22::IDENTITY).max_abs() < 1e-15);
    }

    #[test]
    fn ordered_diagonal() {
        let s = svd32(&Mat32::pad_diag(2.0, 1.0));
        assert!((s.sigma1() - 2.0).abs() < 1e-15);
        assert!((s.sigma2() - 1.0).abs() < 1e-15);
        assert!((s.u - Mat33::IDENTITY).max_abs() < 1e-15);
        assert!((s.v - Mat22::IDENTITY).max_abs() < 1e-15);
    }

    #[test]
    fn swapped_diagonal_keeps_positive_orientation() {
        let f = Mat32::pad_diag(1.0, 3.0);
        let s = svd32(&f);
        assert!((s.sigma1() - 3.0).abs() < 1e-14);
        assert!((s.u.determinant() - 1.0).abs() < 1e-14);
        assert!((s.v.determinant() - 1.0).abs() < 1e-14);
        assert!((s.reconstruct() - f).max_abs() < 1e-14);
    }

    #[test]
    fn zero_matrix_gets_orthonormal_completion() {
        let s = svd32(&Mat32::ZERO);
        assert_eq!(s.sigma, [0.0, 0.0]);
        assert!((s.u.transpose().matmul(&s.u) - Mat33::IDENTITY).max_abs() < 1e-15);
        assert!((s.u.determinant() - 1.0).abs() < 1e-15);
        assert!((s.v.determinant() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rank_one_input() {
        let f = Mat32([[1.0, 2.0], [0.5, 1.0], [-1.0, -2.0]]);
        let s = svd32(&f);
        assert!(s.sigma2().abs() < 1e-14);
        assert!((s.reconstruct() - f).norm() < 1e-12 * f.norm());
        assert!((s.u.transpose().matmul(&s.u) - Mat33::IDENTITY).max_abs() < 1e-12);
    }

    #[test]
    fn normal_rotation_rates() {
        let r = svd_rates(&diag_svd(2.0, 1.0), &Mat32::unit(2, 0)).unwrap();
        assert_eq!(r.sigma_dot, [0.0, 0.0]);
        assert_eq!(r.omega, [0.0, -0.5, 0.0]);
        assert_eq!(r.alpha, 0.0);
    }

    #[test]
    fn in_plane_rotation_rates() {
        let fdot = Mat32([[0.0, -1.0], [1.0, 0.0], [0.0, 0.0]]);
        let r = svd_rates(&diag_svd(2.0, 1.0), &fdot).unwrap();
        assert!((r.omega[2] - 1.0 / 3.0).abs() < 1e-15);
        assert!((r.alpha - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.sigma_dot, [0.0, 0.0]);
        assert!((r.to_fdot(&diag_svd(2.0, 1.0)) - fdot).max_abs() < 1e-15);
    }

    #[test]
    fn repeated_singular_values_are_degenerate() {
        let fdot = Mat32([[0.0, 1.0], [-1.0, 0.0], [0.0, 0.0]]);
        let err = svd_rates(&diag_svd(1.0, 1.0), &fdot).unwrap_err();
        assert!(matches!(err, Error::DegenerateRates { which: Rate::InPlane }));
        let err = svd_rates(&diag_svd(1.0, 0.0), &fdot).unwrap_err();
        assert!(matches!(err, Error::DegenerateRates { which: Rate::OmegaX }));
    }

    #[test]
    fn lifted_perturbation_in_identity_frame() {
        let s = diag_svd(2.0, 1.0);
        assert_eq!(
            lifted_perturbation(&s, [1.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
            Mat32::unit(0, 0)
        );
        let m = lifted_perturbation(&s, [0.0, 0.0, 0.0, 0.0, 0.3, -0.7]);
        assert_eq!(m, Mat32([[0.0, 0.0], [0.0, 0.0], [0.3, -0.7]]));
    }
}
