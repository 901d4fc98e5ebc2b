//! Isotropic membrane energies `ψ(I1, I2, I3)`.
//!
//! An [`EnergyModel`] only supplies `ψ` and its partial derivatives with
//! respect to the invariants; gradients, Hessian actions and the full
//! six-mode eigensystem are assembled here by the chain rule.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Invariant, Result};
use crate::invariants::{
    frame_modes, invariant_gradients, invariant_hvp_single, invariants, EigenPair, EigenSystem6, Invariants,
};
use crate::linalg::{Mat32, Vec2};
use crate::svd::{Svd32, EPS_SIGMA};

/// `ψ` and its first and second partials with respect to `(I1, I2, I3)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ModelDerivs {
    pub psi: f64,
    /// `[∂ψ/∂I1, ∂ψ/∂I2, ∂ψ/∂I3]`
    pub grad: [f64; 3],
    /// `∂²ψ/∂Iₖ∂Iₗ`, symmetric.
    pub hess: [[f64; 3]; 3],
}

pub trait EnergyModel: Send + Sync {
    fn evaluate(&self, inv: &Invariants) -> Result<ModelDerivs>;

    fn name(&self) -> &str;
}

/// Incompressible neo-Hookean sheet, `ψ = μ/2 (I2 + I3⁻² − 3)`.
///
/// The normal stretch `1/I3` keeps volume fixed, so the energy blows up as
/// the element collapses; states with `I3 < I3_FLOOR` are rejected.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NeoHookeanSheet {
    pub mu: f64,
}

impl NeoHookeanSheet {
    pub const I3_FLOOR: f64 = 1e-6;

    pub fn new(mu: f64) -> Result<Self> {
        if mu > 0.0 && mu.is_finite() {
            Ok(NeoHookeanSheet { mu })
        } else {
            Err(Error::InvalidInput(format!("shear modulus must be positive, got {mu}")))
        }
    }

    fn check_domain(&self, i3: f64) -> Result<()> {
        if i3 >= Self::I3_FLOOR {
            Ok(())
        } else {
            Err(Error::Domain { i3 })
        }
    }
}

impl EnergyModel for NeoHookeanSheet {
    fn evaluate(&self, inv: &Invariants) -> Result<ModelDerivs> {
        self.check_domain(inv.i3)?;
        let mu = self.mu;
        let r = 1.0 / inv.i3;
        let r2 = r * r;
        let mut hess = [[0.0; 3]; 3];
        hess[2][2] = 3.0 * mu * r2 * r2;
        Ok(ModelDerivs {
            psi: 0.5 * mu * (inv.i2 + r2 - 3.0),
            grad: [0.0, 0.5 * mu, -mu * r2 * r],
            hess,
        })
    }

    fn name(&self) -> &str {
        "neo_hookean_sheet"
    }
}

pub fn evaluate_model<M: EnergyModel + ?Sized>(model: &M, inv: &Invariants) -> Result<ModelDerivs> {
    model.evaluate(inv)
}

/// Energy density `ψ(F)`.
pub fn energy_density<M: EnergyModel + ?Sized>(model: &M, svd: &Svd32) -> Result<f64> {
    Ok(model.evaluate(&invariants(svd))?.psi)
}

/// `∂ψ/∂F = Σₖ fₖ ∂Iₖ/∂F`.
pub fn energy_gradient<M: EnergyModel + ?Sized>(model: &M, svd: &Svd32, f: &Mat32) -> Result<Mat32> {
    let d = model.evaluate(&invariants(svd))?;
    let g = invariant_gradients(svd, f);
    Ok(g.iter().zip(d.grad).fold(Mat32::ZERO, |acc, (gk, fk)| acc + *gk * fk))
}

const INVARIANTS: [Invariant; 3] = [Invariant::I1, Invariant::I2, Invariant::I3];

/// `∂²ψ/∂F² : Ḟ = Σₖ fₖ (∂²Iₖ/∂F² : Ḟ) + Σₖₗ fₖₗ (gₗ : Ḟ) gₖ`.
///
/// Invariant Hessians whose coefficient is zero are skipped, so a model that
/// does not depend on I1 or I3 never hits their degeneracies.
pub fn energy_hvp<M: EnergyModel + ?Sized>(model: &M, svd: &Svd32, f: &Mat32, fdot: &Mat32) -> Result<Mat32> {
    let d = model.evaluate(&invariants(svd))?;
    let g = invariant_gradients(svd, f);
    let mut out = Mat32::ZERO;
    for (k, which) in INVARIANTS.iter().enumerate() {
        if d.grad[k] != 0.0 {
            out += invariant_hvp_single(*which, svd, fdot)? * d.grad[k];
        }
    }
    let proj = g.map(|gk| gk.dot(fdot));
    for k in 0..3 {
        let coeff: f64 = (0..3).map(|l| d.hess[k][l] * proj[l]).sum();
        if coeff != 0.0 {
            out += g[k] * coeff;
        }
    }
    Ok(out)
}

/// Eigenpairs of the symmetric matrix `[[a, b], [b, c]]`, larger first.
///
/// The rotation angle is `½·atan2(2b, a − c)`, so an exactly repeated root
/// returns the coordinate axes.
pub fn sym2_eigen(a: f64, b: f64, c: f64) -> [(f64, Vec2); 2] {
    let theta = 0.5 * (2.0 * b).atan2(a - c);
    let (sn, cs) = theta.sin_cos();
    let mean = 0.5 * (a + c);
    let radius = (0.5 * (a - c)).hypot(b);
    let det = a * c - b * b;
    // The root of larger magnitude is cancellation-free; recover the other
    // from the determinant.
    let (hi, lo) = if mean >= 0.0 {
        let hi = mean + radius;
        (hi, if hi != 0.0 { det / hi } else { 0.0 })
    } else {
        let lo = mean - radius;
        (det / lo, lo)
    };
    [(hi, Vec2::new(cs, sn)), (lo, Vec2::new(-sn, cs))]
}

fn require_nondegenerate(svd: &Svd32) -> Result<()> {
    let [s1, s2] = svd.sigma;
    if s1 <= EPS_SIGMA || s1 + s2 <= EPS_SIGMA {
        return Err(Error::DegenerateHessian {
            invariant: Invariant::I1,
        });
    }
    if s2 <= EPS_SIGMA {
        return Err(Error::DegenerateHessian {
            invariant: Invariant::I3,
        });
    }
    Ok(())
}

fn block_pair(svd: &Svd32, lambda: f64, v: Vec2) -> EigenPair {
    EigenPair {
        lambda,
        q: svd.lift(&Mat32::pad_diag(v.0[0], v.0[1])),
    }
}

/// Assembles the six-mode eigensystem for an arbitrary isotropic model.
///
/// Twist, flip and both normal modes are shared by all three invariant
/// Hessians and are orthogonal to every invariant gradient, so their
/// eigenvalues are linear combinations of the first partials. The remaining
/// pair comes from the 2×2 block on `span(D1, D2)`, `Dᵢ = U Eᵢᵢ Vᵀ`.
/// Slots `0, 1` hold the smaller and larger block mode.
pub fn energy_eigensystem<M: EnergyModel + ?Sized>(model: &M, svd: &Svd32) -> Result<EigenSystem6> {
    let d = model.evaluate(&invariants(svd))?;
    require_nondegenerate(svd)?;
    let [s1, s2] = svd.sigma;
    let [f1, f2, f3] = d.grad;

    let twist = 2.0 * f2 + 2.0 * f1 / (s1 + s2) + f3;
    let flip = 2.0 * f2 - f3;
    let normal_e = 2.0 * f2 + f1 / s1 + f3 * s2 / s1;
    let normal_f = 2.0 * f2 + f1 / s2 + f3 * s1 / s2;

    // Invariant gradients expressed in (D1, D2) coordinates.
    let ghat = [[1.0, 1.0], [2.0 * s1, 2.0 * s2], [s2, s1]];
    let mut block = [[2.0 * f2, f3], [f3, 2.0 * f2]];
    for (k, gk) in ghat.iter().enumerate() {
        for (l, gl) in ghat.iter().enumerate() {
            let fkl = d.hess[k][l];
            if fkl == 0.0 {
                continue;
            }
            for r in 0..2 {
                for c in 0..2 {
                    block[r][c] += fkl * gk[r] * gl[c];
                }
            }
        }
    }
    let [(hi, vhi), (lo, vlo)] = sym2_eigen(block[0][0], 0.5 * (block[0][1] + block[1][0]), block[1][1]);

    let modes = frame_modes();
    let pair = |slot: usize, lambda: f64| EigenPair {
        lambda,
        q: svd.lift(&modes[slot]),
    };
    Ok(EigenSystem6 {
        pairs: [
            block_pair(svd, lo, vlo),
            block_pair(svd, hi, vhi),
            pair(EigenSystem6::TWIST, twist),
            pair(EigenSystem6::FLIP, flip),
            pair(EigenSystem6::NORMAL_E, normal_e),
            pair(EigenSystem6::NORMAL_F, normal_f),
        ],
    })
}

/// Closed-form eigensystem of the incompressible neo-Hookean sheet.
///
/// With `β = 3(σ2² − σ1²)` and `γ = √(16 I3² + β²)`, the block modes are the
/// normalized lifts of `(β − γ, 4 I3)` and `(β + γ, 4 I3)` with eigenvalues
/// `μ + μ (3 I2 ∓ γ) / (2 I3⁴)`; the `+γ` root belongs to `(β + γ, 4 I3)`.
/// Slot layout matches [`energy_eigensystem`].
pub fn sheet_eigensystem(model: &NeoHookeanSheet, svd: &Svd32) -> Result<EigenSystem6> {
    let inv = invariants(svd);
    model.check_domain(inv.i3)?;
    let mu = model.mu;
    let [s1, s2] = svd.sigma;
    let i3 = inv.i3;
    let r3 = 1.0 / (i3 * i3 * i3);
    let i3_4 = i3 * i3 * i3 * i3;

    let beta = 3.0 * (s2 * s2 - s1 * s1);
    let gamma = (16.0 * i3 * i3 + beta * beta).sqrt();
    let upper = mu + mu * (3.0 * inv.i2 + gamma) / (2.0 * i3_4);
    // 3 I2 − γ = 20 I3² / (3 I2 + γ)
    let lower = mu + 10.0 * mu / ((3.0 * inv.i2 + gamma) * i3 * i3);

    // (β + γ)(β − γ) = −16 I3²: form whichever factor does not cancel and
    // divide for the other.
    let (plus, minus) = if beta >= 0.0 {
        let p = beta + gamma;
        (p, -16.0 * i3 * i3 / p)
    } else {
        let m = beta - gamma;
        (-16.0 * i3 * i3 / m, m)
    };
    let normalized = |x: f64| {
        let v = Vec2::new(x, 4.0 * i3);
        let n = v.norm();
        (n >= 1e-12).then(|| Vec2::new(v.0[0] / n, v.0[1] / n))
    };
    let (vlo, vhi) = match (normalized(minus), normalized(plus)) {
        (Some(lo), Some(hi)) => (lo, hi),
        _ => {
            let a = mu * (1.0 + 3.0 * s2 * s2 / i3_4);
            let c = mu * (1.0 + 3.0 * s1 * s1 / i3_4);
            let [(_, hi), (_, lo)] = sym2_eigen(a, 2.0 * mu * r3, c);
            (lo, hi)
        }
    };

    let modes = frame_modes();
    let pair = |slot: usize, lambda: f64| EigenPair {
        lambda,
        q: svd.lift(&modes[slot]),
    };
    Ok(EigenSystem6 {
        pairs: [
            block_pair(svd, lower, vlo),
            block_pair(svd, upper, vhi),
            pair(EigenSystem6::TWIST, mu - mu * r3),
            pair(EigenSystem6::FLIP, mu + mu * r3),
            pair(EigenSystem6::NORMAL_E, mu - mu * r3 * s2 / s1),
            pair(EigenSystem6::NORMAL_F, mu - mu * r3 * s1 / s2),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{Mat22, Mat33};
    use crate::svd::svd32;

    fn diag_svd(s1: f64, s2: f64) -> Svd32 {
        Svd32::from_parts(Mat33::IDENTITY, [s1, s2], Mat22::IDENTITY)
    }

    fn sheet() -> NeoHookeanSheet {
        NeoHookeanSheet::new(1.0).unwrap()
    }

    #[test]
    fn sheet_partials_at_stretched_state() {
        let d = sheet().evaluate(&invariants(&diag_svd(2.0, 1.0))).unwrap();
        assert_eq!(d.psi, 1.125);
        assert_eq!(d.grad, [0.0, 0.5, -0.125]);
        assert_eq!(d.hess[2][2], 3.0 / 16.0);
    }

    #[test]
    fn sheet_rest_state() {
        let d = sheet().evaluate(&invariants(&diag_svd(1.0, 1.0))).unwrap();
        assert_eq!(d.psi, 0.0);
        assert_eq!(d.grad[2], -1.0);
        assert_eq!(d.hess[2][2], 3.0);
        let g = energy_gradient(&sheet(), &svd32(&Mat32::IDENTITY), &Mat32::IDENTITY).unwrap();
        assert!(g.max_abs() < 1e-15);
    }

    #[test]
    fn sheet_domain_floor() {
        let err = sheet().evaluate(&invariants(&diag_svd(1.0, 1e-7))).unwrap_err();
        assert!(matches!(err, Error::Domain { .. }));
        assert!(sheet_eigensystem(&sheet(), &diag_svd(1.0, 1e-7)).is_err());
        assert!(NeoHookeanSheet::new(0.0).is_err());
    }

    #[test]
    fn sheet_gradient_and_hvp_examples() {
        let f = Mat32::pad_diag(2.0, 1.0);
        let s = svd32(&f);
        let g = energy_gradient(&sheet(), &s, &f).unwrap();
        assert!((g - Mat32::pad_diag(1.875, 0.75)).max_abs() < 1e-15);
        let h = energy_hvp(&sheet(), &s, &f, &Mat32::unit(0, 0)).unwrap();
        assert!((h - Mat32::pad_diag(1.1875, 0.25)).max_abs() < 1e-15);
    }

    #[test]
    fn four_closed_form_modes() {
        let e = energy_eigensystem(&sheet(), &diag_svd(2.0, 1.0)).unwrap();
        let l = e.eigenvalues();
        assert_eq!(l[EigenSystem6::TWIST], 0.875);
        assert_eq!(l[EigenSystem6::FLIP], 1.125);
        assert_eq!(l[EigenSystem6::NORMAL_E], 0.9375);
        assert_eq!(l[EigenSystem6::NORMAL_F], 0.75);
    }

    #[test]
    fn sheet_block_at_rest() {
        let e = sheet_eigensystem(&sheet(), &diag_svd(1.0, 1.0)).unwrap();
        assert!((e.pairs[1].lambda - 6.0).abs() < 1e-14);
        assert!((e.pairs[0].lambda - 2.0).abs() < 1e-14);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((e.pairs[1].q - Mat32::pad_diag(h, h)).max_abs() < 1e-15);
        assert!((e.pairs[0].q - Mat32::pad_diag(-h, h)).max_abs() < 1e-15);
    }

    #[test]
    fn sym2_repeated_root_returns_axes() {
        let [(hi, vhi), (lo, vlo)] = sym2_eigen(3.0, 0.0, 3.0);
        assert_eq!((hi, lo), (3.0, 3.0));
        assert_eq!(vhi, Vec2::new(1.0, 0.0));
        assert_eq!(vlo, Vec2::new(-0.0, 1.0));
    }

    #[test]
    fn sym2_negative_definite() {
        let [(hi, _), (lo, _)] = sym2_eigen(-2.0, 1.0, -4.0);
        let disc = 2.0_f64.sqrt();
        assert!((hi - (-3.0 + disc)).abs() < 1e-14);
        assert!((lo - (-3.0 - disc)).abs() < 1e-14);
    }
}
