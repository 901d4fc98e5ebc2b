//! Analytic Hessian eigensystems for isotropic membrane energies.
//!
//! For a 3×2 deformation gradient `F = U Σ Vᵀ`, every isotropic energy
//! `ψ(I1, I2, I3)` with `I1 = σ1 + σ2`, `I2 = F : F` and `I3 = σ1 σ2` has a
//! Hessian whose six eigenmatrices are known in closed form: four are
//! in-plane (padded 2×2 modes) and two rotate the surface normal. This crate
//! provides those eigensystems, a PSD projection built on them, a projected
//! Newton solver for triangle membranes, and finite-difference and dense
//! eigensolver oracles that check all of it.

#![allow(clippy::needless_range_loop)]

pub mod energy;
pub mod error;
pub mod fem;
pub mod invariants;
pub mod linalg;
pub mod par;
pub mod psd;
pub mod svd;
pub mod verify;

pub use energy::{
    energy_density, energy_eigensystem, energy_gradient, energy_hvp, evaluate_model, sheet_eigensystem, EnergyModel,
    ModelDerivs, NeoHookeanSheet,
};
pub use error::{Error, Invariant, Result};
pub use invariants::{
    invariant_eigensystem, invariant_gradients, invariant_hvp, invariant_hvp_single, invariants, EigenPair,
    EigenSystem6, Invariants,
};
pub use linalg::{Mat22, Mat32, Mat33, Mat6, Vec2, Vec3};
pub use psd::{project_psd, ProjectedHessian};
pub use svd::{lifted_perturbation, svd32, svd_rates, Svd32, SvdRates, EPS_SIGMA};
