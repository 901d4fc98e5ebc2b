//! Seeded random inputs for the check suite.
//!
//! Every `(seed, check, trial)` triple owns an independent ChaCha8 stream, so
//! results do not depend on evaluation order or thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::invariants::invariants;
use crate::linalg::{Mat32, Mat33, Vec3};
use crate::svd::svd32;

/// Resampling threshold for checks that need nondegenerate singular values.
pub const MIN_SIGMA: f64 = 0.05;
/// Resampling threshold on `I3` for sheet-energy checks.
pub const MIN_I3: f64 = 0.05;

/// Which region of the `F` distribution a check draws from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    /// Entries uniform on (−2, 2), no rejection.
    Any,
    /// `σ2 > MIN_SIGMA`.
    Nondegenerate,
    /// `σ2 > MIN_SIGMA` and `σ1 − σ2 > MIN_SIGMA`, so rotation rates are
    /// individually identifiable.
    Separated,
    /// `σ2 > MIN_SIGMA` and `I3 > MIN_I3`.
    Sheet,
}

pub fn trial_rng(seed: u64, check: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((check as u64) << 32) | trial as u64);
    rng
}

pub fn uniform_mat32(rng: &mut impl Rng, half_width: f64) -> Mat32 {
    let mut v = [0.0; 6];
    for x in v.iter_mut() {
        *x = rng.random_range(-half_width..half_width);
    }
    Mat32::from_row_slice(&v)
}

pub fn sample_f(rng: &mut impl Rng, region: Region) -> Mat32 {
    loop {
        let f = uniform_mat32(rng, 2.0);
        let s = svd32(&f);
        let [s1, s2] = s.sigma;
        let ok = match region {
            Region::Any => true,
            Region::Nondegenerate => s2 > MIN_SIGMA,
            Region::Separated => s2 > MIN_SIGMA && s1 - s2 > MIN_SIGMA,
            Region::Sheet => s2 > MIN_SIGMA && invariants(&s).i3 > MIN_I3,
        };
        if ok {
            return f;
        }
    }
}

pub fn random_unit_vec3(rng: &mut impl Rng) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v.scale(1.0 / n);
        }
    }
}

pub fn random_rotation(rng: &mut impl Rng) -> Mat33 {
    let axis = random_unit_vec3(rng);
    Mat33::rotation(axis, rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
}
