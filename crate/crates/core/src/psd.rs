//! Positive-semidefinite projection of a six-mode Hessian eigensystem.

use serde::{Deserialize, Serialize};

use crate::invariants::{EigenPair, EigenSystem6};
use crate::linalg::{outer_sum6, Mat32, Mat6};

/// An eigensystem whose negative eigenvalues have been clamped to zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectedHessian {
    pub pairs: [EigenPair; 6],
}

pub fn project_psd(eig: &EigenSystem6) -> ProjectedHessian {
    ProjectedHessian {
        pairs: eig.pairs.map(|p| EigenPair {
            lambda: p.lambda.max(0.0),
            q: p.q,
        }),
    }
}

impl ProjectedHessian {
    pub fn eigenvalues(&self) -> [f64; 6] {
        self.pairs.map(|p| p.lambda)
    }

    /// `Σ max(λᵢ, 0) (qᵢ : Ḟ) qᵢ`.
    pub fn apply(&self, fdot: &Mat32) -> Mat32 {
        self.pairs
            .iter()
            .fold(Mat32::ZERO, |acc, p| acc + p.q * (p.lambda * p.q.dot(fdot)))
    }

    /// Dense symmetric 6×6 operator on row-major flattened matrices.
    pub fn to_dense(&self) -> Mat6 {
        let mut a = outer_sum6(self.pairs.iter().map(|p| (p.lambda, &p.q)));
        for i in 0..6 {
            for j in 0..i {
                let s = 0.5 * (a[i][j] + a[j][i]);
                a[i][j] = s;
                a[j][i] = s;
            }
        }
        a
    }

    /// Re-projection is the identity.
    pub fn project(&self) -> ProjectedHessian {
        project_psd(&EigenSystem6 { pairs: self.pairs })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Invariant;
    use crate::invariants::invariant_eigensystem;
    use crate::linalg::{Mat22, Mat33};
    use crate::svd::Svd32;

    #[test]
    fn clamps_i3_spectrum() {
        let s = Svd32::from_parts(Mat33::IDENTITY, [2.0, 1.0], Mat22::IDENTITY);
        let p = project_psd(&invariant_eigensystem(Invariant::I3, &s).unwrap());
        assert_eq!(p.eigenvalues(), [1.0, 0.0, 1.0, 0.0, 0.5, 2.0]);
        assert_eq!(p.project(), p);
    }

    #[test]
    fn nonnegative_spectrum_is_untouched() {
        let s = Svd32::from_parts(Mat33::IDENTITY, [2.0, 1.0], Mat22::IDENTITY);
        let e = invariant_eigensystem(Invariant::I1, &s).unwrap();
        let p = project_psd(&e);
        let x = Mat32::from_row_slice(&[0.3, -1.0, 2.0, 0.5, -0.25, 1.5]);
        assert!((p.apply(&x) - e.apply(&x)).max_abs() < 1e-15);
    }
}
