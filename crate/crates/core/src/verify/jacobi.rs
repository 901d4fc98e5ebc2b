//! Cyclic Jacobi eigensolver for dense symmetric matrices.
//!
//! Used as an oracle: it shares no code with the closed-form eigensystems.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat6;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues ascending with matching orthonormal eigenvectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub values: Vec<f64>,
    /// `vectors[k]` belongs to `values[k]`.
    pub vectors: Vec<Vec<f64>>,
}

/// Row-major dense symmetric matrix of order `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseSym {
    n: usize,
    data: Vec<f64>,
}

impl DenseSym {
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::InvalidInput(format!(
                "expected {} entries, got {}",
                n * n,
                data.len()
            )));
        }
        Ok(DenseSym { n, data })
    }

    pub fn from_mat6(a: &Mat6) -> Self {
        DenseSym {
            n: 6,
            data: a.iter().flat_map(|r| r.iter().copied()).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    fn off_diagonal_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    s += self.get(i, j).powi(2);
                }
            }
        }
        s.sqrt()
    }
}

/// Diagonalizes `a` by cyclic Jacobi rotations until the off-diagonal norm is
/// at most `1e-14·‖A‖_F`.
///
/// Returns `NotSymmetric` if any `|aᵢⱼ − aⱼᵢ| > 1e-10·max(1, ‖A‖_F)`.
pub fn jacobi_eigen_sym(a: &DenseSym) -> Result<Spectrum> {
    let n = a.n;
    let norm = a.frobenius_norm();
    let mut asym = 0.0_f64;
    for i in 0..n {
        for j in 0..i {
            asym = asym.max((a.get(i, j) - a.get(j, i)).abs());
        }
    }
    if asym > 1e-10 * norm.max(1.0) {
        return Err(Error::NotSymmetric { asymmetry: asym });
    }

    let mut m = a.clone();
    for i in 0..n {
        for j in 0..i {
            let s = 0.5 * (m.get(i, j) + m.get(j, i));
            m.set(i, j, s);
            m.set(j, i, s);
        }
    }
    let mut v = DenseSym {
        n,
        data: vec![0.0; n * n],
    };
    for i in 0..n {
        v.set(i, i, 1.0);
    }

    let target = 1e-14 * norm;
    for _ in 0..MAX_SWEEPS {
        if m.off_diagonal_norm() <= target {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    let mkp = m.get(k, p);
                    let mkq = m.get(k, q);
                    m.set(k, p, c * mkp - s * mkq);
                    m.set(k, q, s * mkp + c * mkq);
                }
                for k in 0..n {
                    let mpk = m.get(p, k);
                    let mqk = m.get(q, k);
                    m.set(p, k, c * mpk - s * mqk);
                    m.set(q, k, s * mpk + c * mqk);
                }
                m.set(p, q, 0.0);
                m.set(q, p, 0.0);
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m.get(i, i).total_cmp(&m.get(j, j)));
    Ok(Spectrum {
        values: order.iter().map(|&i| m.get(i, i)).collect(),
        vectors: order.iter().map(|&i| (0..n).map(|k| v.get(k, i)).collect()).collect(),
    })
}

pub fn jacobi_eigen6(a: &Mat6) -> Result<Spectrum> {
    jacobi_eigen_sym(&DenseSym::from_mat6(a))
}

impl Spectrum {
    /// `‖A − V Λ Vᵀ‖_F`.
    pub fn reconstruction_error(&self, a: &DenseSym) -> f64 {
        let n = a.order();
        let mut err = 0.0;
        for i in 0..n {
            for j in 0..n {
                let r: f64 = (0..n)
                    .map(|k| self.values[k] * self.vectors[k][i] * self.vectors[k][j])
                    .sum();
                err += (a.get(i, j) - r).powi(2);
            }
        }
        err.sqrt()
    }

    /// `max |vᵢ · vⱼ − δᵢⱼ|`.
    pub fn orthonormality_error(&self) -> f64 {
        let mut err = 0.0_f64;
        for (i, vi) in self.vectors.iter().enumerate() {
            for (j, vj) in self.vectors.iter().enumerate() {
                let d: f64 = vi.iter().zip(vj).map(|(a, b)| a * b).sum();
                err = err.max((d - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
        err
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity() {
        let mut a = [[0.0; 6]; 6];
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        let s = jacobi_eigen6(&a).unwrap();
        assert_eq!(s.values, vec![1.0; 6]);
    }

    #[test]
    fn diagonal_keeps_axes() {
        let mut a = [[0.0; 6]; 6];
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = (6 - i) as f64;
        }
        let s = jacobi_eigen6(&a).unwrap();
        assert_eq!(s.values, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(s.vectors[0][5], 1.0);
    }

    #[test]
    fn two_by_two_closed_form() {
        let a = DenseSym::from_row_major(2, vec![1.1875, 0.25, 0.25, 1.75]).unwrap();
        let s = jacobi_eigen_sym(&a).unwrap();
        let mean = 0.5 * (1.1875 + 1.75);
        let r = (0.28125_f64.powi(2) + 0.0625).sqrt();
        assert!((s.values[0] - (mean - r)).abs() < 1e-10);
        assert!((s.values[1] - (mean + r)).abs() < 1e-10);
        assert!((s.values[0] - 1.09245).abs() < 1e-5);
        assert!((s.values[1] - 1.84505).abs() < 1e-5);
        assert!(s.reconstruction_error(&a) < 1e-14);
    }

    #[test]
    fn rejects_asymmetric_input() {
        let a = DenseSym::from_row_major(2, vec![1.0, 0.5, 0.0, 1.0]).unwrap();
        assert!(matches!(jacobi_eigen_sym(&a), Err(Error::NotSymmetric { .. })));
    }
}
