//! Small fixed-size dense matrices used throughout the crate.
//!
//! All matrices are stored row-major. `Mat32` is the shape of a membrane
//! deformation gradient: it maps 2D material coordinates to 3D world
//! coordinates.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Dense symmetric 6×6 matrix acting on row-major flattened `Mat32`s.
pub type Mat6 = [[f64; 6]; 6];

macro_rules! impl_elementwise {
    ($ty:ident, $rows:expr, $cols:expr) => {
        impl Add for $ty {
            type Output = $ty;
            fn add(self, rhs: $ty) -> $ty {
                let mut out = self;
                for r in 0..$rows {
                    for c in 0..$cols {
                        out.0[r][c] += rhs.0[r][c];
                    }
                }
                out
            }
        }

        impl AddAssign for $ty {
            fn add_assign(&mut self, rhs: $ty) {
                *self = *self + rhs;
            }
        }

        impl Sub for $ty {
            type Output = $ty;
            fn sub(self, rhs: $ty) -> $ty {
                self + (-rhs)
            }
        }

        impl Neg for $ty {
            type Output = $ty;
            fn neg(self) -> $ty {
                self * -1.0
            }
        }

        impl Mul<f64> for $ty {
            type Output = $ty;
            fn mul(self, s: f64) -> $ty {
                let mut out = self;
                for row in out.0.iter_mut() {
                    for x in row.iter_mut() {
                        *x *= s;
                    }
                }
                out
            }
        }

        impl Mul<$ty> for f64 {
            type Output = $ty;
            fn mul(self, m: $ty) -> $ty {
                m * self
            }
        }

        impl Index<(usize, usize)> for $ty {
            type Output = f64;
            fn index(&self, (r, c): (usize, usize)) -> &f64 {
                &self.0[r][c]
            }
        }

        impl IndexMut<(usize, usize)> for $ty {
            fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
                &mut self.0[r][c]
            }
        }

        impl $ty {
            pub const ZERO: $ty = $ty([[0.0; $cols]; $rows]);

            /// Frobenius inner product `A : B`.
            pub fn dot(&self, other: &$ty) -> f64 {
                let mut s = 0.0;
                for r in 0..$rows {
                    for c in 0..$cols {
                        s += self.0[r][c] * other.0[r][c];
                    }
                }
                s
            }

            pub fn norm_squared(&self) -> f64 {
                self.dot(self)
            }

            /// Frobenius norm.
            pub fn norm(&self) -> f64 {
                self.norm_squared().sqrt()
            }

            /// Largest absolute entry.
            pub fn max_abs(&self) -> f64 {
                self.0
                    .iter()
                    .flat_map(|row| row.iter())
                    .fold(0.0_f64, |m, x| m.max(x.abs()))
            }

            pub fn is_finite(&self) -> bool {
                self.0.iter().flat_map(|row| row.iter()).all(|x| x.is_finite())
            }
        }
    };
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec2(pub [f64; 2]);

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec3(pub [f64; 3]);

/// 2×2 matrix, row-major.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Mat22(pub [[f64; 2]; 2]);

/// 3×2 matrix, row-major.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Mat32(pub [[f64; 2]; 3]);

/// 3×3 matrix, row-major.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Mat33(pub [[f64; 3]; 3]);

impl_elementwise!(Mat22, 2, 2);
impl_elementwise!(Mat32, 3, 2);
impl_elementwise!(Mat33, 3, 3);

impl Vec2 {
    pub fn new(x: f64, y: f64) -> Self {
        Vec2([x, y])
    }

    pub fn dot(&self, o: &Vec2) -> f64 {
        self.0[0] * o.0[0] + self.0[1] * o.0[1]
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3([0.0; 3]);

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3([x, y, z])
    }

    pub fn x(&self) -> f64 {
        self.0[0]
    }

    pub fn y(&self) -> f64 {
        self.0[1]
    }

    pub fn z(&self) -> f64 {
        self.0[2]
    }

    pub fn dot(&self, o: &Vec3) -> f64 {
        self.0[0] * o.0[0] + self.0[1] * o.0[1] + self.0[2] * o.0[2]
    }

    pub fn cross(&self, o: &Vec3) -> Vec3 {
        let [a0, a1, a2] = self.0;
        let [b0, b1, b2] = o.0;
        Vec3([a1 * b2 - a2 * b1, a2 * b0 - a0 * b2, a0 * b1 - a1 * b0])
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(&self, s: f64) -> Vec3 {
        Vec3([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Mat22 {
    pub const IDENTITY: Mat22 = Mat22([[1.0, 0.0], [0.0, 1.0]]);

    pub fn from_cols(c0: Vec2, c1: Vec2) -> Self {
        Mat22([[c0.0[0], c1.0[0]], [c0.0[1], c1.0[1]]])
    }

    pub fn col(&self, c: usize) -> Vec2 {
        Vec2([self.0[0][c], self.0[1][c]])
    }

    pub fn transpose(&self) -> Mat22 {
        let m = self.0;
        Mat22([[m[0][0], m[1][0]], [m[0][1], m[1][1]]])
    }

    pub fn determinant(&self) -> f64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    /// Inverse, or `None` when the determinant is exactly zero.
    pub fn inverse(&self) -> Option<Mat22> {
        let det = self.determinant();
        if det == 0.0 {
            return None;
        }
        let m = self.0;
        Some(Mat22([
            [m[1][1] / det, -m[0][1] / det],
            [-m[1][0] / det, m[0][0] / det],
        ]))
    }

    pub fn matmul(&self, o: &Mat22) -> Mat22 {
        let mut out = Mat22::ZERO;
        for r in 0..2 {
            for c in 0..2 {
                out.0[r][c] = self.0[r][0] * o.0[0][c] + self.0[r][1] * o.0[1][c];
            }
        }
        out
    }
}

impl Mat32 {
    /// `pad(1, 1)`: the 2×2 identity stacked over a zero row.
    pub const IDENTITY: Mat32 = Mat32([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]);

    /// Builds a matrix from six row-major entries.
    pub fn from_row_slice(v: &[f64; 6]) -> Self {
        Mat32([[v[0], v[1]], [v[2], v[3]], [v[4], v[5]]])
    }

    /// Row-major flattening; entry `(r, c)` lands at index `2r + c`.
    pub fn to_flat(&self) -> [f64; 6] {
        let m = self.0;
        [m[0][0], m[0][1], m[1][0], m[1][1], m[2][0], m[2][1]]
    }

    /// Unit matrix `E_rc` with a single one at `(r, c)`.
    pub fn unit(r: usize, c: usize) -> Mat32 {
        let mut m = Mat32::ZERO;
        m.0[r][c] = 1.0;
        m
    }

    /// `diag(a, b)` stacked over a zero row.
    pub fn pad_diag(a: f64, b: f64) -> Mat32 {
        Mat32([[a, 0.0], [0.0, b], [0.0, 0.0]])
    }

    pub fn from_cols(c0: Vec3, c1: Vec3) -> Self {
        Mat32([[c0.0[0], c1.0[0]], [c0.0[1], c1.0[1]], [c0.0[2], c1.0[2]]])
    }

    pub fn col(&self, c: usize) -> Vec3 {
        Vec3([self.0[0][c], self.0[1][c], self.0[2][c]])
    }

    /// `A · B` for a 2×2 right factor.
    pub fn mul22(&self, b: &Mat22) -> Mat32 {
        let mut out = Mat32::ZERO;
        for r in 0..3 {
            for c in 0..2 {
                out.0[r][c] = self.0[r][0] * b.0[0][c] + self.0[r][1] * b.0[1][c];
            }
        }
        out
    }

    /// `A · Bᵀ` for a 2×2 right factor.
    pub fn mul22_t(&self, b: &Mat22) -> Mat32 {
        self.mul22(&b.transpose())
    }

    /// `Aᵀ A`.
    pub fn gram(&self) -> Mat22 {
        let c0 = self.col(0);
        let c1 = self.col(1);
        let off = c0.dot(&c1);
        Mat22([[c0.dot(&c0), off], [off, c1.dot(&c1)]])
    }

    pub fn mul_vec(&self, v: &Vec2) -> Vec3 {
        Vec3([
            self.0[0][0] * v.0[0] + self.0[0][1] * v.0[1],
            self.0[1][0] * v.0[0] + self.0[1][1] * v.0[1],
            self.0[2][0] * v.0[0] + self.0[2][1] * v.0[1],
        ])
    }
}

impl Mat33 {
    pub const IDENTITY: Mat33 = Mat33([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    pub fn from_cols(c0: Vec3, c1: Vec3, c2: Vec3) -> Self {
        let mut m = Mat33::ZERO;
        for (c, v) in [c0, c1, c2].iter().enumerate() {
            for r in 0..3 {
                m.0[r][c] = v.0[r];
            }
        }
        m
    }

    pub fn col(&self, c: usize) -> Vec3 {
        Vec3([self.0[0][c], self.0[1][c], self.0[2][c]])
    }

    pub fn transpose(&self) -> Mat33 {
        let mut out = Mat33::ZERO;
        for r in 0..3 {
            for c in 0..3 {
                out.0[r][c] = self.0[c][r];
            }
        }
        out
    }

    pub fn determinant(&self) -> f64 {
        self.col(0).cross(&self.col(1)).dot(&self.col(2))
    }

    pub fn matmul(&self, o: &Mat33) -> Mat33 {
        let mut out = Mat33::ZERO;
        for r in 0..3 {
            for c in 0..3 {
                out.0[r][c] = (0..3).map(|k| self.0[r][k] * o.0[k][c]).sum();
            }
        }
        out
    }

    pub fn mul32(&self, b: &Mat32) -> Mat32 {
        let mut out = Mat32::ZERO;
        for r in 0..3 {
            for c in 0..2 {
                out.0[r][c] = (0..3).map(|k| self.0[r][k] * b.0[k][c]).sum();
            }
        }
        out
    }

    /// `Aᵀ · B`.
    pub fn tr_mul32(&self, b: &Mat32) -> Mat32 {
        self.transpose().mul32(b)
    }

    pub fn mul_vec(&self, v: &Vec3) -> Vec3 {
        Vec3([
            self.0[0].iter().zip(v.0.iter()).map(|(a, b)| a * b).sum(),
            self.0[1].iter().zip(v.0.iter()).map(|(a, b)| a * b).sum(),
            self.0[2].iter().zip(v.0.iter()).map(|(a, b)| a * b).sum(),
        ])
    }

    /// Rotation by `angle` radians about the unit `axis` (Rodrigues).
    pub fn rotation(axis: Vec3, angle: f64) -> Mat33 {
        let n = axis.scale(1.0 / axis.norm());
        let (s, c) = angle.sin_cos();
        let t = 1.0 - c;
        let [x, y, z] = n.0;
        Mat33([
            [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
            [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
            [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
        ])
    }
}

/// `Σ λᵢ qᵢ qᵢᵀ` over flattened matrices.
pub fn outer_sum6<'a>(pairs: impl IntoIterator<Item = (f64, &'a Mat32)>) -> Mat6 {
    let mut out = [[0.0; 6]; 6];
    for (lambda, q) in pairs {
        let v = q.to_flat();
        for i in 0..6 {
            for j in 0..6 {
                out[i][j] += lambda * v[i] * v[j];
            }
        }
    }
    out
}

/// Applies a 6×6 operator to a flattened `Mat32`.
pub fn apply6(a: &Mat6, x: &Mat32) -> Mat32 {
    let v = x.to_flat();
    let mut out = [0.0; 6];
    for (o, row) in out.iter_mut().zip(a.iter()) {
        *o = row.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
    }
    Mat32::from_row_slice(&out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_layout_is_row_major() {
        let m = Mat32::from_row_slice(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(m[(1, 0)], 3.0);
        assert_eq!(m[(2, 1)], 6.0);
        assert_eq!(m.to_flat(), [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
    }

    #[test]
    fn rotation_is_orthogonal() {
        let r = Mat33::rotation(Vec3::new(1.0, 2.0, -0.5), 0.7);
        let rtr = r.transpose().matmul(&r);
        assert!((rtr - Mat33::IDENTITY).max_abs() < 1e-14);
        assert!((r.determinant() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn inverse_of_singular_is_none() {
        assert!(Mat22([[1.0, 2.0], [2.0, 4.0]]).inverse().is_none());
        let m = Mat22([[2.0, 1.0], [0.5, 3.0]]);
        let p = m.matmul(&m.inverse().unwrap());
        assert!((p - Mat22::IDENTITY).max_abs() < 1e-15);
    }
}
