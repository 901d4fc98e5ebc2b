//! Constant-strain triangle kinematics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Mat22, Mat32, Vec3};

/// Triangles with rest area at or below this are rejected.
pub const EPS_AREA: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestElement {
    pub vertices: [usize; 3],
    /// Inverse of the rest edge matrix expressed in a local 2D frame.
    pub dm_inv: Mat22,
    pub area: f64,
}

impl RestElement {
    /// Rows `Gⱼ` such that `F = Σⱼ xⱼ ⊗ Gⱼ`, i.e. `∂F/∂xⱼ` contracted over
    /// the material index.
    pub fn shape_gradients(&self) -> [[f64; 2]; 3] {
        let m = self.dm_inv.0;
        [[-m[0][0] - m[1][0], -m[0][1] - m[1][1]], m[0], m[1]]
    }
}

/// Rest edge matrix of a triangle in an orthonormal frame of its own plane:
/// `e1` along the first edge, `e2 = n̂ × e1`.
fn rest_edge_matrix(p0: Vec3, p1: Vec3, p2: Vec3) -> Option<Mat22> {
    let d1 = p1 - p0;
    let d2 = p2 - p0;
    let n = d1.cross(&d2);
    let len = d1.norm();
    let nn = n.norm();
    if len == 0.0 || nn == 0.0 {
        return None;
    }
    let e1 = d1.scale(1.0 / len);
    let e2 = n.scale(1.0 / nn).cross(&e1);
    Some(Mat22([[d1.dot(&e1), d2.dot(&e1)], [d1.dot(&e2), d2.dot(&e2)]]))
}

pub fn build_rest_elements(rest_positions: &[Vec3], triangles: &[[usize; 3]]) -> Result<Vec<RestElement>> {
    triangles
        .iter()
        .enumerate()
        .map(|(index, tri)| {
            if let Some(&bad) = tri.iter().find(|&&v| v >= rest_positions.len()) {
                return Err(Error::InvalidInput(format!(
                    "triangle {index} references vertex {bad}, mesh has {}",
                    rest_positions.len()
                )));
            }
            let [p0, p1, p2] = tri.map(|v| rest_positions[v]);
            let dm = rest_edge_matrix(p0, p1, p2).ok_or(Error::DegenerateTriangle { index })?;
            let area = 0.5 * dm.determinant().abs();
            if area <= EPS_AREA {
                return Err(Error::DegenerateTriangle { index });
            }
            let dm_inv = dm.inverse().ok_or(Error::DegenerateTriangle { index })?;
            Ok(RestElement {
                vertices: *tri,
                dm_inv,
                area,
            })
        })
        .collect()
}

/// `F = [x1 − x0 | x2 − x0] · Dm⁻¹`.
pub fn element_deformation_gradient(elem: &RestElement, x0: Vec3, x1: Vec3, x2: Vec3) -> Mat32 {
    Mat32::from_cols(x1 - x0, x2 - x0).mul22(&elem.dm_inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Mat33;
    use crate::svd::svd32;

    fn unit_triangle() -> Vec<Vec3> {
        vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
        ]
    }

    #[test]
    fn unit_right_triangle() {
        let e = build_rest_elements(&unit_triangle(), &[[0, 1, 2]]).unwrap();
        assert!((e[0].dm_inv - Mat22::IDENTITY).max_abs() < 1e-15);
        assert_eq!(e[0].area, 0.5);
    }

    #[test]
    fn rotated_rest_shape_has_same_metric() {
        let r = Mat33::rotation(Vec3::new(0.3, -1.0, 2.0), 1.1);
        let moved: Vec<Vec3> = unit_triangle()
            .iter()
            .map(|p| r.mul_vec(p) + Vec3::new(1.0, 2.0, 3.0))
            .collect();
        let a = build_rest_elements(&unit_triangle(), &[[0, 1, 2]]).unwrap()[0];
        let b = build_rest_elements(&moved, &[[0, 1, 2]]).unwrap()[0];
        assert!((a.area - b.area).abs() < 1e-14);
        // the local frame starts on the first edge regardless of embedding
        assert!((a.dm_inv - b.dm_inv).max_abs() < 1e-14);
    }

    #[test]
    fn zero_area_is_rejected() {
        let p = vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(2.0, 0.0, 0.0),
        ];
        assert!(matches!(
            build_rest_elements(&p, &[[0, 1, 2]]),
            Err(Error::DegenerateTriangle { index: 0 })
        ));
        assert!(build_rest_elements(&p, &[[0, 1, 7]]).is_err());
    }

    #[test]
    fn deformation_gradient_stretches() {
        let p = unit_triangle();
        let e = build_rest_elements(&p, &[[0, 1, 2]]).unwrap()[0];
        let s = svd32(&element_deformation_gradient(&e, p[0], p[1], p[2]));
        assert!((s.sigma[0] - 1.0).abs() < 1e-15 && (s.sigma[1] - 1.0).abs() < 1e-15);
        let s = svd32(&element_deformation_gradient(
            &e,
            p[0].scale(2.0),
            p[1].scale(2.0),
            p[2].scale(2.0),
        ));
        assert!((s.sigma[0] - 2.0).abs() < 1e-14 && (s.sigma[1] - 2.0).abs() < 1e-14);
        let r = Mat33::rotation(Vec3::new(1.0, 1.0, 0.0), 0.8);
        let s = svd32(&element_deformation_gradient(
            &e,
            r.mul_vec(&p[0]),
            r.mul_vec(&p[1]),
            r.mul_vec(&p[2]),
        ));
        assert!((s.sigma[0] - 1.0).abs() < 1e-14 && (s.sigma[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn shape_gradients_reproduce_f() {
        let p = vec![
            Vec3::new(0.1, 0.0, 0.2),
            Vec3::new(1.2, 0.1, 0.0),
            Vec3::new(0.3, 0.9, 0.4),
        ];
        let e = build_rest_elements(&p, &[[0, 1, 2]]).unwrap()[0];
        let x = [
            Vec3::new(0.0, 0.5, 1.0),
            Vec3::new(2.0, 0.1, 0.3),
            Vec3::new(-0.4, 1.7, 0.2),
        ];
        let f = element_deformation_gradient(&e, x[0], x[1], x[2]);
        let g = e.shape_gradients();
        let mut rebuilt = Mat32::ZERO;
        for j in 0..3 {
            for r in 0..3 {
                for c in 0..2 {
                    rebuilt.0[r][c] += x[j].0[r] * g[j][c];
                }
            }
        }
        assert!((rebuilt - f).max_abs() < 1e-14);
    }
}
