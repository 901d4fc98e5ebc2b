//! Global energy, gradient and Hessian assembly.
//!
//! Element energy is `area · ψ(F)`. Since `F` is linear in the three vertex
//! positions, the element Hessian is the 6×6 material Hessian pulled back
//! through the shape gradients. Pinned DOFs get identity rows and columns and
//! a zero gradient.

use nalgebra_sparse::{CooMatrix, CscMatrix};

use crate::energy::{energy_eigensystem, energy_gradient, EnergyModel};
use crate::error::{Error, Result};
use crate::fem::element::element_deformation_gradient;
use crate::fem::problem::MembraneProblem;
use crate::invariants::invariants;
use crate::linalg::{Mat32, Mat6, Vec3};
use crate::par::map_indexed;
use crate::psd::project_psd;
use crate::svd::{svd32, Svd32};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HessianMode {
    /// Negative eigenvalues of each element Hessian clamped to zero.
    Projected,
    /// The exact element Hessian.
    Exact,
}

pub struct Assembly {
    pub energy: f64,
    /// `3N` entries, `3v + axis`; zero at pinned DOFs.
    pub gradient: Vec<f64>,
    pub hessian: CscMatrix<f64>,
}

struct ElementTerms {
    energy: f64,
    gradient: [f64; 9],
    hessian: Option<[[f64; 9]; 9]>,
}

fn element_state<M: EnergyModel>(problem: &MembraneProblem<M>, e: usize, x: &[Vec3]) -> (Mat32, Svd32) {
    let elem = &problem.elements[e];
    let [i0, i1, i2] = elem.vertices;
    let f = element_deformation_gradient(elem, x[i0], x[i1], x[i2]);
    (f, svd32(&f))
}

fn element_energy<M: EnergyModel>(problem: &MembraneProblem<M>, e: usize, x: &[Vec3]) -> Result<f64> {
    let (_, svd) = element_state(problem, e, x);
    let inv = invariants(&svd);
    let d = problem
        .model_for(e)
        .evaluate(&inv)
        .map_err(|_| Error::ElementDomain { element: e, i3: inv.i3 })?;
    Ok(problem.elements[e].area * d.psi)
}

fn element_terms<M: EnergyModel>(
    problem: &MembraneProblem<M>,
    e: usize,
    x: &[Vec3],
    hessian: Option<HessianMode>,
) -> Result<ElementTerms> {
    let elem = &problem.elements[e];
    let model = problem.model_for(e);
    let (f, svd) = element_state(problem, e, x);
    let inv = invariants(&svd);
    let domain = |err: Error| match err {
        Error::Domain { i3 } => Error::ElementDomain { element: e, i3 },
        other => other,
    };
    let d = model.evaluate(&inv).map_err(domain)?;
    let p = energy_gradient(model, &svd, &f).map_err(domain)?;
    let g = elem.shape_gradients();
    let area = elem.area;

    let mut gradient = [0.0; 9];
    for j in 0..3 {
        for r in 0..3 {
            gradient[3 * j + r] = area * (p.0[r][0] * g[j][0] + p.0[r][1] * g[j][1]);
        }
    }

    let hessian = match hessian {
        None => None,
        Some(mode) => {
            let eig = energy_eigensystem(model, &svd).map_err(domain)?;
            let h6: Mat6 = match mode {
                HessianMode::Projected => project_psd(&eig).to_dense(),
                HessianMode::Exact => eig.to_dense(),
            };
            let mut k = [[0.0; 9]; 9];
            for j in 0..3 {
                for r in 0..3 {
                    for l in 0..3 {
                        for s in 0..3 {
                            let mut v = 0.0;
                            for c in 0..2 {
                                for dd in 0..2 {
                                    v += h6[2 * r + c][2 * s + dd] * g[j][c] * g[l][dd];
                                }
                            }
                            k[3 * j + r][3 * l + s] = area * v;
                        }
                    }
                }
            }
            Some(k)
        }
    };
    Ok(ElementTerms {
        energy: area * d.psi,
        gradient,
        hessian,
    })
}

fn external_energy<M>(problem: &MembraneProblem<M>, x: &[Vec3]) -> f64 {
    let f = problem.external_force;
    if f == Vec3::ZERO {
        return 0.0;
    }
    -x.iter().map(|p| f.dot(p)).sum::<f64>()
}

fn check_positions<M>(problem: &MembraneProblem<M>, x: &[Vec3]) -> Result<()> {
    if x.len() != problem.vertex_count {
        return Err(Error::InvalidInput(format!(
            "{} positions for {} vertices",
            x.len(),
            problem.vertex_count
        )));
    }
    Ok(())
}

/// Total energy only; used by the line search.
pub fn total_energy<M: EnergyModel>(problem: &MembraneProblem<M>, x: &[Vec3]) -> Result<f64> {
    check_positions(problem, x)?;
    let per_element = map_indexed(problem.elements.len(), |e| element_energy(problem, e, x));
    let mut energy = 0.0;
    for v in per_element {
        energy += v?;
    }
    Ok(energy + external_energy(problem, x))
}

/// Energy and gradient, without pin handling.
pub fn energy_and_gradient<M: EnergyModel>(problem: &MembraneProblem<M>, x: &[Vec3]) -> Result<(f64, Vec<f64>)> {
    check_positions(problem, x)?;
    let terms = map_indexed(problem.elements.len(), |e| element_terms(problem, e, x, None));
    let mut energy = 0.0;
    let mut gradient = vec![0.0; problem.dof_count()];
    for (e, t) in terms.into_iter().enumerate() {
        let t = t?;
        energy += t.energy;
        scatter_gradient(&mut gradient, &problem.elements[e].vertices, &t.gradient);
    }
    add_external(problem, x, &mut energy, &mut gradient);
    Ok((energy, gradient))
}

fn scatter_gradient(gradient: &mut [f64], verts: &[usize; 3], local: &[f64; 9]) {
    for (j, &v) in verts.iter().enumerate() {
        for r in 0..3 {
            gradient[3 * v + r] += local[3 * j + r];
        }
    }
}

fn add_external<M>(problem: &MembraneProblem<M>, x: &[Vec3], energy: &mut f64, gradient: &mut [f64]) {
    let f = problem.external_force;
    if f == Vec3::ZERO {
        return;
    }
    *energy += external_energy(problem, x);
    for v in 0..problem.vertex_count {
        for r in 0..3 {
            gradient[3 * v + r] -= f.0[r];
        }
    }
}

/// Energy, pinned gradient and sparse symmetric Hessian at `x`.
pub fn assemble<M: EnergyModel>(problem: &MembraneProblem<M>, x: &[Vec3], mode: HessianMode) -> Result<Assembly> {
    check_positions(problem, x)?;
    let n = problem.dof_count();
    let pinned = problem.pinned_dofs();
    let terms = map_indexed(problem.elements.len(), |e| element_terms(problem, e, x, Some(mode)));

    let mut energy = 0.0;
    let mut gradient = vec![0.0; n];
    let mut coo = CooMatrix::new(n, n);
    for (e, t) in terms.into_iter().enumerate() {
        let t = t?;
        let verts = problem.elements[e].vertices;
        energy += t.energy;
        scatter_gradient(&mut gradient, &verts, &t.gradient);
        let k = t.hessian.expect("hessian requested");
        for (a, &va) in verts.iter().enumerate() {
            for (b, &vb) in verts.iter().enumerate() {
                for r in 0..3 {
                    let row = 3 * va + r;
                    if pinned[row] {
                        continue;
                    }
                    for s in 0..3 {
                        let col = 3 * vb + s;
                        if !pinned[col] {
                            coo.push(row, col, k[3 * a + r][3 * b + s]);
                        }
                    }
                }
            }
        }
    }
    add_external(problem, x, &mut energy, &mut gradient);
    for (dof, &p) in pinned.iter().enumerate() {
        if p {
            gradient[dof] = 0.0;
            coo.push(dof, dof, 1.0);
        } else {
            // keeps every diagonal in the pattern so regularization reaches it
            coo.push(dof, dof, 0.0);
        }
    }
    Ok(Assembly {
        energy,
        gradient,
        hessian: CscMatrix::from(&coo),
    })
}

/// `H · v` for an assembled sparse matrix.
pub fn sparse_mul(h: &CscMatrix<f64>, v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; h.nrows()];
    for (col, lane) in h.col_iter().enumerate() {
        for (&row, &val) in lane.row_indices().iter().zip(lane.values()) {
            out[row] += val * v[col];
        }
    }
    out
}

/// Flattens positions into a `3N` DOF vector.
pub fn flatten(x: &[Vec3]) -> Vec<f64> {
    x.iter().flat_map(|p| p.0).collect()
}

pub fn unflatten(v: &[f64]) -> Vec<Vec3> {
    v.chunks_exact(3).map(|c| Vec3([c[0], c[1], c[2]])).collect()
}
