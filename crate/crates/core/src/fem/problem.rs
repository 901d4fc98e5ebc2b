use std::collections::BTreeMap;

use crate::energy::{EnergyModel, NeoHookeanSheet};
use crate::error::{Error, Result};
use crate::fem::element::{build_rest_elements, RestElement};
use crate::linalg::Vec3;

/// A triangle membrane with pinned vertices and an isotropic material.
#[derive(Clone, Debug)]
pub struct MembraneProblem<M = NeoHookeanSheet> {
    pub elements: Vec<RestElement>,
    pub triangles: Vec<[usize; 3]>,
    pub vertex_count: usize,
    pub pins: BTreeMap<usize, Vec3>,
    pub model: M,
    /// Optional per-element material, overriding `model`.
    pub element_models: Option<Vec<M>>,
    /// Constant force on every vertex; contributes `−f·x` to the energy.
    pub external_force: Vec3,
}

impl<M: EnergyModel> MembraneProblem<M> {
    pub fn new(rest_positions: &[Vec3], triangles: Vec<[usize; 3]>, model: M) -> Result<Self> {
        let elements = build_rest_elements(rest_positions, &triangles)?;
        Ok(MembraneProblem {
            elements,
            triangles,
            vertex_count: rest_positions.len(),
            pins: BTreeMap::new(),
            model,
            element_models: None,
            external_force: Vec3::ZERO,
        })
    }

    pub fn pin(&mut self, vertex: usize, target: Vec3) -> Result<()> {
        if vertex >= self.vertex_count {
            return Err(Error::InvalidInput(format!(
                "pinned vertex {vertex} out of range ({} vertices)",
                self.vertex_count
            )));
        }
        if !target.is_finite() {
            return Err(Error::InvalidInput(format!(
                "pin target for vertex {vertex} is not finite"
            )));
        }
        self.pins.insert(vertex, target);
        Ok(())
    }

    pub fn set_element_models(&mut self, models: Vec<M>) -> Result<()> {
        if models.len() != self.elements.len() {
            return Err(Error::InvalidInput(format!(
                "{} element models for {} elements",
                models.len(),
                self.elements.len()
            )));
        }
        self.element_models = Some(models);
        Ok(())
    }

    pub fn model_for(&self, element: usize) -> &M {
        self.element_models.as_ref().map_or(&self.model, |m| &m[element])
    }

    pub fn dof_count(&self) -> usize {
        3 * self.vertex_count
    }

    /// Per-DOF flag, true for pinned coordinates.
    pub fn pinned_dofs(&self) -> Vec<bool> {
        let mut mask = vec![false; self.dof_count()];
        for &v in self.pins.keys() {
            mask[3 * v..3 * v + 3].fill(true);
        }
        mask
    }

    /// Copies pin targets into `positions`.
    pub fn apply_pins(&self, positions: &mut [Vec3]) {
        for (&v, &t) in &self.pins {
            positions[v] = t;
        }
    }
}
