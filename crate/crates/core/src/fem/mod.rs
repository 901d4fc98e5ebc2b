//! Quasi-static membrane finite elements.

pub mod assembly;
pub mod element;
pub mod newton;
pub mod obj;
pub mod problem;
pub mod scene;

pub use assembly::{assemble, energy_and_gradient, total_energy, Assembly, HessianMode};
pub use element::{build_rest_elements, element_deformation_gradient, RestElement};
pub use newton::{newton_solve, newton_solve_with, SolveReport, SolverConfig, Termination};
pub use obj::{quad_split_square, read_obj, write_obj, TriMesh};
pub use problem::MembraneProblem;
pub use scene::{run_scene, SceneConfig};
