//! JSON scene description and the `solve` driver.
//!
//! Relative `mesh` and `output_dir` paths are resolved against the directory
//! holding the scene file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::energy::NeoHookeanSheet;
use crate::error::{Error, Result};
use crate::fem::newton::{newton_solve_with, SolveReport, SolverConfig};
use crate::fem::obj::{read_obj, write_obj};
use crate::fem::problem::MembraneProblem;
use crate::linalg::Vec3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ModelConfig {
    NeoHookeanSheet { mu: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PinConfig {
    pub vertex: usize,
    pub target: [f64; 3],
}

fn default_tol() -> f64 {
    SolverConfig::default().tol
}

fn default_max_iters() -> usize {
    SolverConfig::default().max_iters
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    pub mesh: PathBuf,
    pub model: ModelConfig,
    #[serde(default)]
    pub pins: Vec<PinConfig>,
    #[serde(default)]
    pub gravity: [f64; 3],
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

impl SceneConfig {
    pub fn from_json(src: &str) -> Result<Self> {
        Ok(serde_json::from_str(src)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn solver_config(&self) -> Result<SolverConfig> {
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::InvalidInput(format!("tol must be positive, got {}", self.tol)));
        }
        Ok(SolverConfig {
            tol: self.tol,
            max_iters: self.max_iters,
            ..SolverConfig::default()
        })
    }
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// Summary of a scene run.
#[derive(Clone, Debug)]
pub struct SceneOutcome {
    pub output_dir: PathBuf,
    pub report: SolveReport,
    pub frames: usize,
}

/// Builds the problem described by `scene`; the initial guess is the mesh's
/// own vertex positions with pins applied.
pub fn build_scene_problem(scene: &SceneConfig, base: &Path) -> Result<(MembraneProblem, Vec<Vec3>)> {
    let mesh = read_obj(&resolve(base, &scene.mesh))?;
    let ModelConfig::NeoHookeanSheet { mu } = scene.model;
    let mut problem = MembraneProblem::new(&mesh.positions, mesh.triangles, NeoHookeanSheet::new(mu)?)?;
    for pin in &scene.pins {
        problem.pin(pin.vertex, Vec3(pin.target))?;
    }
    problem.external_force = Vec3(scene.gravity);
    Ok((problem, mesh.positions))
}

/// Runs the scene at `scene_path`, writing `frame_%04d.obj` per accepted
/// iterate plus `report.json` and `convergence.csv`.
pub fn run_scene(scene_path: &Path) -> Result<SceneOutcome> {
    let scene = SceneConfig::load(scene_path)?;
    let base = scene_path.parent().unwrap_or_else(|| Path::new("."));
    let (problem, x0) = build_scene_problem(&scene, base)?;
    let config = scene.solver_config()?;
    let out = resolve(base, &scene.output_dir);
    std::fs::create_dir_all(&out)?;

    let mut frames = 0;
    let (_, report) = newton_solve_with(&problem, &x0, &config, |k, x| {
        frames += 1;
        write_obj(&out.join(format!("frame_{k:04}.obj")), x, &problem.triangles)
    })?;
    std::fs::write(out.join("report.json"), serde_json::to_string_pretty(&report)? + "\n")?;
    std::fs::write(out.join("convergence.csv"), report.convergence_csv())?;
    Ok(SceneOutcome {
        output_dir: out,
        report,
        frames,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_scene() {
        let src = r#"{
            "mesh": "sheet.obj",
            "model": {"type": "neo_hookean_sheet", "mu": 2.0},
            "pins": [{"vertex": 0, "target": [0, 0, 0]}],
            "gravity": [0, 0, -0.1],
            "tol": 1e-9,
            "max_iters": 40,
            "output_dir": "frames"
        }"#;
        let s = SceneConfig::from_json(src).unwrap();
        assert_eq!(s.model, ModelConfig::NeoHookeanSheet { mu: 2.0 });
        assert_eq!(s.pins[0].vertex, 0);
        assert_eq!(s.solver_config().unwrap().max_iters, 40);
    }

    #[test]
    fn defaults_and_unknown_model() {
        let s =
            SceneConfig::from_json(r#"{"mesh": "m.obj", "model": {"type": "neo_hookean_sheet", "mu": 1}}"#).unwrap();
        assert_eq!(s.tol, 1e-8);
        assert_eq!(s.max_iters, 100);
        assert!(SceneConfig::from_json(r#"{"mesh": "m.obj", "model": {"type": "stvk", "mu": 1}}"#).is_err());
    }
}
