use std::fmt;

use thiserror::Error;

/// Which member of the SVD rate tuple could not be identified.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rate {
    OmegaX,
    OmegaY,
    /// The in-plane pair (ωz, α), coupled through a 2×2 system.
    InPlane,
}

/// One of the three membrane invariants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Invariant {
    I1,
    I2,
    I3,
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Invariant::I1 => f.write_str("I1"),
            Invariant::I2 => f.write_str("I2"),
            Invariant::I3 => f.write_str("I3"),
        }
    }
}

impl std::str::FromStr for Invariant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "I1" | "i1" => Ok(Invariant::I1),
            "I2" | "i2" => Ok(Invariant::I2),
            "I3" | "i3" => Ok(Invariant::I3),
            other => Err(format!("unknown invariant `{other}` (expected I1, I2 or I3)")),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("SVD rate {which:?} is not identifiable at these singular values")]
    DegenerateRates { which: Rate },

    #[error("Hessian of {invariant} is undefined at these singular values")]
    DegenerateHessian { invariant: Invariant },

    #[error("invariant I3 = {i3:e} is outside the model domain")]
    Domain { i3: f64 },

    #[error("element {element} is inadmissible: I3 = {i3:e}")]
    ElementDomain { element: usize, i3: f64 },

    #[error("triangle {index} has (near) zero rest area")]
    DegenerateTriangle { index: usize },

    #[error("matrix is not symmetric (asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("line search found no decrease after {halvings} halvings")]
    LineSearchFailed { halvings: usize },

    #[error("linear solve failed even with regularization {tau:e}")]
    LinearSolveFailed { tau: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
