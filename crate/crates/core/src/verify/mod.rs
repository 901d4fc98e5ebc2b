//! Independent oracles, the randomized check suite and the benchmark.

pub mod bench;
pub mod checks;
pub mod fd;
pub mod jacobi;
pub mod sampling;

pub use checks::{run_checks, run_checks_with, CheckReport, Kernels};
pub use fd::{fd_gradient, fd_hessian6};
pub use jacobi::{jacobi_eigen6, jacobi_eigen_sym, DenseSym, Spectrum};
