//! Timing of the analytic eigensystem against the numerical baseline
//! (finite-difference 6×6 Hessian followed by Jacobi diagonalization).

use std::hint::black_box;
use std::time::Instant;

use serde::Serialize;

use crate::energy::{sheet_eigensystem, NeoHookeanSheet};
use crate::invariants::invariants;
use crate::linalg::Mat32;
use crate::svd::svd32;
use crate::verify::fd::{fd_hessian6, HESSIAN_STEP};
use crate::verify::jacobi::jacobi_eigen6;
use crate::verify::sampling::{sample_f, trial_rng, Region};

#[derive(Clone, Debug, Serialize)]
pub struct BenchReport {
    pub samples: usize,
    pub analytic_ns: f64,
    pub numerical_ns: f64,
    pub speedup: f64,
}

impl BenchReport {
    pub fn table(&self) -> String {
        format!(
            "method      ns/op\nanalytic    {:.1}\nnumerical   {:.1}\nspeedup     {:.1}x\n",
            self.analytic_ns, self.numerical_ns, self.speedup
        )
    }

    pub fn csv(&self) -> String {
        format!(
            "samples,analytic_ns,numerical_ns,speedup\n{},{:.1},{:.1},{:.2}\n",
            self.samples, self.analytic_ns, self.numerical_ns, self.speedup
        )
    }
}

fn mean_ns(inputs: &[Mat32], mut op: impl FnMut(&Mat32)) -> f64 {
    // one warm-up pass
    for f in inputs.iter().take(16) {
        op(f);
    }
    let start = Instant::now();
    for f in inputs {
        op(black_box(f));
    }
    start.elapsed().as_nanos() as f64 / inputs.len() as f64
}

/// Times both pipelines on `samples` sheet-region inputs, serially.
pub fn run_bench(seed: u64, samples: usize) -> BenchReport {
    let samples = samples.max(1);
    let inputs: Vec<Mat32> = (0..samples)
        .map(|i| sample_f(&mut trial_rng(seed, usize::MAX >> 33, i), Region::Sheet))
        .collect();
    let model = NeoHookeanSheet { mu: 1.0 };
    let psi = |m: &Mat32| 0.5 * model.mu * (m.norm_squared() + invariants(&svd32(m)).i3.powi(-2) - 3.0);

    let analytic_ns = mean_ns(&inputs, |f| {
        let e = sheet_eigensystem(&model, &svd32(f)).expect("sheet region input");
        black_box(e);
    });
    let numerical_ns = mean_ns(&inputs, |f| {
        let h = fd_hessian6(psi, f, HESSIAN_STEP);
        black_box(jacobi_eigen6(&h).expect("symmetric stencil"));
    });
    BenchReport {
        samples,
        analytic_ns,
        numerical_ns,
        speedup: numerical_ns / analytic_ns,
    }
}
