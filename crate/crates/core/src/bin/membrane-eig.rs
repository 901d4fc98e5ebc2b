use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use membrane_eig::fem::scene::run_scene;
use membrane_eig::verify::bench::run_bench;
use membrane_eig::verify::checks::{format_reports, run_checks};
use membrane_eig::{invariant_eigensystem, sheet_eigensystem, svd32, EigenSystem6, Invariant, Mat32, NeoHookeanSheet};

#[derive(Parser)]
#[command(
    name = "membrane-eig",
    version,
    about = "Analytic membrane Hessian eigensystems, checks and solver"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Sheet,
}

#[derive(Subcommand)]
enum Command {
    /// Six eigenpairs of a Hessian at F (row-major a,b,c,d,e,f).
    Eigs {
        #[arg(long = "f", value_delimiter = ',', allow_hyphen_values = true, required = true)]
        f: Vec<f64>,
        #[arg(long, conflicts_with = "invariant")]
        model: Option<Model>,
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
        #[arg(long)]
        invariant: Option<Invariant>,
        #[arg(long)]
        json: bool,
    },
    /// Randomized verification suite; exits nonzero if any check fails.
    Check {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long)]
        json: bool,
    },
    /// Quasi-static solve of a JSON scene.
    Solve {
        #[arg(long)]
        scene: PathBuf,
    },
    /// Analytic eigensystem vs. finite-difference + Jacobi timing.
    Bench {
        #[arg(long, default_value_t = 20000)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

#[derive(Serialize)]
struct EigsOutput {
    f: [f64; 6],
    sigma: [f64; 2],
    pairs: Vec<PairOutput>,
}

#[derive(Serialize)]
struct PairOutput {
    lambda: f64,
    q: [f64; 6],
}

fn eigs(
    f: &[f64],
    model: Option<Model>,
    mu: f64,
    invariant: Option<Invariant>,
    json: bool,
) -> membrane_eig::Result<()> {
    let f: [f64; 6] = f
        .try_into()
        .map_err(|_| membrane_eig::Error::InvalidInput("--f needs six values".into()))?;
    let f = Mat32::from_row_slice(&f);
    let svd = svd32(&f);
    let eig: EigenSystem6 = match (model, invariant) {
        (_, Some(which)) => invariant_eigensystem(which, &svd)?,
        (Some(Model::Sheet) | None, None) => sheet_eigensystem(&NeoHookeanSheet::new(mu)?, &svd)?,
    };
    let out = EigsOutput {
        f: f.to_flat(),
        sigma: svd.sigma,
        pairs: eig
            .pairs
            .iter()
            .map(|p| PairOutput {
                lambda: p.lambda,
                q: p.q.to_flat(),
            })
            .collect(),
    };
    if json {
        emit(&(serde_json::to_string_pretty(&out)? + "\n"));
    } else {
        let mut text = format!("sigma = ({:.12}, {:.12})\n", out.sigma[0], out.sigma[1]);
        for (i, p) in out.pairs.iter().enumerate() {
            let _ = writeln!(text, "lambda[{i}] = {:.15}", p.lambda);
            for r in 0..3 {
                let _ = writeln!(text, "    [{:>18.12} {:>18.12}]", p.q[2 * r], p.q[2 * r + 1]);
            }
        }
        emit(&text);
    }
    Ok(())
}

/// Writes to stdout, tolerating a closed pipe.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn run(cli: Cli) -> membrane_eig::Result<bool> {
    match cli.command {
        Command::Eigs {
            f,
            model,
            mu,
            invariant,
            json,
        } => eigs(&f, model, mu, invariant, json).map(|_| true),
        Command::Check { seed, trials, json } => {
            let reports = run_checks(seed, trials)?;
            if json {
                emit(&(serde_json::to_string_pretty(&reports)? + "\n"));
            } else {
                emit(&format_reports(&reports));
            }
            Ok(reports.iter().all(|r| r.passed))
        }
        Command::Solve { scene } => {
            let outcome = run_scene(&scene)?;
            let last = outcome.report.final_record();
            emit(&format!(
                "{:?} after {} iterations: energy {:.12e}, |g|inf {:.3e}; {} frames in {}\n",
                outcome.report.termination,
                outcome.report.iterations,
                last.energy,
                last.grad_norm,
                outcome.frames,
                outcome.output_dir.display()
            ));
            Ok(true)
        }
        Command::Bench { trials, seed } => {
            let report = run_bench(seed, trials);
            emit(&format!("{}\n{}", report.table(), report.csv()));
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
