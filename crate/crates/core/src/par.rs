//! Thread configuration shared by assembly and the check runner.
//!
//! `MEMBRANE_EIG_THREADS` caps the worker count; `0` selects serial
//! execution. Results never depend on the setting because every parallel map
//! collects in index order before any reduction.

use std::sync::OnceLock;

use rayon::prelude::*;
use rayon::ThreadPool;

pub const THREADS_ENV: &str = "MEMBRANE_EIG_THREADS";

enum Mode {
    Serial,
    Pool(ThreadPool),
    Global,
}

fn mode() -> &'static Mode {
    static MODE: OnceLock<Mode> = OnceLock::new();
    MODE.get_or_init(|| {
        match std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
        {
            Some(0) => Mode::Serial,
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map(Mode::Pool)
                .unwrap_or(Mode::Global),
            None => Mode::Global,
        }
    })
}

/// True when the environment requests serial mode.
pub fn is_serial() -> bool {
    matches!(mode(), Mode::Serial)
}

/// `(0..n).map(f)` collected in order, possibly in parallel.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match mode() {
        Mode::Serial => (0..n).map(f).collect(),
        Mode::Pool(pool) => pool.install(|| (0..n).into_par_iter().map(f).collect()),
        Mode::Global => (0..n).into_par_iter().map(f).collect(),
    }
}
