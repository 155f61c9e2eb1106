//! Parallel cell execution.

use rayon::prelude::*;

use ordcomp_core::solve::{CellExecutor, CellOutcome};
use ordcomp_core::Result;

/// Runs cell jobs on the current rayon pool; results keep job order, so
/// the assembled solution does not depend on the number of threads.
#[derive(Clone, Copy, Debug, Default)]
pub struct Rayon;

impl CellExecutor for Rayon {
    fn map(&self, jobs: usize, work: &(dyn Fn(usize) -> Result<CellOutcome> + Sync)) -> Vec<Result<CellOutcome>> {
        (0..jobs).into_par_iter().map(work).collect()
    }
}

/// Thread count from `--threads`, else `ORDCOMP_THREADS`, else rayon's
/// default (`0`).
pub fn thread_count(flag: Option<usize>) -> usize {
    flag.or_else(|| std::env::var("ORDCOMP_THREADS").ok()?.trim().parse().ok()).unwrap_or(0)
}

/// Runs `f` inside a pool of `threads` workers (`0`: one per core).
pub fn with_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}
