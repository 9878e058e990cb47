//! Parallel sweep over all publications.

use std::sync::atomic::{AtomicUsize, Ordering};

use dindex_core::engine::SweepScratch;
use dindex_core::{Corpus, DTrajectory, Engine, EngineConfig, TMax};
use rayon::prelude::*;

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "DINDEX_THREADS";

/// Thread count from [`THREADS_ENV`], if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Trajectories of every publication in corpus order, computed on
/// `threads` workers (all cores when `None`). The result does not depend on
/// the thread count.
pub fn parallel_sweep(c: &Corpus, config: EngineConfig, t_max: TMax, threads: Option<usize>) -> Vec<DTrajectory> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().expect("thread pool");
    let engine = Engine::new(c, config);
    let n = c.len();
    let done = AtomicUsize::new(0);
    let step = (n / 20).max(1);
    pool.install(|| {
        (0..n as u32)
            .into_par_iter()
            .with_min_len(64)
            .map_init(
                || SweepScratch::new(c),
                |scratch, i| {
                    let traj = engine.sweep_one(i, t_max, scratch);
                    let k = done.fetch_add(1, Ordering::Relaxed) + 1;
                    if k.is_multiple_of(step) || k == n {
                        log::info!("sweep: {k}/{n} publications");
                    }
                    traj
                },
            )
            .collect()
    })
}
