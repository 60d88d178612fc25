use rayon::prelude::*;
use rayon::ThreadPool;

use crate::error::CliError;

/// Replicas computed per batch; bounds memory while keeping workers busy.
const BATCH: u64 = 256;

pub fn build(threads: Option<usize>) -> Result<ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))
}

/// Runs `draw` for replicas `0..replicas` on the pool and hands results to `sink` in replica order.
pub fn ordered<T, D, S>(pool: &ThreadPool, replicas: u64, draw: D, mut sink: S) -> Result<(), CliError>
where
    T: Send,
    D: Fn(u64) -> Result<T, CliError> + Sync,
    S: FnMut(u64, T) -> Result<(), CliError>,
{
    let mut start = 0;
    while start < replicas {
        let end = (start + BATCH).min(replicas);
        let batch: Vec<Result<T, CliError>> = pool.install(|| (start..end).into_par_iter().map(&draw).collect());
        for (r, item) in (start..end).zip(batch) {
            sink(r, item?)?;
        }
        start = end;
    }
    Ok(())
}

pub fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(rand::random)
}
