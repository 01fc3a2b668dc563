//! Order-preserving parallel map over a slice.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Applies `f(index, item)` to every element in parallel and returns the
/// results in input order. `workers == 0` uses rayon's global pool.
pub fn map_indexed<T, U, F>(items: &[T], workers: usize, f: F) -> Result<Vec<U>>
where
    T: Sync,
    U: Send,
    F: Fn(usize, &T) -> U + Sync + Send,
{
    let run = || items.par_iter().enumerate().map(|(i, t)| f(i, t)).collect();
    if workers == 0 {
        return Ok(run());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Range(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(run))
}
