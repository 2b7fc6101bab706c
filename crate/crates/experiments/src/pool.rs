use rayon::prelude::*;

use crate::error::{ExperimentError, Result};

/// Evaluates `f` over `tasks` on a pool of `threads` workers (rayon's default
/// when `None`); results keep the order of `tasks`.
pub(crate) fn run_pool<T, R, F>(threads: Option<usize>, tasks: &[T], f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync + Send,
{
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| ExperimentError::Pool(e.to_string()))?;
    pool.install(|| tasks.par_iter().map(&f).collect())
}
