//! Index-ordered parallel map. Results come back in index order, so any
//! later reduction is independent of the schedule.

use crate::error::{Error, Result};

#[cfg(feature = "parallel")]
pub(crate) fn map_indexed<T, F>(n: u64, threads: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    use rayon::prelude::*;
    let go = || (0..n).into_par_iter().map(&f).collect::<Vec<_>>();
    match threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build()
                .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
            Ok(pool.install(go))
        }
        None => Ok(go()),
    }
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indexed<T, F>(n: u64, threads: Option<usize>, f: F) -> Result<Vec<T>>
where
    F: Fn(u64) -> T,
{
    if threads == Some(0) {
        return Err(Error::InvalidParameter("thread count must be positive".into()));
    }
    Ok((0..n).map(f).collect())
}
