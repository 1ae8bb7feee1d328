use parroteval_core::Executor;
use rayon::prelude::*;
use rayon::ThreadPool;

/// Evaluates entries on a dedicated rayon pool. Output order always
/// follows the input index.
pub struct Parallel {
    pool: ThreadPool,
}

impl Parallel {
    pub fn new(workers: usize) -> Result<Self, rayon::ThreadPoolBuildError> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build()?;
        Ok(Parallel { pool })
    }
}

impl Executor for Parallel {
    fn map<R, F>(&self, len: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        self.pool.install(|| (0..len).into_par_iter().map(f).collect())
    }
}
