use palmdt::exec::Executor;
use rayon::prelude::*;
use rayon::ThreadPool;

/// Runs replicates on a rayon pool. `map` collects in index order, so the
/// worker count never changes a result.
pub struct RayonExecutor {
    pool: ThreadPool,
}

impl RayonExecutor {
    /// `threads = 0` uses the available parallelism.
    pub fn new(threads: usize) -> anyhow::Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
        Ok(RayonExecutor { pool })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl Executor for RayonExecutor {
    fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        self.pool.install(|| (0..n).into_par_iter().map(f).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use palmdt::exec::Sequential;

    #[test]
    fn order_matches_sequential() {
        let f = |k: usize| (k * 7919) % 13;
        assert_eq!(RayonExecutor::new(3).unwrap().map(100, f), Sequential.map(100, f));
    }
}
