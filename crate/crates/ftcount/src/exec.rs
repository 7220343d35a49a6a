//! Sequential or data-parallel mapping over an index range. Results always come
//! back in index order, so reductions are deterministic for any thread count.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Rayon pool with the given number of workers (`None` = all cores).
    /// Falls back to sequential when built without the `parallel` feature.
    #[default]
    Parallel,
    ParallelWith(usize),
}

pub fn map_indices<T, F>(n: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        Execution::Sequential => (0..n).map(f).collect(),
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        #[cfg(feature = "parallel")]
        Execution::ParallelWith(k) => {
            use rayon::prelude::*;
            let pool = rayon::ThreadPoolBuilder::new().num_threads(k.max(1)).build().expect("thread pool");
            pool.install(|| (0..n).into_par_iter().map(f).collect())
        }
        #[cfg(not(feature = "parallel"))]
        _ => (0..n).map(f).collect(),
    }
}
