//! Index-parallel map used by table generation, Monte Carlo and the
//! verification grids.
//!
//! With the `parallel` feature and more than one worker the map runs on a
//! dedicated rayon pool; otherwise it runs sequentially. Output order is
//! always the index order.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Execution {
    workers: usize,
}

impl Default for Execution {
    fn default() -> Self {
        Self::sequential()
    }
}

impl Execution {
    pub fn sequential() -> Self {
        Self { workers: 1 }
    }

    /// `workers == 0` selects every available core.
    pub fn with_workers(workers: usize) -> Self {
        let workers = if workers == 0 {
            std::thread::available_parallelism().map_or(1, |n| n.get())
        } else {
            workers
        };
        Self { workers }
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    pub fn is_parallel(&self) -> bool {
        cfg!(feature = "parallel") && self.workers > 1
    }

    pub fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.workers > 1 && n > 1 {
            use rayon::prelude::*;
            match rayon::ThreadPoolBuilder::new().num_threads(self.workers).build() {
                Ok(pool) => return pool.install(|| (0..n).into_par_iter().map(&f).collect()),
                Err(_) => return (0..n).map(f).collect(),
            }
        }
        (0..n).map(f).collect()
    }

    /// Like [`Execution::map`] but stops at the first error in index order.
    pub fn try_map<T, E, F>(&self, n: usize, f: F) -> Result<Vec<T>, E>
    where
        T: Send,
        E: Send,
        F: Fn(usize) -> Result<T, E> + Sync + Send,
    {
        self.map(n, f).into_iter().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_map_preserves_order() {
        let seq = Execution::sequential().map(100, |i| i * i);
        let par = Execution::with_workers(4).map(100, |i| i * i);
        assert_eq!(seq, par);
    }

    #[test]
    fn try_map_reports_first_error() {
        let r: Result<Vec<usize>, usize> =
            Execution::with_workers(3).try_map(10, |i| if i >= 4 { Err(i) } else { Ok(i) });
        assert_eq!(r, Err(4));
    }
}
