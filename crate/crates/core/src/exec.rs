//! Sequential or data-parallel execution of indexed work chunks.
//!
//! Results always come back in chunk order, so any reduction done by the caller is
//! independent of how many workers ran the chunks.

/// How chunked work is scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Rayon workers; `None` uses the global pool. Falls back to sequential when the
    /// crate is built without the `parallel` feature.
    Parallel { threads: Option<usize> },
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel { threads: None }
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// `Sequential` for one worker, a dedicated pool otherwise.
    pub fn with_workers(workers: usize) -> Self {
        if workers <= 1 {
            Execution::Sequential
        } else {
            Execution::Parallel {
                threads: Some(workers),
            }
        }
    }

    /// Evaluates `f(0), ..., f(chunks - 1)` and returns the results in index order.
    pub fn map_chunks<T, F>(&self, chunks: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match *self {
            Execution::Sequential => (0..chunks).map(f).collect(),
            Execution::Parallel { threads } => parallel_map(chunks, threads, f),
        }
    }
}

#[cfg(feature = "parallel")]
fn parallel_map<T, F>(chunks: usize, threads: Option<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    let run = || (0..chunks).into_par_iter().map(&f).collect();
    match threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(run),
            Err(_) => (0..chunks).map(&f).collect(),
        },
        None => run(),
    }
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<T, F>(chunks: usize, _threads: Option<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..chunks).map(f).collect()
}

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.carry);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}
