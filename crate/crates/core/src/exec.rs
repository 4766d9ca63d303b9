//! Ordered map over independent work units.
//!
//! With the `parallel` feature the units run on a rayon pool; without it, or
//! when an [`Executor`] is built sequential, they run in order on the calling
//! thread. Results always come back in input order and the first error in
//! input order wins, so the choice never changes what a caller observes.

use crate::error::Result;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "BALANCEMKT_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Executor {
    threads: Option<usize>,
    sequential: bool,
}

impl Default for Executor {
    fn default() -> Self {
        Self::new(None)
    }
}

impl Executor {
    /// Parallel executor using at most `hint` workers (all cores when
    /// `None`), further capped by `BALANCEMKT_THREADS` when that is set.
    pub fn new(hint: Option<usize>) -> Self {
        let env = std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&n| n > 0);
        let threads = match (hint.filter(|&n| n > 0), env) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        Self {
            threads,
            sequential: threads == Some(1),
        }
    }

    pub fn sequential() -> Self {
        Self {
            threads: Some(1),
            sequential: true,
        }
    }

    pub fn is_parallel(&self) -> bool {
        cfg!(feature = "parallel") && !self.sequential
    }

    pub fn threads(&self) -> Option<usize> {
        self.threads
    }

    pub fn try_map<T, R, F>(&self, items: &[T], f: F) -> Result<Vec<R>>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> Result<R> + Sync + Send,
    {
        let out: Vec<Result<R>> = if self.is_parallel() {
            self.par_map(items, &f)
        } else {
            items.iter().map(&f).collect()
        };
        out.into_iter().collect()
    }

    #[cfg(feature = "parallel")]
    fn par_map<T, R, F>(&self, items: &[T], f: &F) -> Vec<Result<R>>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> Result<R> + Sync + Send,
    {
        use rayon::prelude::*;
        let run = || items.par_iter().map(f).collect::<Vec<_>>();
        match self.threads {
            Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
                Ok(pool) => pool.install(run),
                Err(_) => run(),
            },
            None => run(),
        }
    }

    #[cfg(not(feature = "parallel"))]
    fn par_map<T, R, F>(&self, items: &[T], f: &F) -> Vec<Result<R>>
    where
        F: Fn(&T) -> Result<R>,
    {
        items.iter().map(f).collect()
    }
}
