//! Data-parallel execution with a sequential fallback.
//!
//! Batch loops (minor enumeration, per-order Perron roots, quadruple and
//! hyperplane sweeps) go through [`Execution::map`]. Results are always
//! collected in input order, so parallel and sequential runs agree.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Runs on the rayon pool when the `parallel` feature is enabled and
    /// degrades to [`Execution::Sequential`] otherwise.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    pub fn map<I, R, F>(self, items: Vec<I>, f: F) -> Vec<R>
    where
        I: Send,
        R: Send,
        F: Fn(I) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => items.into_par_iter().map(f).collect(),
            _ => items.into_iter().map(f).collect(),
        }
    }

    /// True if `f` holds for every item. Short-circuits in both modes.
    pub fn all<I, F>(self, items: Vec<I>, f: F) -> bool
    where
        I: Send,
        F: Fn(I) -> bool + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => items.into_par_iter().all(f),
            _ => items.into_iter().all(f),
        }
    }
}
