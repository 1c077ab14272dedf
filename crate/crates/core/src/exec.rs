//! Execution strategy for the data-parallel loops (bands, α sweeps, error bands).
//!
//! Every parallel map collects into input order, and all cross-item reductions
//! happen afterwards on the ordered vector, so results are bit-identical for
//! either strategy and any thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    /// Uses rayon when the `parallel` feature is enabled, otherwise runs sequentially.
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// Ordered map over a slice.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => items.par_iter().map(f).collect(),
            _ => items.iter().map(f).collect(),
        }
    }

    /// Ordered map over an inclusive integer range (band indices).
    pub fn map_range<R, F>(self, lo: i64, hi: i64, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(i64) -> R + Sync + Send,
    {
        if hi < lo {
            return Vec::new();
        }
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => (lo..=hi).into_par_iter().map(f).collect(),
            _ => (lo..=hi).map(f).collect(),
        }
    }
}
