//! Data-parallel helpers.
//!
//! Per-source shortest paths, pair sweeps, and seeded trial batches are all
//! embarrassingly parallel over read-only inputs. With the `parallel` feature
//! (default) they run on rayon; without it the same closures run sequentially
//! and produce identical results in the same order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `0..n`, in parallel when the feature is enabled.
pub(crate) fn maybe_parallel_rows<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Always-sequential variant, kept for benchmarking against the parallel path.
pub(crate) fn sequential_rows<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}
