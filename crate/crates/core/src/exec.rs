//! Data-parallel map helpers with a sequential fallback.
//!
//! With the default `parallel` feature the maps run on rayon; without it they
//! degrade to plain iterators. Output order is the input order either way, so
//! results are identical across thread counts and builds.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Install a global thread pool of `n` threads (first call wins).
#[cfg(feature = "parallel")]
pub fn set_threads(n: usize) -> Result<(), String> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

/// Without the `parallel` feature there is nothing to configure.
#[cfg(not(feature = "parallel"))]
pub fn set_threads(_n: usize) -> Result<(), String> {
    Err("built without the `parallel` feature; running single-threaded".to_owned())
}

/// Order-preserving indexed map.
pub(crate) fn map_indexed<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
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

/// Order-preserving map over a slice.
pub(crate) fn map_slice<'a, T, U, F>(items: &'a [T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&'a T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}
