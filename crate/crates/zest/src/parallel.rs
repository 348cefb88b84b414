//! Data-parallel map helpers.
//!
//! With the default `parallel` feature the batch operations (training the
//! per-class dictionaries, scoring evaluation sets) fan out over rayon;
//! without it they run sequentially with identical results. Output order
//! always matches input order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `items`, in parallel when the `parallel` feature is on.
#[cfg(feature = "parallel")]
pub fn map_ordered<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_ordered<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Always-sequential variant, kept for benchmarking the parallel speedup.
pub fn map_ordered_sequential<T, U, F>(items: &[T], mut f: F) -> Vec<U>
where
    F: FnMut(&T) -> U,
{
    items.iter().map(&mut f).collect()
}
