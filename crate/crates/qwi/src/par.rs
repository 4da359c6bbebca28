//! Thin indirection over the optional data-parallel runtime. With the
//! `parallel` feature (default) sweeps fan out over a rayon pool; without it
//! the same entry points run sequentially, so results are identical either
//! way.

#[cfg(feature = "parallel")]
pub(crate) fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Always-sequential variant, kept available under every feature set so the
/// two code paths can be compared directly.
pub(crate) fn map_sequential<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Cap the worker pool at `threads` (0 keeps the runtime default). Call once,
/// before the first parallel operation; later calls return an error if a pool
/// already exists. Without the `parallel` feature this is a no-op.
#[cfg(feature = "parallel")]
pub fn configure_worker_threads(threads: usize) -> crate::error::Result<()> {
    if threads == 0 {
        return Ok(());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| crate::error::Error::InvalidArgument(format!("worker pool setup: {e}")))
}

#[cfg(not(feature = "parallel"))]
pub fn configure_worker_threads(_threads: usize) -> crate::error::Result<()> {
    Ok(())
}
