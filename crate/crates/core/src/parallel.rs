//! Order-preserving parallel map over independent evaluations.

#[cfg(feature = "parallel")]
pub fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

/// Caps the global worker pool. Only the first call has an effect.
#[cfg(feature = "parallel")]
pub fn set_worker_limit(workers: usize) -> bool {
    rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build_global().is_ok()
}

#[cfg(not(feature = "parallel"))]
pub fn set_worker_limit(_workers: usize) -> bool {
    false
}
