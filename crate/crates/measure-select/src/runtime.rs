//! Worker-pool helper. `MEASURE_SELECT_THREADS` caps the number of worker
//! threads; results are collected in input order so output never depends on
//! the pool size.

use rayon::prelude::*;

fn thread_cap() -> Option<usize> {
    std::env::var("MEASURE_SELECT_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1)
}

/// Maps `f` over the items in parallel, preserving order.
pub(crate) fn parallel_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    match thread_cap() {
        Some(1) => items.into_iter().map(f).collect(),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .expect("worker pool");
            pool.install(|| items.into_par_iter().map(f).collect())
        }
        None => items.into_par_iter().map(f).collect(),
    }
}
