//! Order-preserving parallel map over a thread pool sized by
//! `VALUATION_LAB_THREADS` (unset: one thread per core; `0`: serial).

use std::sync::OnceLock;

use rayon::prelude::*;
use rayon::ThreadPool;

pub const THREADS_ENV: &str = "VALUATION_LAB_THREADS";

fn pool() -> Option<&'static ThreadPool> {
    static POOL: OnceLock<Option<ThreadPool>> = OnceLock::new();
    POOL.get_or_init(|| {
        let threads = match std::env::var(THREADS_ENV) {
            Ok(v) => match v.trim().parse::<usize>() {
                Ok(0) => return None,
                Ok(k) => k,
                Err(_) => 0,
            },
            Err(_) => 0,
        };
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().ok()
    })
    .as_ref()
}

/// Threads available to [`map`]; 1 when running serially.
pub fn thread_count() -> usize {
    pool().map_or(1, ThreadPool::current_num_threads)
}

/// `items.map(f)` in input order. Runs serially when `serial` is set or
/// the environment disables threading.
pub fn map<T, R, F>(items: Vec<T>, serial: bool, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Send + Sync,
{
    match pool() {
        Some(p) if !serial && items.len() > 1 => p.install(|| items.into_par_iter().map(f).collect()),
        _ => items.into_iter().map(f).collect(),
    }
}
