//! Minimal deterministic work pool.
//!
//! Work is split into fixed chunks claimed by worker threads through an atomic
//! counter; results land in slots keyed by chunk index, so the combined output
//! is identical regardless of worker count or scheduling.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

/// Worker count: `RATCHET_LEVY_THREADS` if set, else available parallelism.
pub fn worker_count() -> usize {
    if let Ok(v) = std::env::var("RATCHET_LEVY_THREADS") {
        if let Ok(n) = v.trim().parse::<usize>() {
            if n >= 1 {
                return n;
            }
        }
    }
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

/// Applies `f` to every chunk `[start, end)` of `0..n` and returns the results
/// in chunk order.
pub fn map_chunks<T, F>(n: usize, chunk: usize, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, usize) -> T + Sync,
{
    assert!(chunk > 0);
    let n_chunks = n.div_ceil(chunk);
    if workers <= 1 || n_chunks <= 1 {
        return (0..n_chunks)
            .map(|c| f(c * chunk, ((c + 1) * chunk).min(n)))
            .collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<T>>> = (0..n_chunks).map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..workers.min(n_chunks) {
            scope.spawn(|| loop {
                let c = next.fetch_add(1, Ordering::Relaxed);
                if c >= n_chunks {
                    break;
                }
                let out = f(c * chunk, ((c + 1) * chunk).min(n));
                *slots[c].lock().unwrap() = Some(out);
            });
        }
    });
    slots
        .into_iter()
        .map(|s| s.into_inner().unwrap().expect("chunk result missing"))
        .collect()
}
