//! Data-parallel execution of independent work items.
//!
//! Study engines fan out over tables or replicates with rayon when the
//! `parallel` feature is enabled, and fall back to a plain sequential loop
//! otherwise. Results always come back in input order, so reductions are
//! deterministic either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `items`, preserving order. Runs on the current rayon pool
/// when `parallel` is true and the `parallel` feature is compiled in.
pub fn map_ordered<T, U, F>(items: Vec<T>, parallel: bool, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel {
        return items.into_par_iter().map(f).collect();
    }
    let _ = parallel;
    items.into_iter().map(f).collect()
}

/// Runs `f` inside a rayon pool of `threads` workers; `None` uses the global
/// pool. Without the `parallel` feature `f` just runs on the caller thread.
pub fn run_with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    {
        match threads {
            Some(n) if n > 0 => rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .expect("failed to build thread pool")
                .install(f),
            _ => f(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        f()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_ordered_preserves_order() {
        let items: Vec<u64> = (0..1000).collect();
        let seq = map_ordered(items.clone(), false, |x| x * x);
        let par = map_ordered(items, true, |x| x * x);
        assert_eq!(seq, par);
        assert_eq!(seq[10], 100);
    }

    #[test]
    fn run_with_threads_returns_result() {
        let sum = run_with_threads(Some(2), || (0..100u64).sum::<u64>());
        assert_eq!(sum, 4950);
    }
}
