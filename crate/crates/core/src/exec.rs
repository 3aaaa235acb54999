//! Data-parallel map/reduce over independent work items.
//!
//! With the `parallel` feature the work is spread over the rayon pool;
//! without it (or with [`Exec::Sequential`]) the same closures run in order on
//! the calling thread. Reductions used in this crate are exact and
//! commutative, so both paths give identical results.

/// How a batch of independent work items is executed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    /// Rayon's global pool when the `parallel` feature is on, otherwise
    /// sequential.
    #[default]
    Parallel,
}

impl Exec {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    /// Maps every item and folds the results with `reduce`, starting from
    /// `identity()` for each chunk.
    pub fn map_reduce<T, R, M, I, F>(self, items: &[T], identity: I, map: M, reduce: F) -> R
    where
        T: Sync,
        R: Send,
        M: Fn(&T) -> R + Sync + Send,
        I: Fn() -> R + Sync + Send,
        F: Fn(R, R) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            use rayon::prelude::*;
            return items.par_iter().map(&map).reduce(&identity, &reduce);
        }
        items.iter().map(map).fold(identity(), reduce)
    }

    /// Runs `f` on every index in `0..n` and sums the `u64` results.
    pub fn sum_range<F>(self, n: usize, f: F) -> u64
    where
        F: Fn(usize) -> u64 + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).sum();
        }
        (0..n).map(f).sum()
    }
}

/// Runs `f` with `workers` threads: `Some(1)` means [`Exec::Sequential`],
/// `None` the default pool. Without the `parallel` feature every request
/// runs sequentially.
pub fn with_workers<R, F>(workers: Option<usize>, f: F) -> R
where
    R: Send,
    F: FnOnce(Exec) -> R + Send,
{
    match workers {
        Some(0 | 1) => f(Exec::Sequential),
        #[cfg(feature = "parallel")]
        Some(w) => match rayon::ThreadPoolBuilder::new().num_threads(w).build() {
            Ok(pool) => pool.install(|| f(Exec::Parallel)),
            Err(_) => f(Exec::Parallel),
        },
        _ => f(Exec::Parallel),
    }
}
