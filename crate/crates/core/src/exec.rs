//! Order-stable data-parallel helpers.
//!
//! Every helper returns the same result for [`Execution::Sequential`] and
//! [`Execution::Parallel`]; only wall-clock time differs. Without the
//! `parallel` feature both variants run on the calling thread.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// True when work will actually be spread over a thread pool.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// `f(0), f(1), ..., f(n - 1)` in index order.
pub fn map_indexed<T, F>(exec: Execution, n: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// Number of indices in `0..n` for which `pred` holds.
pub fn count_indexed<F>(exec: Execution, n: u64, pred: F) -> u64
where
    F: Fn(u64) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return (0..n).into_par_iter().filter(|&i| pred(i)).count() as u64;
    }
    let _ = exec;
    (0..n).filter(|&i| pred(i)).count() as u64
}

/// Applies `f` to each item, preserving order.
pub fn map_slice<S, T, F>(exec: Execution, items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_modes_agree() {
        let f = |i: u64| i.wrapping_mul(0x9e37_79b9_7f4a_7c15) >> 7;
        assert_eq!(map_indexed(Execution::Sequential, 5000, f), map_indexed(Execution::Parallel, 5000, f));
        let pred = |i: u64| i % 7 == 3;
        assert_eq!(count_indexed(Execution::Sequential, 10_000, pred), count_indexed(Execution::Parallel, 10_000, pred));
        let v: Vec<u32> = (0..1000).collect();
        assert_eq!(map_slice(Execution::Parallel, &v, |x| x * 2), map_slice(Execution::Sequential, &v, |x| x * 2));
    }
}
