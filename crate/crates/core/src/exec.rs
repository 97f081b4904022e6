//! Pluggable execution of independent work items.
//!
//! Algorithms in this crate map a pure function over an index range and then
//! reduce the results in index order, so any executor that preserves output
//! order yields bit-identical results.

use alloc::vec::Vec;

/// Evaluates `f(i)` for every `i` in `0..n` and returns results in index order.
pub trait Executor: Sync {
    fn map_indexed<T: Send>(&self, n: usize, f: &(dyn Fn(usize) -> T + Sync)) -> Vec<T>;
}

/// Single-threaded executor.
#[derive(Debug, Clone, Copy, Default)]
pub struct Serial;

impl Executor for Serial {
    fn map_indexed<T: Send>(&self, n: usize, f: &(dyn Fn(usize) -> T + Sync)) -> Vec<T> {
        (0..n).map(f).collect()
    }
}
