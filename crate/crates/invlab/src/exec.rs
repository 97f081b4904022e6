use invlab_core::exec::Executor;
use rayon::prelude::*;

/// Executor backed by the global Rayon pool. Results come back in index
/// order, so reductions downstream do not depend on the thread count.
#[derive(Debug, Clone, Copy, Default)]
pub struct Rayon;

impl Executor for Rayon {
    fn map_indexed<T: Send>(&self, n: usize, f: &(dyn Fn(usize) -> T + Sync)) -> Vec<T> {
        (0..n).into_par_iter().map(f).collect()
    }
}
