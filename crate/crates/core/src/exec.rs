//! Choice between data-parallel and sequential execution of independent work.

use serde::{Deserialize, Serialize};

/// How independent chunks of work are scheduled. Results never depend on the
/// choice: every chunk owns its inputs and outputs are merged in chunk order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    /// Rayon thread pool. Runs sequentially when built without the
    /// `parallel` feature.
    #[default]
    Parallel,
    Sequential,
}

impl Execution {
    /// `f(0), f(1), ..., f(count - 1)` in index order.
    pub fn map<T, F>(self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                (0..count).into_par_iter().map(f).collect()
            }
            _ => (0..count).map(f).collect(),
        }
    }
}
