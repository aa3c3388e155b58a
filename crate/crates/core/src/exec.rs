//! Execution mode for the data-parallel loops of the engine.
//!
//! All heavy loops (column embeddings, per-table candidate scoring, score
//! matrices) go through these helpers. With the `parallel` feature disabled,
//! [`Execution::Parallel`] silently runs sequentially. Results never depend
//! on the mode: outputs are collected in input order.

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

impl Execution {
    /// True when work will really be spread over the rayon pool.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

pub(crate) fn try_map<T, R, F>(mode: Execution, items: &[T], f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        Execution::Parallel => items.par_iter().map(f).collect(),
        _ => items.iter().map(f).collect(),
    }
}
