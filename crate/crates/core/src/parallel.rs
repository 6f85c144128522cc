//! Deterministic chunked work distribution.
//!
//! Work is cut into fixed-size chunks and chunk `i` always receives the same
//! inputs (for sampling: the random stream `i` of the caller's seed), so the
//! output does not depend on the thread count or on whether the `parallel`
//! feature is enabled.

use serde::Serialize;

use crate::error::Result;

/// Rows produced per chunk.
pub const CHUNK_ROWS: usize = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Execution {
    Sequential,
    /// Uses the rayon thread pool when the `parallel` feature is on and falls
    /// back to sequential execution otherwise.
    #[default]
    Parallel,
}

impl Execution {
    pub fn is_parallel_available() -> bool {
        cfg!(feature = "parallel")
    }
}

/// Fills `out` (`rows × width`, row-major) chunk by chunk; `fill` receives the
/// chunk index and that chunk's slice.
pub fn fill_chunks<F>(out: &mut [f64], width: usize, exec: Execution, fill: F) -> Result<()>
where
    F: Fn(usize, &mut [f64]) -> Result<()> + Sync + Send,
{
    let chunk_len = CHUNK_ROWS * width.max(1);
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            out.par_chunks_mut(chunk_len)
                .enumerate()
                .try_for_each(|(i, chunk)| fill(i, chunk))
        }
        _ => out
            .chunks_mut(chunk_len)
            .enumerate()
            .try_for_each(|(i, chunk)| fill(i, chunk)),
    }
}

/// `f` applied to every item, in order.
pub fn map_items<T, U, F>(items: &[T], exec: Execution, f: F) -> Result<Vec<U>>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> Result<U> + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        _ => items.iter().map(f).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunk_fill_is_execution_independent() {
        let rows = 3 * CHUNK_ROWS + 17;
        let run = |exec| {
            let mut out = vec![0.0; rows * 2];
            fill_chunks(&mut out, 2, exec, |i, chunk| {
                for (k, v) in chunk.iter_mut().enumerate() {
                    *v = (i * 1_000_000 + k) as f64;
                }
                Ok(())
            })
            .unwrap();
            out
        };
        assert_eq!(run(Execution::Sequential), run(Execution::Parallel));
    }

    #[test]
    fn map_preserves_order() {
        let items: Vec<u32> = (0..1000).collect();
        let out = map_items(&items, Execution::Parallel, |x| Ok(x * 2)).unwrap();
        assert_eq!(out, items.iter().map(|x| x * 2).collect::<Vec<_>>());
    }

    #[test]
    fn errors_propagate() {
        let items = [1, 2, 3];
        let err = map_items(&items, Execution::Sequential, |&x| {
            if x == 2 {
                Err(crate::GmlError::domain("two"))
            } else {
                Ok(x)
            }
        });
        assert!(err.is_err());
    }
}
