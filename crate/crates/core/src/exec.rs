//! Data-parallel driver with a sequential fallback.
//!
//! Heavy sweeps (validator triple loops, equivalence sampling) go through
//! [`run_indexed`], which uses rayon under the `parallel` feature unless the
//! caller forces [`ExecMode::Sequential`]. Results are concatenated in index
//! order in both paths, so output is deterministic either way.

use crate::ExecMode;

pub fn run_indexed<T, F>(mode: ExecMode, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> Vec<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if mode == ExecMode::Auto {
            use rayon::prelude::*;
            return (0..n).into_par_iter().flat_map_iter(&f).collect();
        }
    }
    let _ = &mode;
    (0..n).flat_map(f).collect()
}

/// Map `f` over `0..n`, one output per index, in index order.
pub fn map_indexed<T, F>(mode: ExecMode, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if mode == ExecMode::Auto {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(&f).collect();
        }
    }
    let _ = &mode;
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_order() {
        let a = run_indexed(ExecMode::Auto, 100, |i| vec![i, i * 2]);
        let b = run_indexed(ExecMode::Sequential, 100, |i| vec![i, i * 2]);
        assert_eq!(a, b);
        let c = map_indexed(ExecMode::Auto, 50, |i| i * i);
        let d = map_indexed(ExecMode::Sequential, 50, |i| i * i);
        assert_eq!(c, d);
    }
}
