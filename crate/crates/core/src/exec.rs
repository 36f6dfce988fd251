//! Data-parallel map with a sequential fallback.
//!
//! With the `rayon` feature disabled every [`Mode`] runs sequentially.

macro_rules! if_rayon {
    ($rayon_value: expr, $else_value: expr) => {{
        #[cfg(feature = "rayon")]
        {
            ($rayon_value)
        }
        #[cfg(not(feature = "rayon"))]
        {
            ($else_value)
        }
    }};
}
#[allow(unused_imports)]
pub(crate) use if_rayon;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    Sequential,
    #[default]
    Parallel,
}

pub fn map<T, R, F>(mode: Mode, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match mode {
        Mode::Sequential => items.iter().map(f).collect(),
        Mode::Parallel => if_rayon!(
            {
                use rayon::prelude::*;
                items.par_iter().map(f).collect()
            },
            items.iter().map(f).collect()
        ),
    }
}

/// Map over `0..n` in contiguous chunks and return per-chunk results in order.
pub fn map_chunks<R, F>(mode: Mode, n: usize, chunk: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(std::ops::Range<usize>) -> R + Sync + Send,
{
    let chunk = chunk.max(1);
    let ranges: Vec<std::ops::Range<usize>> = (0..n).step_by(chunk).map(|s| s..(s + chunk).min(n)).collect();
    map(mode, &ranges, |r| f(r.clone()))
}

/// Cap the global worker pool; a no-op without the `rayon` feature or once a pool exists.
pub fn init_threads(threads: Option<usize>) {
    if_rayon!(
        {
            if let Some(t) = threads {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global();
            }
        },
        {
            let _ = threads;
        }
    )
}

/// Reads `TORUS_SOLITON_THREADS`.
pub fn threads_from_env() -> Option<usize> {
    std::env::var("TORUS_SOLITON_THREADS")
        .ok()
        .and_then(|s| s.trim().parse().ok())
}
