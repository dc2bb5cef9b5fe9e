//! Data-parallel helpers. With the `parallel` feature the closures run on the
//! rayon pool; without it they run in index order on the calling thread.
//! Every helper returns results in index order, so outputs are identical
//! either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub(crate) fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Like [`map_indexed`], but stays on the calling thread below `min_parallel`
/// items where scheduling would cost more than the work.
pub(crate) fn map_indexed_min<T, F>(n: usize, min_parallel: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if n < min_parallel {
        (0..n).map(f).collect()
    } else {
        map_indexed(n, f)
    }
}

pub(crate) fn map_slice<S, T, F>(items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Sum of `f` over fixed-size chunks. Integer results make the total
/// independent of scheduling.
pub(crate) fn sum_chunks<S, F>(items: &[S], chunk: usize, f: F) -> u64
where
    S: Sync,
    F: Fn(&[S]) -> u64 + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_chunks(chunk.max(1)).map(f).sum()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.chunks(chunk.max(1)).map(f).sum()
    }
}
