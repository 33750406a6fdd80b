//! Thin indirection over rayon so the data-parallel entry points compile to
//! plain sequential loops when the `parallel` feature is disabled.

/// Map `f` over `0..n`, in parallel when the `parallel` feature is on.
pub fn map_indices<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Always-sequential twin of [`map_indices`], kept callable with the
/// `parallel` feature on so benches can compare both paths.
pub fn map_indices_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// First `i` in `0..n` (in index order) whose `f(i)` is `Some`, searched in
/// parallel when enabled. Order-stable: matches the sequential result.
pub fn find_map_first<T, F>(n: usize, f: F) -> Option<T>
where
    T: Send,
    F: Fn(usize) -> Option<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().find_map_first(f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).find_map(f)
    }
}

/// Always-sequential twin of [`find_map_first`].
pub fn find_map_first_seq<T, F>(n: usize, f: F) -> Option<T>
where
    F: Fn(usize) -> Option<T>,
{
    (0..n).find_map(f)
}
