//! Chunked iteration over output buffers, data-parallel when the
//! `parallel` feature is enabled. Every chunk is computed independently,
//! so the results are identical to the sequential fallback.

#[cfg(feature = "parallel")]
pub(crate) fn for_each_chunk<F>(out: &mut [f64], chunk: usize, f: F)
where
    F: Fn(usize, &mut [f64]) + Sync,
{
    use rayon::prelude::*;
    out.par_chunks_mut(chunk)
        .enumerate()
        .for_each(|(i, c)| f(i * chunk, c));
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn for_each_chunk<F>(out: &mut [f64], chunk: usize, f: F)
where
    F: Fn(usize, &mut [f64]) + Sync,
{
    for_each_chunk_seq(out, chunk, f);
}

/// Always-sequential twin of [`for_each_chunk`]; the fallback body and the
/// baseline the benchmarks compare against.
pub(crate) fn for_each_chunk_seq<F>(out: &mut [f64], chunk: usize, f: F)
where
    F: Fn(usize, &mut [f64]) + Sync,
{
    for (i, c) in out.chunks_mut(chunk).enumerate() {
        f(i * chunk, c);
    }
}
