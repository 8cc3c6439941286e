//! Data-parallel execution helpers.
//!
//! With the default `parallel` feature the batch helpers fan out over rayon;
//! without it they fall back to plain sequential iteration. The `_seq` /
//! `_par` variants are always explicit so benchmarks can compare both.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Applies `f` to every item, sequentially.
pub fn map_collect_seq<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U,
{
    items.into_iter().map(f).collect()
}

/// Applies `f` to every item on the rayon pool.
#[cfg(feature = "parallel")]
pub fn map_collect_par<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    items.into_par_iter().map(f).collect()
}

/// Feature-dispatched batch map: parallel when built with `parallel`,
/// sequential otherwise.
pub fn map_collect<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        map_collect_par(items, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_collect_seq(items, f)
    }
}

/// SplitMix64 step, used to derive independent per-replication seeds.
fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for replication `rep` of a run seeded with `seed`.
pub fn replication_seed(seed: u64, rep: usize) -> u64 {
    splitmix64(seed ^ splitmix64(rep as u64))
}

/// Runs `reps` independent replications of `f`, each with its own derived
/// seed, sequentially.
pub fn replicate_seq<T, F>(reps: usize, seed: u64, f: F) -> Vec<T>
where
    F: Fn(u64) -> T,
{
    (0..reps).map(|r| f(replication_seed(seed, r))).collect()
}

/// Parallel version of [`replicate_seq`]; identical output for a given seed.
#[cfg(feature = "parallel")]
pub fn replicate_par<T, F>(reps: usize, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    (0..reps)
        .into_par_iter()
        .map(|r| f(replication_seed(seed, r)))
        .collect()
}

/// Feature-dispatched replication harness.
pub fn replicate<T, F>(reps: usize, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        replicate_par(reps, seed, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        replicate_seq(reps, seed, f)
    }
}
