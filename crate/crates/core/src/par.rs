//! Replicate execution and seed splitting.
//!
//! Every random draw in the crate comes from a [`ChaCha8Rng`] seeded through
//! [`replicate_seed`]: replicate `i` of a run with root seed `s` uses
//! `splitmix64(s ^ splitmix64(i))`. Results are collected in replicate order, so
//! sequential and parallel execution produce identical output.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Name recorded in experiment metadata.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng; replicate seed = splitmix64(root ^ splitmix64(i))";

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn replicate_seed(root: u64, index: u64) -> u64 {
    splitmix64(root ^ splitmix64(index))
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Uses the rayon pool; identical to `Sequential` without the `parallel` feature.
    #[default]
    Parallel,
}

/// Evaluates `f` on replicates `0..count`, returning results in index order.
pub fn map_replicates<T, F>(exec: Execution, count: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..count).into_par_iter().map(f).collect()
        }
        _ => (0..count).map(f).collect(),
    }
}

/// Folds replicates into an accumulator with an associative `merge`.
pub fn fold_replicates<A, F, M>(exec: Execution, count: u64, init: A, f: F, merge: M) -> A
where
    A: Send + Clone + Sync,
    F: Fn(&mut A, u64) + Sync + Send,
    M: Fn(A, A) -> A + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..count)
                .into_par_iter()
                .fold(
                    || init.clone(),
                    |mut acc, i| {
                        f(&mut acc, i);
                        acc
                    },
                )
                .reduce(|| init.clone(), &merge)
        }
        _ => {
            let mut acc = init;
            for i in 0..count {
                f(&mut acc, i);
            }
            acc
        }
    }
}
