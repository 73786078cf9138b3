//! Partner assignment for offline mixing.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{PairRng, Purpose};

/// Gives every entry `i` a partner `j != i` and returns `(i, j)` for all `i`,
/// ordered by `i`.
///
/// The entries are shuffled and each one is paired with its successor in the
/// shuffled cycle, so every entry is the first image of exactly one pair and
/// the second image of exactly one pair.
pub fn pair_indices<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Vec<(usize, usize)>> {
    if n < 2 {
        return Err(Error::Domain(format!(
            "pairing needs at least two entries, got {n}"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut partner = vec![0; n];
    for k in 0..n {
        partner[order[k]] = order[(k + 1) % n];
    }
    Ok(partner.into_iter().enumerate().collect())
}

/// Pairs for a dataset of `n` entries under `seed`.
pub fn form_pairs(n: usize, seed: u64) -> Result<Vec<(usize, usize)>> {
    pair_indices(n, &mut PairRng::new(seed, 0).stream(Purpose::Pairing))
}
