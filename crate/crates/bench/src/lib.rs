//! Inputs shared by the criterion benches.

use boolglr::Grammar;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A uniformly random word of length `n` over the grammar's alphabet.
pub fn random_word(g: &Grammar, n: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| *g.alphabet().choose(&mut rng).expect("nonempty alphabet"))
        .collect()
}
