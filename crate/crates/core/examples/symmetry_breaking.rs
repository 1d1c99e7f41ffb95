//! Colors the square of a ring with adversarially shuffled ids.

use listcolor::gen;
use listcolor::local::{symmetry_break_with, SymmetryBreaker};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for exp in [4, 8, 12, 16] {
        let n = 1usize << exp;
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let ring = gen::relabel(&gen::cycle(n), &perm);
        let fast = symmetry_break_with(&ring, 2, 2, SymmetryBreaker::LinialColeVishkin).unwrap();
        let greedy = symmetry_break_with(&ring, 2, 2, SymmetryBreaker::GreedyToken).unwrap();
        println!(
            "n=2^{exp:<2} linial+reduction: {:>4} rounds, {} colors | greedy: {:>3} rounds",
            fast.rounds, fast.colors_used, greedy.rounds
        );
    }
}
