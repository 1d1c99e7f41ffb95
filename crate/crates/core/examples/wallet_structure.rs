//! Builds wallets of non-touching pockets for growing C and audits them.

use listcolor::gen;
use listcolor::graph::VertexSet;
use listcolor::structure::{density, find_wallet_with, SubgraphSpec, WalletOptions};
use num_rational::Ratio;

fn main() {
    let g = gen::random_triangulation(400, 4);
    for c in [6, 12, 24, 48] {
        let options = WalletOptions { c, k: 1, epsilon: Ratio::new(1, 2), r: None };
        let wallet = find_wallet_with(&g, &options);
        let union = wallet.pockets.iter().fold(VertexSet::new(), |acc, p| acc.union(&p.vertices));
        let d = density(&g, &SubgraphSpec::induced(&g, union), 3, options.epsilon).unwrap();
        println!(
            "C={c:<2}: removed {:>3}, {:>3} pockets ({} purses), target met: {:<5}, audit ok: {}, density of union {}",
            wallet.removed,
            wallet.pockets.len(),
            wallet.pockets.iter().filter(|p| p.is_purse).count(),
            wallet.target_met,
            wallet.audit(&g).is_ok(),
            d.value
        );
    }
}
