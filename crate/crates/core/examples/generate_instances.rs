//! Generates one instance per family and prints its size, girth and list size.

use listcolor::gen::{self, Family, GeneratorSpec};
use listcolor::lists::ListMode;

fn main() {
    for family in Family::ALL {
        let spec = GeneratorSpec { family, size: 6, seed: 1, list_mode: ListMode::Random };
        let inst = gen::generate(&spec);
        println!(
            "{:<22} n={:<4} m={:<4} girth={:<5} lists of {}",
            family.name(),
            inst.graph.n(),
            inst.graph.m(),
            inst.graph.girth().map_or("none".to_string(), |g| g.to_string()),
            inst.lists.list_size()
        );
    }
    let spec = GeneratorSpec { family: Family::SquareGrid, size: 3, seed: 1, list_mode: ListMode::Overlap };
    print!("{}", listcolor::graph::write_edge_list(&gen::generate(&spec).graph));
}
