//! Extends a precolored path on a wheel to the whole graph.

use listcolor::choosability::extend_precolored_path_with;
use listcolor::choosability::ExtendOptions;
use listcolor::gen;
use listcolor::graph::Coloring;
use listcolor::lists::{ListAssignment, ListMode};

fn main() {
    let g = gen::tri_grid(6);
    let lists = ListAssignment::generate(g.n(), 3, ListMode::Overlap, 2);
    let path = [0, 1];
    let mut phi = Coloring::new(g.n());
    phi.set(0, lists.list(0)[0]);
    let c1 = *lists.list(1).iter().find(|&&c| c != lists.list(0)[0]).unwrap();
    phi.set(1, c1);
    let (col, method) = extend_precolored_path_with(&g, &lists, &path, &phi, ExtendOptions::default()).unwrap();
    println!("extended by {method:?}; valid: {}", g.validate_coloring(Some(&lists), &col).is_valid());
}
