//! Colors a triangular grid with the sequential engine and prints each level.

use listcolor::engine::{color_graph, EngineConfig};
use listcolor::gen;
use listcolor::lists::{ListAssignment, ListMode};

fn main() {
    let g = gen::tri_grid(40);
    let lists = ListAssignment::generate(g.n(), 3, ListMode::Overlap, 5);
    let run = color_graph(&g, &lists, &EngineConfig::default()).expect("valid input");
    for s in &run.stats {
        println!(
            "level {:>2}: {:>5} live, {:>4} deleted, shrink {:.3}, {} classes{}",
            s.level,
            s.n_before,
            s.deleted,
            *s.shrink_ratio.numer() as f64 / *s.shrink_ratio.denom() as f64,
            s.color_classes,
            if s.terminal { ", solved" } else { "" }
        );
    }
    let col = run.coloring.expect("planar graphs with 5-lists are colorable");
    println!("valid: {}, colors used: {}", g.validate_coloring(Some(&lists), &col).is_valid(), col.distinct_colors());
}
