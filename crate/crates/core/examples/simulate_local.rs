//! Runs the message-passing simulation with and without pipelining.

use listcolor::gen;
use listcolor::lists::{ListAssignment, ListMode};
use listcolor::local::{simulate_detailed, SimConfig};

fn main() {
    let g = gen::tri_grid(20);
    let lists = ListAssignment::generate(g.n(), 3, ListMode::Random, 0);
    for pipelined in [true, false] {
        let cfg = SimConfig { pipelined, ..SimConfig::default() };
        let (col, trace, levels) = simulate_detailed(&g, &lists, &cfg).unwrap();
        println!(
            "pipelined={pipelined}: {} rounds, depth {}, valid {}",
            trace.rounds_total,
            trace.recursion_depth,
            g.validate_coloring(Some(&lists), &col).is_valid()
        );
        for l in &levels {
            println!(
                "  level {:>2}: {:>4} live, {:>3} pockets, {:>2} classes, extend rounds {}..{}",
                l.level, l.live, l.pockets, l.classes, l.extend_start, l.extend_end
            );
        }
    }
}
