//! Times the engine on growing triangular grids and fits the exponent.

use listcolor::engine::{bench_scaling, EngineConfig};
use listcolor::gen::Family;

fn main() {
    let report = bench_scaling(Family::TriGrid, &[1000, 2000, 4000, 8000], &EngineConfig::default()).unwrap();
    for p in &report.points {
        println!("n={:>6} {:>7.3}s depth {}", p.n, p.seconds, p.depth);
    }
    println!("fitted exponent: {:?}", report.exponent);
}
