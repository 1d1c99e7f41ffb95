//! Splits planar graphs with a small separator.

use listcolor::gen;
use listcolor::structure::planar_separator;

fn main() {
    for (name, g) in [("tri_grid 30", gen::tri_grid(30)), ("triangulation 2000", gen::random_triangulation(2000, 9))] {
        let sep = planar_separator(&g);
        println!(
            "{name}: |A|={} |B|={} |S|={} (sqrt n = {:.0}), valid: {}",
            sep.a.len(),
            sep.b.len(),
            sep.s.len(),
            (g.n() as f64).sqrt(),
            sep.is_valid(&g)
        );
    }
}
