//! Small f-choosability questions answered by the exact oracle.

use listcolor::choosability::{is_deletable, is_f_choosable, verify_witness, DemandFunction};
use listcolor::gen;
use listcolor::graph::VertexSet;

fn main() {
    let cases = [
        ("C4, 2 colors each", gen::cycle(4), 2),
        ("C5, 2 colors each", gen::cycle(5), 2),
        ("K4, 3 colors each", gen::complete(4), 3),
        ("K2,3, 2 colors each", gen::complete_bipartite(2, 3), 2),
    ];
    for (name, h, k) in cases {
        let cert = is_f_choosable(&h, &DemandFunction::uniform(h.n(), k)).expect("within the size limit");
        print!("{name}: {:?} by {:?}", cert.verdict, cert.method);
        if let Some(w) = &cert.witness {
            print!(", bad lists {w:?}, witness checks out: {}", verify_witness(&h, &cert));
        }
        println!();
    }

    // A diamond inside the icosahedron: each vertex keeps 5 - (outside degree) colors.
    let ico = gen::icosahedron();
    let a = 0;
    let nb = ico.neighbors(a);
    let b = nb[0];
    let both: Vec<_> = nb.iter().copied().filter(|&x| ico.has_edge(x, b)).collect();
    let diamond = VertexSet::from_iter([a, b, both[0], both[1]]);
    let cert = is_deletable(&ico, &diamond, 5).expect("small");
    println!("icosahedron diamond {:?}: demand {:?}, {:?}", diamond.as_slice(), cert.demand, cert.verdict);
}
