//! Finds and classifies deletable pockets around single vertices.

use listcolor::gen;
use listcolor::structure::find_deletable_pocket;

fn main() {
    let g = gen::icosahedron();
    for c in [4, 5, 6] {
        match find_deletable_pocket(&g, 0, c, 5) {
            Ok(Some(p)) => println!(
                "icosahedron, C={c}: {:?}, purse={}, coboundary {}",
                p.vertices.as_slice(),
                p.is_purse,
                p.coboundary.len()
            ),
            Ok(None) => println!("icosahedron, C={c}: none"),
            Err(e) => println!("icosahedron, C={c}: {e}"),
        }
    }
    let grid = gen::square_grid(5);
    let corner = find_deletable_pocket(&grid, 0, 6, 4).unwrap();
    println!("square grid corner with 4-lists: {:?}", corner.map(|p| p.vertices.as_slice().to_vec()));
}
