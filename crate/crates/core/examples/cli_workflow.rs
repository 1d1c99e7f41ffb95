//! Drives the command-line front end in-process: gen, color, verify.

use listcolor::cli::main_with;

fn main() {
    let dir = std::env::temp_dir().join("listcolor-cli-example");
    let d = dir.to_str().unwrap();
    let g = format!("{d}/graph.edges");
    let l = format!("{d}/lists.json");
    let c = format!("{d}/coloring.json");
    for args in [
        vec!["--out-dir", d, "--seed", "2", "gen", "--family", "hex_grid", "--size", "5"],
        vec!["--out-dir", d, "--input", &g, "--lists", &l, "color"],
        vec!["--out-dir", d, "--input", &g, "--lists", &l, "verify", "--coloring", &c],
    ] {
        let code = main_with(std::iter::once("listcolor").chain(args.iter().copied()));
        println!("exit {code}");
    }
}
