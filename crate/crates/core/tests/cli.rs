//! The built binary: exit codes and JSON bodies.

use std::path::Path;
use std::process::{Command, Output};

fn listcolor(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_listcolor")).arg("--out-dir").arg(dir).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn color_then_verify_and_catch_a_flip() {
    let dir = std::env::temp_dir().join(format!("listcolor-bin-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    let g = dir.join("graph.edges");
    let l = dir.join("lists.json");
    let c = dir.join("coloring.json");
    let (gs, ls, cs) = (g.to_str().unwrap(), l.to_str().unwrap(), c.to_str().unwrap());

    let out = listcolor(&dir, &["--seed", "4", "gen", "--family", "square_grid", "--size", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["list_size"], 4);

    let out = listcolor(&dir, &["--input", gs, "--lists", ls, "color"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["valid"], true);
    let out = listcolor(&dir, &["--input", gs, "--lists", ls, "verify", "--coloring", cs]);
    assert_eq!(out.status.code(), Some(0));

    let mut col: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&c).unwrap()).unwrap();
    // Vertices 0 and 1 are adjacent in the grid.
    col["colors"][0] = col["colors"][1].clone();
    std::fs::write(&c, col.to_string()).unwrap();
    let out = listcolor(&dir, &["--input", gs, "--lists", ls, "verify", "--coloring", cs]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["first_bad_edge"], serde_json::json!([0, 1]));

    let out = listcolor(&dir, &["--input", gs, "--lists", ls, "--symmetry-breaker", "greedy_token", "simulate"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.join("trace.jsonl").exists());
    assert!(dir.join("simulate.manifest.json").exists());
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn errors_exit_nonzero_with_json() {
    let dir = std::env::temp_dir().join(format!("listcolor-bin-err-{}", std::process::id()));
    let out = listcolor(&dir, &["gen", "--family", "torus", "--size", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"], "unknown_family");
    let out = listcolor(&dir, &["--input", "/nonexistent/graph", "color"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"], "input");
    let out = listcolor(&dir, &["--symmetry-breaker", "coin_flip", "--input", "/nonexistent", "simulate"]);
    assert_eq!(out.status.code(), Some(2));
    let _ = std::fs::remove_dir_all(dir);
}
