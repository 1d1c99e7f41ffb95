//! Records a simulation trace, replays it, then shows that edits are caught.

use listcolor::gen;
use listcolor::lists::{ListAssignment, ListMode};
use listcolor::local::{replay, simulate, RoundTrace, SimConfig};

fn main() {
    let g = gen::hex_grid(4);
    let lists = ListAssignment::generate(g.n(), 5, ListMode::Random, 0);
    let cfg = SimConfig { record_messages: true, ..SimConfig::default() };
    let (_, trace) = simulate(&g, &lists, &cfg).unwrap();
    let text = trace.to_json_lines();
    println!("{} lines of trace", text.lines().count());
    println!("clean: {:?}", replay(&RoundTrace::from_json_lines(&text).unwrap(), &g));

    let mut bad = trace.clone();
    let m = &mut bad.messages.as_mut().unwrap()[0];
    m.dst = g.n() - 1;
    println!("redirected message: {}", replay(&bad, &g).unwrap_err());

    let mut short = trace;
    short.per_round.pop();
    println!("dropped round: {}", replay(&short, &g).unwrap_err());
}
