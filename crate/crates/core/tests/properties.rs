//! Randomized invariants across modules.

use listcolor::engine::{color_graph, EngineConfig};
use listcolor::gen;
use listcolor::graph::{parse_edge_list, write_edge_list};
use listcolor::lists::{ListAssignment, ListMode};
use listcolor::local::{replay, simulate, symmetry_break, SimConfig};
use proptest::prelude::*;

fn mode(i: u8) -> ListMode {
    [ListMode::Random, ListMode::Overlap, ListMode::Distinct][i as usize % 3]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn both_backends_color_triangulations(n in 4usize..120, seed in 0u64..1000, m in 0u8..3) {
        let g = gen::random_triangulation(n, seed);
        let lists = ListAssignment::generate(g.n(), 3, mode(m), seed);
        let run = color_graph(&g, &lists, &EngineConfig::default()).unwrap();
        let col = run.coloring.unwrap();
        prop_assert!(g.validate_coloring(Some(&lists), &col).is_valid());
        let cfg = SimConfig { record_messages: true, ..SimConfig::default() };
        let (sim, trace) = simulate(&g, &lists, &cfg).unwrap();
        prop_assert!(g.validate_coloring(Some(&lists), &sim).is_valid());
        prop_assert!(replay(&trace, &g).is_ok());
    }

    #[test]
    fn simulation_is_deterministic(side in 3usize..12, seed in 0u64..100) {
        let g = gen::square_grid(side);
        let lists = ListAssignment::generate(g.n(), 4, ListMode::Random, seed);
        let a = simulate(&g, &lists, &SimConfig::default()).unwrap();
        let b = simulate(&g, &lists, &SimConfig::default()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn pipelining_never_costs_rounds(side in 4usize..16, seed in 0u64..100) {
        let g = gen::tri_grid(side);
        let lists = ListAssignment::generate(g.n(), 3, ListMode::Random, seed);
        let (_, pipe) = simulate(&g, &lists, &SimConfig::default()).unwrap();
        let (_, control) = simulate(&g, &lists, &SimConfig { pipelined: false, ..SimConfig::default() }).unwrap();
        prop_assert!(pipe.rounds_total <= control.rounds_total);
    }

    #[test]
    fn symmetry_break_colors_the_power_graph(n in 3usize..80, seed in 0u64..1000, k in 1usize..4) {
        let g = gen::random_triangulation(n, seed);
        let out = symmetry_break(&g, k, g.max_degree()).unwrap();
        let power = g.power_graph(k);
        prop_assert!(power.edges().all(|(u, v)| out.coloring.get(u) != out.coloring.get(v)));
        prop_assert!(out.colors_used <= out.power_degree + 1);
    }

    #[test]
    fn edge_lists_round_trip(n in 4usize..60, seed in 0u64..1000) {
        let g = gen::random_triangulation(n, seed);
        let back = parse_edge_list(&write_edge_list(&g)).unwrap();
        prop_assert_eq!(back.edges().collect::<Vec<_>>(), g.edges().collect::<Vec<_>>());
    }
}
