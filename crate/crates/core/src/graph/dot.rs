use std::fmt::Write as _;

use super::{Coloring, Graph, VertexSet};

/// Graphviz export; colored vertices get `fillcolor` set to a palette index.
pub fn to_dot(graph: &Graph, coloring: Option<&Coloring>) -> String {
    to_dot_with_clusters(graph, coloring, &[])
}

/// Like [`to_dot`], drawing each vertex set in `clusters` as a subgraph
/// cluster (used for pockets of a wallet).
pub fn to_dot_with_clusters(graph: &Graph, coloring: Option<&Coloring>, clusters: &[VertexSet]) -> String {
    let mut out = String::from("graph G {\n  node [style=filled, colorscheme=set312];\n");
    for (i, cluster) in clusters.iter().enumerate() {
        let _ = writeln!(out, "  subgraph cluster_{i} {{");
        let _ = writeln!(out, "    style=filled; color=lightgrey;");
        for v in cluster {
            let _ = writeln!(out, "    {v};");
        }
        out.push_str("  }\n");
    }
    for v in graph.vertices() {
        match coloring.and_then(|c| c.get(v)) {
            Some(c) => {
                let _ = writeln!(out, "  {v} [label=\"{v}:{c}\", fillcolor={}];", c % 12 + 1);
            }
            None => {
                let _ = writeln!(out, "  {v} [fillcolor=white];");
            }
        }
    }
    for (u, v) in graph.edges() {
        let _ = writeln!(out, "  {u} -- {v};");
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot_mentions_every_edge_and_color() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let c = Coloring::from_colors(vec![Some(0), Some(1), None]);
        let dot = to_dot_with_clusters(&g, Some(&c), &[VertexSet::from_iter([0, 1])]);
        assert!(dot.contains("0 -- 1;"));
        assert!(dot.contains("1 -- 2;"));
        assert!(dot.contains("fillcolor=2"));
        assert!(dot.contains("subgraph cluster_0"));
    }
}
