use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::StructureError;
use crate::graph::{is_planar, Graph, Vertex, VertexSet};

/// A subgraph given by vertices and a subset of the edges among them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgraphSpec {
    pub vertices: VertexSet,
    pub edges: Vec<(Vertex, Vertex)>,
}

impl SubgraphSpec {
    pub fn whole(graph: &Graph) -> Self {
        SubgraphSpec { vertices: graph.vertices().collect(), edges: graph.edges().collect() }
    }

    pub fn induced(graph: &Graph, vertices: VertexSet) -> Self {
        let edges = graph.edges().filter(|&(u, v)| vertices.contains(u) && vertices.contains(v)).collect();
        SubgraphSpec { vertices, edges }
    }

    fn check_within(&self, graph: &Graph) -> Result<(), StructureError> {
        let ok = self.vertices.iter().all(|&v| v < graph.n())
            && self
                .edges
                .iter()
                .all(|&(u, v)| graph.has_edge(u, v) && self.vertices.contains(u) && self.vertices.contains(v));
        let mut sorted: Vec<_> = self.edges.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
        sorted.sort_unstable();
        sorted.dedup();
        if ok && sorted.len() == self.edges.len() {
            Ok(())
        } else {
            Err(StructureError::NotASubgraph)
        }
    }

    fn edge_set(&self) -> Vec<(Vertex, Vertex)> {
        let mut e: Vec<_> = self.edges.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
        e.sort_unstable();
        e
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Density {
    pub value: Ratio<i64>,
    pub g: u32,
    pub epsilon: Ratio<i64>,
    /// When `value ≥ 0` and the host is planar with girth at least `g`:
    /// whether `v(G) ≤ ((g+ε)/ε)·v(H)` holds.
    pub dbound_holds: Option<bool>,
}

/// `(g−2)(e(G)−e(H)) − (g+ε)(v(G)−v(H))` from counts.
pub fn density_from_counts(vg: usize, eg: usize, vh: usize, eh: usize, g: u32, epsilon: Ratio<i64>) -> Ratio<i64> {
    let gr = Ratio::from_integer(i64::from(g));
    let de = Ratio::from_integer(eg as i64 - eh as i64);
    let dv = Ratio::from_integer(vg as i64 - vh as i64);
    (gr - 2) * de - (gr + epsilon) * dv
}

/// Density of `G` relative to a subgraph `H`.
pub fn density(graph: &Graph, h: &SubgraphSpec, g: u32, epsilon: Ratio<i64>) -> Result<Density, StructureError> {
    h.check_within(graph)?;
    let value = density_from_counts(graph.n(), graph.m(), h.vertices.len(), h.edges.len(), g, epsilon);
    let dbound_holds = (value >= Ratio::from_integer(0)
        && epsilon > Ratio::from_integer(0)
        && graph.has_girth_at_least(g as usize)
        && is_planar(graph))
    .then(|| {
        let bound =
            (Ratio::from_integer(i64::from(g)) + epsilon) / epsilon * Ratio::from_integer(h.vertices.len() as i64);
        Ratio::from_integer(graph.n() as i64) <= bound
    });
    Ok(Density { value, g, epsilon, dbound_holds })
}

/// `d(outer | inner)` for nested subgraphs of `graph`.
pub fn relative_density(
    graph: &Graph,
    outer: &SubgraphSpec,
    inner: &SubgraphSpec,
    g: u32,
    epsilon: Ratio<i64>,
) -> Result<Ratio<i64>, StructureError> {
    outer.check_within(graph)?;
    inner.check_within(graph)?;
    let outer_edges = outer.edge_set();
    let nested = inner.vertices.iter().all(|&v| outer.vertices.contains(v))
        && inner.edge_set().iter().all(|e| outer_edges.binary_search(e).is_ok());
    if !nested {
        return Err(StructureError::NotASubgraph);
    }
    Ok(density_from_counts(
        outer.vertices.len(),
        outer.edges.len(),
        inner.vertices.len(),
        inner.edges.len(),
        g,
        epsilon,
    ))
}
