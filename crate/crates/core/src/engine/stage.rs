use serde::{Deserialize, Serialize};

use super::EngineError;
use crate::choosability::{backtrack_color, DeletabilityCertificate, Verdict};
use crate::graph::{Color, Coloring, Graph, Vertex, VertexSet};
use crate::lists::ListAssignment;

/// A pocket chosen at Step 2 with the certificate it was chosen on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnginePocket {
    /// Smallest vertex whose search returned this pocket.
    pub anchor: Vertex,
    pub vertices: VertexSet,
    pub certificate: DeletabilityCertificate,
}

/// The graph of one recursion level: the vertices still present there.
#[derive(Debug, Clone, Copy)]
pub struct LevelView<'a> {
    graph: &'a Graph,
    /// Level at which each vertex left the recursion; `None` means all of
    /// `graph`.
    removed_at: Option<&'a [usize]>,
    level: usize,
}

impl<'a> LevelView<'a> {
    pub fn whole(graph: &'a Graph) -> Self {
        LevelView { graph, removed_at: None, level: 0 }
    }

    /// Vertices `v` with `removed_at[v] ≥ level`.
    pub fn at_level(graph: &'a Graph, removed_at: &'a [usize], level: usize) -> Self {
        LevelView { graph, removed_at: Some(removed_at), level }
    }

    pub fn graph(&self) -> &'a Graph {
        self.graph
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.removed_at.is_none_or(|r| r[v] >= self.level)
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.graph.neighbors(v).iter().filter(|&&w| self.contains(w)).count()
    }
}

/// Why an extension stage gave up.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureReason {
    NotCertified { verdict: Verdict },
    VertexMismatch,
    DemandMismatch { vertex: Vertex, certified: u32, actual: i64 },
    ListTooShort { vertex: Vertex, available: usize, certified: u32 },
    NoListColoring,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionFailure {
    pub level: Option<usize>,
    pub class: Option<usize>,
    pub anchor: Vertex,
    pub vertices: VertexSet,
    pub reason: FailureReason,
}

/// Uncolors every pocket of one color class, then colors each pocket from
/// `L_i(v) = L(v)` minus the colors of its colored neighbors outside the
/// class. Pockets of one class must not touch.
///
/// Each certificate is checked against the view first: verdict, vertex set
/// and demand `r − d_G(v) + d_H(v)` must match. A failure at any point means
/// a certificate was wrong and aborts with [`EngineError::ExtensionFailed`].
pub fn extend_stage(
    view: &LevelView<'_>,
    pockets: &[EnginePocket],
    psi: &Coloring,
    lists: &ListAssignment,
) -> Result<Coloring, EngineError> {
    let mut out = psi.clone();
    extend_stage_in_place(view, pockets.iter(), &mut out, lists)?;
    Ok(out)
}

pub(crate) fn extend_stage_in_place<'p>(
    view: &LevelView<'_>,
    pockets: impl Iterator<Item = &'p EnginePocket> + Clone,
    psi: &mut Coloring,
    lists: &ListAssignment,
) -> Result<(), EngineError> {
    let graph = view.graph;
    let r = lists.list_size() as i64;
    for p in pockets.clone() {
        for &v in &p.vertices {
            psi.unset(v);
        }
    }
    let fail = |p: &EnginePocket, reason| {
        EngineError::ExtensionFailed(Box::new(ExtensionFailure {
            level: None,
            class: None,
            anchor: p.anchor,
            vertices: p.vertices.clone(),
            reason,
        }))
    };
    for p in pockets {
        let cert = &p.certificate;
        if cert.verdict != Verdict::Deletable {
            return Err(fail(p, FailureReason::NotCertified { verdict: cert.verdict }));
        }
        if cert.vertices.as_slice() != p.vertices.as_slice() || cert.demand.len() != p.vertices.len() {
            return Err(fail(p, FailureReason::VertexMismatch));
        }
        let members = p.vertices.as_slice();
        let mut sub_lists: Vec<Vec<Color>> = Vec::with_capacity(members.len());
        for (j, &v) in members.iter().enumerate() {
            let mut inside = 0i64;
            let mut blocked: Vec<Color> = Vec::new();
            for &w in graph.neighbors(v) {
                if !view.contains(w) {
                    continue;
                }
                if p.vertices.contains(w) {
                    inside += 1;
                } else if let Some(c) = psi.get(w) {
                    blocked.push(c);
                }
            }
            let actual = r - view.degree(v) as i64 + inside;
            if actual != i64::from(cert.demand[j]) {
                return Err(fail(p, FailureReason::DemandMismatch { vertex: v, certified: cert.demand[j], actual }));
            }
            let available: Vec<Color> = lists.list(v).iter().copied().filter(|c| !blocked.contains(c)).collect();
            if available.len() < cert.demand[j] as usize {
                return Err(fail(
                    p,
                    FailureReason::ListTooShort { vertex: v, available: available.len(), certified: cert.demand[j] },
                ));
            }
            sub_lists.push(available);
        }
        let sub = graph.induced_subgraph(&p.vertices);
        let sub_lists = ListAssignment::from_lists(sub_lists, lists.girth_class());
        let Some(colored) = backtrack_color(&sub, &sub_lists, &Coloring::new(sub.n())) else {
            return Err(fail(p, FailureReason::NoListColoring));
        };
        for (j, &v) in members.iter().enumerate() {
            psi.set(v, colored.get(j).expect("backtracking colors every vertex"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::choosability::{DemandFunction, Method};
    use crate::gen;

    fn certified(graph: &Graph, anchor: Vertex, vertices: &[Vertex], r: u32) -> EnginePocket {
        let h = VertexSet::from_iter(vertices.iter().copied());
        EnginePocket {
            anchor,
            certificate: DeletabilityCertificate {
                verdict: Verdict::Deletable,
                method: Method::Enumeration,
                vertices: h.as_slice().to_vec(),
                demand: DemandFunction::induced(graph, &h, r).0,
                witness: None,
                assignments_checked: 0,
            },
            vertices: h,
        }
    }

    #[test]
    fn empty_stage_returns_input() {
        let g = gen::path(3);
        let lists = ListAssignment::uniform(3, &[0, 1, 2, 3, 4], 3);
        let psi = Coloring::from_colors(vec![Some(0), Some(1), Some(0)]);
        assert_eq!(extend_stage(&LevelView::whole(&g), &[], &psi, &lists).unwrap(), psi);
    }

    #[test]
    fn singleton_takes_the_remaining_color() {
        // Center of a star with four leaves: demand 5 - 4 = 1.
        let g = gen::complete_bipartite(1, 4);
        let lists = ListAssignment::uniform(5, &[0, 1, 2, 3, 4], 3);
        let psi = Coloring::from_colors(vec![None, Some(0), Some(1), Some(2), Some(3)]);
        let p = certified(&g, 0, &[0], 5);
        let out = extend_stage(&LevelView::whole(&g), &[p], &psi, &lists).unwrap();
        assert_eq!(out.get(0), Some(4));
    }

    #[test]
    fn distant_pockets_compose() {
        let g = gen::path(12);
        let lists = ListAssignment::uniform(12, &[0, 1, 2], 5);
        let mut psi = Coloring::new(12);
        for v in 0..12 {
            psi.set(v, (v % 2) as Color);
        }
        let a = certified(&g, 1, &[1, 2], 3);
        let b = certified(&g, 8, &[8, 9], 3);
        let out = extend_stage(&LevelView::whole(&g), &[a, b], &psi, &lists).unwrap();
        assert!(g.validate_coloring(Some(&lists), &out).is_valid());
        for v in [0, 3, 4, 5, 6, 7, 10, 11] {
            assert_eq!(out.get(v), psi.get(v));
        }
    }

    #[test]
    fn corrupted_certificates_abort() {
        let g = gen::complete_bipartite(1, 4);
        let lists = ListAssignment::uniform(5, &[0, 1, 2, 3, 4], 3);
        let psi = Coloring::from_colors(vec![None, Some(0), Some(1), Some(2), Some(3)]);
        let view = LevelView::whole(&g);

        let mut p = certified(&g, 0, &[0], 5);
        p.certificate.verdict = Verdict::Inconclusive;
        assert!(matches!(extend_stage(&view, &[p], &psi, &lists), Err(EngineError::ExtensionFailed(_))));

        let mut p = certified(&g, 0, &[0], 5);
        p.certificate.demand[0] = 2;
        assert!(matches!(extend_stage(&view, &[p], &psi, &lists), Err(EngineError::ExtensionFailed(_))));

        let mut p = certified(&g, 0, &[0], 5);
        p.certificate.vertices = vec![1];
        assert!(matches!(extend_stage(&view, &[p], &psi, &lists), Err(EngineError::ExtensionFailed(_))));
    }

    #[test]
    fn forged_certificate_is_caught_by_the_search() {
        // An edge whose ends each see four colored neighbors: demand 1 and 1,
        // not deletable. Forge a certificate and force the same last color.
        let mut edges = vec![(0, 1)];
        for i in 0..4 {
            edges.push((0, 2 + i));
            edges.push((1, 6 + i));
        }
        let g = Graph::from_edges(10, edges).unwrap();
        let lists = ListAssignment::uniform(10, &[0, 1, 2, 3, 4], 3);
        let mut colors = vec![None, None];
        colors.extend((0..4).map(Some));
        colors.extend((0..4).map(Some));
        let psi = Coloring::from_colors(colors);
        let p = certified(&g, 0, &[0, 1], 5);
        let err = extend_stage(&LevelView::whole(&g), &[p], &psi, &lists).unwrap_err();
        match err {
            EngineError::ExtensionFailed(f) => assert_eq!(f.reason, FailureReason::NoListColoring),
            other => panic!("unexpected {other:?}"),
        }
    }
}
