use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::pocket::{classify_with, Pocket};
use super::separator::{low_degree_filter, shatter};
use crate::choosability::DEFAULT_ORACLE;
use crate::graph::{to_dot_with_clusters, Graph, VertexSet};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalletOptions {
    pub c: usize,
    pub k: usize,
    pub epsilon: Ratio<i64>,
    /// When set, each pocket also gets an r-deletability certificate.
    pub r: Option<u32>,
}

impl Default for WalletOptions {
    fn default() -> Self {
        WalletOptions { c: 6, k: 2, epsilon: Ratio::new(1, 4), r: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Wallet {
    pub pockets: Vec<Pocket>,
    pub c: usize,
    pub k: usize,
    pub n: usize,
    /// `|pockets| / v(G)`.
    pub coverage_ratio: f64,
    /// `|pockets| ≥ v(G) / (2C)`.
    pub target_met: bool,
    /// Size of the removed set `X` and of its two parts.
    pub removed: usize,
    pub shatter_removed: usize,
    pub low_degree_removed: usize,
    pub shatter_budget_exceeded: bool,
    /// Components of `G − X` that were neither purses nor k-deep.
    pub rejected_components: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WalletViolation {
    #[error("pockets {0} and {1} share a vertex or an edge")]
    Touching(usize, usize),
    #[error("pocket {0} is not a C-pocket")]
    NotAPocket(usize),
    #[error("pocket {0} is neither a purse nor k-deep")]
    Shallow(usize),
    #[error("pocket {0} flags do not match a recomputation")]
    StaleFlags(usize),
    #[error("recorded target flag is wrong")]
    TargetMisreported,
}

impl Wallet {
    /// Re-checks every wallet invariant from the graph alone.
    pub fn audit(&self, graph: &Graph) -> Result<(), WalletViolation> {
        let mut owner = vec![usize::MAX; graph.n()];
        for (i, p) in self.pockets.iter().enumerate() {
            for &v in &p.vertices {
                if owner[v] != usize::MAX {
                    return Err(WalletViolation::Touching(owner[v], i));
                }
                owner[v] = i;
            }
        }
        for (u, v) in graph.edges() {
            let (a, b) = (owner[u], owner[v]);
            if a != usize::MAX && b != usize::MAX && a != b {
                return Err(WalletViolation::Touching(a.min(b), a.max(b)));
            }
        }
        for (i, p) in self.pockets.iter().enumerate() {
            let fresh_pocket = graph.is_connected_subset(&p.vertices)
                && p.len() <= self.c
                && p.vertices.iter().all(|&v| graph.degree(v) <= self.c);
            if !fresh_pocket {
                return Err(WalletViolation::NotAPocket(i));
            }
            let purse = super::is_purse(graph, &p.vertices);
            let deep = super::is_k_deep(graph, &p.vertices, self.k);
            if purse != p.is_purse || deep != p.is_k_deep || p.coboundary != graph.coboundary(&p.vertices) {
                return Err(WalletViolation::StaleFlags(i));
            }
            if !purse && !deep {
                return Err(WalletViolation::Shallow(i));
            }
        }
        if self.target_met != (2 * self.c * self.pockets.len() >= graph.n()) {
            return Err(WalletViolation::TargetMisreported);
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("wallets always serialize")
    }

    pub fn to_dot(&self, graph: &Graph) -> String {
        let clusters: Vec<VertexSet> = self.pockets.iter().map(|p| p.vertices.clone()).collect();
        to_dot_with_clusters(graph, None, &clusters)
    }
}

pub fn find_wallet(graph: &Graph, c: usize, k: usize, epsilon: Ratio<i64>) -> Wallet {
    find_wallet_with(graph, &WalletOptions { c, k, epsilon, r: None })
}

/// `X` is the union of a shattering set for pieces of at most `C` vertices
/// (budget `ε/2`), the degree filter for `ε/2`, and every vertex of degree
/// above `C`. Components of `G − X` that are purses or k-deep become pockets.
pub fn find_wallet_with(graph: &Graph, options: &WalletOptions) -> Wallet {
    let n = graph.n();
    let half = options.epsilon / 2;
    let shattered = shatter(graph, half, options.c);
    let low = low_degree_filter(graph, half);
    let mut x = shattered.x.union(&low.x);
    for v in graph.vertices() {
        if graph.degree(v) > options.c {
            x.insert(v);
        }
    }
    let keep: VertexSet = graph.vertices().filter(|v| !x.contains(*v)).collect();
    let rest = graph.induced_subgraph(&keep);
    let mut pockets = Vec::new();
    let mut rejected = 0;
    for comp in rest.components() {
        let h: VertexSet = comp.iter().map(|&i| keep.as_slice()[i]).collect();
        let r = options.r.unwrap_or(0);
        let mut p = classify_with(&DEFAULT_ORACLE, graph, &h, options.c, options.k, r)
            .expect("components are connected and non-empty");
        if options.r.is_none() {
            p.certificate = None;
        }
        if p.is_pocket && (p.is_purse || p.is_k_deep) {
            pockets.push(p);
        } else {
            rejected += 1;
        }
    }
    Wallet {
        coverage_ratio: if n == 0 { 0.0 } else { pockets.len() as f64 / n as f64 },
        target_met: 2 * options.c * pockets.len() >= n,
        pockets,
        c: options.c,
        k: options.k,
        n,
        removed: x.len(),
        shatter_removed: shattered.x.len(),
        low_degree_removed: low.x.len(),
        shatter_budget_exceeded: shattered.budget_exceeded,
        rejected_components: rejected,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    #[test]
    fn disjoint_triangles_are_all_purses() {
        let g = gen::disjoint_triangles(50);
        let w = find_wallet(&g, 3, 1, Ratio::new(1, 4));
        assert_eq!(w.pockets.len(), 50);
        assert!(w.pockets.iter().all(|p| p.is_purse));
        assert!(w.target_met);
        w.audit(&g).unwrap();
    }

    #[test]
    fn path_pieces() {
        let g = gen::path(40);
        let w = find_wallet(&g, 3, 1, Ratio::new(1, 2));
        w.audit(&g).unwrap();
        assert!(w.pockets.iter().all(|p| p.len() <= 3));
        assert!(w.pockets.iter().any(|p| p.vertices.contains(0) && p.is_purse));
    }

    #[test]
    fn grid_wallet_invariants() {
        let g = gen::square_grid(12);
        let w = find_wallet(&g, 20, 2, Ratio::new(1, 5));
        w.audit(&g).unwrap();
        assert!(!w.pockets.is_empty());
    }

    #[test]
    fn audit_catches_touching_pockets() {
        let g = gen::path(6);
        let mut w = find_wallet(&g, 2, 1, Ratio::new(1, 2));
        let extra = classify_with(&DEFAULT_ORACLE, &g, &VertexSet::from_iter([1, 2]), 2, 1, 0).unwrap();
        w.pockets.push(extra);
        assert!(matches!(w.audit(&g), Err(WalletViolation::Touching(..))));
    }
}
