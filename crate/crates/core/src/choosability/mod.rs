//! Exact coloring oracles: list-coloring search, f-choosability, deletability
//! of induced subgraphs, and extension of precolored paths.

mod backtrack;
mod extend;
mod fchoose;

use std::sync::LazyLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Color, Graph, Vertex, VertexSet};
use crate::lists::ListAssignment;

pub use backtrack::backtrack_color;
pub(crate) use backtrack::small_colorable;
pub use extend::{extend_precolored_path, extend_precolored_path_with, ExtendError, ExtendOptions, ExtensionMethod};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChoosabilityError {
    #[error("subgraph has {size} vertices, above the limit of {limit}")]
    SizeLimitExceeded { size: usize, limit: usize },
    #[error("demand has {got} entries for {expected} vertices")]
    DemandMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChoosabilityConfig {
    /// Largest subgraph accepted (at most 16).
    pub size_limit: usize,
    /// Assignments the exhaustive search may test per component before
    /// answering `Inconclusive`.
    pub max_assignments: u64,
    /// Term cap for the Alon–Tarsi polynomial expansion.
    pub max_polynomial_terms: usize,
    /// Largest number of tie-breaking orders tried by the canonical labeling.
    pub canon_permutation_cap: usize,
}

impl Default for ChoosabilityConfig {
    fn default() -> Self {
        ChoosabilityConfig {
            size_limit: 12,
            max_assignments: 200_000,
            max_polynomial_terms: 1 << 20,
            canon_permutation_cap: 5040,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Deletable,
    NotDeletable,
    /// The search budget ran out; callers must treat this as not deletable.
    Inconclusive,
}

/// How a verdict was reached, ordered by cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Trivial,
    ZeroDemand,
    /// Refuted by the lists `{0, .., f(v)-1}`.
    NestedLists,
    Reduction,
    AlonTarsi,
    Enumeration,
}

/// Per-vertex demand `f` on the vertices of a subgraph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DemandFunction(pub Vec<u32>);

impl DemandFunction {
    pub fn uniform(n: usize, k: u32) -> Self {
        DemandFunction(vec![k; n])
    }

    /// `f(v) = r − (d_G(v) − d_{G[H]}(v))`, clamped at 0, in the order of `h`.
    pub fn induced(graph: &Graph, h: &VertexSet, r: u32) -> Self {
        DemandFunction(
            h.iter()
                .map(|&v| {
                    let outside = graph.neighbors(v).iter().filter(|&&w| !h.contains(w)).count();
                    r.saturating_sub(outside as u32)
                })
                .collect(),
        )
    }

    pub fn values(&self) -> &[u32] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeletabilityCertificate {
    pub verdict: Verdict,
    pub method: Method,
    /// Vertices of the tested subgraph; witness and demand follow this order.
    pub vertices: Vec<Vertex>,
    pub demand: Vec<u32>,
    /// A list assignment meeting the demand that admits no coloring.
    pub witness: Option<Vec<Vec<Color>>>,
    pub assignments_checked: u64,
}

impl DeletabilityCertificate {
    pub fn is_deletable(&self) -> bool {
        self.verdict == Verdict::Deletable
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("certificates always serialize")
    }
}

/// Oracle with its own configuration and memo table. The memo is keyed by a
/// canonical form of the subgraph with its demand; reads are concurrent and
/// inserts are idempotent.
pub struct Choosability {
    solver: fchoose::Solver,
}

impl Default for Choosability {
    fn default() -> Self {
        Self::new(ChoosabilityConfig::default())
    }
}

impl Choosability {
    pub fn new(mut config: ChoosabilityConfig) -> Self {
        config.size_limit = config.size_limit.min(16);
        Choosability { solver: fchoose::Solver::new(config) }
    }

    pub fn config(&self) -> &ChoosabilityConfig {
        &self.solver.config
    }

    pub fn memo_entries(&self) -> usize {
        self.solver.memo_len()
    }

    pub fn is_f_choosable(&self, h: &Graph, f: &DemandFunction) -> Result<DeletabilityCertificate, ChoosabilityError> {
        let n = h.n();
        if f.0.len() != n {
            return Err(ChoosabilityError::DemandMismatch { expected: n, got: f.0.len() });
        }
        let limit = self.solver.config.size_limit;
        if n > limit {
            return Err(ChoosabilityError::SizeLimitExceeded { size: n, limit });
        }
        let adj = h.vertices().map(|v| h.neighbors(v).iter().fold(0u32, |m, &w| m | 1 << w)).collect();
        let out = self.solver.solve(&fchoose::Instance { adj, f: f.0.clone() });
        Ok(DeletabilityCertificate {
            verdict: out.verdict,
            method: out.method,
            vertices: (0..n).collect(),
            demand: f.0.clone(),
            witness: out.witness,
            assignments_checked: out.checked,
        })
    }

    /// Verdict for a bitmask instance (at most 16 vertices); used by the
    /// pocket search to skip building subgraphs.
    pub(crate) fn decide_masks(&self, adj: Vec<u32>, f: Vec<u32>) -> (Verdict, Method) {
        self.solver.verdict(fchoose::Instance { adj, f })
    }

    pub fn is_deletable(
        &self,
        graph: &Graph,
        h: &VertexSet,
        r: u32,
    ) -> Result<DeletabilityCertificate, ChoosabilityError> {
        let limit = self.solver.config.size_limit;
        if h.len() > limit {
            return Err(ChoosabilityError::SizeLimitExceeded { size: h.len(), limit });
        }
        let sub = graph.induced_subgraph(h);
        let f = DemandFunction::induced(graph, h, r);
        let mut cert = self.is_f_choosable(&sub, &f)?;
        cert.vertices = h.as_slice().to_vec();
        Ok(cert)
    }
}

pub(crate) static DEFAULT_ORACLE: LazyLock<Choosability> = LazyLock::new(Choosability::default);

/// [`Choosability::is_f_choosable`] on a shared default oracle.
pub fn is_f_choosable(h: &Graph, f: &DemandFunction) -> Result<DeletabilityCertificate, ChoosabilityError> {
    DEFAULT_ORACLE.is_f_choosable(h, f)
}

/// [`Choosability::is_deletable`] on a shared default oracle.
pub fn is_deletable(graph: &Graph, h: &VertexSet, r: u32) -> Result<DeletabilityCertificate, ChoosabilityError> {
    DEFAULT_ORACLE.is_deletable(graph, h, r)
}

/// Re-checks a not-deletable certificate: the witness has the recorded list
/// sizes and admits no coloring of `h`.
pub fn verify_witness(h: &Graph, cert: &DeletabilityCertificate) -> bool {
    let Some(w) = &cert.witness else {
        return false;
    };
    if w.len() != h.n() || w.iter().zip(&cert.demand).any(|(l, &k)| l.len() != k as usize) {
        return false;
    }
    let lists = ListAssignment::from_lists(w.clone(), 3);
    backtrack_color(h, &lists, &crate::graph::Coloring::new(h.n())).is_none()
}
