//! Simple undirected graphs and the primitives the coloring machinery is
//! built on: girth, balls, power graphs, coboundaries, greedy coloring and
//! coloring validation.

mod dot;
mod io;
mod planarity;

pub use dot::{to_dot, to_dot_with_clusters};
pub use io::{parse_edge_list, write_edge_list};
pub use planarity::is_planar;

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lists::ListAssignment;

pub type Vertex = usize;
pub type Color = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("self-loop on vertex {vertex} (line {line})")]
    SelfLoop { line: usize, vertex: Vertex },
    #[error("vertex id {vertex} outside 0..{n} (line {line}); ids must be dense")]
    VertexIdGap { line: usize, vertex: Vertex, n: usize },
    #[error("rotation at vertex {vertex} is not a permutation of its neighbors")]
    BadRotation { vertex: Vertex },
}

/// An immutable simple undirected graph on vertices `0..n`.
///
/// Neighbor lists are sorted. An optional rotation system (cyclic neighbor
/// order per vertex) may be attached when a plane embedding is known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<Vertex>>,
    m: usize,
    genus: u32,
    rotation: Option<Vec<Vec<Vertex>>>,
}

impl Graph {
    /// Builds a graph from an edge list. Duplicate edges are merged; a
    /// self-loop or an endpoint outside `0..n` is an error.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            if u == v {
                return Err(GraphError::SelfLoop { line: 0, vertex: u });
            }
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexIdGap { line: 0, vertex: w, n });
                }
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        Ok(Self::from_raw_adjacency(adj))
    }

    pub(crate) fn from_raw_adjacency(mut adj: Vec<Vec<Vertex>>) -> Self {
        let mut m = 0;
        for list in adj.iter_mut() {
            list.sort_unstable();
            list.dedup();
            m += list.len();
        }
        Graph { adj, m: m / 2, genus: 0, rotation: None }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_raw_adjacency(vec![Vec::new(); n])
    }

    pub fn with_genus(mut self, genus: u32) -> Self {
        self.genus = genus;
        self
    }

    /// Attaches a rotation system. Each entry must be a permutation of the
    /// corresponding neighbor list.
    pub fn with_rotation(mut self, rotation: Vec<Vec<Vertex>>) -> Result<Self, GraphError> {
        if rotation.len() != self.n() {
            return Err(GraphError::BadRotation { vertex: rotation.len().min(self.n()) });
        }
        for (v, rot) in rotation.iter().enumerate() {
            let mut sorted = rot.clone();
            sorted.sort_unstable();
            if sorted != self.adj[v] {
                return Err(GraphError::BadRotation { vertex: v });
            }
        }
        self.rotation = Some(rotation);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn rotation(&self) -> Option<&[Vec<Vertex>]> {
        self.rotation.as_deref()
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn vertices(&self) -> std::ops::Range<Vertex> {
        0..self.n()
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, ns)| ns.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    /// The subgraph induced by `set`, relabeled to `0..set.len()` in the
    /// order of `set`. The rotation system, when present, is restricted.
    pub fn induced_subgraph(&self, set: &VertexSet) -> Graph {
        // Small sets look up positions by binary search instead of an
        // n-sized table.
        let table = (set.len() * 16 >= self.n()).then(|| set.index_map(self.n()));
        let index = |w: Vertex| match &table {
            Some(t) => t[w],
            None => set.as_slice().binary_search(&w).ok(),
        };
        let mut adj = vec![Vec::new(); set.len()];
        for (i, &v) in set.iter().enumerate() {
            for &w in &self.adj[v] {
                if let Some(j) = index(w) {
                    adj[i].push(j);
                }
            }
        }
        let mut sub = Graph::from_raw_adjacency(adj).with_genus(self.genus);
        if let Some(rot) = &self.rotation {
            let restricted = set.iter().map(|&v| rot[v].iter().filter_map(|&w| index(w)).collect()).collect();
            sub.rotation = Some(restricted);
        }
        sub
    }

    /// Adds the given edges, keeping the graph simple. The rotation system
    /// is dropped since the new edges have no known position.
    pub fn with_extra_edges(&self, extra: &[(Vertex, Vertex)]) -> Graph {
        let mut adj = self.adj.clone();
        for &(u, v) in extra {
            if u != v {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        Graph::from_raw_adjacency(adj).with_genus(self.genus)
    }

    /// BFS distances from `source`, `usize::MAX` when unreachable.
    pub fn distances_from(&self, source: Vertex) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n()];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for &w in &self.adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// All vertices at distance at most `radius` from `v`.
    pub fn ball(&self, v: Vertex, radius: usize) -> VertexSet {
        let mut seen = vec![v];
        let mut frontier = vec![v];
        let mut mark = std::collections::HashSet::from([v]);
        for _ in 0..radius {
            let mut next = Vec::new();
            for &u in &frontier {
                for &w in &self.adj[u] {
                    if mark.insert(w) {
                        next.push(w);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            seen.extend_from_slice(&next);
            frontier = next;
        }
        VertexSet::from_iter(seen)
    }

    /// Length of a shortest cycle, or `None` for forests (infinite girth).
    pub fn girth(&self) -> Option<usize> {
        let n = self.n();
        let components = self.components().len();
        if self.m + components == n {
            return None;
        }
        let mut best = usize::MAX;
        let mut dist = vec![usize::MAX; n];
        let mut parent = vec![usize::MAX; n];
        let mut touched = Vec::new();
        for s in 0..n {
            if best == 3 {
                break;
            }
            // A cycle through s found at depth d has length >= 2d - 1.
            let depth_limit = best / 2;
            dist[s] = 0;
            touched.push(s);
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                if dist[u] >= depth_limit {
                    break;
                }
                for &w in &self.adj[u] {
                    if dist[w] == usize::MAX {
                        dist[w] = dist[u] + 1;
                        parent[w] = u;
                        touched.push(w);
                        queue.push_back(w);
                    } else if parent[u] != w {
                        best = best.min(dist[u] + dist[w] + 1);
                    }
                }
            }
            for &t in &touched {
                dist[t] = usize::MAX;
                parent[t] = usize::MAX;
            }
            touched.clear();
        }
        Some(best)
    }

    /// `girth >= g`, with forests satisfying every bound.
    pub fn has_girth_at_least(&self, g: usize) -> bool {
        self.girth().is_none_or(|girth| girth >= g)
    }

    /// The `k`-th power: same vertices, `uv` an edge iff `0 < dist(u, v) <= k`.
    pub fn power_graph(&self, k: usize) -> Graph {
        assert!(k >= 1, "power_graph needs k >= 1");
        let adj = self.vertices().map(|v| self.ball(v, k).iter().copied().filter(|&w| w != v).collect()).collect();
        Graph::from_raw_adjacency(adj).with_genus(self.genus)
    }

    /// External neighbors of `set`: `N(set) \ set`.
    pub fn coboundary(&self, set: &VertexSet) -> VertexSet {
        let mut out: Vec<Vertex> =
            set.iter().flat_map(|&v| self.adj[v].iter().copied()).filter(|w| !set.contains(*w)).collect();
        out.sort_unstable();
        out.dedup();
        VertexSet(out)
    }

    /// Members of `set` that have a neighbor outside it.
    pub fn boundary(&self, set: &VertexSet) -> VertexSet {
        VertexSet(set.iter().copied().filter(|&v| self.adj[v].iter().any(|w| !set.contains(*w))).collect())
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<VertexSet> {
        let mut comp = vec![usize::MAX; self.n()];
        let mut out = Vec::new();
        for s in self.vertices() {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            comp[s] = id;
            let mut members = vec![s];
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &w in &self.adj[u] {
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        members.push(w);
                        stack.push(w);
                    }
                }
            }
            out.push(VertexSet::from_iter(members));
        }
        out
    }

    /// Whether `set` induces a connected subgraph (the empty set does not).
    pub fn is_connected_subset(&self, set: &VertexSet) -> bool {
        let Some(&start) = set.iter().next() else {
            return false;
        };
        let mut seen = std::collections::HashSet::from([start]);
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for &w in &self.adj[u] {
                if set.contains(w) && seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        seen.len() == set.len()
    }

    pub fn is_connected(&self) -> bool {
        self.n() == 0 || self.components().len() == 1
    }

    /// Greedy coloring in the given order: each vertex takes the least color
    /// not used by an already colored neighbor.
    pub fn greedy_coloring(&self, order: &[Vertex]) -> Coloring {
        let mut coloring = Coloring::new(self.n());
        let mut used = Vec::new();
        for &v in order {
            used.clear();
            used.extend(self.adj[v].iter().filter_map(|&w| coloring.get(w)));
            used.sort_unstable();
            used.dedup();
            let color = used
                .iter()
                .enumerate()
                .find(|&(i, &c)| i as Color != c)
                .map_or(used.len() as Color, |(i, _)| i as Color);
            coloring.set(v, color);
        }
        coloring
    }

    /// Checks completeness, properness and (when lists are given) list
    /// membership of `coloring`.
    pub fn validate_coloring(&self, lists: Option<&ListAssignment>, coloring: &Coloring) -> ValidityReport {
        let mut report = ValidityReport::default();
        for v in self.vertices() {
            match coloring.get(v) {
                None => report.uncolored.push(v),
                Some(c) => {
                    if let Some(lists) = lists {
                        if !lists.list(v).contains(&c) {
                            report.list_violations.push(ListViolation { vertex: v, color: c });
                        }
                    }
                }
            }
        }
        for (u, v) in self.edges() {
            if let (Some(a), Some(b)) = (coloring.get(u), coloring.get(v)) {
                if a == b {
                    report.monochromatic_edges.push((u, v));
                }
            }
        }
        report
    }
}

/// A sorted, duplicate-free set of vertex ids.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexSet(Vec<Vertex>);

impl VertexSet {
    pub fn new() -> Self {
        VertexSet(Vec::new())
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Vertex> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[Vertex] {
        &self.0
    }

    pub fn insert(&mut self, v: Vertex) -> bool {
        match self.0.binary_search(&v) {
            Ok(_) => false,
            Err(pos) => {
                self.0.insert(pos, v);
                true
            }
        }
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        VertexSet::from_iter(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.0.iter().all(|&v| !other.contains(v))
    }

    /// Position of each member inside the set, indexed by vertex id.
    pub fn index_map(&self, n: usize) -> Vec<Option<usize>> {
        let mut index = vec![None; n];
        for (i, &v) in self.0.iter().enumerate() {
            index[v] = Some(i);
        }
        index
    }
}

impl FromIterator<Vertex> for VertexSet {
    fn from_iter<T: IntoIterator<Item = Vertex>>(iter: T) -> Self {
        let mut v: Vec<Vertex> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        VertexSet(v)
    }
}

impl<'a> IntoIterator for &'a VertexSet {
    type Item = &'a Vertex;
    type IntoIter = std::slice::Iter<'a, Vertex>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// A partial vertex coloring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    colors: Vec<Option<Color>>,
}

impl Coloring {
    pub fn new(n: usize) -> Self {
        Coloring { colors: vec![None; n] }
    }

    pub fn from_colors(colors: Vec<Option<Color>>) -> Self {
        Coloring { colors }
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn get(&self, v: Vertex) -> Option<Color> {
        self.colors.get(v).copied().flatten()
    }

    pub fn set(&mut self, v: Vertex, c: Color) {
        self.colors[v] = Some(c);
    }

    pub fn unset(&mut self, v: Vertex) {
        self.colors[v] = None;
    }

    pub fn colored_count(&self) -> usize {
        self.colors.iter().filter(|c| c.is_some()).count()
    }

    pub fn is_total(&self) -> bool {
        self.colors.iter().all(Option::is_some)
    }

    pub fn as_slice(&self) -> &[Option<Color>] {
        &self.colors
    }

    pub fn distinct_colors(&self) -> usize {
        let mut c: Vec<Color> = self.colors.iter().flatten().copied().collect();
        c.sort_unstable();
        c.dedup();
        c.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ListViolation {
    pub vertex: Vertex,
    pub color: Color,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub uncolored: Vec<Vertex>,
    pub monochromatic_edges: Vec<(Vertex, Vertex)>,
    pub list_violations: Vec<ListViolation>,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.uncolored.is_empty() && self.monochromatic_edges.is_empty() && self.list_violations.is_empty()
    }
}
