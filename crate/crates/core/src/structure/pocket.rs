use std::collections::hash_map::Entry;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::StructureError;
use crate::choosability::small_colorable;
use crate::choosability::{Choosability, DeletabilityCertificate, Method, Verdict, DEFAULT_ORACLE};
use crate::graph::{is_planar, Graph, Vertex, VertexSet};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pocket {
    pub vertices: VertexSet,
    /// The vertex whose search produced this pocket, if any.
    pub anchor: Option<Vertex>,
    pub coboundary: VertexSet,
    pub c: usize,
    pub k: usize,
    /// Connected, at most `c` vertices, every degree at most `c`.
    pub is_pocket: bool,
    pub is_purse: bool,
    pub is_k_deep: bool,
    /// `None` when the subgraph is above the oracle's size limit.
    pub certificate: Option<DeletabilityCertificate>,
}

impl Pocket {
    pub fn is_deletable(&self) -> bool {
        self.certificate.as_ref().is_some_and(|c| c.is_deletable())
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// Coboundary of size at most two, and adding the edge between the two
/// coboundary vertices keeps `G[S ∪ H]` planar.
pub fn is_purse(graph: &Graph, h: &VertexSet) -> bool {
    let s = graph.coboundary(h);
    if s.len() > 2 {
        return false;
    }
    let all = h.union(&s);
    let sub = graph.induced_subgraph(&all);
    let sub = if s.len() == 2 {
        let index = all.index_map(graph.n());
        let (a, b) = (s.as_slice()[0], s.as_slice()[1]);
        sub.with_extra_edges(&[(index[a].unwrap(), index[b].unwrap())])
    } else {
        sub
    };
    is_planar(&sub)
}

/// Coboundary non-empty with `|S| ≤ |H| / k`.
pub fn is_k_deep(graph: &Graph, h: &VertexSet, k: usize) -> bool {
    let s = graph.coboundary(h).len();
    s > 0 && s * k <= h.len()
}

pub fn classify_pocket(graph: &Graph, h: &VertexSet, c: usize, k: usize, r: u32) -> Result<Pocket, StructureError> {
    classify_with(&DEFAULT_ORACLE, graph, h, c, k, r)
}

pub(crate) fn classify_with(
    oracle: &Choosability,
    graph: &Graph,
    h: &VertexSet,
    c: usize,
    k: usize,
    r: u32,
) -> Result<Pocket, StructureError> {
    if h.is_empty() {
        return Err(StructureError::EmptySet);
    }
    if let Some(&v) = h.iter().find(|&&v| v >= graph.n()) {
        return Err(StructureError::VertexOutOfRange { vertex: v });
    }
    if !graph.is_connected_subset(h) {
        return Err(StructureError::NotConnected);
    }
    let is_pocket = h.len() <= c && h.iter().all(|&v| graph.degree(v) <= c);
    let certificate = oracle.is_deletable(graph, h, r).ok();
    Ok(Pocket {
        vertices: h.clone(),
        anchor: None,
        coboundary: graph.coboundary(h),
        c,
        k,
        is_pocket,
        is_purse: is_purse(graph, h),
        is_k_deep: is_k_deep(graph, h, k),
        certificate,
    })
}

pub fn find_deletable_pocket(graph: &Graph, v: Vertex, c: usize, r: u32) -> Result<Option<Pocket>, StructureError> {
    if graph.degree(v) > c {
        return Err(StructureError::DegreeTooHigh { vertex: v, degree: graph.degree(v), c });
    }
    let search = PocketSearch::new(&DEFAULT_ORACLE, c, r);
    let degree: Vec<usize> = graph.vertices().map(|u| graph.degree(u)).collect();
    let Some(found) = search.find(graph, None, &degree, v) else {
        return Ok(None);
    };
    let mut pocket = classify_pocket(graph, &found, c, 1, r)?;
    pocket.anchor = Some(v);
    Ok(Some(pocket))
}

/// A connected set with its sort key: demands and inside degrees.
type Candidate = (Vec<Vertex>, (Vec<u32>, Vec<u32>));

/// Step-2 search over a live subgraph of a fixed host graph.
pub struct PocketSearch<'a> {
    oracle: &'a Choosability,
    c: usize,
    r: u32,
}

/// Counters for one search.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub sets_enumerated: u64,
    pub oracle_calls: u64,
}

impl<'a> PocketSearch<'a> {
    pub fn new(oracle: &'a Choosability, c: usize, r: u32) -> Self {
        PocketSearch { oracle, c, r }
    }

    pub fn find(&self, graph: &Graph, alive: Option<&[bool]>, degree: &[usize], v: Vertex) -> Option<VertexSet> {
        self.find_with_stats(graph, alive, degree, v).0
    }

    pub fn find_with_stats(
        &self,
        graph: &Graph,
        alive: Option<&[bool]>,
        degree: &[usize],
        v: Vertex,
    ) -> (Option<VertexSet>, SearchStats) {
        let (found, stats) = self.search(graph, alive, degree, v);
        (found.map(|f| VertexSet::from_iter(f.vertices)), stats)
    }

    /// First r-deletable connected set containing `v` in (size, sorted ids)
    /// order, among sets of at most `c` live vertices of live degree at most
    /// `c`. `degree` holds live degrees.
    pub(crate) fn search(
        &self,
        graph: &Graph,
        alive: Option<&[bool]>,
        degree: &[usize],
        v: Vertex,
    ) -> (Option<Found>, SearchStats) {
        let mut stats = SearchStats::default();
        let usable = |u: Vertex| alive.is_none_or(|a| a[u]) && degree[u] <= self.c;
        if self.limit() == 0 || !usable(v) {
            return (None, stats);
        }
        let r = self.r as usize;
        if degree[v] < r {
            stats.sets_enumerated = 1;
            let found = Found { vertices: vec![v], demand: vec![(r - degree[v]) as u32], method: Method::Reduction };
            return (Some(found), stats);
        }
        // One size at a time, so a small hit ends the search early.
        for size in 2..=self.limit() {
            let mut candidates = self.candidates(graph, degree, v, usable, size..=size, &mut stats);
            candidates.sort_by(|a, b| order(&a.0, &b.0));
            for (global, demand_masks) in candidates {
                if let Some(found) = self.certify(global, demand_masks, &mut stats) {
                    return (Some(found), stats);
                }
            }
        }
        (None, stats)
    }

    /// Step-2 search for every live vertex at once, restricted to sets that
    /// contain at least one vertex of `roots`. Each such set is enumerated
    /// once, from its smallest root. `is_root` marks the members of `roots`.
    ///
    /// Returns, for every vertex that lies in some deletable set, the first
    /// such set in (size, sorted ids) order. When the sets avoiding `roots`
    /// are known not to be deletable, this equals [`PocketSearch::find`] run
    /// at every vertex.
    pub(crate) fn scan(
        &self,
        graph: &Graph,
        alive: &[bool],
        degree: &[usize],
        roots: &[Vertex],
        is_root: &[bool],
    ) -> Scan {
        let mut stats = SearchStats::default();
        let mut found: Vec<Found> = Vec::new();
        let mut best: HashMap<Vertex, usize> = HashMap::new();
        if self.limit() > 0 {
            for &t in roots {
                let usable = |u: Vertex| alive[u] && degree[u] <= self.c && (u >= t || !is_root[u]);
                if !usable(t) {
                    continue;
                }
                for (global, demand_masks) in self.candidates(graph, degree, t, usable, 1..=self.limit(), &mut stats) {
                    let Some(hit) = self.certify(global, demand_masks, &mut stats) else {
                        continue;
                    };
                    let id = found.len();
                    for &v in &hit.vertices {
                        match best.entry(v) {
                            Entry::Vacant(e) => {
                                e.insert(id);
                            }
                            Entry::Occupied(mut e) => {
                                if order(&hit.vertices, &found[*e.get()].vertices).is_lt() {
                                    e.insert(id);
                                }
                            }
                        }
                    }
                    found.push(hit);
                }
            }
        }
        // Keep the sets that are first for some vertex; the smallest such
        // vertex is the anchor.
        let mut anchors: Vec<(Vertex, usize)> = best.into_iter().collect();
        anchors.sort_unstable();
        let mut pockets = Vec::new();
        for (v, id) in anchors {
            if !found[id].vertices.is_empty() {
                pockets.push((v, std::mem::replace(&mut found[id], Found::empty())));
            }
        }
        Scan { pockets, stats }
    }

    fn limit(&self) -> usize {
        self.c.min(self.oracle.config().size_limit)
    }

    /// Connected usable sets containing `root` with a size in `sizes` that
    /// pass the cheap filters, as sorted global ids with their bitmask
    /// instance.
    fn candidates(
        &self,
        graph: &Graph,
        degree: &[usize],
        root: Vertex,
        usable: impl Fn(Vertex) -> bool,
        sizes: std::ops::RangeInclusive<usize>,
        stats: &mut SearchStats,
    ) -> Vec<Candidate> {
        let c = *sizes.end();
        let r = self.r as i64;
        // Local copy of the usable ball of radius c - 1, root first.
        let mut local: HashMap<Vertex, usize> = HashMap::from([(root, 0)]);
        let mut ids = vec![root];
        let mut depth = vec![0usize];
        let mut head = 0;
        while head < ids.len() {
            let u = ids[head];
            let d = depth[head];
            head += 1;
            if d + 1 >= c {
                continue;
            }
            for &w in graph.neighbors(u) {
                if !local.contains_key(&w) && usable(w) {
                    local.insert(w, ids.len());
                    ids.push(w);
                    depth.push(d + 1);
                }
            }
        }
        let adj: Vec<Vec<usize>> =
            ids.iter().map(|&u| graph.neighbors(u).iter().filter_map(|w| local.get(w).copied()).collect()).collect();
        // A member u needs d_H(u) ≥ degree(u) − r + 1 for a non-zero demand.
        let base: Vec<i64> = ids.iter().map(|&u| r - degree[u] as i64).collect();
        let need: Vec<usize> = base.iter().map(|&b| (1 - b).max(0) as usize).collect();

        let mut esu = Esu {
            adj: &adj,
            need: &need,
            base: &base,
            limit: c,
            min: *sizes.start(),
            mark: vec![0; ids.len()],
            sub: Vec::with_capacity(c),
            buf: Vec::new(),
            found: Vec::new(),
            enumerated: 0,
        };
        esu.start();
        stats.sets_enumerated += esu.enumerated;

        let mut pos = vec![usize::MAX; ids.len()];
        esu.found
            .into_iter()
            .map(|mut set| {
                set.sort_unstable_by_key(|&i| ids[i]);
                for (j, &i) in set.iter().enumerate() {
                    pos[i] = j;
                }
                let mut masks = vec![0u32; set.len()];
                let mut f = vec![0u32; set.len()];
                for (j, &i) in set.iter().enumerate() {
                    for &w in &adj[i] {
                        if pos[w] != usize::MAX {
                            masks[j] |= 1 << pos[w];
                        }
                    }
                    f[j] = (base[i] + i64::from(masks[j].count_ones())) as u32;
                }
                for &i in &set {
                    pos[i] = usize::MAX;
                }
                (set.iter().map(|&i| ids[i]).collect(), (masks, f))
            })
            .collect()
    }

    fn certify(
        &self,
        vertices: Vec<Vertex>,
        (masks, f): (Vec<u32>, Vec<u32>),
        stats: &mut SearchStats,
    ) -> Option<Found> {
        stats.oracle_calls += 1;
        let (verdict, method) = self.oracle.decide_masks(masks, f.clone());
        (verdict == Verdict::Deletable).then_some(Found { vertices, demand: f, method })
    }
}

/// Smaller sets first, then lexicographic on sorted ids.
fn order(a: &[Vertex], b: &[Vertex]) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// A search hit with the data its certificate needs.
#[derive(Debug, Clone)]
pub(crate) struct Found {
    pub vertices: Vec<Vertex>,
    pub demand: Vec<u32>,
    pub method: Method,
}

impl Found {
    fn empty() -> Self {
        Found { vertices: Vec::new(), demand: Vec::new(), method: Method::Trivial }
    }

    pub fn certificate(&self) -> DeletabilityCertificate {
        DeletabilityCertificate {
            verdict: Verdict::Deletable,
            method: self.method,
            vertices: self.vertices.clone(),
            demand: self.demand.clone(),
            witness: None,
            assignments_checked: 0,
        }
    }
}

/// Result of [`PocketSearch::scan`].
pub(crate) struct Scan {
    /// Distinct pockets with their anchors, by anchor id.
    pub pockets: Vec<(Vertex, Found)>,
    pub stats: SearchStats,
}

/// ESU enumeration of connected sets containing local vertex 0, keeping
/// those in which every member has a non-zero demand and which are
/// colorable from the lists `{0, .., f(u)-1}`; both are necessary for
/// deletability.
struct Esu<'a> {
    adj: &'a [Vec<usize>],
    need: &'a [usize],
    /// `r − degree(u)`, so that `f(u) = d_H(u) + base[u]`.
    base: &'a [i64],
    limit: usize,
    /// Smaller sets are walked through but not recorded.
    min: usize,
    /// Number of current members equal or adjacent to each vertex.
    mark: Vec<u32>,
    sub: Vec<usize>,
    /// Extension sets of all open frames, stacked.
    buf: Vec<usize>,
    found: Vec<Vec<usize>>,
    enumerated: u64,
}

impl Esu<'_> {
    fn start(&mut self) {
        self.push(0);
        if !self.hopeless() {
            self.buf.extend_from_slice(&self.adj[0]);
            self.extend(0, self.buf.len());
        }
        self.pop(0);
    }

    fn push(&mut self, u: usize) {
        self.sub.push(u);
        self.mark[u] += 1;
        for &w in &self.adj[u] {
            self.mark[w] += 1;
        }
    }

    fn pop(&mut self, u: usize) {
        self.sub.pop();
        self.mark[u] -= 1;
        for &w in &self.adj[u] {
            self.mark[w] -= 1;
        }
    }

    /// Each member gains at most one inside neighbor per free slot.
    fn hopeless(&self) -> bool {
        let slack = self.limit - self.sub.len();
        self.sub.iter().any(|&u| self.need[u] > self.mark[u] as usize - 1 + slack)
    }

    fn record(&mut self) {
        if self.sub.len() < self.min {
            return;
        }
        self.enumerated += 1;
        if self.sub.iter().any(|&u| (self.mark[u] as usize - 1) < self.need[u]) {
            return;
        }
        let mut masks = [0u32; 32];
        let mut lists = [0u64; 32];
        for (j, &u) in self.sub.iter().enumerate() {
            for (k, &w) in self.sub.iter().enumerate() {
                if self.adj[u].contains(&w) {
                    masks[j] |= 1 << k;
                }
            }
            let f = (self.mark[u] as i64 - 1 + self.base[u]).clamp(0, 63);
            lists[j] = (1u64 << f) - 1;
        }
        let k = self.sub.len();
        if small_colorable(&masks[..k], &lists[..k]) {
            self.found.push(self.sub.clone());
        }
    }

    fn extend(&mut self, lo: usize, mut hi: usize) {
        self.record();
        if self.sub.len() == self.limit {
            return;
        }
        while hi > lo {
            hi -= 1;
            let w = self.buf[hi];
            let start = self.buf.len();
            self.buf.extend_from_within(lo..hi);
            for &u in &self.adj[w] {
                if self.mark[u] == 0 {
                    self.buf.push(u);
                }
            }
            self.push(w);
            if !self.hopeless() {
                self.extend(start, self.buf.len());
            }
            self.pop(w);
            self.buf.truncate(start);
        }
    }
}
