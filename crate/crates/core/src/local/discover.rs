//! Steps 1 and 2 at one level, by message passing.
//!
//! Rounds `1..=C-1`: every live vertex floods the ids it learned in the
//! previous round; the fact behind an id is that vertex's live neighbor
//! list. After them a process knows its ball of radius `C - 1`, which holds
//! every candidate pocket and the degrees its demand needs.
//!
//! Rounds `C..=2C-2`: each vertex whose ball closes up into a component of
//! at most the base threshold colors that component and floods the result;
//! every other vertex floods its pocket, if it found one, inside the
//! pocket. A pocket has at most `C` vertices, so both floods reach every
//! vertex concerned.

use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use super::net::{Net, PhaseKind, PhaseLog};
use super::{Ctx, SimError};
use crate::choosability::backtrack_color;
use crate::engine::EnginePocket;
use crate::graph::{Color, Coloring, Graph, Vertex, VertexSet};
use crate::structure::SearchStats;

pub(crate) struct Discovery {
    pub log: PhaseLog,
    pub solved: Vec<(Vertex, Color)>,
    /// Distinct pockets by anchor, the smallest vertex that proposed each.
    pub pockets: Vec<EnginePocket>,
    /// For each pocket vertex, the anchors of the pockets containing it as
    /// that vertex worked them out.
    pub anchors_of: HashMap<Vertex, Vec<Vertex>>,
    pub stats: SearchStats,
}

struct Proposal {
    proposer: Vertex,
    found_vertices: Vec<Vertex>,
    demand: Vec<u32>,
    method: crate::choosability::Method,
}

struct Solved {
    colors: Vec<(Vertex, Color)>,
}

enum Claim {
    Proposal(Rc<Proposal>),
    Solved(Rc<Solved>),
}

/// What a process may read after the gather: facts of known vertices only.
struct Knowledge<'a> {
    ctx: &'a Ctx<'a>,
    alive: &'a [bool],
    owner: Vertex,
    known: &'a [Vertex],
}

impl Knowledge<'_> {
    fn fact(&self, u: Vertex) -> Result<Vec<Vertex>, SimError> {
        if self.known.binary_search(&u).is_err() {
            return Err(SimError::InformationBoundViolation {
                vertex: self.owner,
                detail: format!("read the neighbor list of {u} outside its ball"),
            });
        }
        Ok(self.ctx.graph.neighbors(u).iter().copied().filter(|&w| self.alive[w]).collect())
    }

    /// Known vertices renumbered in id order, so that local order agrees
    /// with global order; edges and live degrees from their facts.
    fn local_graph(&self) -> Result<(Graph, Vec<usize>, bool), SimError> {
        let mut edges = Vec::new();
        let mut degree = Vec::with_capacity(self.known.len());
        let mut closed = true;
        for (i, &u) in self.known.iter().enumerate() {
            let nbrs = self.fact(u)?;
            degree.push(nbrs.len());
            for w in nbrs {
                match self.known.binary_search(&w) {
                    Ok(j) if i < j => edges.push((i, j)),
                    Ok(_) => {}
                    Err(_) => closed = false,
                }
            }
        }
        let g = Graph::from_edges(self.known.len(), edges).expect("local ids are in range");
        Ok((g, degree, closed))
    }
}

pub(crate) fn discover(ctx: &Ctx<'_>, alive: &[bool], level: usize) -> Result<Discovery, SimError> {
    let graph = ctx.graph;
    let gather = ctx.c - 1;
    let rounds = 2 * gather;
    let live: Vec<Vertex> = graph.vertices().filter(|&v| alive[v]).collect();
    let live_nbrs = |v: Vertex| graph.neighbors(v).iter().copied().filter(|&w| alive[w]);
    let fact_bytes = |v: Vertex| 4 + 4 * live_nbrs(v).count() as u64;

    let mut net: Net<Rc<Vec<Vertex>>> =
        Net::new(graph.n(), PhaseLog::new(PhaseKind::Discover, level, None, rounds, Some(rounds)), ctx.record);
    let mut known: Vec<Vec<Vertex>> = vec![Vec::new(); graph.n()];
    let mut frontier: Vec<Rc<Vec<Vertex>>> = (0..graph.n()).map(|_| Rc::new(Vec::new())).collect();
    for &v in &live {
        known[v] = vec![v];
        frontier[v] = Rc::new(vec![v]);
    }
    for t in 1..=gather {
        for &v in &live {
            if frontier[v].is_empty() {
                continue;
            }
            let bytes: u64 = frontier[v].iter().map(|&u| fact_bytes(u)).sum();
            for w in live_nbrs(v) {
                net.send(t, v, w, 1, Rc::clone(&frontier[v]), bytes);
            }
        }
        net.deliver(t);
        net.log.set_active(t, live.len() as u64);
        for &v in &live {
            let mut fresh: Vec<Vertex> = net.take(v).into_iter().flat_map(|(_, ids)| ids.to_vec()).collect();
            fresh.sort_unstable();
            fresh.dedup();
            fresh.retain(|u| known[v].binary_search(u).is_err());
            if !fresh.is_empty() {
                known[v].extend_from_slice(&fresh);
                known[v].sort_unstable();
            }
            frontier[v] = Rc::new(fresh);
        }
    }
    drop(frontier);

    // Local decisions.
    let threshold = ctx.base_threshold;
    let search = ctx.search();
    let mut stats = SearchStats::default();
    let mut own: Vec<Option<Rc<Proposal>>> = vec![None; graph.n()];
    let mut solved_by: Vec<Option<Rc<Solved>>> = vec![None; graph.n()];
    for &v in &live {
        let view = Knowledge { ctx, alive, owner: v, known: &known[v] };
        let (local, degree, closed) = view.local_graph()?;
        if closed && known[v].len() <= threshold {
            let lists = ctx.lists.restrict(&known[v]);
            let Some(col) = backtrack_color(&local, &lists, &Coloring::new(local.n())) else {
                return Err(SimError::NoColoring { component: known[v][0] });
            };
            let colors = known[v].iter().enumerate().map(|(i, &u)| (u, col.get(i).expect("total"))).collect();
            solved_by[v] = Some(Rc::new(Solved { colors }));
            continue;
        }
        let me = known[v].binary_search(&v).expect("a process knows itself");
        let (found, s) = search.search(&local, None, &degree, me);
        stats.sets_enumerated += s.sets_enumerated;
        stats.oracle_calls += s.oracle_calls;
        if let Some(f) = found {
            own[v] = Some(Rc::new(Proposal {
                proposer: v,
                found_vertices: f.vertices.iter().map(|&i| known[v][i]).collect(),
                demand: f.demand,
                method: f.method,
            }));
        }
    }
    drop(known);

    // Claims.
    let mut net: Net<Claim> = net.switch();
    let mut received: BTreeMap<Vertex, Vec<Rc<Proposal>>> = BTreeMap::new();
    let mut pending: BTreeMap<Vertex, Vec<Rc<Proposal>>> = BTreeMap::new();
    let mut solved_pending: Vec<Vertex> = Vec::new();
    for &v in &live {
        if let Some(p) = &own[v] {
            received.entry(v).or_default().push(Rc::clone(p));
            pending.entry(v).or_default().push(Rc::clone(p));
        }
        if solved_by[v].is_some() {
            solved_pending.push(v);
        }
    }
    for t in gather + 1..=rounds {
        let mut senders: Vec<Vertex> = pending.keys().copied().chain(solved_pending.iter().copied()).collect();
        senders.sort_unstable();
        senders.dedup();
        for (v, props) in std::mem::take(&mut pending) {
            for p in props {
                let bytes = 8 + 8 * p.found_vertices.len() as u64;
                for w in live_nbrs(v).filter(|w| p.found_vertices.binary_search(w).is_ok()) {
                    net.send(t, v, w, 1, Claim::Proposal(Rc::clone(&p)), bytes);
                }
            }
        }
        for v in std::mem::take(&mut solved_pending) {
            let s = solved_by[v].clone().expect("pending solvers hold a result");
            let bytes = 8 * s.colors.len() as u64;
            for w in live_nbrs(v) {
                net.send(t, v, w, 1, Claim::Solved(Rc::clone(&s)), bytes);
            }
        }
        net.deliver(t);
        net.log.set_active(t, senders.len() as u64);
        for &v in &live {
            for (_, msg) in net.take(v) {
                match msg {
                    Claim::Proposal(p) => {
                        let have = received.entry(v).or_default();
                        if have.iter().all(|q| q.proposer != p.proposer) {
                            have.push(Rc::clone(&p));
                            pending.entry(v).or_default().push(p);
                        }
                    }
                    Claim::Solved(s) => {
                        if solved_by[v].is_none() {
                            solved_by[v] = Some(s);
                            solved_pending.push(v);
                        }
                    }
                }
            }
        }
    }
    let log = net.finish();

    let mut solved = Vec::new();
    let mut pockets = Vec::new();
    let mut anchors_of = HashMap::new();
    for &v in &live {
        if let Some(s) = &solved_by[v] {
            let c = s.colors.iter().find(|(u, _)| *u == v).expect("a solved component names all its vertices").1;
            solved.push((v, c));
            continue;
        }
        let Some(props) = received.get(&v) else { continue };
        // Anchor of a vertex set: its smallest proposer.
        let mut anchor_of: HashMap<&[Vertex], Vertex> = HashMap::new();
        for p in props {
            let e = anchor_of.entry(p.found_vertices.as_slice()).or_insert(p.proposer);
            *e = (*e).min(p.proposer);
        }
        let mut anchors: Vec<Vertex> = anchor_of.values().copied().collect();
        anchors.sort_unstable();
        if let Some(p) = &own[v] {
            if anchor_of[p.found_vertices.as_slice()] == v {
                let vertices = VertexSet::from_iter(p.found_vertices.iter().copied());
                let certificate = crate::choosability::DeletabilityCertificate {
                    verdict: crate::choosability::Verdict::Deletable,
                    method: p.method,
                    vertices: p.found_vertices.clone(),
                    demand: p.demand.clone(),
                    witness: None,
                    assignments_checked: 0,
                };
                pockets.push(EnginePocket { anchor: v, vertices, certificate });
            }
        }
        anchors_of.insert(v, anchors);
    }
    Ok(Discovery { log, solved, pockets, anchors_of, stats })
}
