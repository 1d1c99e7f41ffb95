//! Steps 4 and 5 at one level, by message passing.

use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use super::discover::Discovery;
use super::net::{MessageRecord, Net, PhaseKind, PhaseLog};
use super::symmetry;
use super::{Ctx, SimError};
use crate::choosability::{backtrack_color, Verdict};
use crate::engine::{EnginePocket, ExtensionFailure, FailureReason};
use crate::graph::{Color, Coloring, Graph, Vertex};
use crate::lists::ListAssignment;

pub(crate) struct ClassPlan {
    pub log: PhaseLog,
    /// Class of each pocket, aligned with the level's pockets.
    pub class_of: Vec<usize>,
    /// Size of the class palette: every class gets a stage.
    pub classes: usize,
    pub conflict_degree: usize,
}

enum Disc {
    Anchors(Rc<Vec<Vertex>>),
    Conflicts(Vertex, Rc<Vec<Vertex>>),
}

/// Step 4. Pockets conflict when they touch. Three parts:
///
/// 1. `C` rounds: pocket vertices tell their neighbors which pockets they
///    lie in, then flood what they learned inside each of their pockets,
///    so every anchor learns the pockets touching its own.
/// 2. Symmetry breaking among anchors. Anchors of touching pockets are
///    joined by a path of at most `2C - 1` edges through the two pockets,
///    so one round of the breaker costs `2C - 1` rounds.
/// 3. `C - 1` rounds: anchors flood their class inside their pocket.
pub(crate) fn classify(ctx: &Ctx<'_>, level: usize, disc: &Discovery, removed_at: &[usize]) -> ClassPlan {
    let graph = ctx.graph;
    let c = ctx.c;
    let at_level = |x: Vertex| removed_at[x] >= level;
    let pocket_of: HashMap<Vertex, &EnginePocket> = disc.pockets.iter().map(|p| (p.anchor, p)).collect();
    let members: Vec<Vertex> = {
        let mut m: Vec<Vertex> = disc.anchors_of.keys().copied().collect();
        m.sort_unstable();
        m
    };

    let mut net: Net<Disc> =
        Net::new(graph.n(), PhaseLog::new(PhaseKind::SymmetryBreak, level, None, c, None), ctx.record);
    for &w in &members {
        let a = Rc::new(disc.anchors_of[&w].clone());
        for &x in graph.neighbors(w).iter().filter(|&&x| at_level(x)) {
            net.send(1, w, x, 1, Disc::Anchors(Rc::clone(&a)), 4 * a.len() as u64);
        }
    }
    net.deliver(1);
    net.log.set_active(1, members.len() as u64);
    // (member, anchor) -> (conflicts known, conflicts not yet forwarded)
    let mut conf: BTreeMap<(Vertex, Vertex), (Vec<Vertex>, Vec<Vertex>)> = BTreeMap::new();
    for &w in &members {
        let mut heard: Vec<Vertex> = disc.anchors_of[&w].clone();
        for (_, msg) in net.take(w) {
            if let Disc::Anchors(a) = msg {
                heard.extend(a.iter().copied());
            }
        }
        heard.sort_unstable();
        heard.dedup();
        for &a in &disc.anchors_of[&w] {
            let set: Vec<Vertex> = heard.iter().copied().filter(|&b| b != a).collect();
            conf.insert((w, a), (set.clone(), set));
        }
    }
    for t in 2..=c {
        let mut active = 0;
        for (&(w, a), (_, fresh)) in conf.iter_mut() {
            if fresh.is_empty() {
                continue;
            }
            active += 1;
            let payload = Rc::new(std::mem::take(fresh));
            for &x in graph.neighbors(w).iter().filter(|&&x| pocket_of[&a].vertices.contains(x)) {
                net.send(t, w, x, 1, Disc::Conflicts(a, Rc::clone(&payload)), 4 + 4 * payload.len() as u64);
            }
        }
        net.deliver(t);
        net.log.set_active(t, active);
        for &w in &members {
            for (_, msg) in net.take(w) {
                if let Disc::Conflicts(a, ids) = msg {
                    let (set, fresh) = conf.get_mut(&(w, a)).expect("conflicts travel inside their pocket");
                    for &b in ids.iter() {
                        if let Err(pos) = set.binary_search(&b) {
                            set.insert(pos, b);
                            fresh.push(b);
                        }
                    }
                }
            }
        }
    }
    let mut log = net.finish();

    let index: HashMap<Vertex, usize> = disc.pockets.iter().enumerate().map(|(i, p)| (p.anchor, i)).collect();
    let adj: Vec<Vec<usize>> = disc
        .pockets
        .iter()
        .map(|p| {
            let mut a: Vec<usize> = conf[&(p.anchor, p.anchor)].0.iter().map(|b| index[b]).collect();
            a.sort_unstable();
            a
        })
        .collect();
    debug_assert!(adj.iter().enumerate().all(|(i, a)| a.iter().all(|&j| adj[j].binary_search(&i).is_ok())));
    let delta = adj.iter().map(Vec::len).max().unwrap_or(0);
    let ids: Vec<u64> = disc.pockets.iter().map(|p| p.anchor as u64).collect();
    let latency = 2 * c - 1;
    let sb_log = PhaseLog::new(PhaseKind::SymmetryBreak, level, None, 0, None);
    let (colors, run) =
        symmetry::run(&adj, &ids, graph.n() as u64, delta, latency, ctx.breaker, Some((sb_log, ctx.record)));
    let mut sb_log = run.log.expect("a log was requested");
    for m in &mut sb_log.messages {
        *m = MessageRecord { src: disc.pockets[m.src].anchor, dst: disc.pockets[m.dst].anchor, ..*m };
    }
    log.append(sb_log);

    // Class notice.
    let rounds = c - 1;
    let mut net: Net<(Vertex, u64)> =
        Net::new(graph.n(), PhaseLog::new(PhaseKind::SymmetryBreak, level, None, rounds, None), ctx.record);
    let mut pending: BTreeMap<Vertex, Vec<(Vertex, u64)>> = BTreeMap::new();
    let mut told: BTreeMap<(Vertex, Vertex), u64> = BTreeMap::new();
    for (i, p) in disc.pockets.iter().enumerate() {
        pending.entry(p.anchor).or_default().push((p.anchor, colors[i]));
        told.insert((p.anchor, p.anchor), colors[i]);
    }
    for t in 1..=rounds {
        let senders = pending.len() as u64;
        for (w, items) in std::mem::take(&mut pending) {
            for (a, class) in items {
                for &x in graph.neighbors(w).iter().filter(|&&x| pocket_of[&a].vertices.contains(x)) {
                    net.send(t, w, x, 1, (a, class), 12);
                }
            }
        }
        net.deliver(t);
        net.log.set_active(t, senders);
        for &w in &members {
            for (_, (a, class)) in net.take(w) {
                if let std::collections::btree_map::Entry::Vacant(e) = told.entry((w, a)) {
                    e.insert(class);
                    pending.entry(w).or_default().push((a, class));
                }
            }
        }
    }
    debug_assert!(disc.pockets.iter().all(|p| p.vertices.iter().all(|&w| told.contains_key(&(w, p.anchor)))));
    log.append(net.finish());

    ClassPlan {
        log,
        class_of: colors.iter().map(|&c| c as usize).collect(),
        classes: delta + 1,
        conflict_degree: delta,
    }
}

struct MemberInfo {
    vertex: Vertex,
    available: Vec<Color>,
    inside: Vec<Vertex>,
    actual: i64,
}

enum Stage {
    Push(Color),
    Info(Rc<MemberInfo>),
}

/// Step-5 state carried across stages and levels.
pub(crate) struct Extender<'a> {
    ctx: &'a Ctx<'a>,
    /// Last color heard from each neighbor, aligned with the sorted
    /// neighbor lists.
    heard: Vec<Vec<Option<Color>>>,
    /// Vertices whose color changed since they last told their neighbors.
    pub pending: Vec<Vertex>,
    pub psi: Coloring,
}

impl<'a> Extender<'a> {
    pub fn new(ctx: &'a Ctx<'a>) -> Self {
        let graph = ctx.graph;
        Extender {
            ctx,
            heard: graph.vertices().map(|v| vec![None; graph.degree(v)]).collect(),
            pending: Vec::new(),
            psi: Coloring::new(graph.n()),
        }
    }

    pub fn color(&mut self, v: Vertex, c: Color) {
        self.psi.set(v, c);
        self.pending.push(v);
    }

    /// One class in `C` rounds. Round 1: every vertex whose color changed
    /// since it last spoke tells its neighbors. Rounds `2..=C`: members of
    /// each pocket flood their remaining lists inside the pocket; then each
    /// member knows the whole instance and takes its own color from the
    /// same deterministic search.
    pub fn stage(
        &mut self,
        level: usize,
        class: usize,
        pockets: &[&EnginePocket],
        removed_at: &[usize],
    ) -> Result<PhaseLog, SimError> {
        let ctx = self.ctx;
        let graph = ctx.graph;
        let c = ctx.c;
        let r = ctx.lists.list_size() as i64;
        let mut net: Net<Stage> =
            Net::new(graph.n(), PhaseLog::new(PhaseKind::ExtendStage, level, Some(class), c, Some(c)), ctx.record);

        let mut pushers = std::mem::take(&mut self.pending);
        pushers.sort_unstable();
        pushers.dedup();
        let mut receivers = Vec::new();
        for &v in &pushers {
            let col = self.psi.get(v).expect("pending vertices are colored");
            for &w in graph.neighbors(v) {
                net.send(1, v, w, 1, Stage::Push(col), 4);
                receivers.push(w);
            }
        }
        net.deliver(1);
        net.log.set_active(1, pushers.len() as u64);
        receivers.sort_unstable();
        receivers.dedup();
        for &w in &receivers {
            for (v, msg) in net.take(w) {
                if let Stage::Push(col) = msg {
                    let slot = graph.neighbors(w).binary_search(&v).expect("pushes go to neighbors");
                    self.heard[w][slot] = Some(col);
                }
            }
        }

        for p in pockets {
            for &v in &p.vertices {
                self.psi.unset(v);
            }
        }
        // Each member's view: infos received so far, and infos to forward.
        let mut infos: BTreeMap<Vertex, Vec<Rc<MemberInfo>>> = BTreeMap::new();
        let mut fresh: BTreeMap<Vertex, Vec<Rc<MemberInfo>>> = BTreeMap::new();
        let mut home: HashMap<Vertex, usize> = HashMap::new();
        for (k, p) in pockets.iter().enumerate() {
            for &w in &p.vertices {
                home.insert(w, k);
                let mut inside = Vec::new();
                let mut blocked = Vec::new();
                let mut degree = 0i64;
                for (j, &x) in graph.neighbors(w).iter().enumerate() {
                    if removed_at[x] < level {
                        continue;
                    }
                    degree += 1;
                    if p.vertices.contains(x) {
                        inside.push(x);
                    } else if let Some(col) = self.heard[w][j] {
                        blocked.push(col);
                    }
                }
                let available = ctx.lists.list(w).iter().copied().filter(|col| !blocked.contains(col)).collect();
                let actual = r - degree + inside.len() as i64;
                let info = Rc::new(MemberInfo { vertex: w, available, inside, actual });
                infos.insert(w, vec![Rc::clone(&info)]);
                fresh.insert(w, vec![info]);
            }
        }
        for t in 2..=c {
            let mut active = 0;
            for (&w, items) in fresh.iter_mut() {
                if items.is_empty() {
                    continue;
                }
                active += 1;
                let p = pockets[home[&w]];
                for info in std::mem::take(items) {
                    let bytes = 8 + 4 * (info.available.len() + info.inside.len()) as u64;
                    for &x in graph.neighbors(w).iter().filter(|&&x| p.vertices.contains(x)) {
                        net.send(t, w, x, 1, Stage::Info(Rc::clone(&info)), bytes);
                    }
                }
            }
            net.deliver(t);
            net.log.set_active(t, active);
            for (&w, have) in infos.iter_mut() {
                for (_, msg) in net.take(w) {
                    if let Stage::Info(info) = msg {
                        if have.iter().all(|h| h.vertex != info.vertex) {
                            have.push(Rc::clone(&info));
                            fresh.get_mut(&w).expect("members have a queue").push(info);
                        }
                    }
                }
            }
        }
        let log = net.finish();

        for p in pockets {
            // Every member now holds the same instance; solve it once.
            let mut known = infos[&p.anchor].clone();
            known.sort_by_key(|i| i.vertex);
            for &w in &p.vertices {
                if infos[&w].len() != p.vertices.len() {
                    return Err(SimError::InvariantViolation(format!("member {w} missed part of its pocket")));
                }
            }
            let colored = solve(p, &known, ctx.lists.girth_class()).map_err(|reason| fail(p, level, class, reason))?;
            for (j, &w) in p.vertices.iter().enumerate() {
                self.color(w, colored[j]);
            }
        }
        Ok(log)
    }
}

fn fail(p: &EnginePocket, level: usize, class: usize, reason: FailureReason) -> SimError {
    SimError::ExtensionFailed(Box::new(ExtensionFailure {
        level: Some(level),
        class: Some(class),
        anchor: p.anchor,
        vertices: p.vertices.clone(),
        reason,
    }))
}

/// Checks the certificate against what the members reported, then colors
/// the pocket from the remaining lists.
fn solve(p: &EnginePocket, known: &[Rc<MemberInfo>], girth_class: u32) -> Result<Vec<Color>, FailureReason> {
    let cert = &p.certificate;
    if cert.verdict != Verdict::Deletable {
        return Err(FailureReason::NotCertified { verdict: cert.verdict });
    }
    if cert.vertices.as_slice() != p.vertices.as_slice() || cert.demand.len() != p.vertices.len() {
        return Err(FailureReason::VertexMismatch);
    }
    let members = p.vertices.as_slice();
    let mut edges = Vec::new();
    let mut lists = Vec::new();
    for (j, info) in known.iter().enumerate() {
        if info.actual != i64::from(cert.demand[j]) {
            return Err(FailureReason::DemandMismatch {
                vertex: info.vertex,
                certified: cert.demand[j],
                actual: info.actual,
            });
        }
        if info.available.len() < cert.demand[j] as usize {
            return Err(FailureReason::ListTooShort {
                vertex: info.vertex,
                available: info.available.len(),
                certified: cert.demand[j],
            });
        }
        for &x in &info.inside {
            let k = members.binary_search(&x).expect("inside neighbors are members");
            if j < k {
                edges.push((j, k));
            }
        }
        lists.push(info.available.clone());
    }
    let sub = Graph::from_edges(members.len(), edges).expect("member indices are in range");
    let sub_lists = ListAssignment::from_lists(lists, girth_class);
    let colored = backtrack_color(&sub, &sub_lists, &Coloring::new(sub.n())).ok_or(FailureReason::NoListColoring)?;
    Ok((0..members.len()).map(|j| colored.get(j).expect("backtracking colors every vertex")).collect())
}
