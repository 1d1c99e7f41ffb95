//! Synchronous message-passing simulation of the recursive coloring.
//!
//! Every vertex is a process. Processes only learn what reaches their inbox,
//! one hop per round. Each level runs a discover phase (Steps 1 and 2), then
//! the recursion continues on the vertices that were neither deleted nor
//! solved. Step 4 of a level runs on the deleted vertices while the
//! recursion proceeds, unless pipelining is off, in which case it waits for
//! the recursion to return. Step 5 runs one class per `C` rounds, deepest
//! level first.

mod discover;
mod extend;
mod net;
mod symmetry;
mod trace;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::choosability::{backtrack_color, DEFAULT_ORACLE};
use crate::engine::{EnginePocket, ExtensionFailure};
use crate::graph::{Coloring, Graph, Vertex};
use crate::lists::{ListAssignment, ListError};
use crate::structure::PocketSearch;

pub use net::{MessageRecord, PhaseKind, PhaseLog, RoundCounts};
pub use symmetry::{symmetry_break, symmetry_break_with, SymmetryBreak, SymmetryBreaker};
pub use trace::{replay, PhaseSpan, ReplayReport, RoundRecord, RoundTrace};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub c: usize,
    /// Components of at most this many vertices are colored directly once a
    /// vertex sees all of one inside its ball.
    pub base_threshold: usize,
    pub symmetry_breaker: SymmetryBreaker,
    pub max_rounds: usize,
    /// Run Step 4 of each level alongside the recursion below it.
    pub pipelined: bool,
    /// Keep every message in the trace, for [`replay`].
    pub record_messages: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            c: 6,
            base_threshold: 20,
            symmetry_breaker: SymmetryBreaker::LinialColeVishkin,
            max_rounds: 100_000_000,
            pipelined: true,
            record_messages: false,
        }
    }
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("graph girth {girth} is below the class requirement {need}")]
    GirthViolation { girth: usize, need: usize },
    #[error("invalid list assignment: {0}")]
    InvalidLists(ListError),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("vertex {vertex} has degree {degree}, above the bound {bound}")]
    DegreeBoundViolated { vertex: Vertex, degree: usize, bound: usize },
    #[error("the run needs {needed} rounds, more than the limit {limit}")]
    MaxRoundsExceeded { limit: usize, needed: usize },
    #[error("process {vertex} {detail}")]
    InformationBoundViolation { vertex: Vertex, detail: String },
    #[error("extension failed: {0:?}")]
    ExtensionFailed(Box<ExtensionFailure>),
    #[error("the component of vertex {component} has no coloring from its lists")]
    NoColoring { component: Vertex },
    #[error("tampered trace: {0}")]
    TamperedTrace(String),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

impl From<ListError> for SimError {
    fn from(e: ListError) -> Self {
        match e {
            ListError::GirthViolation { girth, need } => SimError::GirthViolation { girth, need },
            other => SimError::InvalidLists(other),
        }
    }
}

/// Read-only inputs shared by all phases.
pub(crate) struct Ctx<'a> {
    pub graph: &'a Graph,
    pub lists: &'a ListAssignment,
    pub c: usize,
    pub base_threshold: usize,
    pub breaker: SymmetryBreaker,
    pub record: bool,
}

impl Ctx<'_> {
    pub fn search(&self) -> PocketSearch<'static> {
        PocketSearch::new(&DEFAULT_ORACLE, self.c, self.lists.list_size() as u32)
    }
}

/// Per-level figures from a run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimLevel {
    pub level: usize,
    pub live: usize,
    pub deleted: usize,
    pub solved: usize,
    pub pockets: usize,
    pub conflict_degree: usize,
    pub classes: usize,
    /// Vertex sets examined by the local pocket searches.
    pub sets_enumerated: u64,
    pub discover_end: usize,
    pub symmetry_start: usize,
    pub symmetry_end: usize,
    pub extend_start: usize,
    pub extend_end: usize,
}

/// Colors `graph` from `lists` by simulated message passing.
pub fn simulate(graph: &Graph, lists: &ListAssignment, cfg: &SimConfig) -> Result<(Coloring, RoundTrace), SimError> {
    simulate_detailed(graph, lists, cfg).map(|(c, t, _)| (c, t))
}

/// [`simulate`] with the per-level schedule.
pub fn simulate_detailed(
    graph: &Graph,
    lists: &ListAssignment,
    cfg: &SimConfig,
) -> Result<(Coloring, RoundTrace, Vec<SimLevel>), SimError> {
    if cfg.c < 2 {
        return Err(SimError::InvalidConfig("c must be at least 2".into()));
    }
    if cfg.c > 31 {
        return Err(SimError::InvalidConfig("c above 31 does not fit the pocket bitmasks".into()));
    }
    lists.check_type_345(graph)?;
    let n = graph.n();
    let ctx = Ctx {
        graph,
        lists,
        c: cfg.c,
        base_threshold: cfg.base_threshold.max(cfg.c * graph.genus() as usize),
        breaker: cfg.symmetry_breaker,
        record: cfg.record_messages,
    };
    let mut alive = vec![true; n];
    let mut removed_at = vec![usize::MAX; n];
    let mut ext = extend::Extender::new(&ctx);
    let mut placed: Vec<(usize, PhaseLog)> = Vec::new();
    struct Pending {
        row: SimLevel,
        pockets: Vec<EnginePocket>,
        plan: Option<extend::ClassPlan>,
    }
    let mut levels: Vec<Pending> = Vec::new();
    let mut clock = 0;
    let over = |needed: usize| SimError::MaxRoundsExceeded { limit: cfg.max_rounds, needed };

    while alive.iter().any(|&a| a) {
        let level = levels.len();
        let live = alive.iter().filter(|&&a| a).count();
        let disc = discover::discover(&ctx, &alive, level)?;
        let disc_rounds = disc.log.rounds;
        for &(v, col) in &disc.solved {
            ext.color(v, col);
            alive[v] = false;
            removed_at[v] = level;
        }
        let mut row = SimLevel {
            level,
            live,
            deleted: 0,
            solved: disc.solved.len(),
            pockets: disc.pockets.len(),
            conflict_degree: 0,
            classes: 0,
            sets_enumerated: disc.stats.sets_enumerated,
            discover_end: clock + disc_rounds,
            symmetry_start: 0,
            symmetry_end: 0,
            extend_start: 0,
            extend_end: 0,
        };
        placed.push((clock, disc.log.clone()));
        clock += disc_rounds;
        if disc.pockets.is_empty() && disc.solved.is_empty() {
            let (log, colors) = fallback(&ctx, &alive, level)?;
            for (v, col) in colors {
                ext.color(v, col);
                alive[v] = false;
                removed_at[v] = level;
            }
            row.solved = live;
            row.discover_end = clock + log.rounds;
            placed.push((clock, log.clone()));
            clock += log.rounds;
            levels.push(Pending { row, pockets: Vec::new(), plan: None });
            break;
        }
        for &v in disc.anchors_of.keys() {
            alive[v] = false;
            removed_at[v] = level;
        }
        row.deleted = disc.anchors_of.len();
        let plan = (!disc.pockets.is_empty()).then(|| extend::classify(&ctx, level, &disc, &removed_at));
        if let Some(p) = &plan {
            row.conflict_degree = p.conflict_degree;
            row.classes = p.classes;
        }
        levels.push(Pending { row, pockets: disc.pockets, plan });
        if clock > cfg.max_rounds {
            return Err(over(clock));
        }
    }
    let recursion_end = clock;

    let mut waiting: Vec<(usize, usize, u64)> = Vec::new();
    let mut prev_end = recursion_end;
    for lv in levels.iter_mut().rev() {
        let Some(plan) = lv.plan.take() else { continue };
        let row = &mut lv.row;
        let sb_start = if cfg.pipelined { row.discover_end } else { prev_end };
        let sb_end = sb_start + plan.log.rounds;
        let start = prev_end.max(sb_end);
        waiting.push((row.discover_end + 1, sb_start, row.deleted as u64));
        waiting.push((sb_end + 1, start, row.deleted as u64));
        placed.push((sb_start, plan.log));
        for class in 0..plan.classes {
            let members: Vec<&EnginePocket> =
                lv.pockets.iter().zip(&plan.class_of).filter(|(_, &k)| k == class).map(|(p, _)| p).collect();
            let log = ext.stage(row.level, class, &members, &removed_at)?;
            placed.push((start + class * ctx.c, log));
        }
        row.symmetry_start = sb_start;
        row.symmetry_end = sb_end;
        row.extend_start = start;
        row.extend_end = start + plan.classes * ctx.c;
        prev_end = row.extend_end;
        if prev_end > cfg.max_rounds {
            return Err(over(prev_end));
        }
    }

    let depth = levels.len();
    let trace = RoundTrace::assemble(placed, &waiting, depth, cfg.pipelined, cfg.c, cfg.record_messages);
    if trace.rounds_total > cfg.max_rounds {
        return Err(over(trace.rounds_total));
    }
    let psi = ext.psi;
    let report = graph.validate_coloring(Some(lists), &psi);
    if !report.is_valid() {
        return Err(SimError::InvariantViolation(format!("simulated coloring is invalid: {report:?}")));
    }
    Ok((psi, trace, levels.into_iter().map(|l| l.row).collect()))
}

/// Colors every live component by exhaustive search when no process found
/// anything to do. The driver notices the stall, so this step is not a
/// message-passing algorithm; it is charged twice the eccentricity of each
/// component's smallest vertex, the cost of gathering the component there
/// and sending the answer back.
fn fallback(
    ctx: &Ctx<'_>,
    alive: &[bool],
    level: usize,
) -> Result<(PhaseLog, Vec<(Vertex, crate::graph::Color)>), SimError> {
    let graph = ctx.graph;
    let set: crate::graph::VertexSet = graph.vertices().filter(|&v| alive[v]).collect();
    let live = graph.induced_subgraph(&set);
    let mut colors = Vec::new();
    let mut rounds = 1;
    for comp in live.components() {
        let sub = live.induced_subgraph(&comp);
        let ids: Vec<Vertex> = comp.iter().map(|&i| set.as_slice()[i]).collect();
        let sub_lists = ctx.lists.restrict(&ids);
        let col = backtrack_color(&sub, &sub_lists, &Coloring::new(sub.n()))
            .ok_or(SimError::NoColoring { component: ids[0] })?;
        let ecc = sub.distances_from(0).into_iter().filter(|&d| d != usize::MAX).max().unwrap_or(0);
        rounds = rounds.max(2 * ecc);
        colors.extend(ids.iter().enumerate().map(|(i, &v)| (v, col.get(i).expect("total"))));
    }
    let mut log = PhaseLog::new(PhaseKind::Fallback, level, None, rounds, None);
    log.set_active(1, set.len() as u64);
    Ok((log, colors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{self, Family};
    use crate::lists::ListMode;

    fn run(graph: &Graph, lists: &ListAssignment, cfg: &SimConfig) -> (Coloring, RoundTrace, Vec<SimLevel>) {
        let (col, trace, levels) = simulate_detailed(graph, lists, cfg).unwrap();
        assert!(graph.validate_coloring(Some(lists), &col).is_valid());
        (col, trace, levels)
    }

    #[test]
    fn colors_every_family() {
        for family in Family::ALL {
            for seed in 0..2 {
                let g = gen::generate_graph(family, family.size_for_vertices(150), seed);
                let lists = ListAssignment::generate(g.n(), family.girth_class(), ListMode::Random, seed);
                let cfg = SimConfig { record_messages: true, ..SimConfig::default() };
                let (_, trace, _) = run(&g, &lists, &cfg);
                replay(&trace, &g).unwrap();
            }
        }
    }

    #[test]
    fn pipelining_changes_time_not_colors() {
        let g = gen::tri_grid(14);
        let lists = ListAssignment::generate(g.n(), 3, ListMode::Random, 1);
        let (a, ta, la) = run(&g, &lists, &SimConfig::default());
        let (b, tb, _) = run(&g, &lists, &SimConfig { pipelined: false, ..SimConfig::default() });
        assert_eq!(a, b);
        assert!(la.len() > 1);
        assert!(tb.rounds_total > ta.rounds_total);
    }

    #[test]
    fn phases_respect_budgets() {
        let g = gen::tri_grid(12);
        let lists = ListAssignment::generate(g.n(), 3, ListMode::Random, 2);
        let cfg = SimConfig::default();
        let (_, trace, _) = run(&g, &lists, &cfg);
        for p in &trace.phases {
            match p.kind {
                PhaseKind::Discover => assert!(p.rounds() <= 2 * cfg.c - 2),
                PhaseKind::ExtendStage => assert!(p.rounds() <= cfg.c),
                _ => {}
            }
        }
    }

    #[test]
    fn small_components_are_solved_at_once() {
        let g = gen::disjoint_triangles(5);
        let lists = ListAssignment::generate(g.n(), 3, ListMode::Random, 0);
        let (_, trace, levels) = run(&g, &lists, &SimConfig::default());
        assert_eq!(levels.len(), 1);
        assert_eq!(levels[0].solved, 15);
        assert_eq!(trace.rounds_total, 10);
    }

    #[test]
    fn empty_graph() {
        let g = Graph::empty(0);
        let lists = ListAssignment::from_lists(Vec::new(), 3);
        let (col, trace, _) = run(&g, &lists, &SimConfig::default());
        assert!(col.is_empty());
        assert_eq!(trace.rounds_total, 0);
    }

    #[test]
    fn round_limit() {
        let g = gen::tri_grid(10);
        let lists = ListAssignment::generate(g.n(), 3, ListMode::Random, 0);
        let cfg = SimConfig { max_rounds: 5, ..SimConfig::default() };
        assert!(matches!(simulate(&g, &lists, &cfg), Err(SimError::MaxRoundsExceeded { limit: 5, .. })));
    }

    #[test]
    fn no_coloring_is_reported() {
        let g = gen::complete(6);
        let lists = ListAssignment::uniform(6, &[0, 1, 2, 3, 4], 3);
        assert!(matches!(simulate(&g, &lists, &SimConfig::default()), Err(SimError::NoColoring { .. })));
    }

    #[test]
    fn trace_round_trips_and_tampering_is_caught() {
        let g = gen::square_grid(6);
        let lists = ListAssignment::generate(g.n(), 4, ListMode::Random, 0);
        let cfg = SimConfig { record_messages: true, ..SimConfig::default() };
        let (_, trace, _) = run(&g, &lists, &cfg);
        let text = trace.to_json_lines();
        let back = RoundTrace::from_json_lines(&text).unwrap();
        assert_eq!(back, trace);
        replay(&back, &g).unwrap();

        let mut injected = trace.clone();
        injected.messages.as_mut().unwrap().push(MessageRecord { src: 0, dst: 1, sent: 1, delivered: 1 });
        assert!(matches!(replay(&injected, &g), Err(SimError::TamperedTrace(m)) if m.contains("conservation")));

        let mut far = trace.clone();
        let m = far.messages.as_mut().unwrap();
        m[0].dst = g.n() - 1;
        m[0].src = 0;
        assert!(matches!(replay(&far, &g), Err(SimError::TamperedTrace(m)) if m.contains("information bound")));

        let mut cut = trace.clone();
        cut.per_round.truncate(cut.per_round.len() / 2);
        assert!(matches!(replay(&cut, &g), Err(SimError::TamperedTrace(m)) if m.contains("phase bound")));
    }
}
