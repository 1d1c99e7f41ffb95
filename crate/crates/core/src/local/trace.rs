use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::net::{MessageRecord, PhaseKind, PhaseLog};
use super::SimError;
use crate::graph::{Graph, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    pub messages_sent: u64,
    pub messages_delivered: u64,
    pub bytes_estimate: u64,
    pub active_count: u64,
    /// Active processes per phase label, plus sleeping pocket vertices
    /// under `await_recursion`.
    pub phase_histogram: BTreeMap<String, u64>,
}

/// A phase placed on the global clock: rounds `start..=end`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseSpan {
    pub kind: PhaseKind,
    pub level: usize,
    pub class: Option<usize>,
    pub start: usize,
    pub end: usize,
    pub budget: Option<usize>,
}

impl PhaseSpan {
    pub fn rounds(&self) -> usize {
        (self.end + 1).saturating_sub(self.start)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundTrace {
    pub rounds_total: usize,
    pub recursion_depth: usize,
    pub pipelined: bool,
    pub c: usize,
    pub per_round: Vec<RoundRecord>,
    pub phases: Vec<PhaseSpan>,
    /// Every message, when recording was on.
    pub messages: Option<Vec<MessageRecord>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum Line {
    Header { rounds_total: usize, recursion_depth: usize, pipelined: bool, c: usize, messages_recorded: bool },
    Phase(PhaseSpan),
    Round(RoundRecord),
    Message(MessageRecord),
}

impl RoundTrace {
    /// Places phases that start after round `start` on one clock.
    /// `waiting` lists `(from, to, count)`: `count` sleeping vertices in
    /// rounds `from..=to`.
    pub(crate) fn assemble(
        placed: Vec<(usize, PhaseLog)>,
        waiting: &[(usize, usize, u64)],
        recursion_depth: usize,
        pipelined: bool,
        c: usize,
        record: bool,
    ) -> Self {
        let rounds_total = placed.iter().map(|(s, l)| s + l.rounds).max().unwrap_or(0);
        let mut per_round: Vec<RoundRecord> = (1..=rounds_total)
            .map(|round| RoundRecord {
                round,
                messages_sent: 0,
                messages_delivered: 0,
                bytes_estimate: 0,
                active_count: 0,
                phase_histogram: BTreeMap::new(),
            })
            .collect();
        let mut phases = Vec::new();
        let mut messages = Vec::new();
        for (start, log) in placed {
            for (t, counts) in log.counts.iter().enumerate() {
                let rec = &mut per_round[start + t];
                rec.messages_sent += counts.sent;
                rec.messages_delivered += counts.delivered;
                rec.bytes_estimate += counts.bytes;
                rec.active_count += counts.active;
                if counts.active > 0 {
                    *rec.phase_histogram.entry(log.kind.label().to_string()).or_default() += counts.active;
                }
            }
            if record {
                messages.extend(log.messages.iter().map(|m| MessageRecord {
                    sent: m.sent + start,
                    delivered: m.delivered + start,
                    ..*m
                }));
            }
            phases.push(PhaseSpan {
                kind: log.kind,
                level: log.level,
                class: log.class,
                start: start + 1,
                end: start + log.rounds,
                budget: log.budget,
            });
        }
        for &(from, to, count) in waiting {
            for rec in per_round.iter_mut().take(to.min(rounds_total)).skip(from.saturating_sub(1)) {
                *rec.phase_histogram.entry("await_recursion".to_string()).or_default() += count;
            }
        }
        phases.sort_by_key(|p| (p.start, p.level, p.class));
        messages.sort_by_key(|m| (m.sent, m.delivered, m.src, m.dst));
        RoundTrace {
            rounds_total,
            recursion_depth,
            pipelined,
            c,
            per_round,
            phases,
            messages: record.then_some(messages),
        }
    }

    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        let mut push = |line: &Line| {
            out.push_str(&serde_json::to_string(line).expect("trace lines serialize"));
            out.push('\n');
        };
        push(&Line::Header {
            rounds_total: self.rounds_total,
            recursion_depth: self.recursion_depth,
            pipelined: self.pipelined,
            c: self.c,
            messages_recorded: self.messages.is_some(),
        });
        self.phases.iter().for_each(|p| push(&Line::Phase(p.clone())));
        self.per_round.iter().for_each(|r| push(&Line::Round(r.clone())));
        for m in self.messages.iter().flatten() {
            push(&Line::Message(*m));
        }
        out
    }

    pub fn from_json_lines(text: &str) -> Result<Self, SimError> {
        let mut trace: Option<RoundTrace> = None;
        for (i, raw) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let line: Line =
                serde_json::from_str(raw).map_err(|e| SimError::TamperedTrace(format!("line {}: {e}", i + 1)))?;
            match (line, trace.as_mut()) {
                (Line::Header { rounds_total, recursion_depth, pipelined, c, messages_recorded }, None) => {
                    trace = Some(RoundTrace {
                        rounds_total,
                        recursion_depth,
                        pipelined,
                        c,
                        per_round: Vec::new(),
                        phases: Vec::new(),
                        messages: messages_recorded.then(Vec::new),
                    });
                }
                (Line::Header { .. }, Some(_)) => {
                    return Err(SimError::TamperedTrace(format!("line {}: second header", i + 1)));
                }
                (_, None) => return Err(SimError::TamperedTrace("trace does not start with a header".into())),
                (Line::Phase(p), Some(t)) => t.phases.push(p),
                (Line::Round(r), Some(t)) => t.per_round.push(r),
                (Line::Message(m), Some(t)) => match t.messages.as_mut() {
                    Some(ms) => ms.push(m),
                    None => {
                        return Err(SimError::TamperedTrace(format!("line {}: message in an unrecorded trace", i + 1)))
                    }
                },
            }
        }
        trace.ok_or_else(|| SimError::TamperedTrace("empty trace".into()))
    }
}

/// What [`replay`] checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub rounds: usize,
    pub phases: usize,
    pub messages: u64,
    /// Messages whose latency was checked against graph distance.
    pub messages_audited: usize,
}

/// Audits a trace against the graph it was produced on.
///
/// Checks that the round records cover the whole run, that every phase lies
/// inside the run and within its round budget, that every sent message was
/// delivered exactly once and nothing else was, and, when messages were
/// recorded, that no message arrived sooner than its hop distance allows.
/// The last check is the information bound: by induction a process knows
/// nothing from outside its ball of radius equal to the elapsed rounds.
pub fn replay(trace: &RoundTrace, graph: &Graph) -> Result<ReplayReport, SimError> {
    let fail = |msg: String| Err(SimError::TamperedTrace(msg));
    if trace.per_round.len() != trace.rounds_total {
        return fail(format!(
            "phase bound: {} round records for a run of {} rounds",
            trace.per_round.len(),
            trace.rounds_total
        ));
    }
    for (i, r) in trace.per_round.iter().enumerate() {
        if r.round != i + 1 {
            return fail(format!("round record {} is numbered {}", i + 1, r.round));
        }
    }
    for p in &trace.phases {
        if p.start == 0 || p.end > trace.rounds_total || p.end + 1 < p.start {
            return fail(format!(
                "phase bound: {} at level {} spans rounds {}..={} outside 1..={}",
                p.kind.label(),
                p.level,
                p.start,
                p.end,
                trace.rounds_total
            ));
        }
        if let Some(b) = p.budget {
            if p.rounds() > b {
                return fail(format!(
                    "phase bound: {} at level {} took {} rounds, budget {b}",
                    p.kind.label(),
                    p.level,
                    p.rounds()
                ));
            }
        }
    }
    let sent: u64 = trace.per_round.iter().map(|r| r.messages_sent).sum();
    let delivered: u64 = trace.per_round.iter().map(|r| r.messages_delivered).sum();
    if sent != delivered {
        return fail(format!("message conservation: {sent} sent, {delivered} delivered"));
    }
    let mut audited = 0;
    if let Some(messages) = &trace.messages {
        let mut by_sent = vec![0u64; trace.rounds_total + 1];
        let mut by_delivered = vec![0u64; trace.rounds_total + 1];
        let mut bfs = BoundedBfs::new(graph.n());
        for m in messages {
            if m.src >= graph.n() || m.dst >= graph.n() {
                return fail(format!("message {} -> {} names a vertex outside the graph", m.src, m.dst));
            }
            if m.sent == 0 || m.delivered < m.sent || m.delivered > trace.rounds_total {
                return fail(format!("message {} -> {} has rounds {}..{}", m.src, m.dst, m.sent, m.delivered));
            }
            by_sent[m.sent] += 1;
            by_delivered[m.delivered] += 1;
            let hops = m.delivered - m.sent + 1;
            if !bfs.within(graph, m.src, m.dst, hops) {
                return fail(format!(
                    "information bound: message {} -> {} crossed more than {hops} hops in {hops} rounds",
                    m.src, m.dst
                ));
            }
            audited += 1;
        }
        for r in &trace.per_round {
            if by_sent[r.round] != r.messages_sent || by_delivered[r.round] != r.messages_delivered {
                return fail(format!(
                    "message conservation: round {} logs {} sent and {} delivered, counts say {} and {}",
                    r.round, by_sent[r.round], by_delivered[r.round], r.messages_sent, r.messages_delivered
                ));
            }
        }
    }
    Ok(ReplayReport {
        rounds: trace.rounds_total,
        phases: trace.phases.len(),
        messages: sent,
        messages_audited: audited,
    })
}

/// Depth-limited BFS with cached results per source and depth.
struct BoundedBfs {
    dist: Vec<usize>,
    cache: HashMap<(Vertex, usize), Vec<Vertex>>,
}

impl BoundedBfs {
    fn new(n: usize) -> Self {
        BoundedBfs { dist: vec![usize::MAX; n], cache: HashMap::new() }
    }

    fn within(&mut self, graph: &Graph, src: Vertex, dst: Vertex, hops: usize) -> bool {
        if src == dst {
            return true;
        }
        let ball = self.cache.entry((src, hops)).or_insert_with(|| {
            let mut seen = vec![src];
            let mut queue = VecDeque::from([src]);
            self.dist[src] = 0;
            while let Some(u) = queue.pop_front() {
                if self.dist[u] == hops {
                    continue;
                }
                for &w in graph.neighbors(u) {
                    if self.dist[w] == usize::MAX {
                        self.dist[w] = self.dist[u] + 1;
                        seen.push(w);
                        queue.push_back(w);
                    }
                }
            }
            for &u in &seen {
                self.dist[u] = usize::MAX;
            }
            seen.sort_unstable();
            seen
        });
        ball.binary_search(&dst).is_ok()
    }
}
