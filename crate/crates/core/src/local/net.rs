//! Lockstep message delivery for one phase.
//!
//! A phase runs rounds `1..=rounds`. In round `t` a process first sends,
//! then every message due at `t` is delivered, then processes compute from
//! their inboxes. A message sent in round `t` with latency `l` is due at
//! `t + l - 1`, so a latency-1 message is read in the round it was sent.
//! Latency must be at least the hop distance between the endpoints; the
//! replay audit checks this.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::graph::Vertex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseKind {
    /// Steps 1 and 2: gather the ball, find pockets, inform members.
    Discover,
    /// Step 4: conflicts between pockets, symmetry breaking, class notice.
    SymmetryBreak,
    /// Step 5, one color class.
    ExtendStage,
    /// Exhaustive coloring of stalled components.
    Fallback,
}

impl PhaseKind {
    pub fn label(self) -> &'static str {
        match self {
            PhaseKind::Discover => "discover",
            PhaseKind::SymmetryBreak => "symmetry_break",
            PhaseKind::ExtendStage => "extend_stage",
            PhaseKind::Fallback => "fallback",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundCounts {
    pub sent: u64,
    pub delivered: u64,
    pub bytes: u64,
    pub active: u64,
}

/// A message as logged, with rounds relative to its phase until the phase
/// is placed on the global clock.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MessageRecord {
    pub src: Vertex,
    pub dst: Vertex,
    pub sent: usize,
    pub delivered: usize,
}

/// What one phase did, round by round.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseLog {
    pub kind: PhaseKind,
    pub level: usize,
    pub class: Option<usize>,
    pub rounds: usize,
    pub budget: Option<usize>,
    pub counts: Vec<RoundCounts>,
    pub messages: Vec<MessageRecord>,
}

impl PhaseLog {
    pub fn new(kind: PhaseKind, level: usize, class: Option<usize>, rounds: usize, budget: Option<usize>) -> Self {
        PhaseLog {
            kind,
            level,
            class,
            rounds,
            budget,
            counts: vec![RoundCounts::default(); rounds],
            messages: Vec::new(),
        }
    }

    pub fn set_active(&mut self, round: usize, active: u64) {
        self.counts[round - 1].active = active;
    }

    /// Appends `other` as the rounds following this phase's current end.
    pub fn append(&mut self, other: PhaseLog) {
        let shift = self.rounds;
        self.rounds += other.rounds;
        self.counts.extend(other.counts);
        self.messages.extend(other.messages.into_iter().map(|m| MessageRecord {
            sent: m.sent + shift,
            delivered: m.delivered + shift,
            ..m
        }));
    }
}

struct Envelope<P> {
    src: Vertex,
    dst: Vertex,
    sent: usize,
    payload: P,
}

pub(crate) struct Net<P> {
    inbox: Vec<Vec<(Vertex, P)>>,
    due: BTreeMap<usize, Vec<Envelope<P>>>,
    record: bool,
    pub log: PhaseLog,
}

impl<P> Net<P> {
    pub fn new(n: usize, log: PhaseLog, record: bool) -> Self {
        Net { inbox: (0..n).map(|_| Vec::new()).collect(), due: BTreeMap::new(), record, log }
    }

    pub fn send(&mut self, round: usize, src: Vertex, dst: Vertex, latency: usize, payload: P, bytes: u64) {
        debug_assert!(latency >= 1 && round >= 1);
        let at = round + latency - 1;
        assert!(at <= self.log.rounds, "message due after the phase ends");
        let c = &mut self.log.counts[round - 1];
        c.sent += 1;
        c.bytes += bytes;
        self.due.entry(at).or_default().push(Envelope { src, dst, sent: round, payload });
    }

    pub fn deliver(&mut self, round: usize) {
        let Some(batch) = self.due.remove(&round) else {
            return;
        };
        self.log.counts[round - 1].delivered += batch.len() as u64;
        for e in batch {
            if self.record {
                self.log.messages.push(MessageRecord { src: e.src, dst: e.dst, sent: e.sent, delivered: round });
            }
            self.inbox[e.dst].push((e.src, e.payload));
        }
    }

    pub fn take(&mut self, v: Vertex) -> Vec<(Vertex, P)> {
        std::mem::take(&mut self.inbox[v])
    }

    /// Continues the same phase with another payload type.
    pub fn switch<Q>(self) -> Net<Q> {
        let n = self.inbox.len();
        let record = self.record;
        Net::new(n, self.finish(), record)
    }

    pub fn finish(self) -> PhaseLog {
        assert!(self.due.is_empty(), "undelivered messages at the end of a phase");
        self.log
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn latency_sets_the_delivery_round() {
        let mut net: Net<u8> = Net::new(3, PhaseLog::new(PhaseKind::Discover, 0, None, 4, None), true);
        net.send(1, 0, 1, 1, 7, 1);
        net.send(1, 0, 2, 3, 9, 1);
        net.deliver(1);
        assert_eq!(net.take(1), vec![(0, 7)]);
        net.deliver(2);
        assert!(net.take(2).is_empty());
        net.deliver(3);
        assert_eq!(net.take(2), vec![(0, 9)]);
        let log = net.finish();
        assert_eq!(log.counts[0].sent, 2);
        assert_eq!(log.counts[2].delivered, 1);
        assert_eq!(log.messages.len(), 2);
    }
}
