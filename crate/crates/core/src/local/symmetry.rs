//! Deterministic distributed coloring of bounded-degree graphs.
//!
//! Linial's polynomial reduction shrinks the id palette to at most
//! `P(Δ) = p²`, `p` the first prime above `4Δ`, in `O(log* n)` rounds. A
//! group reduction then takes any palette of size `P(Δ)` to `Δ + 1` colors
//! in a number of rounds that depends on `Δ` alone. When the ids already fit
//! in `P(Δ)` the Linial part is skipped, so round counts grow with `n` only
//! through the Linial steps.

use serde::{Deserialize, Serialize};

use super::net::{Net, PhaseLog};
use super::SimError;
use crate::graph::{Color, Coloring, Graph, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryBreaker {
    #[default]
    LinialColeVishkin,
    /// Baseline: a vertex picks the smallest free color once all smaller
    /// neighbors have. Rounds follow the longest decreasing id path.
    GreedyToken,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetryBreak {
    /// Proper coloring of `H^k`.
    pub coloring: Coloring,
    /// Rounds of the base graph: power-graph rounds times `k`.
    pub rounds: usize,
    pub power_rounds: usize,
    pub linial_steps: usize,
    pub colors_used: usize,
    /// Maximum degree of `H^k`.
    pub power_degree: usize,
}

/// Colors `H^k` with at most `Δ(H^k) + 1` colors. Vertex indices serve as
/// ids. Each power-graph round costs `k` rounds of `H`.
pub fn symmetry_break(h: &Graph, k: usize, degree_bound: usize) -> Result<SymmetryBreak, SimError> {
    symmetry_break_with(h, k, degree_bound, SymmetryBreaker::LinialColeVishkin)
}

pub fn symmetry_break_with(
    h: &Graph,
    k: usize,
    degree_bound: usize,
    breaker: SymmetryBreaker,
) -> Result<SymmetryBreak, SimError> {
    if let Some(v) = h.vertices().find(|&v| h.degree(v) > degree_bound) {
        return Err(SimError::DegreeBoundViolated { vertex: v, degree: h.degree(v), bound: degree_bound });
    }
    if k == 0 {
        return Err(SimError::InvalidConfig("power k must be at least 1".into()));
    }
    let power = h.power_graph(k);
    let adj: Vec<Vec<Vertex>> = power.vertices().map(|v| power.neighbors(v).to_vec()).collect();
    let delta = power.max_degree();
    let ids: Vec<u64> = (0..h.n() as u64).collect();
    let (colors, run) = run(&adj, &ids, h.n() as u64, delta, k, breaker, None);
    let coloring = Coloring::from_colors(colors.iter().map(|&c| Some(c as Color)).collect());
    let colors_used = coloring.distinct_colors();
    Ok(SymmetryBreak {
        coloring,
        rounds: run.power_rounds * k,
        power_rounds: run.power_rounds,
        linial_steps: run.linial_steps,
        colors_used,
        power_degree: delta,
    })
}

/// One Linial step: colors are read as polynomials of degree `d` over
/// `GF(q)`; the new palette has `q²` colors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct LinialStep {
    pub q: u64,
    pub d: u32,
}

/// Palette reduction plan for ids below `id_bound` and degree `delta`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Schedule {
    pub linial: Vec<LinialStep>,
    /// Palette size the group reduction starts from.
    pub palette: u64,
    pub delta: usize,
}

impl Schedule {
    pub fn new(id_bound: u64, delta: usize) -> Self {
        let d = delta as u64;
        let p = next_prime(4 * d + 1);
        let target = p * p;
        let mut m = id_bound.max(1);
        let mut linial = Vec::new();
        while m > target {
            let Some(step) = best_step(m, d) else { break };
            if step.q * step.q >= m {
                break;
            }
            m = step.q * step.q;
            linial.push(step);
        }
        Schedule { linial, palette: m.max(target), delta }
    }

    /// Power rounds of the group reduction.
    pub fn reduction_rounds(&self) -> usize {
        let keep = self.delta as u64 + 1;
        let group = 2 * keep;
        let mut m = self.palette;
        let mut rounds = 0;
        while m > keep {
            if m <= group {
                rounds += (m - keep) as usize;
                m = keep;
            } else {
                rounds += keep as usize;
                m = m.div_ceil(group) * keep;
            }
        }
        rounds
    }

    pub fn power_rounds(&self) -> usize {
        self.linial.len() + self.reduction_rounds()
    }
}

/// Smallest `q²` over `d ≥ 1` with `q` prime, `q > Δ·d` and `q^{d+1} ≥ m`.
fn best_step(m: u64, delta: u64) -> Option<LinialStep> {
    let mut best: Option<LinialStep> = None;
    for d in 1..=40u32 {
        let mut q = next_prime(delta * u64::from(d) + 1);
        while !covers(q, d + 1, m) {
            q = next_prime(q + 1);
        }
        if best.is_none_or(|b| q < b.q) {
            best = Some(LinialStep { q, d });
        }
    }
    best
}

fn covers(q: u64, e: u32, m: u64) -> bool {
    q.checked_pow(e).is_none_or(|v| v >= m)
}

fn next_prime(from: u64) -> u64 {
    (from.max(2)..).find(|&x| is_prime(x)).expect("primes are unbounded")
}

fn is_prime(x: u64) -> bool {
    x >= 2 && (2..).take_while(|i| i * i <= x).all(|i| !x.is_multiple_of(i))
}

/// Values of the polynomial whose coefficients are the base-`q` digits of
/// `color`, at `0..q`.
fn poly_values(color: u64, step: LinialStep) -> Vec<u64> {
    let mut coeffs = Vec::with_capacity(step.d as usize + 1);
    let mut c = color;
    for _ in 0..=step.d {
        coeffs.push(c % step.q);
        c /= step.q;
    }
    (0..step.q).map(|x| coeffs.iter().rev().fold(0, |acc, &a| (acc * x + a) % step.q)).collect()
}

pub(crate) struct Run {
    pub power_rounds: usize,
    pub linial_steps: usize,
    pub log: Option<PhaseLog>,
}

/// Runs the breaker by message passing over `adj`, where every link has
/// latency `latency` base rounds. Processes send their color only when it
/// changed; a receiver keeps the last color heard from each neighbor.
/// `id_bound` is the id range every process knows.
pub(crate) fn run(
    adj: &[Vec<usize>],
    ids: &[u64],
    id_bound: u64,
    delta: usize,
    latency: usize,
    breaker: SymmetryBreaker,
    log: Option<(PhaseLog, bool)>,
) -> (Vec<u64>, Run) {
    let n = adj.len();
    if delta == 0 {
        let log = log.map(|(l, _)| l);
        return (vec![0; n], Run { power_rounds: 0, linial_steps: 0, log });
    }
    let mut proc = Procs::new(adj, ids, latency, log);
    let linial_steps = match breaker {
        SymmetryBreaker::LinialColeVishkin => {
            let schedule = Schedule::new(id_bound, delta);
            proc.linial_kw(&schedule);
            debug_assert_eq!(proc.round, schedule.power_rounds());
            schedule.linial.len()
        }
        SymmetryBreaker::GreedyToken => {
            proc.greedy_token(delta);
            0
        }
    };
    let colors = proc.color.clone();
    let power_rounds = proc.round;
    let log = proc.net.map(|n| {
        let mut log = n.finish();
        log.rounds = power_rounds * latency;
        log.counts.truncate(log.rounds);
        log
    });
    (colors, Run { power_rounds, linial_steps, log })
}

struct Procs<'a> {
    adj: &'a [Vec<usize>],
    latency: usize,
    color: Vec<u64>,
    /// Last color heard from each neighbor, aligned with `adj`.
    heard: Vec<Vec<u64>>,
    changed: Vec<bool>,
    round: usize,
    net: Option<Net<u64>>,
}

impl<'a> Procs<'a> {
    fn new(adj: &'a [Vec<usize>], ids: &[u64], latency: usize, log: Option<(PhaseLog, bool)>) -> Self {
        let n = adj.len();
        // Ids of neighbors are not known yet: everyone announces first.
        Procs {
            adj,
            latency,
            color: ids.to_vec(),
            heard: adj.iter().map(|a| vec![u64::MAX; a.len()]).collect(),
            changed: vec![true; n],
            round: 0,
            net: log.map(|(l, record)| Net::new(n, l, record)),
        }
    }

    /// Sends changed colors and delivers them: one power round.
    fn exchange(&mut self) {
        self.round += 1;
        let n = self.adj.len();
        let base = (self.round - 1) * self.latency + 1;
        if let Some(net) = &mut self.net {
            let need = base + self.latency - 1;
            if net.log.counts.len() < need {
                net.log.rounds = need;
                net.log.counts.resize(need, Default::default());
            }
            for v in 0..n {
                if self.changed[v] {
                    for &w in &self.adj[v] {
                        net.send(base, v, w, self.latency, self.color[v], 8);
                    }
                }
            }
            for r in base..base + self.latency {
                net.deliver(r);
            }
            net.log.set_active(base + self.latency - 1, self.changed.iter().filter(|&&c| c).count() as u64);
        }
        // Delivery by index: the log above mirrors exactly these sends.
        for v in 0..n {
            if self.changed[v] {
                for &w in &self.adj[v] {
                    let slot = self.adj[w].binary_search(&v).expect("symmetric adjacency");
                    self.heard[w][slot] = self.color[v];
                }
            }
        }
        if let Some(net) = &mut self.net {
            for v in 0..n {
                net.take(v);
            }
        }
        self.changed.iter_mut().for_each(|c| *c = false);
    }

    fn set(&mut self, v: usize, c: u64) {
        if self.color[v] != c {
            self.color[v] = c;
            self.changed[v] = true;
        }
    }

    fn linial_kw(&mut self, schedule: &Schedule) {
        for &step in &schedule.linial {
            self.exchange();
            let values: Vec<Vec<u64>> = self.color.iter().map(|&c| poly_values(c, step)).collect();
            let index: std::collections::HashMap<u64, usize> =
                self.color.iter().enumerate().map(|(v, &c)| (c, v)).collect();
            let mut next = vec![0; self.adj.len()];
            for v in 0..self.adj.len() {
                // Neighbor colors come from `heard`; `index` only finds the
                // precomputed values of a heard color.
                let x = (0..step.q as usize)
                    .find(|&x| {
                        self.heard[v].iter().all(|c| {
                            let w = index[c];
                            values[w][x] != values[v][x]
                        })
                    })
                    .expect("q exceeds Δ·d");
                next[v] = x as u64 * step.q + values[v][x];
            }
            for (v, c) in next.into_iter().enumerate() {
                self.set(v, c);
            }
        }
        let keep = schedule.delta as u64 + 1;
        let group = 2 * keep;
        let mut m = schedule.palette;
        while m > keep {
            let (g, top) = if m <= group { (m, m) } else { (group, group) };
            for t in (keep..top).rev() {
                self.exchange();
                let mut next = Vec::new();
                for v in 0..self.adj.len() {
                    let c = self.color[v];
                    if c % g != t {
                        continue;
                    }
                    let base = c - t;
                    let used: Vec<u64> = self.heard[v].iter().filter(|&&o| o / g == c / g).map(|&o| o - base).collect();
                    let s = (0..keep).find(|s| !used.contains(s)).expect("Δ + 1 choices");
                    next.push((v, base + s));
                }
                for (v, c) in next {
                    self.set(v, c);
                }
            }
            // Renumbering is local: every process applies the same map to
            // what it heard.
            let renumber = |c: u64| c / g * keep + c % g;
            for v in 0..self.adj.len() {
                self.color[v] = renumber(self.color[v]);
                for h in &mut self.heard[v] {
                    *h = renumber(*h);
                }
            }
            m = if m <= group { keep } else { m.div_ceil(group) * keep };
        }
    }

    fn greedy_token(&mut self, delta: usize) {
        let n = self.adj.len();
        let ids = self.color.clone();
        let mut done = vec![false; n];
        let mut heard_ids: Vec<Vec<u64>> = Vec::new();
        let mut left = n;
        while left > 0 {
            self.exchange();
            if heard_ids.is_empty() {
                heard_ids = self.heard.clone();
            }
            let mut next = Vec::new();
            for v in 0..n {
                if done[v] {
                    continue;
                }
                let ready = heard_ids[v].iter().zip(&self.adj[v]).all(|(&id, &w)| id > ids[v] || done[w]);
                if ready {
                    let used: Vec<u64> = self.adj[v]
                        .iter()
                        .enumerate()
                        .filter(|&(_, &w)| done[w])
                        .map(|(j, _)| self.heard[v][j])
                        .collect();
                    let c = (0..=delta as u64).find(|c| !used.contains(c)).expect("Δ + 1 choices");
                    next.push((v, c));
                }
            }
            for (v, c) in next {
                // A fresh color is always announced, even when it equals the id.
                self.color[v] = c;
                self.changed[v] = true;
                done[v] = true;
                left -= 1;
            }
        }
        // Announce the last colors.
        self.exchange();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::local::PhaseKind;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn proper_on_power(h: &Graph, k: usize, out: &SymmetryBreak) -> bool {
        let p = h.power_graph(k);
        p.validate_coloring(None, &out.coloring).is_valid() && out.colors_used <= p.max_degree() + 1
    }

    #[test]
    fn primes() {
        assert_eq!(next_prime(9), 11);
        assert_eq!(next_prime(17), 17);
        assert!(!is_prime(1) && is_prime(2) && !is_prime(91));
    }

    #[test]
    fn schedule_skips_linial_for_small_ids() {
        let s = Schedule::new(16, 2);
        assert!(s.linial.is_empty());
        assert_eq!(s.palette, 121);
        let big = Schedule::new(1 << 16, 2);
        assert_eq!(big.linial.len(), 1);
        assert_eq!(big.reduction_rounds(), s.reduction_rounds());
    }

    #[test]
    fn rings_with_shuffled_ids() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [5usize, 16, 100, 1000] {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            let ring = gen::relabel(&gen::cycle(n), &perm);
            for k in 1..=3 {
                let out = symmetry_break(&ring, k, 2).unwrap();
                assert!(proper_on_power(&ring, k, &out), "n = {n}, k = {k}");
                assert_eq!(out.rounds, out.power_rounds * k);
            }
        }
    }

    #[test]
    fn grids_and_greedy_baseline() {
        let g = gen::square_grid(12);
        let out = symmetry_break(&g, 2, 4).unwrap();
        assert!(proper_on_power(&g, 2, &out));
        let greedy = symmetry_break_with(&g, 2, 4, SymmetryBreaker::GreedyToken).unwrap();
        assert!(proper_on_power(&g, 2, &greedy));
    }

    #[test]
    fn degree_bound_is_checked() {
        let star = gen::complete_bipartite(1, 5);
        assert!(matches!(symmetry_break(&star, 1, 4), Err(SimError::DegreeBoundViolated { vertex: 0, .. })));
    }

    #[test]
    fn edgeless_needs_no_rounds() {
        let out = symmetry_break(&Graph::empty(4), 2, 0).unwrap();
        assert_eq!(out.rounds, 0);
        assert_eq!(out.colors_used, 1);
    }

    #[test]
    fn message_log_matches_rounds() {
        let ring = gen::cycle(40);
        let adj: Vec<Vec<usize>> = ring.vertices().map(|v| ring.neighbors(v).to_vec()).collect();
        let ids: Vec<u64> = (0..40).collect();
        let log = PhaseLog::new(PhaseKind::SymmetryBreak, 0, None, 0, None);
        let (_, run) = run(&adj, &ids, 40, 2, 3, SymmetryBreaker::LinialColeVishkin, Some((log, true)));
        let log = run.log.unwrap();
        assert_eq!(log.rounds, run.power_rounds * 3);
        let sent: u64 = log.counts.iter().map(|c| c.sent).sum();
        assert_eq!(sent as usize, log.messages.len());
        assert!(log.messages.iter().all(|m| m.delivered - m.sent + 1 == 3));
    }
}
