//! Exact f-choosability for small graphs.
//!
//! Pipeline: zero-demand shortcut, a check of the nested lists
//! `{0, .., f(v)-1}`, degeneracy reduction (a vertex whose
//! demand exceeds its degree can always be colored last), split into
//! components, then per component an Alon–Tarsi certificate and, failing
//! that, an exhaustive search over list assignments up to renaming colors.
//!
//! The exhaustive search describes an assignment by the multiset of color
//! classes `{v : c ∈ L(v)}`. Before searching a component it checks that
//! every vertex-deleted subgraph is choosable. A color held by `v` and by
//! none of `v`'s neighbors can then be given to `v` for free, so only
//! classes inducing subgraphs without isolated vertices need to be tried.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use super::backtrack::small_colorable;
use super::{ChoosabilityConfig, Method, Verdict};
use crate::graph::Color;

/// A small graph in bitmask form with its demand.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct Instance {
    pub adj: Vec<u32>,
    pub f: Vec<u32>,
}

#[derive(Debug, Clone)]
pub(crate) struct Outcome {
    pub verdict: Verdict,
    pub method: Method,
    /// Failing lists (local ids), only for `NotDeletable`.
    pub witness: Option<Vec<Vec<Color>>>,
    pub checked: u64,
}

impl Outcome {
    fn yes(method: Method, checked: u64) -> Self {
        Outcome { verdict: Verdict::Deletable, method, witness: None, checked }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Key {
    n: usize,
    f: Vec<u32>,
    edges: u128,
}

pub(crate) struct Solver {
    pub config: ChoosabilityConfig,
    memo: RwLock<HashMap<Key, Arc<Outcome>>>,
    /// Labeled instances seen before; skips canonical labeling for repeats
    /// such as translated copies in lattices.
    exact: RwLock<HashMap<Instance, Arc<Outcome>>>,
    /// Verdicts alone for raw instances, the hot path of pocket searches.
    verdicts: RwLock<HashMap<Instance, (Verdict, Method)>>,
}

const EXACT_CACHE_CAP: usize = 1 << 20;

impl Solver {
    pub fn new(config: ChoosabilityConfig) -> Self {
        Solver {
            config,
            memo: RwLock::new(HashMap::new()),
            exact: RwLock::new(HashMap::new()),
            verdicts: RwLock::new(HashMap::new()),
        }
    }

    pub fn verdict(&self, inst: Instance) -> (Verdict, Method) {
        if let Some(&hit) = self.verdicts.read().unwrap().get(&inst) {
            return hit;
        }
        let out = self.solve(&inst);
        let mut verdicts = self.verdicts.write().unwrap();
        if verdicts.len() < EXACT_CACHE_CAP {
            verdicts.insert(inst, (out.verdict, out.method));
        }
        (out.verdict, out.method)
    }

    pub fn memo_len(&self) -> usize {
        self.memo.read().unwrap().len()
    }

    pub fn solve(&self, inst: &Instance) -> Outcome {
        let n = inst.adj.len();
        if n == 0 {
            return Outcome::yes(Method::Trivial, 0);
        }
        if let Some(z) = inst.f.iter().position(|&x| x == 0) {
            let mut lists = filler_lists(&inst.f);
            lists[z].clear();
            return Outcome {
                verdict: Verdict::NotDeletable,
                method: Method::ZeroDemand,
                witness: Some(lists),
                checked: 0,
            };
        }

        if inst.f.iter().all(|&k| k < 64) {
            let nested: Vec<u64> = inst.f.iter().map(|&k| (1u64 << k) - 1).collect();
            if !small_colorable(&inst.adj, &nested) {
                return Outcome {
                    verdict: Verdict::NotDeletable,
                    method: Method::NestedLists,
                    witness: Some(filler_lists(&inst.f)),
                    checked: 1,
                };
            }
        }

        // Degeneracy reduction.
        let mut alive: u32 = full_mask(n);
        loop {
            let mut changed = false;
            for v in 0..n {
                if alive >> v & 1 == 1 && inst.f[v] > (inst.adj[v] & alive).count_ones() {
                    alive &= !(1 << v);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if alive == 0 {
            return Outcome::yes(Method::Reduction, 0);
        }

        let mut checked = 0;
        let mut method = Method::Reduction;
        for comp in components(&inst.adj, alive) {
            let (sub, ids) = restrict(inst, comp);
            let out = self.solve_connected(&sub);
            checked += out.checked;
            match out.verdict {
                Verdict::Deletable => method = method.max(out.method),
                _ => {
                    let witness = out.witness.as_ref().map(|w| {
                        let mut lists = filler_lists(&inst.f);
                        for (i, &v) in ids.iter().enumerate() {
                            lists[v] = w[i].clone();
                        }
                        lists
                    });
                    return Outcome { verdict: out.verdict, method: out.method, witness, checked };
                }
            }
        }
        Outcome::yes(method, checked)
    }

    fn solve_connected(&self, inst: &Instance) -> Outcome {
        if let Some(hit) = self.exact.read().unwrap().get(inst) {
            return (**hit).clone();
        }
        let (key, perm) = canonical(inst, self.config.canon_permutation_cap);
        let cached = self.memo.read().unwrap().get(&key).map(|hit| unpermute(hit, &perm));
        let out = match cached {
            Some(out) => out,
            None => {
                let out = self.decide_connected(inst);
                let stored = permute(&out, &perm);
                self.memo.write().unwrap().entry(key).or_insert_with(|| Arc::new(stored));
                out
            }
        };
        let mut exact = self.exact.write().unwrap();
        if exact.len() < EXACT_CACHE_CAP {
            exact.entry(inst.clone()).or_insert_with(|| Arc::new(out.clone()));
        }
        out
    }

    fn decide_connected(&self, inst: &Instance) -> Outcome {
        let n = inst.adj.len();
        if alon_tarsi(inst, self.config.max_polynomial_terms) {
            return Outcome::yes(Method::AlonTarsi, 0);
        }
        // Every vertex-deleted subgraph must be choosable.
        let mut checked = 0;
        for v in 0..n {
            let keep: Vec<usize> = (0..n).filter(|&u| u != v).collect();
            let (sub, ids) = restrict(inst, keep.iter().fold(0, |m, &u| m | 1 << u));
            let out = self.solve(&sub);
            checked += out.checked;
            if out.verdict != Verdict::Deletable {
                let witness = out.witness.map(|w| {
                    let mut lists = filler_lists(&inst.f);
                    let fresh = w.iter().flatten().copied().max().map_or(0, |c| c + 1);
                    lists[v] = (fresh..fresh + inst.f[v]).collect();
                    for (i, &u) in ids.iter().enumerate() {
                        lists[u] = w[i].clone();
                    }
                    lists
                });
                return Outcome { verdict: out.verdict, method: out.method, witness, checked };
            }
        }
        let mut out = enumerate(inst, self.config.max_assignments);
        out.checked += checked;
        out
    }
}

fn full_mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// Lists `{0, .., f(v)-1}` used for vertices that play no part in a witness.
fn filler_lists(f: &[u32]) -> Vec<Vec<Color>> {
    f.iter().map(|&k| (0..k).collect()).collect()
}

fn components(adj: &[u32], alive: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut left = alive;
    while left != 0 {
        let mut comp = 1u32 << left.trailing_zeros();
        loop {
            let mut grown = comp;
            let mut it = comp;
            while it != 0 {
                let v = it.trailing_zeros() as usize;
                it &= it - 1;
                grown |= adj[v] & alive;
            }
            if grown == comp {
                break;
            }
            comp = grown;
        }
        out.push(comp);
        left &= !comp;
    }
    out
}

/// Induced sub-instance on `mask`, with the original ids in order.
fn restrict(inst: &Instance, mask: u32) -> (Instance, Vec<usize>) {
    let ids: Vec<usize> = (0..inst.adj.len()).filter(|&v| mask >> v & 1 == 1).collect();
    let mut pos = [usize::MAX; 32];
    for (i, &v) in ids.iter().enumerate() {
        pos[v] = i;
    }
    let adj = ids
        .iter()
        .map(|&v| {
            let mut m = 0u32;
            let mut it = inst.adj[v] & mask;
            while it != 0 {
                let w = it.trailing_zeros() as usize;
                it &= it - 1;
                m |= 1 << pos[w];
            }
            m
        })
        .collect();
    let f = ids.iter().map(|&v| inst.f[v]).collect();
    (Instance { adj, f }, ids)
}

/// Alon–Tarsi test: some monomial `Π x_v^{t_v}` with `t_v < f(v)` has a
/// nonzero coefficient in `Π_{uv ∈ E} (x_u − x_v)`. Gives up (false) when
/// the expansion exceeds `max_terms`.
pub(crate) fn alon_tarsi(inst: &Instance, max_terms: usize) -> bool {
    let n = inst.adj.len();
    if n > 16 {
        return false;
    }
    let cap: Vec<u64> = inst.f.iter().map(|&k| u64::from(k.saturating_sub(1)).min(15)).collect();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if inst.adj[u] >> v & 1 == 1 {
                edges.push((u, v));
            }
        }
    }
    let total_cap: u64 = cap.iter().sum();
    if (edges.len() as u64) > total_cap {
        return false;
    }
    // Close off low vertices first so their exponents saturate early.
    edges.sort_by_key(|&(u, v)| (v, u));

    let exp = |e: u64, v: usize| (e >> (4 * v)) & 0xf;
    let mut poly: HashMap<u64, i64> = HashMap::from([(0, 1)]);
    for (done, &(u, v)) in edges.iter().enumerate() {
        let remaining = (edges.len() - done - 1) as u64;
        let mut next: HashMap<u64, i64> = HashMap::with_capacity(poly.len() * 2);
        for (&e, &c) in &poly {
            let used: u64 = (0..n).map(|w| exp(e, w)).sum();
            // One more edge now plus `remaining` later must fit under the caps.
            if total_cap - used < remaining + 1 {
                continue;
            }
            if exp(e, u) < cap[u] {
                *next.entry(e + (1 << (4 * u))).or_insert(0) += c;
            }
            if exp(e, v) < cap[v] {
                *next.entry(e + (1 << (4 * v))).or_insert(0) -= c;
            }
        }
        next.retain(|_, c| *c != 0);
        if next.is_empty() || next.len() > max_terms {
            return false;
        }
        poly = next;
    }
    !poly.is_empty()
}

/// Exhaustive search over color-class multisets. Assumes every
/// vertex-deleted subgraph is choosable.
fn enumerate(inst: &Instance, max_assignments: u64) -> Outcome {
    let n = inst.adj.len();
    // Color classes without isolated vertices, grouped by least member.
    let mut by_min: Vec<Vec<u32>> = vec![Vec::new(); n];
    for s in 1..=full_mask(n) {
        if s.count_ones() < 2 {
            continue;
        }
        let mut it = s;
        let mut ok = true;
        while it != 0 {
            let v = it.trailing_zeros() as usize;
            it &= it - 1;
            if inst.adj[v] & s == 0 {
                ok = false;
                break;
            }
        }
        if ok {
            by_min[s.trailing_zeros() as usize].push(s);
        }
    }

    struct Ctx<'a> {
        inst: &'a Instance,
        by_min: Vec<Vec<u32>>,
        residual: Vec<u32>,
        chosen: Vec<u32>,
        checked: u64,
        limit: u64,
        witness: Option<Vec<Vec<Color>>>,
        exhausted_budget: bool,
    }

    impl Ctx<'_> {
        /// Returns false to stop the search (witness found or budget hit).
        fn go(&mut self, v: usize, from: usize) -> bool {
            let n = self.residual.len();
            let mut v = v;
            let mut from = from;
            while v < n && self.residual[v] == 0 {
                v += 1;
                from = 0;
            }
            if v == n {
                return self.check_leaf();
            }
            for i in from..self.by_min[v].len() {
                let s = self.by_min[v][i];
                let mut it = s;
                let mut fits = true;
                while it != 0 {
                    let w = it.trailing_zeros() as usize;
                    it &= it - 1;
                    if self.residual[w] == 0 {
                        fits = false;
                        break;
                    }
                }
                if !fits {
                    continue;
                }
                self.apply(s, false);
                self.chosen.push(s);
                let cont = self.go(v, i);
                self.chosen.pop();
                self.apply(s, true);
                if !cont {
                    return false;
                }
            }
            true
        }

        fn apply(&mut self, s: u32, undo: bool) {
            let mut it = s;
            while it != 0 {
                let w = it.trailing_zeros() as usize;
                it &= it - 1;
                if undo {
                    self.residual[w] += 1;
                } else {
                    self.residual[w] -= 1;
                }
            }
        }

        fn check_leaf(&mut self) -> bool {
            if self.checked >= self.limit {
                self.exhausted_budget = true;
                return false;
            }
            self.checked += 1;
            let n = self.residual.len();
            let mut masks = vec![0u64; n];
            for (c, &s) in self.chosen.iter().enumerate() {
                for (v, m) in masks.iter_mut().enumerate() {
                    if s >> v & 1 == 1 {
                        *m |= 1 << c;
                    }
                }
            }
            if small_colorable(&self.inst.adj, &masks) {
                return true;
            }
            let lists = masks.iter().map(|&m| (0..64).filter(|&c| m >> c & 1 == 1).collect()).collect();
            self.witness = Some(lists);
            false
        }
    }

    if inst.f.iter().sum::<u32>() > 2 * 64 {
        return Outcome { verdict: Verdict::Inconclusive, method: Method::Enumeration, witness: None, checked: 0 };
    }
    let mut ctx = Ctx {
        inst,
        by_min,
        residual: inst.f.clone(),
        chosen: Vec::new(),
        checked: 0,
        limit: max_assignments,
        witness: None,
        exhausted_budget: false,
    };
    ctx.go(0, 0);
    let verdict = if ctx.witness.is_some() {
        Verdict::NotDeletable
    } else if ctx.exhausted_budget {
        Verdict::Inconclusive
    } else {
        Verdict::Deletable
    };
    Outcome { verdict, method: Method::Enumeration, witness: ctx.witness, checked: ctx.checked }
}

/// Canonical key of a connected instance plus `perm[v]` = canonical position
/// of `v`. Color refinement orders the vertices; ties are broken by trying
/// every order within cells while the count stays under `cap`, otherwise by
/// id (still a sound key, just not canonical).
fn canonical(inst: &Instance, cap: usize) -> (Key, Vec<usize>) {
    let n = inst.adj.len();
    let mut class: Vec<u64> = (0..n).map(|v| u64::from(inst.f[v]) << 8 | u64::from(inst.adj[v].count_ones())).collect();
    for _ in 0..n {
        let sigs: Vec<(u64, Vec<u64>)> = (0..n)
            .map(|v| {
                let mut ns: Vec<u64> = (0..n).filter(|&w| inst.adj[v] >> w & 1 == 1).map(|w| class[w]).collect();
                ns.sort_unstable();
                (class[v], ns)
            })
            .collect();
        let mut distinct = sigs.clone();
        distinct.sort();
        distinct.dedup();
        let next: Vec<u64> = sigs.iter().map(|s| distinct.binary_search(s).unwrap() as u64).collect();
        let before = count_distinct(&class);
        class = next;
        if count_distinct(&class) == before {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (class[v], v));
    let mut cells: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=n {
        if i == n || class[order[i]] != class[order[start]] {
            cells.push((start, i));
            start = i;
        }
    }
    let mut total: usize = 1;
    for &(a, b) in &cells {
        for k in 1..=(b - a) {
            total = total.saturating_mul(k);
        }
    }

    let encode = |order: &[usize]| -> u128 {
        let mut pos = [0usize; 32];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let mut bits = 0u128;
        for u in 0..n {
            for v in u + 1..n {
                if inst.adj[u] >> v & 1 == 1 {
                    let (a, b) = (pos[u].min(pos[v]), pos[u].max(pos[v]));
                    bits |= 1 << pair_index(a, b, n);
                }
            }
        }
        bits
    };

    let mut best_order = order.clone();
    let mut best = encode(&order);
    if total > 1 && total <= cap {
        let mut current = order.clone();
        permute_cells(&mut current, &cells, 0, &mut |o| {
            let e = encode(o);
            if e < best {
                best = e;
                best_order = o.to_vec();
            }
        });
    }
    let mut perm = vec![0; n];
    for (i, &v) in best_order.iter().enumerate() {
        perm[v] = i;
    }
    let f = best_order.iter().map(|&v| inst.f[v]).collect();
    (Key { n, f, edges: best }, perm)
}

fn count_distinct(xs: &[u64]) -> usize {
    let mut v = xs.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

fn pair_index(a: usize, b: usize, n: usize) -> usize {
    // Row-major index of (a, b), a < b, in the strict upper triangle.
    a * (2 * n - a - 1) / 2 + (b - a - 1)
}

fn permute_cells(order: &mut Vec<usize>, cells: &[(usize, usize)], cell: usize, visit: &mut dyn FnMut(&[usize])) {
    if cell == cells.len() {
        visit(order);
        return;
    }
    let (a, b) = cells[cell];
    heap_permute(order, a, b - a, &mut |o| {
        let mut o = o.to_vec();
        permute_cells(&mut o, cells, cell + 1, visit);
    });
}

fn heap_permute(order: &mut Vec<usize>, a: usize, k: usize, visit: &mut dyn FnMut(&mut Vec<usize>)) {
    if k <= 1 {
        visit(order);
        return;
    }
    for i in 0..k - 1 {
        heap_permute(order, a, k - 1, visit);
        if k.is_multiple_of(2) {
            order.swap(a + i, a + k - 1);
        } else {
            order.swap(a, a + k - 1);
        }
    }
    heap_permute(order, a, k - 1, visit);
}

/// Outcome in canonical labels (stored in the memo).
fn permute(out: &Outcome, perm: &[usize]) -> Outcome {
    let witness = out.witness.as_ref().map(|w| {
        let mut lists = vec![Vec::new(); w.len()];
        for (v, l) in w.iter().enumerate() {
            lists[perm[v]] = l.clone();
        }
        lists
    });
    Outcome { witness, ..out.clone() }
}

fn unpermute(stored: &Outcome, perm: &[usize]) -> Outcome {
    let witness = stored.witness.as_ref().map(|w| perm.iter().map(|&p| w[p].clone()).collect());
    Outcome { witness, ..stored.clone() }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(n: usize, edges: &[(usize, usize)], f: Vec<u32>) -> Instance {
        let mut adj = vec![0u32; n];
        for &(u, v) in edges {
            adj[u] |= 1 << v;
            adj[v] |= 1 << u;
        }
        Instance { adj, f }
    }

    fn cycle(n: usize) -> Vec<(usize, usize)> {
        (0..n).map(|i| (i, (i + 1) % n)).collect()
    }

    #[test]
    fn alon_tarsi_examples() {
        // Even cycles have an orientation with outdegree 1 everywhere.
        assert!(alon_tarsi(&inst(4, &cycle(4), vec![2; 4]), 1 << 20));
        assert!(!alon_tarsi(&inst(5, &cycle(5), vec![2; 5]), 1 << 20));
        let k4: Vec<_> = (0..4).flat_map(|a| (a + 1..4).map(move |b| (a, b))).collect();
        assert!(alon_tarsi(&inst(4, &k4, vec![4; 4]), 1 << 20));
        assert!(!alon_tarsi(&inst(4, &k4, vec![3; 4]), 1 << 20));
    }

    #[test]
    fn canonical_key_ignores_labels() {
        let a = inst(4, &[(0, 1), (1, 2), (2, 3)], vec![1, 2, 2, 1]);
        let b = inst(4, &[(3, 2), (2, 0), (0, 1)], vec![2, 1, 2, 1]);
        let c = inst(4, &[(0, 1), (1, 2), (2, 3)], vec![2, 1, 2, 1]);
        let (ka, _) = canonical(&a, 5040);
        let (kb, _) = canonical(&b, 5040);
        let (kc, _) = canonical(&c, 5040);
        assert_eq!(ka, kb);
        assert_ne!(ka, kc);
    }

    #[test]
    fn pair_index_is_dense() {
        let n = 6;
        let mut seen = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                seen.push(pair_index(a, b, n));
            }
        }
        assert_eq!(seen, (0..n * (n - 1) / 2).collect::<Vec<_>>());
    }

    #[test]
    fn theta_graph_needs_enumeration() {
        // K_{2,4} is not 2-choosable while K_{2,3} is.
        let k23: Vec<_> = (0..2).flat_map(|a| (2..5).map(move |b| (a, b))).collect();
        let solver = Solver::new(ChoosabilityConfig::default());
        assert_eq!(solver.solve(&inst(5, &k23, vec![2; 5])).verdict, Verdict::Deletable);
        let edges: Vec<_> = (0..2).flat_map(|a| (2..6).map(move |b| (a, b))).collect();
        let out = solver.solve(&inst(6, &edges, vec![2; 6]));
        assert_eq!(out.verdict, Verdict::NotDeletable);
        let w = out.witness.unwrap();
        let masks: Vec<u64> = w.iter().map(|l| l.iter().fold(0, |m, &c| m | 1 << c)).collect();
        assert!(!small_colorable(&inst(6, &edges, vec![2; 6]).adj, &masks));
    }
}
