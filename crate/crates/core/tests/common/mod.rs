//! Exhaustive f-choosability for graphs of at most six vertices, written
//! without any of the library's solver code.
//!
//! A graph is not f-choosable iff some induced subgraph `G[S]` has a bad
//! assignment whose lists use fewer than `|S|` colors. (Take a bad `L` on
//! `G`. If `L` has no system of distinct representatives, a maximum matching
//! of vertices to colors leaves a set `S`, reachable by alternating paths from
//! unmatched vertices, with `|L(S)| < |S|`; every vertex outside `S` is
//! matched to a color outside `L(S)`, so a coloring of `G[S]` would extend.)
//! So the search recurses on `G − v` and only enumerates palettes of
//! `n − 1` colors at the top.

#![allow(dead_code)]

use std::collections::HashMap;

pub const MAX_N: usize = 6;

/// Adjacency as bitmasks plus a demand per vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Small {
    pub n: usize,
    pub adj: [u8; MAX_N],
    pub f: [u8; MAX_N],
}

impl Small {
    pub fn from_edges(n: usize, edges: &[(usize, usize)], f: &[u8]) -> Self {
        let mut adj = [0u8; MAX_N];
        for &(u, v) in edges {
            adj[u] |= 1 << v;
            adj[v] |= 1 << u;
        }
        let mut ff = [0u8; MAX_N];
        ff[..n].copy_from_slice(&f[..n]);
        Small { n, adj, f: ff }
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in u + 1..self.n {
                if self.adj[u] >> v & 1 == 1 {
                    out.push((u, v));
                }
            }
        }
        out
    }

    fn degree(&self, v: usize) -> u8 {
        self.adj[v].count_ones() as u8
    }

    fn without(&self, v: usize) -> Small {
        let mut out = Small { n: self.n - 1, adj: [0; MAX_N], f: [0; MAX_N] };
        let keep: Vec<usize> = (0..self.n).filter(|&u| u != v).collect();
        for (i, &a) in keep.iter().enumerate() {
            out.f[i] = self.f[a];
            for (j, &b) in keep.iter().enumerate() {
                if self.adj[a] >> b & 1 == 1 {
                    out.adj[i] |= 1 << j;
                }
            }
        }
        out
    }

    fn edge_bits(&self, perm: &[usize]) -> u16 {
        let mut bits = 0u16;
        let mut k = 0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.adj[perm[i]] >> perm[j] & 1 == 1 {
                    bits |= 1 << k;
                }
                k += 1;
            }
        }
        bits
    }

    /// Same key for isomorphic instances.
    pub fn canonical(&self) -> (usize, [u8; MAX_N], u16) {
        let inv = |v: usize| (std::cmp::Reverse(self.degree(v)), self.f[v]);
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by_key(|&v| inv(v));
        let mut f = [0u8; MAX_N];
        for (i, &v) in order.iter().enumerate() {
            f[i] = self.f[v];
        }
        let mut best = u16::MAX;
        permute_blocks(&mut order, 0, &|v| inv(v), &mut |perm| best = best.min(self.edge_bits(perm)));
        (self.n, f, best)
    }
}

/// Visits every reordering of `order` that only swaps entries with equal keys.
fn permute_blocks<K: Eq>(order: &mut [usize], start: usize, key: &dyn Fn(usize) -> K, visit: &mut dyn FnMut(&[usize])) {
    if start == order.len() {
        visit(order);
        return;
    }
    let mut end = start;
    while end < order.len() && key(order[end]) == key(order[start]) {
        end += 1;
    }
    permute_range(order, start, end, key, visit);
}

fn permute_range<K: Eq>(
    order: &mut [usize],
    i: usize,
    end: usize,
    key: &dyn Fn(usize) -> K,
    visit: &mut dyn FnMut(&[usize]),
) {
    if i == end {
        permute_blocks(order, end, key, visit);
        return;
    }
    for j in i..end {
        order.swap(i, j);
        permute_range(order, i + 1, end, key, visit);
        order.swap(i, j);
    }
}

/// Is there an assignment of `f(v)`-lists from `palette` colors that admits
/// no proper coloring? Colors not yet used by earlier lists are
/// interchangeable, so each list takes its new colors in order.
pub fn bad_assignment_exists(g: &Small, palette: usize) -> bool {
    assert!(palette <= 16, "colors are packed in 4 bits");
    if (0..g.n).any(|v| g.f[v] as usize > palette) {
        return false;
    }
    if (0..g.n).any(|v| g.f[v] == 0) {
        return true;
    }
    let start = vec![0u32];
    search(g, palette, 0, 0, &start)
}

/// `colorings` holds the proper colorings of vertices `0..v`, 4 bits each.
fn search(g: &Small, palette: usize, v: usize, used: usize, colorings: &[u32]) -> bool {
    if colorings.is_empty() {
        return true;
    }
    if v == g.n {
        return false;
    }
    let k = g.f[v] as usize;
    for fresh in 0..=k.min(palette - used) {
        let old = k - fresh;
        if old > used {
            continue;
        }
        let new_mask: u32 = ((1u32 << fresh) - 1) << used;
        let mut found = false;
        for_subsets(used, old, &mut |old_mask| {
            if found {
                return;
            }
            let list = old_mask | new_mask;
            let next: Vec<u32> = colorings
                .iter()
                .flat_map(|&c| {
                    (0..palette as u32).filter(move |&col| list >> col & 1 == 1).filter_map(move |col| {
                        let clash = (0..v).any(|u| g.adj[v] >> u & 1 == 1 && (c >> (4 * u) & 15) == col);
                        (!clash).then_some(c | col << (4 * v))
                    })
                })
                .collect();
            if search(g, palette, v + 1, used + fresh, &next) {
                found = true;
            }
        });
        if found {
            return true;
        }
    }
    false
}

fn for_subsets(n: usize, k: usize, visit: &mut dyn FnMut(u32)) {
    for mask in 0u32..1 << n {
        if mask.count_ones() as usize == k {
            visit(mask);
        }
    }
}

/// The definition checked directly: palettes up to `Σ f(v)` colors.
pub fn choosable_naive(g: &Small) -> bool {
    let total: usize = g.f[..g.n].iter().map(|&x| x as usize).sum();
    !bad_assignment_exists(g, total.max(1))
}

/// Memoized exact oracle.
#[derive(Default)]
pub struct BruteForce {
    memo: HashMap<(usize, [u8; MAX_N], u16), bool>,
}

impl BruteForce {
    pub fn choosable(&mut self, g: &Small) -> bool {
        if g.n == 0 {
            return true;
        }
        if (0..g.n).any(|v| g.f[v] == 0) {
            return false;
        }
        // A vertex with more colors than neighbors can always go last.
        if let Some(v) = (0..g.n).find(|&v| g.f[v] > g.degree(v)) {
            return self.choosable(&g.without(v));
        }
        let key = g.canonical();
        if let Some(&known) = self.memo.get(&key) {
            return known;
        }
        let result = (0..g.n).all(|v| self.choosable(&g.without(v))) && !bad_assignment_exists(g, g.n - 1);
        self.memo.insert(key, result);
        result
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }
}

/// One graph per isomorphism class on `n` vertices.
pub fn graphs_up_to_iso(n: usize) -> Vec<Small> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut seen = HashMap::new();
    for bits in 0u32..1 << pairs.len() {
        let edges: Vec<(usize, usize)> =
            pairs.iter().enumerate().filter(|(k, _)| bits >> k & 1 == 1).map(|(_, &e)| e).collect();
        let g = Small::from_edges(n, &edges, &[0; MAX_N]);
        seen.entry(g.canonical()).or_insert(g);
    }
    let mut out: Vec<Small> = seen.into_values().collect();
    out.sort_by_key(|g| g.canonical());
    out
}

/// Every demand vector in `0..=max` on `n` vertices.
pub fn demands(n: usize, max: u8) -> impl Iterator<Item = [u8; MAX_N]> {
    let base = max as usize + 1;
    (0..base.pow(n as u32)).map(move |mut code| {
        let mut f = [0u8; MAX_N];
        for slot in f.iter_mut().take(n) {
            *slot = (code % base) as u8;
            code /= base;
        }
        f
    })
}
