use crate::graph::{Coloring, Graph, Vertex};
use crate::lists::ListAssignment;

/// Exhaustive list coloring extending `fixed`.
///
/// Branches on the uncolored vertex with the fewest remaining colors (ties
/// to the smaller id) with forward checking. Iterative, so deep searches on
/// large graphs do not exhaust the stack.
pub fn backtrack_color(graph: &Graph, lists: &ListAssignment, fixed: &Coloring) -> Option<Coloring> {
    let n = graph.n();
    let mut search = Search::new(graph, lists);
    for v in 0..n {
        if let Some(c) = fixed.get(v) {
            if !search.assign(v, c) {
                return None;
            }
        }
    }

    // Each frame: vertex, its candidate colors, next candidate, undo mark.
    let mut frames: Vec<(Vertex, Vec<u32>, usize, usize)> = Vec::new();
    let mut descend = true;
    loop {
        if descend {
            let Some(v) = search.pick() else {
                return Some(search.coloring());
            };
            let candidates = search.available(v);
            frames.push((v, candidates, 0, search.undo.len()));
        }
        let frame = frames.last_mut()?;
        let (v, ref candidates, ref mut next, mark) = *frame;
        search.rollback(mark, v);
        if *next >= candidates.len() {
            frames.pop();
            descend = false;
            continue;
        }
        let c = candidates[*next];
        *next += 1;
        descend = search.assign(v, c);
    }
}

struct Search<'a> {
    graph: &'a Graph,
    lists: &'a [Vec<u32>],
    color: Vec<Option<u32>>,
    /// Per vertex and list slot: number of colored neighbors using that color.
    block: Vec<Vec<u32>>,
    avail: Vec<usize>,
    /// (vertex, slot) increments to undo.
    undo: Vec<(Vertex, usize)>,
}

impl<'a> Search<'a> {
    fn new(graph: &'a Graph, lists: &'a ListAssignment) -> Self {
        let lists = lists.lists();
        Search {
            graph,
            lists,
            color: vec![None; graph.n()],
            block: lists.iter().map(|l| vec![0; l.len()]).collect(),
            avail: lists.iter().map(Vec::len).collect(),
            undo: Vec::new(),
        }
    }

    fn slot(&self, v: Vertex, c: u32) -> Option<usize> {
        self.lists[v].binary_search(&c).ok()
    }

    /// Colors `v` with `c`; false on a conflict or a wiped-out neighbor.
    /// Partial effects stay on the undo log either way.
    fn assign(&mut self, v: Vertex, c: u32) -> bool {
        let Some(s) = self.slot(v, c) else {
            return false;
        };
        if self.block[v][s] > 0 {
            return false;
        }
        self.color[v] = Some(c);
        let mut ok = true;
        for &w in self.graph.neighbors(v) {
            if self.color[w] == Some(c) {
                ok = false;
            }
            if let Some(t) = self.slot(w, c) {
                self.block[w][t] += 1;
                self.undo.push((w, t));
                if self.block[w][t] == 1 {
                    self.avail[w] -= 1;
                    if self.avail[w] == 0 && self.color[w].is_none() {
                        ok = false;
                    }
                }
            }
        }
        ok
    }

    fn rollback(&mut self, mark: usize, v: Vertex) {
        while self.undo.len() > mark {
            let (w, t) = self.undo.pop().unwrap();
            self.block[w][t] -= 1;
            if self.block[w][t] == 0 {
                self.avail[w] += 1;
            }
        }
        self.color[v] = None;
    }

    fn pick(&self) -> Option<Vertex> {
        (0..self.graph.n()).filter(|&v| self.color[v].is_none()).min_by_key(|&v| (self.avail[v], v))
    }

    fn available(&self, v: Vertex) -> Vec<u32> {
        self.lists[v].iter().zip(&self.block[v]).filter(|&(_, &b)| b == 0).map(|(&c, _)| c).collect()
    }

    fn coloring(&self) -> Coloring {
        Coloring::from_colors(self.color.clone())
    }
}

/// Colorability of a graph with at most 32 vertices given as adjacency
/// bitmasks and color lists as 64-bit masks.
pub(crate) fn small_colorable(adj: &[u32], lists: &[u64]) -> bool {
    fn go(adj: &[u32], lists: &mut [u64], uncolored: u32) -> bool {
        if uncolored == 0 {
            return true;
        }
        let mut best = usize::MAX;
        let mut best_count = u32::MAX;
        let mut rest = uncolored;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let k = lists[v].count_ones();
            if k < best_count {
                best_count = k;
                best = v;
            }
        }
        if best_count == 0 {
            return false;
        }
        let v = best;
        let remaining = uncolored & !(1 << v);
        let mut options = lists[v];
        while options != 0 {
            let bit = options & options.wrapping_neg();
            options &= options - 1;
            let mut touched = 0u32;
            let mut nb = adj[v] & remaining;
            while nb != 0 {
                let w = nb.trailing_zeros() as usize;
                nb &= nb - 1;
                if lists[w] & bit != 0 {
                    lists[w] &= !bit;
                    touched |= 1 << w;
                }
            }
            if go(adj, lists, remaining) {
                return true;
            }
            let mut t = touched;
            while t != 0 {
                let w = t.trailing_zeros() as usize;
                t &= t - 1;
                lists[w] |= bit;
            }
        }
        false
    }
    let mut lists = lists.to_vec();
    let all = if adj.len() == 32 { u32::MAX } else { (1u32 << adj.len()) - 1 };
    go(adj, &mut lists, all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn brute_force(graph: &Graph, lists: &ListAssignment) -> bool {
        let n = graph.n();
        let mut idx = vec![0usize; n];
        if lists.lists().iter().any(Vec::is_empty) {
            return false;
        }
        loop {
            let ok = graph.edges().all(|(u, v)| lists.list(u)[idx[u]] != lists.list(v)[idx[v]]);
            if ok {
                return true;
            }
            let mut i = 0;
            loop {
                if i == n {
                    return false;
                }
                idx[i] += 1;
                if idx[i] < lists.list(i).len() {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn even_and_odd_cycles_with_two_lists() {
        let c4 = gen::cycle(4);
        let l = ListAssignment::uniform(4, &[1, 2], 4);
        let col = backtrack_color(&c4, &l, &Coloring::new(4)).unwrap();
        assert!(c4.validate_coloring(Some(&l), &col).is_valid());
        let c5 = gen::cycle(5);
        let l = ListAssignment::uniform(5, &[1, 2], 4);
        assert!(backtrack_color(&c5, &l, &Coloring::new(5)).is_none());
    }

    #[test]
    fn single_vertex() {
        let g = Graph::empty(1);
        let l = ListAssignment::from_lists(vec![vec![5]], 3);
        assert_eq!(backtrack_color(&g, &l, &Coloring::new(1)).unwrap().get(0), Some(5));
    }

    #[test]
    fn respects_fixed_colors() {
        let p = gen::path(3);
        let l = ListAssignment::uniform(3, &[1, 2], 3);
        let mut fixed = Coloring::new(3);
        fixed.set(1, 1);
        let col = backtrack_color(&p, &l, &fixed).unwrap();
        assert_eq!(col.as_slice(), &[Some(2), Some(1), Some(2)]);
        fixed.set(0, 1);
        assert!(backtrack_color(&p, &l, &fixed).is_none());
    }

    #[test]
    fn large_grid_does_not_overflow() {
        let g = gen::square_grid(60);
        let l = ListAssignment::generate(g.n(), 4, Default::default(), 3);
        let col = backtrack_color(&g, &l, &Coloring::new(g.n())).unwrap();
        assert!(g.validate_coloring(Some(&l), &col).is_valid());
    }

    fn small_graph() -> impl Strategy<Value = Graph> {
        (2usize..=7, any::<u64>()).prop_map(|(n, bits)| {
            let mut edges = Vec::new();
            let mut k = 0;
            for a in 0..n {
                for b in a + 1..n {
                    if bits >> (k % 64) & 1 == 1 {
                        edges.push((a, b));
                    }
                    k += 1;
                }
            }
            Graph::from_edges(n, edges).unwrap()
        })
    }

    proptest! {
        #[test]
        fn agrees_with_product_enumeration(g in small_graph(), seed in any::<u64>(), k in 1usize..=3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sizes = vec![k; g.n()];
            let l = ListAssignment::random_with_sizes(&sizes, k + 2, &mut rng);
            let found = backtrack_color(&g, &l, &Coloring::new(g.n()));
            prop_assert_eq!(found.is_some(), brute_force(&g, &l));
            if let Some(c) = found {
                prop_assert!(g.validate_coloring(Some(&l), &c).is_valid());
            }
            let adj: Vec<u32> = g.vertices()
                .map(|v| g.neighbors(v).iter().fold(0, |m, &w| m | 1 << w))
                .collect();
            let masks: Vec<u64> = l.lists().iter()
                .map(|s| s.iter().fold(0, |m, &c| m | 1 << c))
                .collect();
            prop_assert_eq!(small_colorable(&adj, &masks), brute_force(&g, &l));
        }
    }
}
