use std::collections::VecDeque;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::graph::{Graph, Vertex, VertexSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Separator {
    pub a: VertexSet,
    pub s: VertexSet,
    pub b: VertexSet,
    /// `|S| / sqrt(v(G))`.
    pub c_sep: f64,
}

impl Separator {
    /// `V = A ⊎ S ⊎ B`, no A–B edge, both sides at most two thirds.
    pub fn is_valid(&self, graph: &Graph) -> bool {
        let n = graph.n();
        let total = self.a.len() + self.s.len() + self.b.len();
        let union = self.a.union(&self.s).union(&self.b);
        total == n
            && union.len() == n
            && 3 * self.a.len() <= 2 * n
            && 3 * self.b.len() <= 2 * n
            && graph
                .edges()
                .all(|(u, v)| !(self.a.contains(u) && self.b.contains(v) || self.a.contains(v) && self.b.contains(u)))
    }
}

/// Balanced separator from BFS levels.
///
/// Each connected piece is layered by BFS from both ends of a double sweep;
/// the smallest single level leaving at most two thirds on either side is
/// chosen. The median level always qualifies, so the balance holds on every
/// input; the size bound is measured (`c_sep`), not promised.
pub fn planar_separator(graph: &Graph) -> Separator {
    separator_with_target(graph, None)
}

/// As [`planar_separator`]; with a target piece size, ties between equally
/// small levels favour splits that leave pieces cheap to cut further.
pub(crate) fn separator_with_target(graph: &Graph, target: Option<usize>) -> Separator {
    let n = graph.n();
    let finish = |a: Vec<Vertex>, s: Vec<Vertex>, b: Vec<Vertex>| Separator {
        c_sep: if n == 0 { 0.0 } else { s.len() as f64 / (n as f64).sqrt() },
        a: VertexSet::from_iter(a),
        s: VertexSet::from_iter(s),
        b: VertexSet::from_iter(b),
    };
    if n == 0 {
        return finish(vec![], vec![], vec![]);
    }
    let mut comps = graph.components();
    comps.sort_by_key(|c| std::cmp::Reverse(c.len()));
    let largest = comps[0].len();

    if 3 * largest <= 2 * n && comps.len() > 1 {
        // Components alone can be balanced.
        let mut a = Vec::new();
        let mut b = Vec::new();
        if 3 * largest >= n {
            a.extend(comps[0].iter().copied());
            for c in &comps[1..] {
                b.extend(c.iter().copied());
            }
        } else {
            for c in &comps {
                if 3 * a.len() < n {
                    a.extend(c.iter().copied());
                } else {
                    b.extend(c.iter().copied());
                }
            }
        }
        return finish(a, vec![], b);
    }

    let big = &comps[0];
    let sub = graph.induced_subgraph(big);
    let (a, s, b) = split_connected(&sub, target);
    let map = |xs: Vec<Vertex>| -> Vec<Vertex> { xs.into_iter().map(|i| big.as_slice()[i]).collect() };
    let (mut a, s, mut b) = (map(a), map(s), map(b));
    let rest: Vec<Vertex> = comps[1..].iter().flat_map(|c| c.iter().copied()).collect();
    if a.len() <= b.len() {
        a.extend(rest);
    } else {
        b.extend(rest);
    }
    finish(a, s, b)
}

fn bfs_levels(graph: &Graph, root: Vertex) -> Vec<Vec<Vertex>> {
    let mut dist = vec![usize::MAX; graph.n()];
    dist[root] = 0;
    let mut levels: Vec<Vec<Vertex>> = vec![vec![root]];
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for &w in graph.neighbors(u) {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                if levels.len() <= dist[w] {
                    levels.push(Vec::new());
                }
                levels[dist[w]].push(w);
                queue.push_back(w);
            }
        }
    }
    levels
}

/// Pieces needed to cut a path-like piece of `x` vertices into parts of at
/// most `t`.
fn path_cost(x: usize, t: usize) -> usize {
    (x + 1).div_ceil(t + 1)
}

/// Separator size, piece cost and skew of a candidate split; smaller is better.
type Score = (usize, usize, usize);
type Split = (Vec<Vertex>, Vec<Vertex>, Vec<Vertex>);

fn split_connected(graph: &Graph, target: Option<usize>) -> (Vec<Vertex>, Vec<Vertex>, Vec<Vertex>) {
    let n = graph.n();
    let first = bfs_levels(graph, 0);
    let far = *first.last().unwrap().iter().min().unwrap();
    let second = bfs_levels(graph, far);
    let far2 = *second.last().unwrap().iter().min().unwrap();
    let mut best: Option<(Score, Split)> = None;
    for root in [far, far2] {
        let levels = bfs_levels(graph, root);
        let mut before = 0;
        for (i, level) in levels.iter().enumerate() {
            let after = n - before - level.len();
            if 3 * before <= 2 * n && 3 * after <= 2 * n {
                let cost = target.map_or(0, |t| path_cost(before, t) + path_cost(after, t));
                let skew = before.abs_diff(after);
                let key = (level.len(), cost, skew);
                if best.as_ref().is_none_or(|b| key < b.0) {
                    let a = levels[..i].iter().flatten().copied().collect();
                    let b = levels[i + 1..].iter().flatten().copied().collect();
                    best = Some((key, (a, level.clone(), b)));
                }
            }
            before += level.len();
        }
    }
    best.expect("the median level is always balanced").1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Shattering {
    pub x: VertexSet,
    pub largest_component: usize,
    /// `|X| > ε·v(G)`; the component bound still holds.
    pub budget_exceeded: bool,
}

/// Removes separators recursively until every piece has at most
/// `size_target` vertices.
pub fn shatter(graph: &Graph, epsilon: Ratio<i64>, size_target: usize) -> Shattering {
    let n = graph.n();
    let size_target = size_target.max(1);
    let mut x: Vec<Vertex> = Vec::new();
    let mut pieces: Vec<Vec<Vertex>> = graph.components().into_iter().map(|c| c.as_slice().to_vec()).collect();
    let mut largest = 0;
    while let Some(piece) = pieces.pop() {
        if piece.len() <= size_target {
            largest = largest.max(piece.len());
            continue;
        }
        let set = VertexSet::from_iter(piece.iter().copied());
        let sub = graph.induced_subgraph(&set);
        let sep = separator_with_target(&sub, Some(size_target));
        let back = |v: &Vertex| set.as_slice()[*v];
        x.extend(sep.s.iter().map(back));
        for side in [&sep.a, &sep.b] {
            if side.is_empty() {
                continue;
            }
            let side_set = VertexSet::from_iter(side.iter().map(back));
            let side_graph = graph.induced_subgraph(&side_set);
            for comp in side_graph.components() {
                pieces.push(comp.iter().map(|&i| side_set.as_slice()[i]).collect());
            }
        }
    }
    let budget = epsilon * Ratio::from_integer(n as i64);
    let x = VertexSet::from_iter(x);
    Shattering { budget_exceeded: Ratio::from_integer(x.len() as i64) > budget, x, largest_component: largest }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowDegree {
    /// `2·c_F / ε` with `c_F = 3`.
    pub threshold: Ratio<i64>,
    pub x: VertexSet,
}

/// Vertices of degree above `6/ε`. When `e(G) ≤ 3·v(G)` the degree sum
/// forces `|X| ≤ ε·v(G)`; this is asserted.
pub fn low_degree_filter(graph: &Graph, epsilon: Ratio<i64>) -> LowDegree {
    let threshold = Ratio::from_integer(6) / epsilon;
    let x: VertexSet = graph.vertices().filter(|&v| Ratio::from_integer(graph.degree(v) as i64) > threshold).collect();
    if graph.m() <= 3 * graph.n() {
        assert!(
            Ratio::from_integer(x.len() as i64) <= epsilon * Ratio::from_integer(graph.n() as i64),
            "degree counting bound violated"
        );
    }
    LowDegree { threshold, x }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    fn max_component_without(graph: &Graph, x: &VertexSet) -> usize {
        let keep: VertexSet = graph.vertices().filter(|v| !x.contains(*v)).collect();
        graph.induced_subgraph(&keep).components().iter().map(VertexSet::len).max().unwrap_or(0)
    }

    #[test]
    fn separator_examples() {
        let one = planar_separator(&Graph::empty(1));
        assert_eq!((one.a.len(), one.s.len(), one.b.len()), (0, 1, 0));

        let p = gen::path(21);
        let sep = planar_separator(&p);
        assert_eq!(sep.s.len(), 1);
        assert!(sep.is_valid(&p));

        let grid = gen::square_grid(10);
        let sep = planar_separator(&grid);
        assert!(sep.is_valid(&grid));
        assert!(sep.c_sep <= 2.0, "c_sep = {}", sep.c_sep);
    }

    #[test]
    fn separators_are_valid_on_all_families() {
        for family in crate::gen::Family::ALL {
            for size in [3, 7, 12] {
                let g = gen::generate_graph(family, size, 11);
                assert!(planar_separator(&g).is_valid(&g), "{family:?} {size}");
            }
        }
    }

    #[test]
    fn shatter_examples() {
        let tiny = gen::path(5);
        assert!(shatter(&tiny, Ratio::new(1, 10), 10).x.is_empty());

        let p = gen::path(100);
        let s = shatter(&p, Ratio::new(1, 10), 10);
        assert!(s.x.len() <= 10 && !s.budget_exceeded, "|X| = {}", s.x.len());
        assert!(max_component_without(&p, &s.x) <= 10);

        let grid = gen::square_grid(20);
        let s = shatter(&grid, Ratio::new(1, 4), 25);
        assert!(max_component_without(&grid, &s.x) <= 25);
        assert!(s.x.len() <= 100, "|X| = {}", s.x.len());
        assert!(!s.budget_exceeded);
    }

    #[test]
    fn shatter_reports_budget_honestly() {
        let tri = gen::tri_grid(12);
        let s = shatter(&tri, Ratio::new(1, 100), 2);
        assert!(max_component_without(&tri, &s.x) <= 2);
        assert!(s.budget_exceeded);
    }

    #[test]
    fn low_degree_examples() {
        let cube = Graph::from_edges(
            8,
            [(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4), (0, 4), (1, 5), (2, 6), (3, 7)],
        )
        .unwrap();
        assert!(low_degree_filter(&cube, Ratio::from_integer(1)).x.is_empty());

        let star = gen::complete_bipartite(1, 20);
        let ld = low_degree_filter(&star, Ratio::new(1, 2));
        assert_eq!(ld.threshold, Ratio::from_integer(12));
        assert_eq!(ld.x.as_slice(), &[0]);

        let tri = gen::random_triangulation(1000, 1);
        let ld = low_degree_filter(&tri, Ratio::new(1, 10));
        assert_eq!(ld.threshold, Ratio::from_integer(60));
        assert!(ld.x.len() <= 100);
    }
}
