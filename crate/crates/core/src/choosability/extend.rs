//! Extending a precoloring of a short path to a whole planar graph.
//!
//! * girth 4, 4-lists: a vertex off the path of degree at most 3 always
//!   exists; peel such vertices off and color them back greedily.
//! * girth 3, 5-lists: Thomassen's procedure on near-triangulations
//!   (needs a rotation system).
//! * girth 5, 3-lists: exact search.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::backtrack_color;
use crate::graph::{Color, Coloring, Graph, Vertex};
use crate::lists::ListAssignment;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExtendError {
    #[error("graph girth {girth} is below the class requirement {need}")]
    GirthViolation { girth: usize, need: usize },
    #[error("path has {len} vertices, at most {max} allowed")]
    PathTooLong { len: usize, max: usize },
    #[error("the given vertices do not form a path")]
    NotAPath,
    #[error("precoloring is improper or outside the lists at vertex {vertex}")]
    InvalidPrecoloring { vertex: Vertex },
    #[error("vertex {vertex} has {len} colors, {need} required")]
    ListTooShort { vertex: Vertex, len: usize, need: usize },
    #[error("structural extension needs a rotation system")]
    EmbeddingRequired,
    #[error("no extension exists (input violates the planarity precondition)")]
    NoExtension,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtendOptions {
    /// Use exact search when the structural route does not apply.
    pub allow_fallback: bool,
}

impl Default for ExtendOptions {
    fn default() -> Self {
        ExtendOptions { allow_fallback: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtensionMethod {
    Trivial,
    LowDegreeElimination,
    Thomassen,
    Backtrack,
}

pub fn extend_precolored_path(
    graph: &Graph,
    lists: &ListAssignment,
    path: &[Vertex],
    phi: &Coloring,
) -> Result<Coloring, ExtendError> {
    extend_precolored_path_with(graph, lists, path, phi, ExtendOptions::default()).map(|r| r.0)
}

pub fn extend_precolored_path_with(
    graph: &Graph,
    lists: &ListAssignment,
    path: &[Vertex],
    phi: &Coloring,
    options: ExtendOptions,
) -> Result<(Coloring, ExtensionMethod), ExtendError> {
    let g = lists.girth_class() as usize;
    if let Some(girth) = graph.girth() {
        if girth < g {
            return Err(ExtendError::GirthViolation { girth, need: g });
        }
    }
    if path.len() > g - 1 {
        return Err(ExtendError::PathTooLong { len: path.len(), max: g - 1 });
    }
    let mut distinct = path.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() != path.len()
        || path.iter().any(|&v| v >= graph.n())
        || path.windows(2).any(|w| !graph.has_edge(w[0], w[1]))
    {
        return Err(ExtendError::NotAPath);
    }
    let mut fixed = Coloring::new(graph.n());
    for &v in path {
        let c = phi.get(v).ok_or(ExtendError::InvalidPrecoloring { vertex: v })?;
        if !lists.list(v).contains(&c) || graph.neighbors(v).iter().any(|&w| path.contains(&w) && phi.get(w) == Some(c))
        {
            return Err(ExtendError::InvalidPrecoloring { vertex: v });
        }
        fixed.set(v, c);
    }
    let need = 8 - g;
    for v in graph.vertices() {
        if !path.contains(&v) && lists.list(v).len() < need {
            return Err(ExtendError::ListTooShort { vertex: v, len: lists.list(v).len(), need });
        }
    }
    if path.len() == graph.n() {
        return Ok((fixed, ExtensionMethod::Trivial));
    }

    let structural = match g {
        4 => low_degree_elimination(graph, lists, path, &fixed).map(|c| (c, ExtensionMethod::LowDegreeElimination)),
        3 => match graph.rotation() {
            None if !options.allow_fallback => return Err(ExtendError::EmbeddingRequired),
            None => None,
            Some(_) => thomassen(graph, lists, path, &fixed).map(|c| (c, ExtensionMethod::Thomassen)),
        },
        _ => None,
    };
    if let Some((c, method)) = structural {
        if graph.validate_coloring(Some(lists), &c).is_valid() {
            return Ok((c, method));
        }
    }
    if g != 5 && !options.allow_fallback {
        return Err(if g == 3 { ExtendError::EmbeddingRequired } else { ExtendError::NoExtension });
    }
    backtrack_color(graph, lists, &fixed).map(|c| (c, ExtensionMethod::Backtrack)).ok_or(ExtendError::NoExtension)
}

/// Girth-4 route. Returns `None` when no low-degree vertex is left, which
/// cannot happen for planar inputs.
fn low_degree_elimination(
    graph: &Graph,
    lists: &ListAssignment,
    path: &[Vertex],
    fixed: &Coloring,
) -> Option<Coloring> {
    let n = graph.n();
    let on_path = |v: Vertex| path.contains(&v);
    let mut degree: Vec<usize> = graph.vertices().map(|v| graph.degree(v)).collect();
    let mut removed = vec![false; n];
    let mut queue: VecDeque<Vertex> = graph.vertices().filter(|&v| !on_path(v) && degree[v] <= 3).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = queue.pop_front() {
        if removed[v] {
            continue;
        }
        removed[v] = true;
        order.push(v);
        for &w in graph.neighbors(v) {
            if !removed[w] {
                degree[w] -= 1;
                if degree[w] == 3 && !on_path(w) {
                    queue.push_back(w);
                }
            }
        }
    }
    if order.len() + path.len() != n {
        return None;
    }
    let mut coloring = fixed.clone();
    for &v in order.iter().rev() {
        let c = *lists.list(v).iter().find(|&&c| graph.neighbors(v).iter().all(|&w| coloring.get(w) != Some(c)))?;
        coloring.set(v, c);
    }
    Some(coloring)
}

/// Girth-3 route: each component is treated as a near-triangulation whose
/// outer face is its unique non-triangular face (or any face touching the
/// path when all faces are triangles). `None` when the embedding is not of
/// that shape.
fn thomassen(graph: &Graph, lists: &ListAssignment, path: &[Vertex], fixed: &Coloring) -> Option<Coloring> {
    let rotation = graph.rotation()?;
    let mut state = Thomassen {
        graph,
        rotation,
        lists: lists.lists().to_vec(),
        coloring: fixed.clone(),
        region: vec![DEAD; graph.n()],
        next_region: 0,
    };
    for comp in graph.components() {
        let members = comp.as_slice();
        let local_path: Vec<Vertex> = path.iter().copied().filter(|v| comp.contains(*v)).collect();
        if members.len() <= 2 {
            for &v in members {
                if state.coloring.get(v).is_none() {
                    let c = state.free_color(v)?;
                    state.coloring.set(v, c);
                }
            }
            continue;
        }
        let outer = outer_face(graph, rotation, members, &local_path)?;
        state.run(members, outer, &local_path)?;
    }
    Some(state.coloring)
}

const DEAD: usize = usize::MAX;

/// Faces of the component as vertex walks, via dart successors.
fn faces(rotation: &[Vec<Vertex>], members: &[Vertex]) -> Vec<Vec<Vertex>> {
    let mut index: HashMap<(Vertex, Vertex), usize> = HashMap::new();
    for &v in members {
        for (i, &w) in rotation[v].iter().enumerate() {
            index.insert((v, w), i);
        }
    }
    let mut seen: HashSet<(Vertex, Vertex)> = HashSet::new();
    let mut out = Vec::new();
    for &u in members {
        for &v in &rotation[u] {
            if seen.contains(&(u, v)) {
                continue;
            }
            let mut walk = Vec::new();
            let (mut a, mut b) = (u, v);
            while seen.insert((a, b)) {
                walk.push(a);
                let i = index[&(b, a)];
                let c = rotation[b][(i + 1) % rotation[b].len()];
                (a, b) = (b, c);
            }
            out.push(walk);
        }
    }
    out
}

fn outer_face(graph: &Graph, rotation: &[Vec<Vertex>], members: &[Vertex], path: &[Vertex]) -> Option<Vec<Vertex>> {
    let faces = faces(rotation, members);
    let edges: usize = members.iter().map(|&v| graph.degree(v)).sum::<usize>() / 2;
    if members.len() + faces.len() != edges + 2 {
        return None;
    }
    let touches_path = |f: &Vec<Vertex>| -> bool {
        match path {
            [] => true,
            [a] => f.contains(a),
            [a, b] => (0..f.len()).any(|i| {
                let (p, q) = (f[i], f[(i + 1) % f.len()]);
                (p, q) == (*a, *b) || (p, q) == (*b, *a)
            }),
            _ => false,
        }
    };
    let big: Vec<&Vec<Vertex>> = faces.iter().filter(|f| f.len() != 3).collect();
    let outer = match big.as_slice() {
        [] => faces.iter().find(|f| touches_path(f))?.clone(),
        [f] if touches_path(f) => (*f).clone(),
        _ => return None,
    };
    let mut sorted = outer.clone();
    sorted.sort_unstable();
    sorted.dedup();
    (sorted.len() == outer.len()).then_some(outer)
}

enum Task {
    Solve {
        region: usize,
        cycle: Vec<Vertex>,
        x: Vertex,
        y: Vertex,
    },
    /// Color `v` with whichever of `alpha`, `beta` its cycle neighbor
    /// `prev` did not take.
    Finish {
        v: Vertex,
        alpha: Color,
        beta: Color,
        prev: Vertex,
    },
}

struct Thomassen<'a> {
    graph: &'a Graph,
    rotation: &'a [Vec<Vertex>],
    lists: Vec<Vec<Color>>,
    coloring: Coloring,
    region: Vec<usize>,
    next_region: usize,
}

impl Thomassen<'_> {
    fn free_color(&self, v: Vertex) -> Option<Color> {
        self.lists[v]
            .iter()
            .copied()
            .find(|&c| self.graph.neighbors(v).iter().all(|&w| self.coloring.get(w) != Some(c)))
    }

    fn run(&mut self, members: &[Vertex], cycle: Vec<Vertex>, path: &[Vertex]) -> Option<()> {
        let region = self.next_region;
        self.next_region += 1;
        for &v in members {
            self.region[v] = region;
        }
        let k = cycle.len();
        let (x, y) = match path {
            [a, b] => (*a, *b),
            [a] => {
                let i = cycle.iter().position(|v| v == a)?;
                (*a, cycle[(i + 1) % k])
            }
            _ => (cycle[0], cycle[1]),
        };
        for v in [x, y] {
            if self.coloring.get(v).is_none() {
                let c = self.free_color(v)?;
                self.coloring.set(v, c);
            }
        }
        let mut stack = vec![Task::Solve { region, cycle, x, y }];
        while let Some(task) = stack.pop() {
            match task {
                Task::Finish { v, alpha, beta, prev } => {
                    let c = if self.coloring.get(prev) == Some(alpha) { beta } else { alpha };
                    self.coloring.set(v, c);
                }
                Task::Solve { region, cycle, x, y } => self.step(region, cycle, x, y, &mut stack)?,
            }
        }
        Some(())
    }

    fn inside(&self, region: usize, x: Vertex, y: Vertex, w: Vertex) -> bool {
        self.region[w] == region || w == x || w == y
    }

    fn step(&mut self, region: usize, cycle: Vec<Vertex>, x: Vertex, y: Vertex, stack: &mut Vec<Task>) -> Option<()> {
        let k = cycle.len();
        if k <= 2 {
            return Some(());
        }
        let pos: HashMap<Vertex, usize> = cycle.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let px = pos[&x];
        let py = pos[&y];
        let forward = py == (px + 1) % k;
        if !forward && px != (py + 1) % k {
            return None;
        }

        // Chord: an edge between cycle vertices that are not consecutive.
        if k > 3 {
            for (i, &a) in cycle.iter().enumerate() {
                for &b in self.graph.neighbors(a) {
                    let Some(&j) = pos.get(&b) else { continue };
                    if !self.inside(region, x, y, b) || j <= i || j == i + 1 || (i == 0 && j == k - 1) {
                        continue;
                    }
                    let first: Vec<Vertex> = cycle[i..=j].to_vec();
                    let mut second: Vec<Vertex> = cycle[j..].to_vec();
                    second.extend_from_slice(&cycle[..=i]);
                    let xy_in_first = (i..=j).contains(&px) && (i..=j).contains(&py);
                    let (keep, split) = if xy_in_first { (first, second) } else { (second, first) };
                    let seed = split[1];
                    let new_region = self.next_region;
                    self.next_region += 1;
                    let mut queue = VecDeque::from([seed]);
                    self.region[seed] = new_region;
                    while let Some(u) = queue.pop_front() {
                        for &w in self.graph.neighbors(u) {
                            if w != a && w != b && self.region[w] == region {
                                self.region[w] = new_region;
                                queue.push_back(w);
                            }
                        }
                    }
                    stack.push(Task::Solve { region: new_region, cycle: split, x: a, y: b });
                    stack.push(Task::Solve { region, cycle: keep, x, y });
                    return Some(());
                }
            }
        }

        // Remove v_k, the cycle neighbor of x away from y.
        let step = |i: usize, back: bool| if back { (i + k - 1) % k } else { (i + 1) % k };
        let qk = step(px, forward);
        let vk = cycle[qk];
        let prev = cycle[step(qk, forward)];
        let around: Vec<Vertex> = self.rotation[vk].iter().copied().filter(|&w| self.inside(region, x, y, w)).collect();
        let d = around.len();
        let i1 = around.iter().position(|&w| w == x)?;
        let i2 = around.iter().position(|&w| w == prev)?;
        let arc_a: Vec<Vertex> = (1..(i2 + d - i1) % d).map(|t| around[(i1 + t) % d]).collect();
        let arc_b: Vec<Vertex> = (1..(i1 + d - i2) % d).map(|t| around[(i2 + t) % d]).collect();
        let interior: Vec<Vertex> = match (arc_a.is_empty(), arc_b.is_empty()) {
            (_, true) => arc_a,
            (true, false) => arc_b.into_iter().rev().collect(),
            (false, false) => return None,
        };
        if interior.iter().any(|w| pos.contains_key(w)) {
            return None;
        }

        let xc = self.coloring.get(x)?;
        let mut spare = self.lists[vk].iter().copied().filter(|&c| c != xc);
        let alpha = spare.next()?;
        let beta = spare.next()?;
        for &u in &interior {
            self.lists[u].retain(|&c| c != alpha && c != beta);
        }
        self.region[vk] = DEAD;

        // Replace v_k by the interior path, ordered from x's side to prev's.
        let mut next_cycle = Vec::with_capacity(k + interior.len());
        for (i, &v) in cycle.iter().enumerate() {
            if i != qk {
                next_cycle.push(v);
                continue;
            }
            // Walking the array, we meet x's side first iff x precedes v_k.
            if forward {
                next_cycle.extend(interior.iter().rev());
            } else {
                next_cycle.extend(interior.iter());
            }
        }
        stack.push(Task::Finish { v: vk, alpha, beta, prev });
        stack.push(Task::Solve { region, cycle: next_cycle, x, y });
        Some(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::lists::ListMode;

    fn run(graph: &Graph, g: u32, path: &[Vertex], seed: u64) -> (Coloring, ExtensionMethod) {
        let lists = ListAssignment::generate(graph.n(), g, ListMode::Overlap, seed);
        let mut phi = Coloring::new(graph.n());
        for (i, &v) in path.iter().enumerate() {
            let c = *lists.list(v).iter().find(|&&c| i == 0 || phi.get(path[i - 1]) != Some(c)).unwrap();
            phi.set(v, c);
        }
        let (c, method) =
            extend_precolored_path_with(graph, &lists, path, &phi, ExtendOptions { allow_fallback: false }).unwrap();
        assert!(graph.validate_coloring(Some(&lists), &c).is_valid());
        for &v in path {
            assert_eq!(c.get(v), phi.get(v));
        }
        (c, method)
    }

    #[test]
    fn square_grid_with_precolored_corners() {
        let g = gen::square_grid(4);
        let (_, m) = run(&g, 4, &[0, 1], 1);
        assert_eq!(m, ExtensionMethod::LowDegreeElimination);
        let (_, m) = run(&g, 4, &[0, 1, 2], 2);
        assert_eq!(m, ExtensionMethod::LowDegreeElimination);
    }

    #[test]
    fn path_only_graph_is_returned_unchanged() {
        let g = gen::path(2);
        let (_, m) = run(&g, 4, &[0, 1], 0);
        assert_eq!(m, ExtensionMethod::Trivial);
    }

    #[test]
    fn triangle_with_precolored_edge() {
        let g = gen::cycle(3);
        let (_, m) = run(&g, 3, &[0, 1], 0);
        assert_eq!(m, ExtensionMethod::Thomassen);
    }

    #[test]
    fn thomassen_on_near_triangulations() {
        for seed in 0..20 {
            let tri = gen::random_triangulation(60, seed);
            let e = tri.edges().next().unwrap();
            assert_eq!(run(&tri, 3, &[e.0, e.1], seed).1, ExtensionMethod::Thomassen);
            assert_eq!(run(&tri, 3, &[], seed).1, ExtensionMethod::Thomassen);
        }
        let grid = gen::tri_grid(12);
        assert_eq!(run(&grid, 3, &[0, 1], 4).1, ExtensionMethod::Thomassen);
        assert_eq!(run(&grid, 3, &[5], 4).1, ExtensionMethod::Thomassen);
        assert_eq!(run(&gen::icosahedron(), 3, &[0, 1], 9).1, ExtensionMethod::Thomassen);
    }

    #[test]
    fn large_tri_grid_is_linear_enough() {
        let grid = gen::tri_grid(80);
        assert_eq!(run(&grid, 3, &[0, 1], 4).1, ExtensionMethod::Thomassen);
    }

    #[test]
    fn girth_five_uses_search() {
        let g = gen::dodecahedron();
        assert_eq!(run(&g, 5, &[0, g.neighbors(0)[0]], 3).1, ExtensionMethod::Backtrack);
    }

    #[test]
    fn precondition_errors() {
        let tri = gen::cycle(3);
        let l4 = ListAssignment::generate(3, 4, ListMode::Random, 0);
        let phi = Coloring::new(3);
        assert_eq!(
            extend_precolored_path(&tri, &l4, &[], &phi),
            Err(ExtendError::GirthViolation { girth: 3, need: 4 })
        );
        let g = gen::square_grid(3);
        let l4 = ListAssignment::generate(9, 4, ListMode::Random, 0);
        assert!(matches!(
            extend_precolored_path(&g, &l4, &[0, 1, 2, 5], &phi),
            Err(ExtendError::PathTooLong { len: 4, max: 3 })
        ));
        let bare = Graph::from_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        let l3 = ListAssignment::generate(3, 3, ListMode::Random, 0);
        assert_eq!(
            extend_precolored_path_with(&bare, &l3, &[], &phi, ExtendOptions { allow_fallback: false }),
            Err(ExtendError::EmbeddingRequired)
        );
    }
}
