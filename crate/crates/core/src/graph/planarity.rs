//! Exact planarity test tuned for the small graphs produced by purse checks.
//!
//! Euler's bound rejects dense inputs outright. Otherwise the graph is split
//! into biconnected blocks and each block is embedded incrementally with the
//! Demoucron–Malgrange–Pertuiset face-insertion procedure.

use super::{Graph, Vertex};

pub fn is_planar(graph: &Graph) -> bool {
    let n = graph.n();
    if n <= 4 {
        return true;
    }
    if graph.m() > 3 * n - 6 {
        return false;
    }
    biconnected_blocks(graph).into_iter().all(|block| block_is_planar(&block))
}

/// A block as a relabeled edge list.
struct Block {
    n: usize,
    edges: Vec<(usize, usize)>,
}

/// Biconnected components (edge partition) via an iterative Tarjan DFS.
fn biconnected_blocks(graph: &Graph) -> Vec<Block> {
    let n = graph.n();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut time = 0;
    let mut edge_stack: Vec<(Vertex, Vertex)> = Vec::new();
    let mut blocks = Vec::new();

    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        // (vertex, parent, next neighbor index)
        let mut stack: Vec<(Vertex, Vertex, usize)> = vec![(root, usize::MAX, 0)];
        while let Some(&mut (u, parent, ref mut idx)) = stack.last_mut() {
            let nbrs = graph.neighbors(u);
            if *idx < nbrs.len() {
                let w = nbrs[*idx];
                *idx += 1;
                if w == parent {
                    continue;
                }
                if disc[w] == usize::MAX {
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    edge_stack.push((u, w));
                    stack.push((w, u, 0));
                } else if disc[w] < disc[u] {
                    low[u] = low[u].min(disc[w]);
                    edge_stack.push((u, w));
                }
            } else {
                stack.pop();
                if let Some(&(p, _, _)) = stack.last() {
                    low[p] = low[p].min(low[u]);
                    if low[u] >= disc[p] {
                        let mut edges = Vec::new();
                        while let Some(e) = edge_stack.pop() {
                            edges.push(e);
                            if e == (p, u) {
                                break;
                            }
                        }
                        blocks.push(relabel(edges));
                    }
                }
            }
        }
    }
    blocks
}

fn relabel(edges: Vec<(Vertex, Vertex)>) -> Block {
    let mut ids: Vec<Vertex> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
    ids.sort_unstable();
    ids.dedup();
    let pos = |v: Vertex| ids.binary_search(&v).unwrap();
    let edges = edges.iter().map(|&(a, b)| (pos(a), pos(b))).collect();
    Block { n: ids.len(), edges }
}

fn block_is_planar(block: &Block) -> bool {
    let n = block.n;
    let m = block.edges.len();
    if n <= 4 || m <= 8 {
        // K5 and K3,3 both need at least 9 edges and 5 vertices.
        return true;
    }
    if m > 3 * n - 6 {
        return false;
    }
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in &block.edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    Dmp::new(adj).run()
}

struct Dmp {
    adj: Vec<Vec<usize>>,
    vertex_in: Vec<bool>,
    edge_in: std::collections::HashSet<(usize, usize)>,
    faces: Vec<Vec<usize>>,
}

struct Fragment {
    attachments: Vec<usize>,
    /// Internal vertices; empty for a single chord edge.
    interior: Vec<usize>,
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl Dmp {
    fn new(adj: Vec<Vec<usize>>) -> Self {
        let n = adj.len();
        Dmp { adj, vertex_in: vec![false; n], edge_in: Default::default(), faces: Vec::new() }
    }

    fn total_edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    fn run(mut self) -> bool {
        let cycle = self.find_cycle();
        for i in 0..cycle.len() {
            self.vertex_in[cycle[i]] = true;
            self.edge_in.insert(key(cycle[i], cycle[(i + 1) % cycle.len()]));
        }
        self.faces = vec![cycle.clone(), cycle];
        let total = self.total_edges();

        while self.edge_in.len() < total {
            let fragments = self.fragments();
            let mut chosen: Option<(usize, usize)> = None;
            for (fi, frag) in fragments.iter().enumerate() {
                let admissible: Vec<usize> = (0..self.faces.len())
                    .filter(|&f| frag.attachments.iter().all(|a| self.faces[f].contains(a)))
                    .collect();
                match admissible.len() {
                    0 => return false,
                    1 => {
                        chosen = Some((fi, admissible[0]));
                        break;
                    }
                    _ => {
                        if chosen.is_none() {
                            chosen = Some((fi, admissible[0]));
                        }
                    }
                }
            }
            let (fi, face) = chosen.expect("an unembedded edge implies a fragment");
            let path = self.fragment_path(&fragments[fi]);
            self.embed_path(face, &path);
        }
        true
    }

    /// A cycle through the first edge: the edge plus a shortest detour.
    fn find_cycle(&self) -> Vec<usize> {
        let u = 0;
        let v = self.adj[0][0];
        let mut prev = vec![usize::MAX; self.adj.len()];
        prev[u] = u;
        let mut queue = std::collections::VecDeque::from([u]);
        while let Some(x) = queue.pop_front() {
            for &w in &self.adj[x] {
                if (x == u && w == v) || prev[w] != usize::MAX {
                    continue;
                }
                prev[w] = x;
                if w == v {
                    let mut cyc = vec![v];
                    let mut y = v;
                    while y != u {
                        y = prev[y];
                        cyc.push(y);
                    }
                    return cyc;
                }
                queue.push_back(w);
            }
        }
        unreachable!("a biconnected block with at least 3 vertices has a cycle")
    }

    fn fragments(&self) -> Vec<Fragment> {
        let n = self.adj.len();
        let mut out = Vec::new();
        for u in 0..n {
            if !self.vertex_in[u] {
                continue;
            }
            for &w in &self.adj[u] {
                if u < w && self.vertex_in[w] && !self.edge_in.contains(&key(u, w)) {
                    out.push(Fragment { attachments: vec![u, w], interior: Vec::new() });
                }
            }
        }
        let mut seen = vec![false; n];
        for s in 0..n {
            if self.vertex_in[s] || seen[s] {
                continue;
            }
            seen[s] = true;
            let mut interior = vec![s];
            let mut attachments = Vec::new();
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &w in &self.adj[u] {
                    if self.vertex_in[w] {
                        attachments.push(w);
                    } else if !seen[w] {
                        seen[w] = true;
                        interior.push(w);
                        stack.push(w);
                    }
                }
            }
            attachments.sort_unstable();
            attachments.dedup();
            out.push(Fragment { attachments, interior });
        }
        out
    }

    /// A path through the fragment joining two distinct attachments.
    fn fragment_path(&self, frag: &Fragment) -> Vec<usize> {
        if frag.interior.is_empty() {
            return frag.attachments.clone();
        }
        let start = frag.attachments[0];
        let inside: std::collections::HashSet<usize> = frag.interior.iter().copied().collect();
        let first = *self.adj[start]
            .iter()
            .find(|w| inside.contains(w))
            .expect("every attachment touches the fragment interior");
        let mut prev = std::collections::HashMap::from([(first, usize::MAX)]);
        let mut queue = std::collections::VecDeque::from([first]);
        while let Some(u) = queue.pop_front() {
            if let Some(&end) = self.adj[u].iter().find(|&&w| self.vertex_in[w] && w != start) {
                let mut path = vec![end];
                let mut x = u;
                while x != usize::MAX {
                    path.push(x);
                    x = prev[&x];
                }
                path.push(start);
                path.reverse();
                return path;
            }
            for &w in &self.adj[u] {
                if inside.contains(&w) && !prev.contains_key(&w) {
                    prev.insert(w, u);
                    queue.push_back(w);
                }
            }
        }
        unreachable!("fragments of a biconnected block have two attachments")
    }

    fn embed_path(&mut self, face: usize, path: &[usize]) {
        for w in path.windows(2) {
            self.edge_in.insert(key(w[0], w[1]));
        }
        for &v in path {
            self.vertex_in[v] = true;
        }
        let f = std::mem::take(&mut self.faces[face]);
        let a = path[0];
        let b = *path.last().unwrap();
        let i = f.iter().position(|&x| x == a).unwrap();
        let j = f.iter().position(|&x| x == b).unwrap();
        let len = f.len();
        let arc = |from: usize, to: usize| {
            let mut out = Vec::new();
            let mut k = from;
            loop {
                out.push(f[k]);
                if k == to {
                    break;
                }
                k = (k + 1) % len;
            }
            out
        };
        let inner = &path[1..path.len() - 1];
        let mut first = arc(i, j);
        first.extend(inner.iter().rev());
        let mut second = arc(j, i);
        second.extend(inner.iter());
        self.faces[face] = first;
        self.faces.push(second);
    }
}
