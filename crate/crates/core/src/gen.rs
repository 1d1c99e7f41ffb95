//! Instance generators. Every planar family carries a rotation system taken
//! from a straight-line drawing or from its oriented face list.

use std::collections::{HashMap, HashSet, VecDeque};
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, Vertex};
use crate::lists::{ListAssignment, ListMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    TriGrid,
    SquareGrid,
    HexGrid,
    RandomTriangulation,
    Icosahedron,
    Dodecahedron,
    DisjointUnion,
}

#[derive(Debug, Error)]
#[error("unknown family {0:?}")]
pub struct UnknownFamily(pub String);

impl std::str::FromStr for Family {
    type Err = UnknownFamily;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "tri_grid" => Family::TriGrid,
            "square_grid" => Family::SquareGrid,
            "hex_grid" => Family::HexGrid,
            "random_triangulation" => Family::RandomTriangulation,
            "icosahedron" => Family::Icosahedron,
            "dodecahedron" => Family::Dodecahedron,
            "disjoint_union" => Family::DisjointUnion,
            other => return Err(UnknownFamily(other.to_string())),
        })
    }
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::TriGrid,
        Family::SquareGrid,
        Family::HexGrid,
        Family::RandomTriangulation,
        Family::Icosahedron,
        Family::Dodecahedron,
        Family::DisjointUnion,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::TriGrid => "tri_grid",
            Family::SquareGrid => "square_grid",
            Family::HexGrid => "hex_grid",
            Family::RandomTriangulation => "random_triangulation",
            Family::Icosahedron => "icosahedron",
            Family::Dodecahedron => "dodecahedron",
            Family::DisjointUnion => "disjoint_union",
        }
    }

    /// Girth of the generated graphs (for nontrivial sizes).
    pub fn girth(self) -> usize {
        match self {
            Family::SquareGrid => 4,
            Family::HexGrid => 6,
            Family::Dodecahedron => 5,
            _ => 3,
        }
    }

    /// The type-345 class used for this family: the largest g in {3,4,5}
    /// not exceeding its girth.
    pub fn girth_class(self) -> u32 {
        self.girth().min(5) as u32
    }

    /// Size parameter that yields roughly `n` vertices.
    pub fn size_for_vertices(self, n: usize) -> usize {
        match self {
            Family::TriGrid | Family::SquareGrid => (n as f64).sqrt().round().max(2.0) as usize,
            // s x s hexagons give about 2s^2 vertices.
            Family::HexGrid => ((n as f64) / 2.0).sqrt().round().max(1.0) as usize,
            Family::RandomTriangulation => n.max(4),
            Family::DisjointUnion => (n / 3).max(1),
            Family::Icosahedron | Family::Dodecahedron => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub family: Family,
    pub size: usize,
    pub seed: u64,
    #[serde(default)]
    pub list_mode: ListMode,
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub graph: Graph,
    pub lists: ListAssignment,
}

pub fn generate_graph(family: Family, size: usize, seed: u64) -> Graph {
    match family {
        Family::TriGrid => tri_grid(size),
        Family::SquareGrid => square_grid(size),
        Family::HexGrid => hex_grid(size),
        Family::RandomTriangulation => random_triangulation(size, seed),
        Family::Icosahedron => icosahedron(),
        Family::Dodecahedron => dodecahedron(),
        Family::DisjointUnion => disjoint_triangles(size),
    }
}

/// Graph plus a type-345 list assignment of exactly `8 - g` colors per vertex.
pub fn generate(spec: &GeneratorSpec) -> Instance {
    let graph = generate_graph(spec.family, spec.size.max(1), spec.seed);
    let lists = ListAssignment::generate(
        graph.n(),
        spec.family.girth_class(),
        spec.list_mode,
        spec.seed ^ 0x9e37_79b9_7f4a_7c15,
    );
    Instance { graph, lists }
}

fn rotation_from_coords(graph: &Graph, coords: &[(f64, f64)]) -> Vec<Vec<Vertex>> {
    graph
        .vertices()
        .map(|v| {
            let (x0, y0) = coords[v];
            let mut ns = graph.neighbors(v).to_vec();
            ns.sort_by(|&a, &b| {
                let ta = (coords[a].1 - y0).atan2(coords[a].0 - x0);
                let tb = (coords[b].1 - y0).atan2(coords[b].0 - x0);
                ta.partial_cmp(&tb).unwrap()
            });
            ns
        })
        .collect()
}

fn with_coords(n: usize, edges: Vec<(Vertex, Vertex)>, coords: &[(f64, f64)]) -> Graph {
    let g = Graph::from_edges(n, edges).expect("generator edges are valid");
    let rot = rotation_from_coords(&g, coords);
    g.with_rotation(rot).expect("drawing rotation permutes neighbors")
}

/// `side x side` square grid with one diagonal per cell; interior degree 6.
pub fn tri_grid(side: usize) -> Graph {
    let id = |r: usize, c: usize| r * side + c;
    let mut edges = Vec::new();
    let mut coords = Vec::new();
    for r in 0..side {
        for c in 0..side {
            coords.push((c as f64, r as f64));
            if c + 1 < side {
                edges.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < side {
                edges.push((id(r, c), id(r + 1, c)));
                if c + 1 < side {
                    edges.push((id(r, c), id(r + 1, c + 1)));
                }
            }
        }
    }
    with_coords(side * side, edges, &coords)
}

pub fn square_grid(side: usize) -> Graph {
    let id = |r: usize, c: usize| r * side + c;
    let mut edges = Vec::new();
    let mut coords = Vec::new();
    for r in 0..side {
        for c in 0..side {
            coords.push((c as f64, r as f64));
            if c + 1 < side {
                edges.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < side {
                edges.push((id(r, c), id(r + 1, c)));
            }
        }
    }
    with_coords(side * side, edges, &coords)
}

/// Honeycomb patch of `side x side` hexagons in brick-wall layout, with
/// dangling corner vertices trimmed.
pub fn hex_grid(side: usize) -> Graph {
    let rows = side + 1;
    let cols = 2 * side + 2;
    let id = |i: usize, j: usize| i * cols + j;
    let mut adj: Vec<HashSet<usize>> = vec![HashSet::new(); rows * cols];
    let mut link = |a: usize, b: usize| {
        adj[a].insert(b);
        adj[b].insert(a);
    };
    for i in 0..rows {
        for j in 0..cols {
            if j + 1 < cols {
                link(id(i, j), id(i, j + 1));
            }
            if i + 1 < rows && (i + j) % 2 == 0 {
                link(id(i, j), id(i + 1, j));
            }
        }
    }
    let mut alive = vec![true; rows * cols];
    let mut queue: VecDeque<usize> = (0..rows * cols).filter(|&v| adj[v].len() <= 1).collect();
    while let Some(v) = queue.pop_front() {
        if !alive[v] {
            continue;
        }
        alive[v] = false;
        let ns: Vec<usize> = adj[v].drain().collect();
        for w in ns {
            adj[w].remove(&v);
            if alive[w] && adj[w].len() <= 1 {
                queue.push_back(w);
            }
        }
    }
    let mut new_id = vec![usize::MAX; rows * cols];
    let mut coords = Vec::new();
    for v in 0..rows * cols {
        if alive[v] {
            new_id[v] = coords.len();
            coords.push(((v % cols) as f64, (v / cols) as f64));
        }
    }
    let edges = (0..rows * cols)
        .filter(|&v| alive[v])
        .flat_map(|v| adj[v].iter().filter(move |&&w| v < w).map(move |&w| (v, w)).collect::<Vec<_>>())
        .map(|(a, b)| (new_id[a], new_id[b]))
        .collect();
    with_coords(coords.len(), edges, &coords)
}

/// Orients triangles of a closed surface consistently: each directed edge
/// ends up in exactly one face.
fn orient_faces(faces: &[[Vertex; 3]]) -> Vec<[Vertex; 3]> {
    let mut by_edge: HashMap<(Vertex, Vertex), Vec<usize>> = HashMap::new();
    for (i, f) in faces.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (f[k], f[(k + 1) % 3]);
            by_edge.entry((a.min(b), a.max(b))).or_default().push(i);
        }
    }
    let mut out: Vec<Option<[Vertex; 3]>> = vec![None; faces.len()];
    out[0] = Some(faces[0]);
    let mut queue = VecDeque::from([0]);
    while let Some(i) = queue.pop_front() {
        let f = out[i].unwrap();
        for k in 0..3 {
            let (a, b) = (f[k], f[(k + 1) % 3]);
            for &j in &by_edge[&(a.min(b), a.max(b))] {
                if j == i || out[j].is_some() {
                    continue;
                }
                let g = faces[j];
                // Neighbor must traverse the shared edge as b -> a.
                let has_ab = (0..3).any(|t| g[t] == a && g[(t + 1) % 3] == b);
                out[j] = Some(if has_ab { [g[0], g[2], g[1]] } else { g });
                queue.push_back(j);
            }
        }
    }
    out.into_iter().map(|f| f.expect("surface is connected")).collect()
}

fn rotation_from_faces(n: usize, faces: &[[Vertex; 3]]) -> Vec<Vec<Vertex>> {
    let mut succ: Vec<HashMap<Vertex, Vertex>> = vec![HashMap::new(); n];
    for f in faces {
        for k in 0..3 {
            succ[f[k]].insert(f[(k + 1) % 3], f[(k + 2) % 3]);
        }
    }
    succ.into_iter()
        .map(|s| {
            let Some(&start) = s.keys().min() else {
                return Vec::new();
            };
            let mut order = vec![start];
            let mut cur = s[&start];
            while cur != start {
                order.push(cur);
                cur = s[&cur];
            }
            order
        })
        .collect()
}

fn from_faces(n: usize, faces: &[[Vertex; 3]]) -> Graph {
    let oriented = orient_faces(faces);
    let edges = oriented.iter().flat_map(|f| [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])]);
    let g = Graph::from_edges(n, edges).expect("face edges are valid");
    let rot = rotation_from_faces(n, &oriented);
    g.with_rotation(rot).expect("face rotation permutes neighbors")
}

fn icosahedron_faces() -> Vec<[Vertex; 3]> {
    let up = |i: usize| 1 + i % 5;
    let low = |i: usize| 6 + i % 5;
    let mut faces = Vec::new();
    for i in 0..5 {
        faces.push([0, up(i), up(i + 1)]);
        faces.push([up(i), low(i), up(i + 1)]);
        faces.push([up(i + 1), low(i), low(i + 1)]);
        faces.push([11, low(i + 1), low(i)]);
    }
    faces
}

pub fn icosahedron() -> Graph {
    from_faces(12, &icosahedron_faces())
}

/// The dual of the icosahedron.
pub fn dodecahedron() -> Graph {
    let faces = orient_faces(&icosahedron_faces());
    let mut owner: HashMap<(Vertex, Vertex), usize> = HashMap::new();
    for (i, f) in faces.iter().enumerate() {
        for k in 0..3 {
            owner.insert((f[k], f[(k + 1) % 3]), i);
        }
    }
    let rotation: Vec<Vec<Vertex>> =
        faces.iter().map(|f| (0..3).map(|k| owner[&(f[(k + 1) % 3], f[k])]).collect()).collect();
    let edges: Vec<_> = rotation.iter().enumerate().flat_map(|(i, ns)| ns.iter().map(move |&j| (i, j))).collect();
    let g = Graph::from_edges(20, edges).expect("dual edges are valid");
    g.with_rotation(rotation).expect("dual rotation permutes neighbors")
}

/// Random sphere triangulation: stacked insertions followed by random edge
/// flips that keep the graph simple with minimum degree 3.
pub fn random_triangulation(n: usize, seed: u64) -> Graph {
    let n = n.max(4);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut faces: Vec<[Vertex; 3]> = vec![[0, 1, 2], [0, 2, 1]];
    for v in 3..n {
        let i = rng.gen_range(0..faces.len());
        let [a, b, c] = faces[i];
        faces[i] = [a, b, v];
        faces.push([b, c, v]);
        faces.push([c, a, v]);
    }
    let mut owner: HashMap<(Vertex, Vertex), usize> = HashMap::new();
    let mut degree = vec![0usize; n];
    let mut edges: HashSet<(Vertex, Vertex)> = HashSet::new();
    for (i, f) in faces.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (f[k], f[(k + 1) % 3]);
            owner.insert((a, b), i);
            if edges.insert((a.min(b), a.max(b))) {
                degree[a] += 1;
                degree[b] += 1;
            }
        }
    }
    for _ in 0..3 * n {
        let i = rng.gen_range(0..faces.len());
        let k = rng.gen_range(0..3);
        let f = faces[i];
        let (a, b, c) = (f[k], f[(k + 1) % 3], f[(k + 2) % 3]);
        let j = owner[&(b, a)];
        let g = faces[j];
        let t = (0..3).find(|&t| g[t] == b).unwrap();
        debug_assert_eq!(g[(t + 1) % 3], a);
        let d = g[(t + 2) % 3];
        if c == d || edges.contains(&(c.min(d), c.max(d))) || degree[a] <= 3 || degree[b] <= 3 {
            continue;
        }
        // Faces (a,b,c) and (b,a,d) become (a,d,c) and (d,b,c).
        for (x, y) in [(a, b), (b, c), (c, a), (b, a), (a, d), (d, b)] {
            owner.remove(&(x, y));
        }
        faces[i] = [a, d, c];
        faces[j] = [d, b, c];
        for (idx, face) in [(i, faces[i]), (j, faces[j])] {
            for s in 0..3 {
                owner.insert((face[s], face[(s + 1) % 3]), idx);
            }
        }
        edges.remove(&(a.min(b), a.max(b)));
        edges.insert((c.min(d), c.max(d)));
        degree[a] -= 1;
        degree[b] -= 1;
        degree[c] += 1;
        degree[d] += 1;
    }
    let g = Graph::from_edges(n, edges).expect("triangulation edges are valid");
    let rot = rotation_from_faces(n, &faces);
    g.with_rotation(rot).expect("face rotation permutes neighbors")
}

/// `count` vertex-disjoint triangles.
pub fn disjoint_triangles(count: usize) -> Graph {
    let edges = (0..count).flat_map(|t| {
        let b = 3 * t;
        [(b, b + 1), (b + 1, b + 2), (b + 2, b)]
    });
    let g = Graph::from_edges(3 * count, edges).expect("triangle edges are valid");
    let rot = (0..3 * count)
        .map(|v| {
            let b = v / 3 * 3;
            vec![b + (v - b + 1) % 3, b + (v - b + 2) % 3]
        })
        .collect();
    g.with_rotation(rot).expect("triangle rotation permutes neighbors")
}

pub fn path(n: usize) -> Graph {
    let coords: Vec<_> = (0..n).map(|i| (i as f64, 0.0)).collect();
    with_coords(n, (1..n).map(|i| (i - 1, i)).collect(), &coords)
}

pub fn cycle(n: usize) -> Graph {
    let coords: Vec<_> = (0..n)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / n as f64;
            (t.cos(), t.sin())
        })
        .collect();
    with_coords(n, (0..n).map(|i| (i, (i + 1) % n)).collect(), &coords)
}

pub fn complete(n: usize) -> Graph {
    Graph::from_edges(n, (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)))).unwrap()
}

pub fn complete_bipartite(a: usize, b: usize) -> Graph {
    Graph::from_edges(a + b, (0..a).flat_map(|x| (0..b).map(move |y| (x, a + y)))).unwrap()
}

/// Relabels `graph` by a permutation (`perm[old] = new`).
pub fn relabel(graph: &Graph, perm: &[Vertex]) -> Graph {
    let edges = graph.edges().map(|(u, v)| (perm[u], perm[v]));
    Graph::from_edges(graph.n(), edges).expect("relabeling preserves validity").with_genus(graph.genus())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::is_planar;

    #[test]
    fn family_girths_match_contract() {
        for family in Family::ALL {
            for size in [3, 4, 6] {
                let g = generate_graph(family, size, 7);
                let expected = if family == Family::DisjointUnion { 3 } else { family.girth() };
                assert_eq!(g.girth(), Some(expected), "{family:?} size {size}");
            }
        }
    }

    #[test]
    fn list_sizes_follow_girth_class() {
        let expect = [(Family::TriGrid, 5), (Family::HexGrid, 3), (Family::SquareGrid, 4)];
        for (family, k) in expect {
            let inst = generate(&GeneratorSpec { family, size: 4, seed: 1, list_mode: ListMode::Random });
            assert!(inst.lists.lists().iter().all(|l| l.len() == k));
            assert!(inst.lists.check_type_345(&inst.graph).is_ok());
        }
    }

    #[test]
    fn platonic_solids() {
        let ico = icosahedron();
        assert_eq!((ico.n(), ico.m()), (12, 30));
        assert!(ico.vertices().all(|v| ico.degree(v) == 5));
        let dod = dodecahedron();
        assert_eq!((dod.n(), dod.m()), (20, 30));
        assert!(dod.vertices().all(|v| dod.degree(v) == 3));
    }

    #[test]
    fn triangulations_are_maximal_planar() {
        for seed in 0..5 {
            let g = random_triangulation(50, seed);
            assert_eq!(g.m(), 3 * 50 - 6);
            assert!(g.vertices().all(|v| g.degree(v) >= 3));
            assert!(is_planar(&g));
            assert!(g.rotation().is_some());
        }
    }

    #[test]
    fn hex_grid_has_no_dangling_vertices() {
        let g = hex_grid(5);
        assert!(g.vertices().all(|v| (2..=3).contains(&g.degree(v))));
        assert!(g.is_connected());
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(random_triangulation(80, 3), random_triangulation(80, 3));
        assert_ne!(random_triangulation(80, 3), random_triangulation(80, 4));
    }
}
