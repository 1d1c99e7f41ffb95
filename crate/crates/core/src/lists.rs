//! List assignments of type 345: lists of size `8 - g` on graphs of girth
//! at least `g`, for a girth class `g` in {3, 4, 5}.

use std::collections::BTreeMap;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Color, Graph, Vertex};

#[derive(Debug, Error)]
pub enum ListError {
    #[error("invalid list JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("girth class must be 3, 4 or 5, got {0}")]
    BadGirthClass(u32),
    #[error("vertex key {0:?} is not a vertex id")]
    BadVertexKey(String),
    #[error("list assignment covers {got} vertices, graph has {expected}")]
    WrongVertexCount { expected: usize, got: usize },
    #[error("vertex {vertex} has {len} colors, type-345 class needs {need}")]
    ListTooShort { vertex: Vertex, len: usize, need: usize },
    #[error("graph girth {girth} is below the class requirement {need}")]
    GirthViolation { girth: usize, need: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ListAssignment {
    lists: Vec<Vec<Color>>,
    girth_class: u32,
}

#[derive(Serialize, Deserialize)]
struct ListFile {
    g: u32,
    lists: BTreeMap<String, Vec<Color>>,
}

/// How generated lists are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ListMode {
    /// Lists drawn from a palette of `2k` colors.
    #[default]
    Random,
    /// Lists drawn from a palette of `k + 1` colors: neighbors share almost
    /// everything.
    Overlap,
    /// Lists drawn from a palette of `n * k` colors: mostly disjoint.
    Distinct,
}

impl ListAssignment {
    pub fn from_lists(lists: Vec<Vec<Color>>, girth_class: u32) -> Self {
        let lists = lists
            .into_iter()
            .map(|mut l| {
                l.sort_unstable();
                l.dedup();
                l
            })
            .collect();
        ListAssignment { lists, girth_class }
    }

    pub fn uniform(n: usize, colors: &[Color], girth_class: u32) -> Self {
        Self::from_lists(vec![colors.to_vec(); n], girth_class)
    }

    /// Seeded random lists of exactly `8 - g` colors.
    pub fn generate(n: usize, girth_class: u32, mode: ListMode, seed: u64) -> Self {
        let k = (8 - girth_class) as usize;
        let palette = match mode {
            ListMode::Random => 2 * k,
            ListMode::Overlap => k + 1,
            ListMode::Distinct => (n * k).max(k),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lists = (0..n)
            .map(|_| {
                let mut l: Vec<Color> = sample(&mut rng, palette, k).into_iter().map(|c| c as Color).collect();
                l.sort_unstable();
                l
            })
            .collect();
        ListAssignment { lists, girth_class }
    }

    /// Random lists of the given sizes over `0..palette` (test helper).
    pub fn random_with_sizes(sizes: &[usize], palette: usize, rng: &mut impl Rng) -> Self {
        let lists = sizes
            .iter()
            .map(|&s| {
                let mut l: Vec<Color> = sample(rng, palette, s.min(palette)).into_iter().map(|c| c as Color).collect();
                l.sort_unstable();
                l
            })
            .collect();
        ListAssignment { lists, girth_class: 3 }
    }

    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }

    pub fn list(&self, v: Vertex) -> &[Color] {
        &self.lists[v]
    }

    pub fn lists(&self) -> &[Vec<Color>] {
        &self.lists
    }

    pub fn girth_class(&self) -> u32 {
        self.girth_class
    }

    /// `8 - g`, the list size (and deletability parameter `r`).
    pub fn list_size(&self) -> usize {
        (8 - self.girth_class) as usize
    }

    /// Restriction to `vertices`, relabeled in that order.
    pub fn restrict(&self, vertices: &[Vertex]) -> Self {
        ListAssignment {
            lists: vertices.iter().map(|&v| self.lists[v].clone()).collect(),
            girth_class: self.girth_class,
        }
    }

    /// Checks the type-345 contract against `graph`: class in {3,4,5}, one
    /// list per vertex, every list of size at least `8 - g`, girth at least `g`.
    pub fn check_type_345(&self, graph: &Graph) -> Result<(), ListError> {
        if !(3..=5).contains(&self.girth_class) {
            return Err(ListError::BadGirthClass(self.girth_class));
        }
        if self.lists.len() != graph.n() {
            return Err(ListError::WrongVertexCount { expected: graph.n(), got: self.lists.len() });
        }
        let need = self.list_size();
        for (v, l) in self.lists.iter().enumerate() {
            if l.len() < need {
                return Err(ListError::ListTooShort { vertex: v, len: l.len(), need });
            }
        }
        let need = self.girth_class as usize;
        match graph.girth() {
            Some(girth) if girth < need => Err(ListError::GirthViolation { girth, need }),
            _ => Ok(()),
        }
    }

    pub fn to_json(&self) -> String {
        let file = ListFile {
            g: self.girth_class,
            lists: self.lists.iter().enumerate().map(|(v, l)| (v.to_string(), l.clone())).collect(),
        };
        serde_json::to_string(&file).expect("list files always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, ListError> {
        let file: ListFile = serde_json::from_str(text)?;
        if !(3..=5).contains(&file.g) {
            return Err(ListError::BadGirthClass(file.g));
        }
        let mut entries = Vec::with_capacity(file.lists.len());
        for (key, list) in file.lists {
            let v: Vertex = key.parse().map_err(|_| ListError::BadVertexKey(key.clone()))?;
            entries.push((v, list));
        }
        entries.sort_by_key(|e| e.0);
        if entries.iter().enumerate().any(|(i, e)| e.0 != i) {
            let got = entries.len();
            return Err(ListError::WrongVertexCount { expected: got, got });
        }
        Ok(Self::from_lists(entries.into_iter().map(|e| e.1).collect(), file.g))
    }
}
