//! Finite graph models of the parameter space and its connected components.
//!
//! Vertices are sample points, edges are adjacency. Components are labeled by
//! their smallest vertex id, which keeps every downstream index vector
//! byte-stable across runs.

use crate::error::{Error, Result};
use std::collections::BTreeMap;

/// A finite graph standing in for a compact, locally connected parameter space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamSpace {
    vertices: Vec<u32>,
    edges: Vec<(u32, u32)>,
}

impl ParamSpace {
    /// Validates and canonicalizes a graph: vertices sorted and unique, edges
    /// stored as ordered pairs sorted lexicographically, duplicates dropped.
    pub fn new(vertices: Vec<u32>, edges: Vec<(u32, u32)>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::Structure("vertex set is empty".into()));
        }
        let mut vs = vertices;
        vs.sort_unstable();
        if vs.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Structure("duplicate vertex id".into()));
        }
        let mut es = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            if a == b {
                return Err(Error::Structure(format!("self-loop at vertex {a}")));
            }
            if vs.binary_search(&a).is_err() || vs.binary_search(&b).is_err() {
                return Err(Error::Structure(format!(
                    "edge ({a}, {b}) references an undeclared vertex"
                )));
            }
            es.push((a.min(b), a.max(b)));
        }
        es.sort_unstable();
        es.dedup();
        Ok(ParamSpace { vertices: vs, edges: es })
    }

    /// Single-vertex space (one connected component).
    pub fn point() -> Self {
        ParamSpace { vertices: vec![0], edges: Vec::new() }
    }

    /// A path 0 – 1 – … – (n−1).
    pub fn path(n: u32) -> Result<Self> {
        let vertices = (0..n).collect();
        let edges = (1..n).map(|v| (v - 1, v)).collect();
        ParamSpace::new(vertices, edges)
    }

    /// A cycle on vertices 0..n.
    pub fn cycle(n: u32) -> Result<Self> {
        if n < 3 {
            return Err(Error::Structure("cycle needs at least 3 vertices".into()));
        }
        let vertices = (0..n).collect();
        let mut edges: Vec<(u32, u32)> = (1..n).map(|v| (v - 1, v)).collect();
        edges.push((0, n - 1));
        ParamSpace::new(vertices, edges)
    }

    pub fn vertices(&self) -> &[u32] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }
}

/// Connected-component labeling: each vertex maps to the smallest vertex id
/// in its component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentLabeling {
    label: BTreeMap<u32, u32>,
    count: usize,
}

impl ComponentLabeling {
    pub fn label_of(&self, vertex: u32) -> Option<u32> {
        self.label.get(&vertex).copied()
    }

    pub fn labels(&self) -> &BTreeMap<u32, u32> {
        &self.label
    }

    /// n_c: number of connected components.
    pub fn count(&self) -> usize {
        self.count
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, i: usize, j: usize) {
        let (a, b) = (self.find(i), self.find(j));
        if a != b {
            // Smaller root wins so labels come out canonical without a second pass.
            let (lo, hi) = (a.min(b), a.max(b));
            self.parent[hi] = lo;
        }
    }
}

/// Computes the connected components of a validated space.
///
/// Deterministic: labels are the smallest vertex id per component.
pub fn components(space: &ParamSpace) -> ComponentLabeling {
    let verts = space.vertices();
    let pos: BTreeMap<u32, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut uf = UnionFind::new(verts.len());
    for &(a, b) in space.edges() {
        uf.union(pos[&a], pos[&b]);
    }
    let mut label = BTreeMap::new();
    for (i, &v) in verts.iter().enumerate() {
        let root = uf.find(i);
        // verts is sorted, so the smallest index in a class is the smallest id.
        label.insert(v, verts[root]);
    }
    let mut distinct: Vec<u32> = label.values().copied().collect();
    distinct.sort_unstable();
    distinct.dedup();
    ComponentLabeling { label, count: distinct.len() }
}

/// One canonical representative vertex per component, ascending.
pub fn representatives(labeling: &ComponentLabeling) -> Vec<u32> {
    let mut reps: Vec<u32> = labeling.labels().values().copied().collect();
    reps.sort_unstable();
    reps.dedup();
    reps
}
