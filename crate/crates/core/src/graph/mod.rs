//! Undirected multigraphs with named vertices.
//!
//! Vertices are interned as indices into the vertex list; edges are endpoint
//! index pairs oriented so the lexicographically smaller name comes first.
//! Edge ids are positions in the edge list and are what the rest of the crate
//! attaches data to.

mod presets;
mod random;
mod steiner;

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use presets::{preset, PRESET_NAMES};
pub use random::random_regular;
pub use steiner::{steiner_tree, steiner_tree_rooted, TreeSubgraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("duplicate vertex {0:?}")]
    DuplicateVertex(String),
    #[error("edge id {0} out of range")]
    UnknownEdge(usize),
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    #[error("terminal set is empty")]
    NoTerminals,
    #[error("terminals {0:?} and {1:?} lie in different components")]
    Disconnected(String, String),
    #[error("path length must be at least 1")]
    ZeroLength,
    #[error("malformed graph: {0}")]
    Malformed(String),
}

/// Shortest-cycle length, or `None` for a forest.
pub type Girth = Option<usize>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiGraph {
    names: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<(usize, usize)>>,
}

/// A walk that never repeats an edge, listed as vertices and the edges between them.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

impl Path {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

impl MultiGraph {
    pub fn new<S: AsRef<str>>(vertices: &[S], edges: &[(S, S)]) -> Result<Self, GraphError> {
        let names: Vec<String> = vertices.iter().map(|s| s.as_ref().to_string()).collect();
        let mut index = HashMap::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(GraphError::DuplicateVertex(n.clone()));
            }
        }
        let mut idx_edges = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            let a = *index
                .get(u.as_ref())
                .ok_or_else(|| GraphError::UnknownVertex(u.as_ref().to_string()))?;
            let b = *index
                .get(v.as_ref())
                .ok_or_else(|| GraphError::UnknownVertex(v.as_ref().to_string()))?;
            idx_edges.push((a, b));
        }
        Ok(Self::from_indices(names, idx_edges))
    }

    /// Builds from an index edge list; endpoints must be in range.
    pub fn from_indices(names: Vec<String>, edges: Vec<(usize, usize)>) -> Self {
        let index = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i))
            .collect();
        let mut g = Self {
            names,
            index,
            edges: Vec::with_capacity(edges.len()),
            adj: Vec::new(),
        };
        for (a, b) in edges {
            assert!(
                a < g.names.len() && b < g.names.len(),
                "edge endpoint out of range"
            );
            let e = if g.names[a] <= g.names[b] {
                (a, b)
            } else {
                (b, a)
            };
            g.edges.push(e);
        }
        g.rebuild_adjacency();
        g
    }

    fn rebuild_adjacency(&mut self) {
        self.adj = vec![Vec::new(); self.names.len()];
        for (id, &(a, b)) in self.edges.iter().enumerate() {
            self.adj[a].push((b, id));
            if a != b {
                self.adj[b].push((a, id));
            }
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn vertex(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> (usize, usize) {
        self.edges[id]
    }

    /// Neighbors of `v` as `(neighbor, edge id)` pairs.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v]
            .iter()
            .map(|&(w, _)| if w == v { 2 } else { 1 })
            .sum()
    }

    /// The id of an edge joining `a` and `b`, if any (the first one for multigraphs).
    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.adj[a]
            .iter()
            .find(|&&(w, _)| w == b)
            .map(|&(_, id)| id)
    }

    pub fn other_end(&self, id: usize, v: usize) -> usize {
        let (a, b) = self.edges[id];
        if a == v {
            b
        } else {
            a
        }
    }

    pub fn is_simple(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.edges
            .iter()
            .all(|&(a, b)| a != b && seen.insert((a, b)))
    }

    pub fn is_regular(&self, d: usize) -> bool {
        (0..self.vertex_count()).all(|v| self.degree(v) == d)
    }

    /// Connected components as sorted vertex lists, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut comp = vec![usize::MAX; self.vertex_count()];
        let mut out = Vec::new();
        for s in 0..self.vertex_count() {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![s];
            comp[s] = id;
            let mut q = VecDeque::from([s]);
            while let Some(x) = q.pop_front() {
                for &(y, _) in &self.adj[x] {
                    if comp[y] == usize::MAX {
                        comp[y] = id;
                        members.push(y);
                        q.push_back(y);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// Component id per vertex, numbered as in [`MultiGraph::components`].
    pub fn component_ids(&self) -> Vec<usize> {
        let mut ids = vec![0; self.vertex_count()];
        for (c, members) in self.components().iter().enumerate() {
            for &v in members {
                ids[v] = c;
            }
        }
        ids
    }

    /// BFS hop distances from `s` (`usize::MAX` when unreachable).
    pub fn distances_from(&self, s: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.vertex_count()];
        dist[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(x) = q.pop_front() {
            for &(y, _) in &self.adj[x] {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    q.push_back(y);
                }
            }
        }
        dist
    }

    /// Length of the shortest cycle. A self-loop is a 1-cycle and a pair of
    /// parallel edges a 2-cycle.
    pub fn girth(&self) -> Girth {
        if self.edges.iter().any(|&(a, b)| a == b) {
            return Some(1);
        }
        if !self.is_simple() {
            return Some(2);
        }
        let n = self.vertex_count();
        let mut best = usize::MAX;
        let mut dist = vec![usize::MAX; n];
        let mut parent_edge = vec![usize::MAX; n];
        for root in 0..n {
            dist.iter_mut().for_each(|d| *d = usize::MAX);
            dist[root] = 0;
            let mut q = VecDeque::from([root]);
            while let Some(x) = q.pop_front() {
                if 2 * dist[x] + 1 >= best {
                    break;
                }
                for &(y, e) in &self.adj[x] {
                    if e == parent_edge[x] {
                        continue;
                    }
                    if dist[y] == usize::MAX {
                        dist[y] = dist[x] + 1;
                        parent_edge[y] = e;
                        q.push_back(y);
                    } else {
                        best = best.min(dist[x] + dist[y] + 1);
                    }
                }
            }
            parent_edge.iter_mut().for_each(|p| *p = usize::MAX);
        }
        (best != usize::MAX).then_some(best)
    }

    /// All edge-nonrepeating paths with `r` edges whose first edge is `edge`,
    /// traversed in both orientations.
    pub fn paths_from_edge(&self, edge: usize, r: usize) -> Result<Vec<Path>, GraphError> {
        if edge >= self.edge_count() {
            return Err(GraphError::UnknownEdge(edge));
        }
        if r == 0 {
            return Err(GraphError::ZeroLength);
        }
        let (a, b) = self.edges[edge];
        let mut out = Vec::new();
        let starts: &[(usize, usize)] = if a == b { &[(a, b)] } else { &[(a, b), (b, a)] };
        for &(s, t) in starts {
            let mut path = Path {
                vertices: vec![s, t],
                edges: vec![edge],
            };
            self.extend_paths(&mut path, r, &mut out);
        }
        Ok(out)
    }

    fn extend_paths(&self, path: &mut Path, r: usize, out: &mut Vec<Path>) {
        if path.edges.len() == r {
            out.push(path.clone());
            return;
        }
        let tip = *path.vertices.last().expect("nonempty path");
        for &(next, e) in &self.adj[tip] {
            if path.edges.contains(&e) {
                continue;
            }
            path.edges.push(e);
            path.vertices.push(next);
            self.extend_paths(path, r, out);
            path.edges.pop();
            path.vertices.pop();
        }
    }

    /// Copy with vertices sorted by name and edges sorted by endpoint names.
    /// Returns the graph and, for each old edge id, its new id.
    pub fn canonicalize(&self) -> (MultiGraph, Vec<usize>) {
        let mut order: Vec<usize> = (0..self.vertex_count()).collect();
        order.sort_by(|&a, &b| self.names[a].cmp(&self.names[b]));
        let mut remap = vec![0; self.vertex_count()];
        for (new, &old) in order.iter().enumerate() {
            remap[old] = new;
        }
        let names: Vec<String> = order.iter().map(|&i| self.names[i].clone()).collect();
        let mut keyed: Vec<((usize, usize), usize)> = self
            .edges
            .iter()
            .enumerate()
            .map(|(id, &(a, b))| {
                let (x, y) = (remap[a], remap[b]);
                ((x.min(y), x.max(y)), id)
            })
            .collect();
        keyed.sort();
        let mut edge_map = vec![0; self.edge_count()];
        for (new, &(_, old)) in keyed.iter().enumerate() {
            edge_map[old] = new;
        }
        let g = MultiGraph::from_indices(names, keyed.into_iter().map(|(e, _)| e).collect());
        (g, edge_map)
    }

    /// The subgraph on all vertices keeping only the listed edges (in the given order).
    pub fn edge_subgraph(&self, keep: &[usize]) -> MultiGraph {
        MultiGraph::from_indices(
            self.names.clone(),
            keep.iter().map(|&e| self.edges[e]).collect(),
        )
    }

    pub fn to_json(&self) -> GraphJson {
        let (g, _) = self.canonicalize();
        GraphJson {
            format: GRAPH_FORMAT.to_string(),
            vertices: g.names.clone(),
            edges: g
                .edges
                .iter()
                .map(|&(a, b)| [g.names[a].clone(), g.names[b].clone()])
                .collect(),
        }
    }

    pub fn from_json(json: &GraphJson) -> Result<Self, GraphError> {
        if json.format != GRAPH_FORMAT {
            return Err(GraphError::Malformed(format!(
                "unexpected format {:?}",
                json.format
            )));
        }
        let edges: Vec<(&str, &str)> = json
            .edges
            .iter()
            .map(|[a, b]| (a.as_str(), b.as_str()))
            .collect();
        let names: Vec<&str> = json.vertices.iter().map(String::as_str).collect();
        MultiGraph::new(&names, &edges)
    }
}

pub const GRAPH_FORMAT: &str = "graph-v1";

/// Wire form: `{"format":"graph-v1","vertices":[...],"edges":[["u","v"],...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub format: String,
    pub vertices: Vec<String>,
    pub edges: Vec<[String; 2]>,
}
