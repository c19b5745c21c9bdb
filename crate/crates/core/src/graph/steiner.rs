//! Minimum-edge Steiner trees for small terminal sets.
//!
//! Dreyfus–Wagner dynamic programming over subsets of terminals with unit
//! edge weights. `cost[S][v]` is the fewest edges of a tree connecting the
//! terminal subset `S` together with vertex `v`. Each entry is produced either
//! by merging two subtrees at `v` or by stepping across one edge from a
//! neighbor; on equal cost the merge wins, then the earlier split, then the
//! smaller neighbor. Rooting the recursion at a chosen terminal therefore
//! prefers trees in which that terminal joins the others directly.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use super::{GraphError, MultiGraph};

/// A tree inside a host graph, as vertex and edge-id sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct TreeSubgraph {
    pub vertices: BTreeSet<usize>,
    pub edges: BTreeSet<usize>,
}

impl TreeSubgraph {
    pub fn single(v: usize) -> Self {
        Self {
            vertices: BTreeSet::from([v]),
            edges: BTreeSet::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Degree of `v` counting only tree edges.
    pub fn degree(&self, g: &MultiGraph, v: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&e| {
                let (a, b) = g.edge(e);
                a == v || b == v
            })
            .count()
    }

    /// Connected, acyclic, and every edge present in `g` with endpoints in the vertex set.
    pub fn is_valid_tree(&self, g: &MultiGraph) -> bool {
        if self.vertices.is_empty() {
            return self.edges.is_empty();
        }
        if self.edges.len() + 1 != self.vertices.len() {
            return false;
        }
        for &e in &self.edges {
            if e >= g.edge_count() {
                return false;
            }
            let (a, b) = g.edge(e);
            if a == b || !self.vertices.contains(&a) || !self.vertices.contains(&b) {
                return false;
            }
        }
        // n-1 edges and connected implies acyclic
        let start = *self.vertices.iter().next().expect("nonempty");
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            for &(y, e) in g.neighbors(x) {
                if self.edges.contains(&e) && seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        seen.len() == self.vertices.len()
    }

    pub fn union(&self, other: &TreeSubgraph) -> TreeSubgraph {
        TreeSubgraph {
            vertices: self.vertices.union(&other.vertices).copied().collect(),
            edges: self.edges.union(&other.edges).copied().collect(),
        }
    }
}

#[derive(Clone, Copy)]
enum Step {
    Unset,
    Terminal,
    Merge(u32),
    Move { from: usize, edge: usize },
}

const INF: u32 = u32::MAX / 4;

/// A minimum-edge tree containing every terminal.
pub fn steiner_tree(g: &MultiGraph, terminals: &[usize]) -> Result<TreeSubgraph, GraphError> {
    let root = *terminals.iter().min().ok_or(GraphError::NoTerminals)?;
    steiner_tree_rooted(g, terminals, root)
}

/// Like [`steiner_tree`], with ties resolved from the point of view of `root`
/// (which is added to the terminal set).
pub fn steiner_tree_rooted(
    g: &MultiGraph,
    terminals: &[usize],
    root: usize,
) -> Result<TreeSubgraph, GraphError> {
    let mut rest: Vec<usize> = terminals.iter().copied().filter(|&t| t != root).collect();
    rest.sort_unstable();
    rest.dedup();
    let comp = g.component_ids();
    for &t in &rest {
        if comp[t] != comp[root] {
            return Err(GraphError::Disconnected(
                g.name(root).to_string(),
                g.name(t).to_string(),
            ));
        }
    }
    if rest.is_empty() {
        return Ok(TreeSubgraph::single(root));
    }
    let n = g.vertex_count();
    let t = rest.len();
    assert!(t < 16, "terminal set too large for exact Steiner search");
    let full = (1usize << t) - 1;
    let mut cost = vec![vec![INF; n]; full + 1];
    let mut step = vec![vec![Step::Unset; n]; full + 1];

    for s in 1..=full {
        if s.count_ones() == 1 {
            let i = s.trailing_zeros() as usize;
            cost[s][rest[i]] = 0;
            step[s][rest[i]] = Step::Terminal;
        } else {
            for v in 0..n {
                // proper nonempty subsets, each unordered split visited once
                let mut a = (s - 1) & s;
                while a > 0 {
                    if a & (s & s.wrapping_neg()) != 0 {
                        let c = cost[a][v].saturating_add(cost[s ^ a][v]);
                        if c < cost[s][v] {
                            cost[s][v] = c;
                            step[s][v] = Step::Merge(a as u32);
                        }
                    }
                    a = (a - 1) & s;
                }
            }
        }
        relax(g, &mut cost[s], &mut step[s]);
    }

    let mut tree = TreeSubgraph::default();
    rebuild(&step, full, root, &mut tree);
    debug_assert_eq!(tree.edge_count() as u32, cost[full][root]);
    Ok(tree)
}

/// Dijkstra with unit weights from every finite entry; strict improvement only.
fn relax(g: &MultiGraph, cost: &mut [u32], step: &mut [Step]) {
    let mut heap: BinaryHeap<Reverse<(u32, usize)>> = cost
        .iter()
        .enumerate()
        .filter(|(_, &c)| c < INF)
        .map(|(v, &c)| Reverse((c, v)))
        .collect();
    while let Some(Reverse((c, v))) = heap.pop() {
        if c > cost[v] {
            continue;
        }
        for &(w, e) in g.neighbors(v) {
            if c + 1 < cost[w] {
                cost[w] = c + 1;
                step[w] = Step::Move { from: v, edge: e };
                heap.push(Reverse((c + 1, w)));
            }
        }
    }
}

fn rebuild(step: &[Vec<Step>], s: usize, v: usize, tree: &mut TreeSubgraph) {
    tree.vertices.insert(v);
    match step[s][v] {
        Step::Terminal => {}
        Step::Merge(a) => {
            rebuild(step, a as usize, v, tree);
            rebuild(step, s ^ a as usize, v, tree);
        }
        Step::Move { from, edge } => {
            tree.edges.insert(edge);
            rebuild(step, s, from, tree);
        }
        Step::Unset => unreachable!("unreachable terminal survived the component check"),
    }
}
