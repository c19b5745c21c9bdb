use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

use super::{Arena, Bijection, Game};
use crate::construction::{edge_consistent, extend_along_path, GapContext};
use crate::gf2::Gf2Vector;
use crate::graph::{steiner_tree_rooted, Path, TreeSubgraph};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum DuplicatorError {
    #[error("the tree strategy needs lifted structures over the context's base graph")]
    ContextMismatch,
    #[error("the tree strategy supports at most 15 pebble pairs, got {0}")]
    TooManyPebbles(usize),
}

/// A Duplicator agent: proposes a bijection after each pickup and may keep
/// memory between rounds.
pub trait Duplicator: Send {
    fn name(&self) -> &'static str;

    fn bijection(&mut self, game: &Game) -> Result<Bijection, DuplicatorError>;

    /// Called once Spoiler has placed the picked pair on `a`.
    fn observe_placement(&mut self, _game: &Game, _a: usize) {}

    /// Bytes identifying everything that influences future moves.
    fn memory_key(&self) -> Vec<u8> {
        Vec::new()
    }

    fn box_clone(&self) -> Box<dyn Duplicator>;
}

/// Always the identity: all-zero g* on lifted arenas, the identity table otherwise.
#[derive(Debug, Clone, Default)]
pub struct IdentityDuplicator;

impl Duplicator for IdentityDuplicator {
    fn name(&self) -> &'static str {
        "identity"
    }

    fn bijection(&mut self, game: &Game) -> Result<Bijection, DuplicatorError> {
        let ar = game.arena();
        Ok(match ar.lift_index() {
            Some(idx) => Bijection::GStar(vec![Gf2Vector::zero(idx.m()); idx.base_count()]),
            None => Bijection::Table((0..ar.size()).collect()),
        })
    }

    fn box_clone(&self) -> Box<dyn Duplicator> {
        Box::new(self.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TreeOptions {
    /// Count the query vertex `u` among the anchors of `T(u)`.
    pub query_vertex_is_anchor: bool,
    /// Keep only `g*(u, u)` per round and rebuild the placed vertex's map on demand.
    pub lazy: bool,
    /// Check every computed map against the edges it must respect.
    pub audit: bool,
}

/// Findings of audit mode.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TreeAudit {
    pub trees_checked: u64,
    /// H-edges inside `V(T(u))` that `g*(u, ·)` leaves inconsistent.
    pub inconsistent_edges: Vec<String>,
    /// Pebbled vertices whose value differs from the previous round.
    pub memory_breaks: Vec<String>,
}

type Labels = BTreeMap<usize, Gf2Vector>;

#[derive(Debug, Clone, PartialEq, Eq)]
struct Memory {
    tree: TreeSubgraph,
    labels: Labels,
}

/// The tree strategy. For every base vertex `u` it spans `u` and the pebbled
/// vertices of its component with a Steiner tree `T(u)` rooted at `u`, and
/// labels `V(T(u))` with shifts `g*(u, ·)`:
///
/// 1. vertices shared with the previous tree keep their previous values;
/// 2. segments of new edges shorter than `r` are filled by `g(v₂) = g(v₁) + b`
///    from already labelled vertices (or from a zero seed);
/// 3. longer segments are filled by path extension between their ends.
///
/// A segment is a maximal path of edges new to `T(u)` whose inner vertices
/// are not anchors, not in the previous tree and not leaves. Anchors are the
/// pebbled vertices and the vertices of tree degree at least 3. The proposed
/// bijection shifts `v` by `g*(v, v)`; after the placement on `u*` the tree
/// and labels of `u*` become the memory of its component.
#[derive(Debug, Clone)]
pub struct TreeDuplicator {
    ctx: Arc<GapContext>,
    options: TreeOptions,
    /// Graph vertex of each lift base index, and back.
    vertex_of_base: Vec<usize>,
    base_of_vertex: Vec<usize>,
    component: Vec<usize>,
    memory: Vec<Option<Memory>>,
    last_pebbled: Vec<usize>,
    computed: Vec<Option<Memory>>,
    audit: TreeAudit,
}

impl TreeDuplicator {
    pub fn new(
        ctx: GapContext,
        arena: &Arena,
        options: TreeOptions,
    ) -> Result<Self, DuplicatorError> {
        let idx = arena.lift_index().ok_or(DuplicatorError::ContextMismatch)?;
        let g = &ctx.graph;
        if idx.m() != ctx.data.m() || idx.base_count() != g.vertex_count() {
            return Err(DuplicatorError::ContextMismatch);
        }
        let vertex_of_base: Vec<usize> = idx
            .base_names()
            .iter()
            .map(|n| g.vertex(n).ok_or(DuplicatorError::ContextMismatch))
            .collect::<Result<_, _>>()?;
        let mut base_of_vertex = vec![0; g.vertex_count()];
        for (b, &v) in vertex_of_base.iter().enumerate() {
            base_of_vertex[v] = b;
        }
        let component = g.component_ids();
        let comps = component.iter().max().map_or(0, |c| c + 1);
        Ok(Self {
            options,
            vertex_of_base,
            base_of_vertex,
            component,
            memory: vec![None; comps],
            last_pebbled: Vec::new(),
            computed: Vec::new(),
            audit: TreeAudit::default(),
            ctx: Arc::new(ctx),
        })
    }

    pub fn audit(&self) -> &TreeAudit {
        &self.audit
    }

    /// Tree and labels of the last placement in `v`'s component.
    pub fn memory_of(&self, v: usize) -> Option<(&TreeSubgraph, &BTreeMap<usize, Gf2Vector>)> {
        self.memory[self.component[v]]
            .as_ref()
            .map(|m| (&m.tree, &m.labels))
    }

    /// `T(u)` and `g*(u, ·)` for the given pebbled vertices.
    pub fn tree_labels(
        &self,
        u: usize,
        pebbled: &[usize],
    ) -> (TreeSubgraph, BTreeMap<usize, Gf2Vector>) {
        let m = self.compute(u, pebbled);
        (m.tree, m.labels)
    }

    fn compute(&self, u: usize, pebbled: &[usize]) -> Memory {
        let h = &self.ctx.graph;
        let data = &self.ctx.data;
        let c = self.component[u];
        let mut terminals: Vec<usize> = pebbled
            .iter()
            .copied()
            .filter(|&v| self.component[v] == c)
            .collect();
        terminals.push(u);
        terminals.sort_unstable();
        terminals.dedup();
        let tree = steiner_tree_rooted(h, &terminals, u).expect("terminals share a component");
        let empty = Memory {
            tree: TreeSubgraph::default(),
            labels: Labels::new(),
        };
        let prev = self.memory[c].as_ref().unwrap_or(&empty);

        let mut labels = Labels::new();
        for v in tree.vertices.intersection(&prev.tree.vertices) {
            labels.insert(*v, prev.labels[v]);
        }

        let degree = |v: usize| tree.degree(h, v);
        let mut boundary: BTreeSet<usize> = tree
            .vertices
            .intersection(&prev.tree.vertices)
            .copied()
            .collect();
        boundary.extend(terminals.iter().filter(|&&v| v != u));
        boundary.extend(
            tree.vertices
                .iter()
                .filter(|&&v| degree(v) >= 3 || degree(v) <= 1),
        );
        if self.options.query_vertex_is_anchor {
            boundary.insert(u);
        }
        let fresh: BTreeSet<usize> = tree.edges.difference(&prev.tree.edges).copied().collect();

        let mut used = BTreeSet::new();
        let mut segments = Vec::new();
        for &s in &boundary {
            for &(_, e) in h.neighbors(s) {
                if !fresh.contains(&e) || used.contains(&e) {
                    continue;
                }
                let mut path = Path {
                    vertices: vec![s],
                    edges: Vec::new(),
                };
                let (mut cur, mut edge) = (s, e);
                loop {
                    used.insert(edge);
                    cur = h.other_end(edge, cur);
                    path.edges.push(edge);
                    path.vertices.push(cur);
                    if boundary.contains(&cur) {
                        break;
                    }
                    edge = h
                        .neighbors(cur)
                        .iter()
                        .map(|&(_, f)| f)
                        .find(|f| fresh.contains(f) && !used.contains(f))
                        .expect("inner segment vertices have two fresh tree edges");
                }
                segments.push(path);
            }
        }
        let short = |p: &Path| self.ctx.r.is_none_or(|r| p.len() < r);

        let forest: BTreeSet<usize> = segments
            .iter()
            .filter(|p| short(p))
            .flat_map(|p| p.edges.iter().copied())
            .collect();
        let forest_vertices: BTreeSet<usize> = segments
            .iter()
            .filter(|p| short(p))
            .flat_map(|p| p.vertices.iter().copied())
            .collect();
        loop {
            let step = forest.iter().find_map(|&e| {
                let (x, y) = h.edge(e);
                match (labels.get(&x), labels.get(&y)) {
                    (Some(&gx), None) => Some((y, gx + data.b(e))),
                    (None, Some(&gy)) => Some((x, gy + data.b(e))),
                    _ => None,
                }
            });
            if let Some((v, g)) = step {
                labels.insert(v, g);
            } else if let Some(&v) = forest_vertices.iter().find(|v| !labels.contains_key(v)) {
                labels.insert(v, Gf2Vector::zero(data.m()));
            } else {
                break;
            }
        }

        for p in segments.iter().filter(|p| !short(p)) {
            let (s, t) = (p.vertices[0], *p.vertices.last().expect("nonempty"));
            let gs = *labels.entry(s).or_insert(Gf2Vector::zero(data.m()));
            let gt = *labels.entry(t).or_insert(Gf2Vector::zero(data.m()));
            match extend_along_path(p, data, gs, gt) {
                Ok(values) => {
                    for (v, g) in p.vertices.iter().zip(values) {
                        labels.insert(*v, g);
                    }
                }
                Err(_) => {
                    let mut g = gs;
                    for (i, &e) in p.edges.iter().enumerate().take(p.len() - 1) {
                        g += data.b(e);
                        labels.insert(p.vertices[i + 1], g);
                    }
                }
            }
        }
        for &v in &tree.vertices {
            labels.entry(v).or_insert(Gf2Vector::zero(data.m()));
        }
        Memory { tree, labels }
    }

    fn check(&mut self, u: usize, mem: &Memory, pebbled: &[usize]) {
        let h = &self.ctx.graph;
        let data = &self.ctx.data;
        self.audit.trees_checked += 1;
        for (e, &(x, y)) in h.edges().iter().enumerate() {
            if let (Some(gx), Some(gy)) = (mem.labels.get(&x), mem.labels.get(&y)) {
                if !edge_consistent(gx, gy, &data.b(e), data.z(e)) {
                    self.audit.inconsistent_edges.push(format!(
                        "T({}) edge {}-{}",
                        h.name(u),
                        h.name(x),
                        h.name(y)
                    ));
                }
            }
        }
        if let Some(prev) = &self.memory[self.component[u]] {
            for v in pebbled
                .iter()
                .filter(|&&v| self.component[v] == self.component[u])
            {
                if prev.labels.get(v) != mem.labels.get(v) {
                    self.audit.memory_breaks.push(format!(
                        "T({}) vertex {}",
                        h.name(u),
                        h.name(*v)
                    ));
                }
            }
        }
    }

    fn pebbled(&self, game: &Game) -> Vec<usize> {
        let idx = game.arena().lift_index().expect("checked at construction");
        let mut out: Vec<usize> = game
            .pairs()
            .iter()
            .map(|&(a, _)| self.vertex_of_base[idx.split(a).0])
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

impl Duplicator for TreeDuplicator {
    fn name(&self) -> &'static str {
        "tree"
    }

    fn bijection(&mut self, game: &Game) -> Result<Bijection, DuplicatorError> {
        if game.k() > 15 {
            return Err(DuplicatorError::TooManyPebbles(game.k()));
        }
        let pebbled = self.pebbled(game);
        let n = self.ctx.graph.vertex_count();
        let mut shift = vec![Gf2Vector::zero(self.ctx.data.m()); n];
        self.computed = vec![None; n];
        for u in 0..n {
            let mem = self.compute(u, &pebbled);
            if self.options.audit {
                self.check(u, &mem, &pebbled);
            }
            shift[self.base_of_vertex[u]] = mem.labels[&u];
            if !self.options.lazy {
                self.computed[u] = Some(mem);
            }
        }
        self.last_pebbled = pebbled;
        Ok(Bijection::GStar(shift))
    }

    fn observe_placement(&mut self, game: &Game, a: usize) {
        let idx = game.arena().lift_index().expect("checked at construction");
        let u = self.vertex_of_base[idx.split(a).0];
        let mem = match self.computed.get_mut(u).and_then(Option::take) {
            Some(m) => m,
            None => self.compute(u, &self.last_pebbled.clone()),
        };
        self.computed.clear();
        let c = self.component[u];
        self.memory[c] = Some(mem);
    }

    fn memory_key(&self) -> Vec<u8> {
        let mut key = Vec::new();
        for m in self.memory.iter().flatten() {
            key.extend(m.tree.edges.iter().flat_map(|e| (*e as u32).to_le_bytes()));
            key.push(0xff);
            key.extend(
                m.tree
                    .vertices
                    .iter()
                    .flat_map(|v| (*v as u32).to_le_bytes()),
            );
            key.push(0xfe);
            key.extend(m.labels.values().flat_map(|g| g.word().to_le_bytes()));
            key.push(0xfd);
        }
        key
    }

    fn box_clone(&self) -> Box<dyn Duplicator> {
        Box::new(self.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::Arena;
    use crate::presets::lifted_preset;

    fn setup(name: &str, options: TreeOptions) -> (Game, TreeDuplicator) {
        let p = lifted_preset(name).unwrap();
        let arena = Arena::new(p.a, p.b).unwrap();
        let dup = TreeDuplicator::new(p.context, &arena, options).unwrap();
        (Game::new(arena, 3).unwrap(), dup)
    }

    #[test]
    fn first_round_is_identity_shaped() {
        let (mut game, mut dup) = setup("fig3-lifted", TreeOptions::default());
        game.pickup(0).unwrap();
        assert_eq!(
            dup.bijection(&game).unwrap(),
            Bijection::GStar(vec![Gf2Vector::zero(2); 4])
        );
    }

    #[test]
    fn narrated_position_on_k4() {
        // pebbles on v1 and v3 with g*(v3) = 00, g*(v1) = 01
        let (_, mut dup) = setup("fig3-lifted", TreeOptions::default());
        let g = dup.ctx.graph.clone();
        let (v1, v3, v4) = (
            g.vertex("v1").unwrap(),
            g.vertex("v3").unwrap(),
            g.vertex("v4").unwrap(),
        );
        let e13 = g.edge_between(v1, v3).unwrap();
        let tree = TreeSubgraph {
            vertices: [v1, v3].into(),
            edges: [e13].into(),
        };
        let labels: Labels = [(v1, "01".parse().unwrap()), (v3, "00".parse().unwrap())].into();
        dup.memory[0] = Some(Memory { tree, labels });
        let (_, out) = dup.tree_labels(v4, &[v1, v3]);
        let g4 = out[&v4];
        let ok34: Vec<Gf2Vector> = ["00", "01"].iter().map(|s| s.parse().unwrap()).collect();
        let ok14: Vec<Gf2Vector> = ["00", "11"].iter().map(|s| s.parse().unwrap()).collect();
        assert!(ok34.contains(&(g4 + out[&v3] + "10".parse().unwrap())));
        assert!(ok14.contains(&(g4 + out[&v1])));
    }
}
