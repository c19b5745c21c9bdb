//! Group Unique Games over ℤ₂^m.
//!
//! A constraint `x_u − x_v = z` is the same as `x_u + x_v = z` in
//! characteristic 2, so bundles hang off undirected edges. Every edge of the
//! base graph carries a nonempty, duplicate-free bundle of shifts, and the
//! instance has one constraint per (edge, shift).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::{Gf2Vector, MAX_DIM};
use crate::graph::{GraphError, MultiGraph};

/// Exact satisfaction fraction.
pub type Fraction = Ratio<u64>;

pub const INSTANCE_FORMAT: &str = "ug-group-v1";

/// One broken invariant found by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Format(String),
    Dimension(usize),
    DuplicateVertex(String),
    UnknownVertex(String),
    SelfLoop(String),
    ParallelEdge(String, String),
    MissingBundle(String, String),
    DuplicateShift {
        u: String,
        v: String,
        shift: String,
    },
    ShiftLength {
        u: String,
        v: String,
        shift: String,
        expected: usize,
    },
    BadShift {
        u: String,
        v: String,
        shift: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Format(s) => write!(f, "unexpected format tag {s:?}"),
            Violation::Dimension(m) => write!(f, "m = {m} outside 1..={MAX_DIM}"),
            Violation::DuplicateVertex(v) => write!(f, "vertex {v} listed twice"),
            Violation::UnknownVertex(v) => write!(f, "edge endpoint {v} is not a vertex"),
            Violation::SelfLoop(v) => write!(f, "self-loop at {v}"),
            Violation::ParallelEdge(u, v) => write!(f, "parallel edges between {u} and {v}"),
            Violation::MissingBundle(u, v) => write!(f, "edge {u}-{v} has no bundle"),
            Violation::DuplicateShift { u, v, shift } => {
                write!(f, "edge {u}-{v} repeats shift {shift}")
            }
            Violation::ShiftLength {
                u,
                v,
                shift,
                expected,
            } => {
                write!(
                    f,
                    "edge {u}-{v}: shift {shift} has length {}, expected {expected}",
                    shift.len()
                )
            }
            Violation::BadShift { u, v, shift } => {
                write!(f, "edge {u}-{v}: {shift:?} is not a bitstring")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("invalid instance: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("assignment has no label for vertex {0}")]
    MissingVertex(String),
    #[error("label for {vertex} has length {found}, expected {expected}")]
    LabelLength {
        vertex: String,
        expected: usize,
        found: usize,
    },
    #[error("instance has no constraints")]
    NoConstraints,
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

/// A GroupUniqueGames instance with labels in 𝔽₂^m.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupUgInstance {
    m: usize,
    graph: MultiGraph,
    bundles: Vec<Vec<Gf2Vector>>,
}

impl GroupUgInstance {
    /// `bundles[e]` is the shift set of edge `e` of `graph`.
    pub fn new(
        m: usize,
        graph: MultiGraph,
        bundles: Vec<Vec<Gf2Vector>>,
    ) -> Result<Self, InstanceError> {
        let mut errs = Vec::new();
        if m == 0 || m > MAX_DIM {
            errs.push(Violation::Dimension(m));
        }
        check_graph(&graph, &mut errs);
        for (e, &(a, b)) in graph.edges().iter().enumerate() {
            let (u, v) = (graph.name(a).to_string(), graph.name(b).to_string());
            let Some(bundle) = bundles.get(e).filter(|s| !s.is_empty()) else {
                errs.push(Violation::MissingBundle(u, v));
                continue;
            };
            let mut seen = BTreeSet::new();
            for z in bundle {
                if z.len() != m {
                    errs.push(Violation::ShiftLength {
                        u: u.clone(),
                        v: v.clone(),
                        shift: z.to_string(),
                        expected: m,
                    });
                } else if !seen.insert(*z) {
                    errs.push(Violation::DuplicateShift {
                        u: u.clone(),
                        v: v.clone(),
                        shift: z.to_string(),
                    });
                }
            }
        }
        if !errs.is_empty() {
            return Err(InstanceError::Invalid(errs));
        }
        Ok(Self { m, graph, bundles })
    }

    /// Same graph, same bundle on every edge.
    pub fn uniform(
        m: usize,
        graph: MultiGraph,
        bundle: &[Gf2Vector],
    ) -> Result<Self, InstanceError> {
        let bundles = vec![bundle.to_vec(); graph.edge_count()];
        Self::new(m, graph, bundles)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Label count 2^m.
    pub fn q(&self) -> u64 {
        1u64 << self.m
    }

    pub fn graph(&self) -> &MultiGraph {
        &self.graph
    }

    pub fn bundle(&self, edge: usize) -> &[Gf2Vector] {
        &self.bundles[edge]
    }

    pub fn bundles(&self) -> &[Vec<Gf2Vector>] {
        &self.bundles
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn constraint_count(&self) -> u64 {
        self.bundles.iter().map(|b| b.len() as u64).sum()
    }

    /// Number of constraints satisfied by `labels` (indexed by vertex).
    pub fn satisfied(&self, labels: &[Gf2Vector]) -> u64 {
        self.graph
            .edges()
            .iter()
            .zip(&self.bundles)
            .filter(|(&(a, b), bundle)| bundle.contains(&(labels[a] + labels[b])))
            .count() as u64
    }

    /// Fraction of constraints satisfied.
    pub fn value(&self, a: &Assignment) -> Result<Fraction, InstanceError> {
        let total = self.constraint_count();
        if total == 0 {
            return Err(InstanceError::NoConstraints);
        }
        if a.labels.len() < self.vertex_count() {
            return Err(InstanceError::MissingVertex(
                self.graph.name(a.labels.len()).to_string(),
            ));
        }
        Ok(Fraction::new(self.satisfied(&a.labels), total))
    }

    /// Vertices, edges and shifts sorted.
    pub fn canonicalize(&self) -> GroupUgInstance {
        let (graph, edge_map) = self.graph.canonicalize();
        let mut bundles = vec![Vec::new(); self.bundles.len()];
        for (old, bundle) in self.bundles.iter().enumerate() {
            let mut b = bundle.clone();
            b.sort_unstable();
            bundles[edge_map[old]] = b;
        }
        GroupUgInstance {
            m: self.m,
            graph,
            bundles,
        }
    }

    /// Keeps only the listed edges (all vertices stay).
    pub fn restrict_to_edges(&self, keep: &[usize]) -> GroupUgInstance {
        GroupUgInstance {
            m: self.m,
            graph: self.graph.edge_subgraph(keep),
            bundles: keep.iter().map(|&e| self.bundles[e].clone()).collect(),
        }
    }

    pub fn to_json(&self) -> InstanceJson {
        let c = self.canonicalize();
        InstanceJson {
            format: INSTANCE_FORMAT.to_string(),
            m: c.m,
            vertices: c.graph.names().to_vec(),
            edges: c
                .graph
                .edges()
                .iter()
                .zip(&c.bundles)
                .map(|(&(a, b), bundle)| EdgeJson {
                    u: c.graph.name(a).to_string(),
                    v: c.graph.name(b).to_string(),
                    shifts: bundle.iter().map(|z| z.to_string()).collect(),
                })
                .collect(),
        }
    }

    /// Canonical JSON text.
    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("instance serializes")
    }

    pub fn from_json(json: &InstanceJson) -> Result<Self, InstanceError> {
        validate(json).map_err(InstanceError::Invalid)?;
        let names: Vec<&str> = json.vertices.iter().map(String::as_str).collect();
        let edges: Vec<(&str, &str)> = json
            .edges
            .iter()
            .map(|e| (e.u.as_str(), e.v.as_str()))
            .collect();
        let graph = MultiGraph::new(&names, &edges)?;
        let bundles = json
            .edges
            .iter()
            .map(|e| {
                e.shifts
                    .iter()
                    .map(|s| s.parse().expect("validated"))
                    .collect()
            })
            .collect();
        Self::new(json.m, graph, bundles)
    }

    pub fn from_json_str(text: &str) -> Result<Self, InstanceError> {
        let json: InstanceJson =
            serde_json::from_str(text).map_err(|e| InstanceError::Json(e.to_string()))?;
        Self::from_json(&json)
    }

    /// The τ_UG view: universe = variables, one symmetric relation per shift.
    pub fn relational_view(&self) -> RelationalView {
        RelationalView::new(self)
    }
}

fn check_graph(graph: &MultiGraph, errs: &mut Vec<Violation>) {
    let mut pairs = BTreeSet::new();
    for &(a, b) in graph.edges() {
        if a == b {
            errs.push(Violation::SelfLoop(graph.name(a).to_string()));
        } else if !pairs.insert((a.min(b), a.max(b))) {
            errs.push(Violation::ParallelEdge(
                graph.name(a).to_string(),
                graph.name(b).to_string(),
            ));
        }
    }
}

/// Checks a wire-form instance and lists every violation found.
pub fn validate(json: &InstanceJson) -> Result<(), Vec<Violation>> {
    let mut errs = Vec::new();
    if json.format != INSTANCE_FORMAT {
        errs.push(Violation::Format(json.format.clone()));
    }
    if json.m == 0 || json.m > MAX_DIM {
        errs.push(Violation::Dimension(json.m));
    }
    let mut names = BTreeSet::new();
    for v in &json.vertices {
        if !names.insert(v.as_str()) {
            errs.push(Violation::DuplicateVertex(v.clone()));
        }
    }
    let mut pairs = BTreeSet::new();
    for e in &json.edges {
        for end in [&e.u, &e.v] {
            if !names.contains(end.as_str()) {
                errs.push(Violation::UnknownVertex(end.clone()));
            }
        }
        if e.u == e.v {
            errs.push(Violation::SelfLoop(e.u.clone()));
        } else if !pairs.insert((e.u.clone().min(e.v.clone()), e.u.clone().max(e.v.clone()))) {
            errs.push(Violation::ParallelEdge(e.u.clone(), e.v.clone()));
        }
        if e.shifts.is_empty() {
            errs.push(Violation::MissingBundle(e.u.clone(), e.v.clone()));
        }
        let mut seen = BTreeSet::new();
        for s in &e.shifts {
            let (u, v, shift) = (e.u.clone(), e.v.clone(), s.clone());
            if s.parse::<Gf2Vector>().is_err() {
                errs.push(Violation::BadShift { u, v, shift });
            } else if s.len() != json.m {
                errs.push(Violation::ShiftLength {
                    u,
                    v,
                    shift,
                    expected: json.m,
                });
            } else if !seen.insert(s.as_str()) {
                errs.push(Violation::DuplicateShift { u, v, shift });
            }
        }
    }
    if errs.is_empty() {
        Ok(())
    } else {
        Err(errs)
    }
}

/// `{"format":"ug-group-v1","m":2,"vertices":[...],"edges":[{"u","v","shifts"}]}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceJson {
    pub format: String,
    pub m: usize,
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub u: String,
    pub v: String,
    #[serde(default)]
    pub shifts: Vec<String>,
}

/// Labels for every vertex of an instance, indexed like its graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    labels: Vec<Gf2Vector>,
}

impl Assignment {
    pub fn zeros(u: &GroupUgInstance) -> Self {
        Self {
            labels: vec![Gf2Vector::zero(u.m()); u.vertex_count()],
        }
    }

    pub fn from_labels(u: &GroupUgInstance, labels: Vec<Gf2Vector>) -> Result<Self, InstanceError> {
        if labels.len() < u.vertex_count() {
            return Err(InstanceError::MissingVertex(
                u.graph().name(labels.len()).to_string(),
            ));
        }
        for (i, l) in labels.iter().enumerate() {
            if l.len() != u.m() {
                return Err(InstanceError::LabelLength {
                    vertex: u.graph().name(i).to_string(),
                    expected: u.m(),
                    found: l.len(),
                });
            }
        }
        Ok(Self { labels })
    }

    pub fn from_named(
        u: &GroupUgInstance,
        named: &BTreeMap<String, Gf2Vector>,
    ) -> Result<Self, InstanceError> {
        let labels = u
            .graph()
            .names()
            .iter()
            .map(|n| {
                named
                    .get(n)
                    .copied()
                    .ok_or_else(|| InstanceError::MissingVertex(n.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_labels(u, labels)
    }

    pub fn labels(&self) -> &[Gf2Vector] {
        &self.labels
    }

    pub fn get(&self, v: usize) -> Gf2Vector {
        self.labels[v]
    }

    pub fn to_named(&self, u: &GroupUgInstance) -> BTreeMap<String, String> {
        u.graph()
            .names()
            .iter()
            .cloned()
            .zip(self.labels.iter().map(|l| l.to_string()))
            .collect()
    }
}

/// The instance as a relational structure: for each unordered pair of
/// variables, the set of shifts `g` whose relation holds on it.
#[derive(Debug, Clone)]
pub struct RelationalView {
    names: Vec<String>,
    index: HashMap<String, usize>,
    relations: HashMap<(usize, usize), Vec<Gf2Vector>>,
}

impl RelationalView {
    fn new(u: &GroupUgInstance) -> Self {
        let g = u.graph();
        let mut relations: HashMap<(usize, usize), Vec<Gf2Vector>> = HashMap::new();
        for (e, &(a, b)) in g.edges().iter().enumerate() {
            let entry = relations.entry((a.min(b), a.max(b))).or_default();
            entry.extend_from_slice(u.bundle(e));
            entry.sort_unstable();
            entry.dedup();
        }
        Self {
            names: g.names().to_vec(),
            index: g
                .names()
                .iter()
                .enumerate()
                .map(|(i, n)| (n.clone(), i))
                .collect(),
            relations,
        }
    }

    pub fn universe_size(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, x: usize) -> &str {
        &self.names[x]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn element(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Shifts `g` with `P_g(x, y)`; symmetric in `x`, `y`.
    pub fn shifts(&self, x: usize, y: usize) -> &[Gf2Vector] {
        self.relations
            .get(&(x.min(y), x.max(y)))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn holds(&self, g: &Gf2Vector, x: usize, y: usize) -> bool {
        self.shifts(x, y).contains(g)
    }

    /// All pairs in relation `g`, each unordered pair once.
    pub fn relation(&self, g: &Gf2Vector) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self
            .relations
            .iter()
            .filter(|(_, s)| s.contains(g))
            .map(|(&p, _)| p)
            .collect();
        out.sort_unstable();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::preset;

    fn v(s: &str) -> Gf2Vector {
        s.parse().unwrap()
    }

    #[test]
    fn value_on_triangle() {
        let u = GroupUgInstance::uniform(1, preset("K3").unwrap(), &[v("0")]).unwrap();
        assert_eq!(
            u.value(&Assignment::zeros(&u)).unwrap(),
            Fraction::from_integer(1)
        );
        let flip = GroupUgInstance::uniform(1, preset("K3").unwrap(), &[v("1")]).unwrap();
        assert_eq!(
            flip.value(&Assignment::zeros(&flip)).unwrap(),
            Fraction::from_integer(0)
        );
    }

    #[test]
    fn json_violations() {
        let text = r#"{"format":"ug-group-v1","m":2,"vertices":["a","b","c"],
            "edges":[{"u":"a","v":"b","shifts":["001"]},{"u":"b","v":"c"}]}"#;
        let json: InstanceJson = serde_json::from_str(text).unwrap();
        let errs = validate(&json).unwrap_err();
        assert!(errs
            .iter()
            .any(|e| matches!(e, Violation::ShiftLength { .. })));
        assert!(errs
            .iter()
            .any(|e| matches!(e, Violation::MissingBundle(..))));
    }

    #[test]
    fn canonical_round_trip() {
        let g = MultiGraph::new(&["c", "a", "b"], &[("c", "a"), ("b", "a")]).unwrap();
        let u = GroupUgInstance::new(2, g, vec![vec![v("11"), v("01")], vec![v("10")]]).unwrap();
        let c = u.canonicalize();
        assert_ne!(u, c);
        assert_eq!(c.canonicalize(), c);
        let back = GroupUgInstance::from_json_str(&u.to_json_string()).unwrap();
        assert_eq!(back, c);
        assert_eq!(
            c.to_json_string(),
            r#"{"format":"ug-group-v1","m":2,"vertices":["a","b","c"],"edges":[{"u":"a","v":"b","shifts":["10"]},{"u":"a","v":"c","shifts":["01","11"]}]}"#
        );
    }

    #[test]
    fn relational_view_is_symmetric() {
        let u = GroupUgInstance::uniform(2, preset("K3").unwrap(), &[v("01"), v("10")]).unwrap();
        let r = u.relational_view();
        assert_eq!(r.shifts(0, 1), r.shifts(1, 0));
        assert!(r.holds(&v("10"), 2, 0));
        assert_eq!(r.relation(&v("11")), vec![]);
        assert_eq!(r.relation(&v("01")).len(), 3);
    }
}
