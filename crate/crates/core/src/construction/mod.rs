//! The gap construction: random edge data `(Z, b)` on a base graph, the
//! good/bad edge split, and the four instances built from them.
//!
//! On every edge `Ũ₁` has the bundle `Z(e)` and `Ũ₂` the coset `Z(e) + b(e)`.
//! `U₁` and `U₂` keep only the good edges.

mod bounds;
mod decay;
mod extend;
mod params;

pub use bounds::{approx_gap_params, lemma53_gap, GapParams};
pub use decay::{decay_simulation, DecayError, DecayTrace};
pub use extend::{edge_consistent, extend_along_path, ExtendError};
pub use params::{derive_params, ConstructionParams, ParamsError};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::{rref_basis, sample_subspace, Gf2Error, Gf2Subspace, Gf2Vector};
use crate::graph::{GraphError, MultiGraph};
use crate::instance::{GroupUgInstance, InstanceError};

#[derive(Debug, Error)]
pub enum ConstructionError {
    #[error("need 0 < ℓ < m, got ℓ = {ell}, m = {m}")]
    Domain { m: usize, ell: usize },
    #[error("path length r must be at least 1")]
    ZeroRadius,
    #[error("edge data covers {found} edges, graph has {expected}")]
    EdgeCount { expected: usize, found: usize },
    #[error("malformed edge data: {0}")]
    Malformed(String),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

/// Per-edge subspace `Z(e)` and shift `b(e)`, indexed by edge id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeData {
    m: usize,
    ell: usize,
    z: Vec<Gf2Subspace>,
    b: Vec<Gf2Vector>,
}

impl EdgeData {
    /// All subspaces must have dimension `ell` in 𝔽₂^m and all shifts length `m`.
    pub fn new(
        m: usize,
        ell: usize,
        z: Vec<Gf2Subspace>,
        b: Vec<Gf2Vector>,
    ) -> Result<Self, ConstructionError> {
        if z.len() != b.len() {
            return Err(ConstructionError::EdgeCount {
                expected: z.len(),
                found: b.len(),
            });
        }
        for s in &z {
            if s.ambient_dim() != m || s.dim() != ell {
                return Err(ConstructionError::Malformed(format!(
                    "subspace {s:?} is not {ell}-dimensional in F2^{m}"
                )));
            }
        }
        if let Some(v) = b.iter().find(|v| v.len() != m) {
            return Err(ConstructionError::Malformed(format!(
                "shift {v} does not have length {m}"
            )));
        }
        Ok(Self { m, ell, z, b })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn z(&self, edge: usize) -> &Gf2Subspace {
        &self.z[edge]
    }

    pub fn b(&self, edge: usize) -> Gf2Vector {
        self.b[edge]
    }

    /// Keeps the listed edges, renumbered in the given order.
    pub fn restrict(&self, keep: &[usize]) -> EdgeData {
        EdgeData {
            m: self.m,
            ell: self.ell,
            z: keep.iter().map(|&e| self.z[e].clone()).collect(),
            b: keep.iter().map(|&e| self.b[e]).collect(),
        }
    }

    pub fn to_json(&self, g: &MultiGraph) -> Vec<EdgeDataJson> {
        g.edges()
            .iter()
            .enumerate()
            .map(|(e, &(a, b))| EdgeDataJson {
                edge: [g.name(a).to_string(), g.name(b).to_string()],
                z: self.z[e].to_bitstrings(),
                b: self.b[e].to_string(),
            })
            .collect()
    }

    /// Parses entries for the edges of `g`; every edge must appear exactly once.
    pub fn from_json(g: &MultiGraph, entries: &[EdgeDataJson]) -> Result<Self, ConstructionError> {
        if entries.len() != g.edge_count() {
            return Err(ConstructionError::EdgeCount {
                expected: g.edge_count(),
                found: entries.len(),
            });
        }
        let first = entries
            .first()
            .ok_or_else(|| ConstructionError::Malformed("no edges".into()))?;
        let m = first.b.len();
        let mut z = vec![None; g.edge_count()];
        let mut b = vec![Gf2Vector::zero(m); g.edge_count()];
        for entry in entries {
            let [u, v] = &entry.edge;
            let (a, c) = (
                g.vertex(u)
                    .ok_or_else(|| GraphError::UnknownVertex(u.clone()))?,
                g.vertex(v)
                    .ok_or_else(|| GraphError::UnknownVertex(v.clone()))?,
            );
            let e = g
                .edge_between(a, c)
                .ok_or_else(|| ConstructionError::Malformed(format!("{u}-{v} is not an edge")))?;
            if z[e].is_some() {
                return Err(ConstructionError::Malformed(format!(
                    "edge {u}-{v} listed twice"
                )));
            }
            let basis = entry
                .z
                .iter()
                .map(|s| s.parse::<Gf2Vector>())
                .collect::<Result<Vec<_>, _>>()?;
            let span = rref_basis(&basis, m)?;
            if span.dim() != basis.len() {
                return Err(ConstructionError::Gf2(Gf2Error::DependentBasis));
            }
            z[e] = Some(span);
            b[e] = entry.b.parse()?;
        }
        let ell = first.z.len();
        Self::new(
            m,
            ell,
            z.into_iter()
                .map(|s| s.expect("every edge listed"))
                .collect(),
            b,
        )
    }
}

/// `{"edge":["u","v"],"Z":["01"],"b":"10"}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeDataJson {
    pub edge: [String; 2],
    #[serde(rename = "Z")]
    pub z: Vec<String>,
    pub b: String,
}

/// Independent `b(e)` then `Z(e)` per edge, edges visited in canonical order.
pub fn sample_edge_data(
    g: &MultiGraph,
    m: usize,
    ell: usize,
    seed: u64,
) -> Result<EdgeData, ConstructionError> {
    if ell == 0 || ell >= m {
        return Err(ConstructionError::Domain { m, ell });
    }
    let (_, edge_map) = g.canonicalize();
    let mut order: Vec<usize> = (0..g.edge_count()).collect();
    order.sort_by_key(|&e| edge_map[e]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z = vec![Gf2Subspace::zero(m); g.edge_count()];
    let mut b = vec![Gf2Vector::zero(m); g.edge_count()];
    for e in order {
        b[e] = Gf2Vector::random(m, &mut rng);
        z[e] = sample_subspace(m, ell, &mut rng)?;
    }
    EdgeData::new(m, ell, z, b)
}

/// Good and bad edge ids, each ascending.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EdgeClassification {
    pub good: Vec<usize>,
    pub bad: Vec<usize>,
}

/// An edge is good when every edge-nonrepeating path of length `r` starting
/// with it, in either direction, has subspaces spanning 𝔽₂^m. An edge with no
/// such path is good.
pub fn classify_good_edges(
    g: &MultiGraph,
    ed: &EdgeData,
    r: usize,
) -> Result<EdgeClassification, ConstructionError> {
    if r == 0 {
        return Err(ConstructionError::ZeroRadius);
    }
    if ed.len() != g.edge_count() {
        return Err(ConstructionError::EdgeCount {
            expected: g.edge_count(),
            found: ed.len(),
        });
    }
    let verdicts: Vec<bool> = (0..g.edge_count())
        .into_par_iter()
        .map(|e| {
            let paths = g.paths_from_edge(e, r).expect("edge and radius checked");
            paths.iter().all(|p| {
                let mut span = Gf2Subspace::zero(ed.m());
                for &pe in &p.edges {
                    span = span.join(ed.z(pe)).expect("same ambient dimension");
                }
                span.is_full()
            })
        })
        .collect();
    let mut out = EdgeClassification::default();
    for (e, good) in verdicts.into_iter().enumerate() {
        if good {
            out.good.push(e);
        } else {
            out.bad.push(e);
        }
    }
    Ok(out)
}

/// Base graph with edge data and path radius: everything the tree strategy
/// needs about a gap pair. `r = None` means every segment is short.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapContext {
    pub graph: MultiGraph,
    pub data: EdgeData,
    pub r: Option<usize>,
}

impl GapContext {
    pub fn new(
        graph: MultiGraph,
        data: EdgeData,
        r: Option<usize>,
    ) -> Result<Self, ConstructionError> {
        if data.len() != graph.edge_count() {
            return Err(ConstructionError::EdgeCount {
                expected: graph.edge_count(),
                found: data.len(),
            });
        }
        Ok(Self { graph, data, r })
    }

    /// Bundles `Z(e)`.
    pub fn u1(&self) -> Result<GroupUgInstance, ConstructionError> {
        let bundles = (0..self.graph.edge_count())
            .map(|e| self.data.z(e).elements())
            .collect();
        Ok(GroupUgInstance::new(self.data.m(), self.graph.clone(), bundles)?.canonicalize())
    }

    /// Bundles `Z(e) + b(e)`.
    pub fn u2(&self) -> Result<GroupUgInstance, ConstructionError> {
        let bundles = (0..self.graph.edge_count())
            .map(|e| {
                let mut coset: Vec<Gf2Vector> = self
                    .data
                    .z(e)
                    .elements()
                    .into_iter()
                    .map(|z| z + self.data.b(e))
                    .collect();
                coset.sort_unstable();
                coset
            })
            .collect();
        Ok(GroupUgInstance::new(self.data.m(), self.graph.clone(), bundles)?.canonicalize())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConstructionReport {
    pub m: usize,
    pub ell: usize,
    pub r: usize,
    pub vertices: usize,
    pub edges: usize,
    pub good: usize,
    pub bad: usize,
    pub faithful: bool,
}

/// Everything the construction produces for one base graph and edge data.
#[derive(Debug, Clone)]
pub struct ConstructionOutput {
    pub base: MultiGraph,
    pub data: EdgeData,
    pub r: usize,
    pub classification: EdgeClassification,
    /// Base vertices with only the good edges.
    pub pruned: MultiGraph,
    pub u1_tilde: GroupUgInstance,
    pub u2_tilde: GroupUgInstance,
    pub u1: GroupUgInstance,
    pub u2: GroupUgInstance,
}

/// Classifies edges and assembles all four instances. `g` must be canonical.
pub fn build_gap_pair(
    g: &MultiGraph,
    ed: &EdgeData,
    r: usize,
) -> Result<ConstructionOutput, ConstructionError> {
    let (canon, _) = g.canonicalize();
    if &canon != g {
        return Err(ConstructionError::Malformed(
            "base graph must be in canonical order".into(),
        ));
    }
    let classification = classify_good_edges(g, ed, r)?;
    let full = GapContext::new(g.clone(), ed.clone(), Some(r))?;
    let pruned_ctx = GapContext::new(
        g.edge_subgraph(&classification.good),
        ed.restrict(&classification.good),
        Some(r),
    )?;
    Ok(ConstructionOutput {
        base: g.clone(),
        data: ed.clone(),
        r,
        u1_tilde: full.u1()?,
        u2_tilde: full.u2()?,
        u1: pruned_ctx.u1()?,
        u2: pruned_ctx.u2()?,
        pruned: pruned_ctx.graph,
        classification,
    })
}

impl ConstructionOutput {
    /// The pruned graph with its edge data, for the tree strategy.
    pub fn context(&self) -> GapContext {
        GapContext {
            graph: self.pruned.clone(),
            data: self.data.restrict(&self.classification.good),
            r: Some(self.r),
        }
    }

    pub fn report(&self) -> ConstructionReport {
        ConstructionReport {
            m: self.data.m(),
            ell: self.data.ell(),
            r: self.r,
            vertices: self.base.vertex_count(),
            edges: self.base.edge_count(),
            good: self.classification.good.len(),
            bad: self.classification.bad.len(),
            faithful: false,
        }
    }

    /// Marks the output faithful when it matches derived parameters exactly:
    /// same m, ℓ, r, a d-regular base and girth at least (k+1)²r.
    pub fn check_faithful(&self, params: &ConstructionParams, k: usize) -> bool {
        let r_matches = params.r == num_bigint::BigUint::from(self.r);
        let girth_ok = match self.base.girth() {
            None => true,
            Some(girth) => (girth as u128) >= ((k as u128 + 1).pow(2)) * self.r as u128,
        };
        params.m == self.data.m() as u64
            && params.ell as usize == self.data.ell()
            && r_matches
            && self.base.is_regular(params.d as usize)
            && girth_ok
    }

    /// Files of the output directory, as (name, contents) pairs.
    pub fn files(&self, faithful: bool) -> Vec<(&'static str, String)> {
        let pretty = |v: serde_json::Value| serde_json::to_string_pretty(&v).expect("json") + "\n";
        let mut report = self.report();
        report.faithful = faithful;
        vec![
            (
                "graph.json",
                pretty(serde_json::to_value(self.base.to_json()).expect("json")),
            ),
            (
                "edgedata.json",
                pretty(serde_json::to_value(self.data.to_json(&self.base)).expect("json")),
            ),
            (
                "u1.json",
                pretty(serde_json::to_value(self.u1.to_json()).expect("json")),
            ),
            (
                "u2.json",
                pretty(serde_json::to_value(self.u2.to_json()).expect("json")),
            ),
            (
                "u1tilde.json",
                pretty(serde_json::to_value(self.u1_tilde.to_json()).expect("json")),
            ),
            (
                "u2tilde.json",
                pretty(serde_json::to_value(self.u2_tilde.to_json()).expect("json")),
            ),
            (
                "report.json",
                pretty(serde_json::to_value(report).expect("json")),
            ),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::preset;

    #[test]
    fn sampling_contract() {
        let g = preset("Petersen").unwrap();
        let a = sample_edge_data(&g, 3, 1, 7).unwrap();
        let b = sample_edge_data(&g, 3, 1, 7).unwrap();
        assert_eq!(a, b);
        assert!((0..g.edge_count()).all(|e| a.z(e).dim() == 1));
        assert!(sample_edge_data(&g, 2, 2, 7).is_err());
    }

    #[test]
    fn radius_one_with_m_two_is_all_bad() {
        let g = preset("K4").unwrap();
        let ed = sample_edge_data(&g, 2, 1, 3).unwrap();
        let c = classify_good_edges(&g, &ed, 1).unwrap();
        assert!(c.good.is_empty());
        assert_eq!(c.bad.len(), 6);
    }

    #[test]
    fn u2_is_u1_shifted() {
        let g = preset("K4").unwrap();
        let ed = sample_edge_data(&g, 3, 1, 5).unwrap();
        let out = build_gap_pair(&g, &ed, 2).unwrap();
        for e in 0..g.edge_count() {
            let shifted: std::collections::BTreeSet<Gf2Vector> = out
                .u1_tilde
                .bundle(e)
                .iter()
                .map(|&z| z + ed.b(e))
                .collect();
            let actual: std::collections::BTreeSet<Gf2Vector> =
                out.u2_tilde.bundle(e).iter().copied().collect();
            assert_eq!(shifted, actual);
        }
    }

    #[test]
    fn edge_data_json_round_trip() {
        let g = preset("K3").unwrap();
        let ed = sample_edge_data(&g, 3, 2, 1).unwrap();
        let back = EdgeData::from_json(&g, &ed.to_json(&g)).unwrap();
        assert_eq!(back, ed);
    }
}
