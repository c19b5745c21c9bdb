use thiserror::Error;

use super::EdgeData;
use crate::gf2::{coordinates, Gf2Subspace, Gf2Vector};
use crate::graph::Path;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExtendError {
    #[error("path subspaces span only dimension {dim} of {m}")]
    NotSpanning { dim: usize, m: usize },
    #[error("empty path with different endpoint labels {start} and {end}")]
    EndpointMismatch { start: Gf2Vector, end: Gf2Vector },
    #[error("path has {vertices} vertices for {edges} edges")]
    MalformedPath { vertices: usize, edges: usize },
    #[error("edge {0} has no edge data")]
    UnknownEdge(usize),
    #[error("label length {found} does not match m = {m}")]
    LabelLength { m: usize, found: usize },
}

/// `g_u + g_v + b ∈ Z`: the labels satisfy the edge in the shifted instance.
pub fn edge_consistent(g_u: &Gf2Vector, g_v: &Gf2Vector, b: &Gf2Vector, z: &Gf2Subspace) -> bool {
    z.contains(&(*g_u + *g_v + *b)).unwrap_or(false)
}

/// Labels for every vertex of `path`, starting at `g_start` and ending at
/// `g_end`, such that each edge is consistent. Needs the path's subspaces to
/// span 𝔽₂^m unless the endpoints already agree along the shifts.
pub fn extend_along_path(
    path: &Path,
    data: &EdgeData,
    g_start: Gf2Vector,
    g_end: Gf2Vector,
) -> Result<Vec<Gf2Vector>, ExtendError> {
    let m = data.m();
    if path.vertices.len() != path.edges.len() + 1 {
        return Err(ExtendError::MalformedPath {
            vertices: path.vertices.len(),
            edges: path.edges.len(),
        });
    }
    for g in [&g_start, &g_end] {
        if g.len() != m {
            return Err(ExtendError::LabelLength { m, found: g.len() });
        }
    }
    if let Some(&e) = path.edges.iter().find(|&&e| e >= data.len()) {
        return Err(ExtendError::UnknownEdge(e));
    }
    if path.edges.is_empty() {
        if g_start != g_end {
            return Err(ExtendError::EndpointMismatch {
                start: g_start,
                end: g_end,
            });
        }
        return Ok(vec![g_start]);
    }

    // Independent vectors drawn from the path's subspaces, tagged by position.
    let mut span = Gf2Subspace::zero(m);
    let mut basis = Vec::new();
    let mut tags = Vec::new();
    for (i, &e) in path.edges.iter().enumerate() {
        for z in data.z(e).basis() {
            if span.insert(z).expect("same length") {
                basis.push(*z);
                tags.push(i);
            }
        }
    }
    let mut target = g_start + g_end;
    for &e in &path.edges {
        target += data.b(e);
    }
    let coeffs = coordinates(&basis, &target)
        .expect("independent by construction")
        .ok_or(ExtendError::NotSpanning { dim: span.dim(), m })?;

    let mut labels = Vec::with_capacity(path.vertices.len());
    let mut g = g_start;
    labels.push(g);
    for (i, &e) in path.edges.iter().enumerate() {
        g += data.b(e);
        for (j, z) in basis.iter().enumerate() {
            if tags[j] == i && coeffs[j] {
                g += *z;
            }
        }
        labels.push(g);
    }
    assert_eq!(g, g_end, "path extension must land on the end label");
    Ok(labels)
}
