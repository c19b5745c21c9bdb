//! The two small worked gap pairs and their lifted forms.
//!
//! * `fig2`: the triangle over 𝔽₂, all-identity constraints against
//!   all-flipped constraints.
//! * `fig3`: K₄ over 𝔽₂² with one-dimensional bundles, shifted by `10` on
//!   the edge `v3 v4` only.

use thiserror::Error;

use crate::construction::{classify_good_edges, ConstructionError, EdgeData, GapContext};
use crate::gf2::{rref_basis, Gf2Subspace, Gf2Vector};
use crate::graph::preset;
use crate::instance::{Fraction, GroupUgInstance};
use crate::lift::{lift, LiftError};
use crate::solver::exact_opt;

pub const BASE_PRESETS: [&str; 2] = ["fig2", "fig3"];
pub const LIFTED_PRESETS: [&str; 2] = ["fig2-lifted", "fig3-lifted"];

#[derive(Debug, Error)]
pub enum PresetError {
    #[error("unknown preset {0:?}")]
    Unknown(String),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Lift(#[from] LiftError),
}

fn bits(s: &str) -> Gf2Vector {
    s.parse().expect("literal bitstring")
}

fn line(s: &str) -> Gf2Subspace {
    rref_basis(&[bits(s)], s.len()).expect("literal subspace")
}

/// Edge order of the K₄ preset.
pub const K4_EDGES: [(&str, &str); 6] = [
    ("v1", "v2"),
    ("v1", "v3"),
    ("v1", "v4"),
    ("v2", "v3"),
    ("v2", "v4"),
    ("v3", "v4"),
];

/// Frozen fig3 subspaces, one generator per edge in [`K4_EDGES`] order.
pub const FIG3_Z: [&str; 6] = ["01", "10", "11", "11", "10", "01"];

fn fig3_with(z: [&str; 6]) -> GapContext {
    let g = preset("K4").expect("preset");
    let b = (0..6)
        .map(|e| if e == 5 { bits("10") } else { bits("00") })
        .collect();
    let data =
        EdgeData::new(2, 1, z.iter().map(|s| line(s)).collect(), b).expect("valid edge data");
    GapContext::new(g, data, Some(2)).expect("edge counts agree")
}

pub fn fig2_context() -> GapContext {
    let g = preset("K3").expect("preset");
    let data = EdgeData::new(1, 0, vec![Gf2Subspace::zero(1); 3], vec![bits("1"); 3])
        .expect("valid edge data");
    GapContext::new(g, data, None).expect("edge counts agree")
}

pub fn fig3_context() -> GapContext {
    fig3_with(FIG3_Z)
}

/// Re-derives [`FIG3_Z`]: with `Z(v3 v4) = span{01}` and `Z(v1 v4) = span{11}`
/// fixed, the first assignment of the other four edges (subspaces ordered
/// `01 < 10 < 11`) making every edge good at `r = 2` with `opt(U₂) = 5/12`.
pub fn search_fig3() -> Option<[&'static str; 6]> {
    const LINES: [&str; 3] = ["01", "10", "11"];
    let g = preset("K4").expect("preset");
    for code in 0..81usize {
        let pick = |slot: u32| LINES[code / 3usize.pow(3 - slot) % 3];
        let z = [pick(0), pick(1), "11", pick(2), pick(3), "01"];
        let ctx = fig3_with(z);
        let classes = classify_good_edges(&g, &ctx.data, 2).expect("r ≥ 1");
        if !classes.bad.is_empty() {
            continue;
        }
        let u2 = ctx.u2().expect("valid instance");
        if exact_opt(&u2).expect("tiny instance").optimum == Fraction::new(5, 12) {
            return Some(z);
        }
    }
    None
}

pub fn base_context(name: &str) -> Result<GapContext, PresetError> {
    match name {
        "fig2" => Ok(fig2_context()),
        "fig3" => Ok(fig3_context()),
        _ => Err(PresetError::Unknown(name.to_string())),
    }
}

/// A lifted gap pair with the base data the tree strategy needs.
#[derive(Debug, Clone)]
pub struct LiftedPreset {
    pub name: String,
    pub context: GapContext,
    pub a: GroupUgInstance,
    pub b: GroupUgInstance,
}

/// `fig2-lifted` or `fig3-lifted`.
pub fn lifted_preset(name: &str) -> Result<LiftedPreset, PresetError> {
    let base = name
        .strip_suffix("-lifted")
        .filter(|b| BASE_PRESETS.contains(b))
        .ok_or_else(|| PresetError::Unknown(name.to_string()))?;
    let context = base_context(base)?;
    let a = lift(&context.u1()?)?;
    let b = lift(&context.u2()?)?;
    Ok(LiftedPreset {
        name: name.to_string(),
        context,
        a,
        b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k4_edge_order() {
        let g = preset("K4").unwrap();
        for (e, (u, v)) in K4_EDGES.iter().enumerate() {
            assert_eq!(g.edge(e), (g.vertex(u).unwrap(), g.vertex(v).unwrap()));
        }
    }

    #[test]
    fn fig3_is_the_first_search_hit() {
        assert_eq!(search_fig3(), Some(FIG3_Z));
    }

    #[test]
    fn lifted_sizes() {
        let p = lifted_preset("fig3-lifted").unwrap();
        assert_eq!(p.a.vertex_count(), 16);
        assert_eq!(p.a.vertex_count(), p.b.vertex_count());
        assert!(lifted_preset("fig4-lifted").is_err());
    }
}
