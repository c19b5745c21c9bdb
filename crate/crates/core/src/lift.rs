//! The label-lifted instance: one variable `v#g` per base vertex `v` and group
//! element `g`, and for every base constraint `x_{v1} + x_{v2} = z` and every
//! `g1`, `g2` a constraint between `v1#g1` and `v2#g2` with shift `z + g1 + g2`.

use thiserror::Error;

use crate::gf2::Gf2Vector;
use crate::graph::MultiGraph;
use crate::instance::{Assignment, GroupUgInstance, InstanceError};

/// Separator between base name and label in lifted variable names.
pub const LIFT_SEPARATOR: char = '#';

#[derive(Debug, Error)]
pub enum LiftError {
    #[error("lift would have {vertices} variables and {constraints} constraints, over the budget of {budget}")]
    Budget {
        vertices: u128,
        constraints: u128,
        budget: u128,
    },
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

/// Refuse lifts with more variables or constraints than this.
pub const DEFAULT_LIFT_BUDGET: u128 = 1 << 22;

pub fn lifted_name(base: &str, g: &Gf2Vector) -> String {
    format!("{base}{LIFT_SEPARATOR}{g}")
}

/// Splits `v#g` into its base name and label.
pub fn split_lifted_name(name: &str) -> Option<(&str, Gf2Vector)> {
    let (base, bits) = name.rsplit_once(LIFT_SEPARATOR)?;
    Some((base, bits.parse().ok()?))
}

pub fn lift(u: &GroupUgInstance) -> Result<GroupUgInstance, LiftError> {
    lift_with_budget(u, DEFAULT_LIFT_BUDGET)
}

pub fn lift_with_budget(u: &GroupUgInstance, budget: u128) -> Result<GroupUgInstance, LiftError> {
    let q = u.q() as u128;
    let vertices = u.vertex_count() as u128 * q;
    let constraints = u.constraint_count() as u128 * q * q;
    if vertices > budget || constraints > budget {
        return Err(LiftError::Budget {
            vertices,
            constraints,
            budget,
        });
    }
    let m = u.m();
    let base = u.graph();
    let labels: Vec<Gf2Vector> = Gf2Vector::all(m).collect();
    let q = labels.len();
    let names: Vec<String> = base
        .names()
        .iter()
        .flat_map(|v| labels.iter().map(move |g| lifted_name(v, g)))
        .collect();
    let mut edges = Vec::with_capacity(base.edge_count() * q * q);
    let mut bundles = Vec::with_capacity(edges.capacity());
    for (e, &(a, b)) in base.edges().iter().enumerate() {
        for (i, g1) in labels.iter().enumerate() {
            for (j, g2) in labels.iter().enumerate() {
                edges.push((a * q + i, b * q + j));
                bundles.push(u.bundle(e).iter().map(|&z| z + *g1 + *g2).collect());
            }
        }
    }
    let graph = MultiGraph::from_indices(names, edges);
    Ok(GroupUgInstance::new(m, graph, bundles)?.canonicalize())
}

/// Element bookkeeping for a lifted universe: which element is `v#g`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftIndex {
    m: usize,
    base: Vec<String>,
    element: Vec<Vec<usize>>,
    split: Vec<(usize, Gf2Vector)>,
}

impl LiftIndex {
    /// Recovers the base structure from `v#g` names; `None` unless every base
    /// vertex appears with all 2^m labels.
    pub fn from_names(names: &[String], m: usize) -> Option<Self> {
        let q = 1usize << m;
        let mut base: Vec<String> = Vec::new();
        let mut parts = Vec::with_capacity(names.len());
        for n in names {
            let (b, g) = split_lifted_name(n)?;
            if g.len() != m {
                return None;
            }
            parts.push((b.to_string(), g));
            base.push(b.to_string());
        }
        base.sort();
        base.dedup();
        let mut element = vec![vec![usize::MAX; q]; base.len()];
        let mut split = Vec::with_capacity(names.len());
        for (idx, (b, g)) in parts.into_iter().enumerate() {
            let bi = base.binary_search(&b).expect("collected");
            let slot = &mut element[bi][g.word() as usize];
            if *slot != usize::MAX {
                return None;
            }
            *slot = idx;
            split.push((bi, g));
        }
        if element.iter().flatten().any(|&x| x == usize::MAX) {
            return None;
        }
        Some(Self {
            m,
            base,
            element,
            split,
        })
    }

    pub fn of(u: &GroupUgInstance) -> Option<Self> {
        Self::from_names(u.graph().names(), u.m())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn base_names(&self) -> &[String] {
        &self.base
    }

    pub fn base_index(&self, name: &str) -> Option<usize> {
        self.base.binary_search_by(|b| b.as_str().cmp(name)).ok()
    }

    pub fn base_count(&self) -> usize {
        self.base.len()
    }

    pub fn element(&self, base: usize, g: &Gf2Vector) -> usize {
        self.element[base][g.word() as usize]
    }

    /// `(base vertex, label)` of an element.
    pub fn split(&self, x: usize) -> (usize, Gf2Vector) {
        self.split[x]
    }
}

/// The lift of a base assignment, `x_v^g := x_v + g`.
pub fn lift_assignment(
    base: &GroupUgInstance,
    a: &Assignment,
    lifted: &GroupUgInstance,
) -> Assignment {
    let idx = LiftIndex::of(lifted).expect("lifted naming");
    let labels = (0..lifted.vertex_count())
        .map(|x| {
            let (b, g) = idx.split(x);
            let v = base
                .graph()
                .vertex(&idx.base_names()[b])
                .expect("same base vertices");
            a.get(v) + g
        })
        .collect();
    Assignment::from_labels(lifted, labels).expect("well-formed labels")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::preset;
    use crate::instance::Fraction;
    use crate::solver::exact_opt;

    #[test]
    fn triangle_lift_sizes() {
        let u =
            GroupUgInstance::uniform(1, preset("K3").unwrap(), &["0".parse().unwrap()]).unwrap();
        let l = lift(&u).unwrap();
        assert_eq!(l.vertex_count(), 6);
        assert_eq!(l.constraint_count(), 12);
        assert_eq!(l.graph().names()[0], "v1#0");
    }

    #[test]
    fn flipped_triangle_lift_optimum() {
        let u =
            GroupUgInstance::uniform(1, preset("K3").unwrap(), &["1".parse().unwrap()]).unwrap();
        let l = lift(&u).unwrap();
        assert_eq!(exact_opt(&l).unwrap().optimum, Fraction::new(2, 3));
        let base_best = exact_opt(&u).unwrap();
        let lifted = lift_assignment(&u, &base_best.witness, &l);
        assert_eq!(l.value(&lifted).unwrap(), Fraction::new(2, 3));
    }

    #[test]
    fn index_round_trip() {
        let u =
            GroupUgInstance::uniform(2, preset("K3").unwrap(), &["01".parse().unwrap()]).unwrap();
        let l = lift(&u).unwrap();
        let idx = LiftIndex::of(&l).unwrap();
        for x in 0..l.vertex_count() {
            let (b, g) = idx.split(x);
            assert_eq!(idx.element(b, &g), x);
            assert_eq!(l.graph().name(x), lifted_name(&idx.base_names()[b], &g));
        }
        assert!(LiftIndex::of(&u).is_none());
    }

    #[test]
    fn budget() {
        let u =
            GroupUgInstance::uniform(2, preset("K3").unwrap(), &["01".parse().unwrap()]).unwrap();
        assert!(matches!(
            lift_with_budget(&u, 10),
            Err(LiftError::Budget { .. })
        ));
    }
}
