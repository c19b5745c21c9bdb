//! Exact optimum by exhaustive search, and the propagation fixpoint that
//! decides complete satisfiability.
//!
//! Group instances are translation invariant: adding one constant to every
//! label of a connected component leaves each `x_u + x_v` unchanged. So the
//! first vertex of each component can be pinned to zero without losing any
//! optimum, which divides the search by q per component.

use num_bigint::BigUint;
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

use crate::gf2::Gf2Vector;
use crate::instance::{Assignment, Fraction, GroupUgInstance};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("search space of {count} assignments exceeds the budget of 2^{budget_log2}")]
    Budget { count: String, budget_log2: u32 },
    #[error("instance has no constraints")]
    NoConstraints,
}

#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    /// Refuse searches over more than 2^budget_log2 assignments.
    pub budget_log2: u32,
    pub pin_components: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            budget_log2: 30,
            pin_components: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptResult {
    pub optimum: Fraction,
    pub satisfied: u64,
    pub total: u64,
    pub witness: Assignment,
}

#[derive(Serialize)]
struct OptJson {
    opt: String,
    witness: BTreeMap<String, String>,
}

impl OptResult {
    /// `{"opt":"5/12","witness":{"v1":"00",...}}`
    pub fn to_json_value(&self, u: &GroupUgInstance) -> serde_json::Value {
        serde_json::to_value(OptJson {
            opt: self.optimum.to_string(),
            witness: self.witness.to_named(u),
        })
        .expect("serializable")
    }
}

/// Number of assignments the search would enumerate.
pub fn search_space(u: &GroupUgInstance, config: &SolverConfig) -> BigUint {
    let free = free_vertex_count(u, config);
    BigUint::from(2u32).pow((u.m() * free) as u32)
}

fn free_vertex_count(u: &GroupUgInstance, config: &SolverConfig) -> usize {
    let pinned = if config.pin_components {
        u.graph().components().len()
    } else {
        0
    };
    u.vertex_count() - pinned
}

pub fn exact_opt(u: &GroupUgInstance) -> Result<OptResult, SolveError> {
    exact_opt_with(u, &SolverConfig::default())
}

/// Maximum satisfied fraction, with the lexicographically first optimal
/// assignment (vertices in name order, labels in numeric order).
pub fn exact_opt_with(u: &GroupUgInstance, config: &SolverConfig) -> Result<OptResult, SolveError> {
    let total = u.constraint_count();
    if total == 0 {
        return Err(SolveError::NoConstraints);
    }
    let free = free_vertex_count(u, config);
    if (u.m() * free) as u64 > config.budget_log2 as u64 {
        return Err(SolveError::Budget {
            count: search_space(u, config).to_string(),
            budget_log2: config.budget_log2,
        });
    }
    let g = u.graph();
    let n = g.vertex_count();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| g.name(a).cmp(g.name(b)));
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let comp = g.component_ids();
    let mut seen_comp = vec![false; n];
    let pinned: Vec<bool> = order
        .iter()
        .map(|&v| config.pin_components && !std::mem::replace(&mut seen_comp[comp[v]], true))
        .collect();
    // edges grouped by the position of their later endpoint
    let mut back: Vec<Vec<(usize, Vec<u64>)>> = vec![Vec::new(); n];
    for (e, &(a, b)) in g.edges().iter().enumerate() {
        let (early, late) = if pos[a] < pos[b] {
            (pos[a], pos[b])
        } else {
            (pos[b], pos[a])
        };
        let mut words: Vec<u64> = u.bundle(e).iter().map(|z| z.word()).collect();
        words.sort_unstable();
        back[late].push((early, words));
    }
    let mut remaining = vec![0u64; n];
    let edge_total = g.edge_count() as u64;
    let mut decided = 0u64;
    for i in 0..n {
        decided += back[i].len() as u64;
        remaining[i] = edge_total - decided;
    }
    let mut search = Search {
        q: u.q(),
        back: &back,
        pinned: &pinned,
        remaining: &remaining,
        labels: vec![0; n],
        best: None,
        best_labels: vec![0; n],
        ceiling: edge_total,
    };
    search.dfs(0, 0);
    let best = search.best.expect("at least one assignment");
    let mut labels = vec![Gf2Vector::zero(u.m()); n];
    for (i, &v) in order.iter().enumerate() {
        labels[v] = Gf2Vector::from_word(search.best_labels[i], u.m()).expect("label in range");
    }
    let witness = Assignment::from_labels(u, labels).expect("well-formed labels");
    debug_assert_eq!(u.satisfied(witness.labels()), best);
    Ok(OptResult {
        optimum: Fraction::new(best, total),
        satisfied: best,
        total,
        witness,
    })
}

struct Search<'a> {
    q: u64,
    back: &'a [Vec<(usize, Vec<u64>)>],
    pinned: &'a [bool],
    remaining: &'a [u64],
    labels: Vec<u64>,
    best: Option<u64>,
    best_labels: Vec<u64>,
    ceiling: u64,
}

impl Search<'_> {
    fn dfs(&mut self, i: usize, sat: u64) {
        if i == self.labels.len() {
            if self.best.is_none_or(|b| sat > b) {
                self.best = Some(sat);
                self.best_labels.copy_from_slice(&self.labels);
            }
            return;
        }
        let top = if self.pinned[i] { 1 } else { self.q };
        for label in 0..top {
            self.labels[i] = label;
            let gained = self.back[i]
                .iter()
                .filter(|(j, words)| words.binary_search(&(label ^ self.labels[*j])).is_ok())
                .count() as u64;
            let s = sat + gained;
            if self.best.is_some_and(|b| s + self.remaining[i] <= b) {
                continue;
            }
            self.dfs(i + 1, s);
            if self.best == Some(self.ceiling) {
                return;
            }
        }
    }
}

/// One derivation: the label of `to` follows from that of `from` through
/// constraint `shift` on `edge`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Step {
    pub from: usize,
    pub to: usize,
    pub edge: usize,
    pub shift: Gf2Vector,
}

impl Step {
    fn reversed(self) -> Step {
        Step {
            from: self.to,
            to: self.from,
            ..self
        }
    }
}

/// A vertex forced to two labels, with both derivations from the component
/// anchor and the closed walk they form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conflict {
    pub vertex: usize,
    pub labels: (Gf2Vector, Gf2Vector),
    pub first: Vec<Step>,
    pub second: Vec<Step>,
    pub cycle: Vec<Step>,
}

impl Conflict {
    pub fn cycle_len(&self) -> usize {
        self.cycle.len()
    }

    /// Vertices of the cycle in walk order (the start is not repeated).
    pub fn cycle_vertices(&self) -> Vec<usize> {
        self.cycle.iter().map(|s| s.from).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Satisfiability {
    Satisfiable(Assignment),
    Unsatisfiable(Conflict),
}

impl Satisfiability {
    pub fn is_satisfiable(&self) -> bool {
        matches!(self, Satisfiability::Satisfiable(_))
    }
}

/// Anchors each component at label 0 and propagates forced labels across
/// every constraint until a fixpoint or a vertex receives two labels.
pub fn is_completely_satisfiable(u: &GroupUgInstance) -> Satisfiability {
    let g = u.graph();
    let n = g.vertex_count();
    let mut label: Vec<Option<Gf2Vector>> = vec![None; n];
    let mut parent: Vec<Option<Step>> = vec![None; n];
    for root in 0..n {
        if label[root].is_some() {
            continue;
        }
        label[root] = Some(Gf2Vector::zero(u.m()));
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            let lx = label[x].expect("queued vertices are labelled");
            for &(y, e) in g.neighbors(x) {
                for &z in u.bundle(e) {
                    let derived = lx + z;
                    match label[y] {
                        None => {
                            label[y] = Some(derived);
                            parent[y] = Some(Step {
                                from: x,
                                to: y,
                                edge: e,
                                shift: z,
                            });
                            queue.push_back(y);
                        }
                        Some(ly) if ly != derived => {
                            let first = derivation(&parent, y);
                            let mut second = derivation(&parent, x);
                            second.push(Step {
                                from: x,
                                to: y,
                                edge: e,
                                shift: z,
                            });
                            let common = first
                                .iter()
                                .zip(&second)
                                .take_while(|(a, b)| a == b)
                                .count();
                            let mut cycle: Vec<Step> = first[common..].to_vec();
                            cycle.extend(second[common..].iter().rev().map(|s| s.reversed()));
                            return Satisfiability::Unsatisfiable(Conflict {
                                vertex: y,
                                labels: (ly, derived),
                                first,
                                second,
                                cycle,
                            });
                        }
                        Some(_) => {}
                    }
                }
            }
        }
    }
    let labels = label
        .into_iter()
        .map(|l| l.expect("every vertex reached"))
        .collect();
    Satisfiability::Satisfiable(Assignment::from_labels(u, labels).expect("well-formed labels"))
}

fn derivation(parent: &[Option<Step>], mut v: usize) -> Vec<Step> {
    let mut out = Vec::new();
    while let Some(s) = parent[v] {
        out.push(s);
        v = s.from;
    }
    out.reverse();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{preset, MultiGraph};

    fn v(s: &str) -> Gf2Vector {
        s.parse().unwrap()
    }

    #[test]
    fn triangle_optima() {
        let k3 = preset("K3").unwrap();
        let ident = GroupUgInstance::uniform(1, k3.clone(), &[v("0")]).unwrap();
        let flip = GroupUgInstance::uniform(1, k3, &[v("1")]).unwrap();
        assert_eq!(
            exact_opt(&ident).unwrap().optimum,
            Fraction::from_integer(1)
        );
        let r = exact_opt(&flip).unwrap();
        assert_eq!(r.optimum, Fraction::new(2, 3));
        assert_eq!(flip.value(&r.witness).unwrap(), r.optimum);
    }

    #[test]
    fn triangle_conflict_is_a_three_cycle() {
        let flip = GroupUgInstance::uniform(1, preset("K3").unwrap(), &[v("1")]).unwrap();
        let Satisfiability::Unsatisfiable(c) = is_completely_satisfiable(&flip) else {
            panic!("satisfiable")
        };
        assert_eq!(c.cycle_len(), 3);
        let total = c
            .cycle
            .iter()
            .fold(Gf2Vector::zero(1), |acc, s| acc + s.shift);
        assert!(!total.is_zero());
    }

    #[test]
    fn bundle_of_two_is_unsatisfiable() {
        let g = MultiGraph::new(&["a", "b"], &[("a", "b")]).unwrap();
        let u = GroupUgInstance::new(2, g, vec![vec![v("00"), v("01")]]).unwrap();
        let Satisfiability::Unsatisfiable(c) = is_completely_satisfiable(&u) else {
            panic!()
        };
        assert_eq!(c.cycle_len(), 2);
    }

    #[test]
    fn budget_is_enforced() {
        let g = MultiGraph::new(&["a", "b", "c"], &[("a", "b"), ("b", "c")]).unwrap();
        let u = GroupUgInstance::uniform(16, g, &[Gf2Vector::zero(16)]).unwrap();
        let err = exact_opt(&u).unwrap_err();
        assert_eq!(
            err,
            SolveError::Budget {
                count: (1u64 << 32).to_string(),
                budget_log2: 30
            }
        );
        let isolated = MultiGraph::new(&["a", "b", "c"], &[("a", "b")]).unwrap();
        let u = GroupUgInstance::uniform(20, isolated, &[Gf2Vector::zero(20)]).unwrap();
        assert!(exact_opt(&u).is_ok());
    }

    #[test]
    fn witness_is_lexicographically_first() {
        let g = MultiGraph::new(&["a", "b"], &[("a", "b")]).unwrap();
        let u = GroupUgInstance::new(2, g, vec![vec![v("10"), v("11")]]).unwrap();
        let r = exact_opt_with(
            &u,
            &SolverConfig {
                pin_components: false,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(r.witness.labels(), &[v("00"), v("10")]);
    }
}
