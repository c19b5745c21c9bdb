//! The k-pebble bijective game on two group-shift structures.
//!
//! A round is: Spoiler picks up a pebble pair, Duplicator proposes a
//! bijection `f: A → B` that respects the pebbles still on the board, Spoiler
//! places the pair on some `a` and `f(a)`. Spoiler wins as soon as the
//! pebbled correspondence stops being a partial isomorphism.

mod duplicator;
mod matches;
mod search;
mod spoiler;

pub use duplicator::{
    Duplicator, DuplicatorError, IdentityDuplicator, TreeAudit, TreeDuplicator, TreeOptions,
};
pub use matches::{run_match, MatchOutcome, MatchResult, MoveRecord, Side};
pub use search::{exhaustive_search, SearchResult};
pub use spoiler::{CycleGreedySpoiler, ExhaustiveSpoiler, RandomSpoiler, Spoiler};

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::json;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::gf2::Gf2Vector;
use crate::instance::{GroupUgInstance, RelationalView};
use crate::lift::LiftIndex;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GameError {
    #[error("universes differ in size: {a} vs {b}")]
    SizeMismatch { a: usize, b: usize },
    #[error("need at least one pebble pair")]
    NoPebbles,
    #[error("pebble pair {index} out of range for k = {k}")]
    PairIndex { index: usize, k: usize },
    #[error("expected phase {expected}, game is in phase {found}")]
    WrongPhase {
        expected: &'static str,
        found: &'static str,
    },
    #[error("no pebble pair has been picked up this round")]
    NoPickup,
    #[error("the game is over")]
    GameOver,
    #[error("element {0} is not in the universe")]
    UnknownElement(String),
    #[error("g* bijections need lifted structures over the same base")]
    NotLifted,
    #[error("g* map has {found} entries for {expected} base vertices")]
    GStarShape { expected: usize, found: usize },
    #[error("table is not a bijection: {0}")]
    NotBijection(String),
    #[error("bijection sends pebbled {a} to {image}, but its pair is {b}")]
    PebbleMismatch { a: String, b: String, image: String },
}

/// Why a set of pebble pairs is not a partial isomorphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IsoViolation {
    /// Two pairs agree on one side and differ on the other.
    NotInjective {
        first: (usize, usize),
        second: (usize, usize),
    },
    /// Shift `shift` relates the A-elements but not the B-elements, or the reverse.
    Shift {
        a: (usize, usize),
        b: (usize, usize),
        shift: Gf2Vector,
        holds_in_a: bool,
    },
}

/// `a_i ↦ b_i` is injective both ways and preserves every shift relation in
/// both directions.
pub fn check_partial_isomorphism(
    a: &RelationalView,
    b: &RelationalView,
    pairs: &[(usize, usize)],
) -> Result<(), IsoViolation> {
    for (i, &(a1, b1)) in pairs.iter().enumerate() {
        for &(a2, b2) in &pairs[i + 1..] {
            if (a1 == a2) != (b1 == b2) {
                return Err(IsoViolation::NotInjective {
                    first: (a1, b1),
                    second: (a2, b2),
                });
            }
            let (sa, sb) = (a.shifts(a1, a2), b.shifts(b1, b2));
            if sa != sb {
                let (shift, holds_in_a) = match sa.iter().find(|g| !sb.contains(g)) {
                    Some(g) => (*g, true),
                    None => (
                        *sb.iter().find(|g| !sa.contains(g)).expect("sets differ"),
                        false,
                    ),
                };
                return Err(IsoViolation::Shift {
                    a: (a1, a2),
                    b: (b1, b2),
                    shift,
                    holds_in_a,
                });
            }
        }
    }
    Ok(())
}

impl IsoViolation {
    pub fn describe(&self, a: &RelationalView, b: &RelationalView) -> String {
        match self {
            IsoViolation::NotInjective { first, second } => format!(
                "pairs ({}, {}) and ({}, {}) are not injective",
                a.name(first.0),
                b.name(first.1),
                a.name(second.0),
                b.name(second.1)
            ),
            IsoViolation::Shift {
                a: pa,
                b: pb,
                shift,
                holds_in_a,
            } => {
                let (yes, no) = if *holds_in_a { ("A", "B") } else { ("B", "A") };
                format!(
                    "shift {shift} relates ({}, {}) in A vs ({}, {}) in B: holds in {yes} only, not in {no}",
                    a.name(pa.0),
                    a.name(pa.1),
                    b.name(pb.0),
                    b.name(pb.1)
                )
            }
        }
    }
}

/// The two structures of a game with their lookup tables.
#[derive(Debug)]
pub struct Arena {
    pub a: GroupUgInstance,
    pub b: GroupUgInstance,
    pub view_a: RelationalView,
    pub view_b: RelationalView,
    lift_a: Option<LiftIndex>,
    lift_b: Option<LiftIndex>,
}

impl Arena {
    pub fn new(a: GroupUgInstance, b: GroupUgInstance) -> Result<Arc<Self>, GameError> {
        if a.vertex_count() != b.vertex_count() {
            return Err(GameError::SizeMismatch {
                a: a.vertex_count(),
                b: b.vertex_count(),
            });
        }
        let (la, lb) = match (LiftIndex::of(&a), LiftIndex::of(&b)) {
            (Some(x), Some(y)) if x.base_names() == y.base_names() && x.m() == y.m() => {
                (Some(x), Some(y))
            }
            _ => (None, None),
        };
        Ok(Arc::new(Self {
            view_a: a.relational_view(),
            view_b: b.relational_view(),
            a,
            b,
            lift_a: la,
            lift_b: lb,
        }))
    }

    pub fn size(&self) -> usize {
        self.a.vertex_count()
    }

    pub fn is_lifted(&self) -> bool {
        self.lift_a.is_some()
    }

    /// Lift bookkeeping of A, shared by B.
    pub fn lift_index(&self) -> Option<&LiftIndex> {
        self.lift_a.as_ref()
    }

    pub fn element_a(&self, name: &str) -> Result<usize, GameError> {
        self.view_a
            .element(name)
            .ok_or_else(|| GameError::UnknownElement(name.to_string()))
    }

    /// `f(x)`; the bijection must already be validated for this arena.
    pub fn apply(&self, f: &Bijection, x: usize) -> usize {
        match f {
            Bijection::GStar(shift) => {
                let (la, lb) = (
                    self.lift_a.as_ref().expect("validated"),
                    self.lift_b.as_ref().expect("validated"),
                );
                let (v, g) = la.split(x);
                lb.element(v, &(g + shift[v]))
            }
            Bijection::Table(t) => t[x],
        }
    }

    pub fn inverse_image(&self, f: &Bijection, y: usize) -> usize {
        match f {
            Bijection::GStar(shift) => {
                let (la, lb) = (
                    self.lift_a.as_ref().expect("validated"),
                    self.lift_b.as_ref().expect("validated"),
                );
                let (v, g) = lb.split(y);
                la.element(v, &(g + shift[v]))
            }
            Bijection::Table(t) => t.iter().position(|&z| z == y).expect("bijection"),
        }
    }

    /// The whole map as an explicit table.
    pub fn table(&self, f: &Bijection) -> Vec<usize> {
        (0..self.size()).map(|x| self.apply(f, x)).collect()
    }

    fn validate(&self, f: &Bijection) -> Result<(), GameError> {
        match f {
            Bijection::GStar(shift) => {
                let la = self.lift_a.as_ref().ok_or(GameError::NotLifted)?;
                if shift.len() != la.base_count() {
                    return Err(GameError::GStarShape {
                        expected: la.base_count(),
                        found: shift.len(),
                    });
                }
                if let Some(g) = shift.iter().find(|g| g.len() != la.m()) {
                    return Err(GameError::NotBijection(format!(
                        "shift {g} has the wrong length"
                    )));
                }
                Ok(())
            }
            Bijection::Table(t) => {
                if t.len() != self.size() {
                    return Err(GameError::NotBijection(format!(
                        "{} entries for {} elements",
                        t.len(),
                        self.size()
                    )));
                }
                let mut seen = vec![false; self.size()];
                for &y in t {
                    if y >= self.size() || std::mem::replace(&mut seen[y], true) {
                        return Err(GameError::NotBijection(format!(
                            "image {y} repeated or out of range"
                        )));
                    }
                }
                Ok(())
            }
        }
    }

    /// `{"v": "bits"}` for a g* bijection.
    pub fn gstar_json(&self, shift: &[Gf2Vector]) -> BTreeMap<String, String> {
        let la = self.lift_a.as_ref().expect("g* needs a lifted arena");
        la.base_names()
            .iter()
            .zip(shift)
            .map(|(n, g)| (n.clone(), g.to_string()))
            .collect()
    }

    /// `{"a-name": "b-name"}` for any bijection.
    pub fn table_json(&self, f: &Bijection) -> BTreeMap<String, String> {
        (0..self.size())
            .map(|x| {
                (
                    self.view_a.name(x).to_string(),
                    self.view_b.name(self.apply(f, x)).to_string(),
                )
            })
            .collect()
    }

    /// SHA-256 of the B-names of `f(0), f(1), …` joined by newlines.
    pub fn table_digest(&self, f: &Bijection) -> String {
        let mut h = Sha256::new();
        for x in 0..self.size() {
            h.update(self.view_b.name(self.apply(f, x)).as_bytes());
            h.update(b"\n");
        }
        hex::encode(h.finalize())
    }
}

/// A bijection from A's universe to B's.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Bijection {
    /// `f(v#g) = v#(g + g*(v))`, indexed by base vertex.
    GStar(Vec<Gf2Vector>),
    /// `f(x) = table[x]`.
    Table(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Phase {
    AwaitPickup { picked: Option<usize> },
    AwaitPlacement { picked: usize, bijection: Bijection },
}

impl Phase {
    pub fn name(&self) -> &'static str {
        match self {
            Phase::AwaitPickup { .. } => "pickup",
            Phase::AwaitPlacement { .. } => "place",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameState {
    pub k: usize,
    pub placements: Vec<Option<(usize, usize)>>,
    pub phase: Phase,
    pub round: usize,
    pub spoiler_won: bool,
    pub violation: Option<IsoViolation>,
}

/// An arena and the state of one game on it.
#[derive(Debug, Clone)]
pub struct Game {
    arena: Arc<Arena>,
    state: GameState,
}

impl Game {
    pub fn new(arena: Arc<Arena>, k: usize) -> Result<Self, GameError> {
        if k == 0 {
            return Err(GameError::NoPebbles);
        }
        let state = GameState {
            k,
            placements: vec![None; k],
            phase: Phase::AwaitPickup { picked: None },
            round: 0,
            spoiler_won: false,
            violation: None,
        };
        Ok(Self { arena, state })
    }

    pub fn arena(&self) -> &Arc<Arena> {
        &self.arena
    }

    pub fn state(&self) -> &GameState {
        &self.state
    }

    pub fn k(&self) -> usize {
        self.state.k
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.state.placements.iter().flatten().copied().collect()
    }

    pub fn pending(&self) -> Option<&Bijection> {
        match &self.state.phase {
            Phase::AwaitPlacement { bijection, .. } => Some(bijection),
            _ => None,
        }
    }

    fn live(&self) -> Result<(), GameError> {
        if self.state.spoiler_won {
            Err(GameError::GameOver)
        } else {
            Ok(())
        }
    }

    fn wrong_phase(&self, expected: &'static str) -> GameError {
        GameError::WrongPhase {
            expected,
            found: self.state.phase.name(),
        }
    }

    /// Lifts pair `index` off the board; an empty slot may be picked.
    pub fn pickup(&mut self, index: usize) -> Result<(), GameError> {
        self.live()?;
        if !matches!(self.state.phase, Phase::AwaitPickup { .. }) {
            return Err(self.wrong_phase("pickup"));
        }
        if index >= self.state.k {
            return Err(GameError::PairIndex {
                index,
                k: self.state.k,
            });
        }
        self.state.placements[index] = None;
        self.state.phase = Phase::AwaitPickup {
            picked: Some(index),
        };
        Ok(())
    }

    /// Accepts Duplicator's bijection once it is well formed and maps every
    /// pebbled A-element to its partner.
    pub fn propose(&mut self, f: Bijection) -> Result<(), GameError> {
        self.live()?;
        let picked = match self.state.phase {
            Phase::AwaitPickup { picked: Some(p) } => p,
            Phase::AwaitPickup { picked: None } => return Err(GameError::NoPickup),
            Phase::AwaitPlacement { .. } => return Err(self.wrong_phase("pickup")),
        };
        self.arena.validate(&f)?;
        for (a, b) in self.pairs() {
            let image = self.arena.apply(&f, a);
            if image != b {
                return Err(GameError::PebbleMismatch {
                    a: self.arena.view_a.name(a).to_string(),
                    b: self.arena.view_b.name(b).to_string(),
                    image: self.arena.view_b.name(image).to_string(),
                });
            }
        }
        self.state.phase = Phase::AwaitPlacement {
            picked,
            bijection: f,
        };
        Ok(())
    }

    /// Places the picked pair on `a` and `f(a)`, then checks the board.
    pub fn place(&mut self, a: usize) -> Result<Option<&IsoViolation>, GameError> {
        self.live()?;
        let (picked, f) = match &self.state.phase {
            Phase::AwaitPlacement { picked, bijection } => (*picked, bijection),
            _ => return Err(self.wrong_phase("place")),
        };
        if a >= self.arena.size() {
            return Err(GameError::UnknownElement(a.to_string()));
        }
        let b = self.arena.apply(f, a);
        self.state.placements[picked] = Some((a, b));
        self.state.round += 1;
        self.state.phase = Phase::AwaitPickup { picked: None };
        if let Err(v) =
            check_partial_isomorphism(&self.arena.view_a, &self.arena.view_b, &self.pairs())
        {
            self.state.spoiler_won = true;
            self.state.violation = Some(v);
        }
        Ok(self.state.violation.as_ref())
    }

    /// State as JSON with element names.
    pub fn state_json(&self) -> serde_json::Value {
        let ar = &self.arena;
        let placements: Vec<_> = self
            .state
            .placements
            .iter()
            .map(|p| p.map(|(a, b)| json!({"a": ar.view_a.name(a), "b": ar.view_b.name(b)})))
            .collect();
        let picked = match &self.state.phase {
            Phase::AwaitPickup { picked } => *picked,
            Phase::AwaitPlacement { picked, .. } => Some(*picked),
        };
        json!({
            "k": self.state.k,
            "round": self.state.round,
            "phase": self.state.phase.name(),
            "picked": picked,
            "placements": placements,
            "winner": self.state.spoiler_won.then_some("spoiler"),
            "violation": self.state.violation.as_ref().map(|v| v.describe(&ar.view_a, &ar.view_b)),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::lifted_preset;

    fn fig2_game(k: usize) -> Game {
        let p = lifted_preset("fig2-lifted").unwrap();
        Game::new(Arena::new(p.a, p.b).unwrap(), k).unwrap()
    }

    #[test]
    fn phases_are_enforced() {
        let mut g = fig2_game(2);
        assert_eq!(
            g.place(0),
            Err(GameError::WrongPhase {
                expected: "place",
                found: "pickup"
            })
        );
        assert_eq!(
            g.propose(Bijection::GStar(vec![Gf2Vector::zero(1); 3])),
            Err(GameError::NoPickup)
        );
        assert_eq!(g.pickup(2), Err(GameError::PairIndex { index: 2, k: 2 }));
        g.pickup(0).unwrap();
        g.pickup(1).unwrap();
        g.propose(Bijection::GStar(vec![Gf2Vector::zero(1); 3]))
            .unwrap();
        assert!(g.pickup(0).is_err());
        assert!(g.place(0).unwrap().is_none());
        assert_eq!(g.state().round, 1);
        assert_eq!(g.state().placements[1], Some((0, 0)));
    }

    #[test]
    fn pebbles_must_be_respected() {
        let mut g = fig2_game(2);
        g.pickup(0).unwrap();
        g.propose(Bijection::GStar(vec![Gf2Vector::zero(1); 3]))
            .unwrap();
        g.place(0).unwrap();
        g.pickup(1).unwrap();
        let one: Gf2Vector = "1".parse().unwrap();
        let err = g
            .propose(Bijection::GStar(vec![
                one,
                Gf2Vector::zero(1),
                Gf2Vector::zero(1),
            ]))
            .unwrap_err();
        assert!(matches!(err, GameError::PebbleMismatch { .. }));
        let mut swap: Vec<usize> = (0..6).collect();
        swap.swap(0, 1);
        assert!(matches!(
            g.propose(Bijection::Table(swap)),
            Err(GameError::PebbleMismatch { .. })
        ));
        assert!(matches!(
            g.propose(Bijection::Table(vec![0; 6])),
            Err(GameError::NotBijection(_))
        ));
    }

    #[test]
    fn identity_loses_across_a_flipped_edge() {
        let mut g = fig2_game(2);
        let zero = Bijection::GStar(vec![Gf2Vector::zero(1); 3]);
        g.pickup(0).unwrap();
        g.propose(zero.clone()).unwrap();
        g.place(g.arena().element_a("v1#0").unwrap()).unwrap();
        g.pickup(1).unwrap();
        g.propose(zero).unwrap();
        let v = g
            .place(g.arena().element_a("v2#0").unwrap())
            .unwrap()
            .cloned();
        let shift = "0".parse().unwrap();
        assert!(
            matches!(v, Some(IsoViolation::Shift { shift: s, holds_in_a: true, .. }) if s == shift)
        );
        assert_eq!(g.pickup(0), Err(GameError::GameOver));
    }

    #[test]
    fn partial_isomorphism_basics() {
        let p = lifted_preset("fig3-lifted").unwrap();
        let va = p.a.relational_view();
        assert_eq!(check_partial_isomorphism(&va, &va, &[]), Ok(()));
        let all: Vec<_> = (0..16).map(|x| (x, x)).collect();
        assert_eq!(check_partial_isomorphism(&va, &va, &all), Ok(()));
        assert!(matches!(
            check_partial_isomorphism(&va, &va, &[(0, 0), (0, 1)]),
            Err(IsoViolation::NotInjective { .. })
        ));
    }
}
