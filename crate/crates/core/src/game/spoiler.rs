use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{exhaustive_search, Arena, Duplicator, Game};
use crate::solver::{is_completely_satisfiable, Satisfiability};

/// A Spoiler agent. `dup` is the opponent as it stands before proposing;
/// agents may clone it to look ahead.
pub trait Spoiler: Send {
    fn name(&self) -> &'static str;

    fn pickup(&mut self, game: &Game, dup: &dyn Duplicator) -> usize;

    /// Called with the bijection pending.
    fn place(&mut self, game: &Game, dup: &dyn Duplicator) -> usize;
}

/// Uniform pickups and placements from a seeded stream.
#[derive(Debug, Clone)]
pub struct RandomSpoiler {
    rng: ChaCha8Rng,
}

impl RandomSpoiler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Spoiler for RandomSpoiler {
    fn name(&self) -> &'static str {
        "random"
    }

    fn pickup(&mut self, game: &Game, _: &dyn Duplicator) -> usize {
        self.rng.gen_range(0..game.k())
    }

    fn place(&mut self, game: &Game, _: &dyn Duplicator) -> usize {
        self.rng.gen_range(0..game.arena().size())
    }
}

/// Pins pair 0 on the first element of an inconsistent cycle, then walks the
/// remaining pairs around the cycle one element per round, placing so that
/// the cycle's structure receives the cycle elements. Plays randomly once
/// the cycle is exhausted or if neither structure has one.
#[derive(Debug, Clone)]
pub struct CycleGreedySpoiler {
    cycle: Vec<usize>,
    in_b: bool,
    step: usize,
    fallback: RandomSpoiler,
}

impl CycleGreedySpoiler {
    pub fn new(arena: &Arena, seed: u64) -> Self {
        let (cycle, in_b) = match (
            is_completely_satisfiable(&arena.b),
            is_completely_satisfiable(&arena.a),
        ) {
            (Satisfiability::Unsatisfiable(c), _) => (c.cycle_vertices(), true),
            (_, Satisfiability::Unsatisfiable(c)) => (c.cycle_vertices(), false),
            _ => (Vec::new(), true),
        };
        Self {
            cycle,
            in_b,
            step: 0,
            fallback: RandomSpoiler::new(seed),
        }
    }

    pub fn cycle(&self) -> &[usize] {
        &self.cycle
    }

    fn slot(&self, k: usize) -> usize {
        if self.step == 0 || k == 1 {
            0
        } else {
            1 + (self.step - 1) % (k - 1)
        }
    }
}

impl Spoiler for CycleGreedySpoiler {
    fn name(&self) -> &'static str {
        "cycle-greedy"
    }

    fn pickup(&mut self, game: &Game, dup: &dyn Duplicator) -> usize {
        if self.step < self.cycle.len() {
            self.slot(game.k())
        } else {
            self.fallback.pickup(game, dup)
        }
    }

    fn place(&mut self, game: &Game, dup: &dyn Duplicator) -> usize {
        if self.step >= self.cycle.len() {
            return self.fallback.place(game, dup);
        }
        let target = self.cycle[self.step];
        self.step += 1;
        if self.in_b {
            game.arena()
                .inverse_image(game.pending().expect("bijection pending"), target)
        } else {
            target
        }
    }
}

/// Plays the first move of a winning line found by exhaustive search to the
/// given depth, or pickup 0 and the first element when there is none.
#[derive(Debug, Clone)]
pub struct ExhaustiveSpoiler {
    depth: usize,
    planned: usize,
}

impl ExhaustiveSpoiler {
    pub fn new(depth: usize) -> Self {
        Self { depth, planned: 0 }
    }
}

impl Spoiler for ExhaustiveSpoiler {
    fn name(&self) -> &'static str {
        "exhaustive"
    }

    fn pickup(&mut self, game: &Game, dup: &dyn Duplicator) -> usize {
        match exhaustive_search(game, dup, self.depth) {
            Ok(r) if r.spoiler_wins => {
                self.planned = r.line[0].1;
                r.line[0].0
            }
            _ => {
                self.planned = 0;
                0
            }
        }
    }

    fn place(&mut self, _: &Game, _: &dyn Duplicator) -> usize {
        self.planned
    }
}
