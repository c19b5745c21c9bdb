use std::collections::HashMap;

use super::{Duplicator, DuplicatorError, Game};

/// Outcome of a Spoiler-only game-tree search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchResult {
    pub spoiler_wins: bool,
    /// A winning line as (pickup, placement) pairs, empty when there is none.
    pub line: Vec<(usize, usize)>,
    /// Positions expanded, memo hits excluded.
    pub nodes: u64,
}

type Key = (Vec<(usize, usize)>, Vec<u8>, usize);

struct Search {
    memo: HashMap<Key, Option<Vec<(usize, usize)>>>,
    nodes: u64,
}

impl Search {
    fn win(
        &mut self,
        game: &Game,
        dup: &dyn Duplicator,
        depth: usize,
    ) -> Result<Option<Vec<(usize, usize)>>, DuplicatorError> {
        if depth == 0 {
            return Ok(None);
        }
        let mut placed = game.pairs();
        placed.sort_unstable();
        let key = (placed, dup.memory_key(), depth);
        if let Some(hit) = self.memo.get(&key) {
            return Ok(hit.clone());
        }
        self.nodes += 1;
        let found = self.expand(game, dup, depth)?;
        self.memo.insert(key, found.clone());
        Ok(found)
    }

    fn expand(
        &mut self,
        game: &Game,
        dup: &dyn Duplicator,
        depth: usize,
    ) -> Result<Option<Vec<(usize, usize)>>, DuplicatorError> {
        let mut tried_empty = false;
        for p in 0..game.k() {
            if game.state().placements[p].is_none() {
                if tried_empty {
                    continue;
                }
                tried_empty = true;
            }
            let mut picked = game.clone();
            picked.pickup(p).expect("legal pickup");
            let mut d = dup.box_clone();
            let f = d.bijection(&picked)?;
            if picked.propose(f).is_err() {
                return Ok(Some(vec![(p, 0)]));
            }
            for a in 0..game.arena().size() {
                let mut next = picked.clone();
                next.place(a).expect("legal placement");
                if next.state().spoiler_won {
                    return Ok(Some(vec![(p, a)]));
                }
                let mut d2 = d.box_clone();
                d2.observe_placement(&next, a);
                if let Some(mut rest) = self.win(&next, d2.as_ref(), depth - 1)? {
                    rest.insert(0, (p, a));
                    return Ok(Some(rest));
                }
            }
        }
        Ok(None)
    }
}

/// Whether Spoiler can force a win within `depth` rounds from a position
/// awaiting a pickup, against `dup` as a fixed deterministic opponent.
/// Pebble pairs are interchangeable, so positions are memoized on the sorted
/// placements together with Duplicator's memory.
pub fn exhaustive_search(
    game: &Game,
    dup: &dyn Duplicator,
    depth: usize,
) -> Result<SearchResult, DuplicatorError> {
    let mut s = Search {
        memo: HashMap::new(),
        nodes: 0,
    };
    let line = s.win(game, dup, depth)?;
    Ok(SearchResult {
        spoiler_wins: line.is_some(),
        line: line.unwrap_or_default(),
        nodes: s.nodes,
    })
}
