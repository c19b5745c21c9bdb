use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::json;

use super::{Bijection, Duplicator, Game, Spoiler};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Spoiler,
    Duplicator,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatchOutcome {
    SpoilerWin {
        round: usize,
    },
    DuplicatorSurvived {
        rounds: usize,
    },
    Forfeit {
        by: Side,
        round: usize,
        reason: String,
    },
}

impl MatchOutcome {
    pub fn to_json_value(&self) -> serde_json::Value {
        match self {
            MatchOutcome::SpoilerWin { round } => json!({"result": "spoiler_win", "round": round}),
            MatchOutcome::DuplicatorSurvived { rounds } => {
                json!({"result": "duplicator_survived", "rounds": rounds})
            }
            MatchOutcome::Forfeit { by, round, reason } => {
                json!({"result": "forfeit", "by": by, "round": round, "reason": reason})
            }
        }
    }
}

/// One completed round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoveRecord {
    pub round: usize,
    pub pickup: usize,
    pub gstar: Option<BTreeMap<String, String>>,
    pub table_digest: Option<String>,
    pub place: String,
    pub spoiler_won: bool,
}

impl MoveRecord {
    pub fn to_json_value(&self) -> serde_json::Value {
        let mut v = json!({
            "round": self.round,
            "pickup": self.pickup,
            "place": self.place,
            "winner": self.spoiler_won.then_some("spoiler"),
        });
        if let Some(g) = &self.gstar {
            v["gstar"] = json!(g);
        }
        if let Some(d) = &self.table_digest {
            v["table_digest"] = json!(d);
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchResult {
    pub outcome: MatchOutcome,
    pub transcript: Vec<MoveRecord>,
}

impl MatchResult {
    pub fn to_json_value(&self) -> serde_json::Value {
        json!({
            "outcome": self.outcome.to_json_value(),
            "transcript": self.transcript.iter().map(MoveRecord::to_json_value).collect::<Vec<_>>(),
        })
    }
}

/// Plays from `game` until Spoiler wins, someone breaks the protocol, or
/// `max_rounds` rounds have been completed.
pub fn run_match(
    mut game: Game,
    spoiler: &mut dyn Spoiler,
    dup: &mut dyn Duplicator,
    max_rounds: usize,
) -> MatchResult {
    let mut transcript = Vec::new();
    let forfeit = |by, round, reason: String, transcript| MatchResult {
        outcome: MatchOutcome::Forfeit { by, round, reason },
        transcript,
    };
    for round in 1..=max_rounds {
        let p = spoiler.pickup(&game, dup);
        if let Err(e) = game.pickup(p) {
            return forfeit(Side::Spoiler, round, e.to_string(), transcript);
        }
        let f = match dup.bijection(&game) {
            Ok(f) => f,
            Err(e) => return forfeit(Side::Duplicator, round, e.to_string(), transcript),
        };
        let (gstar, table_digest) = match &f {
            Bijection::GStar(s) => (Some(game.arena().gstar_json(s)), None),
            Bijection::Table(_) => (None, Some(game.arena().table_digest(&f))),
        };
        if let Err(e) = game.propose(f) {
            return forfeit(Side::Duplicator, round, e.to_string(), transcript);
        }
        let a = spoiler.place(&game, dup);
        if let Err(e) = game.place(a) {
            return forfeit(Side::Spoiler, round, e.to_string(), transcript);
        }
        let won = game.state().spoiler_won;
        transcript.push(MoveRecord {
            round,
            pickup: p,
            gstar,
            table_digest,
            place: game.arena().view_a.name(a).to_string(),
            spoiler_won: won,
        });
        if won {
            return MatchResult {
                outcome: MatchOutcome::SpoilerWin { round },
                transcript,
            };
        }
        dup.observe_placement(&game, a);
    }
    MatchResult {
        outcome: MatchOutcome::DuplicatorSurvived { rounds: max_rounds },
        transcript,
    }
}
