//! In-memory pebble-game sessions behind a small JSON protocol.
//!
//! [`Service::handle`] is the whole protocol as a plain function of method,
//! path and body; [`router`] mounts it on axum with CORS.

mod http;

use std::collections::HashMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use parking_lot::{Mutex, RwLock};
use serde_json::{json, Value};
use ug_core::game::{Arena, Bijection, Duplicator, Game, GameError, TreeDuplicator, TreeOptions};
use ug_core::presets::{lifted_preset, LiftedPreset, LIFTED_PRESETS};
use uuid::Uuid;

pub use http::{router, serve};

/// Bijections on universes up to this size also go out as explicit tables.
pub const TABLE_LIMIT: usize = 64;

pub const DEFAULT_IDLE: Duration = Duration::from_secs(3600);

/// Builds the Duplicator for a new session.
pub type DuplicatorFactory =
    Arc<dyn Fn(&LiftedPreset, &Arena) -> Result<Box<dyn Duplicator>, String> + Send + Sync>;

#[derive(Debug, Clone, PartialEq)]
pub struct Response {
    pub status: u16,
    pub body: Option<Value>,
}

impl Response {
    fn json(status: u16, body: Value) -> Self {
        Self {
            status,
            body: Some(body),
        }
    }

    fn error(status: u16, reason: impl Into<String>) -> Self {
        Self::json(status, json!({ "error": reason.into() }))
    }
}

struct Session {
    preset: &'static str,
    game: Game,
    dup: Box<dyn Duplicator>,
    touched: Instant,
}

impl Session {
    fn state(&self) -> Value {
        let mut s = self.game.state_json();
        s["preset"] = json!(self.preset);
        s
    }
}

/// The session table.
#[derive(Clone)]
pub struct Service {
    sessions: Arc<RwLock<HashMap<Uuid, Arc<Mutex<Session>>>>>,
    factory: DuplicatorFactory,
    idle: Duration,
}

impl Default for Service {
    fn default() -> Self {
        Self::new(tree_duplicator(), DEFAULT_IDLE)
    }
}

/// The tree strategy with default options.
pub fn tree_duplicator() -> DuplicatorFactory {
    Arc::new(|p, arena| {
        TreeDuplicator::new(p.context.clone(), arena, TreeOptions::default())
            .map(|d| Box::new(d) as Box<dyn Duplicator>)
            .map_err(|e| e.to_string())
    })
}

fn game_error(e: GameError) -> Response {
    match e {
        GameError::WrongPhase { .. } | GameError::NoPickup | GameError::GameOver => {
            Response::error(409, e.to_string())
        }
        _ => Response::error(422, e.to_string()),
    }
}

fn field<'a>(body: &'a Value, key: &str) -> Result<&'a Value, Response> {
    body.get(key)
        .ok_or_else(|| Response::error(400, format!("missing field {key:?}")))
}

fn parse(body: &[u8]) -> Result<Value, Response> {
    let v: Value = serde_json::from_slice(body)
        .map_err(|e| Response::error(400, format!("malformed JSON: {e}")))?;
    if v.is_object() {
        Ok(v)
    } else {
        Err(Response::error(400, "body must be a JSON object"))
    }
}

impl Service {
    pub fn new(factory: DuplicatorFactory, idle: Duration) -> Self {
        Self {
            sessions: Arc::default(),
            factory,
            idle,
        }
    }

    pub fn session_count(&self) -> usize {
        self.sessions.read().len()
    }

    fn expire(&self) {
        let now = Instant::now();
        self.sessions.write().retain(|_, s| {
            s.try_lock()
                .is_none_or(|s| now.duration_since(s.touched) < self.idle)
        });
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, Response> {
        Uuid::parse_str(id)
            .ok()
            .and_then(|id| self.sessions.read().get(&id).cloned())
            .ok_or_else(|| Response::error(404, format!("no session {id}")))
    }

    pub fn handle(&self, method: &str, path: &str, body: &[u8]) -> Response {
        self.expire();
        let parts: Vec<&str> = path.trim_end_matches('/').split('/').collect();
        let result = match (method, parts.as_slice()) {
            ("POST", ["", "api", "sessions"]) => self.create(body),
            ("GET", ["", "api", "sessions", id]) => self.get(id),
            ("DELETE", ["", "api", "sessions", id]) => self.delete(id),
            ("POST", ["", "api", "sessions", id, "pickup"]) => self.pickup(id, body),
            ("POST", ["", "api", "sessions", id, "place"]) => self.place(id, body),
            (_, ["", "api", "sessions", ..]) => Err(Response::error(405, "method not allowed")),
            _ => Err(Response::error(404, format!("no route {path}"))),
        };
        result.unwrap_or_else(|r| r)
    }

    fn create(&self, body: &[u8]) -> Result<Response, Response> {
        let body = parse(body)?;
        let name = field(&body, "preset")?
            .as_str()
            .ok_or_else(|| Response::error(400, "preset must be a string"))?;
        let k = field(&body, "k")?
            .as_u64()
            .ok_or_else(|| Response::error(400, "k must be a non-negative integer"))?;
        let preset_name = LIFTED_PRESETS
            .iter()
            .copied()
            .find(|p| *p == name)
            .ok_or_else(|| {
                Response::error(
                    422,
                    format!("unknown preset {name:?}; choose one of {LIFTED_PRESETS:?}"),
                )
            })?;
        let preset = lifted_preset(preset_name).map_err(|e| Response::error(500, e.to_string()))?;
        let arena = Arena::new(preset.a.clone(), preset.b.clone())
            .map_err(|e| Response::error(500, e.to_string()))?;
        let game = Game::new(arena.clone(), k as usize).map_err(game_error)?;
        let dup = (self.factory)(&preset, &arena).map_err(|e| Response::error(422, e))?;
        let session = Session {
            preset: preset_name,
            game,
            dup,
            touched: Instant::now(),
        };
        let id = Uuid::new_v4();
        let state = session.state();
        self.sessions
            .write()
            .insert(id, Arc::new(Mutex::new(session)));
        Ok(Response::json(
            201,
            json!({ "session_id": id.to_string(), "state": state }),
        ))
    }

    fn get(&self, id: &str) -> Result<Response, Response> {
        let s = self.session(id)?;
        let mut s = s.lock();
        s.touched = Instant::now();
        Ok(Response::json(200, s.state()))
    }

    fn delete(&self, id: &str) -> Result<Response, Response> {
        self.session(id)?;
        let id = Uuid::parse_str(id).expect("looked up above");
        self.sessions.write().remove(&id);
        Ok(Response {
            status: 204,
            body: None,
        })
    }

    fn pickup(&self, id: &str, body: &[u8]) -> Result<Response, Response> {
        let s = self.session(id)?;
        let body = parse(body)?;
        let pair = field(&body, "pair")?
            .as_u64()
            .ok_or_else(|| Response::error(400, "pair must be a non-negative integer"))?;
        let mut guard = s.lock();
        let s = &mut *guard;
        s.touched = Instant::now();
        let before = s.game.clone();
        s.game.pickup(pair as usize).map_err(game_error)?;
        let f = match s.dup.bijection(&s.game) {
            Ok(f) => f,
            Err(e) => {
                s.game = before;
                return Err(Response::error(500, format!("duplicator failed: {e}")));
            }
        };
        if let Err(e) = s.game.propose(f.clone()) {
            s.game = before;
            return Err(Response::error(
                500,
                format!("duplicator broke the rules: {e}"),
            ));
        }
        let arena = s.game.arena();
        let mut bijection = json!({});
        if let Bijection::GStar(shift) = &f {
            bijection["gstar"] = json!(arena.gstar_json(shift));
        }
        if arena.size() <= TABLE_LIMIT {
            bijection["table"] = json!(arena.table_json(&f));
        }
        Ok(Response::json(
            200,
            json!({ "bijection": bijection, "state": s.state() }),
        ))
    }

    fn place(&self, id: &str, body: &[u8]) -> Result<Response, Response> {
        let s = self.session(id)?;
        let body = parse(body)?;
        let name = field(&body, "a")?
            .as_str()
            .ok_or_else(|| Response::error(400, "a must be an element name"))?;
        let mut guard = s.lock();
        let s = &mut *guard;
        s.touched = Instant::now();
        if s.game.pending().is_none() {
            return Err(game_error(if s.game.state().spoiler_won {
                GameError::GameOver
            } else {
                GameError::WrongPhase {
                    expected: "place",
                    found: "pickup",
                }
            }));
        }
        let a = s.game.arena().element_a(name).map_err(game_error)?;
        s.game.place(a).map_err(game_error)?;
        if !s.game.state().spoiler_won {
            s.dup.observe_placement(&s.game, a);
        }
        Ok(Response::json(200, json!({ "state": s.state() })))
    }
}
