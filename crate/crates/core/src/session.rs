//! Multi-game session host.
//!
//! Each game lives behind its own mutex, so moves on one game are applied
//! strictly one at a time while different games proceed independently.
//! Subscribers get unbounded channels: broadcasting never blocks the move
//! path, and a dropped receiver is pruned on the next send.
//!
//! With a record directory configured, every game is persisted as
//! `<id>.jsonl`: the header line is written on creation and one entry line is
//! appended (and flushed) per accepted move, before the move becomes visible.

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use tokio::sync::mpsc::{unbounded_channel, UnboundedReceiver, UnboundedSender};

use crate::circuit::{build_game_circuit, CircuitError};
use crate::game::{Color, EntangleGate, GameError, GameState, Move, MoveOutcome, Pos, Score, Winner};
use crate::qasm::to_qasm;
use crate::record::{GameRecord, RecordError};

pub type GameId = String;

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("unknown game '{0}'")]
    UnknownGame(GameId),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Record(#[from] RecordError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("record storage: {0}")]
    Io(#[from] io::Error),
}

impl SessionError {
    pub fn code(&self) -> &'static str {
        match self {
            SessionError::UnknownGame(_) => "unknown_game",
            SessionError::Game(e) => e.code(),
            SessionError::Record(_) => "bad_record",
            SessionError::Circuit(_) => "circuit_error",
            SessionError::Io(_) => "storage_error",
        }
    }
}

/// A move submission: `{"player": "black", "kind": "classical", "pos": 4}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveRequest {
    pub player: Color,
    #[serde(flatten)]
    pub mv: Move,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerPair {
    pub control: Pos,
    pub target: Pos,
    pub gate: EntangleGate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snapshot {
    pub id: GameId,
    pub size: usize,
    /// One string per row: `.` superposed, `B` / `W` stones.
    pub board: Vec<String>,
    pub ledger: Vec<LedgerPair>,
    pub captured_black: u32,
    pub captured_white: u32,
    pub pass_bonus_black: u32,
    pub pass_bonus_white: u32,
    pub to_move: Color,
    /// Number of moves played so far.
    pub moves: usize,
    pub game_over: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<Score>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub winner: Option<Winner>,
}

impl Snapshot {
    pub fn of(id: &str, state: &GameState) -> Self {
        let marks = state.marks();
        let n = state.size();
        let (score, winner) = if state.is_over() {
            (Some(state.score()), state.winner().ok())
        } else {
            (None, None)
        };
        Snapshot {
            id: id.to_owned(),
            size: n,
            board: (0..n).map(|r| marks[r * n..(r + 1) * n].to_owned()).collect(),
            ledger: state
                .ledger()
                .iter()
                .map(|e| LedgerPair { control: e.control, target: e.target, gate: e.gate })
                .collect(),
            captured_black: state.captured(Color::Black),
            captured_white: state.captured(Color::White),
            pass_bonus_black: state.pass_bonus(Color::Black),
            pass_bonus_white: state.pass_bonus(Color::White),
            to_move: state.to_move(),
            moves: state.move_log().len(),
            game_over: state.is_over(),
            score,
            winner,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
pub enum SessionEvent {
    StateUpdate {
        snapshot: Snapshot,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        last_move: Option<MoveOutcome>,
    },
    MoveRejected { code: String, reason: String },
    GameOver { black: u32, white: u32, winner: Winner },
}

impl SessionEvent {
    pub fn rejected(err: &SessionError) -> Self {
        SessionEvent::MoveRejected { code: err.code().to_owned(), reason: err.to_string() }
    }

    fn game_over(state: &GameState) -> Option<Self> {
        let winner = state.winner().ok()?;
        let score = state.score();
        Some(SessionEvent::GameOver { black: score.black, white: score.white, winner })
    }
}

struct GameSlot {
    state: GameState,
    record: GameRecord,
    file: Option<File>,
    subscribers: Vec<UnboundedSender<SessionEvent>>,
}

impl GameSlot {
    fn broadcast(&mut self, event: &SessionEvent) {
        self.subscribers.retain(|tx| tx.send(event.clone()).is_ok());
    }
}

#[derive(Default)]
pub struct SessionHub {
    games: RwLock<HashMap<GameId, Arc<Mutex<GameSlot>>>>,
    record_dir: Option<PathBuf>,
}

impl SessionHub {
    /// In-memory hub without persistence.
    pub fn new() -> Self {
        Self::default()
    }

    /// Hub persisting records under `dir` (created if absent). Records
    /// already present are loaded and replayed.
    pub fn open(dir: impl AsRef<Path>) -> Result<Self, SessionError> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir)?;
        let mut games = HashMap::new();
        for entry in fs::read_dir(&dir)? {
            let path = entry?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("jsonl") {
                continue;
            }
            let Some(id) = path.file_stem().and_then(|s| s.to_str()).map(str::to_owned) else {
                continue;
            };
            let record = GameRecord::from_jsonl(&fs::read_to_string(&path)?)?;
            let state = record.replay()?;
            let file = OpenOptions::new().append(true).open(&path)?;
            let slot = GameSlot { state, record, file: Some(file), subscribers: Vec::new() };
            games.insert(id, Arc::new(Mutex::new(slot)));
        }
        Ok(Self { games: RwLock::new(games), record_dir: Some(dir) })
    }

    pub fn record_dir(&self) -> Option<&Path> {
        self.record_dir.as_deref()
    }

    pub fn game_ids(&self) -> Vec<GameId> {
        let mut ids: Vec<_> = self.games.read().unwrap().keys().cloned().collect();
        ids.sort();
        ids
    }

    fn slot(&self, id: &str) -> Result<Arc<Mutex<GameSlot>>, SessionError> {
        self.games
            .read()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| SessionError::UnknownGame(id.to_owned()))
    }

    /// Starts a game; without a seed one is drawn from system entropy.
    pub fn create_game(&self, size: usize, seed: Option<u64>) -> Result<GameId, SessionError> {
        let seed = seed.unwrap_or_else(rand::random);
        let state = GameState::new(size, seed)?;
        let record = GameRecord::new(size, seed);
        let id = uuid::Uuid::new_v4().simple().to_string();
        let file = match &self.record_dir {
            Some(dir) => {
                let mut file = OpenOptions::new()
                    .create_new(true)
                    .append(true)
                    .open(dir.join(format!("{id}.jsonl")))?;
                writeln!(file, "{}", record.header_line())?;
                file.flush()?;
                Some(file)
            }
            None => None,
        };
        let slot = GameSlot { state, record, file, subscribers: Vec::new() };
        self.games.write().unwrap().insert(id.clone(), Arc::new(Mutex::new(slot)));
        Ok(id)
    }

    /// Applies a move, persists it, and broadcasts the resulting events.
    pub fn submit_move(&self, id: &str, request: MoveRequest) -> Result<MoveOutcome, SessionError> {
        let slot = self.slot(id)?;
        let mut slot = slot.lock().unwrap();
        let mut state = slot.state.clone();
        let outcome = state.play(request.player, request.mv)?;
        if let Some(file) = slot.file.as_mut() {
            let entry = (&outcome).into();
            writeln!(file, "{}", GameRecord::entry_line(&entry))?;
            file.flush()?;
        }
        slot.record.push(&outcome);
        slot.state = state;
        let update = SessionEvent::StateUpdate {
            snapshot: Snapshot::of(id, &slot.state),
            last_move: Some(outcome.clone()),
        };
        slot.broadcast(&update);
        if let Some(over) = SessionEvent::game_over(&slot.state).filter(|_| outcome.game_over) {
            slot.broadcast(&over);
        }
        Ok(outcome)
    }

    pub fn get_state(&self, id: &str) -> Result<Snapshot, SessionError> {
        let slot = self.slot(id)?;
        let slot = slot.lock().unwrap();
        Ok(Snapshot::of(id, &slot.state))
    }

    /// Clone of the live game state.
    pub fn game_state(&self, id: &str) -> Result<GameState, SessionError> {
        Ok(self.slot(id)?.lock().unwrap().state.clone())
    }

    pub fn record(&self, id: &str) -> Result<GameRecord, SessionError> {
        Ok(self.slot(id)?.lock().unwrap().record.clone())
    }

    /// Canonical line-delimited JSON of the game record.
    pub fn export_record(&self, id: &str) -> Result<String, SessionError> {
        Ok(self.record(id)?.to_jsonl())
    }

    pub fn export_qasm(&self, id: &str) -> Result<String, SessionError> {
        let record = self.record(id)?;
        Ok(to_qasm(&build_game_circuit(&record)?)?)
    }

    /// Subscribes to a game's events. The receiver first gets the current
    /// snapshot (and `GameOver` if the game has ended), then every later
    /// event in order.
    pub fn subscribe(&self, id: &str) -> Result<UnboundedReceiver<SessionEvent>, SessionError> {
        let slot = self.slot(id)?;
        let mut slot = slot.lock().unwrap();
        let (tx, rx) = unbounded_channel();
        let initial = SessionEvent::StateUpdate { snapshot: Snapshot::of(id, &slot.state), last_move: None };
        // The receiver is alive, so these sends cannot fail.
        let _ = tx.send(initial);
        if let Some(over) = SessionEvent::game_over(&slot.state) {
            let _ = tx.send(over);
        }
        slot.subscribers.push(tx);
        Ok(rx)
    }
}
