//! Replayable game records.
//!
//! A record is line-delimited JSON: one header line, then one line per
//! accepted move. Recorded measurement outcomes are authoritative on replay,
//! so a record stays valid if the random stream implementation changes.

use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{Color, GameError, GameState, Move, MoveOutcome, Pos};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordHeader {
    pub schema_version: u32,
    pub size: usize,
    pub seed: u64,
    /// Seconds since the Unix epoch.
    pub created_at: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordEntry {
    pub ordinal: usize,
    pub player: Color,
    #[serde(flatten)]
    pub mv: Move,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome: Option<u8>,
    #[serde(default)]
    pub flipped: Vec<(Pos, Color)>,
    #[serde(default)]
    pub captured: Vec<(Pos, Color)>,
}

impl From<&MoveOutcome> for RecordEntry {
    fn from(out: &MoveOutcome) -> Self {
        RecordEntry {
            ordinal: out.ordinal,
            player: out.player,
            mv: out.mv,
            outcome: out.measured.map(|(_, bit)| bit),
            flipped: out.flipped.clone(),
            captured: out.captured.clone(),
        }
    }
}

#[derive(Debug, Error)]
pub enum RecordError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("record is empty")]
    Empty,
    #[error("unsupported schema version {0}")]
    SchemaVersion(u32),
    #[error("move {ordinal}: {source}")]
    Illegal {
        ordinal: usize,
        #[source]
        source: GameError,
    },
    #[error("move {ordinal}: recorded {what} does not match replay")]
    Mismatch { ordinal: usize, what: &'static str },
    #[error(transparent)]
    Game(#[from] GameError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameRecord {
    pub header: RecordHeader,
    pub entries: Vec<RecordEntry>,
}

impl GameRecord {
    pub fn new(size: usize, seed: u64) -> Self {
        let created_at =
            SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        Self::with_timestamp(size, seed, created_at)
    }

    pub fn with_timestamp(size: usize, seed: u64, created_at: u64) -> Self {
        GameRecord {
            header: RecordHeader { schema_version: SCHEMA_VERSION, size, seed, created_at },
            entries: Vec::new(),
        }
    }

    /// Record of everything played so far in `state`.
    pub fn from_state(state: &GameState, created_at: u64) -> Self {
        let mut record = Self::with_timestamp(state.size(), state.seed(), created_at);
        record.entries = state.move_log().iter().map(RecordEntry::from).collect();
        record
    }

    pub fn push(&mut self, outcome: &MoveOutcome) {
        self.entries.push(RecordEntry::from(outcome));
    }

    pub fn header_line(&self) -> String {
        serde_json::to_string(&self.header).expect("header serializes")
    }

    pub fn entry_line(entry: &RecordEntry) -> String {
        serde_json::to_string(entry).expect("entry serializes")
    }

    /// Canonical serialization: header line plus one line per entry, each
    /// terminated by `\n`.
    pub fn to_jsonl(&self) -> String {
        let mut out = self.header_line();
        out.push('\n');
        for entry in &self.entries {
            out.push_str(&Self::entry_line(entry));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self, RecordError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, first) = lines.next().ok_or(RecordError::Empty)?;
        let header: RecordHeader = serde_json::from_str(first)
            .map_err(|e| RecordError::Parse { line: 1, message: e.to_string() })?;
        if header.schema_version != SCHEMA_VERSION {
            return Err(RecordError::SchemaVersion(header.schema_version));
        }
        let mut entries = Vec::new();
        for (i, line) in lines {
            let entry: RecordEntry = serde_json::from_str(line)
                .map_err(|e| RecordError::Parse { line: i + 1, message: e.to_string() })?;
            if entry.ordinal != entries.len() {
                return Err(RecordError::Parse {
                    line: i + 1,
                    message: format!("expected move {}, found {}", entries.len(), entry.ordinal),
                });
            }
            entries.push(entry);
        }
        Ok(GameRecord { header, entries })
    }

    /// Replays the record, yielding the state after each move (index 0 is the
    /// fresh board). Fails if any recorded effect disagrees with the rules.
    pub fn replay_states(&self) -> Result<Vec<GameState>, RecordError> {
        let mut state = GameState::new(self.header.size, self.header.seed)?;
        let mut states = vec![state.clone()];
        for entry in &self.entries {
            let ordinal = entry.ordinal;
            match (entry.mv, entry.outcome) {
                (Move::Classical { .. }, None) => {
                    return Err(RecordError::Mismatch { ordinal, what: "outcome" })
                }
                (Move::Quantum { .. } | Move::Pass, Some(_)) => {
                    return Err(RecordError::Mismatch { ordinal, what: "outcome" })
                }
                _ => {}
            }
            let out = state
                .play_with_outcome(entry.player, entry.mv, entry.outcome)
                .map_err(|source| RecordError::Illegal { ordinal, source })?;
            if out.flipped != entry.flipped {
                return Err(RecordError::Mismatch { ordinal, what: "flipped targets" });
            }
            if out.captured != entry.captured {
                return Err(RecordError::Mismatch { ordinal, what: "captures" });
            }
            states.push(state.clone());
        }
        Ok(states)
    }

    pub fn replay(&self) -> Result<GameState, RecordError> {
        Ok(self.replay_states()?.pop().expect("at least the initial state"))
    }
}
