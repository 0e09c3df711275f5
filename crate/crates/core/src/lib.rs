//! Quantum Go: a Go variant on a board of superposed boxes.
//!
//! - [`statevector`]: dense simulation of the gate set the game needs.
//! - [`game`]: the rules engine (moves, entanglement ledger, capture, scoring).
//! - [`circuit`], [`comparator`], [`qasm`]: circuit construction and export.
//! - [`record`], [`session`]: replayable records and the multi-game host.
//! - [`branches`], [`selfplay`]: exact outcome enumeration and statistics.

pub mod branches;
pub mod circuit;
pub mod comparator;
pub mod game;
pub mod qasm;
pub mod record;
pub mod render;
pub mod selfplay;
pub mod session;
pub mod statevector;

pub use circuit::{build_game_circuit, Circuit, CircuitError};
pub use comparator::{
    build_board_comparator, build_capture_comparator, capture_positions, capture_qubit_count,
    ComparatorLayout, Polarity,
};
pub use game::{
    BoxState, Color, EntangleGate, GameError, GameState, Move, MoveOutcome, PendingEntanglement,
    Pos, Score, Winner,
};
pub use qasm::to_qasm;
pub use record::{GameRecord, RecordError};
pub use session::{MoveRequest, SessionError, SessionEvent, SessionHub, Snapshot};
pub use statevector::{Gate, QuantumState, StateError};
