//! Gate-level circuits and the game-trace construction.
//!
//! [`build_game_circuit`] turns a game record into the circuit that would
//! realize it: a Hadamard on every box qubit, then for each classical move the
//! pending CX/anti-CX gates whose control is the measured box, the measurement
//! itself, and a reset (plus X for a Black result) that pins the qubit.
//! Captured boxes are reset and re-superposed.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::game::{BoxState, Color, EntangleGate};
use crate::record::{GameRecord, RecordError};
use crate::statevector::{Gate, QuantumState, StateError};

#[derive(Debug, Error)]
pub enum CircuitError {
    #[error("invalid gate {index}: {source}")]
    InvalidGate {
        index: usize,
        #[source]
        source: StateError,
    },
    #[error("classical bit {clbit} is out of range for {num_clbits} bits")]
    ClbitOutOfRange { clbit: usize, num_clbits: usize },
    #[error("a {n}x{n} board has no interior positions")]
    NoInterior { n: usize },
    #[error("box {pos} is not an interior position of a {n}x{n} board")]
    NotInterior { n: usize, pos: usize },
    #[error("export supports at most {max} qubits, circuit has {found}")]
    TooManyQubits { found: usize, max: usize },
    #[error("circuit has {measurements} measurements but {outcomes} outcomes were supplied")]
    OutcomeCount { measurements: usize, outcomes: usize },
    #[error("measurement {index} has zero probability of the requested outcome")]
    ImpossibleOutcome { index: usize },
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Record(#[from] RecordError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    num_qubits: usize,
    num_clbits: usize,
    ops: Vec<Gate>,
}

impl Circuit {
    pub fn new(num_qubits: usize, num_clbits: usize) -> Self {
        Self { num_qubits, num_clbits, ops: Vec::new() }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_clbits(&self) -> usize {
        self.num_clbits
    }

    pub fn ops(&self) -> &[Gate] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Appends a gate after checking its indices.
    pub fn push(&mut self, gate: Gate) -> Result<(), CircuitError> {
        gate.validate(self.num_qubits)
            .map_err(|source| CircuitError::InvalidGate { index: self.ops.len(), source })?;
        if let Gate::Measure { clbit, .. } = gate {
            if clbit >= self.num_clbits {
                return Err(CircuitError::ClbitOutOfRange { clbit, num_clbits: self.num_clbits });
            }
        }
        self.ops.push(gate);
        Ok(())
    }

    pub(crate) fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) -> Result<(), CircuitError> {
        gates.into_iter().try_for_each(|g| self.push(g))
    }

    /// Gate counts keyed by gate name.
    pub fn gate_counts(&self) -> BTreeMap<&'static str, usize> {
        let mut counts = BTreeMap::new();
        for op in &self.ops {
            *counts.entry(op.name()).or_insert(0) += 1;
        }
        counts
    }

    pub fn measurement_count(&self) -> usize {
        self.ops.iter().filter(|g| matches!(g, Gate::Measure { .. })).count()
    }

    /// Applies the circuit to `state`, taking measurement draws from `draws`.
    /// Returns the classical register.
    pub fn run(
        &self,
        state: &mut QuantumState,
        mut draws: impl FnMut() -> f64,
    ) -> Result<Vec<u8>, CircuitError> {
        let mut clbits = vec![0u8; self.num_clbits];
        for op in &self.ops {
            match *op {
                Gate::Measure { qubit, clbit } => clbits[clbit] = state.measure(qubit, draws())?,
                _ => state.apply(op)?,
            }
        }
        Ok(clbits)
    }

    /// Simulates from `|0...0>` with every measurement forced to the given
    /// outcomes, in circuit order. Returns the final state and the Born
    /// probability of the whole outcome sequence.
    pub fn simulate_postselected(&self, outcomes: &[u8]) -> Result<(QuantumState, f64), CircuitError> {
        let measurements = self.measurement_count();
        if measurements != outcomes.len() {
            return Err(CircuitError::OutcomeCount { measurements, outcomes: outcomes.len() });
        }
        let mut state = QuantumState::new(self.num_qubits)?;
        let mut probability = 1.0;
        let mut next = outcomes.iter();
        for (index, op) in self.ops.iter().enumerate() {
            match *op {
                Gate::Measure { qubit, .. } => {
                    let bit = *next.next().expect("counted above");
                    let p1 = state.prob_one(qubit)?;
                    let p = if bit == 1 { p1 } else { 1.0 - p1 };
                    if p <= 1e-15 {
                        return Err(CircuitError::ImpossibleOutcome { index });
                    }
                    state.project(qubit, bit);
                    probability *= p;
                }
                _ => state.apply(op)?,
            }
        }
        Ok((state, probability))
    }
}

/// Reads each box qubit of a game-trace state: pinned qubits give a stone,
/// anything else is still superposed.
pub fn read_board(state: &QuantumState, num_boxes: usize) -> Result<Vec<BoxState>, CircuitError> {
    const PINNED: f64 = 1e-9;
    (0..num_boxes)
        .map(|q| {
            let p1 = state.prob_one(q)?;
            Ok(if p1 > 1.0 - PINNED {
                BoxState::Collapsed(Color::Black)
            } else if p1 < PINNED {
                BoxState::Collapsed(Color::White)
            } else {
                BoxState::Superposed
            })
        })
        .collect()
}

/// Builds the circuit realizing a recorded game on `n^2` qubits and `n^2`
/// classical bits.
pub fn build_game_circuit(record: &GameRecord) -> Result<Circuit, CircuitError> {
    let states = record.replay_states()?;
    let last = states.last().expect("replay yields the initial state");
    let boxes = last.num_boxes();
    let mut circuit = Circuit::new(boxes, boxes);
    circuit.extend((0..boxes).map(|qubit| Gate::H { qubit }))?;
    for out in last.move_log() {
        let Some((pos, bit)) = out.measured else { continue };
        let q = pos.qubit();
        for entry in &out.resolved {
            let (control, target) = (entry.control.qubit(), entry.target.qubit());
            circuit.push(match entry.gate {
                EntangleGate::Cnot => Gate::Cx { control, target },
                EntangleGate::AntiCnot => Gate::AntiCx { control, target },
            })?;
        }
        circuit.push(Gate::Measure { qubit: q, clbit: q })?;
        circuit.push(Gate::Reset { qubit: q })?;
        if bit == 1 {
            circuit.push(Gate::X { qubit: q })?;
        }
        for (captured, _) in &out.captured {
            circuit.push(Gate::Reset { qubit: captured.qubit() })?;
            circuit.push(Gate::H { qubit: captured.qubit() })?;
        }
    }
    Ok(circuit)
}

/// Measurement outcomes of a record in circuit order.
pub fn recorded_outcomes(record: &GameRecord) -> Vec<u8> {
    record.entries.iter().filter_map(|e| e.outcome).collect()
}
