//! Capture-comparator circuits.
//!
//! For an interior box, the comparator checks the 3x3 neighbourhood against
//! a capture pattern: the centre must hold one value and all eight
//! surrounding boxes the other. The nine pattern controls are combined by a
//! Toffoli ladder over eight work qubits, the last work qubit is copied into
//! the position's flag qubit, and the ladder is uncomputed so every work
//! qubit returns to `|0>`. Controls that must read 0 are X-conjugated
//! (anti-controls).
//!
//! Qubit layout on an `n x n` board: box qubits `0..n^2`, then the 8 shared
//! work qubits, then one flag per interior position, for
//! `n^2 + 8 + (n-2)^2` qubits in total. Each flag is measured into its own
//! classical bit.

use crate::circuit::{Circuit, CircuitError};
use crate::game::{Color, Pos};
use crate::statevector::Gate;

pub const WORK_QUBITS: usize = 8;

/// Which bit value stands for a stone of each colour in the comparator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Polarity {
    /// Capturing Black looks for a 0 at the centre surrounded by 1s;
    /// capturing White looks for a 1 surrounded by 0s.
    #[default]
    Literal,
    /// Uses the board marking (Black = 1, White = 0): capturing Black looks
    /// for a 1 surrounded by 0s.
    Marking,
}

impl Polarity {
    /// `(centre value, neighbour value)` that signals a capture of `color`.
    pub fn pattern(self, color: Color) -> (u8, u8) {
        let center = match (self, color) {
            (Polarity::Literal, Color::Black) | (Polarity::Marking, Color::White) => 0,
            (Polarity::Literal, Color::White) | (Polarity::Marking, Color::Black) => 1,
        };
        (center, 1 - center)
    }
}

/// One control of the pattern layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PatternControl {
    pub qubit: usize,
    /// `true` for a plain control (fires on 1), `false` for an anti-control.
    pub active_high: bool,
}

/// Total qubits for a comparator over every interior position of an
/// `n x n` board.
pub fn capture_qubit_count(n: usize) -> Result<usize, CircuitError> {
    if n < 3 {
        return Err(CircuitError::NoInterior { n });
    }
    Ok(n * n + (n - 2) * (n - 2) + WORK_QUBITS)
}

/// Interior boxes of an `n x n` board in row-major order.
pub fn capture_positions(n: usize) -> Result<Vec<Pos>, CircuitError> {
    if n < 3 {
        return Err(CircuitError::NoInterior { n });
    }
    Ok((1..n - 1).flat_map(|r| (1..n - 1).map(move |c| Pos(r * n + c + 1))).collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparatorLayout {
    pub n: usize,
    pub position_qubits: Vec<usize>,
    pub work_qubits: [usize; WORK_QUBITS],
    pub flag_qubits: Vec<usize>,
    pub capture_positions: Vec<Pos>,
    pub polarity: Polarity,
}

impl ComparatorLayout {
    pub fn new(n: usize, polarity: Polarity) -> Result<Self, CircuitError> {
        let capture_positions = capture_positions(n)?;
        let boxes = n * n;
        let work_qubits = std::array::from_fn(|i| boxes + i);
        let flag_start = boxes + WORK_QUBITS;
        Ok(Self {
            n,
            position_qubits: (0..boxes).collect(),
            work_qubits,
            flag_qubits: (flag_start..flag_start + capture_positions.len()).collect(),
            capture_positions,
            polarity,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.position_qubits.len() + WORK_QUBITS + self.flag_qubits.len()
    }

    /// Index of `pos` among the capture positions.
    pub fn slot(&self, pos: Pos) -> Result<usize, CircuitError> {
        self.capture_positions
            .iter()
            .position(|&p| p == pos)
            .ok_or(CircuitError::NotInterior { n: self.n, pos: pos.0 })
    }

    pub fn flag_qubit(&self, pos: Pos) -> Result<usize, CircuitError> {
        Ok(self.flag_qubits[self.slot(pos)?])
    }

    /// The 3x3 neighbourhood of `pos`: eight surrounding box qubits in
    /// row-major order, then the centre.
    pub fn neighborhood(&self, pos: Pos) -> Result<[usize; 9], CircuitError> {
        self.slot(pos)?;
        let (row, col) = ((pos.0 - 1) / self.n, (pos.0 - 1) % self.n);
        let mut qubits = [0; 9];
        let mut k = 0;
        for r in row - 1..=row + 1 {
            for c in col - 1..=col + 1 {
                if (r, c) != (row, col) {
                    qubits[k] = self.position_qubits[r * self.n + c];
                    k += 1;
                }
            }
        }
        qubits[8] = pos.qubit();
        Ok(qubits)
    }

    /// Pattern-layer controls that detect a capture of `color` at `pos`.
    pub fn pattern(&self, pos: Pos, color: Color) -> Result<[PatternControl; 9], CircuitError> {
        let (center, neighbor) = self.polarity.pattern(color);
        let qubits = self.neighborhood(pos)?;
        Ok(std::array::from_fn(|i| PatternControl {
            qubit: qubits[i],
            active_high: if i == 8 { center == 1 } else { neighbor == 1 },
        }))
    }

    /// Appends the comparator block for one position.
    fn append_block(&self, circuit: &mut Circuit, pos: Pos, color: Color) -> Result<(), CircuitError> {
        let controls = self.pattern(pos, color)?;
        let flag = self.flag_qubit(pos)?;
        let w = &self.work_qubits;

        let anti: Vec<Gate> = controls
            .iter()
            .filter(|c| !c.active_high)
            .map(|c| Gate::X { qubit: c.qubit })
            .collect();
        // w[0] = c0 & c1, w[k] = w[k-1] & c[k+1]
        let mut ladder = vec![Gate::Ccx {
            control0: controls[0].qubit,
            control1: controls[1].qubit,
            target: w[0],
        }];
        for k in 1..WORK_QUBITS {
            ladder.push(Gate::Ccx { control0: w[k - 1], control1: controls[k + 1].qubit, target: w[k] });
        }

        circuit.extend(anti.iter().copied())?;
        circuit.extend(ladder.iter().copied())?;
        circuit.push(Gate::Cx { control: w[WORK_QUBITS - 1], target: flag })?;
        circuit.extend(ladder.iter().rev().copied())?;
        circuit.extend(anti)?;
        Ok(())
    }
}

/// Comparator for a single interior position with the literal polarity.
pub fn build_capture_comparator(n: usize, pos: Pos, color: Color) -> Result<Circuit, CircuitError> {
    build_capture_comparator_with(n, pos, color, Polarity::Literal)
}

pub fn build_capture_comparator_with(
    n: usize,
    pos: Pos,
    color: Color,
    polarity: Polarity,
) -> Result<Circuit, CircuitError> {
    let layout = ComparatorLayout::new(n, polarity)?;
    let slot = layout.slot(pos)?;
    let mut circuit = Circuit::new(layout.num_qubits(), layout.flag_qubits.len());
    layout.append_block(&mut circuit, pos, color)?;
    circuit.push(Gate::Measure { qubit: layout.flag_qubits[slot], clbit: slot })?;
    Ok(circuit)
}

/// Comparator covering every interior position, one after another on the
/// shared work qubits.
pub fn build_board_comparator(n: usize, color: Color, polarity: Polarity) -> Result<Circuit, CircuitError> {
    let layout = ComparatorLayout::new(n, polarity)?;
    let mut circuit = Circuit::new(layout.num_qubits(), layout.flag_qubits.len());
    for &pos in &layout.capture_positions {
        layout.append_block(&mut circuit, pos, color)?;
    }
    for (slot, &flag) in layout.flag_qubits.iter().enumerate() {
        circuit.push(Gate::Measure { qubit: flag, clbit: slot })?;
    }
    Ok(circuit)
}
