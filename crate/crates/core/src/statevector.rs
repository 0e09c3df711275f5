//! Dense statevector simulation.
//!
//! A [`QuantumState`] holds all `2^m` complex amplitudes of an `m`-qubit
//! register. Qubit `q` is bit `q` of the amplitude index (qubit 0 is the
//! least-significant bit), so the basis state `|q2 q1 q0>` lives at index
//! `q0 + 2*q1 + 4*q2`.
//!
//! Measurement never draws its own randomness: the caller passes a uniform
//! draw in `[0, 1)` and the outcome is `1` iff `draw < P(q = 1)`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest register the dense backend will allocate.
pub const MAX_QUBITS: usize = 20;

/// Branch probabilities below this are treated as exactly zero.
const ZERO_BRANCH: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("register of {requested} qubits is outside the supported range 1..={max}")]
    Capacity { requested: usize, max: usize },
    #[error("qubit {qubit} is out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },
    #[error("gate uses qubit {0} more than once")]
    RepeatedQubit(usize),
    #[error("measurement draw {0} is not in [0, 1)")]
    InvalidDraw(f64),
}

/// One operation of the game's gate set.
///
/// `AntiCx` flips its target when the control is `|0>`. `Ccx` only appears in
/// the capture comparator, where it forms the work-qubit ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "snake_case")]
pub enum Gate {
    H { qubit: usize },
    X { qubit: usize },
    Cx { control: usize, target: usize },
    AntiCx { control: usize, target: usize },
    Ccx { control0: usize, control1: usize, target: usize },
    Reset { qubit: usize },
    Measure { qubit: usize, clbit: usize },
}

impl Gate {
    /// Qubits touched by the gate, controls first.
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H { qubit } | Gate::X { qubit } | Gate::Reset { qubit } => vec![qubit],
            Gate::Measure { qubit, .. } => vec![qubit],
            Gate::Cx { control, target } | Gate::AntiCx { control, target } => {
                vec![control, target]
            }
            Gate::Ccx { control0, control1, target } => vec![control0, control1, target],
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::H { .. } => "h",
            Gate::X { .. } => "x",
            Gate::Cx { .. } => "cx",
            Gate::AntiCx { .. } => "anticx",
            Gate::Ccx { .. } => "ccx",
            Gate::Reset { .. } => "reset",
            Gate::Measure { .. } => "measure",
        }
    }

    /// Checks index ranges and that multi-qubit gates use distinct qubits.
    pub fn validate(&self, num_qubits: usize) -> Result<(), StateError> {
        let qubits = self.qubits();
        for (i, &q) in qubits.iter().enumerate() {
            if q >= num_qubits {
                return Err(StateError::QubitOutOfRange { qubit: q, num_qubits });
            }
            if qubits[..i].contains(&q) {
                return Err(StateError::RepeatedQubit(q));
            }
        }
        Ok(())
    }
}

/// Dense amplitude vector over `num_qubits` qubits.
#[derive(Clone, PartialEq)]
pub struct QuantumState {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl fmt::Debug for QuantumState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuantumState")
            .field("num_qubits", &self.num_qubits)
            .field("norm_sqr", &self.norm_sqr())
            .finish()
    }
}

impl QuantumState {
    /// Allocates `|0...0>` on `num_qubits` qubits.
    pub fn new(num_qubits: usize) -> Result<Self, StateError> {
        Self::basis(num_qubits, 0)
    }

    /// Allocates the computational basis state with the given index.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self, StateError> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(StateError::Capacity { requested: num_qubits, max: MAX_QUBITS });
        }
        let len = 1usize << num_qubits;
        assert!(index < len, "basis index {index} out of range for {num_qubits} qubits");
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); len];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { num_qubits, amplitudes })
    }

    /// Builds a state from raw amplitudes, normalizing them.
    ///
    /// Panics if the length is not a supported power of two or the vector is zero.
    pub fn from_amplitudes(mut amplitudes: Vec<Complex64>) -> Self {
        let len = amplitudes.len();
        assert!(len.is_power_of_two() && len >= 2, "amplitude count must be 2^m, m >= 1");
        let num_qubits = len.trailing_zeros() as usize;
        assert!(num_qubits <= MAX_QUBITS);
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        assert!(norm > 0.0, "zero vector is not a state");
        for a in &mut amplitudes {
            *a /= norm;
        }
        Self { num_qubits, amplitudes }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check(&self, qubit: usize) -> Result<usize, StateError> {
        if qubit >= self.num_qubits {
            return Err(StateError::QubitOutOfRange { qubit, num_qubits: self.num_qubits });
        }
        Ok(1 << qubit)
    }

    fn check_pair(&self, a: usize, b: usize) -> Result<(usize, usize), StateError> {
        let ma = self.check(a)?;
        let mb = self.check(b)?;
        if a == b {
            return Err(StateError::RepeatedQubit(a));
        }
        Ok((ma, mb))
    }

    pub fn apply_h(&mut self, qubit: usize) -> Result<(), StateError> {
        let mask = self.check(qubit)?;
        let scale = Complex64::new(FRAC_1_SQRT_2, 0.0);
        for i in (0..self.amplitudes.len()).filter(|i| i & mask == 0) {
            let a = self.amplitudes[i];
            let b = self.amplitudes[i | mask];
            self.amplitudes[i] = (a + b) * scale;
            self.amplitudes[i | mask] = (a - b) * scale;
        }
        Ok(())
    }

    pub fn apply_x(&mut self, qubit: usize) -> Result<(), StateError> {
        let mask = self.check(qubit)?;
        for i in (0..self.amplitudes.len()).filter(|i| i & mask == 0) {
            self.amplitudes.swap(i, i | mask);
        }
        Ok(())
    }

    /// Flips `target` on every basis state where `control` is 1.
    pub fn apply_cx(&mut self, control: usize, target: usize) -> Result<(), StateError> {
        let (cmask, tmask) = self.check_pair(control, target)?;
        self.flip_where(tmask, cmask, cmask);
        Ok(())
    }

    /// Flips `target` on every basis state where `control` is 0.
    pub fn apply_anticx(&mut self, control: usize, target: usize) -> Result<(), StateError> {
        let (cmask, tmask) = self.check_pair(control, target)?;
        self.flip_where(tmask, cmask, 0);
        Ok(())
    }

    /// Toffoli: flips `target` where both controls are 1.
    pub fn apply_ccx(
        &mut self,
        control0: usize,
        control1: usize,
        target: usize,
    ) -> Result<(), StateError> {
        Gate::Ccx { control0, control1, target }.validate(self.num_qubits)?;
        let cmask = (1 << control0) | (1 << control1);
        self.flip_where(1 << target, cmask, cmask);
        Ok(())
    }

    /// Swaps the `tmask` pair on indices where `index & cmask == cvalue`.
    fn flip_where(&mut self, tmask: usize, cmask: usize, cvalue: usize) {
        for i in 0..self.amplitudes.len() {
            if i & tmask == 0 && i & cmask == cvalue {
                self.amplitudes.swap(i, i | tmask);
            }
        }
    }

    /// Probability that measuring `qubit` yields 1.
    pub fn prob_one(&self, qubit: usize) -> Result<f64, StateError> {
        let mask = self.check(qubit)?;
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Projective measurement of `qubit`. The outcome is 1 iff `draw < P(1)`.
    pub fn measure(&mut self, qubit: usize, draw: f64) -> Result<u8, StateError> {
        if !(0.0..1.0).contains(&draw) {
            return Err(StateError::InvalidDraw(draw));
        }
        let p1 = self.prob_one(qubit)?;
        let outcome = u8::from(draw < p1);
        self.project(qubit, outcome);
        Ok(outcome)
    }

    /// Projects onto `qubit == outcome` and renormalizes.
    ///
    /// Returns the probability the branch had before projection. Panics if
    /// that probability is zero.
    pub fn project(&mut self, qubit: usize, outcome: u8) -> f64 {
        let mask = 1usize << qubit;
        let keep = if outcome == 1 { mask } else { 0 };
        let mut weight = 0.0;
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            if i & mask == keep {
                weight += a.norm_sqr();
            } else {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        assert!(weight > 0.0, "projection onto a zero-probability branch");
        let scale = 1.0 / weight.sqrt();
        for a in &mut self.amplitudes {
            *a *= scale;
        }
        weight
    }

    /// Forces `qubit` to `|0>`.
    ///
    /// Projects onto the `q = 0` branch when it has support; otherwise the
    /// qubit is certainly 1 and is flipped back to 0.
    pub fn apply_reset(&mut self, qubit: usize) -> Result<(), StateError> {
        let p1 = self.prob_one(qubit)?;
        if 1.0 - p1 > ZERO_BRANCH {
            self.project(qubit, 0);
        } else {
            self.project(qubit, 1);
            self.apply_x(qubit)?;
        }
        Ok(())
    }

    /// Applies a unitary or reset gate. Measurements need a draw: use
    /// [`QuantumState::measure`] or [`QuantumState::apply_with_draw`].
    pub fn apply(&mut self, gate: &Gate) -> Result<(), StateError> {
        match *gate {
            Gate::H { qubit } => self.apply_h(qubit),
            Gate::X { qubit } => self.apply_x(qubit),
            Gate::Cx { control, target } => self.apply_cx(control, target),
            Gate::AntiCx { control, target } => self.apply_anticx(control, target),
            Gate::Ccx { control0, control1, target } => self.apply_ccx(control0, control1, target),
            Gate::Reset { qubit } => self.apply_reset(qubit),
            Gate::Measure { qubit, .. } => self.measure(qubit, 0.0).map(|_| ()),
        }
    }

    /// Applies any gate; `draw` is consumed only by `Measure`, whose outcome is returned.
    pub fn apply_with_draw(&mut self, gate: &Gate, draw: f64) -> Result<Option<u8>, StateError> {
        match *gate {
            Gate::Measure { qubit, .. } => self.measure(qubit, draw).map(Some),
            _ => self.apply(gate).map(|()| None),
        }
    }

    /// If every amplitude but one is zero, returns that basis index.
    pub fn as_basis_state(&self) -> Option<usize> {
        let mut found = None;
        for (i, a) in self.amplitudes.iter().enumerate() {
            if a.norm_sqr() > ZERO_BRANCH {
                if found.is_some() {
                    return None;
                }
                found = Some(i);
            }
        }
        found
    }

    /// Largest per-amplitude distance to another state of the same size.
    pub fn max_distance(&self, other: &QuantumState) -> f64 {
        assert_eq!(self.num_qubits, other.num_qubits);
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}
