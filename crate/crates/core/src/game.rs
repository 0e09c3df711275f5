//! Quantum Go rules.
//!
//! Every box on the `n x n` board starts superposed. A classical move
//! measures a box, which becomes a Black stone (`|1>`) or a White stone
//! (`|0>`) with equal odds. A quantum move records a pending entanglement
//! between a superposed control and a collapsed target; when the control is
//! later measured, a Black-made (CNOT) entry flips the target iff the control
//! collapsed Black, and a White-made (anti-CNOT) entry flips it iff the
//! control collapsed White.
//!
//! Only single stones are captured: a stone whose orthogonal neighbours are
//! all stones of the other colour is removed, and its box reverts to
//! superposition.

use std::collections::VecDeque;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MIN_SIZE: usize = 2;
pub const MAX_SIZE: usize = 19;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Black,
    White,
}

impl Color {
    pub fn opponent(self) -> Color {
        match self {
            Color::Black => Color::White,
            Color::White => Color::Black,
        }
    }

    /// Measurement outcome that marks a box with this colour.
    pub fn bit(self) -> u8 {
        match self {
            Color::Black => 1,
            Color::White => 0,
        }
    }

    pub fn from_bit(bit: u8) -> Color {
        if bit == 1 {
            Color::Black
        } else {
            Color::White
        }
    }

    pub fn mark(self) -> char {
        match self {
            Color::Black => 'B',
            Color::White => 'W',
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Color::Black => "Black",
            Color::White => "White",
        })
    }
}

/// Box number, 1-based and row-major (box 1 is the top-left corner).
/// Box `p` is simulated by qubit `p - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Pos(pub usize);

impl Pos {
    pub fn qubit(self) -> usize {
        self.0 - 1
    }

    pub fn from_qubit(qubit: usize) -> Pos {
        Pos(qubit + 1)
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoxState {
    Superposed,
    Collapsed(Color),
}

impl BoxState {
    pub fn symbol(self) -> char {
        match self {
            BoxState::Superposed => '.',
            BoxState::Collapsed(c) => c.mark(),
        }
    }

    pub fn stone(self) -> Option<Color> {
        match self {
            BoxState::Superposed => None,
            BoxState::Collapsed(c) => Some(c),
        }
    }
}

/// Conditional flip recorded by a quantum move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntangleGate {
    /// Black's gate: flips the target when the control collapses to `|1>`.
    Cnot,
    /// White's gate: flips the target when the control collapses to `|0>`.
    AntiCnot,
}

impl EntangleGate {
    pub fn for_player(player: Color) -> Self {
        match player {
            Color::Black => EntangleGate::Cnot,
            Color::White => EntangleGate::AntiCnot,
        }
    }

    pub fn fires_on(self, control_bit: u8) -> bool {
        match self {
            EntangleGate::Cnot => control_bit == 1,
            EntangleGate::AntiCnot => control_bit == 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PendingEntanglement {
    pub control: Pos,
    pub target: Pos,
    pub gate: EntangleGate,
    /// Ordinal (0-based) of the quantum move that created the entry.
    pub move_index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Move {
    Classical { pos: Pos },
    Quantum { control: Pos, target: Pos },
    Pass,
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::Classical { pos } => write!(f, "c {pos}"),
            Move::Quantum { control, target } => write!(f, "q {control} {target}"),
            Move::Pass => f.write_str("p"),
        }
    }
}

/// Effect of one accepted move.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveOutcome {
    pub ordinal: usize,
    pub player: Color,
    #[serde(rename = "move")]
    pub mv: Move,
    /// Measured box and bit, for classical moves.
    pub measured: Option<(Pos, u8)>,
    /// Entanglement entries consumed by the measurement, in resolution order.
    pub resolved: Vec<PendingEntanglement>,
    /// Targets whose mark changed, with the new mark.
    pub flipped: Vec<(Pos, Color)>,
    /// Stones removed by the capture sweep, with their colour.
    pub captured: Vec<(Pos, Color)>,
    pub game_over: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("board size {0} is outside {MIN_SIZE}..={MAX_SIZE}")]
    InvalidSize(usize),
    #[error("box {0} is not on the board")]
    OffBoard(usize),
    #[error("it is {expected}'s turn")]
    NotYourTurn { expected: Color },
    #[error("box {0} has already collapsed")]
    AlreadyCollapsed(Pos),
    #[error("control box {0} must still be superposed")]
    IllegalControl(Pos),
    #[error("target box {0} must already be collapsed")]
    IllegalTarget(Pos),
    #[error("control and target must be different boxes")]
    SameBox,
    #[error("boxes {0} and {1} are already entangled")]
    DuplicateEntanglement(Pos, Pos),
    #[error("recorded outcome {0} is not a bit")]
    InvalidOutcome(u8),
    #[error("the game is over")]
    GameOver,
    #[error("the game is not over yet")]
    GameNotOver,
}

impl GameError {
    /// Stable machine-readable reason code.
    pub fn code(&self) -> &'static str {
        match self {
            GameError::InvalidSize(_) => "invalid_size",
            GameError::OffBoard(_) => "off_board",
            GameError::NotYourTurn { .. } => "not_your_turn",
            GameError::AlreadyCollapsed(_) => "already_collapsed",
            GameError::IllegalControl(_) => "illegal_control",
            GameError::IllegalTarget(_) => "illegal_target",
            GameError::SameBox => "same_box",
            GameError::DuplicateEntanglement(..) => "duplicate_entanglement",
            GameError::InvalidOutcome(_) => "invalid_outcome",
            GameError::GameOver => "game_over",
            GameError::GameNotOver => "game_not_over",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Score {
    pub black: u32,
    pub white: u32,
    pub black_territory: u32,
    pub white_territory: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Winner {
    Black,
    White,
    Draw,
}

impl Winner {
    pub fn from_points(black: u32, white: u32) -> Self {
        match black.cmp(&white) {
            std::cmp::Ordering::Greater => Winner::Black,
            std::cmp::Ordering::Less => Winner::White,
            std::cmp::Ordering::Equal => Winner::Draw,
        }
    }
}

impl fmt::Display for Winner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Winner::Black => "Black",
            Winner::White => "White",
            Winner::Draw => "Draw",
        })
    }
}

/// Full state of one game.
#[derive(Debug, Clone, PartialEq)]
pub struct GameState {
    size: usize,
    boxes: Vec<BoxState>,
    ledger: Vec<PendingEntanglement>,
    /// Black stones removed from the board; these count for White.
    captured_black: u32,
    /// White stones removed from the board; these count for Black.
    captured_white: u32,
    pass_bonus_black: u32,
    pass_bonus_white: u32,
    to_move: Color,
    consecutive_passes: u32,
    game_over: bool,
    collapse_events: u32,
    move_log: Vec<MoveOutcome>,
    seed: u64,
    rng: ChaCha8Rng,
    draws: u64,
}

impl GameState {
    pub fn new(size: usize, seed: u64) -> Result<Self, GameError> {
        if !(MIN_SIZE..=MAX_SIZE).contains(&size) {
            return Err(GameError::InvalidSize(size));
        }
        Ok(Self {
            size,
            boxes: vec![BoxState::Superposed; size * size],
            ledger: Vec::new(),
            captured_black: 0,
            captured_white: 0,
            pass_bonus_black: 0,
            pass_bonus_white: 0,
            to_move: Color::Black,
            consecutive_passes: 0,
            game_over: false,
            collapse_events: 0,
            move_log: Vec::new(),
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
            draws: 0,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn num_boxes(&self) -> usize {
        self.boxes.len()
    }

    pub fn positions(&self) -> impl Iterator<Item = Pos> {
        (1..=self.boxes.len()).map(Pos)
    }

    pub fn boxes(&self) -> &[BoxState] {
        &self.boxes
    }

    pub fn get(&self, pos: Pos) -> Result<BoxState, GameError> {
        self.check(pos).map(|i| self.boxes[i])
    }

    pub fn ledger(&self) -> &[PendingEntanglement] {
        &self.ledger
    }

    pub fn to_move(&self) -> Color {
        self.to_move
    }

    pub fn is_over(&self) -> bool {
        self.game_over
    }

    pub fn consecutive_passes(&self) -> u32 {
        self.consecutive_passes
    }

    pub fn move_log(&self) -> &[MoveOutcome] {
        &self.move_log
    }

    pub fn draws_consumed(&self) -> u64 {
        self.draws
    }

    /// Number of stones of `color` that have been captured.
    pub fn captured(&self, color: Color) -> u32 {
        match color {
            Color::Black => self.captured_black,
            Color::White => self.captured_white,
        }
    }

    /// Bonus stones `color` has received from opponent passes.
    pub fn pass_bonus(&self, color: Color) -> u32 {
        match color {
            Color::Black => self.pass_bonus_black,
            Color::White => self.pass_bonus_white,
        }
    }

    /// Classical moves executed so far.
    pub fn collapse_events(&self) -> u32 {
        self.collapse_events
    }

    pub fn collapsed_count(&self) -> usize {
        self.boxes.iter().filter(|b| b.stone().is_some()).count()
    }

    /// Board marks as a string of `.`, `B` and `W`, row-major.
    pub fn marks(&self) -> String {
        self.boxes.iter().map(|b| b.symbol()).collect()
    }

    fn check(&self, pos: Pos) -> Result<usize, GameError> {
        if pos.0 == 0 || pos.0 > self.boxes.len() {
            return Err(GameError::OffBoard(pos.0));
        }
        Ok(pos.0 - 1)
    }

    /// Orthogonal neighbours of `pos`.
    pub fn neighbors(&self, pos: Pos) -> Result<Vec<Pos>, GameError> {
        let i = self.check(pos)?;
        Ok(orthogonal_neighbors(self.size, i).map(|j| Pos(j + 1)).collect())
    }

    /// Number of superposed (empty) orthogonal neighbours.
    pub fn liberties(&self, pos: Pos) -> Result<usize, GameError> {
        let i = self.check(pos)?;
        Ok(orthogonal_neighbors(self.size, i)
            .filter(|&j| self.boxes[j] == BoxState::Superposed)
            .count())
    }

    fn is_surrounded(&self, i: usize) -> bool {
        let Some(color) = self.boxes[i].stone() else {
            return false;
        };
        let enemy = BoxState::Collapsed(color.opponent());
        orthogonal_neighbors(self.size, i).all(|j| self.boxes[j] == enemy)
    }

    /// Checks a move against the current position without applying it.
    pub fn validate(&self, player: Color, mv: Move) -> Result<(), GameError> {
        if self.game_over {
            return Err(GameError::GameOver);
        }
        if player != self.to_move {
            return Err(GameError::NotYourTurn { expected: self.to_move });
        }
        match mv {
            Move::Classical { pos } => {
                let i = self.check(pos)?;
                if self.boxes[i] != BoxState::Superposed {
                    return Err(GameError::AlreadyCollapsed(pos));
                }
            }
            Move::Quantum { control, target } => {
                let c = self.check(control)?;
                let t = self.check(target)?;
                if c == t {
                    return Err(GameError::SameBox);
                }
                if self.boxes[c] != BoxState::Superposed {
                    return Err(GameError::IllegalControl(control));
                }
                if self.boxes[t] == BoxState::Superposed {
                    return Err(GameError::IllegalTarget(target));
                }
                if self.ledger.iter().any(|e| e.control == control && e.target == target) {
                    return Err(GameError::DuplicateEntanglement(control, target));
                }
            }
            Move::Pass => {}
        }
        Ok(())
    }

    /// Plays a move, drawing classical outcomes from the game's seeded stream.
    pub fn play(&mut self, player: Color, mv: Move) -> Result<MoveOutcome, GameError> {
        self.play_with_outcome(player, mv, None)
    }

    /// Plays a move; a classical move uses `outcome` instead of the drawn bit
    /// when one is given. A draw is consumed either way so the stream stays
    /// aligned with an unforced game.
    pub fn play_with_outcome(
        &mut self,
        player: Color,
        mv: Move,
        outcome: Option<u8>,
    ) -> Result<MoveOutcome, GameError> {
        self.validate(player, mv)?;
        if let Some(bit) = outcome {
            if bit > 1 {
                return Err(GameError::InvalidOutcome(bit));
            }
        }
        let ordinal = self.move_log.len();
        let mut result = MoveOutcome {
            ordinal,
            player,
            mv,
            measured: None,
            resolved: Vec::new(),
            flipped: Vec::new(),
            captured: Vec::new(),
            game_over: false,
        };
        match mv {
            Move::Classical { pos } => {
                let draw: f64 = self.rng.random();
                self.draws += 1;
                let bit = outcome.unwrap_or(u8::from(draw < 0.5));
                self.collapse(pos, bit, &mut result);
                result.captured = self.remove_captured(player);
                self.consecutive_passes = 0;
            }
            Move::Quantum { control, target } => {
                self.ledger.push(PendingEntanglement {
                    control,
                    target,
                    gate: EntangleGate::for_player(player),
                    move_index: ordinal,
                });
                self.consecutive_passes = 0;
            }
            Move::Pass => {
                match player {
                    Color::Black => self.pass_bonus_white += 1,
                    Color::White => self.pass_bonus_black += 1,
                }
                self.consecutive_passes += 1;
                // Both players must have passed in a row and White passes last.
                if self.consecutive_passes >= 2 && player == Color::White {
                    self.game_over = true;
                }
            }
        }
        self.to_move = player.opponent();
        result.game_over = self.game_over;
        self.move_log.push(result.clone());
        Ok(result)
    }

    fn collapse(&mut self, pos: Pos, bit: u8, result: &mut MoveOutcome) {
        let i = pos.0 - 1;
        self.boxes[i] = BoxState::Collapsed(Color::from_bit(bit));
        self.collapse_events += 1;
        result.measured = Some((pos, bit));

        let (resolved, pending): (Vec<_>, Vec<_>) =
            self.ledger.drain(..).partition(|e| e.control == pos);
        self.ledger = pending;
        for entry in resolved {
            if entry.gate.fires_on(bit) {
                let t = entry.target.0 - 1;
                if let BoxState::Collapsed(c) = self.boxes[t] {
                    let flipped = c.opponent();
                    self.boxes[t] = BoxState::Collapsed(flipped);
                    result.flipped.push((entry.target, flipped));
                }
            }
            result.resolved.push(entry);
        }
    }

    /// Removes every stone with no liberties whose neighbours are all
    /// opposing stones. The mover's opponent is swept first, then the mover.
    fn remove_captured(&mut self, mover: Color) -> Vec<(Pos, Color)> {
        let mut captured = Vec::new();
        for color in [mover.opponent(), mover] {
            let doomed: Vec<usize> = (0..self.boxes.len())
                .filter(|&i| self.boxes[i] == BoxState::Collapsed(color) && self.is_surrounded(i))
                .collect();
            for i in doomed {
                self.boxes[i] = BoxState::Superposed;
                match color {
                    Color::Black => self.captured_black += 1,
                    Color::White => self.captured_white += 1,
                }
                captured.push((Pos(i + 1), color));
            }
        }
        if !captured.is_empty() {
            // A freed box is no longer a valid target.
            let boxes = &self.boxes;
            self.ledger.retain(|e| boxes[e.target.0 - 1] != BoxState::Superposed);
        }
        captured
    }

    /// Every move the player to move could make right now.
    pub fn legal_moves(&self) -> Vec<Move> {
        if self.game_over {
            return Vec::new();
        }
        let mut moves = Vec::new();
        let superposed: Vec<Pos> =
            self.positions().filter(|&p| self.boxes[p.0 - 1] == BoxState::Superposed).collect();
        let collapsed: Vec<Pos> =
            self.positions().filter(|&p| self.boxes[p.0 - 1] != BoxState::Superposed).collect();
        moves.extend(superposed.iter().map(|&pos| Move::Classical { pos }));
        for &control in &superposed {
            for &target in &collapsed {
                if !self.ledger.iter().any(|e| e.control == control && e.target == target) {
                    moves.push(Move::Quantum { control, target });
                }
            }
        }
        moves.push(Move::Pass);
        moves
    }

    /// Territory plus captured stones plus pass bonuses for each colour.
    pub fn score(&self) -> Score {
        let (black_territory, white_territory) = self.territory();
        Score {
            black: black_territory + self.captured_white + self.pass_bonus_black,
            white: white_territory + self.captured_black + self.pass_bonus_white,
            black_territory,
            white_territory,
        }
    }

    /// Sizes of the superposed regions bordered only by Black and only by White.
    fn territory(&self) -> (u32, u32) {
        let mut seen = vec![false; self.boxes.len()];
        let (mut black, mut white) = (0, 0);
        for start in 0..self.boxes.len() {
            if seen[start] || self.boxes[start] != BoxState::Superposed {
                continue;
            }
            let mut region = 0u32;
            let (mut touches_black, mut touches_white) = (false, false);
            let mut queue = VecDeque::from([start]);
            seen[start] = true;
            while let Some(i) = queue.pop_front() {
                region += 1;
                for j in orthogonal_neighbors(self.size, i) {
                    match self.boxes[j] {
                        BoxState::Superposed if !seen[j] => {
                            seen[j] = true;
                            queue.push_back(j);
                        }
                        BoxState::Superposed => {}
                        BoxState::Collapsed(Color::Black) => touches_black = true,
                        BoxState::Collapsed(Color::White) => touches_white = true,
                    }
                }
            }
            match (touches_black, touches_white) {
                (true, false) => black += region,
                (false, true) => white += region,
                _ => {}
            }
        }
        (black, white)
    }

    pub fn winner(&self) -> Result<Winner, GameError> {
        if !self.game_over {
            return Err(GameError::GameNotOver);
        }
        let score = self.score();
        Ok(Winner::from_points(score.black, score.white))
    }
}

fn orthogonal_neighbors(size: usize, i: usize) -> impl Iterator<Item = usize> {
    let (row, col) = (i / size, i % size);
    let up = (row > 0).then(|| i - size);
    let down = (row + 1 < size).then(|| i + size);
    let left = (col > 0).then(|| i - 1);
    let right = (col + 1 < size).then(|| i + 1);
    [up, left, right, down].into_iter().flatten()
}
