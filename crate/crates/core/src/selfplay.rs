//! Seeded self-play statistics.

use std::fmt;
use std::str::FromStr;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::circuit::{build_game_circuit, CircuitError};
use crate::game::{GameError, GameState, Move, Winner};
use crate::record::GameRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Policy {
    /// Picks a move kind (classical, quantum, pass) uniformly among those
    /// available, then a uniform move of that kind.
    Random,
}

impl FromStr for Policy {
    type Err = SelfPlayError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" => Ok(Policy::Random),
            other => Err(SelfPlayError::UnknownPolicy(other.to_owned())),
        }
    }
}

#[derive(Debug, Error)]
pub enum SelfPlayError {
    #[error("unknown policy '{0}' (available: random)")]
    UnknownPolicy(String),
    #[error("at least one game is required")]
    NoGames,
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

impl Policy {
    pub fn choose(self, state: &GameState, rng: &mut impl Rng) -> Move {
        match self {
            Policy::Random => {
                let moves = state.legal_moves();
                let mut kinds: Vec<Vec<Move>> = vec![Vec::new(), Vec::new(), Vec::new()];
                for mv in moves {
                    let k = match mv {
                        Move::Classical { .. } => 0,
                        Move::Quantum { .. } => 1,
                        Move::Pass => 2,
                    };
                    kinds[k].push(mv);
                }
                kinds.retain(|k| !k.is_empty());
                let kind = kinds.choose(rng).expect("pass is always legal");
                *kind.choose(rng).expect("non-empty")
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct SelfPlayConfig {
    pub size: usize,
    pub games: usize,
    pub seed: u64,
    pub policy: Policy,
    /// After this many moves the policy only passes, so every game ends.
    pub max_moves: usize,
}

impl SelfPlayConfig {
    pub fn new(size: usize, games: usize, seed: u64) -> Self {
        Self { size, games, seed, policy: Policy::Random, max_moves: 8 * size * size }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelfPlayReport {
    pub size: usize,
    pub games: usize,
    pub black_wins: usize,
    pub white_wins: usize,
    pub draws: usize,
    pub mean_captures: f64,
    pub mean_length: f64,
    pub mean_gates: f64,
    pub collapses: u64,
    pub collapses_to_one: u64,
    pub collapse_frequency: f64,
}

impl fmt::Display for SelfPlayReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "games:              {} on {}x{}", self.games, self.size, self.size)?;
        writeln!(f, "black wins:         {}", self.black_wins)?;
        writeln!(f, "white wins:         {}", self.white_wins)?;
        writeln!(f, "draws:              {}", self.draws)?;
        writeln!(f, "mean captures:      {:.4}", self.mean_captures)?;
        writeln!(f, "mean game length:   {:.4}", self.mean_length)?;
        writeln!(f, "mean circuit gates: {:.4}", self.mean_gates)?;
        write!(
            f,
            "collapse |1> freq:  {:.4} ({} of {})",
            self.collapse_frequency, self.collapses_to_one, self.collapses
        )
    }
}

/// Plays one game to completion. Returns the final state.
pub fn play_game(
    size: usize,
    seed: u64,
    policy: Policy,
    max_moves: usize,
    rng: &mut impl Rng,
) -> Result<GameState, GameError> {
    let mut state = GameState::new(size, seed)?;
    while !state.is_over() {
        let mv = if state.move_log().len() >= max_moves {
            Move::Pass
        } else {
            policy.choose(&state, rng)
        };
        let player = state.to_move();
        state.play(player, mv)?;
    }
    Ok(state)
}

/// Seeds for each game and the policy stream, derived from the master seed.
pub fn game_seeds(seed: u64, games: usize) -> Vec<u64> {
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    (0..games).map(|_| master.random()).collect()
}

pub fn run_selfplay(config: &SelfPlayConfig) -> Result<SelfPlayReport, SelfPlayError> {
    if config.games == 0 {
        return Err(SelfPlayError::NoGames);
    }
    let mut policy_rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x005e_ed0f_9a3e);
    let (mut black_wins, mut white_wins, mut draws) = (0, 0, 0);
    let (mut captures, mut length, mut gates) = (0u64, 0u64, 0u64);
    let (mut collapses, mut ones) = (0u64, 0u64);
    for game_seed in game_seeds(config.seed, config.games) {
        let state =
            play_game(config.size, game_seed, config.policy, config.max_moves, &mut policy_rng)?;
        match state.winner()? {
            Winner::Black => black_wins += 1,
            Winner::White => white_wins += 1,
            Winner::Draw => draws += 1,
        }
        for out in state.move_log() {
            captures += out.captured.len() as u64;
            if let Some((_, bit)) = out.measured {
                collapses += 1;
                ones += u64::from(bit);
            }
        }
        length += state.move_log().len() as u64;
        gates += build_game_circuit(&GameRecord::from_state(&state, 0))?.len() as u64;
    }
    let n = config.games as f64;
    Ok(SelfPlayReport {
        size: config.size,
        games: config.games,
        black_wins,
        white_wins,
        draws,
        mean_captures: captures as f64 / n,
        mean_length: length as f64 / n,
        mean_gates: gates as f64 / n,
        collapses,
        collapses_to_one: ones,
        collapse_frequency: if collapses == 0 { 0.0 } else { ones as f64 / collapses as f64 },
    })
}
