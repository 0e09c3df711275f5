//! Exact outcome enumeration over the rules engine.
//!
//! Every classical move splits a game into two equally likely branches. For a
//! fixed move script this yields the exact distribution over final boards,
//! which the dense circuit simulation must reproduce.

use std::collections::BTreeMap;

use crate::game::{GameError, GameState, Move};
use crate::record::GameRecord;

#[derive(Debug, Clone)]
pub struct Branch {
    pub probability: f64,
    pub state: GameState,
}

impl Branch {
    pub fn record(&self) -> GameRecord {
        GameRecord::from_state(&self.state, 0)
    }
}

/// Plays `script` from `start` (players alternate from `start.to_move()`),
/// forking on every classical move. Fails if a move is illegal in any branch.
pub fn enumerate_branches(start: &GameState, script: &[Move]) -> Result<Vec<Branch>, GameError> {
    let mut branches = vec![Branch { probability: 1.0, state: start.clone() }];
    for &mv in script {
        let mut next = Vec::with_capacity(branches.len() * 2);
        for branch in branches {
            let player = branch.state.to_move();
            match mv {
                Move::Classical { .. } => {
                    for bit in [0, 1] {
                        let mut state = branch.state.clone();
                        state.play_with_outcome(player, mv, Some(bit))?;
                        next.push(Branch { probability: branch.probability / 2.0, state });
                    }
                }
                _ => {
                    let mut state = branch.state;
                    state.play(player, mv)?;
                    next.push(Branch { probability: branch.probability, state });
                }
            }
        }
        branches = next;
    }
    Ok(branches)
}

/// Probability of each final board, keyed by [`GameState::marks`].
pub fn marks_distribution(branches: &[Branch]) -> BTreeMap<String, f64> {
    let mut dist = BTreeMap::new();
    for b in branches {
        *dist.entry(b.state.marks()).or_insert(0.0) += b.probability;
    }
    dist
}

/// All move scripts of length `1..=max_len` from a fresh `n x n` board that
/// are legal in every branch, in a fixed depth-first order.
pub fn enumerate_scripts(n: usize, max_len: usize) -> Result<Vec<Vec<Move>>, GameError> {
    let start = GameState::new(n, 0)?;
    let mut scripts = Vec::new();
    let mut prefix = Vec::new();
    extend_scripts(&[Branch { probability: 1.0, state: start }], &mut prefix, max_len, &mut scripts);
    Ok(scripts)
}

fn extend_scripts(
    branches: &[Branch],
    prefix: &mut Vec<Move>,
    max_len: usize,
    out: &mut Vec<Vec<Move>>,
) {
    if prefix.len() == max_len {
        return;
    }
    for mv in branches[0].state.legal_moves() {
        let mut next = Vec::new();
        let mut legal = true;
        for b in branches {
            match enumerate_branches(&b.state, &[mv]) {
                Ok(children) => next.extend(children.into_iter().map(|c| Branch {
                    probability: c.probability * b.probability,
                    state: c.state,
                })),
                Err(_) => {
                    legal = false;
                    break;
                }
            }
        }
        if !legal {
            continue;
        }
        prefix.push(mv);
        out.push(prefix.clone());
        if next.iter().all(|b| !b.state.is_over()) {
            extend_scripts(&next, prefix, max_len, out);
        }
        prefix.pop();
    }
}
