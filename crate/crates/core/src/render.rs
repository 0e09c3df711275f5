//! Plain-text board rendering.

use std::fmt::Write;

use crate::game::{EntangleGate, GameState};

/// Renders the board with column numbers on top and the first box number of
/// each row on the left. Superposed boxes are `.`, stones are `B` / `W`.
pub fn render_board(state: &GameState) -> String {
    let n = state.size();
    let width = (n * n).to_string().len();
    let mut out = String::new();
    write!(out, "{:width$} ", "").unwrap();
    for col in 1..=n {
        write!(out, " {col:>width$}").unwrap();
    }
    out.push('\n');
    for row in 0..n {
        write!(out, "{:>width$} ", row * n + 1).unwrap();
        for b in &state.boxes()[row * n..(row + 1) * n] {
            write!(out, " {:>width$}", b.symbol()).unwrap();
        }
        out.push('\n');
    }
    out
}

/// Board plus capture tallies, pending entanglements and whose turn it is.
pub fn render_status(state: &GameState) -> String {
    use crate::game::Color::{Black, White};
    let mut out = render_board(state);
    writeln!(
        out,
        "captured: black {} white {} | pass bonus: black {} white {}",
        state.captured(Black),
        state.captured(White),
        state.pass_bonus(Black),
        state.pass_bonus(White),
    )
    .unwrap();
    for e in state.ledger() {
        let gate = match e.gate {
            EntangleGate::Cnot => "cnot",
            EntangleGate::AntiCnot => "anti-cnot",
        };
        writeln!(out, "entangled: control {} -> target {} ({gate})", e.control, e.target).unwrap();
    }
    if state.is_over() {
        let score = state.score();
        let winner = state.winner().expect("game is over");
        writeln!(out, "game over: black {} white {} | winner: {winner}", score.black, score.white)
            .unwrap();
    } else {
        writeln!(out, "to move: {}", state.to_move()).unwrap();
    }
    out
}
