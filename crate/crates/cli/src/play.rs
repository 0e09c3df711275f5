//! Hot-seat console play.

use std::io::{self, BufRead, Write};

use qgo_core::render::render_status;
use qgo_core::{GameState, Move, MoveOutcome, Pos};

/// Parses `c <pos>`, `q <control> <target>` or `p`.
pub fn parse_move(line: &str) -> Result<Move, String> {
    let words: Vec<&str> = line.split_whitespace().collect();
    let num = |w: &str| w.parse::<usize>().map(Pos).map_err(|_| format!("'{w}' is not a box number"));
    match words.as_slice() {
        ["c", pos] => Ok(Move::Classical { pos: num(pos)? }),
        ["q", control, target] => Ok(Move::Quantum { control: num(control)?, target: num(target)? }),
        ["p"] => Ok(Move::Pass),
        [] => Err("empty input".into()),
        _ => Err(format!("cannot parse '{}'; expected c <pos>, q <control> <target> or p", line.trim())),
    }
}

fn describe(out: &MoveOutcome) -> String {
    let mut text = format!("{} plays {}", out.player, out.mv);
    if let Some((pos, bit)) = out.measured {
        text += &format!("\nbox {pos} collapsed to |{bit}>");
    }
    for (pos, color) in &out.flipped {
        text += &format!("\nbox {pos} flipped to {}", color.mark());
    }
    for (pos, color) in &out.captured {
        text += &format!("\ncaptured {color} stone at box {pos}");
    }
    text
}

/// Runs the prompt loop until the game ends or input runs out. Returns the
/// state reached either way.
pub fn run_play<R: BufRead, W: Write>(mut state: GameState, input: R, out: &mut W) -> io::Result<GameState> {
    let mut lines = input.lines();
    write!(out, "{}", render_status(&state))?;
    while !state.is_over() {
        write!(out, "{} (c <pos> | q <control> <target> | p)> ", state.to_move())?;
        out.flush()?;
        let Some(line) = lines.next().transpose()? else {
            writeln!(out, "\ninput closed, game abandoned")?;
            return Ok(state);
        };
        let result = parse_move(&line).and_then(|mv| state.play(state.to_move(), mv).map_err(|e| e.to_string()));
        match result {
            Ok(outcome) => {
                writeln!(out, "{}", describe(&outcome))?;
                write!(out, "{}", render_status(&state))?;
            }
            Err(reason) => writeln!(out, "error: {reason}")?,
        }
    }
    Ok(state)
}
