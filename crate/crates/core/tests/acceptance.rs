//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any failed.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use qgo_core::branches::{enumerate_branches, enumerate_scripts, marks_distribution};
use qgo_core::circuit::{read_board, recorded_outcomes};
use qgo_core::comparator::{build_capture_comparator_with, Polarity};
use qgo_core::selfplay::{game_seeds, play_game, Policy};
use qgo_core::{
    build_game_circuit, capture_positions, capture_qubit_count, to_qasm, BoxState, Color,
    GameRecord, GameState, Gate, Move, Pos, QuantumState, Winner,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Criterion = (&'static str, fn() -> Result<String, String>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:?}, limit {limit:?}"))
}

// ---------------------------------------------------------------------------

const COLLAPSE_MOVES: u32 = 10_000;
const COLLAPSE_BAND: (f64, f64) = (0.48, 0.52);

fn collapse_probability() -> Result<String, String> {
    let start = Instant::now();
    let mut ones = 0u32;
    let mut moves = 0u32;
    let mut game = 0u64;
    while moves < COLLAPSE_MOVES {
        let mut g = GameState::new(4, 0xC0FFEE + game).map_err(|e| e.to_string())?;
        game += 1;
        for p in 1..=16 {
            if moves == COLLAPSE_MOVES {
                break;
            }
            let pos = Pos(p);
            if g.get(pos).unwrap() != BoxState::Superposed {
                continue;
            }
            let out = g.play(g.to_move(), Move::Classical { pos }).map_err(|e| e.to_string())?;
            ones += u32::from(out.measured.unwrap().1);
            moves += 1;
        }
    }
    let freq = f64::from(ones) / f64::from(moves);
    ensure(freq >= COLLAPSE_BAND.0 && freq <= COLLAPSE_BAND.1, || format!("frequency {freq}"))?;
    within(start.elapsed(), Duration::from_secs(5))?;
    Ok(format!("{ones}/{moves} = {freq:.4} in {:?}", start.elapsed()))
}

fn qubit_count_formula() -> Result<String, String> {
    let c3 = capture_qubit_count(3).map_err(|e| e.to_string())?;
    let c4 = capture_qubit_count(4).map_err(|e| e.to_string())?;
    ensure(c3 == 18, || format!("n=3 gave {c3}"))?;
    ensure(c4 == 28, || format!("n=4 gave {c4}"))?;
    let positions: Vec<usize> = capture_positions(4).unwrap().iter().map(|p| p.0).collect();
    ensure(positions == [6, 7, 10, 11], || format!("positions {positions:?}"))?;
    Ok("18 / 28, positions {6,7,10,11}".into())
}

/// Capture pattern written out per convention, independent of the builder.
fn expected_flag(input: usize, color: Color, polarity: Polarity) -> bool {
    let center_bit = (input >> 4) & 1;
    let neighbors = [0, 1, 2, 3, 5, 6, 7, 8].map(|q| (input >> q) & 1);
    let center_wanted = match (polarity, color) {
        (Polarity::Literal, Color::Black) => 0,
        (Polarity::Literal, Color::White) => 1,
        (Polarity::Marking, Color::Black) => 1,
        (Polarity::Marking, Color::White) => 0,
    };
    center_bit == center_wanted && neighbors.iter().all(|&b| b == 1 - center_wanted)
}

fn comparator_brute_force() -> Result<String, String> {
    let start = Instant::now();
    let mut checked = 0;
    for polarity in [Polarity::Literal, Polarity::Marking] {
        for color in [Color::Black, Color::White] {
            let circuit = build_capture_comparator_with(3, Pos(5), color, polarity)
                .map_err(|e| e.to_string())?;
            ensure(circuit.num_qubits() == 18, || "expected 18 qubits".into())?;
            let mut hits = 0;
            for input in 0..512usize {
                let mut state = QuantumState::basis(18, input).map_err(|e| e.to_string())?;
                let clbits = circuit.run(&mut state, || 0.5).map_err(|e| e.to_string())?;
                let flag = expected_flag(input, color, polarity);
                hits += usize::from(flag);
                let expected = input | (usize::from(flag) << 17);
                let got = state.as_basis_state();
                ensure(got == Some(expected), || {
                    format!("{polarity:?}/{color}: input {input:09b} -> {got:?}, expected {expected}")
                })?;
                ensure(clbits == [u8::from(flag)], || format!("flag readout for {input}"))?;
                checked += 1;
            }
            ensure(hits == 1, || format!("{hits} capture patterns, expected exactly 1"))?;
        }
    }
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!("{checked} basis inputs in {:?}", start.elapsed()))
}

/// Every script on 2x2 up to length 4; on 3x3, every script up to length 2
/// plus a fixed stride through the length-3 and length-4 scripts.
fn equivalence_scripts() -> Vec<(usize, Vec<Move>)> {
    let mut scripts: Vec<(usize, Vec<Move>)> =
        enumerate_scripts(2, 4).unwrap().into_iter().map(|s| (2, s)).collect();
    let three = enumerate_scripts(3, 4).unwrap();
    let (short, long): (Vec<_>, Vec<_>) = three.into_iter().partition(|s| s.len() <= 2);
    scripts.extend(short.into_iter().map(|s| (3, s)));
    let stride = (long.len() / 600).max(1);
    scripts.extend(long.into_iter().step_by(stride).map(|s| (3, s)));
    scripts
}

const EQUIVALENCE_TOL: f64 = 1e-9;

fn backend_equivalence() -> Result<String, String> {
    let scripts = equivalence_scripts();
    ensure(scripts.len() >= 200, || format!("only {} scripts", scripts.len()))?;
    let mut worst = 0.0f64;
    let mut branches_checked = 0;
    for (n, script) in &scripts {
        let start = GameState::new(*n, 0).unwrap();
        let branches = enumerate_branches(&start, script).map_err(|e| e.to_string())?;
        let rules = marks_distribution(&branches);

        let mut dense: BTreeMap<String, f64> = BTreeMap::new();
        for b in &branches {
            let record = b.record();
            let circuit = build_game_circuit(&record).map_err(|e| e.to_string())?;
            let (state, p) = circuit
                .simulate_postselected(&recorded_outcomes(&record))
                .map_err(|e| format!("{script:?}: {e}"))?;
            let marks: String =
                read_board(&state, n * n).unwrap().iter().map(|b| b.symbol()).collect();
            *dense.entry(marks).or_insert(0.0) += p;
            branches_checked += 1;
        }

        let keys: BTreeSet<&String> = rules.keys().chain(dense.keys()).collect();
        for k in keys {
            let diff = (rules.get(k).unwrap_or(&0.0) - dense.get(k).unwrap_or(&0.0)).abs();
            worst = worst.max(diff);
            ensure(diff < EQUIVALENCE_TOL, || {
                format!("{n}x{n} {script:?}: board {k} differs by {diff}")
            })?;
        }
    }
    Ok(format!("{} scripts, {branches_checked} branches, max diff {worst:.1e}", scripts.len()))
}

fn worked_example() -> Result<String, String> {
    for (control_bit, mark) in [(0u8, Color::White), (1, Color::Black)] {
        let mut g = GameState::new(4, 0).unwrap();
        g.play_with_outcome(Color::Black, Move::Classical { pos: Pos(4) }, Some(1))
            .map_err(|e| e.to_string())?;
        ensure(g.get(Pos(4)).unwrap() == BoxState::Collapsed(Color::Black), || "box 4 not B".into())?;
        g.play(Color::White, Move::Quantum { control: Pos(2), target: Pos(4) })
            .map_err(|e| e.to_string())?;
        g.play_with_outcome(Color::Black, Move::Classical { pos: Pos(2) }, Some(control_bit))
            .map_err(|e| e.to_string())?;
        for p in [2, 4] {
            let got = g.get(Pos(p)).unwrap();
            ensure(got == BoxState::Collapsed(mark), || {
                format!("control {control_bit}: box {p} is {got:?}, expected {mark}")
            })?;
        }
        // The same record on the dense backend pins both qubits identically.
        let record = GameRecord::from_state(&g, 0);
        let circuit = build_game_circuit(&record).map_err(|e| e.to_string())?;
        let (state, p) = circuit
            .simulate_postselected(&recorded_outcomes(&record))
            .map_err(|e| e.to_string())?;
        ensure((p - 0.25).abs() < 1e-12, || format!("Born probability {p}"))?;
        let board = read_board(&state, 16).unwrap();
        ensure(board == g.boxes(), || "dense board differs".into())?;
    }
    Ok("control 0 -> W/W, control 1 -> B/B".into())
}

const GATE_ALGEBRA_STATES: usize = 1_000;
const GATE_ALGEBRA_TOL: f64 = 1e-12;

fn gate_algebra() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA16E);
    let mut worst = 0.0f64;
    for _ in 0..GATE_ALGEBRA_STATES {
        let m = rng.random_range(2..=8);
        let amps: Vec<Complex64> = (0..1usize << m)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let state = QuantumState::from_amplitudes(amps);
        let q = rng.random_range(0..m);
        let c = rng.random_range(0..m);
        let t = (c + rng.random_range(1..m)) % m;
        for gate in [
            Gate::H { qubit: q },
            Gate::X { qubit: q },
            Gate::Cx { control: c, target: t },
            Gate::AntiCx { control: c, target: t },
        ] {
            let mut s = state.clone();
            s.apply(&gate).unwrap();
            s.apply(&gate).unwrap();
            worst = worst.max(s.max_distance(&state));
        }
        let mut anti = state.clone();
        anti.apply_anticx(c, t).unwrap();
        let mut conj = state.clone();
        conj.apply_x(c).unwrap();
        conj.apply_cx(c, t).unwrap();
        conj.apply_x(c).unwrap();
        worst = worst.max(anti.max_distance(&conj));
    }
    ensure(worst < GATE_ALGEBRA_TOL, || format!("max amplitude error {worst:e}"))?;
    Ok(format!("{GATE_ALGEBRA_STATES} states, max error {worst:.1e}"))
}

fn rules_conformance() -> Result<String, String> {
    for n in [3, 4, 5] {
        let g = GameState::new(n, 0).unwrap();
        let corner = g.liberties(Pos(1)).unwrap();
        let edge = g.liberties(Pos(2)).unwrap();
        let interior = g.liberties(Pos(n + 2)).unwrap();
        ensure((corner, edge, interior) == (2, 3, 4), || {
            format!("{n}x{n}: liberties {corner}/{edge}/{interior}")
        })?;
    }

    // Centre captures on 3x3: surround box 5 with the other colour.
    for (center, ring) in [(Color::White, Color::Black), (Color::Black, Color::White)] {
        let script = [(2, ring), (4, ring), (6, ring), (5, center), (8, ring)];
        let mut g = GameState::new(3, 0).unwrap();
        let mut last = None;
        for (p, color) in script {
            last = Some(
                g.play_with_outcome(g.to_move(), Move::Classical { pos: Pos(p) }, Some(color.bit()))
                    .map_err(|e| e.to_string())?,
            );
        }
        let captured = last.unwrap().captured;
        ensure(captured == [(Pos(5), center)], || format!("captured {captured:?}"))?;
        let r = ring.mark();
        let expected: String = format!(".{r}.{r}.{r}.{r}.");
        ensure(g.marks() == expected, || format!("board {}", g.marks()))?;
    }

    // Double pass with White last ends the game; score = territory + captures + bonuses.
    let mut g = GameState::new(3, 0).unwrap();
    g.play_with_outcome(Color::Black, Move::Classical { pos: Pos(1) }, Some(1)).unwrap();
    g.play(Color::White, Move::Pass).unwrap();
    g.play(Color::Black, Move::Pass).unwrap();
    ensure(!g.is_over(), || "ended on Black's pass".into())?;
    g.play(Color::White, Move::Pass).unwrap();
    ensure(g.is_over(), || "did not end on White's pass".into())?;
    let s = g.score();
    ensure((s.black, s.white, s.black_territory) == (10, 1, 8), || format!("score {s:?}"))?;
    ensure(g.winner() == Ok(Winner::Black), || "wrong winner".into())?;
    Ok("liberties 2/3/4, centre captures, pass protocol and scoring".into())
}

fn replay_determinism() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut moves = 0;
    for (i, seed) in game_seeds(2025, 100).into_iter().enumerate() {
        let size = 2 + i % 4;
        let state = play_game(size, seed, Policy::Random, 8 * size * size, &mut rng)
            .map_err(|e| e.to_string())?;
        moves += state.move_log().len();
        let text = GameRecord::from_state(&state, 0).to_jsonl();
        let replayed = GameRecord::from_jsonl(&text)
            .and_then(|r| r.replay())
            .map_err(|e| format!("game {i}: {e}"))?;
        ensure(replayed == state, || format!("game {i} replayed differently"))?;
    }
    Ok(format!("100 games, {moves} moves"))
}

/// Minimal OpenQASM 2.0 reader: checks structure and counts gate statements.
fn read_qasm(text: &str) -> Result<BTreeMap<String, usize>, String> {
    let mut lines = text.lines();
    ensure(lines.next() == Some("OPENQASM 2.0;"), || "missing version".into())?;
    ensure(lines.next() == Some("include \"qelib1.inc\";"), || "missing include".into())?;
    let (mut qubits, mut clbits) = (0usize, 0usize);
    let mut counts = BTreeMap::new();
    for line in lines {
        let stmt = line.strip_suffix(';').ok_or_else(|| format!("unterminated: {line}"))?;
        let (name, args) = stmt.split_once(' ').ok_or_else(|| format!("no operands: {line}"))?;
        let index = |operand: &str, reg: &str| -> Result<usize, String> {
            operand
                .trim()
                .strip_prefix(reg)
                .and_then(|r| r.strip_prefix('['))
                .and_then(|r| r.strip_suffix(']'))
                .and_then(|r| r.parse().ok())
                .ok_or_else(|| format!("bad operand {operand}"))
        };
        match name {
            "qreg" => qubits = index(args, "q")?,
            "creg" => clbits = index(args, "c")?,
            "measure" => {
                let (q, c) = args.split_once("->").ok_or("bad measure")?;
                ensure(index(q, "q")? < qubits && index(c, "c")? < clbits, || line.to_owned())?;
                *counts.entry(name.to_owned()).or_insert(0) += 1;
            }
            "h" | "x" | "cx" | "ccx" | "reset" => {
                for operand in args.split(',') {
                    ensure(index(operand, "q")? < qubits, || line.to_owned())?;
                }
                *counts.entry(name.to_owned()).or_insert(0) += 1;
            }
            other => return Err(format!("unknown statement {other}")),
        }
    }
    Ok(counts)
}

fn qasm_export() -> Result<String, String> {
    let mut g = GameState::new(4, 0).unwrap();
    g.play_with_outcome(Color::Black, Move::Classical { pos: Pos(4) }, Some(1)).unwrap();
    g.play(Color::White, Move::Quantum { control: Pos(2), target: Pos(4) }).unwrap();
    g.play_with_outcome(Color::Black, Move::Classical { pos: Pos(2) }, Some(0)).unwrap();
    let record = GameRecord::from_state(&g, 0);
    let circuit = build_game_circuit(&record).map_err(|e| e.to_string())?;
    let text = to_qasm(&circuit).map_err(|e| e.to_string())?;

    let mut expected: BTreeMap<String, usize> = BTreeMap::new();
    for op in circuit.ops() {
        match op {
            Gate::AntiCx { .. } => {
                *expected.entry("x".into()).or_insert(0) += 2;
                *expected.entry("cx".into()).or_insert(0) += 1;
            }
            other => *expected.entry(other.name().into()).or_insert(0) += 1,
        }
    }
    let parsed = read_qasm(&text)?;
    ensure(parsed == expected, || format!("parsed {parsed:?}, expected {expected:?}"))?;

    let reloaded = GameRecord::from_jsonl(&record.to_jsonl()).map_err(|e| e.to_string())?;
    let again = to_qasm(&build_game_circuit(&reloaded).unwrap()).unwrap();
    ensure(again == text && to_qasm(&circuit).unwrap() == text, || "output not byte-stable".into())?;
    Ok(format!("{} statements, byte-stable", parsed.values().sum::<usize>()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("collapse probability", collapse_probability),
        ("qubit-count formula", qubit_count_formula),
        ("comparator brute force", comparator_brute_force),
        ("backend equivalence oracle", backend_equivalence),
        ("worked example", worked_example),
        ("gate algebra", gate_algebra),
        ("rules conformance", rules_conformance),
        ("replay determinism", replay_determinism),
        ("qasm export", qasm_export),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let result = catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|_| Err("panicked".to_owned()));
        match result {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(reason) => {
                failed += 1;
                println!("FAIL  {name}: {reason}");
            }
        }
    }
    println!("{} of {} acceptance criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
