use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qgo_cli::play::run_play;
use qgo_cli::server::{self, DEFAULT_LISTEN, DEFAULT_RECORD_DIR};
use qgo_core::comparator::build_capture_comparator_with;
use qgo_core::render::render_status;
use qgo_core::selfplay::{run_selfplay, Policy, SelfPlayConfig};
use qgo_core::{build_game_circuit, to_qasm, Color, GameRecord, GameState, Polarity, Pos, SessionHub};

#[derive(Parser)]
#[command(name = "qgo", version, about = "Quantum Go: play, replay, self-play, circuit export and server")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hot-seat game on the console.
    Play {
        #[arg(long, default_value_t = 4)]
        size: usize,
        /// Seed for collapse outcomes (random if omitted).
        #[arg(long)]
        seed: Option<u64>,
        /// Write the game record here when the session ends.
        #[arg(long)]
        record: Option<PathBuf>,
    },
    /// Replay a record move by move.
    Replay {
        #[arg(long)]
        record: PathBuf,
    },
    /// Play many random games and report statistics.
    Selfplay {
        #[arg(long, default_value_t = 4)]
        size: usize,
        #[arg(long, default_value_t = 100)]
        games: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "random")]
        policy: Policy,
        /// Emit the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Export a capture comparator or a game circuit as OpenQASM 2.0.
    Qasm(QasmArgs),
    /// Run the HTTP/WebSocket session server.
    Serve {
        #[arg(long, env = "QGO_LISTEN", default_value = DEFAULT_LISTEN)]
        listen: String,
        #[arg(long, env = "QGO_RECORD_DIR", default_value = DEFAULT_RECORD_DIR)]
        record_dir: PathBuf,
    },
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["pos", "record"]))]
struct QasmArgs {
    /// Board size for --pos.
    #[arg(long, requires = "pos")]
    size: Option<usize>,
    /// Interior box to build the capture comparator for.
    #[arg(long, requires = "size")]
    pos: Option<usize>,
    /// Game record to build the game circuit from.
    #[arg(long)]
    record: Option<PathBuf>,
    /// Colour whose capture the comparator detects.
    #[arg(long, value_enum, default_value_t = ColorArg::Black)]
    color: ColorArg,
    #[arg(long, value_enum, default_value_t = PolarityArg::Literal)]
    polarity: PolarityArg,
    /// Output file (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ColorArg {
    Black,
    White,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolarityArg {
    Literal,
    Marking,
}

type Failure = Box<dyn std::error::Error>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Play { size, seed, record } => play(size, seed, record.as_deref()),
        Command::Replay { record } => replay(&record),
        Command::Selfplay { size, games, seed, policy, json } => {
            let config = SelfPlayConfig { policy, ..SelfPlayConfig::new(size, games, seed) };
            let report = run_selfplay(&config)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                println!("{report}");
            }
            Ok(())
        }
        Command::Qasm(args) => qasm(args),
        Command::Serve { listen, record_dir } => serve(&listen, &record_dir),
    }
}

fn play(size: usize, seed: Option<u64>, record: Option<&Path>) -> Result<(), Failure> {
    let seed = seed.unwrap_or_else(rand::random);
    let state = GameState::new(size, seed)?;
    println!("quantum Go on {size}x{size}, seed {seed}");
    let stdin = io::stdin();
    let mut stdout = io::stdout();
    let end = run_play(state, stdin.lock(), &mut stdout)?;
    if let Some(path) = record {
        fs::write(path, GameRecord::from_state(&end, unix_time()).to_jsonl())?;
    }
    Ok(())
}

fn replay(path: &Path) -> Result<(), Failure> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let record = GameRecord::from_jsonl(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let states = record.replay_states()?;
    let mut out = io::stdout().lock();
    writeln!(out, "{}x{} game, seed {}, {} moves", record.header.size, record.header.size, record.header.seed, record.entries.len())?;
    write!(out, "{}", render_status(&states[0]))?;
    for (entry, state) in record.entries.iter().zip(&states[1..]) {
        writeln!(out, "\nmove {}: {} plays {}", entry.ordinal + 1, entry.player, entry.mv)?;
        write!(out, "{}", render_status(state))?;
    }
    Ok(())
}

fn qasm(args: QasmArgs) -> Result<(), Failure> {
    let circuit = match (args.pos, &args.record) {
        (Some(pos), None) => {
            let size = args.size.expect("clap requires --size with --pos");
            let color = match args.color {
                ColorArg::Black => Color::Black,
                ColorArg::White => Color::White,
            };
            let polarity = match args.polarity {
                PolarityArg::Literal => Polarity::Literal,
                PolarityArg::Marking => Polarity::Marking,
            };
            build_capture_comparator_with(size, Pos(pos), color, polarity)?
        }
        (None, Some(path)) => {
            let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            build_game_circuit(&GameRecord::from_jsonl(&text)?)?
        }
        _ => unreachable!("clap enforces exactly one source"),
    };
    let text = to_qasm(&circuit)?;
    match args.out {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn serve(listen: &str, record_dir: &Path) -> Result<(), Failure> {
    let hub = SessionHub::open(record_dir)
        .map_err(|e| format!("record directory {}: {e}", record_dir.display()))?;
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(listen)
            .await
            .map_err(|e| format!("cannot listen on {listen}: {e}"))?;
        println!("listening on {}", listener.local_addr()?);
        println!("records in {}", record_dir.display());
        io::stdout().flush()?;
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
        };
        server::serve(listener, Arc::new(hub), shutdown).await?;
        Ok(())
    })
}

fn unix_time() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}
