//! Command-line front end: train, eval, play, inspect and selftest.

pub mod config;

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::encoding::discard::raw_discard_action_count;
use crate::encoding::{BrickGrid, Cell, CellType};
use crate::engine::state::DEFAULT_TURN_CAP;
use crate::engine::transcript::write_transcript;
use crate::engine::{GameState, HarborKind, HexId, Outcome, Resource, Topology};
use crate::evaluation::{arena, play_game, Agent, ArenaOptions, PolicyMode};
use crate::network::checkpoint;
use crate::thread_limit;
use crate::trainer::{train, TrainError};

pub use config::{config_to_text, parse_config};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

impl From<TrainError> for CliError {
    fn from(e: TrainError) -> Self {
        if e.is_config() {
            CliError::Config(e.to_string())
        } else {
            CliError::Runtime(e.to_string())
        }
    }
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

#[derive(Debug, Parser)]
#[command(
    name = "catan-xdim",
    version,
    about = "Two-player Catan self-play workbench"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train a network by self-play against a pool of past snapshots.
    Train {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Continue from a `ckpt_step{T}.xdim` checkpoint.
        #[arg(long)]
        resume: Option<PathBuf>,
        /// Disable the policy activity loss.
        #[arg(long)]
        no_activity_loss: bool,
        /// Train against one frozen network instead of the refreshed pool.
        #[arg(long)]
        fixed_opponent: Option<PathBuf>,
    },
    /// Play an arena between two agents and print the statistics.
    Eval {
        #[command(flatten)]
        agents: AgentArgs,
        #[arg(short = 'n', long, default_value_t = 100)]
        games: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Also write `arena.csv` and `vp.csv` into this directory.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Play one game and write its JSON-lines transcript.
    Play {
        #[command(flatten)]
        agents: AgentArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        transcript: PathBuf,
    },
    /// Show static structures.
    Inspect {
        #[command(subcommand)]
        what: Inspect,
    },
    /// Run built-in consistency checks.
    Selftest {
        #[command(subcommand)]
        what: Selftest,
    },
}

#[derive(Debug, Args)]
struct AgentArgs {
    /// Checkpoint path or `random`.
    #[arg(long)]
    agent_a: String,
    /// Checkpoint path or `random`.
    #[arg(long)]
    agent_b: String,
    /// Network agents play their most likely move.
    #[arg(long)]
    greedy: bool,
    #[arg(long, default_value_t = DEFAULT_TURN_CAP)]
    turn_cap: u32,
}

#[derive(Debug, Subcommand)]
enum Inspect {
    /// Print the board of a seeded game on the brick grid.
    Board {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Subcommand)]
enum Selftest {
    /// Check action-space counts and grid geometry.
    Combinatorics,
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit status.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Train {
            config,
            resume,
            no_activity_loss,
            fixed_opponent,
        } => cmd_train(config, resume, no_activity_loss, fixed_opponent),
        Command::Eval {
            agents,
            games,
            seed,
            threads,
            report,
        } => cmd_eval(&agents, games, seed, threads, report),
        Command::Play {
            agents,
            seed,
            transcript,
        } => cmd_play(&agents, seed, &transcript),
        Command::Inspect {
            what: Inspect::Board { seed },
        } => {
            print!("{}", render_board(seed));
            Ok(())
        }
        Command::Selftest {
            what: Selftest::Combinatorics,
        } => {
            let report = combinatorics_report();
            println!("{}", report.line());
            if report.ok() {
                Ok(())
            } else {
                Err(CliError::Runtime("selftest failed".into()))
            }
        }
    }
}

fn cmd_train(
    config: Option<PathBuf>,
    resume: Option<PathBuf>,
    no_activity_loss: bool,
    fixed_opponent: Option<PathBuf>,
) -> Result<(), CliError> {
    let mut cfg = match &config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            parse_config(&text)?
        }
        None => Default::default(),
    };
    if no_activity_loss {
        cfg.coefficients.activity = 0.0;
    }
    if fixed_opponent.is_some() {
        cfg.fixed_opponent = fixed_opponent;
    }
    cfg.validate()?;
    let echo = config_to_text(&cfg);
    print!("{echo}");
    fs::create_dir_all(&cfg.out_dir).map_err(runtime)?;
    fs::write(cfg.out_dir.join("config.txt"), &echo).map_err(runtime)?;

    let summary = train(&cfg, resume.as_deref())?;
    println!(
        "trained {} updates ({} steps), {} stale batches dropped",
        summary.updates, summary.steps, summary.dropped_batches
    );
    println!("checkpoint {}", summary.final_checkpoint.display());
    Ok(())
}

fn load_agent(arg: &str, greedy: bool) -> Result<Agent, CliError> {
    if arg.eq_ignore_ascii_case("random") {
        return Ok(Agent::Random);
    }
    let params = checkpoint::load(Path::new(arg))
        .map_err(|e| CliError::Config(format!("agent '{arg}': {e}")))?;
    let mode = if greedy {
        PolicyMode::Greedy
    } else {
        PolicyMode::Sample
    };
    Ok(Agent::network(params, mode))
}

fn cmd_eval(
    agents: &AgentArgs,
    games: u64,
    seed: u64,
    threads: usize,
    report: Option<PathBuf>,
) -> Result<(), CliError> {
    if games == 0 {
        return Err(CliError::Config("-n must be at least 1".into()));
    }
    let a = load_agent(&agents.agent_a, agents.greedy)?;
    let b = load_agent(&agents.agent_b, agents.greedy)?;
    let stats = arena(
        &a,
        &b,
        &ArenaOptions {
            games,
            seed,
            turn_cap: agents.turn_cap,
            threads: thread_limit(threads),
        },
    )
    .map_err(runtime)?;
    println!("# {a} vs {b}: {games} games, seed {seed}");
    print!("{}", stats.summary_csv());
    print!("{}", stats.vp_csv());
    if let Some(dir) = report {
        fs::create_dir_all(&dir).map_err(runtime)?;
        fs::write(dir.join("arena.csv"), stats.summary_csv()).map_err(runtime)?;
        fs::write(dir.join("vp.csv"), stats.vp_csv()).map_err(runtime)?;
    }
    Ok(())
}

fn cmd_play(agents: &AgentArgs, seed: u64, transcript: &Path) -> Result<(), CliError> {
    let a = load_agent(&agents.agent_a, agents.greedy)?;
    let b = load_agent(&agents.agent_b, agents.greedy)?;
    let result = play_game(&a, &b, seed, agents.turn_cap, true).map_err(runtime)?;
    if let Some(dir) = transcript.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(runtime)?;
    }
    let file = fs::File::create(transcript)
        .map_err(|e| runtime(format!("{}: {e}", transcript.display())))?;
    write_transcript(&mut BufWriter::new(file), &result.records).map_err(runtime)?;
    let outcome = match result.outcome {
        Outcome::Winner(0) => "agent A wins".to_string(),
        Outcome::Winner(_) => "agent B wins".to_string(),
        Outcome::Draw => "draw".to_string(),
    };
    println!(
        "{outcome}: {}-{} VP after {} turns, {} moves",
        result.vp[0], result.vp[1], result.turns, result.moves
    );
    Ok(())
}

fn resource_letter(r: Resource) -> char {
    match r {
        Resource::Brick => 'B',
        Resource::Lumber => 'L',
        Resource::Ore => 'O',
        Resource::Grain => 'G',
        Resource::Wool => 'W',
    }
}

/// Board of the game started with `seed`, drawn on the brick grid.
/// Hexes show terrain and token (`*` marks the robber), intersections
/// show `o` or their harbor, paths show `-`.
pub fn render_board(seed: u64) -> String {
    let state = GameState::new(&mut ChaCha8Rng::seed_from_u64(seed));
    let grid = BrickGrid::standard();
    let layout = &state.layout;
    let mut out = String::new();
    let _ = writeln!(out, "board seed {seed}");
    for row in 0..crate::encoding::grid::ROWS {
        for col in 0..crate::encoding::grid::COLS {
            let cell = Cell { row, col };
            let token = if let Some(h) = grid.hex_at(cell) {
                let robber = if h == state.robber { '*' } else { ' ' };
                match layout.hex_kind[h.index()] {
                    Some(r) => format!(
                        "{robber}{}{:02}",
                        resource_letter(r),
                        layout.number_token[h.index()]
                    ),
                    None => format!("{robber}D--"),
                }
            } else if let Some(i) = grid.intersection_at(cell) {
                match layout.harbor_at(i) {
                    Some(HarborKind::Generic) => "  3 ".to_string(),
                    Some(HarborKind::Special(r)) => format!("  {} ", resource_letter(r)),
                    None => "  o ".to_string(),
                }
            } else if grid.path_at(cell).is_some() {
                "  - ".to_string()
            } else {
                "    ".to_string()
            };
            out.push_str(&token);
        }
        out.truncate(out.trim_end().len());
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombinatoricsReport {
    pub discard_keep: usize,
    pub raw_discard: u64,
    pub hexes: usize,
    pub paths: usize,
    pub intersections: usize,
    pub kernel_ok: bool,
}

impl CombinatoricsReport {
    pub fn ok(&self) -> bool {
        self.discard_keep == 70
            && self.raw_discard == 1_599_979
            && (self.hexes, self.paths, self.intersections) == (19, 72, 54)
            && self.kernel_ok
    }

    pub fn line(&self) -> String {
        format!(
            "discard_keep={} raw_discard={} grid={}/{}/{} kernel={}",
            self.discard_keep,
            self.raw_discard,
            self.hexes,
            self.paths,
            self.intersections,
            if self.kernel_ok { "OK" } else { "FAIL" }
        )
    }
}

/// Recounts the action-space sizes by enumeration and checks that each
/// hex's kernel window covers exactly its corners and sides.
pub fn combinatorics_report() -> CombinatoricsReport {
    let mut keep = 0;
    for b in 0..=4 {
        for l in 0..=4 - b {
            for o in 0..=4 - b - l {
                for _g in 0..=4 - b - l - o {
                    keep += 1;
                }
            }
        }
    }
    let grid = BrickGrid::standard();
    let topo = Topology::standard();
    let kernel_ok = (0..crate::engine::board::NUM_HEXES).all(|h| {
        let h = HexId(h as u8);
        let (mut ints, mut paths) = (BTreeSet::new(), BTreeSet::new());
        for cell in grid.window(grid.hex_cell(h)) {
            match grid.cell_type(cell) {
                CellType::Intersection => {
                    ints.insert(grid.intersection_at(cell).expect("typed cell"));
                }
                CellType::Path => {
                    paths.insert(grid.path_at(cell).expect("typed cell"));
                }
                _ => {}
            }
        }
        ints == topo.hex_intersections[h.index()].iter().copied().collect()
            && paths == topo.hex_paths[h.index()].iter().copied().collect()
    });
    CombinatoricsReport {
        discard_keep: keep,
        raw_discard: raw_discard_action_count(),
        hexes: grid.count(CellType::Hex),
        paths: grid.count(CellType::Path),
        intersections: grid.count(CellType::Intersection),
        kernel_ok,
    }
}
