use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::agent::Agent;
use super::EvalError;
use crate::engine::state::DEFAULT_TURN_CAP;
use crate::engine::{GameState, Outcome, TransitionRecord};

/// Final VP buckets 2..=12 (12 includes anything higher) plus draws.
pub const VP_BUCKETS: usize = 12;
pub const DRAW_BUCKET: usize = VP_BUCKETS - 1;

#[derive(Debug, Clone, PartialEq)]
pub struct GameResult {
    pub outcome: Outcome,
    /// Final points per seat, hidden cards included.
    pub vp: [u32; 2],
    pub turns: u32,
    pub moves: u64,
    /// Filled only when recording was requested.
    pub records: Vec<TransitionRecord>,
}

/// SplitMix64 finalizer, used to derive independent per-game seeds.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One full game with `first` in seat 0.
pub fn play_game(
    first: &Agent,
    second: &Agent,
    seed: u64,
    turn_cap: u32,
    record: bool,
) -> Result<GameResult, EvalError> {
    let mut game_rng = ChaCha8Rng::seed_from_u64(seed);
    let mut agent_rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, u64::MAX));
    let mut state = GameState::with_turn_cap(&mut game_rng, turn_cap);
    let agents = [first, second];
    let mut records = Vec::new();
    let mut moves = 0;
    while !state.is_terminal() {
        let action = agents[state.acting_player()].choose(&state, &mut agent_rng)?;
        let rec = state.apply_mut(action, &mut game_rng)?;
        moves += 1;
        if record {
            records.push(rec);
        }
    }
    let outcome = match state.phase {
        crate::engine::Phase::Terminal(o) => o,
        _ => unreachable!("loop exits on terminal states"),
    };
    Ok(GameResult {
        outcome,
        vp: [state.victory_points(0, true), state.victory_points(1, true)],
        turns: state.turn,
        moves,
        records,
    })
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ArenaStats {
    pub games: u64,
    pub wins_a: u64,
    pub wins_b: u64,
    pub draws: u64,
    /// Games in which agent A moved first.
    pub a_first: u64,
    pub vp_hist_a: [u64; VP_BUCKETS],
    pub vp_hist_b: [u64; VP_BUCKETS],
    pub total_turns: u64,
}

fn vp_bucket(vp: u32) -> usize {
    (vp.clamp(2, 12) - 2) as usize
}

impl ArenaStats {
    pub fn record(&mut self, result: &GameResult, a_seat: usize) {
        self.games += 1;
        if a_seat == 0 {
            self.a_first += 1;
        }
        self.total_turns += u64::from(result.turns);
        let (va, vb) = (result.vp[a_seat], result.vp[1 - a_seat]);
        match result.outcome {
            Outcome::Draw => {
                self.draws += 1;
                self.vp_hist_a[DRAW_BUCKET] += 1;
                self.vp_hist_b[DRAW_BUCKET] += 1;
                return;
            }
            Outcome::Winner(w) if w == a_seat => self.wins_a += 1,
            Outcome::Winner(_) => self.wins_b += 1,
        }
        self.vp_hist_a[vp_bucket(va)] += 1;
        self.vp_hist_b[vp_bucket(vb)] += 1;
    }

    pub fn merge(&mut self, other: &ArenaStats) {
        self.games += other.games;
        self.wins_a += other.wins_a;
        self.wins_b += other.wins_b;
        self.draws += other.draws;
        self.a_first += other.a_first;
        self.total_turns += other.total_turns;
        for i in 0..VP_BUCKETS {
            self.vp_hist_a[i] += other.vp_hist_a[i];
            self.vp_hist_b[i] += other.vp_hist_b[i];
        }
    }

    pub fn losses_a(&self) -> u64 {
        self.wins_b
    }

    /// Agent A's score rate, a draw counting half.
    pub fn win_rate(&self) -> f64 {
        if self.games == 0 {
            return 0.0;
        }
        (self.wins_a as f64 + 0.5 * self.draws as f64) / self.games as f64
    }

    /// 95% Wilson score interval around [`ArenaStats::win_rate`].
    pub fn confidence_interval(&self) -> (f64, f64) {
        wilson_interval(self.win_rate(), self.games as f64, 1.96)
    }

    pub fn mean_turns(&self) -> f64 {
        if self.games == 0 {
            return 0.0;
        }
        self.total_turns as f64 / self.games as f64
    }

    pub fn summary_csv(&self) -> String {
        let (lo, hi) = self.confidence_interval();
        format!(
            "winrate,ci_low,ci_high,draws,mean_turns\n{:.6},{:.6},{:.6},{},{:.3}\n",
            self.win_rate(),
            lo,
            hi,
            self.draws,
            self.mean_turns()
        )
    }

    pub fn vp_csv(&self) -> String {
        let mut out = String::from("vp,count_a,count_b\n");
        for i in 0..VP_BUCKETS {
            let label = if i == DRAW_BUCKET {
                "draw".to_string()
            } else {
                (i + 2).to_string()
            };
            let _ = writeln!(out, "{label},{},{}", self.vp_hist_a[i], self.vp_hist_b[i]);
        }
        out
    }
}

pub fn wilson_interval(p: f64, n: f64, z: f64) -> (f64, f64) {
    if n == 0.0 {
        return (0.0, 1.0);
    }
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArenaOptions {
    pub games: u64,
    pub seed: u64,
    pub turn_cap: u32,
    pub threads: usize,
}

impl Default for ArenaOptions {
    fn default() -> Self {
        ArenaOptions {
            games: 100,
            seed: 0,
            turn_cap: DEFAULT_TURN_CAP,
            threads: 1,
        }
    }
}

/// Plays `games` games, A moving first in the even-numbered ones.
pub fn arena(a: &Agent, b: &Agent, opts: &ArenaOptions) -> Result<ArenaStats, EvalError> {
    let play = |i: u64| -> Result<ArenaStats, EvalError> {
        let seed = derive_seed(opts.seed, i);
        let a_seat = (i % 2) as usize;
        let result = if a_seat == 0 {
            play_game(a, b, seed, opts.turn_cap, false)?
        } else {
            play_game(b, a, seed, opts.turn_cap, false)?
        };
        let mut s = ArenaStats::default();
        s.record(&result, a_seat);
        Ok(s)
    };
    let parts: Vec<Result<ArenaStats, EvalError>> = if opts.threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.threads)
            .build()
            .map_err(|e| EvalError::Runtime(e.to_string()))?;
        pool.install(|| (0..opts.games).into_par_iter().map(play).collect())
    } else {
        (0..opts.games).map(play).collect()
    };
    let mut total = ArenaStats::default();
    for p in parts {
        total.merge(&p?);
    }
    Ok(total)
}
