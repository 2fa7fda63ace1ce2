use std::path::PathBuf;

use super::TrainError;
use crate::engine::state::DEFAULT_TURN_CAP;
use crate::network::{LossCoefficients, NetworkConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainerConfig {
    pub network: NetworkConfig,
    pub workers: usize,
    pub games_per_worker: usize,
    pub batch_size: usize,
    pub batches_per_step: u64,
    /// Opponent refresh period, in training steps.
    pub refresh_period: u64,
    pub lr0: f64,
    /// Inverse decay per training step.
    pub lr_decay: f64,
    pub coefficients: LossCoefficients,
    pub win_reward: f64,
    pub vp_reward: f64,
    pub turn_cap: u32,
    pub seed: u64,
    /// Largest accepted gap between a batch's policy version and the updater.
    pub staleness_limit: u64,
    /// Stop after this many training steps (0 = no step limit).
    pub max_steps: u64,
    /// Stop after this many updates (0 = no update limit).
    pub max_updates: u64,
    /// Checkpoint period in training steps (0 = final checkpoint only).
    pub checkpoint_every: u64,
    /// Arena-vs-random period in training steps (0 = never).
    pub eval_every: u64,
    pub eval_games: u64,
    /// Argmax instead of sampling during evaluation.
    pub eval_greedy: bool,
    /// Interleave workers and updater on one thread, reproducibly.
    pub single_threaded: bool,
    /// Train against this frozen network instead of the refreshed pool.
    pub fixed_opponent: Option<PathBuf>,
    /// Checkpoint directory.
    pub out_dir: PathBuf,
    /// Metrics CSV; `metrics.csv` inside `out_dir` when unset.
    pub metrics_file: Option<PathBuf>,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        TrainerConfig {
            network: NetworkConfig::default(),
            workers: 16,
            games_per_worker: 8,
            batch_size: 64,
            batches_per_step: 1000,
            refresh_period: 50,
            lr0: 3e-3,
            lr_decay: 2e-3,
            coefficients: LossCoefficients::default(),
            win_reward: 0.75,
            vp_reward: 0.02,
            turn_cap: DEFAULT_TURN_CAP,
            seed: 0,
            staleness_limit: 100,
            max_steps: 30_000,
            max_updates: 0,
            checkpoint_every: 10,
            eval_every: 0,
            eval_games: 200,
            eval_greedy: false,
            single_threaded: false,
            fixed_opponent: None,
            out_dir: PathBuf::from("runs/default"),
            metrics_file: None,
        }
    }
}

impl TrainerConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        self.network.validate()?;
        let bad = |m: &str| Err(TrainError::Config(m.to_string()));
        if self.workers == 0 || self.games_per_worker == 0 || self.batch_size == 0 {
            return bad("workers, games_per_worker and batch_size must be positive");
        }
        if self.batches_per_step == 0 || self.refresh_period == 0 {
            return bad("batches_per_step and refresh_period must be positive");
        }
        if !(self.lr0 > 0.0 && self.lr0.is_finite()) {
            return bad("lr0 must be positive");
        }
        if !(self.lr_decay >= 0.0 && self.lr_decay.is_finite()) {
            return bad("lr_decay must be non-negative");
        }
        let k = &self.coefficients;
        let all = [
            k.policy,
            k.value,
            k.entropy,
            k.activity,
            k.weight_decay,
            k.gamma,
            self.win_reward,
            self.vp_reward,
        ];
        if all.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return bad("coefficients and rewards must be finite and non-negative");
        }
        if k.gamma > 1.0 {
            return bad("gamma must lie in [0, 1]");
        }
        if self.turn_cap == 0 {
            return bad("turn_cap must be positive");
        }
        if self.max_steps == 0 && self.max_updates == 0 {
            return bad("set max_steps or max_updates");
        }
        if self.eval_every > 0 && self.eval_games == 0 {
            return bad("eval_games must be positive when eval_every is set");
        }
        Ok(())
    }

    pub fn metrics_path(&self) -> PathBuf {
        self.metrics_file
            .clone()
            .unwrap_or_else(|| self.out_dir.join("metrics.csv"))
    }

    /// Experiences consumed per training step.
    pub fn experiences_per_step(&self) -> u64 {
        self.batch_size as u64 * self.batches_per_step
    }
}
