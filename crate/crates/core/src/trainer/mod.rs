//! Self-play actor-critic training against a pool of past snapshots.

pub mod config;
pub mod pool;
pub mod schedule;
pub mod train;
pub mod worker;

use thiserror::Error;

use crate::evaluation::EvalError;
use crate::network::NetworkError;

pub use config::TrainerConfig;
pub use pool::{OpponentPool, PoolSlot};
pub use schedule::{compute_reward, lr_schedule};
pub use train::{
    checkpoint_path, step_from_checkpoint, train, MetricsRow, TrainSummary, METRICS_HEADER,
};
pub use worker::{Batch, Worker, WorkerSettings};

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("parameters became non-finite at update {0}")]
    Diverged(u64),
}

impl TrainError {
    /// Whether the failure stems from bad configuration rather than a run.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            TrainError::Config(_) | TrainError::Network(NetworkError::InvalidConfig(_))
        )
    }
}
