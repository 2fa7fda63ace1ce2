//! Agents, single games and head-to-head arenas.

pub mod agent;
pub mod arena;

use thiserror::Error;

use crate::encoding::EncodingError;
use crate::engine::EngineError;
use crate::network::NetworkError;

pub use agent::{network_decision, random_policy, Agent, Decision, PolicyMode};
pub use arena::{arena, derive_seed, play_game, ArenaOptions, ArenaStats, GameResult};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Encoding(#[from] EncodingError),
    #[error("{0}")]
    Runtime(String),
}
