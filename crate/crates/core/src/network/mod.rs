//! Cross-dimensional policy/value networks with exact gradients.

pub mod checkpoint;
pub mod config;
pub mod loss;
pub mod model;
pub mod ops;
pub mod params;

use thiserror::Error;

pub use config::{Architecture, NetworkConfig};
pub use loss::{
    apply_update, compute_targets, loss_and_gradients, masked_policy, masked_softmax, Experience,
    LossCoefficients, LossDiagnostics, PolicyDistribution, Targets,
};
pub use model::{backward, forward, forward_cached, ForwardCache, NetworkOutput};
pub use params::{init_network, NetworkParams, Tensor};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetworkError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("no legal action in mask")]
    EmptyMask,
    #[error("invalid network config: {0}")]
    InvalidConfig(String),
    #[error("bad checkpoint: {0}")]
    BadCheckpoint(String),
    #[error("i/o error: {0}")]
    Io(String),
}
