//! Board embedding, observation features, and the action codec.

pub mod action;
pub mod discard;
pub mod features;
pub mod grid;

use thiserror::Error;

use crate::engine::Hand;

pub use action::{legal_mask, ActionLayout, Mask};
pub use discard::{discard_keep_actions, raw_discard_action_count, resolve_discard};
pub use features::{encode_state, StateEncoding, NUM_CHANNELS, NUM_SCALARS};
pub use grid::{build_brick_grid, BrickGrid, Cell, CellType};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodingError {
    #[error("flat index {0} does not name an action")]
    InvalidIndex(usize),
    #[error("keep {keep:?} is not contained in hand {hand:?}")]
    KeepNotInHand { hand: Hand, keep: Hand },
}
