//! Two-player Catan rules without inter-player trading.

pub mod board;
pub mod road;
pub mod rules;
pub mod state;
pub mod transcript;
pub mod types;

use rand::Rng;

pub use board::{generate_board, BoardLayout, Topology};
pub use road::longest_road;
pub use rules::{EngineError, TransitionRecord};
pub use state::{GameState, Observation, OpponentSummary, PlayerState};
pub use types::{
    Action, Building, BuildingKind, DevCard, Hand, HarborKind, HexId, IntersectionId, Outcome,
    PathId, Phase, Resource,
};

pub fn new_game<R: Rng + ?Sized>(rng: &mut R) -> GameState {
    GameState::new(rng)
}

pub fn legal_actions(state: &GameState) -> Vec<Action> {
    state.legal_actions()
}

pub fn apply<R: Rng + ?Sized>(
    state: &GameState,
    action: Action,
    rng: &mut R,
) -> Result<(GameState, TransitionRecord), EngineError> {
    state.apply(action, rng)
}

pub fn victory_points(state: &GameState, player: usize, include_hidden: bool) -> u32 {
    state.victory_points(player, include_hidden)
}

pub fn observable(state: &GameState, player: usize) -> Observation {
    state.observable(player)
}
