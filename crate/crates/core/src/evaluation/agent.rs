use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use super::EvalError;
use crate::encoding::action::{ActionLayout, Mask};
use crate::encoding::features::encode_state;
use crate::encoding::{BrickGrid, StateEncoding};
use crate::engine::{Action, GameState};
use crate::network::{forward, masked_policy, NetworkError, NetworkParams};

/// How a network agent turns its policy into a move.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyMode {
    Sample,
    Greedy,
}

#[derive(Debug, Clone)]
pub enum Agent {
    /// Uniform over legal actions.
    Random,
    Network {
        params: Arc<NetworkParams>,
        mode: PolicyMode,
    },
}

impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Agent::Random => f.write_str("random"),
            Agent::Network { params, mode } => write!(
                f,
                "{}-{} ({:?})",
                params.config.architecture, params.config.layers, mode
            ),
        }
    }
}

impl Agent {
    pub fn network(params: NetworkParams, mode: PolicyMode) -> Self {
        Agent::Network {
            params: Arc::new(params),
            mode,
        }
    }

    pub fn choose<R: Rng + ?Sized>(
        &self,
        state: &GameState,
        rng: &mut R,
    ) -> Result<Action, EvalError> {
        match self {
            Agent::Random => state
                .legal_actions()
                .choose(rng)
                .copied()
                .ok_or(EvalError::Network(NetworkError::EmptyMask)),
            Agent::Network { params, mode } => {
                Ok(network_decision(params, state, *mode, rng)?.action)
            }
        }
    }
}

/// A network move together with the inputs it was computed from.
#[derive(Debug, Clone)]
pub struct Decision {
    pub encoding: StateEncoding,
    pub mask: Mask,
    pub index: usize,
    pub action: Action,
    pub value: f64,
}

pub fn layout_for(params: &NetworkParams) -> ActionLayout {
    if params.config.compat {
        ActionLayout::compat()
    } else {
        ActionLayout::standard()
    }
}

/// Encodes the acting player's view, runs the network and picks a move.
pub fn network_decision<R: Rng + ?Sized>(
    params: &NetworkParams,
    state: &GameState,
    mode: PolicyMode,
    rng: &mut R,
) -> Result<Decision, EvalError> {
    let layout = layout_for(params);
    let obs = state.observable(state.acting_player());
    let encoding = encode_state(&obs, BrickGrid::standard());
    let mask = layout.legal_mask(state);
    let out = forward(params, &encoding)?;
    let pi = masked_policy(&out, &mask)?;
    let index = match mode {
        PolicyMode::Greedy => pi.argmax(),
        PolicyMode::Sample => pi.sample_with(rng.gen::<f64>()),
    };
    let action = layout.decode(index)?;
    Ok(Decision {
        encoding,
        mask,
        index,
        action,
        value: out.value,
    })
}

/// Uniform draw over the set bits of `mask`.
pub fn random_policy<R: Rng + ?Sized>(
    mask: &Mask,
    layout: &ActionLayout,
    rng: &mut R,
) -> Result<Action, EvalError> {
    let n = mask.count();
    if n == 0 {
        return Err(EvalError::Network(NetworkError::EmptyMask));
    }
    let k = rng.gen_range(0..n);
    let index = mask.iter_set().nth(k).expect("k below popcount");
    Ok(layout.decode(index)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_legal_action_is_always_chosen() {
        let layout = ActionLayout::standard();
        let mut m = Mask::new(layout.size());
        m.set(1156);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..50 {
            assert_eq!(
                random_policy(&m, &layout, &mut rng).unwrap(),
                Action::EndTurn
            );
        }
    }

    #[test]
    fn empty_mask_errors() {
        let layout = ActionLayout::standard();
        let m = Mask::new(layout.size());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(random_policy(&m, &layout, &mut rng).is_err());
    }

    #[test]
    fn uniform_frequencies() {
        let layout = ActionLayout::standard();
        let mut m = Mask::new(layout.size());
        let bits = [1155, 1156, 1247, 1248, 1249];
        bits.iter().for_each(|&b| m.set(b));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut counts = [0usize; 5];
        let n = 10_000;
        for _ in 0..n {
            let a = random_policy(&m, &layout, &mut rng).unwrap();
            let i = bits.iter().position(|&b| b == layout.encode(&a)).unwrap();
            counts[i] += 1;
        }
        let expected = n as f64 / 5.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        // 99.9% quantile of chi-square with 4 degrees of freedom
        assert!(chi2 < 18.47, "chi2 = {chi2}");
    }

    #[test]
    fn network_agent_picks_legal_moves() {
        use crate::network::{init_network, NetworkConfig};
        let cfg = NetworkConfig {
            layers: 2,
            channels: 3,
            scalars: 4,
            ..NetworkConfig::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = init_network(cfg, &mut rng).unwrap();
        let g = GameState::new(&mut rng);
        for mode in [PolicyMode::Sample, PolicyMode::Greedy] {
            let d = network_decision(&p, &g, mode, &mut rng).unwrap();
            assert!(d.mask.get(d.index));
            assert!(g.legal_actions().contains(&d.action));
        }
    }
}
