use std::collections::VecDeque;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::schedule::compute_reward;
use crate::encoding::action::Mask;
use crate::encoding::StateEncoding;
use crate::engine::GameState;
use crate::evaluation::{derive_seed, network_decision, EvalError, PolicyMode};
use crate::network::{Experience, NetworkParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkerSettings {
    pub games: usize,
    pub batch_size: usize,
    pub turn_cap: u32,
    pub win_reward: f64,
    pub vp_reward: f64,
}

/// Exactly `batch_size` learner experiences plus bookkeeping.
#[derive(Debug, Clone)]
pub struct Batch {
    pub experiences: Vec<Experience>,
    pub worker: usize,
    /// Oldest learner snapshot version that produced any experience.
    pub policy_version: u64,
    /// Final rewards of games that ended inside this batch.
    pub final_rewards: Vec<f64>,
}

struct Pending {
    state: StateEncoding,
    mask: Mask,
    action: usize,
    version: u64,
}

struct GameSlot {
    state: GameState,
    rng: ChaCha8Rng,
    learner_seat: usize,
    pending: Option<Pending>,
}

/// Plays several games concurrently, learner against a frozen opponent.
pub struct Worker {
    pub id: usize,
    settings: WorkerSettings,
    seed: u64,
    rng: ChaCha8Rng,
    games: Vec<GameSlot>,
    cursor: usize,
    started: u64,
    ready: VecDeque<(Experience, u64, Option<f64>)>,
}

impl Worker {
    pub fn new(id: usize, settings: WorkerSettings, seed: u64) -> Self {
        let seed = derive_seed(seed, id as u64);
        let mut w = Worker {
            id,
            settings,
            seed,
            rng: ChaCha8Rng::seed_from_u64(derive_seed(seed, u64::MAX)),
            games: Vec::with_capacity(settings.games),
            cursor: 0,
            started: 0,
            ready: VecDeque::new(),
        };
        for slot in 0..settings.games.max(1) {
            let g = w.fresh_game(slot % 2);
            w.games.push(g);
        }
        w
    }

    /// Seats of the learner in each concurrent game.
    pub fn learner_seats(&self) -> Vec<usize> {
        self.games.iter().map(|g| g.learner_seat).collect()
    }

    fn fresh_game(&mut self, learner_seat: usize) -> GameSlot {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(self.seed, self.started));
        self.started += 1;
        GameSlot {
            state: GameState::with_turn_cap(&mut rng, self.settings.turn_cap),
            rng,
            learner_seat,
            pending: None,
        }
    }

    /// Cycles through the games, one learner move per visit, until a full
    /// batch is available.
    pub fn generate_batch(
        &mut self,
        learner: &NetworkParams,
        version: u64,
        opponent: &NetworkParams,
    ) -> Result<Batch, EvalError> {
        let b = self.settings.batch_size;
        while self.ready.len() < b {
            let i = self.cursor;
            self.cursor = (self.cursor + 1) % self.games.len();
            self.visit(i, learner, version, opponent)?;
        }
        let mut experiences = Vec::with_capacity(b);
        let mut oldest = version;
        let mut final_rewards = Vec::new();
        for (e, v, r) in self.ready.drain(..b) {
            experiences.push(e);
            oldest = oldest.min(v);
            final_rewards.extend(r);
        }
        Ok(Batch {
            experiences,
            worker: self.id,
            policy_version: oldest,
            final_rewards,
        })
    }

    fn visit(
        &mut self,
        i: usize,
        learner: &NetworkParams,
        version: u64,
        opponent: &NetworkParams,
    ) -> Result<(), EvalError> {
        self.advance_opponent(i, opponent)?;
        if self.games[i].state.is_terminal() {
            self.finish(i);
            self.advance_opponent(i, opponent)?;
        }
        let slot = &mut self.games[i];
        let d = network_decision(learner, &slot.state, PolicyMode::Sample, &mut self.rng)?;
        if let Some(p) = slot.pending.take() {
            let e = Experience {
                state: p.state,
                mask: p.mask,
                action: p.action,
                reward: 0.0,
                next: Some((d.encoding.clone(), d.mask.clone())),
            };
            self.ready.push_back((e, p.version, None));
        }
        slot.state.apply_mut(d.action, &mut slot.rng)?;
        slot.pending = Some(Pending {
            state: d.encoding,
            mask: d.mask,
            action: d.index,
            version,
        });
        if slot.state.is_terminal() {
            self.finish(i);
        }
        Ok(())
    }

    /// Plays opponent moves until the learner must act or the game ends.
    fn advance_opponent(&mut self, i: usize, opponent: &NetworkParams) -> Result<(), EvalError> {
        let slot = &mut self.games[i];
        while !slot.state.is_terminal() && slot.state.acting_player() != slot.learner_seat {
            let d = network_decision(opponent, &slot.state, PolicyMode::Sample, &mut self.rng)?;
            slot.state.apply_mut(d.action, &mut slot.rng)?;
        }
        Ok(())
    }

    /// Closes the pending experience with the final reward and starts a
    /// new game in the same seat.
    fn finish(&mut self, i: usize) {
        let seat = self.games[i].learner_seat;
        let slot = &mut self.games[i];
        let reward = compute_reward(
            &slot.state,
            seat,
            self.settings.win_reward,
            self.settings.vp_reward,
        );
        if let Some(p) = slot.pending.take() {
            let e = Experience {
                state: p.state,
                mask: p.mask,
                action: p.action,
                reward,
                next: None,
            };
            self.ready.push_back((e, p.version, Some(reward)));
        }
        self.games[i] = self.fresh_game(seat);
    }
}
