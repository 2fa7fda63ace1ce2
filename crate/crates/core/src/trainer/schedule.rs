use crate::engine::{GameState, Outcome, Phase};

/// `lr0 / (1 + decay * steps)`.
pub fn lr_schedule(lr0: f64, decay: f64, steps: u64) -> f64 {
    lr0 / (1.0 + decay * steps as f64)
}

/// Shaped final reward of `player`: the win/loss term plus a bonus per
/// point of lead. Draws get the lead term only.
pub fn compute_reward(state: &GameState, player: usize, win_reward: f64, vp_reward: f64) -> f64 {
    let me = f64::from(state.victory_points(player, true));
    let them = f64::from(state.victory_points(1 - player, true));
    let lead = vp_reward * (me - them);
    match state.phase {
        Phase::Terminal(Outcome::Winner(w)) if w == player => win_reward + lead,
        Phase::Terminal(Outcome::Winner(_)) => -win_reward + lead,
        _ => lead,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn schedule_values() {
        assert_eq!(lr_schedule(3e-3, 2e-3, 0), 3e-3);
        assert!((lr_schedule(3e-3, 2e-3, 500) - 1.5e-3).abs() < 1e-15);
        let mut last = f64::INFINITY;
        for t in 0..2000 {
            let lr = lr_schedule(3e-3, 2e-3, t);
            assert!(lr < last);
            last = lr;
        }
    }

    fn game(outcome: Outcome) -> GameState {
        let mut g = GameState::new(&mut ChaCha8Rng::seed_from_u64(0));
        g.phase = Phase::Terminal(outcome);
        g
    }

    #[test]
    fn reward_examples() {
        let mut g = game(Outcome::Winner(0));
        // 4 settlements and 3 cities against 5 settlements and a point card
        g.players[0].settlements_left = 1;
        g.players[0].cities_left = 1;
        g.players[1].settlements_left = 0;
        g.players[1].dev_old[crate::engine::DevCard::VictoryPoint.index()] = 1;
        assert_eq!(g.victory_points(0, true), 10);
        assert_eq!(g.victory_points(1, true), 6);
        assert!((compute_reward(&g, 0, 0.75, 0.02) - 0.83).abs() < 1e-12);
        assert!((compute_reward(&g, 1, 0.75, 0.02) + 0.83).abs() < 1e-12);

        let mut d = game(Outcome::Draw);
        d.players[0].settlements_left = 0;
        d.players[0].cities_left = 3;
        d.players[1].settlements_left = 0;
        assert_eq!(d.victory_points(0, true), 7);
        assert_eq!(d.victory_points(1, true), 5);
        assert!((compute_reward(&d, 0, 0.75, 0.02) - 0.04).abs() < 1e-12);
        assert!((compute_reward(&d, 1, 0.75, 0.02) + 0.04).abs() < 1e-12);
    }
}
