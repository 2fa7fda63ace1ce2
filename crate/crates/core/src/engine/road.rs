use super::board::{Topology, NUM_PATHS};
use super::state::GameState;

/// Length of the longest edge-simple trail in `player`'s road network.
/// A trail may end on, but not pass through, an intersection holding an
/// opponent building.
pub fn longest_road(state: &GameState, player: usize) -> u32 {
    let topo = Topology::standard();
    let owner = player as u8;
    let own: Vec<usize> = (0..NUM_PATHS)
        .filter(|&p| state.roads[p] == Some(owner))
        .collect();
    if own.is_empty() {
        return 0;
    }
    let blocked = |i: usize| matches!(state.building_owner(i), Some(o) if o != player);

    let mut best = 0;
    for &p in &own {
        for end in topo.path_intersections[p] {
            // Walk the road starting at `p`, leaving through `end`.
            let used = 1u128 << p;
            let len = extend(state, topo, owner, end.index(), used, &blocked);
            best = best.max(1 + len);
        }
    }
    best
}

fn extend(
    state: &GameState,
    topo: &Topology,
    owner: u8,
    at: usize,
    used: u128,
    blocked: &impl Fn(usize) -> bool,
) -> u32 {
    if blocked(at) {
        return 0;
    }
    let mut best = 0;
    for &p in &topo.intersection_paths[at] {
        let pi = p.index();
        if used & (1u128 << pi) != 0 || state.roads[pi] != Some(owner) {
            continue;
        }
        let [a, b] = topo.path_intersections[pi];
        let next = if a.index() == at { b } else { a };
        let len = 1 + extend(
            state,
            topo,
            owner,
            next.index(),
            used | (1u128 << pi),
            blocked,
        );
        best = best.max(len);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::types::{Building, BuildingKind};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn empty_game() -> GameState {
        GameState::new(&mut ChaCha8Rng::seed_from_u64(0))
    }

    /// A simple chain of `n` paths starting at intersection `start`,
    /// returning the visited intersections.
    fn chain(g: &mut GameState, player: u8, start: usize, n: usize) -> Vec<usize> {
        let topo = Topology::standard();
        let mut at = start;
        let mut nodes = vec![at];
        for _ in 0..n {
            let p = topo.intersection_paths[at]
                .iter()
                .copied()
                .find(|p| {
                    let [a, b] = topo.path_intersections[p.index()];
                    let other = if a.index() == at { b } else { a };
                    g.roads[p.index()].is_none() && !nodes.contains(&other.index())
                })
                .expect("chain continues");
            g.roads[p.index()] = Some(player);
            let [a, b] = topo.path_intersections[p.index()];
            at = if a.index() == at {
                b.index()
            } else {
                a.index()
            };
            nodes.push(at);
        }
        nodes
    }

    #[test]
    fn three_chain() {
        let mut g = empty_game();
        chain(&mut g, 0, 20, 3);
        assert_eq!(longest_road(&g, 0), 3);
        assert_eq!(longest_road(&g, 1), 0);
    }

    #[test]
    fn hexagon_ring_is_six() {
        let mut g = empty_game();
        let topo = Topology::standard();
        for p in topo.hex_paths[9] {
            g.roads[p.index()] = Some(1);
        }
        assert_eq!(longest_road(&g, 1), 6);
    }

    #[test]
    fn opponent_settlement_splits_chain() {
        let mut g = empty_game();
        let nodes = chain(&mut g, 0, 20, 5);
        assert_eq!(longest_road(&g, 0), 5);
        // Block the intersection after the second road: segments of 2 and 3.
        g.buildings[nodes[2]] = Some(Building {
            owner: 1,
            kind: BuildingKind::Settlement,
        });
        assert_eq!(longest_road(&g, 0), 3);
        // An own building does not break it.
        g.buildings[nodes[2]] = Some(Building {
            owner: 0,
            kind: BuildingKind::Settlement,
        });
        assert_eq!(longest_road(&g, 0), 5);
    }

    #[test]
    fn branching_takes_longest_arm() {
        let mut g = empty_game();
        let topo = Topology::standard();
        // Degree-3 interior intersection with three arms.
        let hub = (0..54)
            .find(|&i| topo.intersection_paths[i].len() == 3)
            .unwrap();
        for &p in &topo.intersection_paths[hub] {
            g.roads[p.index()] = Some(0);
        }
        assert_eq!(longest_road(&g, 0), 2);
    }
}
