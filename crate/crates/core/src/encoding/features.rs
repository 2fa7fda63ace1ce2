//! Observation to network input: 17 board channels over the brick grid
//! plus 45 scalars, always from the observing player's seat.

use std::fmt::Write as _;

use super::grid::{BrickGrid, CELLS};
use crate::engine::board::{NUM_HEXES, NUM_INTERSECTIONS, NUM_PATHS};
use crate::engine::state::{
    BANK_PER_RESOURCE, CITIES_PER_PLAYER, DEV_DECK_SIZE, ROADS_PER_PLAYER, SETTLEMENTS_PER_PLAYER,
};
use crate::engine::{
    BuildingKind, DevCard, HarborKind, HexId, IntersectionId, Observation, PathId, Phase,
};

pub const NUM_CHANNELS: usize = 17;
pub const NUM_SCALARS: usize = 45;

pub mod channel {
    pub const DESERT: usize = 0;
    /// Five production channels in resource order.
    pub const PRODUCTION: usize = 1;
    pub const ROBBER: usize = 6;
    pub const ROAD_SELF: usize = 7;
    pub const ROAD_OPPONENT: usize = 8;
    /// Six harbor channels in [`crate::engine::HarborKind::ALL`] order.
    pub const HARBOR: usize = 9;
    pub const BUILDING_SELF: usize = 15;
    pub const BUILDING_OPPONENT: usize = 16;
}

pub mod scalar {
    pub const SELF_RESOURCES: usize = 0;
    pub const SELF_PIECES: usize = 5;
    pub const SELF_ARMY: usize = 8;
    pub const SELF_DEV_NEW: usize = 9;
    pub const SELF_DEV_OLD: usize = 14;
    pub const SELF_HARBORS: usize = 19;
    pub const SELF_LARGEST_ARMY: usize = 25;
    pub const SELF_LONGEST_ROAD: usize = 26;
    pub const OPP_RESOURCE_TOTAL: usize = 27;
    pub const OPP_DEV_TOTAL: usize = 28;
    pub const OPP_PIECES: usize = 29;
    pub const OPP_ARMY: usize = 32;
    pub const OPP_LARGEST_ARMY: usize = 33;
    pub const OPP_LONGEST_ROAD: usize = 34;
    pub const BANK: usize = 35;
    pub const DECK: usize = 40;
    pub const HAS_ROLLED: usize = 41;
    pub const DEV_PLAYED: usize = 42;
    pub const FREE_ROADS: usize = 43;
    pub const FREE_RESOURCES: usize = 44;
}

/// Largest army size used for normalization: every knight in the deck.
const MAX_ARMY: f64 = 14.0;

#[derive(Debug, Clone, PartialEq)]
pub struct StateEncoding {
    /// `NUM_CHANNELS x ROWS x COLS`, row-major.
    pub channels: Vec<f64>,
    pub scalars: Vec<f64>,
}

impl StateEncoding {
    pub fn zeros() -> Self {
        StateEncoding {
            channels: vec![0.0; NUM_CHANNELS * CELLS],
            scalars: vec![0.0; NUM_SCALARS],
        }
    }

    pub fn at(&self, channel: usize, cell: usize) -> f64 {
        self.channels[channel * CELLS + cell]
    }

    /// Stable text dump: nonzero `channel,row,col,value` lines in index
    /// order, then every `scalar_index,value`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, &v) in self.channels.iter().enumerate() {
            if v != 0.0 {
                let c = i / CELLS;
                let cell = i % CELLS;
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    c,
                    cell / super::grid::COLS,
                    cell % super::grid::COLS,
                    v
                );
            }
        }
        for (i, v) in self.scalars.iter().enumerate() {
            let _ = writeln!(out, "{i},{v}");
        }
        out
    }
}

/// Probability that two dice roll `token`.
pub fn production_probability(token: u8) -> f64 {
    if !(2..=12).contains(&token) || token == 7 {
        return 0.0;
    }
    f64::from(6 - (i32::from(token) - 7).unsigned_abs() as u8) / 36.0
}

pub fn encode_state(obs: &Observation, grid: &BrickGrid) -> StateEncoding {
    let mut enc = StateEncoding::zeros();
    encode_into(obs, grid, &mut enc);
    enc
}

/// Writes the encoding of `obs` into `enc`, overwriting everything.
pub fn encode_into(obs: &Observation, grid: &BrickGrid, enc: &mut StateEncoding) {
    enc.channels.iter_mut().for_each(|v| *v = 0.0);
    let me = obs.perspective;
    let mut set = |c: usize, cell: usize, v: f64| enc.channels[c * CELLS + cell] = v;

    for h in 0..NUM_HEXES {
        let cell = grid.hex_cell(HexId(h as u8)).flat();
        match obs.layout.hex_kind[h] {
            None => set(channel::DESERT, cell, 1.0),
            Some(r) => set(
                channel::PRODUCTION + r.index(),
                cell,
                production_probability(obs.layout.number_token[h]),
            ),
        }
    }
    set(channel::ROBBER, grid.hex_cell(obs.robber).flat(), 1.0);

    for p in 0..NUM_PATHS {
        if let Some(owner) = obs.roads[p] {
            let c = if owner as usize == me {
                channel::ROAD_SELF
            } else {
                channel::ROAD_OPPONENT
            };
            set(c, grid.path_cell(PathId(p as u8)).flat(), 1.0);
        }
    }

    let mut own_harbors = [0.0; 6];
    for i in 0..NUM_INTERSECTIONS {
        let id = IntersectionId(i as u8);
        let cell = grid.intersection_cell(id).flat();
        let harbor = obs.layout.harbor_at(id);
        if let Some(k) = harbor {
            set(channel::HARBOR + k.index(), cell, 1.0);
        }
        if let Some(b) = obs.buildings[i] {
            let v = match b.kind {
                BuildingKind::Settlement => 0.5,
                BuildingKind::City => 1.0,
            };
            if b.owner == me {
                set(channel::BUILDING_SELF, cell, v);
                if let Some(k) = harbor {
                    own_harbors[k.index()] = 1.0;
                }
            } else {
                set(channel::BUILDING_OPPONENT, cell, v);
            }
        }
    }

    let s = &mut enc.scalars;
    let own = &obs.own;
    let bank_max = f64::from(BANK_PER_RESOURCE);
    for r in 0..5 {
        s[scalar::SELF_RESOURCES + r] = f64::from(own.resources.0[r]) / bank_max;
        s[scalar::BANK + r] = f64::from(obs.bank.0[r]) / bank_max;
    }
    let pieces = |roads: u8, settlements: u8, cities: u8| {
        [
            f64::from(roads) / f64::from(ROADS_PER_PLAYER),
            f64::from(settlements) / f64::from(SETTLEMENTS_PER_PLAYER),
            f64::from(cities) / f64::from(CITIES_PER_PLAYER),
        ]
    };
    s[scalar::SELF_PIECES..scalar::SELF_PIECES + 3].copy_from_slice(&pieces(
        own.roads_left,
        own.settlements_left,
        own.cities_left,
    ));
    s[scalar::SELF_ARMY] = f64::from(own.army) / MAX_ARMY;
    for card in DevCard::ALL {
        let max = f64::from(card.deck_count());
        s[scalar::SELF_DEV_NEW + card.index()] = f64::from(own.dev_new[card.index()]) / max;
        s[scalar::SELF_DEV_OLD + card.index()] = f64::from(own.dev_old[card.index()]) / max;
    }
    for k in HarborKind::ALL {
        s[scalar::SELF_HARBORS + k.index()] = own_harbors[k.index()];
    }
    s[scalar::SELF_LARGEST_ARMY] = flag(own.largest_army);
    s[scalar::SELF_LONGEST_ROAD] = flag(own.longest_road);

    let opp = &obs.opponent;
    s[scalar::OPP_RESOURCE_TOTAL] = (f64::from(opp.resource_total) / bank_max).min(1.0);
    s[scalar::OPP_DEV_TOTAL] = f64::from(opp.dev_total) / DEV_DECK_SIZE as f64;
    s[scalar::OPP_PIECES..scalar::OPP_PIECES + 3].copy_from_slice(&pieces(
        opp.roads_left,
        opp.settlements_left,
        opp.cities_left,
    ));
    s[scalar::OPP_ARMY] = f64::from(opp.army) / MAX_ARMY;
    s[scalar::OPP_LARGEST_ARMY] = flag(opp.largest_army);
    s[scalar::OPP_LONGEST_ROAD] = flag(opp.longest_road);

    s[scalar::DECK] = f64::from(obs.dev_deck_size) / DEV_DECK_SIZE as f64;
    s[scalar::HAS_ROLLED] = flag(obs.has_rolled);
    s[scalar::DEV_PLAYED] = flag(obs.dev_played_this_turn);
    s[scalar::FREE_ROADS] = flag(matches!(obs.phase, Phase::FreeRoads { .. }));
    s[scalar::FREE_RESOURCES] = flag(matches!(obs.phase, Phase::FreeResources { .. }));
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::grid::CellType;
    use crate::engine::{Building, GameState, Hand, Resource};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn game() -> GameState {
        GameState::new(&mut ChaCha8Rng::seed_from_u64(21))
    }

    #[test]
    fn production_values() {
        assert_eq!(production_probability(8), 5.0 / 36.0);
        assert_eq!(production_probability(6), 5.0 / 36.0);
        assert_eq!(production_probability(2), 1.0 / 36.0);
        assert_eq!(production_probability(12), 1.0 / 36.0);
        assert_eq!(production_probability(0), 0.0);
    }

    #[test]
    fn ore_eight_hex() {
        let mut g = game();
        let h = (0..NUM_HEXES)
            .find(|&h| g.layout.hex_kind[h].is_some())
            .unwrap();
        g.layout.hex_kind[h] = Some(Resource::Ore);
        g.layout.number_token[h] = 8;
        let grid = BrickGrid::standard();
        let enc = encode_state(&g.observable(0), grid);
        let cell = grid.hex_cell(HexId(h as u8)).flat();
        for r in Resource::ALL {
            let want = if r == Resource::Ore { 5.0 / 36.0 } else { 0.0 };
            assert_eq!(enc.at(channel::PRODUCTION + r.index(), cell), want);
        }
    }

    #[test]
    fn building_values_by_seat() {
        let mut g = game();
        g.buildings[3] = Some(Building {
            owner: 0,
            kind: BuildingKind::Settlement,
        });
        g.buildings[40] = Some(Building {
            owner: 1,
            kind: BuildingKind::City,
        });
        let grid = BrickGrid::standard();
        let c3 = grid.intersection_cell(IntersectionId(3)).flat();
        let c40 = grid.intersection_cell(IntersectionId(40)).flat();
        let enc0 = encode_state(&g.observable(0), grid);
        assert_eq!(enc0.at(channel::BUILDING_SELF, c3), 0.5);
        assert_eq!(enc0.at(channel::BUILDING_OPPONENT, c40), 1.0);
        let enc1 = encode_state(&g.observable(1), grid);
        assert_eq!(enc1.at(channel::BUILDING_SELF, c40), 1.0);
        assert_eq!(enc1.at(channel::BUILDING_OPPONENT, c3), 0.5);
    }

    #[test]
    fn opponent_total_scalar() {
        let mut g = game();
        g.players[1].resources = Hand::new(2, 0, 1, 0, 0);
        let enc = encode_state(&g.observable(0), BrickGrid::standard());
        assert_eq!(enc.scalars[scalar::OPP_RESOURCE_TOTAL], 3.0 / 19.0);
    }

    #[test]
    fn channel_support_and_scalar_range_on_fresh_game() {
        let g = game();
        let grid = BrickGrid::standard();
        let enc = encode_state(&g.observable(0), grid);
        for c in 0..NUM_CHANNELS {
            let want = match c {
                0..=6 => CellType::Hex,
                7 | 8 => CellType::Path,
                _ => CellType::Intersection,
            };
            for cell in 0..CELLS {
                if enc.at(c, cell) != 0.0 {
                    assert_eq!(grid.cell_type_flat(cell), want);
                }
            }
        }
        assert!(enc.scalars.iter().all(|v| (0.0..=1.0).contains(v)));
        assert_eq!(enc.scalars[scalar::BANK], 1.0);
        assert_eq!(enc.scalars[scalar::DECK], 1.0);
    }

    #[test]
    fn dump_is_stable_and_parseable() {
        let g = game();
        let enc = encode_state(&g.observable(0), BrickGrid::standard());
        let text = enc.dump();
        assert_eq!(text, enc.dump());
        let scalar_lines = text.lines().filter(|l| l.split(',').count() == 2).count();
        assert_eq!(scalar_lines, NUM_SCALARS);
        let mut last = None;
        for line in text.lines().filter(|l| l.split(',').count() == 4) {
            let f: Vec<usize> = line
                .split(',')
                .take(3)
                .map(|x| x.parse().unwrap())
                .collect();
            let key = (f[0], f[1], f[2]);
            assert!(last.is_none_or(|l| l < key));
            last = Some(key);
        }
    }
}
