use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::board::{generate_board, BoardLayout, NUM_INTERSECTIONS, NUM_PATHS};
use super::types::{Building, BuildingKind, DevCard, Hand, HexId, Phase};

pub const BANK_PER_RESOURCE: u8 = 19;
pub const DEV_DECK_SIZE: usize = 25;
pub const ROADS_PER_PLAYER: u8 = 15;
pub const SETTLEMENTS_PER_PLAYER: u8 = 5;
pub const CITIES_PER_PLAYER: u8 = 4;
pub const VP_TO_WIN: u32 = 10;
pub const DEFAULT_TURN_CAP: u32 = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlayerState {
    pub resources: Hand,
    pub roads_left: u8,
    pub settlements_left: u8,
    pub cities_left: u8,
    /// Knights played.
    pub army: u8,
    /// Development cards bought this turn, indexed by [`DevCard::index`].
    pub dev_new: [u8; 5],
    /// Development cards held since an earlier turn.
    pub dev_old: [u8; 5],
    pub longest_road: bool,
    pub largest_army: bool,
}

impl PlayerState {
    fn new() -> Self {
        PlayerState {
            resources: Hand::EMPTY,
            roads_left: ROADS_PER_PLAYER,
            settlements_left: SETTLEMENTS_PER_PLAYER,
            cities_left: CITIES_PER_PLAYER,
            army: 0,
            dev_new: [0; 5],
            dev_old: [0; 5],
            longest_road: false,
            largest_army: false,
        }
    }

    pub fn settlements_on_board(&self) -> u32 {
        u32::from(SETTLEMENTS_PER_PLAYER - self.settlements_left)
    }

    pub fn cities_on_board(&self) -> u32 {
        u32::from(CITIES_PER_PLAYER - self.cities_left)
    }

    pub fn dev_total(&self) -> u32 {
        self.dev_new
            .iter()
            .chain(self.dev_old.iter())
            .map(|&c| u32::from(c))
            .sum()
    }

    pub fn dev_held(&self, card: DevCard) -> u8 {
        self.dev_new[card.index()] + self.dev_old[card.index()]
    }

    /// Victory points visible to everybody.
    pub fn public_vp(&self) -> u32 {
        self.settlements_on_board()
            + 2 * self.cities_on_board()
            + 2 * u32::from(self.longest_road)
            + 2 * u32::from(self.largest_army)
    }
}

/// Complete authoritative game situation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GameState {
    pub layout: BoardLayout,
    /// Road owner per path.
    #[serde(with = "serde_arrays::paths")]
    pub roads: [Option<u8>; NUM_PATHS],
    #[serde(with = "serde_arrays::intersections")]
    pub buildings: [Option<Building>; NUM_INTERSECTIONS],
    pub robber: HexId,
    pub players: [PlayerState; 2],
    pub bank: Hand,
    /// Remaining deck; cards are drawn from the end.
    pub dev_deck: Vec<DevCard>,
    pub phase: Phase,
    pub current_player: usize,
    /// Completed turns since the end of setup.
    pub turn: u32,
    pub turn_cap: u32,
    pub dev_played_this_turn: bool,
    pub has_rolled: bool,
    /// Settlement placed in the current setup step; its road must touch it.
    pub setup_anchor: Option<super::types::IntersectionId>,
}

/// Seat order of the four opening placements.
pub const SETUP_ORDER: [usize; 4] = [0, 1, 1, 0];

impl GameState {
    pub fn new<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::with_turn_cap(rng, DEFAULT_TURN_CAP)
    }

    pub fn with_turn_cap<R: Rng + ?Sized>(rng: &mut R, turn_cap: u32) -> Self {
        let layout = generate_board(rng);
        let mut dev_deck: Vec<DevCard> = DevCard::ALL
            .iter()
            .flat_map(|&c| std::iter::repeat_n(c, c.deck_count() as usize))
            .collect();
        dev_deck.shuffle(rng);
        GameState {
            robber: layout.desert(),
            layout,
            roads: [None; NUM_PATHS],
            buildings: [None; NUM_INTERSECTIONS],
            players: [PlayerState::new(), PlayerState::new()],
            bank: Hand([BANK_PER_RESOURCE; 5]),
            dev_deck,
            phase: Phase::Setup {
                step: 0,
                road: false,
            },
            current_player: 0,
            turn: 0,
            turn_cap,
            dev_played_this_turn: false,
            has_rolled: false,
            setup_anchor: None,
        }
    }

    /// Seat whose decision is pending: the discarding player during a
    /// discard, the current player otherwise.
    pub fn acting_player(&self) -> usize {
        match self.phase {
            Phase::Discard { player, .. } => player,
            _ => self.current_player,
        }
    }

    pub fn is_terminal(&self) -> bool {
        self.phase.is_terminal()
    }

    pub fn victory_points(&self, player: usize, include_hidden: bool) -> u32 {
        let p = &self.players[player];
        let hidden = if include_hidden {
            u32::from(p.dev_held(DevCard::VictoryPoint))
        } else {
            0
        };
        p.public_vp() + hidden
    }

    pub fn observable(&self, player: usize) -> Observation {
        let opp = &self.players[1 - player];
        Observation {
            perspective: player,
            layout: self.layout,
            roads: self.roads,
            buildings: self.buildings,
            robber: self.robber,
            own: self.players[player],
            opponent: OpponentSummary {
                resource_total: opp.resources.total(),
                dev_total: opp.dev_total(),
                roads_left: opp.roads_left,
                settlements_left: opp.settlements_left,
                cities_left: opp.cities_left,
                army: opp.army,
                longest_road: opp.longest_road,
                largest_army: opp.largest_army,
            },
            bank: self.bank,
            dev_deck_size: self.dev_deck.len() as u8,
            phase: self.phase,
            current_player: self.current_player,
            turn: self.turn,
            dev_played_this_turn: self.dev_played_this_turn,
            has_rolled: self.has_rolled,
            setup_anchor: self.setup_anchor,
        }
    }

    pub(crate) fn building_owner(&self, i: usize) -> Option<usize> {
        self.buildings[i].map(|b| b.owner)
    }

    pub(crate) fn building_kind_at(&self, i: usize, owner: usize) -> Option<BuildingKind> {
        self.buildings[i]
            .filter(|b| b.owner == owner)
            .map(|b| b.kind)
    }
}

/// Opponent information visible to the observing player.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OpponentSummary {
    pub resource_total: u32,
    pub dev_total: u32,
    pub roads_left: u8,
    pub settlements_left: u8,
    pub cities_left: u8,
    pub army: u8,
    pub longest_road: bool,
    pub largest_army: bool,
}

/// One player's view of the game. Opponent cards are reduced to totals
/// and the deck to its size.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Observation {
    pub perspective: usize,
    pub layout: BoardLayout,
    #[serde(with = "serde_arrays::paths")]
    pub roads: [Option<u8>; NUM_PATHS],
    #[serde(with = "serde_arrays::intersections")]
    pub buildings: [Option<Building>; NUM_INTERSECTIONS],
    pub robber: HexId,
    pub own: PlayerState,
    pub opponent: OpponentSummary,
    pub bank: Hand,
    pub dev_deck_size: u8,
    pub phase: Phase,
    pub current_player: usize,
    pub turn: u32,
    pub dev_played_this_turn: bool,
    pub has_rolled: bool,
    pub setup_anchor: Option<super::types::IntersectionId>,
}

/// serde only derives for arrays up to 32 elements.
mod serde_arrays {
    macro_rules! fixed_array {
        ($name:ident, $t:ty, $n:expr) => {
            pub mod $name {
                use serde::{Deserialize, Deserializer, Serialize, Serializer};

                pub fn serialize<S: Serializer>(v: &[$t; $n], s: S) -> Result<S::Ok, S::Error> {
                    v.as_slice().serialize(s)
                }

                pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[$t; $n], D::Error> {
                    let v = Vec::<$t>::deserialize(d)?;
                    let len = v.len();
                    v.try_into().map_err(|_| {
                        serde::de::Error::invalid_length(len, &concat!("an array of ", $n))
                    })
                }
            }
        };
    }

    fixed_array!(paths, Option<u8>, 72);
    fixed_array!(intersections, Option<crate::engine::types::Building>, 54);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::types::Hand;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn new_game_initial_state() {
        let g = GameState::new(&mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(g.bank.total(), 95);
        assert_eq!(g.dev_deck.len(), DEV_DECK_SIZE);
        for c in DevCard::ALL {
            assert_eq!(
                g.dev_deck.iter().filter(|&&d| d == c).count(),
                c.deck_count() as usize
            );
        }
        assert_eq!(g.current_player, 0);
        assert_eq!(g.turn, 0);
        assert_eq!(g.robber, g.layout.desert());
        assert_eq!(
            g.phase,
            Phase::Setup {
                step: 0,
                road: false
            }
        );
    }

    #[test]
    fn victory_point_arithmetic() {
        let mut g = GameState::new(&mut ChaCha8Rng::seed_from_u64(3));
        let p = &mut g.players[0];
        p.settlements_left = 3;
        assert_eq!(g.victory_points(0, false), 2);
        let p = &mut g.players[0];
        p.cities_left = 3;
        p.longest_road = true;
        assert_eq!(g.victory_points(0, false), 2 + 2 + 2);

        // public 9 plus one hidden VP card
        let p = &mut g.players[1];
        p.settlements_left = 2;
        p.cities_left = 1;
        assert_eq!(g.victory_points(1, false), 3 + 6);
        g.players[1].dev_old[DevCard::VictoryPoint.index()] = 1;
        assert_eq!(g.victory_points(1, false), 9);
        assert_eq!(g.victory_points(1, true), 10);
    }

    #[test]
    fn observation_hides_opponent_cards_and_deck_order() {
        let mut g = GameState::new(&mut ChaCha8Rng::seed_from_u64(11));
        g.players[1].resources = Hand::new(2, 0, 1, 0, 0);
        g.players[1].dev_old[DevCard::Monopoly.index()] = 1;
        let obs = g.observable(0);
        assert_eq!(obs.opponent.resource_total, 3);
        assert_eq!(obs.opponent.dev_total, 1);

        let mut shuffled = g.clone();
        shuffled.dev_deck.reverse();
        assert_ne!(shuffled.dev_deck, g.dev_deck);
        assert_eq!(shuffled.observable(0), obs);
        assert_eq!(shuffled.observable(1), g.observable(1));
    }
}
