//! Bijection between actions and flat policy indices, plus legality masks.
//!
//! Five spatial channels over the brick grid come first, followed by the
//! scalar slots. An optional compatibility mode pads the scalar block to
//! 117 slots; padded slots never decode and are never legal.

use super::discard::{discard_keep_actions, keep_index, NUM_KEEP_ACTIONS};
use super::grid::{BrickGrid, Cell, CELLS};
use super::EncodingError;
use crate::engine::{Action, GameState, Resource};

pub const NUM_SPATIAL_CHANNELS: usize = 5;
pub const SPATIAL_SIZE: usize = NUM_SPATIAL_CHANNELS * CELLS;
pub const NUM_SCALAR_SLOTS: usize = 106;
pub const COMPAT_SCALAR_SLOTS: usize = 117;

pub mod spatial {
    pub const ROBBER_STEAL: usize = 0;
    pub const ROBBER_NO_STEAL: usize = 1;
    pub const ROAD: usize = 2;
    pub const SETTLEMENT: usize = 3;
    pub const CITY: usize = 4;
}

pub mod slot {
    pub const ROLL: usize = 0;
    pub const END_TURN: usize = 1;
    pub const DISCARD_KEEP: usize = 2;
    pub const BANK_TRADE: usize = 72;
    pub const BUY_DEV: usize = 92;
    pub const KNIGHT: usize = 93;
    pub const ROAD_BUILDING: usize = 94;
    pub const YEAR_OF_PLENTY: usize = 95;
    pub const CHOOSE_FREE: usize = 96;
    pub const MONOPOLY: usize = 101;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ActionLayout {
    pub scalar_slots: usize,
}

impl Default for ActionLayout {
    fn default() -> Self {
        ActionLayout::standard()
    }
}

impl ActionLayout {
    pub const fn standard() -> Self {
        ActionLayout {
            scalar_slots: NUM_SCALAR_SLOTS,
        }
    }

    pub const fn compat() -> Self {
        ActionLayout {
            scalar_slots: COMPAT_SCALAR_SLOTS,
        }
    }

    pub fn is_compat(&self) -> bool {
        self.scalar_slots == COMPAT_SCALAR_SLOTS
    }

    pub fn size(&self) -> usize {
        SPATIAL_SIZE + self.scalar_slots
    }

    pub fn encode(&self, action: &Action) -> usize {
        encode_with(BrickGrid::standard(), action)
    }

    pub fn decode(&self, index: usize) -> Result<Action, EncodingError> {
        if index >= self.size() {
            return Err(EncodingError::InvalidIndex(index));
        }
        decode_with(BrickGrid::standard(), index)
    }

    pub fn legal_mask(&self, state: &GameState) -> Mask {
        let mut mask = Mask::new(self.size());
        for a in state.legal_actions() {
            mask.set(self.encode(&a));
        }
        mask
    }
}

fn trade_slot(give: Resource, receive: Resource) -> usize {
    let (g, r) = (give.index(), receive.index());
    g * 4 + if r < g { r } else { r - 1 }
}

fn spatial_index(channel: usize, cell: Cell) -> usize {
    channel * CELLS + cell.flat()
}

pub fn encode_with(grid: &BrickGrid, action: &Action) -> usize {
    let s = |slot: usize| SPATIAL_SIZE + slot;
    match *action {
        Action::MoveRobberSteal(h) => spatial_index(spatial::ROBBER_STEAL, grid.hex_cell(h)),
        Action::MoveRobberNoSteal(h) => spatial_index(spatial::ROBBER_NO_STEAL, grid.hex_cell(h)),
        Action::PlaceRoad(p) => spatial_index(spatial::ROAD, grid.path_cell(p)),
        Action::PlaceSettlement(i) => spatial_index(spatial::SETTLEMENT, grid.intersection_cell(i)),
        Action::PlaceCity(i) => spatial_index(spatial::CITY, grid.intersection_cell(i)),
        Action::RollDice => s(slot::ROLL),
        Action::EndTurn => s(slot::END_TURN),
        Action::DiscardKeep(keep) => {
            s(slot::DISCARD_KEEP + keep_index(&keep).expect("keep multiset of size four"))
        }
        Action::BankTrade { give, receive } => s(slot::BANK_TRADE + trade_slot(give, receive)),
        Action::BuyDevCard => s(slot::BUY_DEV),
        Action::PlayKnight => s(slot::KNIGHT),
        Action::PlayRoadBuilding => s(slot::ROAD_BUILDING),
        Action::PlayYearOfPlenty => s(slot::YEAR_OF_PLENTY),
        Action::ChooseFreeResource(r) => s(slot::CHOOSE_FREE + r.index()),
        Action::PlayMonopoly(r) => s(slot::MONOPOLY + r.index()),
    }
}

pub fn decode_with(grid: &BrickGrid, index: usize) -> Result<Action, EncodingError> {
    let invalid = Err(EncodingError::InvalidIndex(index));
    if index < SPATIAL_SIZE {
        let cell = Cell::from_flat(index % CELLS);
        let a = match index / CELLS {
            spatial::ROBBER_STEAL => grid.hex_at(cell).map(Action::MoveRobberSteal),
            spatial::ROBBER_NO_STEAL => grid.hex_at(cell).map(Action::MoveRobberNoSteal),
            spatial::ROAD => grid.path_at(cell).map(Action::PlaceRoad),
            spatial::SETTLEMENT => grid.intersection_at(cell).map(Action::PlaceSettlement),
            _ => grid.intersection_at(cell).map(Action::PlaceCity),
        };
        return a.ok_or(EncodingError::InvalidIndex(index));
    }
    let slot = index - SPATIAL_SIZE;
    let res = |i: usize| Resource::from_index(i).expect("resource index below five");
    Ok(match slot {
        slot::ROLL => Action::RollDice,
        slot::END_TURN => Action::EndTurn,
        s if s < slot::BANK_TRADE => {
            Action::DiscardKeep(discard_keep_actions()[s - slot::DISCARD_KEEP])
        }
        s if s < slot::BUY_DEV => {
            let t = s - slot::BANK_TRADE;
            let (g, r) = (t / 4, t % 4);
            let r = if r < g { r } else { r + 1 };
            Action::BankTrade {
                give: res(g),
                receive: res(r),
            }
        }
        slot::BUY_DEV => Action::BuyDevCard,
        slot::KNIGHT => Action::PlayKnight,
        slot::ROAD_BUILDING => Action::PlayRoadBuilding,
        slot::YEAR_OF_PLENTY => Action::PlayYearOfPlenty,
        s if s < slot::MONOPOLY => Action::ChooseFreeResource(res(s - slot::CHOOSE_FREE)),
        s if s < NUM_SCALAR_SLOTS => Action::PlayMonopoly(res(s - slot::MONOPOLY)),
        _ => return invalid,
    })
}

const _: () = assert!(slot::BANK_TRADE - slot::DISCARD_KEEP == NUM_KEEP_ACTIONS);

/// Legality bits over the flat action space.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mask {
    bits: Vec<u64>,
    len: usize,
}

impl Mask {
    pub fn new(len: usize) -> Self {
        Mask {
            bits: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn set(&mut self, i: usize) {
        assert!(i < self.len, "mask index {i} out of range");
        self.bits[i / 64] |= 1 << (i % 64);
    }

    pub fn get(&self, i: usize) -> bool {
        i < self.len && self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter_set(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }

    pub fn words(&self) -> &[u64] {
        &self.bits
    }
}

pub fn legal_mask(state: &GameState) -> Mask {
    ActionLayout::standard().legal_mask(state)
}
