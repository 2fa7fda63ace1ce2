use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

/// The five resource types, in the canonical order used by every
/// resource-indexed vector in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Resource {
    Brick,
    Lumber,
    Ore,
    Grain,
    Wool,
}

impl Resource {
    pub const ALL: [Resource; 5] = [
        Resource::Brick,
        Resource::Lumber,
        Resource::Ore,
        Resource::Grain,
        Resource::Wool,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Resource> {
        Self::ALL.get(i).copied()
    }
}

impl fmt::Display for Resource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A multiset of resource cards.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Hand(pub [u8; 5]);

impl Hand {
    pub const EMPTY: Hand = Hand([0; 5]);

    pub fn new(brick: u8, lumber: u8, ore: u8, grain: u8, wool: u8) -> Self {
        Hand([brick, lumber, ore, grain, wool])
    }

    pub fn total(&self) -> u32 {
        self.0.iter().map(|&c| u32::from(c)).sum()
    }

    /// True when `other` is a sub-multiset of `self`.
    pub fn contains(&self, other: &Hand) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a >= b)
    }

    pub fn add(&mut self, other: &Hand) {
        for (a, b) in self.0.iter_mut().zip(other.0.iter()) {
            *a += b;
        }
    }

    /// Panics on underflow; callers check `contains` first.
    pub fn remove(&mut self, other: &Hand) {
        for (a, b) in self.0.iter_mut().zip(other.0.iter()) {
            *a = a.checked_sub(*b).expect("hand underflow");
        }
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

impl Index<Resource> for Hand {
    type Output = u8;
    fn index(&self, r: Resource) -> &u8 {
        &self.0[r.index()]
    }
}

impl IndexMut<Resource> for Hand {
    fn index_mut(&mut self, r: Resource) -> &mut u8 {
        &mut self.0[r.index()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DevCard {
    Knight,
    RoadBuilding,
    YearOfPlenty,
    Monopoly,
    VictoryPoint,
}

impl DevCard {
    pub const ALL: [DevCard; 5] = [
        DevCard::Knight,
        DevCard::RoadBuilding,
        DevCard::YearOfPlenty,
        DevCard::Monopoly,
        DevCard::VictoryPoint,
    ];

    /// Number of copies in the 25-card deck.
    pub fn deck_count(self) -> u8 {
        match self {
            DevCard::Knight => 14,
            DevCard::RoadBuilding | DevCard::YearOfPlenty | DevCard::Monopoly => 2,
            DevCard::VictoryPoint => 5,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HexId(pub u8);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PathId(pub u8);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntersectionId(pub u8);

impl HexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl PathId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl IntersectionId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Kind of a harbor: 3:1 on anything, or 2:1 on one resource.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HarborKind {
    Generic,
    Special(Resource),
}

impl HarborKind {
    /// Channel order: generic first, then the five resources.
    pub const ALL: [HarborKind; 6] = [
        HarborKind::Generic,
        HarborKind::Special(Resource::Brick),
        HarborKind::Special(Resource::Lumber),
        HarborKind::Special(Resource::Ore),
        HarborKind::Special(Resource::Grain),
        HarborKind::Special(Resource::Wool),
    ];

    pub fn index(self) -> usize {
        match self {
            HarborKind::Generic => 0,
            HarborKind::Special(r) => 1 + r.index(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BuildingKind {
    Settlement,
    City,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Building {
    pub owner: usize,
    pub kind: BuildingKind,
}

/// Every move a player can make. Board-positional moves carry element ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    PlaceSettlement(IntersectionId),
    PlaceRoad(PathId),
    PlaceCity(IntersectionId),
    MoveRobberSteal(HexId),
    MoveRobberNoSteal(HexId),
    RollDice,
    EndTurn,
    /// Four cards to keep; counts per resource sum to exactly 4.
    DiscardKeep(Hand),
    BankTrade {
        give: Resource,
        receive: Resource,
    },
    BuyDevCard,
    PlayKnight,
    PlayRoadBuilding,
    PlayYearOfPlenty,
    ChooseFreeResource(Resource),
    PlayMonopoly(Resource),
}

impl Action {
    /// Variant name as used in transcripts.
    pub fn name(&self) -> &'static str {
        match self {
            Action::PlaceSettlement(_) => "PlaceSettlement",
            Action::PlaceRoad(_) => "PlaceRoad",
            Action::PlaceCity(_) => "PlaceCity",
            Action::MoveRobberSteal(_) => "MoveRobberSteal",
            Action::MoveRobberNoSteal(_) => "MoveRobberNoSteal",
            Action::RollDice => "RollDice",
            Action::EndTurn => "EndTurn",
            Action::DiscardKeep(_) => "DiscardKeep",
            Action::BankTrade { .. } => "BankTrade",
            Action::BuyDevCard => "BuyDevCard",
            Action::PlayKnight => "PlayKnight",
            Action::PlayRoadBuilding => "PlayRoadBuilding",
            Action::PlayYearOfPlenty => "PlayYearOfPlenty",
            Action::ChooseFreeResource(_) => "ChooseFreeResource",
            Action::PlayMonopoly(_) => "PlayMonopoly",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Winner(usize),
    Draw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    /// Opening placements; `step` 0..=3 follows the seat order A, B, B, A.
    Setup {
        step: u8,
        road: bool,
    },
    PreRoll,
    Main,
    /// `player` keeps `keep_count` = ceil(hand / 2) cards.
    Discard {
        player: usize,
        keep_count: u8,
    },
    MoveRobber,
    FreeRoads {
        remaining: u8,
    },
    FreeResources {
        remaining: u8,
    },
    Terminal(Outcome),
}

impl Phase {
    pub fn is_terminal(&self) -> bool {
        matches!(self, Phase::Terminal(_))
    }
}
