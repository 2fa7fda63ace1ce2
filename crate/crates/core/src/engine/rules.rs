//! Legal-action generation and state transitions.
//!
//! `is_legal` is the single legality predicate; `legal_actions` enumerates
//! candidates per phase and filters them through it, so the two can never
//! disagree.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::board::{Topology, NUM_HEXES, NUM_INTERSECTIONS, NUM_PATHS};
use super::road::longest_road;
use super::state::{GameState, SETUP_ORDER, VP_TO_WIN};
use super::types::{
    Action, Building, BuildingKind, DevCard, Hand, HarborKind, HexId, IntersectionId, Outcome,
    PathId, Phase, Resource,
};
use crate::encoding::discard::{discard_keep_actions, resolve_discard};

pub const ROAD_COST: Hand = Hand([1, 1, 0, 0, 0]);
pub const SETTLEMENT_COST: Hand = Hand([1, 1, 0, 1, 1]);
pub const CITY_COST: Hand = Hand([0, 0, 3, 2, 0]);
pub const DEV_CARD_COST: Hand = Hand([0, 0, 1, 1, 1]);

pub const DISCARD_THRESHOLD: u32 = 7;
pub const LONGEST_ROAD_MIN: u32 = 5;
pub const LARGEST_ARMY_MIN: u8 = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("illegal action {action:?} in phase {phase:?}")]
    IllegalAction { action: Action, phase: Phase },
}

/// What happened when an action was applied, as needed to replay or
/// narrate a game.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionRecord {
    pub action: Action,
    pub player: usize,
    pub turn: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dice: Option<(u8, u8)>,
    /// Resources received per player from production or setup.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub produced: Option<[Hand; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stolen: Option<Resource>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discarded: Option<Hand>,
    /// Card drawn by `BuyDevCard`; only the buyer sees it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drawn: Option<DevCard>,
    pub phase_before: Phase,
    pub phase_after: Phase,
}

impl GameState {
    /// Every action the acting player may take.
    pub fn legal_actions(&self) -> Vec<Action> {
        let mut out = Vec::new();
        self.for_each_candidate(|a| {
            if self.is_legal(&a) {
                out.push(a);
            }
        });
        out
    }

    fn for_each_candidate(&self, mut f: impl FnMut(Action)) {
        match self.phase {
            Phase::Setup { road: false, .. } => (0..NUM_INTERSECTIONS)
                .for_each(|i| f(Action::PlaceSettlement(IntersectionId(i as u8)))),
            Phase::Setup { road: true, .. } | Phase::FreeRoads { .. } => {
                (0..NUM_PATHS).for_each(|p| f(Action::PlaceRoad(PathId(p as u8))))
            }
            Phase::PreRoll => {
                f(Action::RollDice);
                self.dev_play_candidates(&mut f);
            }
            Phase::Main => {
                f(Action::EndTurn);
                for p in 0..NUM_PATHS {
                    f(Action::PlaceRoad(PathId(p as u8)));
                }
                for i in 0..NUM_INTERSECTIONS {
                    f(Action::PlaceSettlement(IntersectionId(i as u8)));
                    f(Action::PlaceCity(IntersectionId(i as u8)));
                }
                for give in Resource::ALL {
                    for receive in Resource::ALL {
                        if give != receive {
                            f(Action::BankTrade { give, receive });
                        }
                    }
                }
                f(Action::BuyDevCard);
                self.dev_play_candidates(&mut f);
            }
            Phase::Discard { .. } => {
                for keep in discard_keep_actions() {
                    f(Action::DiscardKeep(*keep));
                }
            }
            Phase::MoveRobber => {
                for h in 0..NUM_HEXES {
                    f(Action::MoveRobberSteal(HexId(h as u8)));
                    f(Action::MoveRobberNoSteal(HexId(h as u8)));
                }
            }
            Phase::FreeResources { .. } => Resource::ALL
                .iter()
                .for_each(|&r| f(Action::ChooseFreeResource(r))),
            Phase::Terminal(_) => {}
        }
    }

    fn dev_play_candidates(&self, f: &mut impl FnMut(Action)) {
        f(Action::PlayKnight);
        f(Action::PlayRoadBuilding);
        f(Action::PlayYearOfPlenty);
        for r in Resource::ALL {
            f(Action::PlayMonopoly(r));
        }
    }

    pub fn is_legal(&self, action: &Action) -> bool {
        if !ids_in_range(action) {
            return false;
        }
        let me = self.current_player;
        let player = &self.players[me];
        match (self.phase, *action) {
            (Phase::Setup { road: false, .. }, Action::PlaceSettlement(i)) => {
                self.intersection_free_with_distance(i.index())
            }
            (Phase::Setup { road: true, .. }, Action::PlaceRoad(p)) => {
                let anchor = self.setup_anchor.expect("setup road follows a settlement");
                self.roads[p.index()].is_none()
                    && Topology::standard().path_intersections[p.index()].contains(&anchor)
            }
            (Phase::PreRoll, Action::RollDice) => true,
            (Phase::Main, Action::EndTurn) => true,
            (Phase::Main, Action::PlaceRoad(p)) => {
                player.roads_left > 0
                    && player.resources.contains(&ROAD_COST)
                    && self.road_connects(p.index(), me)
            }
            (Phase::FreeRoads { .. }, Action::PlaceRoad(p)) => {
                player.roads_left > 0 && self.road_connects(p.index(), me)
            }
            (Phase::Main, Action::PlaceSettlement(i)) => {
                player.settlements_left > 0
                    && player.resources.contains(&SETTLEMENT_COST)
                    && self.intersection_free_with_distance(i.index())
                    && self.touches_own_road(i.index(), me)
            }
            (Phase::Main, Action::PlaceCity(i)) => {
                player.cities_left > 0
                    && player.resources.contains(&CITY_COST)
                    && self.building_kind_at(i.index(), me) == Some(BuildingKind::Settlement)
            }
            (Phase::Main, Action::BankTrade { give, receive }) => {
                give != receive
                    && u32::from(player.resources[give]) >= self.trade_rate(me, give)
                    && self.bank[receive] >= 1
            }
            (Phase::Main, Action::BuyDevCard) => {
                !self.dev_deck.is_empty() && player.resources.contains(&DEV_CARD_COST)
            }
            (Phase::PreRoll | Phase::Main, Action::PlayKnight) => self.can_play(DevCard::Knight),
            (Phase::PreRoll | Phase::Main, Action::PlayRoadBuilding) => {
                self.can_play(DevCard::RoadBuilding)
                    && player.roads_left > 0
                    && (0..NUM_PATHS).any(|p| self.road_connects(p, me))
            }
            (Phase::PreRoll | Phase::Main, Action::PlayYearOfPlenty) => {
                self.can_play(DevCard::YearOfPlenty) && self.bank.total() >= 1
            }
            (Phase::PreRoll | Phase::Main, Action::PlayMonopoly(_)) => {
                self.can_play(DevCard::Monopoly)
            }
            (Phase::Discard { player, keep_count }, Action::DiscardKeep(keep)) => {
                keep_count >= 4
                    && keep.total() == 4
                    && self.players[player].resources.contains(&keep)
            }
            (Phase::MoveRobber, Action::MoveRobberSteal(h)) => {
                h != self.robber && self.can_steal_at(h)
            }
            (Phase::MoveRobber, Action::MoveRobberNoSteal(h)) => {
                h != self.robber && !self.can_steal_at(h)
            }
            (Phase::FreeResources { .. }, Action::ChooseFreeResource(r)) => self.bank[r] >= 1,
            _ => false,
        }
    }

    fn can_play(&self, card: DevCard) -> bool {
        !self.dev_played_this_turn && self.players[self.current_player].dev_old[card.index()] > 0
    }

    /// Stealing is possible iff the opponent has a building on the hex and
    /// at least one card.
    fn can_steal_at(&self, h: HexId) -> bool {
        let opp = 1 - self.current_player;
        self.players[opp].resources.total() > 0
            && Topology::standard().hex_intersections[h.index()]
                .iter()
                .any(|i| self.building_owner(i.index()) == Some(opp))
    }

    fn intersection_free_with_distance(&self, i: usize) -> bool {
        i < NUM_INTERSECTIONS
            && self.buildings[i].is_none()
            && Topology::standard().intersection_neighbors[i]
                .iter()
                .all(|n| self.buildings[n.index()].is_none())
    }

    fn touches_own_road(&self, i: usize, me: usize) -> bool {
        Topology::standard().intersection_paths[i]
            .iter()
            .any(|p| self.roads[p.index()] == Some(me as u8))
    }

    /// An empty path that extends `me`'s network: one end holds an own
    /// building, or an own road not cut by an opponent building.
    fn road_connects(&self, p: usize, me: usize) -> bool {
        if p >= NUM_PATHS || self.roads[p].is_some() {
            return false;
        }
        let topo = Topology::standard();
        topo.path_intersections[p].iter().any(|&end| {
            let e = end.index();
            match self.building_owner(e) {
                Some(o) if o == me => true,
                Some(_) => false,
                None => topo.intersection_paths[e]
                    .iter()
                    .any(|q| q.index() != p && self.roads[q.index()] == Some(me as u8)),
            }
        })
    }

    /// Best bank rate for giving away `give`.
    pub fn trade_rate(&self, player: usize, give: Resource) -> u32 {
        let topo = Topology::standard();
        let mut rate = 4;
        for (slot, p) in topo.harbor_paths.iter().enumerate() {
            let owned = topo.path_intersections[p.index()]
                .iter()
                .any(|i| self.building_owner(i.index()) == Some(player));
            if !owned {
                continue;
            }
            match self.layout.harbor_kind[slot] {
                HarborKind::Special(r) if r == give => return 2,
                HarborKind::Generic => rate = 3,
                HarborKind::Special(_) => {}
            }
        }
        rate
    }

    /// Applies `action` in place. On error the state is untouched.
    pub fn apply_mut<R: Rng + ?Sized>(
        &mut self,
        action: Action,
        rng: &mut R,
    ) -> Result<TransitionRecord, EngineError> {
        if !self.is_legal(&action) {
            return Err(EngineError::IllegalAction {
                action,
                phase: self.phase,
            });
        }
        let mut record = TransitionRecord {
            action,
            player: self.acting_player(),
            turn: self.turn,
            dice: None,
            produced: None,
            stolen: None,
            discarded: None,
            drawn: None,
            phase_before: self.phase,
            phase_after: self.phase,
        };
        let me = self.current_player;
        let opp = 1 - me;

        match action {
            Action::PlaceSettlement(i) => {
                if let Phase::Setup { step, .. } = self.phase {
                    self.put_building(i, me, BuildingKind::Settlement);
                    self.setup_anchor = Some(i);
                    if step >= 2 {
                        record.produced = Some(self.setup_income(i, me));
                    }
                    self.phase = Phase::Setup { step, road: true };
                } else {
                    self.pay(me, &SETTLEMENT_COST);
                    self.put_building(i, me, BuildingKind::Settlement);
                    self.update_longest_road();
                }
            }
            Action::PlaceRoad(p) => {
                self.roads[p.index()] = Some(me as u8);
                self.players[me].roads_left -= 1;
                match self.phase {
                    Phase::Setup { step, .. } => {
                        self.setup_anchor = None;
                        if (step as usize) + 1 < SETUP_ORDER.len() {
                            self.phase = Phase::Setup {
                                step: step + 1,
                                road: false,
                            };
                            self.current_player = SETUP_ORDER[step as usize + 1];
                        } else {
                            self.phase = Phase::PreRoll;
                            self.current_player = 0;
                        }
                    }
                    Phase::FreeRoads { remaining } => {
                        self.update_longest_road();
                        let remaining = remaining - 1;
                        let more = remaining > 0
                            && self.players[me].roads_left > 0
                            && (0..NUM_PATHS).any(|q| self.road_connects(q, me));
                        self.phase = if more {
                            Phase::FreeRoads { remaining }
                        } else {
                            self.resume_phase()
                        };
                    }
                    _ => {
                        self.pay(me, &ROAD_COST);
                        self.update_longest_road();
                    }
                }
            }
            Action::PlaceCity(i) => {
                self.pay(me, &CITY_COST);
                self.buildings[i.index()] = Some(Building {
                    owner: me,
                    kind: BuildingKind::City,
                });
                self.players[me].settlements_left += 1;
                self.players[me].cities_left -= 1;
            }
            Action::RollDice => {
                let d1 = rng.gen_range(1..=6u8);
                let d2 = rng.gen_range(1..=6u8);
                record.dice = Some((d1, d2));
                self.has_rolled = true;
                let sum = d1 + d2;
                if sum == 7 {
                    self.phase = self.after_seven_discard(None);
                } else {
                    record.produced = Some(self.produce(sum));
                    self.phase = Phase::Main;
                }
            }
            Action::DiscardKeep(keep) => {
                let Phase::Discard { player, keep_count } = self.phase else {
                    unreachable!("legality checked");
                };
                let hand = self.players[player].resources;
                let discarded = resolve_discard(&hand, &keep, keep_count, rng)
                    .expect("legality guarantees keep is in hand");
                self.players[player].resources.remove(&discarded);
                self.bank.add(&discarded);
                record.discarded = Some(discarded);
                self.phase = self.after_seven_discard(Some(player));
            }
            Action::MoveRobberSteal(h) => {
                self.robber = h;
                let victim = &mut self.players[opp].resources;
                let mut pick = rng.gen_range(0..victim.total());
                let stolen = Resource::ALL
                    .into_iter()
                    .find(|&r| {
                        let c = u32::from(victim[r]);
                        if pick < c {
                            true
                        } else {
                            pick -= c;
                            false
                        }
                    })
                    .expect("victim has a card");
                victim[stolen] -= 1;
                self.players[me].resources[stolen] += 1;
                record.stolen = Some(stolen);
                self.phase = self.resume_phase();
            }
            Action::MoveRobberNoSteal(h) => {
                self.robber = h;
                self.phase = self.resume_phase();
            }
            Action::EndTurn => {
                let p = &mut self.players[me];
                for k in 0..5 {
                    p.dev_old[k] += p.dev_new[k];
                    p.dev_new[k] = 0;
                }
                self.dev_played_this_turn = false;
                self.has_rolled = false;
                self.current_player = opp;
                self.turn += 1;
                self.phase = if self.turn >= self.turn_cap {
                    Phase::Terminal(Outcome::Draw)
                } else {
                    Phase::PreRoll
                };
            }
            Action::BankTrade { give, receive } => {
                let rate = self.trade_rate(me, give) as u8;
                self.players[me].resources[give] -= rate;
                self.bank[give] += rate;
                self.bank[receive] -= 1;
                self.players[me].resources[receive] += 1;
            }
            Action::BuyDevCard => {
                self.pay(me, &DEV_CARD_COST);
                let card = self.dev_deck.pop().expect("deck checked non-empty");
                self.players[me].dev_new[card.index()] += 1;
                record.drawn = Some(card);
            }
            Action::PlayKnight => {
                self.consume_dev(DevCard::Knight);
                self.players[me].army += 1;
                self.update_largest_army();
                self.phase = Phase::MoveRobber;
            }
            Action::PlayRoadBuilding => {
                self.consume_dev(DevCard::RoadBuilding);
                self.phase = Phase::FreeRoads {
                    remaining: self.players[me].roads_left.min(2),
                };
            }
            Action::PlayYearOfPlenty => {
                self.consume_dev(DevCard::YearOfPlenty);
                self.phase = Phase::FreeResources { remaining: 2 };
            }
            Action::ChooseFreeResource(r) => {
                let Phase::FreeResources { remaining } = self.phase else {
                    unreachable!("legality checked");
                };
                self.bank[r] -= 1;
                self.players[me].resources[r] += 1;
                let remaining = remaining - 1;
                self.phase = if remaining > 0 && self.bank.total() > 0 {
                    Phase::FreeResources { remaining }
                } else {
                    self.resume_phase()
                };
            }
            Action::PlayMonopoly(r) => {
                self.consume_dev(DevCard::Monopoly);
                let taken = self.players[opp].resources[r];
                self.players[opp].resources[r] = 0;
                self.players[me].resources[r] += taken;
            }
        }

        if !matches!(self.phase, Phase::Setup { .. } | Phase::Terminal(_))
            && self.victory_points(me, true) >= VP_TO_WIN
        {
            self.phase = Phase::Terminal(Outcome::Winner(me));
        }
        record.phase_after = self.phase;
        Ok(record)
    }

    /// Functional form of [`GameState::apply_mut`].
    pub fn apply<R: Rng + ?Sized>(
        &self,
        action: Action,
        rng: &mut R,
    ) -> Result<(GameState, TransitionRecord), EngineError> {
        let mut next = self.clone();
        let record = next.apply_mut(action, rng)?;
        Ok((next, record))
    }

    fn pay(&mut self, player: usize, cost: &Hand) {
        self.players[player].resources.remove(cost);
        self.bank.add(cost);
    }

    fn consume_dev(&mut self, card: DevCard) {
        self.players[self.current_player].dev_old[card.index()] -= 1;
        self.dev_played_this_turn = true;
    }

    fn put_building(&mut self, i: IntersectionId, owner: usize, kind: BuildingKind) {
        self.buildings[i.index()] = Some(Building { owner, kind });
        self.players[owner].settlements_left -= 1;
    }

    /// Phase to return to after a robber move or a card effect.
    fn resume_phase(&self) -> Phase {
        if self.has_rolled {
            Phase::Main
        } else {
            Phase::PreRoll
        }
    }

    /// Next step of a rolled 7. `done` is the player who just discarded.
    fn after_seven_discard(&self, done: Option<usize>) -> Phase {
        let me = self.current_player;
        let queue: &[usize] = match done {
            None => &[me, 1 - me],
            Some(p) if p == me => &[1 - me],
            Some(_) => &[],
        };
        for &p in queue {
            let h = self.players[p].resources.total();
            if h >= DISCARD_THRESHOLD {
                return Phase::Discard {
                    player: p,
                    keep_count: h.div_ceil(2) as u8,
                };
            }
        }
        Phase::MoveRobber
    }

    fn setup_income(&mut self, i: IntersectionId, player: usize) -> [Hand; 2] {
        let mut produced = [Hand::EMPTY; 2];
        for h in &Topology::standard().intersection_hexes[i.index()] {
            if let Some(r) = self.layout.hex_kind[h.index()] {
                if self.bank[r] > 0 {
                    self.bank[r] -= 1;
                    self.players[player].resources[r] += 1;
                    produced[player][r] += 1;
                }
            }
        }
        produced
    }

    /// Pays out a non-7 roll, applying the bank-shortage rule per resource.
    fn produce(&mut self, roll: u8) -> [Hand; 2] {
        let topo = Topology::standard();
        let mut claims = [Hand::EMPTY; 2];
        for h in 0..NUM_HEXES {
            if self.layout.number_token[h] != roll || self.robber.index() == h {
                continue;
            }
            let Some(r) = self.layout.hex_kind[h] else {
                continue;
            };
            for i in topo.hex_intersections[h] {
                if let Some(b) = self.buildings[i.index()] {
                    claims[b.owner][r] += match b.kind {
                        BuildingKind::Settlement => 1,
                        BuildingKind::City => 2,
                    };
                }
            }
        }
        let mut paid = [Hand::EMPTY; 2];
        for r in Resource::ALL {
            let want = [claims[0][r], claims[1][r]];
            let stock = self.bank[r];
            if u32::from(want[0]) + u32::from(want[1]) <= u32::from(stock) {
                paid[0][r] = want[0];
                paid[1][r] = want[1];
            } else if want[0] == 0 || want[1] == 0 {
                let p = if want[0] > 0 { 0 } else { 1 };
                paid[p][r] = stock;
            }
        }
        for p in 0..2 {
            self.bank.remove(&paid[p]);
            self.players[p].resources.add(&paid[p]);
        }
        paid
    }

    fn update_longest_road(&mut self) {
        let len = [longest_road(self, 0), longest_road(self, 1)];
        let holder = (0..2).find(|&p| self.players[p].longest_road);
        let new_holder = match holder {
            Some(h) if len[h] >= LONGEST_ROAD_MIN && len[h] >= len[1 - h] => Some(h),
            Some(h) => {
                let o = 1 - h;
                if len[o] >= LONGEST_ROAD_MIN && len[o] > len[h] {
                    Some(o)
                } else if len[h] >= LONGEST_ROAD_MIN {
                    Some(h)
                } else {
                    None
                }
            }
            None => {
                if len[0] >= LONGEST_ROAD_MIN && len[0] > len[1] {
                    Some(0)
                } else if len[1] >= LONGEST_ROAD_MIN && len[1] > len[0] {
                    Some(1)
                } else {
                    None
                }
            }
        };
        for p in 0..2 {
            self.players[p].longest_road = new_holder == Some(p);
        }
    }

    fn update_largest_army(&mut self) {
        let me = self.current_player;
        let other = 1 - me;
        if self.players[me].largest_army {
            return;
        }
        let mine = self.players[me].army;
        if mine >= LARGEST_ARMY_MIN && mine > self.players[other].army {
            self.players[me].largest_army = true;
            self.players[other].largest_army = false;
        }
    }
}

fn ids_in_range(action: &Action) -> bool {
    match *action {
        Action::PlaceSettlement(i) | Action::PlaceCity(i) => i.index() < NUM_INTERSECTIONS,
        Action::PlaceRoad(p) => p.index() < NUM_PATHS,
        Action::MoveRobberSteal(h) | Action::MoveRobberNoSteal(h) => h.index() < NUM_HEXES,
        _ => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::types::Building;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    /// Plays the four setup placements by taking the first legal action.
    fn after_setup(seed: u64) -> GameState {
        let mut r = rng(seed);
        let mut g = GameState::new(&mut r);
        while matches!(g.phase, Phase::Setup { .. }) {
            let a = g.legal_actions()[0];
            g.apply_mut(a, &mut r).unwrap();
        }
        g
    }

    #[test]
    fn fresh_game_offers_all_54_settlements() {
        let g = GameState::new(&mut rng(1));
        let legal = g.legal_actions();
        assert_eq!(legal.len(), 54);
        assert!(legal
            .iter()
            .all(|a| matches!(a, Action::PlaceSettlement(_))));
    }

    #[test]
    fn setup_follows_snake_order_and_pays_second_settlement() {
        let mut r = rng(2);
        let mut g = GameState::new(&mut r);
        let mut seats = Vec::new();
        let mut second_income = Hand::EMPTY;
        while let Phase::Setup { step, road } = g.phase {
            if !road {
                seats.push(g.current_player);
            }
            let a = g.legal_actions()[0];
            let rec = g.apply_mut(a, &mut r).unwrap();
            if step >= 2 && !road {
                second_income.add(&rec.produced.unwrap()[g.current_player]);
            }
        }
        assert_eq!(seats, vec![0, 1, 1, 0]);
        assert_eq!(g.phase, Phase::PreRoll);
        assert_eq!(g.current_player, 0);
        let held = g.players[0].resources.total() + g.players[1].resources.total();
        assert_eq!(held, second_income.total());
        assert_eq!(g.bank.total() + held, 95);
    }

    #[test]
    fn preroll_without_cards_only_rolls() {
        let g = after_setup(4);
        assert_eq!(g.legal_actions(), vec![Action::RollDice]);
    }

    #[test]
    fn main_with_nothing_only_ends_turn() {
        let mut g = after_setup(4);
        g.phase = Phase::Main;
        g.has_rolled = true;
        for p in 0..2 {
            g.bank.add(&g.players[p].resources.clone());
            g.players[p].resources = Hand::EMPTY;
        }
        assert_eq!(g.legal_actions(), vec![Action::EndTurn]);
    }

    #[test]
    fn production_pays_settlements_and_cities() {
        let mut g = after_setup(5);
        // Find a wool hex with token 5 equivalent: pick any producing hex,
        // force its token and kind, and place a lone settlement on it.
        let topo = Topology::standard();
        let h = (0..NUM_HEXES)
            .find(|&h| g.layout.hex_kind[h].is_some() && HexId(h as u8) != g.robber)
            .unwrap();
        for other in 0..NUM_HEXES {
            if g.layout.number_token[other] == 5 {
                g.layout.number_token[other] = 9;
            }
        }
        g.layout.hex_kind[h] = Some(Resource::Wool);
        g.layout.number_token[h] = 5;
        g.buildings = [None; NUM_INTERSECTIONS];
        let corner = topo.hex_intersections[h][0].index();
        g.buildings[corner] = Some(Building {
            owner: 0,
            kind: BuildingKind::Settlement,
        });
        let before = g.players[0].resources;
        let paid = g.produce(5);
        assert_eq!(
            g.players[0].resources[Resource::Wool],
            before[Resource::Wool] + 1
        );
        assert_eq!(paid[0], Hand::new(0, 0, 0, 0, 1));

        g.buildings[corner] = Some(Building {
            owner: 0,
            kind: BuildingKind::City,
        });
        let paid = g.produce(5);
        assert_eq!(paid[0], Hand::new(0, 0, 0, 0, 2));

        // Robber blocks it.
        g.robber = HexId(h as u8);
        assert_eq!(g.produce(5), [Hand::EMPTY; 2]);
    }

    #[test]
    fn shortage_rule() {
        let mut g = after_setup(6);
        let topo = Topology::standard();
        let h = (0..NUM_HEXES)
            .find(|&h| g.layout.hex_kind[h].is_some() && HexId(h as u8) != g.robber)
            .unwrap();
        for other in 0..NUM_HEXES {
            if g.layout.number_token[other] == 6 {
                g.layout.number_token[other] = 9;
            }
        }
        g.layout.hex_kind[h] = Some(Resource::Ore);
        g.layout.number_token[h] = 6;
        g.buildings = [None; NUM_INTERSECTIONS];
        let [a, _, c, ..] = topo.hex_intersections[h];
        g.buildings[a.index()] = Some(Building {
            owner: 0,
            kind: BuildingKind::City,
        });
        // Conservation is irrelevant here; shrink the bank directly.
        g.bank[Resource::Ore] = 1;
        // One claimant takes the remainder.
        assert_eq!(g.produce(6)[0][Resource::Ore], 1);
        g.bank[Resource::Ore] = 1;
        g.buildings[c.index()] = Some(Building {
            owner: 1,
            kind: BuildingKind::Settlement,
        });
        // Two claimants, not enough for both: nobody.
        assert_eq!(g.produce(6), [Hand::EMPTY; 2]);
        g.bank[Resource::Ore] = 3;
        assert_eq!(g.produce(6)[1][Resource::Ore], 1);
    }

    #[test]
    fn seven_with_big_hand_enters_discard() {
        let mut g = after_setup(7);
        g.players[0].resources = Hand::new(2, 2, 2, 1, 1);
        g.players[1].resources = Hand::new(1, 1, 1, 0, 0);
        g.has_rolled = true;
        assert_eq!(
            g.after_seven_discard(None),
            Phase::Discard {
                player: 0,
                keep_count: 4
            }
        );
        g.players[1].resources = Hand::new(3, 2, 2, 0, 0);
        assert_eq!(
            g.after_seven_discard(Some(0)),
            Phase::Discard {
                player: 1,
                keep_count: 4
            }
        );
        assert_eq!(g.after_seven_discard(Some(1)), Phase::MoveRobber);
    }

    #[test]
    fn discard_keeps_chosen_cards() {
        let mut r = rng(8);
        let mut g = after_setup(8);
        g.bank.add(&g.players[0].resources.clone());
        g.players[0].resources = Hand::EMPTY;
        let hand = Hand::new(3, 0, 0, 0, 5);
        g.bank.remove(&hand);
        g.players[0].resources = hand;
        g.has_rolled = true;
        g.phase = Phase::Discard {
            player: 0,
            keep_count: 4,
        };
        let legal = g.legal_actions();
        assert!(legal.contains(&Action::DiscardKeep(Hand::new(3, 0, 0, 0, 1))));
        assert!(!legal.contains(&Action::DiscardKeep(Hand::new(4, 0, 0, 0, 0))));
        let rec = g
            .apply_mut(Action::DiscardKeep(Hand::new(3, 0, 0, 0, 1)), &mut r)
            .unwrap();
        assert_eq!(g.players[0].resources, Hand::new(3, 0, 0, 0, 1));
        assert_eq!(rec.discarded, Some(Hand::new(0, 0, 0, 0, 4)));
    }

    #[test]
    fn monopoly_takes_all_of_one_type() {
        let mut r = rng(9);
        let mut g = after_setup(9);
        for p in 0..2 {
            g.bank.add(&g.players[p].resources.clone());
            g.players[p].resources = Hand::EMPTY;
        }
        g.players[1].resources = Hand::new(0, 1, 0, 3, 0);
        g.bank.remove(&Hand::new(0, 1, 0, 3, 0));
        g.players[0].dev_old[DevCard::Monopoly.index()] = 1;
        g.apply_mut(Action::PlayMonopoly(Resource::Grain), &mut r)
            .unwrap();
        assert_eq!(g.players[0].resources[Resource::Grain], 3);
        assert_eq!(g.players[1].resources[Resource::Grain], 0);
        assert_eq!(g.players[1].resources[Resource::Lumber], 1);
        // One card per turn.
        g.players[0].dev_old[DevCard::Knight.index()] = 1;
        assert!(!g.is_legal(&Action::PlayKnight));
    }

    #[test]
    fn new_dev_cards_wait_until_turn_end() {
        let mut r = rng(10);
        let mut g = after_setup(10);
        g.phase = Phase::Main;
        g.has_rolled = true;
        g.bank.remove(&DEV_CARD_COST);
        g.players[0].resources.add(&DEV_CARD_COST);
        let top = *g.dev_deck.last().unwrap();
        g.apply_mut(Action::BuyDevCard, &mut r).unwrap();
        assert_eq!(g.players[0].dev_new[top.index()], 1);
        if top == DevCard::Knight {
            assert!(!g.is_legal(&Action::PlayKnight));
        }
        g.apply_mut(Action::EndTurn, &mut r).unwrap();
        assert_eq!(g.players[0].dev_old[top.index()], 1);
        assert_eq!(g.players[0].dev_new, [0; 5]);
    }

    #[test]
    fn robber_partition_and_displacement() {
        let mut g = after_setup(11);
        g.phase = Phase::MoveRobber;
        g.has_rolled = true;
        let legal = g.legal_actions();
        assert_eq!(legal.len(), NUM_HEXES - 1);
        for a in &legal {
            match a {
                Action::MoveRobberSteal(h) | Action::MoveRobberNoSteal(h) => {
                    assert_ne!(*h, g.robber)
                }
                _ => panic!("unexpected {a:?}"),
            }
        }
        // Empty opponent hand: never a steal.
        g.bank.add(&g.players[1].resources.clone());
        g.players[1].resources = Hand::EMPTY;
        assert!(g
            .legal_actions()
            .iter()
            .all(|a| matches!(a, Action::MoveRobberNoSteal(_))));
    }

    #[test]
    fn illegal_action_leaves_state_untouched() {
        let mut r = rng(12);
        let mut g = GameState::new(&mut r);
        let before = g.clone();
        let err = g.apply_mut(Action::EndTurn, &mut r).unwrap_err();
        assert!(matches!(err, EngineError::IllegalAction { .. }));
        assert_eq!(g, before);
    }

    #[test]
    fn turn_cap_draws() {
        let mut r = rng(13);
        let mut g = after_setup(13);
        g.turn_cap = 1;
        g.phase = Phase::Main;
        g.has_rolled = true;
        g.apply_mut(Action::EndTurn, &mut r).unwrap();
        assert_eq!(g.phase, Phase::Terminal(Outcome::Draw));
    }

    #[test]
    fn victory_card_wins_on_own_turn() {
        let mut r = rng(14);
        let mut g = after_setup(14);
        g.phase = Phase::Main;
        g.has_rolled = true;
        // Three settlements and three cities: 9 public points.
        let p = &mut g.players[0];
        p.settlements_left = 2;
        p.cities_left = 1;
        p.dev_old[DevCard::VictoryPoint.index()] = 1;
        // Any action by the holder triggers the check.
        g.bank.add(&g.players[0].resources.clone());
        g.players[0].resources = Hand::EMPTY;
        g.players[0].resources[Resource::Ore] = 4;
        g.bank[Resource::Ore] -= 4;
        g.apply_mut(
            Action::BankTrade {
                give: Resource::Ore,
                receive: Resource::Wool,
            },
            &mut r,
        )
        .unwrap();
        assert_eq!(g.phase, Phase::Terminal(Outcome::Winner(0)));
    }
}
