#![allow(dead_code)]

use catan_xdim::encoding::action::Mask;
use catan_xdim::encoding::StateEncoding;
use catan_xdim::network::{
    forward, loss_and_gradients, masked_softmax, Experience, LossCoefficients, NetworkParams,
};
use rand::Rng;

pub fn random_encoding(rng: &mut impl Rng) -> StateEncoding {
    let mut e = StateEncoding::zeros();
    for v in e.channels.iter_mut() {
        if rng.gen_bool(0.15) {
            *v = rng.gen_range(0.0..1.0);
        }
    }
    for v in e.scalars.iter_mut() {
        *v = rng.gen_range(0.0..1.0);
    }
    e
}

pub fn random_mask(rng: &mut impl Rng, len: usize, bits: usize) -> Mask {
    let mut m = Mask::new(len);
    while m.count() < bits {
        m.set(rng.gen_range(0..len));
    }
    m
}

/// Mixed batch: some terminal moves with rewards, some bootstrapped.
pub fn random_batch(rng: &mut impl Rng, n: usize, actions: usize) -> Vec<Experience> {
    (0..n)
        .map(|i| {
            let mask = random_mask(rng, actions, 6);
            let legal: Vec<usize> = mask.iter_set().collect();
            let action = legal[rng.gen_range(0..legal.len())];
            let terminal = i % 2 == 1;
            Experience {
                state: random_encoding(rng),
                mask,
                action,
                reward: if terminal {
                    rng.gen_range(-0.9..0.9)
                } else {
                    0.0
                },
                next: (!terminal).then(|| (random_encoding(rng), random_mask(rng, actions, 4))),
            }
        })
        .collect()
}

/// Frozen quantities of the actor-critic surrogate.
struct Frozen {
    target: f64,
    advantage: f64,
}

fn freeze(params: &NetworkParams, batch: &[Experience], k: &LossCoefficients) -> Vec<Frozen> {
    batch
        .iter()
        .map(|e| {
            let boot = match &e.next {
                Some((s, _)) => forward(params, s).unwrap().value,
                None => 0.0,
            };
            let target = e.reward + k.gamma * boot;
            let v = forward(params, &e.state).unwrap().value;
            Frozen {
                target,
                advantage: target - v,
            }
        })
        .collect()
}

/// Loss written directly from its definition, with targets and
/// advantages held at the values they had before any perturbation.
fn surrogate(
    params: &NetworkParams,
    batch: &[Experience],
    k: &LossCoefficients,
    frozen: &[Frozen],
) -> f64 {
    let n = batch.len() as f64;
    let mut total = 0.0;
    for (e, f) in batch.iter().zip(frozen) {
        let out = forward(params, &e.state).unwrap();
        let logits = out.logits();
        let pi = masked_softmax(&logits, &e.mask).unwrap();
        let plogp: f64 = e
            .mask
            .iter_set()
            .map(|i| pi.probs[i] * pi.probs[i].ln())
            .sum();
        let sq: f64 = logits.iter().map(|p| p * p).sum();
        let dv = out.value - f.target;
        total += -k.policy * f.advantage * pi.probs[e.action].ln()
            + k.value * 0.5 * dv * dv
            + k.entropy * plogp
            + k.activity * sq;
    }
    let theta: f64 = params.values().map(|v| v * v).sum();
    total / n + k.weight_decay * theta
}

pub struct GradReport {
    pub checked: usize,
    pub max_rel: f64,
    pub max_abs_small: f64,
}

/// Compares analytic gradients to central differences on every
/// `stride`-th parameter value.
pub fn finite_difference_check(
    params: &NetworkParams,
    batch: &[Experience],
    k: &LossCoefficients,
    stride: usize,
) -> GradReport {
    let (_, grads) = loss_and_gradients(params, batch, k).unwrap();
    let frozen = freeze(params, batch, k);
    let h = 1e-4;
    let mut report = GradReport {
        checked: 0,
        max_rel: 0.0,
        max_abs_small: 0.0,
    };
    let mut p = params.clone();
    for t in 0..p.tensors.len() {
        for j in (0..p.tensors[t].data.len()).step_by(stride) {
            let orig = p.tensors[t].data[j];
            p.tensors[t].data[j] = orig + h;
            let up = surrogate(&p, batch, k, &frozen);
            p.tensors[t].data[j] = orig - h;
            let down = surrogate(&p, batch, k, &frozen);
            p.tensors[t].data[j] = orig;
            let numeric = (up - down) / (2.0 * h);
            let analytic = grads.tensors[t].data[j];
            let scale = numeric.abs().max(analytic.abs());
            let err = (numeric - analytic).abs();
            if scale > 1e-6 {
                report.max_rel = report.max_rel.max(err / scale);
            } else {
                report.max_abs_small = report.max_abs_small.max(err);
            }
            report.checked += 1;
        }
    }
    report
}

pub fn coefficient_cases() -> Vec<(&'static str, LossCoefficients)> {
    let zero = LossCoefficients {
        policy: 0.0,
        value: 0.0,
        entropy: 0.0,
        activity: 0.0,
        weight_decay: 0.0,
        gamma: 0.9,
    };
    vec![
        (
            "policy",
            LossCoefficients {
                policy: 1.0,
                ..zero
            },
        ),
        ("value", LossCoefficients { value: 1.0, ..zero }),
        (
            "entropy",
            LossCoefficients {
                entropy: 1.0,
                ..zero
            },
        ),
        (
            "activity",
            LossCoefficients {
                activity: 0.1,
                ..zero
            },
        ),
        (
            "weight",
            LossCoefficients {
                weight_decay: 0.1,
                ..zero
            },
        ),
        (
            "combined",
            LossCoefficients {
                policy: 1.0,
                value: 2.0,
                entropy: 0.5,
                activity: 0.05,
                weight_decay: 0.01,
                gamma: 0.9,
            },
        ),
    ]
}

/// State reached after up to `moves` uniformly random legal moves.
pub fn random_state(seed: u64, moves: usize) -> catan_xdim::engine::GameState {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut g = catan_xdim::engine::GameState::new(&mut rng);
    for _ in 0..moves {
        if g.is_terminal() {
            break;
        }
        let a = *g.legal_actions().choose(&mut rng).expect("legal move");
        g.apply_mut(a, &mut rng).expect("legal move applies");
    }
    g
}

/// Longest trail found by exhaustive search from every intersection.
pub fn longest_road_oracle(state: &catan_xdim::engine::GameState, player: usize) -> u32 {
    use catan_xdim::engine::Topology;
    let topo = Topology::standard();
    let edges: Vec<(usize, usize)> = (0..topo.path_intersections.len())
        .filter(|&p| state.roads[p] == Some(player as u8))
        .map(|p| {
            let [a, b] = topo.path_intersections[p];
            (a.index(), b.index())
        })
        .collect();
    let blocked = |v: usize| matches!(state.buildings[v], Some(b) if b.owner != player);

    fn walk(
        v: usize,
        start: bool,
        edges: &[(usize, usize)],
        used: &mut Vec<bool>,
        blocked: &dyn Fn(usize) -> bool,
    ) -> u32 {
        if !start && blocked(v) {
            return 0;
        }
        let mut best = 0;
        for (i, &(a, b)) in edges.iter().enumerate() {
            if used[i] || (a != v && b != v) {
                continue;
            }
            let next = if a == v { b } else { a };
            used[i] = true;
            best = best.max(1 + walk(next, false, edges, used, blocked));
            used[i] = false;
        }
        best
    }

    let mut used = vec![false; edges.len()];
    (0..topo.intersection_pos.len())
        .map(|v| walk(v, true, &edges, &mut used, &blocked))
        .max()
        .unwrap_or(0)
}

/// Resource totals per kind and the development-card total, with played
/// progress cards counted from the action stream.
pub fn conserved(g: &catan_xdim::engine::GameState, progress_played: u32) -> Result<(), String> {
    for r in catan_xdim::engine::Resource::ALL {
        let total = g.bank[r] + g.players[0].resources[r] + g.players[1].resources[r];
        if total != catan_xdim::engine::state::BANK_PER_RESOURCE {
            return Err(format!("{r}: {total} cards in play"));
        }
    }
    let held: u32 = g
        .players
        .iter()
        .map(|p| p.dev_total() + u32::from(p.army))
        .sum();
    let devs = g.dev_deck.len() as u32 + held + progress_played;
    if devs != catan_xdim::engine::state::DEV_DECK_SIZE as u32 {
        return Err(format!("{devs} development cards accounted for"));
    }
    Ok(())
}

pub fn is_progress(a: &catan_xdim::engine::Action) -> bool {
    matches!(
        a,
        catan_xdim::engine::Action::PlayRoadBuilding
            | catan_xdim::engine::Action::PlayYearOfPlenty
            | catan_xdim::engine::Action::PlayMonopoly(_)
    )
}

/// Fresh board with random roads and buildings scattered on it.
pub fn random_road_position(rng: &mut impl rand::Rng) -> catan_xdim::engine::GameState {
    let mut g = catan_xdim::engine::GameState::new(rng);
    let density = rng.gen_range(0.05..0.5);
    for p in 0..g.roads.len() {
        if rng.gen_bool(density) {
            g.roads[p] = Some(rng.gen_range(0..2));
        }
    }
    for i in 0..g.buildings.len() {
        if rng.gen_bool(0.15) {
            g.buildings[i] = Some(catan_xdim::engine::Building {
                owner: rng.gen_range(0..2),
                kind: if rng.gen_bool(0.5) {
                    catan_xdim::engine::BuildingKind::Settlement
                } else {
                    catan_xdim::engine::BuildingKind::City
                },
            });
        }
    }
    g
}
