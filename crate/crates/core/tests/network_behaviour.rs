mod common;

use catan_xdim::encoding::action::SPATIAL_SIZE;
use catan_xdim::network::{
    apply_update, checkpoint, forward, init_network, loss_and_gradients, masked_softmax,
    Architecture, Experience, LossCoefficients, NetworkConfig, NetworkParams,
};
use common::{random_encoding, random_mask};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const NONE: LossCoefficients = LossCoefficients {
    policy: 0.0,
    value: 0.0,
    entropy: 0.0,
    activity: 0.0,
    weight_decay: 0.0,
    gamma: 1.0,
};

fn net(arch: Architecture, seed: u64) -> NetworkParams {
    let cfg = NetworkConfig {
        architecture: arch,
        layers: 2,
        channels: 4,
        scalars: 6,
        baseline_channels: 4,
        ..NetworkConfig::default()
    };
    init_network(cfg, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

fn terminal(rng: &mut ChaCha8Rng, actions: usize, reward: f64) -> Experience {
    let mask = random_mask(rng, actions, 5);
    let action = mask.iter_set().next().unwrap();
    Experience {
        state: random_encoding(rng),
        mask,
        action,
        reward,
        next: None,
    }
}

fn descend(
    params: &mut NetworkParams,
    batch: &[Experience],
    k: &LossCoefficients,
    lr: f64,
    n: usize,
) {
    for _ in 0..n {
        let (_, g) = loss_and_gradients(params, batch, k).unwrap();
        apply_update(params, &g, lr).unwrap();
    }
}

const ARCHES: [Architecture; 3] = [
    Architecture::Xdim,
    Architecture::XdimRes,
    Architecture::CnnRes,
];

#[test]
fn value_moves_toward_terminal_reward() {
    for arch in ARCHES {
        let mut p = net(arch, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let actions = p.config.scalar_logits() + SPATIAL_SIZE;
        let batch = vec![terminal(&mut rng, actions, 0.83)];
        let before = (forward(&p, &batch[0].state).unwrap().value - 0.83).abs();
        let k = LossCoefficients { value: 1.0, ..NONE };
        descend(&mut p, &batch, &k, 0.05, 20);
        let after = (forward(&p, &batch[0].state).unwrap().value - 0.83).abs();
        assert!(after < 0.5 * before, "{arch:?}: {before} -> {after}");
    }
}

#[test]
fn activity_penalty_shrinks_logits() {
    for arch in ARCHES {
        let mut p = net(arch, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let actions = p.config.scalar_logits() + SPATIAL_SIZE;
        let batch = vec![
            terminal(&mut rng, actions, 0.0),
            terminal(&mut rng, actions, 0.0),
        ];
        let k = LossCoefficients {
            activity: 1.0,
            ..NONE
        };
        let (d0, _) = loss_and_gradients(&p, &batch, &k).unwrap();
        descend(&mut p, &batch, &k, 1e-3, 5);
        let (d1, _) = loss_and_gradients(&p, &batch, &k).unwrap();
        assert!(d1.raw_logit_l2 < d0.raw_logit_l2, "{arch:?}");
        assert_eq!(d1.activity_loss, d1.raw_logit_l2);
    }
}

#[test]
fn positive_advantage_raises_the_chosen_action() {
    let mut p = net(Architecture::Xdim, 5);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let actions = p.config.scalar_logits() + SPATIAL_SIZE;
    let batch = vec![terminal(&mut rng, actions, 0.9)];
    let e = &batch[0];
    let prob = |p: &NetworkParams| {
        let out = forward(p, &e.state).unwrap();
        masked_softmax(&out.logits(), &e.mask).unwrap().probs[e.action]
    };
    let before = prob(&p);
    let k = LossCoefficients {
        policy: 1.0,
        ..NONE
    };
    descend(&mut p, &batch, &k, 1.0, 3);
    assert!(prob(&p) > before);

    // negative advantage pushes the other way
    let mut q = net(Architecture::Xdim, 5);
    let mut neg = batch.clone();
    neg[0].reward = -0.9;
    descend(&mut q, &neg, &k, 1.0, 3);
    assert!(prob(&q) < before);
}

#[test]
fn zero_gradient_is_a_no_op() {
    let mut p = net(Architecture::XdimRes, 7);
    let before = p.clone();
    let zero = p.zeros_like();
    apply_update(&mut p, &zero, 0.5).unwrap();
    assert_eq!(p, before);
}

#[test]
fn weight_decay_alone_scales_parameters() {
    let mut p = net(Architecture::Xdim, 8);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let actions = p.config.scalar_logits() + SPATIAL_SIZE;
    let batch = vec![terminal(&mut rng, actions, 0.0)];
    let (alpha, lr) = (0.1, 0.5);
    let k = LossCoefficients {
        weight_decay: alpha,
        ..NONE
    };
    let before = p.sum_squares();
    let (d, _) = loss_and_gradients(&p, &batch, &k).unwrap();
    assert!((d.weight_loss - alpha * before).abs() < 1e-12 * before.max(1.0));
    descend(&mut p, &batch, &k, lr, 1);
    let factor: f64 = 1.0 - 2.0 * lr * alpha;
    let want = before * factor * factor;
    assert!(
        (p.sum_squares() - want).abs() < 1e-6 * want,
        "{} vs {want}",
        p.sum_squares()
    );
}

#[test]
fn reloaded_checkpoint_gives_identical_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for (i, arch) in ARCHES.into_iter().enumerate() {
        let mut p = net(arch, 11 + i as u64);
        let actions = p.config.scalar_logits() + SPATIAL_SIZE;
        let batch = vec![terminal(&mut rng, actions, 0.4)];
        let k = LossCoefficients::default();
        descend(&mut p, &batch, &k, 1e-3, 2);
        let path = dir.path().join(format!("{i}.xdim"));
        checkpoint::save(&p, &path).unwrap();
        let q = checkpoint::load(&path).unwrap();
        assert_eq!(p, q);
        for _ in 0..5 {
            let s = random_encoding(&mut rng);
            let a = forward(&p, &s).unwrap();
            let b = forward(&q, &s).unwrap();
            assert_eq!(a.value.to_bits(), b.value.to_bits());
            let (la, lb) = (a.logits(), b.logits());
            assert!(la.iter().zip(&lb).all(|(x, y)| x.to_bits() == y.to_bits()));
        }
    }
}
