//! Masked policy, actor-critic targets, the combined loss and its gradient.

use super::model::{backward, forward, forward_cached, NetworkOutput};
use super::params::NetworkParams;
use super::NetworkError;
use crate::encoding::action::{Mask, SPATIAL_SIZE};
use crate::encoding::StateEncoding;

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyDistribution {
    pub probs: Vec<f64>,
}

impl PolicyDistribution {
    /// Index with the highest probability; ties go to the lowest index.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.probs.iter().enumerate() {
            if p > self.probs[best] {
                best = i;
            }
        }
        best
    }

    /// Inverse-CDF sample from a uniform draw `u` in `[0, 1)`.
    pub fn sample_with(&self, u: f64) -> usize {
        let mut acc = 0.0;
        let mut last = 0;
        for (i, &p) in self.probs.iter().enumerate() {
            if p > 0.0 {
                acc += p;
                last = i;
                if u < acc {
                    return i;
                }
            }
        }
        last
    }
}

/// Softmax restricted to the set bits of `mask`; other entries are 0.
pub fn masked_softmax(logits: &[f64], mask: &Mask) -> Result<PolicyDistribution, NetworkError> {
    if mask.len() != logits.len() {
        return Err(NetworkError::ShapeMismatch(format!(
            "mask covers {} actions, network emits {}",
            mask.len(),
            logits.len()
        )));
    }
    let max = mask
        .iter_set()
        .map(|i| logits[i])
        .fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Err(NetworkError::EmptyMask);
    }
    let mut probs = vec![0.0; logits.len()];
    let mut z = 0.0;
    for i in mask.iter_set() {
        let e = (logits[i] - max).exp();
        probs[i] = e;
        z += e;
    }
    for i in mask.iter_set() {
        probs[i] /= z;
    }
    Ok(PolicyDistribution { probs })
}

pub fn masked_policy(out: &NetworkOutput, mask: &Mask) -> Result<PolicyDistribution, NetworkError> {
    masked_softmax(&out.logits(), mask)
}

/// One learner decision.
#[derive(Debug, Clone, PartialEq)]
pub struct Experience {
    pub state: StateEncoding,
    pub mask: Mask,
    pub action: usize,
    /// Zero unless the game ended after this move.
    pub reward: f64,
    /// Next learner decision point, or `None` when the game ended.
    pub next: Option<(StateEncoding, Mask)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossCoefficients {
    pub policy: f64,
    pub value: f64,
    pub entropy: f64,
    pub activity: f64,
    pub weight_decay: f64,
    pub gamma: f64,
}

impl Default for LossCoefficients {
    fn default() -> Self {
        LossCoefficients {
            policy: 1.0,
            value: 1e3,
            entropy: 1e-4,
            activity: 1e-8,
            weight_decay: 1e-4,
            gamma: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Targets {
    pub value: f64,
    pub target: f64,
    pub advantage: f64,
}

/// `r + gamma * v(s')`, bootstrapping with 0 after the last move.
fn bootstrap(params: &NetworkParams, e: &Experience, gamma: f64) -> Result<f64, NetworkError> {
    let next = match &e.next {
        Some((s, _)) if gamma != 0.0 => forward(params, s)?.value,
        _ => 0.0,
    };
    Ok(e.reward + gamma * next)
}

pub fn compute_targets(
    params: &NetworkParams,
    batch: &[Experience],
    gamma: f64,
) -> Result<Vec<Targets>, NetworkError> {
    batch
        .iter()
        .map(|e| {
            let value = forward(params, &e.state)?.value;
            let target = bootstrap(params, e, gamma)?;
            Ok(Targets {
                value,
                target,
                advantage: target - value,
            })
        })
        .collect()
}

/// Batch means of the weighted loss terms plus a few raw statistics.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LossDiagnostics {
    /// `alpha_pi * mean(-A ln pi(a))`
    pub policy_loss: f64,
    /// `alpha_v * mean(delta^2 / 2)`
    pub value_loss: f64,
    /// Mean entropy of the masked policy.
    pub entropy: f64,
    /// `alpha_p * mean(sum p_i^2)`
    pub activity_loss: f64,
    /// Mean `sum p_i^2` regardless of its weight.
    pub raw_logit_l2: f64,
    /// `alpha_theta * sum theta^2`
    pub weight_loss: f64,
    pub mean_advantage: f64,
    pub mean_reward: f64,
    /// Total objective being descended.
    pub total: f64,
}

/// Loss value and gradient for descent. Advantages and targets are
/// treated as constants.
pub fn loss_and_gradients(
    params: &NetworkParams,
    batch: &[Experience],
    k: &LossCoefficients,
) -> Result<(LossDiagnostics, NetworkParams), NetworkError> {
    if batch.is_empty() {
        return Err(NetworkError::ShapeMismatch("empty batch".into()));
    }
    let n = batch.len() as f64;
    let mut grads = params.zeros_like();
    let mut d = LossDiagnostics::default();

    for e in batch {
        let target = bootstrap(params, e, k.gamma)?;
        let (out, cache) = forward_cached(params, &e.state)?;
        let logits = out.logits();
        let pi = masked_softmax(&logits, &e.mask)?;
        if !e.mask.get(e.action) {
            return Err(NetworkError::ShapeMismatch(format!(
                "action {} is not legal under its mask",
                e.action
            )));
        }
        let advantage = target - out.value;
        let delta = out.value - target;

        let mut neg_plogp = 0.0;
        for i in e.mask.iter_set() {
            if pi.probs[i] > 0.0 {
                neg_plogp -= pi.probs[i] * pi.probs[i].ln();
            }
        }
        let logp_a = pi.probs[e.action].ln();
        let sq: f64 = logits.iter().map(|p| p * p).sum();

        d.policy_loss += -k.policy * advantage * logp_a / n;
        d.value_loss += k.value * 0.5 * delta * delta / n;
        d.entropy += neg_plogp / n;
        d.raw_logit_l2 += sq / n;
        d.mean_advantage += advantage / n;
        d.mean_reward += e.reward / n;

        let mut dl: Vec<f64> = logits.iter().map(|p| k.activity * 2.0 * p / n).collect();
        let f = -neg_plogp;
        for i in e.mask.iter_set() {
            let p = pi.probs[i];
            let indicator = if i == e.action { 1.0 } else { 0.0 };
            dl[i] += -k.policy * advantage * (indicator - p) / n;
            if p > 0.0 {
                dl[i] += k.entropy * p * (p.ln() - f) / n;
            }
        }
        let d_value = k.value * delta / n;
        backward(
            params,
            &out,
            &cache,
            &dl[..SPATIAL_SIZE],
            &dl[SPATIAL_SIZE..],
            d_value,
            &mut grads,
        );
    }

    d.activity_loss = k.activity * d.raw_logit_l2;
    d.weight_loss = k.weight_decay * params.sum_squares();
    if k.weight_decay != 0.0 {
        grads.add_scaled(params, 2.0 * k.weight_decay)?;
    }
    d.total =
        d.policy_loss + d.value_loss - k.entropy * d.entropy + d.activity_loss + d.weight_loss;
    Ok((d, grads))
}

/// Plain gradient descent, rounded back to checkpoint precision.
pub fn apply_update(
    params: &mut NetworkParams,
    grads: &NetworkParams,
    lr: f64,
) -> Result<(), NetworkError> {
    params.add_scaled(grads, -lr)?;
    params.quantize();
    Ok(())
}
