mod common;

use catan_xdim::network::{init_network, Architecture, NetworkConfig};
use common::{coefficient_cases, finite_difference_check, random_batch};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small(arch: Architecture) -> NetworkConfig {
    NetworkConfig {
        architecture: arch,
        layers: 2,
        channels: 3,
        scalars: 5,
        baseline_channels: 3,
        ..NetworkConfig::default()
    }
}

fn check(arch: Architecture) {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let params = init_network(small(arch), &mut rng).unwrap();
    let batch = random_batch(&mut rng, 4, params.config.scalar_logits() + 1155);
    for (name, k) in coefficient_cases() {
        let stride = if name == "combined" { 1 } else { 7 };
        let r = finite_difference_check(&params, &batch, &k, stride);
        assert!(
            r.max_rel < 1e-4 && r.max_abs_small < 1e-8,
            "{arch:?} {name}: rel {:e}, small abs {:e}",
            r.max_rel,
            r.max_abs_small
        );
    }
}

#[test]
fn xdim_gradients_match_finite_differences() {
    check(Architecture::Xdim);
}

#[test]
fn xdim_res_gradients_match_finite_differences() {
    check(Architecture::XdimRes);
}

#[test]
fn cnn_res_gradients_match_finite_differences() {
    check(Architecture::CnnRes);
}
