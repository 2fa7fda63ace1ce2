//! Forward pass and exact backpropagation for all architectures.

use super::config::Architecture;
use super::ops::{self, Activation};
use super::params::{head, slot, NetworkParams};
use super::NetworkError;
use crate::encoding::action::{NUM_SPATIAL_CHANNELS, SPATIAL_SIZE};
use crate::encoding::grid::CELLS;
use crate::encoding::{StateEncoding, NUM_CHANNELS, NUM_SCALARS};

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkOutput {
    /// `5 x 11 x 21`, in action-layout order.
    pub spatial_logits: Vec<f64>,
    pub scalar_logits: Vec<f64>,
    pub value: f64,
}

impl NetworkOutput {
    /// Logits in flat action-index order.
    pub fn logits(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.spatial_logits.len() + self.scalar_logits.len());
        v.extend_from_slice(&self.spatial_logits);
        v.extend_from_slice(&self.scalar_logits);
        v
    }
}

/// Intermediate values kept for backpropagation.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    /// Layer inputs followed by the final maps.
    maps: Vec<Vec<f64>>,
    scalars: Vec<Vec<f64>>,
    map_pre: Vec<Vec<f64>>,
    scalar_pre: Vec<Vec<f64>>,
    deflated: Vec<Vec<f64>>,
    features: Vec<f64>,
}

pub fn forward(params: &NetworkParams, enc: &StateEncoding) -> Result<NetworkOutput, NetworkError> {
    forward_cached(params, enc).map(|(o, _)| o)
}

pub fn forward_cached(
    params: &NetworkParams,
    enc: &StateEncoding,
) -> Result<(NetworkOutput, ForwardCache), NetworkError> {
    if enc.channels.len() != NUM_CHANNELS * CELLS || enc.scalars.len() != NUM_SCALARS {
        return Err(NetworkError::ShapeMismatch(format!(
            "encoding has {} channel values and {} scalars",
            enc.channels.len(),
            enc.scalars.len()
        )));
    }
    let cfg = &params.config;
    let xdim = cfg.architecture != Architecture::CnnRes;
    let residual = cfg.is_residual();
    let c = cfg.hidden_channels();

    let mut cache = ForwardCache {
        maps: Vec::with_capacity(cfg.layers + 1),
        scalars: Vec::with_capacity(cfg.layers + 1),
        map_pre: Vec::with_capacity(cfg.layers),
        scalar_pre: Vec::with_capacity(cfg.layers),
        deflated: Vec::with_capacity(cfg.layers),
        features: Vec::new(),
    };
    if xdim {
        cache.maps.push(enc.channels.clone());
        cache.scalars.push(enc.scalars.clone());
    } else {
        let mut input = enc.channels.clone();
        input.extend(ops::inflate(&enc.scalars));
        cache.maps.push(input);
    }

    for l in 0..cfg.layers {
        let act = Activation::for_layer(l, cfg.leaky_slope);
        let x = &cache.maps[l];
        let cin = x.len() / CELLS;
        let mut ypre = vec![0.0; c * CELLS];
        ops::conv_forward(
            x,
            cin,
            &params.layer(l, slot::CONV_W).data,
            &params.layer(l, slot::CONV_B).data,
            &mut ypre,
        );
        let skip = residual && l > 0;
        if xdim {
            let s = &cache.scalars[l];
            let mut inflated = vec![0.0; c];
            ops::matvec_acc(&params.layer(l, slot::INFLATE_W).data, s, &mut inflated);
            ops::add_inflated(&inflated, &mut ypre);

            let defl = ops::deflate(x, cin);
            let mut zpre = params.layer(l, slot::DENSE_B).data.clone();
            ops::matvec_acc(&params.layer(l, slot::DENSE_W).data, s, &mut zpre);
            ops::matvec_acc(&params.layer(l, slot::DEFLATE_W).data, &defl, &mut zpre);
            if skip {
                zpre.iter_mut().zip(s).for_each(|(a, b)| *a += b);
            }
            let z: Vec<f64> = zpre.iter().map(|&v| act.apply(v)).collect();
            cache.deflated.push(defl);
            cache.scalar_pre.push(zpre);
            cache.scalars.push(z);
        }
        if skip {
            ypre.iter_mut().zip(x).for_each(|(a, b)| *a += b);
        }
        let y: Vec<f64> = ypre.iter().map(|&v| act.apply(v)).collect();
        cache.map_pre.push(ypre);
        cache.maps.push(y);
    }

    let last = &cache.maps[cfg.layers];
    let mut spatial = vec![0.0; SPATIAL_SIZE];
    ops::pointwise_forward(
        last,
        c,
        &params.head(head::POLICY_W).data,
        &params.head(head::POLICY_B).data,
        &mut spatial,
    );
    cache.features = if xdim {
        cache.scalars[cfg.layers].clone()
    } else {
        ops::deflate(last, c)
    };
    let mut scalar_logits = params.head(head::SCALAR_B).data.clone();
    ops::matvec_acc(
        &params.head(head::SCALAR_W).data,
        &cache.features,
        &mut scalar_logits,
    );
    let mut vpre = params.head(head::VALUE_B).data.clone();
    ops::matvec_acc(&params.head(head::VALUE_W).data, &cache.features, &mut vpre);

    Ok((
        NetworkOutput {
            spatial_logits: spatial,
            scalar_logits,
            value: vpre[0].tanh(),
        },
        cache,
    ))
}

/// Accumulates into `grads` the parameter gradient of a loss whose
/// derivatives with respect to the outputs are given.
pub fn backward(
    params: &NetworkParams,
    out: &NetworkOutput,
    cache: &ForwardCache,
    d_spatial: &[f64],
    d_scalar: &[f64],
    d_value: f64,
    grads: &mut NetworkParams,
) {
    let cfg = &params.config;
    let xdim = cfg.architecture != Architecture::CnnRes;
    let residual = cfg.is_residual();
    let c = cfg.hidden_channels();
    debug_assert_eq!(d_spatial.len(), NUM_SPATIAL_CHANNELS * CELLS);

    let mut d_features = vec![0.0; cache.features.len()];
    let dv_pre = d_value * (1.0 - out.value * out.value);
    ops::matvec_backward(
        &params.head(head::SCALAR_W).data,
        &cache.features,
        d_scalar,
        &mut grads.head_mut(head::SCALAR_W).data,
        Some(&mut d_features),
    );
    add_into(&mut grads.head_mut(head::SCALAR_B).data, d_scalar);
    ops::matvec_backward(
        &params.head(head::VALUE_W).data,
        &cache.features,
        &[dv_pre],
        &mut grads.head_mut(head::VALUE_W).data,
        Some(&mut d_features),
    );
    grads.head_mut(head::VALUE_B).data[0] += dv_pre;

    let last = &cache.maps[cfg.layers];
    let mut d_map = vec![0.0; c * CELLS];
    {
        let i = params.head_index(head::POLICY_W);
        let (dw, db) = grads.pair_mut(i);
        ops::pointwise_backward(
            last,
            c,
            &params.head(head::POLICY_W).data,
            d_spatial,
            &mut dw.data,
            &mut db.data,
            &mut d_map,
        );
    }
    let mut d_scal = if xdim {
        d_features
    } else {
        ops::deflate_backward(last, c, &d_features, &mut d_map);
        Vec::new()
    };

    for l in (0..cfg.layers).rev() {
        let act = Activation::for_layer(l, cfg.leaky_slope);
        let x = &cache.maps[l];
        let cin = x.len() / CELLS;
        let skip = residual && l > 0;
        let ypre = &cache.map_pre[l];
        let y = &cache.maps[l + 1];
        let d_ypre: Vec<f64> = d_map
            .iter()
            .zip(ypre.iter().zip(y))
            .map(|(g, (&p, &o))| g * act.derivative(p, o))
            .collect();
        let mut d_x = if l > 0 {
            vec![0.0; cin * CELLS]
        } else {
            Vec::new()
        };
        {
            let i = params.layer_index(l, slot::CONV_W);
            let (dw, db) = grads.pair_mut(i);
            ops::conv_backward(
                x,
                cin,
                &params.layer(l, slot::CONV_W).data,
                &d_ypre,
                &mut dw.data,
                &mut db.data,
                (l > 0).then_some(d_x.as_mut_slice()),
            );
        }
        if skip {
            add_into(&mut d_x, &d_ypre);
        }

        if xdim {
            let s = &cache.scalars[l];
            let zpre = &cache.scalar_pre[l];
            let z = &cache.scalars[l + 1];
            let d_zpre: Vec<f64> = d_scal
                .iter()
                .zip(zpre.iter().zip(z))
                .map(|(g, (&p, &o))| g * act.derivative(p, o))
                .collect();
            let mut d_s = vec![0.0; s.len()];
            let want_input = l > 0;

            let d_infl = ops::inflate_backward(&d_ypre, c);
            ops::matvec_backward(
                &params.layer(l, slot::INFLATE_W).data,
                s,
                &d_infl,
                &mut grads.layer_mut(l, slot::INFLATE_W).data,
                want_input.then_some(d_s.as_mut_slice()),
            );
            add_into(&mut grads.layer_mut(l, slot::DENSE_B).data, &d_zpre);
            ops::matvec_backward(
                &params.layer(l, slot::DENSE_W).data,
                s,
                &d_zpre,
                &mut grads.layer_mut(l, slot::DENSE_W).data,
                want_input.then_some(d_s.as_mut_slice()),
            );
            let mut d_defl = vec![0.0; 2 * cin];
            ops::matvec_backward(
                &params.layer(l, slot::DEFLATE_W).data,
                &cache.deflated[l],
                &d_zpre,
                &mut grads.layer_mut(l, slot::DEFLATE_W).data,
                want_input.then_some(d_defl.as_mut_slice()),
            );
            if want_input {
                ops::deflate_backward(x, cin, &d_defl, &mut d_x);
            }
            if skip {
                add_into(&mut d_s, &d_zpre);
            }
            d_scal = d_s;
        }
        d_map = d_x;
    }
}

fn add_into(dst: &mut [f64], src: &[f64]) {
    dst.iter_mut().zip(src).for_each(|(a, b)| *a += b);
}
