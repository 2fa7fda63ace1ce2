//! Primitive layers over `[channel][row][col]` maps on the brick grid.

use crate::encoding::grid::{CELLS, COLS, KERNEL_COLS, KERNEL_ROWS, ROWS};

const PAD_R: usize = KERNEL_ROWS / 2;
const PAD_C: usize = KERNEL_COLS / 2;
const KSIZE: usize = KERNEL_ROWS * KERNEL_COLS;

/// Valid output range along one axis for kernel tap `k` with padding `pad`.
fn tap_range(k: usize, pad: usize, len: usize) -> (usize, usize) {
    let lo = pad.saturating_sub(k);
    let hi = (len + pad).saturating_sub(k).min(len);
    (lo, hi)
}

/// Zero-padded stride-1 convolution with a 3x5 kernel. `weight` is
/// `[cout][cin][3][5]`; `out` (`cout` maps) is overwritten.
pub fn conv_forward(input: &[f64], cin: usize, weight: &[f64], bias: &[f64], out: &mut [f64]) {
    let cout = bias.len();
    debug_assert_eq!(input.len(), cin * CELLS);
    debug_assert_eq!(weight.len(), cout * cin * KSIZE);
    debug_assert_eq!(out.len(), cout * CELLS);
    for o in 0..cout {
        let dst = &mut out[o * CELLS..(o + 1) * CELLS];
        dst.iter_mut().for_each(|v| *v = bias[o]);
        for i in 0..cin {
            let src = &input[i * CELLS..(i + 1) * CELLS];
            if src.iter().all(|&v| v == 0.0) {
                continue;
            }
            let w = &weight[(o * cin + i) * KSIZE..(o * cin + i + 1) * KSIZE];
            for kr in 0..KERNEL_ROWS {
                let (r0, r1) = tap_range(kr, PAD_R, ROWS);
                for kc in 0..KERNEL_COLS {
                    let wv = w[kr * KERNEL_COLS + kc];
                    if wv == 0.0 {
                        continue;
                    }
                    let (c0, c1) = tap_range(kc, PAD_C, COLS);
                    for r in r0..r1 {
                        let sr = r + kr - PAD_R;
                        let d = &mut dst[r * COLS + c0..r * COLS + c1];
                        let s = &src[sr * COLS + c0 + kc - PAD_C..sr * COLS + c1 + kc - PAD_C];
                        for (x, y) in d.iter_mut().zip(s) {
                            *x += wv * y;
                        }
                    }
                }
            }
        }
    }
}

/// Accumulates convolution gradients. `d_input` may be `None` for the
/// network input.
pub fn conv_backward(
    input: &[f64],
    cin: usize,
    weight: &[f64],
    d_out: &[f64],
    d_weight: &mut [f64],
    d_bias: &mut [f64],
    mut d_input: Option<&mut [f64]>,
) {
    let cout = d_bias.len();
    for o in 0..cout {
        let g = &d_out[o * CELLS..(o + 1) * CELLS];
        d_bias[o] += g.iter().sum::<f64>();
        for i in 0..cin {
            let src = &input[i * CELLS..(i + 1) * CELLS];
            let base = (o * cin + i) * KSIZE;
            for kr in 0..KERNEL_ROWS {
                let (r0, r1) = tap_range(kr, PAD_R, ROWS);
                for kc in 0..KERNEL_COLS {
                    let (c0, c1) = tap_range(kc, PAD_C, COLS);
                    let wv = weight[base + kr * KERNEL_COLS + kc];
                    let mut acc = 0.0;
                    for r in r0..r1 {
                        let sr = r + kr - PAD_R;
                        let go = &g[r * COLS + c0..r * COLS + c1];
                        let so = sr * COLS + c0 + kc - PAD_C;
                        let s = &src[so..so + (c1 - c0)];
                        acc += go.iter().zip(s).map(|(a, b)| a * b).sum::<f64>();
                        if let Some(di) = d_input.as_deref_mut() {
                            let d = &mut di[i * CELLS + so..i * CELLS + so + (c1 - c0)];
                            for (x, y) in d.iter_mut().zip(go) {
                                *x += wv * y;
                            }
                        }
                    }
                    d_weight[base + kr * KERNEL_COLS + kc] += acc;
                }
            }
        }
    }
}

/// Per-cell affine map across channels: `out[o] = sum_i w[o][i] in[i] + b[o]`.
pub fn pointwise_forward(input: &[f64], cin: usize, weight: &[f64], bias: &[f64], out: &mut [f64]) {
    let cout = bias.len();
    for o in 0..cout {
        let dst = &mut out[o * CELLS..(o + 1) * CELLS];
        dst.iter_mut().for_each(|v| *v = bias[o]);
        for i in 0..cin {
            let w = weight[o * cin + i];
            let src = &input[i * CELLS..(i + 1) * CELLS];
            for (x, y) in dst.iter_mut().zip(src) {
                *x += w * y;
            }
        }
    }
}

pub fn pointwise_backward(
    input: &[f64],
    cin: usize,
    weight: &[f64],
    d_out: &[f64],
    d_weight: &mut [f64],
    d_bias: &mut [f64],
    d_input: &mut [f64],
) {
    let cout = d_bias.len();
    for o in 0..cout {
        let g = &d_out[o * CELLS..(o + 1) * CELLS];
        d_bias[o] += g.iter().sum::<f64>();
        for i in 0..cin {
            let src = &input[i * CELLS..(i + 1) * CELLS];
            d_weight[o * cin + i] += g.iter().zip(src).map(|(a, b)| a * b).sum::<f64>();
            let w = weight[o * cin + i];
            let d = &mut d_input[i * CELLS..(i + 1) * CELLS];
            for (x, y) in d.iter_mut().zip(g) {
                *x += w * y;
            }
        }
    }
}

/// `out = W x (+ b)`, `W` row-major `[out.len()][x.len()]`; accumulates.
pub fn matvec_acc(weight: &[f64], x: &[f64], out: &mut [f64]) {
    let n = x.len();
    for (o, y) in out.iter_mut().enumerate() {
        let row = &weight[o * n..(o + 1) * n];
        *y += row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
    }
}

/// Gradients of `y = W x`: `dW += dy x^T`, `dx += W^T dy`.
pub fn matvec_backward(
    weight: &[f64],
    x: &[f64],
    dy: &[f64],
    d_weight: &mut [f64],
    d_x: Option<&mut [f64]>,
) {
    let n = x.len();
    for (o, &g) in dy.iter().enumerate() {
        if g == 0.0 {
            continue;
        }
        let row = &mut d_weight[o * n..(o + 1) * n];
        for (w, &xi) in row.iter_mut().zip(x) {
            *w += g * xi;
        }
    }
    if let Some(dx) = d_x {
        for (o, &g) in dy.iter().enumerate() {
            if g == 0.0 {
                continue;
            }
            let row = &weight[o * n..(o + 1) * n];
            for (d, &w) in dx.iter_mut().zip(row) {
                *d += g * w;
            }
        }
    }
}

/// Scalar `i` becomes a constant map.
pub fn inflate(scalars: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; scalars.len() * CELLS];
    for (i, &s) in scalars.iter().enumerate() {
        out[i * CELLS..(i + 1) * CELLS]
            .iter_mut()
            .for_each(|v| *v = s);
    }
    out
}

/// Adds `values[o]` to every cell of map `o`.
pub fn add_inflated(values: &[f64], maps: &mut [f64]) {
    for (o, &v) in values.iter().enumerate() {
        maps[o * CELLS..(o + 1) * CELLS]
            .iter_mut()
            .for_each(|x| *x += v);
    }
}

/// Gradient of [`inflate`]: the sum over each map.
pub fn inflate_backward(d_maps: &[f64], channels: usize) -> Vec<f64> {
    (0..channels)
        .map(|o| d_maps[o * CELLS..(o + 1) * CELLS].iter().sum())
        .collect()
}

/// Each map becomes `(mean, population variance)`, interleaved.
pub fn deflate(maps: &[f64], channels: usize) -> Vec<f64> {
    let n = CELLS as f64;
    let mut out = Vec::with_capacity(2 * channels);
    for c in 0..channels {
        let m = &maps[c * CELLS..(c + 1) * CELLS];
        let mean = m.iter().sum::<f64>() / n;
        let var = m.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        out.push(mean);
        out.push(var);
    }
    out
}

/// Accumulates the gradient of [`deflate`] into `d_maps`.
pub fn deflate_backward(maps: &[f64], channels: usize, d_out: &[f64], d_maps: &mut [f64]) {
    let n = CELLS as f64;
    for c in 0..channels {
        let (dm, dv) = (d_out[2 * c], d_out[2 * c + 1]);
        if dm == 0.0 && dv == 0.0 {
            continue;
        }
        let m = &maps[c * CELLS..(c + 1) * CELLS];
        let mean = m.iter().sum::<f64>() / n;
        let d = &mut d_maps[c * CELLS..(c + 1) * CELLS];
        for (g, x) in d.iter_mut().zip(m) {
            *g += dm / n + dv * 2.0 * (x - mean) / n;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Activation {
    Tanh,
    Leaky(f64),
}

impl Activation {
    /// Tanh on even layers, leaky ReLU on odd ones.
    pub fn for_layer(layer: usize, slope: f64) -> Self {
        if layer.is_multiple_of(2) {
            Activation::Tanh
        } else {
            Activation::Leaky(slope)
        }
    }

    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Tanh => x.tanh(),
            Activation::Leaky(s) => {
                if x > 0.0 {
                    x
                } else {
                    s * x
                }
            }
        }
    }

    /// Derivative given the pre-activation `x` and output `y`.
    pub fn derivative(self, x: f64, y: f64) -> f64 {
        match self {
            Activation::Tanh => 1.0 - y * y,
            Activation::Leaky(s) => {
                if x > 0.0 {
                    1.0
                } else {
                    s
                }
            }
        }
    }
}
