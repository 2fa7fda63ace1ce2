use rand::Rng;

use super::config::{Architecture, NetworkConfig};
use super::NetworkError;
use crate::encoding::action::NUM_SPATIAL_CHANNELS;
use crate::encoding::grid::{KERNEL_COLS, KERNEL_ROWS};

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    pub name: String,
    pub shape: Vec<usize>,
    pub data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(name: impl Into<String>, shape: Vec<usize>) -> Self {
        let n = shape.iter().product();
        Tensor {
            name: name.into(),
            shape,
            data: vec![0.0; n],
        }
    }

    pub fn is_bias(&self) -> bool {
        self.name.ends_with(".bias")
    }

    /// Glorot fan-in and fan-out.
    fn fans(&self) -> (usize, usize) {
        let receptive: usize = self.shape[2..].iter().product();
        (self.shape[1] * receptive, self.shape[0] * receptive)
    }
}

/// Parameter offsets inside one cross-dimensional layer.
pub mod slot {
    pub const CONV_W: usize = 0;
    pub const CONV_B: usize = 1;
    pub const DENSE_W: usize = 2;
    pub const DENSE_B: usize = 3;
    pub const DEFLATE_W: usize = 4;
    pub const INFLATE_W: usize = 5;
}

/// Offsets of the head parameters after the hidden layers.
pub mod head {
    pub const POLICY_W: usize = 0;
    pub const POLICY_B: usize = 1;
    pub const SCALAR_W: usize = 2;
    pub const SCALAR_B: usize = 3;
    pub const VALUE_W: usize = 4;
    pub const VALUE_B: usize = 5;
}

/// All trainable tensors in a fixed order determined by the config.
/// Also used to hold gradients of the same shapes.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParams {
    pub config: NetworkConfig,
    pub tensors: Vec<Tensor>,
}

impl NetworkParams {
    pub fn zeros(config: NetworkConfig) -> Self {
        let kernel = |o: usize, i: usize| vec![o, i, KERNEL_ROWS, KERNEL_COLS];
        let s_out = config.scalar_logits();
        let mut t = Vec::new();
        match config.architecture {
            Architecture::Xdim | Architecture::XdimRes => {
                let (c, n) = (config.channels, config.scalars);
                for l in 0..config.layers {
                    let (ci, ni) = if l == 0 {
                        (config.input_channels(), config.input_scalars())
                    } else {
                        (c, n)
                    };
                    let p = |s: &str| format!("layer{l}.{s}");
                    t.push(Tensor::zeros(p("conv.weight"), kernel(c, ci)));
                    t.push(Tensor::zeros(p("conv.bias"), vec![c]));
                    t.push(Tensor::zeros(p("dense.weight"), vec![n, ni]));
                    t.push(Tensor::zeros(p("dense.bias"), vec![n]));
                    t.push(Tensor::zeros(p("deflate.weight"), vec![n, 2 * ci]));
                    t.push(Tensor::zeros(p("inflate.weight"), vec![c, ni]));
                }
                push_heads(&mut t, c, n, s_out);
            }
            Architecture::CnnRes => {
                let c = config.baseline_channels;
                for l in 0..config.layers {
                    let ci = if l == 0 {
                        config.input_channels() + config.input_scalars()
                    } else {
                        c
                    };
                    t.push(Tensor::zeros(
                        format!("layer{l}.conv.weight"),
                        kernel(c, ci),
                    ));
                    t.push(Tensor::zeros(format!("layer{l}.conv.bias"), vec![c]));
                }
                push_heads(&mut t, c, 2 * c, s_out);
            }
        }
        NetworkParams { config, tensors: t }
    }

    pub fn zeros_like(&self) -> Self {
        NetworkParams::zeros(self.config)
    }

    /// Tensors per hidden layer.
    pub fn per_layer(&self) -> usize {
        match self.config.architecture {
            Architecture::CnnRes => 2,
            _ => 6,
        }
    }

    pub fn layer_index(&self, l: usize, s: usize) -> usize {
        l * self.per_layer() + s
    }

    pub fn head_index(&self, s: usize) -> usize {
        self.config.layers * self.per_layer() + s
    }

    pub fn layer(&self, l: usize, s: usize) -> &Tensor {
        &self.tensors[self.layer_index(l, s)]
    }

    pub fn layer_mut(&mut self, l: usize, s: usize) -> &mut Tensor {
        let i = self.layer_index(l, s);
        &mut self.tensors[i]
    }

    pub fn head(&self, s: usize) -> &Tensor {
        &self.tensors[self.head_index(s)]
    }

    pub fn head_mut(&mut self, s: usize) -> &mut Tensor {
        let i = self.head_index(s);
        &mut self.tensors[i]
    }

    /// Tensor `i` and its successor, typically a weight and its bias.
    pub fn pair_mut(&mut self, i: usize) -> (&mut Tensor, &mut Tensor) {
        let (a, b) = self.tensors.split_at_mut(i + 1);
        (&mut a[i], &mut b[0])
    }

    pub fn get(&self, name: &str) -> Option<&Tensor> {
        self.tensors.iter().find(|t| t.name == name)
    }

    pub fn num_values(&self) -> usize {
        self.tensors.iter().map(|t| t.data.len()).sum()
    }

    pub fn values(&self) -> impl Iterator<Item = &f64> {
        self.tensors.iter().flat_map(|t| t.data.iter())
    }

    pub fn values_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.tensors.iter_mut().flat_map(|t| t.data.iter_mut())
    }

    pub fn sum_squares(&self) -> f64 {
        self.values().map(|v| v * v).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.values().all(|v| v.is_finite())
    }

    pub fn check_shapes(&self, other: &NetworkParams) -> Result<(), NetworkError> {
        let same = self.tensors.len() == other.tensors.len()
            && self
                .tensors
                .iter()
                .zip(&other.tensors)
                .all(|(a, b)| a.shape == b.shape);
        if same {
            Ok(())
        } else {
            Err(NetworkError::ShapeMismatch(
                "parameter sets differ in shape".into(),
            ))
        }
    }

    /// `self += k * other`.
    pub fn add_scaled(&mut self, other: &NetworkParams, k: f64) -> Result<(), NetworkError> {
        self.check_shapes(other)?;
        for (a, b) in self.values_mut().zip(other.values()) {
            *a += k * b;
        }
        Ok(())
    }

    pub fn scale(&mut self, k: f64) {
        self.values_mut().for_each(|v| *v *= k);
    }

    /// Rounds every value to the nearest `f32`, the checkpoint precision.
    pub fn quantize(&mut self) {
        self.values_mut().for_each(|v| *v = f64::from(*v as f32));
    }
}

fn push_heads(t: &mut Vec<Tensor>, channels: usize, features: usize, scalar_out: usize) {
    t.push(Tensor::zeros(
        "head.policy.weight",
        vec![NUM_SPATIAL_CHANNELS, channels],
    ));
    t.push(Tensor::zeros(
        "head.policy.bias",
        vec![NUM_SPATIAL_CHANNELS],
    ));
    t.push(Tensor::zeros(
        "head.scalar.weight",
        vec![scalar_out, features],
    ));
    t.push(Tensor::zeros("head.scalar.bias", vec![scalar_out]));
    t.push(Tensor::zeros("head.value.weight", vec![1, features]));
    t.push(Tensor::zeros("head.value.bias", vec![1]));
}

/// Bound of the uniform initializer for a weight tensor.
pub fn init_bound(t: &Tensor) -> f64 {
    let (fan_in, fan_out) = t.fans();
    (6.0 / (fan_in + fan_out) as f64).sqrt()
}

/// Uniform Glorot weights, zero biases, rounded to `f32` precision.
pub fn init_network<R: Rng + ?Sized>(
    config: NetworkConfig,
    rng: &mut R,
) -> Result<NetworkParams, NetworkError> {
    config.validate()?;
    let mut p = NetworkParams::zeros(config);
    for t in &mut p.tensors {
        if t.is_bias() {
            continue;
        }
        let b = init_bound(t);
        for v in &mut t.data {
            *v = rng.gen_range(-b..=b);
        }
    }
    p.quantize();
    Ok(p)
}
