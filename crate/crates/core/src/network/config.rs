use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::NetworkError;
use crate::encoding::action::{COMPAT_SCALAR_SLOTS, NUM_SCALAR_SLOTS};
use crate::encoding::{NUM_CHANNELS, NUM_SCALARS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Architecture {
    Xdim,
    XdimRes,
    CnnRes,
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Architecture::Xdim => "xdim",
            Architecture::XdimRes => "xdimres",
            Architecture::CnnRes => "cnnres",
        })
    }
}

impl FromStr for Architecture {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "xdim" => Ok(Architecture::Xdim),
            "xdimres" => Ok(Architecture::XdimRes),
            "cnnres" => Ok(Architecture::CnnRes),
            _ => Err(format!(
                "unknown architecture '{s}' (xdim, xdimres, cnnres)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub architecture: Architecture,
    pub layers: usize,
    /// Hidden 2D channels of the cross-dimensional variants.
    pub channels: usize,
    /// Hidden scalars of the cross-dimensional variants.
    pub scalars: usize,
    /// Hidden channels of the convolutional baseline.
    pub baseline_channels: usize,
    pub leaky_slope: f64,
    /// Pad scalar logits to the 117-slot layout.
    pub compat: bool,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        NetworkConfig {
            architecture: Architecture::Xdim,
            layers: 8,
            channels: 15,
            scalars: 40,
            baseline_channels: 40,
            leaky_slope: 0.01,
            compat: false,
        }
    }
}

impl NetworkConfig {
    pub fn validate(&self) -> Result<(), NetworkError> {
        let bad = |m: &str| Err(NetworkError::InvalidConfig(m.to_string()));
        if self.layers < 2 {
            return bad("layers must be at least 2");
        }
        if self.channels == 0 || self.scalars == 0 || self.baseline_channels == 0 {
            return bad("channel and scalar widths must be positive");
        }
        if !self.leaky_slope.is_finite() {
            return bad("leaky_slope must be finite");
        }
        Ok(())
    }

    pub fn input_channels(&self) -> usize {
        NUM_CHANNELS
    }

    pub fn input_scalars(&self) -> usize {
        NUM_SCALARS
    }

    pub fn scalar_logits(&self) -> usize {
        if self.compat {
            COMPAT_SCALAR_SLOTS
        } else {
            NUM_SCALAR_SLOTS
        }
    }

    /// Width of the 2D stream after the last hidden layer.
    pub fn hidden_channels(&self) -> usize {
        match self.architecture {
            Architecture::CnnRes => self.baseline_channels,
            _ => self.channels,
        }
    }

    pub fn is_residual(&self) -> bool {
        matches!(
            self.architecture,
            Architecture::XdimRes | Architecture::CnnRes
        )
    }

    /// Flat `key=value` lines, the form stored in checkpoints.
    pub fn to_text(&self) -> String {
        format!(
            "architecture={}\nlayers={}\nchannels={}\nscalars={}\nbaseline_channels={}\nleaky_slope={:e}\ncompat={}\n",
            self.architecture,
            self.layers,
            self.channels,
            self.scalars,
            self.baseline_channels,
            self.leaky_slope,
            self.compat
        )
    }

    pub fn from_text(text: &str) -> Result<Self, NetworkError> {
        let mut cfg = NetworkConfig::default();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| NetworkError::InvalidConfig(format!("malformed line '{line}'")))?;
            let (k, v) = (k.trim(), v.trim());
            match k {
                "architecture" => {
                    cfg.architecture = v.parse().map_err(NetworkError::InvalidConfig)?
                }
                "layers" => cfg.layers = parse_value(k, v)?,
                "channels" => cfg.channels = parse_value(k, v)?,
                "scalars" => cfg.scalars = parse_value(k, v)?,
                "baseline_channels" => cfg.baseline_channels = parse_value(k, v)?,
                "leaky_slope" => cfg.leaky_slope = parse_value(k, v)?,
                "compat" => cfg.compat = parse_value(k, v)?,
                _ => return Err(NetworkError::InvalidConfig(format!("unknown key '{k}'"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, NetworkError> {
    value
        .parse()
        .map_err(|_| NetworkError::InvalidConfig(format!("bad value for {key}: '{value}'")))
}
