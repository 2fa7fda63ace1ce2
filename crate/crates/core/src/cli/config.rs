//! Flat `key = value` run configuration.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use super::CliError;
use crate::trainer::TrainerConfig;

/// Every accepted key, in echo order.
pub const KEYS: &[&str] = &[
    "architecture",
    "layers",
    "channels",
    "scalars",
    "baseline_channels",
    "leaky_slope",
    "compat",
    "workers",
    "games_per_worker",
    "batch_size",
    "batches_per_step",
    "refresh_period",
    "lr0",
    "lr_decay",
    "gamma",
    "alpha_policy",
    "alpha_value",
    "alpha_entropy",
    "alpha_activity",
    "alpha_weight",
    "win_reward",
    "vp_reward",
    "turn_cap",
    "seed",
    "staleness_limit",
    "max_steps",
    "max_updates",
    "checkpoint_every",
    "eval_every",
    "eval_games",
    "eval_greedy",
    "single_threaded",
    "fixed_opponent",
    "out_dir",
    "metrics_file",
];

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Config(format!("bad value for '{key}': '{value}'")))
}

fn optional_path(value: &str) -> Option<PathBuf> {
    (!value.is_empty()).then(|| PathBuf::from(value))
}

fn set(c: &mut TrainerConfig, key: &str, v: &str) -> Result<(), CliError> {
    let n = &mut c.network;
    let k = &mut c.coefficients;
    match key {
        "architecture" => n.architecture = v.parse().map_err(CliError::Config)?,
        "layers" => n.layers = parse(key, v)?,
        "channels" => n.channels = parse(key, v)?,
        "scalars" => n.scalars = parse(key, v)?,
        "baseline_channels" => n.baseline_channels = parse(key, v)?,
        "leaky_slope" => n.leaky_slope = parse(key, v)?,
        "compat" => n.compat = parse(key, v)?,
        "workers" => c.workers = parse(key, v)?,
        "games_per_worker" => c.games_per_worker = parse(key, v)?,
        "batch_size" => c.batch_size = parse(key, v)?,
        "batches_per_step" => c.batches_per_step = parse(key, v)?,
        "refresh_period" => c.refresh_period = parse(key, v)?,
        "lr0" => c.lr0 = parse(key, v)?,
        "lr_decay" => c.lr_decay = parse(key, v)?,
        "gamma" => k.gamma = parse(key, v)?,
        "alpha_policy" => k.policy = parse(key, v)?,
        "alpha_value" => k.value = parse(key, v)?,
        "alpha_entropy" => k.entropy = parse(key, v)?,
        "alpha_activity" => k.activity = parse(key, v)?,
        "alpha_weight" => k.weight_decay = parse(key, v)?,
        "win_reward" => c.win_reward = parse(key, v)?,
        "vp_reward" => c.vp_reward = parse(key, v)?,
        "turn_cap" => c.turn_cap = parse(key, v)?,
        "seed" => c.seed = parse(key, v)?,
        "staleness_limit" => c.staleness_limit = parse(key, v)?,
        "max_steps" => c.max_steps = parse(key, v)?,
        "max_updates" => c.max_updates = parse(key, v)?,
        "checkpoint_every" => c.checkpoint_every = parse(key, v)?,
        "eval_every" => c.eval_every = parse(key, v)?,
        "eval_games" => c.eval_games = parse(key, v)?,
        "eval_greedy" => c.eval_greedy = parse(key, v)?,
        "single_threaded" => c.single_threaded = parse(key, v)?,
        "fixed_opponent" => c.fixed_opponent = optional_path(v),
        "out_dir" => c.out_dir = PathBuf::from(v),
        "metrics_file" => c.metrics_file = optional_path(v),
        _ => return Err(CliError::Config(format!("unknown config key '{key}'"))),
    }
    Ok(())
}

/// Parses a config file on top of the defaults. Blank lines and `#`
/// comments are ignored; repeated keys are rejected.
pub fn parse_config(text: &str) -> Result<TrainerConfig, CliError> {
    let mut cfg = TrainerConfig::default();
    let mut seen = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected 'key = value'", no + 1)))?;
        let key = key.trim();
        if seen.contains(&key) {
            return Err(CliError::Config(format!("duplicate config key '{key}'")));
        }
        set(&mut cfg, key, value.trim())?;
        seen.push(key);
    }
    Ok(cfg)
}

fn path_text(p: &Option<PathBuf>) -> String {
    p.as_ref()
        .map(|p| p.display().to_string())
        .unwrap_or_default()
}

/// Effective configuration in the same format `parse_config` reads.
pub fn config_to_text(c: &TrainerConfig) -> String {
    let n = &c.network;
    let k = &c.coefficients;
    let values: Vec<String> = vec![
        n.architecture.to_string(),
        n.layers.to_string(),
        n.channels.to_string(),
        n.scalars.to_string(),
        n.baseline_channels.to_string(),
        format!("{:e}", n.leaky_slope),
        n.compat.to_string(),
        c.workers.to_string(),
        c.games_per_worker.to_string(),
        c.batch_size.to_string(),
        c.batches_per_step.to_string(),
        c.refresh_period.to_string(),
        format!("{:e}", c.lr0),
        format!("{:e}", c.lr_decay),
        format!("{:e}", k.gamma),
        format!("{:e}", k.policy),
        format!("{:e}", k.value),
        format!("{:e}", k.entropy),
        format!("{:e}", k.activity),
        format!("{:e}", k.weight_decay),
        format!("{:e}", c.win_reward),
        format!("{:e}", c.vp_reward),
        c.turn_cap.to_string(),
        c.seed.to_string(),
        c.staleness_limit.to_string(),
        c.max_steps.to_string(),
        c.max_updates.to_string(),
        c.checkpoint_every.to_string(),
        c.eval_every.to_string(),
        c.eval_games.to_string(),
        c.eval_greedy.to_string(),
        c.single_threaded.to_string(),
        path_text(&c.fixed_opponent),
        c.out_dir.display().to_string(),
        path_text(&c.metrics_file),
    ];
    let mut out = String::new();
    for (key, value) in KEYS.iter().zip(values) {
        let _ = writeln!(out, "{key} = {value}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::Architecture;

    #[test]
    fn defaults_echo() {
        let text = config_to_text(&TrainerConfig::default());
        for line in [
            "lr0 = 3e-3",
            "lr_decay = 2e-3",
            "alpha_value = 1e3",
            "alpha_entropy = 1e-4",
            "alpha_activity = 1e-8",
            "alpha_weight = 1e-4",
            "workers = 16",
            "batch_size = 64",
            "win_reward = 7.5e-1",
            "vp_reward = 2e-2",
        ] {
            assert!(text.lines().any(|l| l == line), "missing '{line}'");
        }
        assert_eq!(text.lines().count(), KEYS.len());
    }

    #[test]
    fn round_trip() {
        let mut c = TrainerConfig::default();
        c.network.architecture = Architecture::CnnRes;
        c.lr0 = 0.1 + 0.2;
        c.coefficients.gamma = 0.97;
        c.fixed_opponent = Some(PathBuf::from("a/b.xdim"));
        c.single_threaded = true;
        assert_eq!(parse_config(&config_to_text(&c)).unwrap(), c);
        let d = TrainerConfig::default();
        assert_eq!(parse_config(&config_to_text(&d)).unwrap(), d);
    }

    #[test]
    fn comments_and_errors() {
        let c = parse_config("# run\n\nlayers = 3  # shallow\nseed=9\n").unwrap();
        assert_eq!((c.network.layers, c.seed), (3, 9));
        let e = parse_config("depth = 3").unwrap_err().to_string();
        assert!(e.contains("depth"));
        assert!(parse_config("layers = three").is_err());
        assert!(parse_config("layers").is_err());
        assert!(parse_config("seed = 1\nseed = 2").is_err());
    }
}
