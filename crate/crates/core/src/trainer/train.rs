use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc::sync_channel;
use std::sync::{Arc, RwLock};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::TrainerConfig;
use super::pool::OpponentPool;
use super::schedule::lr_schedule;
use super::worker::{Batch, Worker, WorkerSettings};
use super::TrainError;
use crate::evaluation::{arena, derive_seed, Agent, ArenaOptions, PolicyMode};
use crate::network::{apply_update, checkpoint, init_network, loss_and_gradients, NetworkParams};
use crate::thread_limit;

pub const METRICS_HEADER: &str =
    "step,updates,lr,policy_loss,value_loss,entropy,logit_l2,avg_reward,winrate_vs_random";

/// One row of the metrics stream, written after every update.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    /// Completed training steps after this update.
    pub step: u64,
    pub updates: u64,
    /// Rate used for this update.
    pub lr: f64,
    pub policy_loss: f64,
    pub value_loss: f64,
    pub entropy: f64,
    /// Weighted policy activity term.
    pub logit_l2: f64,
    pub avg_reward: Option<f64>,
    pub winrate_vs_random: Option<f64>,
}

impl MetricsRow {
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.step,
            self.updates,
            self.lr,
            self.policy_loss,
            self.value_loss,
            self.entropy,
            self.logit_l2,
            opt(self.avg_reward),
            opt(self.winrate_vs_random)
        )
    }
}

#[derive(Debug, Clone)]
pub struct TrainSummary {
    pub params: NetworkParams,
    pub rows: Vec<MetricsRow>,
    pub updates: u64,
    pub steps: u64,
    /// Batches rejected for exceeding the staleness limit.
    pub dropped_batches: u64,
    /// Pool stamps after each refresh, keyed by training step.
    pub pool_history: Vec<(u64, Vec<u64>)>,
    pub final_checkpoint: PathBuf,
}

pub fn checkpoint_path(dir: &Path, step: u64) -> PathBuf {
    dir.join(format!("ckpt_step{step}.xdim"))
}

/// Training step encoded in a `ckpt_step{T}.xdim` file name.
pub fn step_from_checkpoint(path: &Path) -> Option<u64> {
    path.file_name()?
        .to_str()?
        .strip_prefix("ckpt_step")?
        .strip_suffix(".xdim")?
        .parse()
        .ok()
}

fn io_err(path: &Path, e: std::io::Error) -> TrainError {
    TrainError::Io(format!("{}: {e}", path.display()))
}

/// Owns the mutable parameters and everything the update loop touches.
struct Updater<'a> {
    cfg: &'a TrainerConfig,
    params: NetworkParams,
    updates: u64,
    pool: OpponentPool,
    rows: Vec<MetricsRow>,
    dropped: u64,
    pool_history: Vec<(u64, Vec<u64>)>,
    metrics: BufWriter<File>,
    last_checkpoint: Option<(u64, PathBuf)>,
}

impl Updater<'_> {
    fn step(&self) -> u64 {
        self.updates / self.cfg.batches_per_step
    }

    fn done(&self) -> bool {
        let c = self.cfg;
        (c.max_updates > 0 && self.updates >= c.max_updates)
            || (c.max_steps > 0 && self.updates >= c.max_steps * c.batches_per_step)
    }

    /// Consumes one batch. Returns `false` when the batch was dropped.
    fn consume(&mut self, batch: &Batch) -> Result<bool, TrainError> {
        let lag = self.updates.saturating_sub(batch.policy_version);
        if lag > self.cfg.staleness_limit {
            log::error!(
                "dropping batch from worker {}: {} updates stale (limit {})",
                batch.worker,
                lag,
                self.cfg.staleness_limit
            );
            self.dropped += 1;
            return Ok(false);
        }
        let lr = lr_schedule(self.cfg.lr0, self.cfg.lr_decay, self.step());
        let (d, grads) =
            loss_and_gradients(&self.params, &batch.experiences, &self.cfg.coefficients)?;
        apply_update(&mut self.params, &grads, lr)?;
        if !self.params.is_finite() {
            return Err(TrainError::Diverged(self.updates + 1));
        }
        self.updates += 1;

        let avg_reward = (!batch.final_rewards.is_empty())
            .then(|| batch.final_rewards.iter().sum::<f64>() / batch.final_rewards.len() as f64);
        let mut row = MetricsRow {
            step: self.step(),
            updates: self.updates,
            lr,
            policy_loss: d.policy_loss,
            value_loss: d.value_loss,
            entropy: d.entropy,
            logit_l2: d.activity_loss,
            avg_reward,
            winrate_vs_random: None,
        };
        if self.updates.is_multiple_of(self.cfg.batches_per_step) {
            row.winrate_vs_random = self.on_step_boundary()?;
        }
        writeln!(self.metrics, "{}", row.to_csv())
            .and_then(|_| self.metrics.flush())
            .map_err(|e| TrainError::Io(format!("metrics: {e}")))?;
        log::debug!("update {} lr {lr:e} loss {:e}", self.updates, d.total);
        self.rows.push(row);
        Ok(true)
    }

    fn on_step_boundary(&mut self) -> Result<Option<f64>, TrainError> {
        let t = self.step();
        if t.is_multiple_of(self.cfg.refresh_period) {
            if let Some(i) = self.pool.refresh(Arc::new(self.params.clone()), t) {
                log::info!("step {t}: refreshed opponent slot {i}");
                self.pool_history.push((t, self.pool.stamps()));
            }
        }
        if self.cfg.checkpoint_every > 0 && t.is_multiple_of(self.cfg.checkpoint_every) {
            self.save_checkpoint()?;
        }
        if self.cfg.eval_every > 0 && t.is_multiple_of(self.cfg.eval_every) {
            let stats = arena(
                &Agent::Network {
                    params: Arc::new(self.params.clone()),
                    mode: if self.cfg.eval_greedy {
                        PolicyMode::Greedy
                    } else {
                        PolicyMode::Sample
                    },
                },
                &Agent::Random,
                &ArenaOptions {
                    games: self.cfg.eval_games,
                    seed: derive_seed(self.cfg.seed, t),
                    turn_cap: self.cfg.turn_cap,
                    threads: thread_limit(self.cfg.workers),
                },
            )?;
            log::info!("step {t}: win-rate vs random {:.3}", stats.win_rate());
            return Ok(Some(stats.win_rate()));
        }
        Ok(None)
    }

    fn save_checkpoint(&mut self) -> Result<PathBuf, TrainError> {
        let t = self.step();
        if let Some((u, p)) = &self.last_checkpoint {
            if *u == self.updates {
                return Ok(p.clone());
            }
        }
        let path = checkpoint_path(&self.cfg.out_dir, t);
        checkpoint::save(&self.params, &path)?;
        log::info!("wrote {}", path.display());
        self.last_checkpoint = Some((self.updates, path.clone()));
        Ok(path)
    }
}

/// Runs training until `max_steps` or `max_updates`, optionally resuming
/// from a `ckpt_step{T}.xdim` checkpoint.
pub fn train(cfg: &TrainerConfig, resume: Option<&Path>) -> Result<TrainSummary, TrainError> {
    cfg.validate()?;
    fs::create_dir_all(&cfg.out_dir).map_err(|e| io_err(&cfg.out_dir, e))?;

    let (params, updates) = match resume {
        Some(path) => {
            let t = step_from_checkpoint(path).ok_or_else(|| {
                TrainError::Config(format!(
                    "cannot read the training step from '{}'",
                    path.display()
                ))
            })?;
            let p = checkpoint::load(path)?;
            if p.config != cfg.network {
                return Err(TrainError::Config(
                    "checkpoint network does not match the configured network".into(),
                ));
            }
            (p, t * cfg.batches_per_step)
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, u64::MAX - 1));
            (init_network(cfg.network, &mut rng)?, 0)
        }
    };
    let start_step = updates / cfg.batches_per_step;
    let pool = match &cfg.fixed_opponent {
        Some(path) => OpponentPool::fixed(cfg.workers, Arc::new(checkpoint::load(path)?)),
        None => OpponentPool::new(cfg.workers, Arc::new(params.clone()), start_step),
    };

    let metrics_path = cfg.metrics_path();
    if let Some(parent) = metrics_path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
    }
    let fresh = resume.is_none() || !metrics_path.exists();
    let file = OpenOptions::new()
        .create(true)
        .write(true)
        .append(!fresh)
        .truncate(fresh)
        .open(&metrics_path)
        .map_err(|e| io_err(&metrics_path, e))?;
    let mut metrics = BufWriter::new(file);
    if fresh {
        writeln!(metrics, "{METRICS_HEADER}").map_err(|e| io_err(&metrics_path, e))?;
    }

    let mut up = Updater {
        cfg,
        params,
        updates,
        pool,
        rows: Vec::new(),
        dropped: 0,
        pool_history: Vec::new(),
        metrics,
        last_checkpoint: None,
    };

    let settings = WorkerSettings {
        games: cfg.games_per_worker,
        batch_size: cfg.batch_size,
        turn_cap: cfg.turn_cap,
        win_reward: cfg.win_reward,
        vp_reward: cfg.vp_reward,
    };
    let seed = if updates == 0 {
        cfg.seed
    } else {
        derive_seed(cfg.seed, updates)
    };
    let workers: Vec<Worker> = (0..cfg.workers)
        .map(|i| Worker::new(i, settings, seed))
        .collect();

    if !up.done() {
        if cfg.single_threaded {
            run_interleaved(&mut up, workers)?;
        } else {
            run_threaded(&mut up, workers)?;
        }
    }
    let final_checkpoint = up.save_checkpoint()?;
    Ok(TrainSummary {
        steps: up.step(),
        updates: up.updates,
        dropped_batches: up.dropped,
        pool_history: up.pool_history,
        rows: up.rows,
        params: up.params,
        final_checkpoint,
    })
}

/// Workers take turns in a fixed order, always with the current weights.
fn run_interleaved(up: &mut Updater, mut workers: Vec<Worker>) -> Result<(), TrainError> {
    let mut turn = 0;
    while !up.done() {
        let n = workers.len();
        let w = &mut workers[turn % n];
        turn += 1;
        let opponent = up.pool.opponent(w.id).params.clone();
        let batch = w.generate_batch(&up.params, up.updates, &opponent)?;
        up.consume(&batch)?;
    }
    Ok(())
}

fn run_threaded(up: &mut Updater, workers: Vec<Worker>) -> Result<(), TrainError> {
    let threads = thread_limit(workers.len());
    let learner = RwLock::new((Arc::new(up.params.clone()), up.updates));
    let pool = RwLock::new(up.pool.clone());
    let stop = AtomicBool::new(false);
    let (tx, rx) = sync_channel(threads);

    let mut groups: Vec<Vec<Worker>> = (0..threads).map(|_| Vec::new()).collect();
    for w in workers {
        groups[w.id % threads].push(w);
    }

    std::thread::scope(|s| {
        for mut group in groups {
            let tx = tx.clone();
            let (learner, pool, stop) = (&learner, &pool, &stop);
            s.spawn(move || {
                while !stop.load(Ordering::Relaxed) {
                    for w in group.iter_mut() {
                        let (params, version) = {
                            let g = learner.read().expect("learner lock");
                            (g.0.clone(), g.1)
                        };
                        let opponent = pool
                            .read()
                            .expect("pool lock")
                            .opponent(w.id)
                            .params
                            .clone();
                        let batch = w.generate_batch(&params, version, &opponent);
                        if tx.send(batch).is_err() {
                            return;
                        }
                    }
                }
            });
        }
        drop(tx);

        let result = (|| {
            for batch in rx.iter() {
                if up.consume(&batch?)? {
                    *learner.write().expect("learner lock") =
                        (Arc::new(up.params.clone()), up.updates);
                    if up.updates.is_multiple_of(up.cfg.batches_per_step) {
                        *pool.write().expect("pool lock") = up.pool.clone();
                    }
                }
                if up.done() {
                    break;
                }
            }
            Ok(())
        })();
        stop.store(true, Ordering::Relaxed);
        drop(rx);
        result
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::NetworkConfig;

    #[test]
    fn checkpoint_names() {
        let p = checkpoint_path(Path::new("/tmp/run"), 40);
        assert_eq!(p, PathBuf::from("/tmp/run/ckpt_step40.xdim"));
        assert_eq!(step_from_checkpoint(&p), Some(40));
        assert_eq!(step_from_checkpoint(Path::new("model.xdim")), None);
    }

    #[test]
    fn row_format() {
        let r = MetricsRow {
            step: 1,
            updates: 2,
            lr: 3e-3,
            policy_loss: 0.5,
            value_loss: 1.0,
            entropy: 2.0,
            logit_l2: 0.0,
            avg_reward: None,
            winrate_vs_random: Some(0.75),
        };
        assert_eq!(r.to_csv(), "1,2,0.003,0.5,1,2,0,,0.75");
        assert_eq!(METRICS_HEADER.split(',').count(), 9);
    }

    #[test]
    fn tiny_interleaved_run() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = TrainerConfig {
            network: NetworkConfig {
                layers: 2,
                channels: 2,
                scalars: 3,
                ..NetworkConfig::default()
            },
            workers: 2,
            games_per_worker: 2,
            batch_size: 8,
            batches_per_step: 2,
            refresh_period: 1,
            max_updates: 4,
            checkpoint_every: 0,
            turn_cap: 40,
            single_threaded: true,
            out_dir: dir.path().to_path_buf(),
            ..TrainerConfig::default()
        };
        let s = train(&cfg, None).unwrap();
        assert_eq!(s.rows.len(), 4);
        assert_eq!(s.steps, 2);
        assert_eq!(s.pool_history.len(), 2);
        assert_eq!(s.final_checkpoint, dir.path().join("ckpt_step2.xdim"));
        let text = fs::read_to_string(dir.path().join("metrics.csv")).unwrap();
        assert_eq!(text.lines().count(), 5);
    }
}
