use std::sync::Arc;

use crate::network::NetworkParams;

#[derive(Debug, Clone)]
pub struct PoolSlot {
    pub params: Arc<NetworkParams>,
    /// Training step at which the snapshot was taken.
    pub stamp: u64,
}

/// Frozen past versions of the learner, one per worker.
#[derive(Debug, Clone)]
pub struct OpponentPool {
    pub slots: Vec<PoolSlot>,
    /// Fixed pools ignore refreshes.
    pub fixed: bool,
}

impl OpponentPool {
    pub fn new(size: usize, initial: Arc<NetworkParams>, stamp: u64) -> Self {
        OpponentPool {
            slots: vec![
                PoolSlot {
                    params: initial,
                    stamp
                };
                size.max(1)
            ],
            fixed: false,
        }
    }

    pub fn fixed(size: usize, opponent: Arc<NetworkParams>) -> Self {
        OpponentPool {
            fixed: true,
            ..OpponentPool::new(size, opponent, 0)
        }
    }

    pub fn opponent(&self, worker: usize) -> &PoolSlot {
        &self.slots[worker % self.slots.len()]
    }

    pub fn stamps(&self) -> Vec<u64> {
        self.slots.iter().map(|s| s.stamp).collect()
    }

    /// Replaces the oldest slot (lowest index among ties) with `current`.
    /// Returns the replaced index, or `None` for a fixed pool.
    pub fn refresh(&mut self, current: Arc<NetworkParams>, step: u64) -> Option<usize> {
        if self.fixed {
            return None;
        }
        let (i, _) = self
            .slots
            .iter()
            .enumerate()
            .min_by_key(|(i, s)| (s.stamp, *i))
            .expect("pool is never empty");
        self.slots[i] = PoolSlot {
            params: current,
            stamp: step,
        };
        Some(i)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::NetworkConfig;

    fn params() -> Arc<NetworkParams> {
        Arc::new(NetworkParams::zeros(NetworkConfig {
            layers: 2,
            channels: 1,
            scalars: 1,
            ..NetworkConfig::default()
        }))
    }

    #[test]
    fn warmed_up_pool_spans_750_steps() {
        let mut pool = OpponentPool::new(16, params(), 0);
        assert!(pool.stamps().iter().all(|&s| s == 0));
        for k in 1..=40u64 {
            let before = pool.stamps();
            let min = *before.iter().min().unwrap();
            let i = pool.refresh(params(), 50 * k).unwrap();
            assert_eq!(before[i], min);
            let after = pool.stamps();
            let changed = before.iter().zip(&after).filter(|(a, b)| a != b).count();
            assert_eq!(changed, 1);
        }
        let s = pool.stamps();
        let span = s.iter().max().unwrap() - s.iter().min().unwrap();
        assert_eq!(span, 750);
        let unique: std::collections::BTreeSet<_> = s.iter().collect();
        assert_eq!(unique.len(), 16);
    }

    #[test]
    fn fixed_pool_never_changes() {
        let mut pool = OpponentPool::fixed(4, params());
        assert_eq!(pool.refresh(params(), 50), None);
        assert_eq!(pool.stamps(), vec![0; 4]);
    }
}
