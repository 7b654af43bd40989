//! Replicates on a fixed-size worker pool, merged in replicate order.

use rayon::prelude::*;
use walklab_core::seeding::{replicate_rng, ReplicateRng};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy)]
pub struct Pool {
    seed: u64,
    workers: usize,
}

impl Pool {
    pub fn new(seed: u64, workers: usize) -> Self {
        Self { seed, workers: workers.max(1) }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// Runs `f(r, rng_r)` for `r` in `offset..offset + count`; replicate `r` always sees
    /// the stream `r` of the master seed, so the result does not depend on `workers`.
    pub fn run<T, F>(&self, offset: u64, count: usize, f: F) -> CliResult<Vec<T>>
    where
        T: Send,
        F: Fn(u64, &mut ReplicateRng) -> CliResult<T> + Sync,
    {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(self.workers).build().map_err(|e| CliError::Config(format!("worker pool: {e}")))?;
        pool.install(|| {
            (0..count as u64)
                .into_par_iter()
                .map(|k| {
                    let r = offset + k;
                    f(r, &mut replicate_rng(self.seed, r))
                })
                .collect()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn results_do_not_depend_on_worker_count() {
        let draw = |r: u64, rng: &mut ReplicateRng| Ok((r, rng.random::<u64>()));
        let one = Pool::new(5, 1).run(10, 500, draw).unwrap();
        let four = Pool::new(5, 4).run(10, 500, draw).unwrap();
        assert_eq!(one, four);
        assert_eq!(one[0].0, 10);
        assert_ne!(one, Pool::new(6, 1).run(10, 500, draw).unwrap());
    }
}
