//! Reward generation.
//!
//! The RNG is ChaCha8 (via `rand_chacha` 0.9). Its output stream is fixed by
//! the algorithm and the seed, so a given seed replays the same rewards on
//! every platform. Each replication derives two streams from its seed: one
//! for the environment and one for the learner's internal coin flips.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{LexError, Result};
use crate::lexcore::RewardMatrix;

/// Reward distribution family. Objectives are drawn independently.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RewardFamily {
    /// Each objective is an independent Bernoulli with the given mean.
    #[default]
    Bernoulli,
    /// Each objective is mean + standard normal noise.
    Gaussian,
}

impl std::fmt::Display for RewardFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RewardFamily::Bernoulli => f.write_str("bernoulli"),
            RewardFamily::Gaussian => f.write_str("gaussian"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BanditInstance {
    pub means: RewardMatrix,
    pub family: RewardFamily,
    pub label: String,
}

impl BanditInstance {
    pub fn new(
        means: RewardMatrix,
        family: RewardFamily,
        label: impl Into<String>,
    ) -> Result<Self> {
        if family == RewardFamily::Bernoulli {
            for (arm, row) in means.rows().enumerate() {
                if let Some(obj) = row.iter().position(|m| !(0.0..=1.0).contains(m)) {
                    return Err(LexError::Config(format!(
                        "Bernoulli mean {} of arm {} objective {} is outside [0, 1]",
                        row[obj],
                        arm + 1,
                        obj + 1
                    )));
                }
            }
        }
        Ok(Self {
            means,
            family,
            label: label.into(),
        })
    }

    pub fn num_arms(&self) -> usize {
        self.means.num_arms()
    }

    pub fn num_objectives(&self) -> usize {
        self.means.num_objectives()
    }

    /// Draws one reward vector for `arm` into `out`.
    pub fn sample_into(&self, arm: usize, rng: &mut RngStream, out: &mut [f64]) -> Result<()> {
        if arm >= self.num_arms() {
            return Err(LexError::Contract(format!(
                "arm {} out of range for {} arms",
                arm + 1,
                self.num_arms()
            )));
        }
        let row = self.means.row(arm);
        match self.family {
            RewardFamily::Bernoulli => {
                for (o, &p) in out.iter_mut().zip(row) {
                    *o = if rng.uniform() < p { 1.0 } else { 0.0 };
                }
            }
            RewardFamily::Gaussian => {
                for (o, &m) in out.iter_mut().zip(row) {
                    *o = m + rng.standard_normal();
                }
            }
        }
        Ok(())
    }

    pub fn sample(&self, arm: usize, rng: &mut RngStream) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.num_objectives()];
        self.sample_into(arm, rng, &mut out)?;
        Ok(out)
    }
}

/// Seeded random stream.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    /// Independent sub-stream `stream` of the same seed.
    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform on [0, 1).
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Uniform integer in 0..n. `n` must be positive.
    #[inline]
    pub fn below(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    #[inline]
    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }
}

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for one (replication, learner) pair of an experiment.
pub fn derive_seed(master: u64, replication: u64, learner: u64) -> u64 {
    const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;
    let mut h = mix64(master.wrapping_add(GOLDEN));
    h = mix64(h ^ replication.wrapping_mul(GOLDEN).wrapping_add(1));
    mix64(h ^ learner.wrapping_mul(GOLDEN).wrapping_add(2))
}
