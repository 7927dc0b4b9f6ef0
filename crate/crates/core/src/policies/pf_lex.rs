//! PF-LEX: prior-free learner built on chained confidence intervals.
//!
//! Each round every arm gets the interval `mean ± c(N)` in every objective,
//! where `c` depends only on the pull count. Starting from all arms, the
//! learner keeps the chain (in objective 1) around the arm with the highest
//! upper bound. Any arm of that chain whose radius still exceeds ε/2 is
//! explored uniformly at random. Once every chained arm is narrow it narrows
//! the set objective by objective and plays the optimistic arm of the last
//! objective.

use serde::{Deserialize, Serialize};

use super::chaining::{chained_components, Interval};
use super::estimator::EstimatorTable;
use super::Policy;
use crate::envs::RngStream;
use crate::error::{LexError, Result};
use crate::lexcore::ArmSet;

/// Confidence radius for an arm pulled `pulls` times; +∞ before the first pull.
pub fn pf_radius(pulls: u64, num_arms: usize, num_objectives: usize, delta: f64) -> f64 {
    if pulls == 0 {
        return f64::INFINITY;
    }
    let n = pulls as f64;
    let scale = (num_arms * num_objectives) as f64;
    let log_term = 1.0 + 2.0 * (scale * (1.0 + n).sqrt() / delta).ln();
    ((1.0 + n) / (n * n) * log_term).sqrt()
}

/// Universe over which the chain of objective i ≥ 2 is closed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainScope {
    /// Link only through arms that survived the previous objective.
    #[default]
    Candidates,
    /// Link through every arm, then keep the survivors of the previous objective.
    AllArms,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PfBranch {
    /// Some arm chained in objective 1 still has radius above ε/2.
    WideArm,
    /// Every chained arm is narrow; the optimistic arm of the last objective was played.
    Optimistic,
}

/// What happened during one PF-LEX selection.
#[derive(Debug, Clone, PartialEq)]
pub struct PfTrace {
    pub branch: PfBranch,
    /// `chains[k]` is the estimated optimal set after objective k+1. Only the
    /// first entry is computed on the wide-arm branch.
    pub chains: Vec<ArmSet>,
    /// Optimistic arm (highest upper bound) of each objective that was examined.
    pub optimistic: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct PfLex {
    est: EstimatorTable,
    epsilon: f64,
    delta: f64,
    scope: ChainScope,
    radius: Vec<f64>,
}

impl PfLex {
    pub fn new(num_arms: usize, num_objectives: usize, epsilon: f64, delta: f64) -> Result<Self> {
        if num_arms == 0 || num_objectives == 0 {
            return Err(LexError::Config(
                "learner needs at least one arm and one objective".into(),
            ));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(LexError::Config(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(LexError::Config(format!(
                "delta must lie in (0, 1), got {delta}"
            )));
        }
        Ok(Self {
            est: EstimatorTable::new(num_arms, num_objectives),
            epsilon,
            delta,
            scope: ChainScope::default(),
            radius: vec![f64::INFINITY; num_arms],
        })
    }

    pub fn with_scope(mut self, scope: ChainScope) -> Self {
        self.scope = scope;
        self
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn radius(&self, arm: usize) -> f64 {
        self.radius[arm]
    }

    /// Confidence interval of `arm` in `objective` at the current state.
    pub fn interval(&self, arm: usize, objective: usize) -> Interval {
        let m = self.est.mean(arm, objective);
        let c = self.radius[arm];
        Interval::new(m - c, m + c)
    }

    fn upper(&self, arm: usize, objective: usize) -> f64 {
        self.est.mean(arm, objective) + self.radius[arm]
    }

    /// Highest upper bound in `objective` among `arms`, lowest index on ties.
    fn optimistic_arm(&self, arms: &[usize], objective: usize) -> usize {
        let mut best = arms[0];
        let mut best_u = self.upper(best, objective);
        for &a in &arms[1..] {
            let u = self.upper(a, objective);
            if u > best_u {
                best = a;
                best_u = u;
            }
        }
        best
    }

    /// Chain containing `anchor` in `objective`, restricted to `within`.
    fn chain(&self, within: &[usize], anchor: usize, objective: usize) -> ArmSet {
        let universe: Vec<usize> = match self.scope {
            ChainScope::Candidates => within.to_vec(),
            ChainScope::AllArms => (0..self.est.num_arms()).collect(),
        };
        let intervals: Vec<Interval> = universe
            .iter()
            .map(|&a| self.interval(a, objective))
            .collect();
        let mut chain: ArmSet = chained_components(&intervals)
            .into_iter()
            .find(|c| c.iter().any(|&k| universe[k] == anchor))
            .expect("anchor belongs to the universe")
            .into_iter()
            .map(|k| universe[k])
            .collect();
        if self.scope == ChainScope::AllArms {
            chain.retain(|a| within.binary_search(a).is_ok());
        }
        chain
    }

    /// Selects an arm and reports how.
    pub fn select_traced(&mut self, rng: &mut RngStream) -> (usize, PfTrace) {
        let arms = self.est.num_arms();
        let objs = self.est.num_objectives();
        let all: ArmSet = (0..arms).collect();

        let top = self.optimistic_arm(&all, 0);
        let first = self.chain(&all, top, 0);
        let half_eps = self.epsilon / 2.0;
        let wide: Vec<usize> = first
            .iter()
            .copied()
            .filter(|&a| self.radius[a] > half_eps)
            .collect();
        if !wide.is_empty() {
            let arm = wide[rng.below(wide.len())];
            let trace = PfTrace {
                branch: PfBranch::WideArm,
                chains: vec![first],
                optimistic: vec![top],
            };
            return (arm, trace);
        }

        let mut optimistic = vec![top];
        let mut chains = vec![first];
        for obj in 1..objs.saturating_sub(1) {
            let prev = chains.last().expect("objective 1 chain exists");
            let anchor = self.optimistic_arm(prev, obj);
            let next = self.chain(prev, anchor, obj);
            optimistic.push(anchor);
            chains.push(next);
        }
        let arm = if objs == 1 {
            top
        } else {
            let last = self.optimistic_arm(chains.last().expect("nonempty"), objs - 1);
            optimistic.push(last);
            last
        };
        let trace = PfTrace {
            branch: PfBranch::Optimistic,
            chains,
            optimistic,
        };
        (arm, trace)
    }
}

impl Policy for PfLex {
    fn name(&self) -> &'static str {
        "PF-LEX"
    }

    fn num_arms(&self) -> usize {
        self.est.num_arms()
    }

    fn num_objectives(&self) -> usize {
        self.est.num_objectives()
    }

    fn select(&mut self, _round: u64, rng: &mut RngStream) -> usize {
        self.select_traced(rng).0
    }

    fn observe(&mut self, arm: usize, reward: &[f64]) -> Result<()> {
        super::check_observation(arm, reward, self.num_arms(), self.num_objectives())?;
        self.est.observe(arm, reward);
        self.radius[arm] = pf_radius(
            self.est.pulls(arm),
            self.num_arms(),
            self.num_objectives(),
            self.delta,
        );
        Ok(())
    }

    fn estimates(&self) -> &EstimatorTable {
        &self.est
    }
}
