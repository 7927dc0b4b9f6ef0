//! Learners behind one interface: `select` an arm for round t, then `observe`
//! its reward vector.

mod chaining;
mod estimator;
mod mean_lex;
mod pf_lex;

use serde::{Deserialize, Serialize};

pub use chaining::{chained_components, component_of, Interval};
pub use estimator::EstimatorTable;
pub use mean_lex::{
    exploration_width, nom_lex_candidates, om_lex_candidates, CandidateRule, MeanLex, MeanLexChoice,
};
pub use pf_lex::{pf_radius, ChainScope, PfBranch, PfLex, PfTrace};

use crate::envs::RngStream;
use crate::error::{LexError, Result};

pub trait Policy: Send {
    fn name(&self) -> &'static str;
    fn num_arms(&self) -> usize;
    /// Objectives the learner itself looks at.
    fn num_objectives(&self) -> usize;
    /// Arm to play in 1-based `round`.
    fn select(&mut self, round: u64, rng: &mut RngStream) -> usize;
    /// Feeds back the full reward vector of the instance.
    fn observe(&mut self, arm: usize, reward: &[f64]) -> Result<()>;
    fn estimates(&self) -> &EstimatorTable;
}

pub(crate) fn check_observation(
    arm: usize,
    reward: &[f64],
    num_arms: usize,
    num_objectives: usize,
) -> Result<()> {
    if arm >= num_arms {
        return Err(LexError::Contract(format!(
            "observed arm {} but only {} arms exist",
            arm + 1,
            num_arms
        )));
    }
    if reward.len() != num_objectives {
        return Err(LexError::Contract(format!(
            "reward has {} objectives, learner expects {}",
            reward.len(),
            num_objectives
        )));
    }
    Ok(())
}

/// Learns from objective 1 only, as if the instance had a single objective.
pub struct SingleObjective<P> {
    inner: P,
}

impl<P: Policy> SingleObjective<P> {
    pub fn new(inner: P) -> Result<Self> {
        if inner.num_objectives() != 1 {
            return Err(LexError::Config(format!(
                "single-objective wrapper needs a one-objective learner, got {}",
                inner.num_objectives()
            )));
        }
        Ok(Self { inner })
    }

    pub fn inner(&self) -> &P {
        &self.inner
    }
}

impl<P: Policy> Policy for SingleObjective<P> {
    fn name(&self) -> &'static str {
        self.inner.name()
    }

    fn num_arms(&self) -> usize {
        self.inner.num_arms()
    }

    fn num_objectives(&self) -> usize {
        1
    }

    fn select(&mut self, round: u64, rng: &mut RngStream) -> usize {
        self.inner.select(round, rng)
    }

    fn observe(&mut self, arm: usize, reward: &[f64]) -> Result<()> {
        let first = reward
            .first()
            .ok_or_else(|| LexError::Contract("empty reward vector".into()))?;
        self.inner.observe(arm, std::slice::from_ref(first))
    }

    fn estimates(&self) -> &EstimatorTable {
        self.inner.estimates()
    }
}

/// A parameter given either directly or as a power of the horizon, `T^p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HorizonParam {
    Value(f64),
    Power { horizon_power: f64 },
}

impl HorizonParam {
    pub fn resolve(&self, horizon: u64) -> f64 {
        match *self {
            HorizonParam::Value(v) => v,
            HorizonParam::Power { horizon_power } => (horizon as f64).powf(horizon_power),
        }
    }
}

/// What NOM-LEX's thresholds are meant to be.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NomGoal {
    /// Near-optimal means: validated to lie strictly between μ_* − Δ_min and μ_*.
    #[default]
    Lexicographic,
    /// Arbitrary satisficing targets; no validation against the instance.
    Satisficing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PolicyKind {
    OmLex {
        prior: Vec<f64>,
    },
    NomLex {
        prior: Vec<f64>,
        #[serde(default)]
        goal: NomGoal,
    },
    PfLex {
        epsilon: HorizonParam,
        delta: HorizonParam,
        #[serde(default)]
        chain_scope: ChainScope,
    },
}

/// Declarative learner description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyConfig {
    #[serde(flatten)]
    pub kind: PolicyKind,
    #[serde(default)]
    pub single_objective: bool,
}

impl PolicyConfig {
    pub fn om_lex(prior: Vec<f64>) -> Self {
        Self {
            kind: PolicyKind::OmLex { prior },
            single_objective: false,
        }
    }

    pub fn nom_lex(prior: Vec<f64>) -> Self {
        Self {
            kind: PolicyKind::NomLex {
                prior,
                goal: NomGoal::Lexicographic,
            },
            single_objective: false,
        }
    }

    pub fn pf_lex(epsilon: HorizonParam, delta: HorizonParam) -> Self {
        Self {
            kind: PolicyKind::PfLex {
                epsilon,
                delta,
                chain_scope: ChainScope::default(),
            },
            single_objective: false,
        }
    }

    pub fn single_objective(mut self) -> Self {
        self.single_objective = true;
        self
    }

    /// Constructs a fresh learner for an instance of the given shape.
    pub fn build(
        &self,
        num_arms: usize,
        num_objectives: usize,
        horizon: u64,
    ) -> Result<Box<dyn Policy>> {
        let prior_for = |prior: &Vec<f64>| -> Result<Vec<f64>> {
            if prior.len() != num_objectives {
                return Err(LexError::Config(format!(
                    "prior has {} entries for {} objectives",
                    prior.len(),
                    num_objectives
                )));
            }
            Ok(if self.single_objective {
                prior[..1].to_vec()
            } else {
                prior.clone()
            })
        };
        let policy: Box<dyn Policy> = match &self.kind {
            PolicyKind::OmLex { prior } => {
                let p = MeanLex::om_lex(num_arms, prior_for(prior)?)?;
                if self.single_objective {
                    Box::new(SingleObjective::new(p)?)
                } else {
                    Box::new(p)
                }
            }
            PolicyKind::NomLex { prior, .. } => {
                let p = MeanLex::nom_lex(num_arms, prior_for(prior)?)?;
                if self.single_objective {
                    Box::new(SingleObjective::new(p)?)
                } else {
                    Box::new(p)
                }
            }
            PolicyKind::PfLex {
                epsilon,
                delta,
                chain_scope,
            } => {
                if self.single_objective {
                    return Err(LexError::Config(
                        "single-objective projection applies to OM-LEX and NOM-LEX only".into(),
                    ));
                }
                Box::new(
                    PfLex::new(
                        num_arms,
                        num_objectives,
                        epsilon.resolve(horizon),
                        delta.resolve(horizon),
                    )?
                    .with_scope(*chain_scope),
                )
            }
        };
        Ok(policy)
    }
}
