//! Experiment configuration, the replication loop and aggregation.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::settings::builtin_setting;
use crate::envs::{derive_seed, BanditInstance, RewardFamily, RngStream};
use crate::error::{LexError, Result};
use crate::lexcore::{
    analyze_instance, analyze_satisficing, InstanceAnalysis, RewardMatrix, SatisficingAnalysis,
};
use crate::policies::{NomGoal, PolicyConfig, PolicyKind};
use crate::regret::{Notion, RegretLedger, DEFAULT_SNAPSHOT_STRIDE};

/// A learner with a display label such as "OM-LEX 1".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerSpec {
    pub label: String,
    #[serde(flatten)]
    pub policy: PolicyConfig,
}

impl LearnerSpec {
    pub fn new(label: impl Into<String>, policy: PolicyConfig) -> Self {
        Self {
            label: label.into(),
            policy,
        }
    }
}

fn default_stride() -> u64 {
    DEFAULT_SNAPSHOT_STRIDE
}

fn default_replications() -> u64 {
    1
}

/// Declarative experiment. Exactly one of `setting` and `matrix` must be set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub setting: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub family: RewardFamily,
    pub learners: Vec<LearnerSpec>,
    #[serde(rename = "T", alias = "horizon")]
    pub horizon: u64,
    #[serde(default = "default_replications")]
    pub replications: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_stride")]
    pub snapshot_stride: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub satisficing_thresholds: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Keep per-replication snapshot trajectories.
    #[serde(default)]
    pub trajectories: bool,
}

impl ExperimentSpec {
    pub fn for_setting(
        setting: &str,
        learners: Vec<LearnerSpec>,
        horizon: u64,
        replications: u64,
        seed: u64,
    ) -> Self {
        Self {
            setting: Some(setting.to_string()),
            matrix: None,
            family: RewardFamily::Bernoulli,
            learners,
            horizon,
            replications,
            seed,
            snapshot_stride: DEFAULT_SNAPSHOT_STRIDE,
            satisficing_thresholds: None,
            output_dir: None,
            trajectories: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| LexError::Config(format!("experiment config: {e}")))
    }

    /// Label used in output files: the setting name, or "custom".
    pub fn setting_label(&self) -> String {
        self.setting.clone().unwrap_or_else(|| "custom".to_string())
    }

    /// Resolves the instance and its analysis.
    pub fn instance(&self) -> Result<(BanditInstance, InstanceAnalysis)> {
        match (&self.setting, &self.matrix) {
            (Some(name), None) => {
                let (mut inst, analysis) = builtin_setting(name)?;
                if self.family != inst.family {
                    inst = BanditInstance::new(inst.means, self.family, name.as_str())?;
                }
                Ok((inst, analysis))
            }
            (None, Some(rows)) => {
                let m = RewardMatrix::new(rows.clone())?;
                let analysis = analyze_instance(&m);
                Ok((BanditInstance::new(m, self.family, "custom")?, analysis))
            }
            _ => Err(LexError::Config(
                "exactly one of 'setting' and 'matrix' must be given".into(),
            )),
        }
    }

    /// Checks every precondition that can be checked before running.
    pub fn validate(&self, instance: &BanditInstance) -> Result<()> {
        let arms = instance.num_arms() as u64;
        if self.horizon < arms {
            return Err(LexError::Config(format!(
                "horizon {} is shorter than the {} initialization rounds",
                self.horizon, arms
            )));
        }
        if self.replications == 0 {
            return Err(LexError::Config("replications must be at least 1".into()));
        }
        if self.learners.is_empty() {
            return Err(LexError::Config("no learners given".into()));
        }
        if self.snapshot_stride == 0 {
            return Err(LexError::Config("snapshot_stride must be positive".into()));
        }
        for learner in &self.learners {
            learner
                .policy
                .build(instance.num_arms(), instance.num_objectives(), self.horizon)
                .map_err(|e| context(&learner.label, e))?;
            if let PolicyKind::NomLex {
                prior,
                goal: NomGoal::Lexicographic,
            } = &learner.policy.kind
            {
                analyze_satisficing(&instance.means, prior, true)
                    .map_err(|e| context(&learner.label, e))?;
            }
        }
        Ok(())
    }
}

fn context(label: &str, err: LexError) -> LexError {
    match err {
        LexError::Config(m) => LexError::Config(format!("learner '{label}': {m}")),
        LexError::Contract(m) => LexError::Contract(format!("learner '{label}': {m}")),
        other => other,
    }
}

/// Result of one run.
#[derive(Debug, Clone)]
pub struct Replication {
    pub seed: u64,
    pub ledger: RegretLedger,
    /// Final pull count of every arm.
    pub pulls: Vec<u64>,
}

/// Plays `horizon` rounds of `policy` on `instance`. The environment draws
/// from stream 0 of `seed` and the learner from stream 1.
pub fn run_replication(
    instance: &BanditInstance,
    analysis: &InstanceAnalysis,
    sat: Option<&SatisficingAnalysis>,
    policy: &PolicyConfig,
    horizon: u64,
    seed: u64,
    stride: u64,
) -> Result<Replication> {
    let arms = instance.num_arms();
    let objs = instance.num_objectives();
    let mut learner = policy.build(arms, objs, horizon)?;
    let mut env_rng = RngStream::with_stream(seed, 0);
    let mut policy_rng = RngStream::with_stream(seed, 1);
    let mut ledger = RegretLedger::new(objs, sat.is_some(), stride);
    let mut reward = vec![0.0; objs];
    for round in 1..=horizon {
        let arm = learner.select(round, &mut policy_rng);
        instance.sample_into(arm, &mut env_rng, &mut reward)?;
        learner.observe(arm, &reward)?;
        ledger.record(analysis, sat, arm, round)?;
    }
    ledger.finish();
    Ok(Replication {
        seed,
        ledger,
        pulls: learner.estimates().all_pulls().to_vec(),
    })
}

/// Mean and sample standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

/// Statistics for one (notion, objective) cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellStat {
    pub notion: Notion,
    /// 0-based.
    pub objective: usize,
    pub mean: f64,
    pub std: f64,
}

/// Mean snapshot trajectory over replications.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanTrajectory {
    pub rounds: Vec<u64>,
    /// `values[k][n][i]`: snapshot k, notion index n (into the summary's notions), objective i.
    pub values: Vec<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone)]
pub struct LearnerSummary {
    pub label: String,
    pub policy: PolicyConfig,
    pub stats: Vec<CellStat>,
    pub mean_pulls: Vec<f64>,
    pub mean_trajectory: MeanTrajectory,
    /// Per-replication final values, `finals[r][n][i]`.
    pub finals: Vec<Vec<Vec<f64>>>,
    /// Present when the spec asks for trajectories.
    pub replications: Option<Vec<Replication>>,
}

impl LearnerSummary {
    pub fn stat(&self, notion: Notion, objective: usize) -> Option<CellStat> {
        self.stats
            .iter()
            .copied()
            .find(|s| s.notion == notion && s.objective == objective)
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentSummary {
    pub setting: String,
    pub num_arms: usize,
    pub num_objectives: usize,
    pub horizon: u64,
    pub replications: u64,
    pub seed: u64,
    pub notions: Vec<Notion>,
    pub learners: Vec<LearnerSummary>,
    /// Non-fatal remarks, such as a degenerate standard deviation.
    pub warnings: Vec<String>,
}

impl ExperimentSummary {
    pub fn learner(&self, label: &str) -> Option<&LearnerSummary> {
        self.learners.iter().find(|l| l.label == label)
    }

    /// Mean regret of `label` at a snapshot round.
    pub fn mean_at(
        &self,
        label: &str,
        round: u64,
        notion: Notion,
        objective: usize,
    ) -> Option<f64> {
        let l = self.learner(label)?;
        let n = self.notions.iter().position(|x| *x == notion)?;
        let k = l.mean_trajectory.rounds.binary_search(&round).ok()?;
        Some(l.mean_trajectory.values[k][n][objective])
    }
}

fn summarize_learner(
    learner: &LearnerSpec,
    runs: Vec<Replication>,
    notions: &[Notion],
    objs: usize,
    keep: bool,
) -> LearnerSummary {
    let reps = runs.len() as f64;
    let finals: Vec<Vec<Vec<f64>>> = runs
        .iter()
        .map(|r| {
            notions
                .iter()
                .map(|n| r.ledger.totals(*n).expect("tracked notion").to_vec())
                .collect()
        })
        .collect();
    let mut stats = Vec::with_capacity(notions.len() * objs);
    for (ni, notion) in notions.iter().enumerate() {
        for obj in 0..objs {
            let column: Vec<f64> = finals.iter().map(|f| f[ni][obj]).collect();
            let (mean, std) = mean_std(&column);
            stats.push(CellStat {
                notion: *notion,
                objective: obj,
                mean,
                std,
            });
        }
    }
    let arms = runs[0].pulls.len();
    let mean_pulls = (0..arms)
        .map(|a| runs.iter().map(|r| r.pulls[a] as f64).sum::<f64>() / reps)
        .collect();

    // All replications share horizon and stride, so snapshot rounds align.
    let rounds: Vec<u64> = runs[0].ledger.snapshots().iter().map(|s| s.round).collect();
    let mut values = vec![vec![vec![0.0; objs]; notions.len()]; rounds.len()];
    for run in &runs {
        for (k, snap) in run.ledger.snapshots().iter().enumerate() {
            for (ni, notion) in notions.iter().enumerate() {
                let v = snap.notion(*notion).expect("tracked notion");
                for obj in 0..objs {
                    values[k][ni][obj] += v[obj] / reps;
                }
            }
        }
    }

    LearnerSummary {
        label: learner.label.clone(),
        policy: learner.policy.clone(),
        stats,
        mean_pulls,
        mean_trajectory: MeanTrajectory { rounds, values },
        finals,
        replications: keep.then_some(runs),
    }
}

/// Runs every learner for `replications` independent replications.
/// Replications run in parallel; results are reduced in replication order,
/// so the summary does not depend on scheduling.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentSummary> {
    let (instance, analysis) = spec.instance()?;
    spec.validate(&instance)?;
    let sat = spec
        .satisficing_thresholds
        .as_ref()
        .map(|eta| analyze_satisficing(&instance.means, eta, false))
        .transpose()?;
    let mut notions = vec![Notion::PriorityBased, Notion::PriorityFree];
    if sat.is_some() {
        notions.push(Notion::Satisficing);
    }
    let objs = instance.num_objectives();

    let mut learners = Vec::with_capacity(spec.learners.len());
    for (li, learner) in spec.learners.iter().enumerate() {
        let runs = (0..spec.replications)
            .into_par_iter()
            .map(|rep| {
                let seed = derive_seed(spec.seed, rep, li as u64);
                run_replication(
                    &instance,
                    &analysis,
                    sat.as_ref(),
                    &learner.policy,
                    spec.horizon,
                    seed,
                    spec.snapshot_stride,
                )
                .map_err(|e| {
                    context(
                        &learner.label,
                        match e {
                            LexError::Contract(m) => {
                                LexError::Contract(format!("replication {}: {m}", rep + 1))
                            }
                            other => other,
                        },
                    )
                })
            })
            .collect::<Result<Vec<_>>>()?;
        learners.push(summarize_learner(
            learner,
            runs,
            &notions,
            objs,
            spec.trajectories,
        ));
    }

    let mut warnings = Vec::new();
    if spec.replications == 1 {
        warnings.push("one replication: standard deviations are reported as 0".to_string());
    }
    Ok(ExperimentSummary {
        setting: spec.setting_label(),
        num_arms: instance.num_arms(),
        num_objectives: objs,
        horizon: spec.horizon,
        replications: spec.replications,
        seed: spec.seed,
        notions,
        learners,
        warnings,
    })
}
