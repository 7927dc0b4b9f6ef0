//! OM-LEX and NOM-LEX.
//!
//! Both learners share one skeleton: pull every arm once, then exploit a
//! uniformly random arm from the estimated optimal set, or run a full
//! round-robin sweep when that set is empty. They differ only in the test an
//! arm must pass in every objective, applied to sample means shifted by the
//! prior vector:
//!
//! - OM-LEX (known optimal means): `|mean - prior| < sqrt(4 ln N / N)`
//! - NOM-LEX (known near-optimal thresholds): `mean - prior > -sqrt(4 ln N / N)`

use std::ops::Range;

use super::estimator::EstimatorTable;
use super::Policy;
use crate::envs::RngStream;
use crate::error::{LexError, Result};
use crate::lexcore::ArmSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CandidateRule {
    /// Two-sided test around the known optimal means.
    OptimalMean,
    /// One-sided test against near-optimal thresholds.
    NearOptimalMean,
}

/// Exploration width `sqrt(4 ln N / N)` for an arm pulled `n ≥ 1` times.
#[inline]
pub fn exploration_width(n: u64) -> f64 {
    let n = n as f64;
    (4.0 * n.ln() / n).sqrt()
}

fn passes(rule: CandidateRule, shifted_mean: f64, width: f64) -> bool {
    match rule {
        CandidateRule::OptimalMean => shifted_mean.abs() < width,
        CandidateRule::NearOptimalMean => shifted_mean > -width,
    }
}

fn arm_passes(est: &EstimatorTable, prior: &[f64], rule: CandidateRule, arm: usize) -> bool {
    let width = exploration_width(est.pulls(arm));
    prior
        .iter()
        .enumerate()
        .all(|(obj, p)| passes(rule, est.mean(arm, obj) - p, width))
}

fn candidates(est: &EstimatorTable, prior: &[f64], rule: CandidateRule) -> Result<ArmSet> {
    if let Some(arm) = (0..est.num_arms()).find(|&a| est.pulls(a) == 0) {
        return Err(LexError::Contract(format!(
            "candidate set requested before arm {} was pulled",
            arm + 1
        )));
    }
    Ok((0..est.num_arms())
        .filter(|&a| arm_passes(est, prior, rule, a))
        .collect())
}

/// Estimated optimal set of OM-LEX: arms whose prior-shifted means are within
/// the exploration width of zero in every objective.
pub fn om_lex_candidates(est: &EstimatorTable, prior: &[f64]) -> Result<ArmSet> {
    candidates(est, prior, CandidateRule::OptimalMean)
}

/// Estimated optimal set of NOM-LEX: arms whose threshold-shifted means are
/// above minus the exploration width in every objective.
pub fn nom_lex_candidates(est: &EstimatorTable, prior: &[f64]) -> Result<ArmSet> {
    candidates(est, prior, CandidateRule::NearOptimalMean)
}

/// How the most recent arm was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeanLexChoice {
    Initialization,
    Exploit,
    /// Position within a round-robin sweep (0 starts a new sweep).
    Sweep(usize),
}

/// Shared state of OM-LEX and NOM-LEX.
#[derive(Debug, Clone)]
pub struct MeanLex {
    est: EstimatorTable,
    prior: Vec<f64>,
    rule: CandidateRule,
    /// Arms still owed by the current sweep; always a suffix of 0..A.
    sweep: Range<usize>,
    // Membership only changes for the arm that was just observed.
    is_candidate: Vec<bool>,
    candidate_count: usize,
    last_choice: Option<MeanLexChoice>,
}

impl MeanLex {
    pub fn new(num_arms: usize, prior: Vec<f64>, rule: CandidateRule) -> Result<Self> {
        if num_arms == 0 {
            return Err(LexError::Config("learner needs at least one arm".into()));
        }
        if prior.is_empty() {
            return Err(LexError::Config("prior vector is empty".into()));
        }
        if let Some(i) = prior.iter().position(|p| !p.is_finite()) {
            return Err(LexError::Config(format!(
                "prior for objective {} is not finite",
                i + 1
            )));
        }
        Ok(Self {
            est: EstimatorTable::new(num_arms, prior.len()),
            prior,
            rule,
            sweep: num_arms..num_arms,
            is_candidate: vec![false; num_arms],
            candidate_count: 0,
            last_choice: None,
        })
    }

    pub fn om_lex(num_arms: usize, optimal_means: Vec<f64>) -> Result<Self> {
        Self::new(num_arms, optimal_means, CandidateRule::OptimalMean)
    }

    pub fn nom_lex(num_arms: usize, thresholds: Vec<f64>) -> Result<Self> {
        Self::new(num_arms, thresholds, CandidateRule::NearOptimalMean)
    }

    pub fn rule(&self) -> CandidateRule {
        self.rule
    }

    pub fn prior(&self) -> &[f64] {
        &self.prior
    }

    /// Estimated optimal set recomputed from the estimator table.
    pub fn candidates(&self) -> Result<ArmSet> {
        candidates(&self.est, &self.prior, self.rule)
    }

    pub fn pending_sweep(&self) -> Range<usize> {
        self.sweep.clone()
    }

    pub fn last_choice(&self) -> Option<MeanLexChoice> {
        self.last_choice
    }

    fn nth_candidate(&self, k: usize) -> usize {
        self.is_candidate
            .iter()
            .enumerate()
            .filter(|(_, &c)| c)
            .nth(k)
            .map(|(a, _)| a)
            .expect("k is below the candidate count")
    }
}

impl Policy for MeanLex {
    fn name(&self) -> &'static str {
        match self.rule {
            CandidateRule::OptimalMean => "OM-LEX",
            CandidateRule::NearOptimalMean => "NOM-LEX",
        }
    }

    fn num_arms(&self) -> usize {
        self.est.num_arms()
    }

    fn num_objectives(&self) -> usize {
        self.prior.len()
    }

    fn select(&mut self, round: u64, rng: &mut RngStream) -> usize {
        let arms = self.num_arms();
        let (arm, choice) = if round >= 1 && round <= arms as u64 {
            (round as usize - 1, MeanLexChoice::Initialization)
        } else if let Some(arm) = self.sweep.next() {
            (arm, MeanLexChoice::Sweep(arm))
        } else if self.candidate_count > 0 {
            let k = rng.below(self.candidate_count);
            (self.nth_candidate(k), MeanLexChoice::Exploit)
        } else {
            self.sweep = 1..arms;
            (0, MeanLexChoice::Sweep(0))
        };
        self.last_choice = Some(choice);
        arm
    }

    fn observe(&mut self, arm: usize, reward: &[f64]) -> Result<()> {
        super::check_observation(arm, reward, self.num_arms(), self.num_objectives())?;
        self.est.observe(arm, reward);
        let now = arm_passes(&self.est, &self.prior, self.rule, arm);
        if now != self.is_candidate[arm] {
            self.is_candidate[arm] = now;
            if now {
                self.candidate_count += 1;
            } else {
                self.candidate_count -= 1;
            }
        }
        Ok(())
    }

    fn estimates(&self) -> &EstimatorTable {
        &self.est
    }
}
