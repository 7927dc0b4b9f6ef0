//! Cumulative priority-based, priority-free and satisficing regret.

use serde::{Deserialize, Serialize};

use crate::error::{LexError, Result};
use crate::lexcore::{InstanceAnalysis, SatisficingAnalysis};

pub const DEFAULT_SNAPSHOT_STRIDE: u64 = 100;

/// Regret notion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Notion {
    /// Gap charged only in the objective where the arm first drops out.
    #[serde(rename = "pb")]
    PriorityBased,
    /// Signed gap charged in every objective.
    #[serde(rename = "pf")]
    PriorityFree,
    /// Threshold shortfall charged where the arm misses the threshold.
    #[serde(rename = "sat")]
    Satisficing,
}

impl Notion {
    pub const ALL: [Notion; 3] = [
        Notion::PriorityBased,
        Notion::PriorityFree,
        Notion::Satisficing,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Notion::PriorityBased => "pb",
            Notion::PriorityFree => "pf",
            Notion::Satisficing => "sat",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|n| n.code() == s)
    }
}

impl std::fmt::Display for Notion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub round: u64,
    pub pb: Vec<f64>,
    pub pf: Vec<f64>,
    pub sat: Option<Vec<f64>>,
}

impl Snapshot {
    pub fn notion(&self, notion: Notion) -> Option<&[f64]> {
        match notion {
            Notion::PriorityBased => Some(&self.pb),
            Notion::PriorityFree => Some(&self.pf),
            Notion::Satisficing => self.sat.as_deref(),
        }
    }
}

/// Per-objective cumulative regret of one run, with periodic snapshots.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretLedger {
    pb: Vec<f64>,
    pf: Vec<f64>,
    sat: Option<Vec<f64>>,
    stride: u64,
    last_round: u64,
    snapshots: Vec<Snapshot>,
}

impl RegretLedger {
    pub fn new(num_objectives: usize, track_satisficing: bool, stride: u64) -> Self {
        Self {
            pb: vec![0.0; num_objectives],
            pf: vec![0.0; num_objectives],
            sat: track_satisficing.then(|| vec![0.0; num_objectives]),
            stride: stride.max(1),
            last_round: 0,
            snapshots: Vec::new(),
        }
    }

    /// Charges the regret of playing `arm` in round `round`.
    pub fn record(
        &mut self,
        analysis: &InstanceAnalysis,
        sat: Option<&SatisficingAnalysis>,
        arm: usize,
        round: u64,
    ) -> Result<()> {
        if round <= self.last_round {
            return Err(LexError::Contract(format!(
                "round {} recorded after round {}",
                round, self.last_round
            )));
        }
        if arm >= analysis.num_arms {
            return Err(LexError::Contract(format!(
                "arm {} out of range for {} arms",
                arm + 1,
                analysis.num_arms
            )));
        }
        if sat.is_some() != self.sat.is_some() {
            return Err(LexError::Contract(
                "satisficing analysis must be supplied iff the ledger tracks it".into(),
            ));
        }
        self.last_round = round;
        if let Some(obj) = analysis.drop_objective[arm] {
            self.pb[obj] += analysis.gap(arm, obj);
        }
        for (obj, pf) in self.pf.iter_mut().enumerate() {
            *pf += analysis.gap(arm, obj);
        }
        if let (Some(totals), Some(sat)) = (self.sat.as_mut(), sat) {
            for (obj, total) in totals.iter_mut().enumerate() {
                let shortfall = sat.shortfall(arm, obj);
                if shortfall > 0.0 {
                    *total += shortfall;
                }
            }
        }
        if round.is_multiple_of(self.stride) {
            self.push_snapshot();
        }
        Ok(())
    }

    /// Records the final state if the last round was not on the stride.
    pub fn finish(&mut self) {
        if self.snapshots.last().map(|s| s.round) != Some(self.last_round) && self.last_round > 0 {
            self.push_snapshot();
        }
    }

    fn push_snapshot(&mut self) {
        self.snapshots.push(Snapshot {
            round: self.last_round,
            pb: self.pb.clone(),
            pf: self.pf.clone(),
            sat: self.sat.clone(),
        });
    }

    pub fn priority_based(&self) -> &[f64] {
        &self.pb
    }

    pub fn priority_free(&self) -> &[f64] {
        &self.pf
    }

    pub fn satisficing(&self) -> Option<&[f64]> {
        self.sat.as_deref()
    }

    pub fn totals(&self, notion: Notion) -> Option<&[f64]> {
        match notion {
            Notion::PriorityBased => Some(&self.pb),
            Notion::PriorityFree => Some(&self.pf),
            Notion::Satisficing => self.sat.as_deref(),
        }
    }

    pub fn rounds(&self) -> u64 {
        self.last_round
    }

    pub fn stride(&self) -> u64 {
        self.stride
    }

    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snapshots
    }

    /// Snapshot taken exactly at `round`, if any.
    pub fn snapshot_at(&self, round: u64) -> Option<&Snapshot> {
        self.snapshots
            .binary_search_by_key(&round, |s| s.round)
            .ok()
            .map(|i| &self.snapshots[i])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexcore::{analyze_instance, analyze_satisficing, RewardMatrix};
    use proptest::prelude::*;

    fn setting1() -> RewardMatrix {
        RewardMatrix::new(vec![vec![0.5, 0.5], vec![0.5, 0.4], vec![0.4, 0.9]]).unwrap()
    }

    #[test]
    fn increments() {
        let m = setting1();
        let a = analyze_instance(&m);
        let s = analyze_satisficing(&m, &[0.45, 0.45], true).unwrap();

        let mut l = RegretLedger::new(2, true, 100);
        l.record(&a, Some(&s), 0, 1).unwrap();
        assert_eq!(l.priority_based(), &[0.0, 0.0]);
        assert_eq!(l.priority_free(), &[0.0, 0.0]);

        let mut l = RegretLedger::new(2, true, 100);
        l.record(&a, Some(&s), 2, 1).unwrap();
        assert!((l.priority_based()[0] - 0.1).abs() < 1e-12);
        assert_eq!(l.priority_based()[1], 0.0);
        assert!((l.priority_free()[0] - 0.1).abs() < 1e-12);
        assert!((l.priority_free()[1] + 0.4).abs() < 1e-12);

        let mut l = RegretLedger::new(2, true, 100);
        l.record(&a, Some(&s), 1, 1).unwrap();
        let sat = l.satisficing().unwrap();
        assert_eq!(sat[0], 0.0);
        assert!((sat[1] - 0.05).abs() < 1e-12);
    }

    #[test]
    fn rejects_out_of_order_rounds() {
        let a = analyze_instance(&setting1());
        let mut l = RegretLedger::new(2, false, 10);
        l.record(&a, None, 0, 5).unwrap();
        assert!(matches!(
            l.record(&a, None, 0, 5),
            Err(LexError::Contract(_))
        ));
        assert!(matches!(
            l.record(&a, None, 0, 4),
            Err(LexError::Contract(_))
        ));
        assert!(l.record(&a, None, 3, 6).is_err());
    }

    #[test]
    fn snapshots_on_stride_and_final() {
        let a = analyze_instance(&setting1());
        let mut l = RegretLedger::new(2, false, 10);
        for t in 1..=25 {
            l.record(&a, None, 2, t).unwrap();
        }
        l.finish();
        l.finish();
        let rounds: Vec<u64> = l.snapshots().iter().map(|s| s.round).collect();
        assert_eq!(rounds, vec![10, 20, 25]);
        assert!((l.snapshot_at(20).unwrap().pb[0] - 2.0).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn decomposition_and_monotonicity(arms in prop::collection::vec(0usize..3, 1..300)) {
            let m = RewardMatrix::new(vec![vec![0.5, 0.5], vec![0.5, 0.4], vec![0.4, 0.9]]).unwrap();
            let a = analyze_instance(&m);
            let s = analyze_satisficing(&m, &[0.45, 0.45], false).unwrap();
            let mut l = RegretLedger::new(2, true, 1);
            let mut outside = [0.0f64; 2];
            for (t, &arm) in arms.iter().enumerate() {
                l.record(&a, Some(&s), arm, t as u64 + 1).unwrap();
                for (obj, total) in outside.iter_mut().enumerate() {
                    if a.drop_objective[arm] != Some(obj) {
                        *total += a.gap(arm, obj);
                    }
                }
            }
            for (obj, out) in outside.iter().enumerate() {
                let pb = l.priority_based()[obj];
                prop_assert!((l.priority_free()[obj] - (pb + out)).abs() < 1e-9);
                prop_assert!(pb <= arms.len() as f64 * a.max_gap[obj] + 1e-9);
            }
            for w in l.snapshots().windows(2) {
                for obj in 0..2 {
                    prop_assert!(w[1].pb[obj] >= w[0].pb[obj]);
                    prop_assert!(w[1].sat.as_ref().unwrap()[obj] >= w[0].sat.as_ref().unwrap()[obj]);
                }
            }

            // Replaying the same arms in reverse order gives the same totals.
            let mut r = RegretLedger::new(2, true, 1);
            for (t, &arm) in arms.iter().rev().enumerate() {
                r.record(&a, Some(&s), arm, t as u64 + 1).unwrap();
            }
            for obj in 0..2 {
                prop_assert!((r.priority_based()[obj] - l.priority_based()[obj]).abs() < 1e-9);
                prop_assert!((r.priority_free()[obj] - l.priority_free()[obj]).abs() < 1e-9);
            }
        }
    }
}
