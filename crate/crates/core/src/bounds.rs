//! Closed-form regret bounds.
//!
//! All logarithms are natural. A bound that is undefined because a gap in a
//! denominator is zero or negative evaluates to `+∞` and carries a diagnostic.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::error::{LexError, Result};
use crate::lexcore::{InstanceAnalysis, SatisficingAnalysis};

/// Which regret bound is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    /// OM-LEX, priority-based regret.
    OmLex,
    /// NOM-LEX, priority-based regret.
    NomLex,
    /// PF-LEX, priority-based regret (high probability).
    PfLex,
    /// NOM-LEX, satisficing regret.
    Satisficing,
    /// OM-LEX, priority-free regret.
    OmLexPriorityFree,
    /// NOM-LEX, priority-free regret.
    NomLexPriorityFree,
}

impl Theorem {
    pub const ALL: [Theorem; 6] = [
        Theorem::OmLex,
        Theorem::NomLex,
        Theorem::PfLex,
        Theorem::Satisficing,
        Theorem::OmLexPriorityFree,
        Theorem::NomLexPriorityFree,
    ];

    /// Theorem number as used in reports.
    pub fn number(self) -> u8 {
        match self {
            Theorem::OmLex => 1,
            Theorem::NomLex => 2,
            Theorem::PfLex => 3,
            Theorem::Satisficing => 4,
            Theorem::OmLexPriorityFree => 5,
            Theorem::NomLexPriorityFree => 6,
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Theorem::OmLex => "OM-LEX priority-based",
            Theorem::NomLex => "NOM-LEX priority-based",
            Theorem::PfLex => "PF-LEX priority-based (w.p. 1-delta)",
            Theorem::Satisficing => "NOM-LEX satisficing",
            Theorem::OmLexPriorityFree => "OM-LEX priority-free",
            Theorem::NomLexPriorityFree => "NOM-LEX priority-free",
        }
    }
}

/// A bound value; `diagnostic` explains an infinite value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub value: f64,
    pub diagnostic: Option<String>,
}

impl Bound {
    fn finite(value: f64) -> Self {
        Self {
            value,
            diagnostic: None,
        }
    }

    fn infinite(reason: String) -> Self {
        Self {
            value: f64::INFINITY,
            diagnostic: Some(reason),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}

/// `(36 / x) ln(17 / x)`, the per-arm exploration cost term.
fn exploration_cost(x: f64) -> f64 {
    36.0 / x * (17.0 / x).ln()
}

fn om_lex_sum(analysis: &InstanceAnalysis, arms: &[usize], objective: usize) -> Bound {
    let d = analysis.num_objectives as f64;
    let mut total = 0.0;
    for &a in arms {
        let nabla = analysis.max_abs_gap[a];
        if nabla <= 0.0 {
            return Bound::infinite(format!("arm {} has zero maximum absolute gap", a + 1));
        }
        total += (PI * PI / 3.0 * d + 1.0) * analysis.gap(a, objective) + exploration_cost(nabla);
    }
    Bound::finite(total)
}

/// max_j (Δ_a^j − δ_j) for one arm.
fn margin(analysis: &InstanceAnalysis, threshold_gaps: &[f64], arm: usize) -> f64 {
    threshold_gaps
        .iter()
        .enumerate()
        .map(|(j, dj)| analysis.gap(arm, j) - dj)
        .fold(f64::NEG_INFINITY, f64::max)
}

fn nom_lex_sum(
    analysis: &InstanceAnalysis,
    threshold_gaps: &[f64],
    arms: &[usize],
    objective: usize,
) -> Bound {
    let d = analysis.num_objectives as f64;
    let mut total = 0.0;
    for &a in arms {
        let m = margin(analysis, threshold_gaps, a);
        if m <= 0.0 {
            return Bound::infinite(format!(
                "arm {} has nonpositive margin max_j(gap - delta_j) = {}",
                a + 1,
                m
            ));
        }
        let gap = analysis.gap(a, objective);
        total += (PI * PI / 6.0 * d + 1.0) * gap + 36.0 * gap / (m * m) * (17.0 / m).ln();
    }
    Bound::finite(total)
}

fn check_objective(analysis: &InstanceAnalysis, objective: usize) {
    assert!(
        objective < analysis.num_objectives,
        "objective {} out of range",
        objective + 1
    );
}

/// OM-LEX expected priority-based regret bound in `objective`.
pub fn thm1_om_lex(analysis: &InstanceAnalysis, objective: usize) -> Bound {
    check_objective(analysis, objective);
    om_lex_sum(analysis, &analysis.drop_sets[objective], objective)
}

/// NOM-LEX expected priority-based regret bound; `threshold_gaps[j]` = μ_*^j − η_j.
pub fn thm2_nom_lex(
    analysis: &InstanceAnalysis,
    threshold_gaps: &[f64],
    objective: usize,
) -> Bound {
    check_objective(analysis, objective);
    nom_lex_sum(
        analysis,
        threshold_gaps,
        &analysis.drop_sets[objective],
        objective,
    )
}

/// `sqrt(1 + 2 ln(A D sqrt(T) / δ))`.
pub fn confidence_scale(num_arms: usize, num_objectives: usize, horizon: u64, delta: f64) -> f64 {
    let ad = (num_arms * num_objectives) as f64;
    (1.0 + 2.0 * (ad * (horizon as f64).sqrt() / delta).ln()).sqrt()
}

/// PF-LEX high-probability priority-based regret bound for one objective,
/// given |S*^i| and Δ_max^i.
pub fn thm3_pf_lex(
    num_arms: usize,
    num_objectives: usize,
    horizon: u64,
    delta: f64,
    epsilon: f64,
    drop_set_size: usize,
    max_gap: f64,
) -> Result<Bound> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(LexError::Config(format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(LexError::Config(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let ad = (num_arms * num_objectives) as f64;
    let s = drop_set_size as f64;
    let t = horizon as f64;
    let b = confidence_scale(num_arms, num_objectives, horizon, delta);
    let burn_in = 3.0 + 16.0 / (epsilon * epsilon) * (2.0 * E.sqrt() * ad / (epsilon * delta)).ln();
    let value = 4.0 * 2f64.sqrt() * b * (s * t).sqrt()
        + burn_in * s * max_gap
        + epsilon * (num_arms as f64 - 1.0) * t;
    Ok(Bound::finite(value))
}

/// NOM-LEX expected satisficing regret bound in `objective`.
pub fn thm4_satisficing(sat: &SatisficingAnalysis, objective: usize) -> Bound {
    let objs = sat.thresholds.len();
    assert!(objective < objs, "objective {} out of range", objective + 1);
    let d = objs as f64;
    let mut total = 0.0;
    for &a in &sat.nonsat_sets[objective] {
        // Δ_a^j − δ_j equals the shortfall η_j − μ_a^j.
        let m = (0..objs)
            .map(|j| sat.shortfall(a, j))
            .fold(f64::NEG_INFINITY, f64::max);
        if m <= 0.0 {
            return Bound::infinite(format!("arm {} has nonpositive margin {}", a + 1, m));
        }
        total += (PI * PI / 6.0 * d + 1.0) * sat.shortfall(a, objective) + exploration_cost(m);
    }
    Bound::finite(total)
}

/// OM-LEX expected priority-free regret bound (sum over every arm with a positive gap).
pub fn thm5_om_lex_priority_free(analysis: &InstanceAnalysis, objective: usize) -> Bound {
    check_objective(analysis, objective);
    om_lex_sum(analysis, &analysis.suboptimal_sets[objective], objective)
}

/// NOM-LEX expected priority-free regret bound (sum over every arm with a positive gap).
pub fn thm6_nom_lex_priority_free(
    analysis: &InstanceAnalysis,
    threshold_gaps: &[f64],
    objective: usize,
) -> Bound {
    check_objective(analysis, objective);
    nom_lex_sum(
        analysis,
        threshold_gaps,
        &analysis.suboptimal_sets[objective],
        objective,
    )
}

/// Extra inputs some bounds need.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    /// NOM-LEX thresholds η (theorems 2, 4, 6).
    pub thresholds: Option<Vec<f64>>,
    /// Horizon T (theorem 3; echoed otherwise).
    pub horizon: Option<u64>,
    pub epsilon: Option<f64>,
    pub delta: Option<f64>,
}

/// Per-objective values of one bound, with the inputs that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub theorem: Theorem,
    pub num_arms: usize,
    pub num_objectives: usize,
    pub params: BoundParams,
    pub gaps: Vec<f64>,
    pub per_objective: Vec<Bound>,
}

impl BoundReport {
    pub fn csv_header() -> &'static str {
        "theorem,description,objective,value,A,D,T,epsilon,delta,diagnostic"
    }

    pub fn csv_rows(&self) -> Vec<String> {
        let opt = |v: Option<String>| v.unwrap_or_default();
        self.per_objective
            .iter()
            .enumerate()
            .map(|(i, b)| {
                format!(
                    "{},{},{},{},{},{},{},{},{},{}",
                    self.theorem.number(),
                    self.theorem.description(),
                    i + 1,
                    b.value,
                    self.num_arms,
                    self.num_objectives,
                    opt(self.params.horizon.map(|t| t.to_string())),
                    opt(self.params.epsilon.map(|e| e.to_string())),
                    opt(self.params.delta.map(|d| d.to_string())),
                    b.diagnostic.clone().unwrap_or_default().replace(',', ";"),
                )
            })
            .collect()
    }
}

/// Evaluates `theorem` for every objective of an instance.
pub fn bound_report(
    theorem: Theorem,
    analysis: &InstanceAnalysis,
    sat: Option<&SatisficingAnalysis>,
    params: &BoundParams,
) -> Result<BoundReport> {
    let objs = analysis.num_objectives;
    let missing =
        |what: &str| LexError::Config(format!("theorem {} needs {}", theorem.number(), what));
    let threshold_gaps = || -> Result<Vec<f64>> {
        let eta = params
            .thresholds
            .as_ref()
            .ok_or_else(|| missing("thresholds"))?;
        if eta.len() != objs {
            return Err(LexError::Config(format!(
                "{} thresholds for {} objectives",
                eta.len(),
                objs
            )));
        }
        Ok(analysis
            .optimal_means
            .iter()
            .zip(eta)
            .map(|(m, e)| m - e)
            .collect())
    };
    let per_objective = match theorem {
        Theorem::OmLex => (0..objs).map(|i| thm1_om_lex(analysis, i)).collect(),
        Theorem::OmLexPriorityFree => (0..objs)
            .map(|i| thm5_om_lex_priority_free(analysis, i))
            .collect(),
        Theorem::NomLex => {
            let g = threshold_gaps()?;
            (0..objs).map(|i| thm2_nom_lex(analysis, &g, i)).collect()
        }
        Theorem::NomLexPriorityFree => {
            let g = threshold_gaps()?;
            (0..objs)
                .map(|i| thm6_nom_lex_priority_free(analysis, &g, i))
                .collect()
        }
        Theorem::Satisficing => {
            let sat = sat.ok_or_else(|| missing("a satisficing analysis"))?;
            (0..objs).map(|i| thm4_satisficing(sat, i)).collect()
        }
        Theorem::PfLex => {
            let horizon = params.horizon.ok_or_else(|| missing("a horizon"))?;
            let epsilon = params.epsilon.ok_or_else(|| missing("epsilon"))?;
            let delta = params.delta.ok_or_else(|| missing("delta"))?;
            (0..objs)
                .map(|i| {
                    thm3_pf_lex(
                        analysis.num_arms,
                        objs,
                        horizon,
                        delta,
                        epsilon,
                        analysis.drop_sets[i].len(),
                        analysis.max_gap[i],
                    )
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok(BoundReport {
        theorem,
        num_arms: analysis.num_arms,
        num_objectives: objs,
        params: params.clone(),
        gaps: analysis.gaps.clone(),
        per_objective,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexcore::{analyze_instance, analyze_satisficing, RewardMatrix};

    fn matrix(rows: &[[f64; 2]]) -> RewardMatrix {
        RewardMatrix::new(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    fn setting1() -> RewardMatrix {
        matrix(&[[0.5, 0.5], [0.5, 0.4], [0.4, 0.9]])
    }

    // Expected values below were evaluated independently in double precision
    // from the closed forms with the instance numbers substituted by hand.

    #[test]
    fn thm1_setting1() {
        let a = analyze_instance(&setting1());
        // (2π²/3 + 1)·0.1 + 90·ln 42.5
        assert!((thm1_om_lex(&a, 0).value - 338.213_340_460_472_7).abs() < 1e-9);
        let single = analyze_instance(&matrix(&[[0.5, 0.5]]));
        assert_eq!(thm1_om_lex(&single, 0).value, 0.0);
    }

    #[test]
    fn thm1_zero_abs_gap_is_flagged() {
        // The optimal arm has no gap; summing over it must not divide by zero.
        let a = analyze_instance(&setting1());
        let b = om_lex_sum(&a, &[0], 0);
        assert!(b.value.is_infinite() && b.diagnostic.is_some());
    }

    #[test]
    fn thm2_setting1() {
        let a = analyze_instance(&setting1());
        // (π²/3 + 1)·0.1 + 36·0.1/0.05²·ln 340
        let b = thm2_nom_lex(&a, &[0.05, 0.05], 0);
        assert!((b.value - 8_394.110_676_172_066).abs() < 1e-6);
        assert_eq!(
            thm2_nom_lex(&analyze_instance(&matrix(&[[0.5, 0.5]])), &[0.1, 0.1], 0).value,
            0.0
        );
        let bad = thm2_nom_lex(&a, &[0.2, 0.5], 0);
        assert!(bad.value.is_infinite() && bad.diagnostic.is_some());
    }

    #[test]
    fn thm2_small_deltas_approach_positive_gap_denominator() {
        let a = analyze_instance(&setting1());
        // Arm 3: the only positive gap is 0.1 in objective 1.
        let limit = (PI * PI / 3.0 + 1.0) * 0.1 + 36.0 * 0.1 / 0.01 * (170f64).ln();
        let b = thm2_nom_lex(&a, &[1e-12, 1e-12], 0);
        assert!((b.value - limit).abs() / limit < 1e-9);
    }

    #[test]
    fn thm3_examples() {
        let b = thm3_pf_lex(3, 2, 100_000, 0.1, 0.1, 0, 0.1).unwrap();
        assert_eq!(b.value, 0.1 * 2.0 * 100_000.0);
        let eps = (1e5f64).powf(-0.2);
        let b = thm3_pf_lex(3, 2, 100_000, eps, eps, 1, 0.1).unwrap();
        assert!(b.value.is_finite() && b.value >= 764.0);
        assert!(thm3_pf_lex(3, 2, 10, 1.0, 0.1, 1, 0.1).is_err());
        assert!(thm3_pf_lex(3, 2, 10, 0.1, 0.0, 1, 0.1).is_err());
    }

    #[test]
    fn thm3_monotone_in_horizon_and_set_size() {
        let mut prev = 0.0;
        for k in 1..=40u32 {
            let t = 1u64 << k;
            let v = thm3_pf_lex(3, 2, t, 0.05, 0.1, 1, 0.1).unwrap().value;
            assert!(v > prev);
            prev = v;
        }
        let mut prev = -1.0;
        for s in 0..10 {
            let v = thm3_pf_lex(10, 2, 10_000, 0.05, 0.1, s, 0.1).unwrap().value;
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn thm3_grows_like_two_thirds_power() {
        for t in [10_000u64, 100_000, 1_000_000, 10_000_000] {
            let at = |t: u64| {
                let eps = (t as f64).powf(-1.0 / 3.0);
                thm3_pf_lex(3, 2, t, 0.05, eps, 1, 0.1).unwrap().value
            };
            assert!(at(2 * t) / at(t) <= 2f64.powf(0.75), "T = {t}");
        }
    }

    #[test]
    fn thm4_examples() {
        let m = setting1();
        let sat = analyze_satisficing(&m, &[0.45, 0.45], false).unwrap();
        // (π²/3 + 1)·0.05 + 720·ln 340
        assert!((thm4_satisficing(&sat, 1).value - 4_197.055_338_086_034).abs() < 1e-6);
        let none = analyze_satisficing(&m, &[-1.0, -1.0], false).unwrap();
        assert_eq!(thm4_satisficing(&none, 0).value, 0.0);
    }

    #[test]
    fn thm4_single_objective_matches_closed_form() {
        let m = RewardMatrix::new(vec![vec![0.5], vec![0.3], vec![0.1]]).unwrap();
        let sat = analyze_satisficing(&m, &[0.45], false).unwrap();
        let corollary = |gap: f64| (PI * PI / 6.0 + 1.0) * gap + 36.0 / gap * (17.0 / gap).ln();
        let expected = corollary(0.15) + corollary(0.35);
        assert!((thm4_satisficing(&sat, 0).value - expected).abs() < 1e-9);
    }

    #[test]
    fn priority_free_variants() {
        let s2 = analyze_instance(&matrix(&[[0.5, 0.5], [0.5, 0.4], [0.4, 0.5]]));
        assert_eq!(s2.suboptimal_sets[1], vec![1]);
        // (2π²/3 + 1)·0.1 + 360·ln 170
        assert!((thm5_om_lex_priority_free(&s2, 1).value - 1_849.645_410_964_833_7).abs() < 1e-6);
        // S^i = S*^i here, so the priority-based value is identical.
        assert_eq!(thm5_om_lex_priority_free(&s2, 1), thm1_om_lex(&s2, 1));
        assert_eq!(
            thm6_nom_lex_priority_free(&s2, &[0.05, 0.05], 1),
            thm2_nom_lex(&s2, &[0.05, 0.05], 1)
        );
        let single = analyze_instance(&matrix(&[[0.5, 0.5]]));
        assert_eq!(thm5_om_lex_priority_free(&single, 0).value, 0.0);
    }

    #[test]
    fn gap_bounds_do_not_depend_on_horizon() {
        let m = setting1();
        let a = analyze_instance(&m);
        let sat = analyze_satisficing(&m, &[0.45, 0.45], false).unwrap();
        for theorem in Theorem::ALL.into_iter().filter(|t| *t != Theorem::PfLex) {
            let at = |t: u64| {
                let params = BoundParams {
                    thresholds: Some(vec![0.45, 0.45]),
                    horizon: Some(t),
                    ..Default::default()
                };
                bound_report(theorem, &a, Some(&sat), &params)
                    .unwrap()
                    .per_objective
            };
            assert_eq!(at(100_000), at(200_000));
        }
    }

    #[test]
    fn report_requires_inputs() {
        let a = analyze_instance(&setting1());
        assert!(bound_report(Theorem::NomLex, &a, None, &BoundParams::default()).is_err());
        assert!(bound_report(Theorem::PfLex, &a, None, &BoundParams::default()).is_err());
        assert!(bound_report(Theorem::Satisficing, &a, None, &BoundParams::default()).is_err());
        let r = bound_report(Theorem::OmLex, &a, None, &BoundParams::default()).unwrap();
        assert_eq!(r.csv_rows().len(), 2);
        assert!(r.csv_rows()[0].starts_with("1,OM-LEX priority-based,1,338.21"));
    }
}
