//! Lexicographic-order ground truth for a bandit instance.
//!
//! Everything here is computed from the true expected rewards, so only the
//! evaluation side (regret accounting, bounds, reports) may look at it. The
//! learners never do.
//!
//! Arms and objectives are 0-based throughout the library; reports and CSV
//! files shift them to 1-based.

use crate::error::{LexError, Result};

/// Sorted list of 0-based arm indices.
pub type ArmSet = Vec<usize>;

/// Arm × objective matrix of expected rewards.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardMatrix {
    values: Vec<f64>,
    num_arms: usize,
    num_objectives: usize,
}

impl RewardMatrix {
    /// Builds a matrix from one row per arm.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let num_arms = rows.len();
        if num_arms == 0 {
            return Err(LexError::Config(
                "reward matrix needs at least one arm".into(),
            ));
        }
        let num_objectives = rows[0].len();
        if num_objectives == 0 {
            return Err(LexError::Config(
                "reward matrix needs at least one objective".into(),
            ));
        }
        let mut values = Vec::with_capacity(num_arms * num_objectives);
        for (arm, row) in rows.into_iter().enumerate() {
            if row.len() != num_objectives {
                return Err(LexError::Config(format!(
                    "arm {} has {} objectives, expected {}",
                    arm + 1,
                    row.len(),
                    num_objectives
                )));
            }
            values.extend(row);
        }
        Self::from_flat(num_arms, num_objectives, values)
    }

    /// Builds a matrix from row-major values.
    pub fn from_flat(num_arms: usize, num_objectives: usize, values: Vec<f64>) -> Result<Self> {
        if num_arms == 0 || num_objectives == 0 {
            return Err(LexError::Config(
                "reward matrix needs at least one arm and one objective".into(),
            ));
        }
        if values.len() != num_arms * num_objectives {
            return Err(LexError::Config(format!(
                "expected {} values for a {}x{} matrix, got {}",
                num_arms * num_objectives,
                num_arms,
                num_objectives,
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(LexError::Config(format!(
                "non-finite mean for arm {} objective {}",
                pos / num_objectives + 1,
                pos % num_objectives + 1
            )));
        }
        Ok(Self {
            values,
            num_arms,
            num_objectives,
        })
    }

    pub fn num_arms(&self) -> usize {
        self.num_arms
    }

    pub fn num_objectives(&self) -> usize {
        self.num_objectives
    }

    #[inline]
    pub fn get(&self, arm: usize, objective: usize) -> f64 {
        self.values[arm * self.num_objectives + objective]
    }

    pub fn row(&self, arm: usize) -> &[f64] {
        &self.values[arm * self.num_objectives..(arm + 1) * self.num_objectives]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.num_objectives)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }
}

/// `true` iff `u` lexicographically dominates `v` in the first `prefix`
/// objectives: the first coordinate (among the first `prefix`) where the two
/// vectors differ favours `u`. Equal prefixes never dominate.
pub fn lex_dominates(u: &[f64], v: &[f64], prefix: usize) -> Result<bool> {
    if u.len() != v.len() {
        return Err(LexError::Contract(format!(
            "vectors of different length ({} vs {})",
            u.len(),
            v.len()
        )));
    }
    if prefix == 0 || prefix > u.len() {
        return Err(LexError::Contract(format!(
            "objective prefix {} outside 1..={}",
            prefix,
            u.len()
        )));
    }
    Ok(dominates_unchecked(u, v, prefix))
}

#[inline]
fn dominates_unchecked(u: &[f64], v: &[f64], prefix: usize) -> bool {
    u[..prefix]
        .iter()
        .zip(&v[..prefix])
        .find(|(a, b)| a != b)
        .is_some_and(|(a, b)| a > b)
}

/// Which arms the minimum gap Δ_min^i ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MinGapConvention {
    /// Over S*^i, the arms that first drop out in objective i.
    #[default]
    PriorityBased,
    /// Over S^i, every arm with a positive gap in objective i.
    PriorityFree,
}

/// Ground-truth lexicographic structure of a [`RewardMatrix`].
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceAnalysis {
    pub num_arms: usize,
    pub num_objectives: usize,
    /// `optimal_sets[i]` = arms lexicographically optimal in the first i+1 objectives.
    pub optimal_sets: Vec<ArmSet>,
    /// `drop_sets[i]` = arms optimal in the first i objectives but not in the first i+1.
    pub drop_sets: Vec<ArmSet>,
    /// `suboptimal_sets[i]` = arms with a strictly positive gap in objective i.
    pub suboptimal_sets: Vec<ArmSet>,
    /// Row-major A×D signed gaps μ_*^i − μ_a^i.
    pub gaps: Vec<f64>,
    /// Row-major A×D absolute gaps.
    pub abs_gaps: Vec<f64>,
    /// Per-arm maximum absolute gap over all objectives.
    pub max_abs_gap: Vec<f64>,
    /// Per-objective minimum gap; `f64::INFINITY` when the ranged-over set is empty.
    pub min_gap: Vec<f64>,
    /// Per-objective maximum gap over all arms (never negative).
    pub max_gap: Vec<f64>,
    /// Lowest-indexed lexicographic optimal arm.
    pub reference_arm: usize,
    /// Expected rewards of the reference arm.
    pub optimal_means: Vec<f64>,
    /// For each arm, the objective whose drop set contains it (None for optimal arms).
    pub drop_objective: Vec<Option<usize>>,
    pub convention: MinGapConvention,
}

impl InstanceAnalysis {
    #[inline]
    pub fn gap(&self, arm: usize, objective: usize) -> f64 {
        self.gaps[arm * self.num_objectives + objective]
    }

    #[inline]
    pub fn abs_gap(&self, arm: usize, objective: usize) -> f64 {
        self.abs_gaps[arm * self.num_objectives + objective]
    }

    pub fn optimal_arms(&self) -> &ArmSet {
        &self.optimal_sets[self.num_objectives - 1]
    }

    /// Recomputes the optimal sets with the pairwise-dominance definition and
    /// checks that they agree with the sequential filter.
    pub fn verify_against_dominance(&self, matrix: &RewardMatrix) -> bool {
        optimal_sets_by_dominance(matrix) == self.optimal_sets
    }
}

/// Lexicographic ground truth with the priority-based Δ_min convention.
pub fn analyze_instance(matrix: &RewardMatrix) -> InstanceAnalysis {
    analyze_instance_with(matrix, MinGapConvention::PriorityBased)
}

pub fn analyze_instance_with(
    matrix: &RewardMatrix,
    convention: MinGapConvention,
) -> InstanceAnalysis {
    let arms = matrix.num_arms();
    let objs = matrix.num_objectives();

    // Sequential filter: keep the arms attaining the maximum of objective i
    // among the survivors of objectives 0..i.
    let mut optimal_sets: Vec<ArmSet> = Vec::with_capacity(objs);
    let mut survivors: ArmSet = (0..arms).collect();
    for obj in 0..objs {
        let best = survivors
            .iter()
            .map(|&a| matrix.get(a, obj))
            .fold(f64::NEG_INFINITY, f64::max);
        survivors.retain(|&a| matrix.get(a, obj) == best);
        optimal_sets.push(survivors.clone());
    }

    let reference_arm = optimal_sets[objs - 1][0];
    let optimal_means = matrix.row(reference_arm).to_vec();

    let mut drop_sets: Vec<ArmSet> = Vec::with_capacity(objs);
    let mut drop_objective = vec![None; arms];
    for obj in 0..objs {
        let previous: Vec<usize> = if obj == 0 {
            (0..arms).collect()
        } else {
            optimal_sets[obj - 1].clone()
        };
        let dropped: ArmSet = previous
            .into_iter()
            .filter(|a| optimal_sets[obj].binary_search(a).is_err())
            .collect();
        for &a in &dropped {
            drop_objective[a] = Some(obj);
        }
        drop_sets.push(dropped);
    }

    let mut gaps = Vec::with_capacity(arms * objs);
    for arm in 0..arms {
        gaps.extend(
            optimal_means
                .iter()
                .zip(matrix.row(arm))
                .map(|(m, v)| m - v),
        );
    }
    let abs_gaps: Vec<f64> = gaps.iter().map(|g| g.abs()).collect();
    let max_abs_gap = abs_gaps
        .chunks(objs)
        .map(|row| row.iter().copied().fold(0.0, f64::max))
        .collect();

    let suboptimal_sets: Vec<ArmSet> = (0..objs)
        .map(|obj| (0..arms).filter(|&a| gaps[a * objs + obj] > 0.0).collect())
        .collect();

    let min_gap = (0..objs)
        .map(|obj| {
            let set = match convention {
                MinGapConvention::PriorityBased => &drop_sets[obj],
                MinGapConvention::PriorityFree => &suboptimal_sets[obj],
            };
            set.iter()
                .map(|&a| gaps[a * objs + obj])
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let max_gap = (0..objs)
        .map(|obj| (0..arms).map(|a| gaps[a * objs + obj]).fold(0.0, f64::max))
        .collect();

    InstanceAnalysis {
        num_arms: arms,
        num_objectives: objs,
        optimal_sets,
        drop_sets,
        suboptimal_sets,
        gaps,
        abs_gaps,
        max_abs_gap,
        min_gap,
        max_gap,
        reference_arm,
        optimal_means,
        drop_objective,
        convention,
    }
}

/// Optimal sets straight from the definition: arm `a` is optimal in the first
/// i objectives iff no arm dominates it there. O(A²·D²).
pub fn optimal_sets_by_dominance(matrix: &RewardMatrix) -> Vec<ArmSet> {
    let arms = matrix.num_arms();
    (1..=matrix.num_objectives())
        .map(|prefix| {
            (0..arms)
                .filter(|&a| {
                    (0..arms).all(|b| !dominates_unchecked(matrix.row(b), matrix.row(a), prefix))
                })
                .collect()
        })
        .collect()
}

/// Subtracts `offsets[i]` from every mean of objective i.
pub fn normalize(matrix: &RewardMatrix, offsets: &[f64]) -> Result<RewardMatrix> {
    if offsets.len() != matrix.num_objectives() {
        return Err(LexError::Contract(format!(
            "{} offsets for {} objectives",
            offsets.len(),
            matrix.num_objectives()
        )));
    }
    if offsets.iter().any(|o| !o.is_finite()) {
        return Err(LexError::Contract("offsets must be finite".into()));
    }
    let values = matrix
        .rows()
        .flat_map(|row| row.iter().zip(offsets).map(|(v, o)| v - o))
        .collect();
    RewardMatrix::from_flat(matrix.num_arms(), matrix.num_objectives(), values)
}

/// Satisficing sets relative to per-objective thresholds η.
#[derive(Debug, Clone, PartialEq)]
pub struct SatisficingAnalysis {
    pub thresholds: Vec<f64>,
    /// `satisficing_sets[i]` = arms with μ_a^i ≥ η_i.
    pub satisficing_sets: Vec<ArmSet>,
    /// `nonsat_sets[i]` = arms with μ_a^i < η_i.
    pub nonsat_sets: Vec<ArmSet>,
    /// δ_i = μ_*^i − η_i, measured from the lexicographic optimal arm.
    pub threshold_gaps: Vec<f64>,
    /// Row-major A×D shortfalls η_i − μ_a^i (negative when the arm clears the threshold).
    pub shortfalls: Vec<f64>,
}

impl SatisficingAnalysis {
    #[inline]
    pub fn shortfall(&self, arm: usize, objective: usize) -> f64 {
        self.shortfalls[arm * self.thresholds.len() + objective]
    }

    #[inline]
    pub fn is_nonsat(&self, arm: usize, objective: usize) -> bool {
        self.shortfall(arm, objective) > 0.0
    }
}

/// Builds the satisficing sets. With `require_case2`, additionally checks
/// μ_*^i − Δ_min^i < η_i < μ_*^i for every objective and that some arm
/// satisfies every threshold.
pub fn analyze_satisficing(
    matrix: &RewardMatrix,
    thresholds: &[f64],
    require_case2: bool,
) -> Result<SatisficingAnalysis> {
    let objs = matrix.num_objectives();
    if thresholds.len() != objs {
        return Err(LexError::Config(format!(
            "{} thresholds for {} objectives",
            thresholds.len(),
            objs
        )));
    }
    if let Some(i) = thresholds.iter().position(|t| !t.is_finite()) {
        return Err(LexError::Config(format!(
            "threshold for objective {} is not finite",
            i + 1
        )));
    }
    let analysis = analyze_instance(matrix);
    if require_case2 {
        for (obj, &eta) in thresholds.iter().enumerate() {
            let top = analysis.optimal_means[obj];
            let lower = top - analysis.min_gap[obj];
            if !(lower < eta && eta < top) {
                return Err(LexError::Config(format!(
                    "threshold {} for objective {} is not strictly between {} and {}",
                    eta,
                    obj + 1,
                    lower,
                    top
                )));
            }
        }
        let any_all_sat = matrix
            .rows()
            .any(|row| row.iter().zip(thresholds).all(|(m, t)| m >= t));
        if !any_all_sat {
            return Err(LexError::Config("no arm meets every threshold".into()));
        }
    }

    let arms = matrix.num_arms();
    let mut shortfalls = Vec::with_capacity(arms * objs);
    for arm in 0..arms {
        shortfalls.extend(thresholds.iter().zip(matrix.row(arm)).map(|(e, v)| e - v));
    }
    let satisficing_sets = (0..objs)
        .map(|obj| {
            (0..arms)
                .filter(|&a| matrix.get(a, obj) >= thresholds[obj])
                .collect()
        })
        .collect();
    let nonsat_sets = (0..objs)
        .map(|obj| {
            (0..arms)
                .filter(|&a| matrix.get(a, obj) < thresholds[obj])
                .collect()
        })
        .collect();
    let threshold_gaps = analysis
        .optimal_means
        .iter()
        .zip(thresholds)
        .map(|(m, t)| m - t)
        .collect();
    Ok(SatisficingAnalysis {
        thresholds: thresholds.to_vec(),
        satisficing_sets,
        nonsat_sets,
        threshold_gaps,
        shortfalls,
    })
}
