//! Published learner grids, their reference results and the acceptance band.

use serde::{Deserialize, Serialize};

use super::experiment::{ExperimentSpec, ExperimentSummary, LearnerSpec};
use crate::error::{LexError, Result};
use crate::policies::{HorizonParam, PolicyConfig};
use crate::regret::Notion;

pub const REFERENCE_HORIZON: u64 = 100_000;
pub const REFERENCE_REPLICATIONS: u64 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReproTable {
    Table3,
    Table5,
}

impl ReproTable {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "table3" => Ok(ReproTable::Table3),
            "table5" => Ok(ReproTable::Table5),
            other => Err(LexError::Config(format!(
                "unknown table '{other}' (known: table3, table5)"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ReproTable::Table3 => "table3",
            ReproTable::Table5 => "table5",
        }
    }

    pub fn settings(self) -> &'static [&'static str] {
        match self {
            ReproTable::Table3 => &["setting1", "setting2", "setting3"],
            ReproTable::Table5 => &["setting4", "setting5"],
        }
    }

    pub fn notions(self) -> &'static [Notion] {
        match self {
            ReproTable::Table3 => &[Notion::PriorityBased],
            ReproTable::Table5 => &[Notion::PriorityBased, Notion::PriorityFree],
        }
    }

    /// Learners run on `setting` for this table.
    pub fn learners(self, setting: &str) -> Vec<LearnerSpec> {
        match self {
            ReproTable::Table3 => table3_learners(),
            ReproTable::Table5 => table5_learners(setting),
        }
    }

    /// One experiment per setting.
    pub fn experiments(self, seed: u64, replications: u64, horizon: u64) -> Vec<ExperimentSpec> {
        self.settings()
            .iter()
            .map(|s| ExperimentSpec::for_setting(s, self.learners(s), horizon, replications, seed))
            .collect()
    }

    pub fn reference(self) -> Vec<ReferenceCell> {
        match self {
            ReproTable::Table3 => table3_reference(),
            ReproTable::Table5 => table5_reference(),
        }
    }
}

fn pf(label: &str, power: f64) -> LearnerSpec {
    let p = HorizonParam::Power {
        horizon_power: power,
    };
    LearnerSpec::new(label, PolicyConfig::pf_lex(p, p))
}

/// The eight two-objective learners, in table order.
pub fn table3_learners() -> Vec<LearnerSpec> {
    let half = vec![0.5, 0.5];
    vec![
        LearnerSpec::new("OM-LEX 1", PolicyConfig::om_lex(half.clone())),
        LearnerSpec::new(
            "OM-LEX 1 (SO)",
            PolicyConfig::om_lex(half).single_objective(),
        ),
        LearnerSpec::new("NOM-LEX 1", PolicyConfig::nom_lex(vec![0.45, 0.45])),
        LearnerSpec::new("NOM-LEX 2", PolicyConfig::nom_lex(vec![0.4 + 1e-6; 2])),
        LearnerSpec::new("NOM-LEX 3", PolicyConfig::nom_lex(vec![0.5 - 1e-6; 2])),
        LearnerSpec::new(
            "NOM-LEX 1 (SO)",
            PolicyConfig::nom_lex(vec![0.45, 0.45]).single_objective(),
        ),
        pf("PF-LEX 1", -0.2),
        pf("PF-LEX 2", -0.1),
    ]
}

/// Three-objective learners; NOM-LEX 5 only on setting5, where its objective-2
/// threshold is admissible.
pub fn table5_learners(setting: &str) -> Vec<LearnerSpec> {
    let mut v = vec![
        LearnerSpec::new("OM-LEX 2", PolicyConfig::om_lex(vec![0.5; 3])),
        LearnerSpec::new("NOM-LEX 4", PolicyConfig::nom_lex(vec![0.45; 3])),
    ];
    if setting == "setting5" {
        v.push(LearnerSpec::new(
            "NOM-LEX 5",
            PolicyConfig::nom_lex(vec![0.45, -1e6, 0.45]),
        ));
    }
    v
}

/// PF-LEX with ε = δ = T^(-1/3), the gap-free tuning.
pub fn pf_lex_gap_free() -> LearnerSpec {
    pf("PF-LEX 3", -1.0 / 3.0)
}

/// A published mean ± std for one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceCell {
    pub setting: String,
    pub learner: String,
    pub notion: Notion,
    /// 0-based.
    pub objective: usize,
    pub mean: f64,
    pub std: f64,
}

fn cells(
    out: &mut Vec<ReferenceCell>,
    setting: &str,
    learner: &str,
    notion: Notion,
    values: &[Option<(f64, f64)>],
) {
    for (objective, v) in values.iter().enumerate() {
        if let Some((mean, std)) = *v {
            out.push(ReferenceCell {
                setting: setting.into(),
                learner: learner.into(),
                notion,
                objective,
                mean,
                std,
            });
        }
    }
}

/// Priority-based regret at T = 10^5 over 100 runs, two-objective settings.
/// Single-objective variants report objective 1 only.
pub fn table3_reference() -> Vec<ReferenceCell> {
    type Row = (&'static str, [[Option<(f64, f64)>; 2]; 3]);
    let rows: [Row; 8] = [
        (
            "OM-LEX 1",
            [
                [Some((12.0, 2.1)), Some((333.0, 56.0))],
                [Some((321.0, 71.0)), Some((314.0, 61.0))],
                [Some((11.0, 2.0)), Some((323.0, 60.0))],
            ],
        ),
        (
            "OM-LEX 1 (SO)",
            [
                [Some((334.0, 73.0)), None],
                [Some((334.0, 73.0)), None],
                [Some((334.0, 73.0)), None],
            ],
        ),
        (
            "NOM-LEX 1",
            [
                [Some((1210.0, 700.0)), Some((1150.0, 680.0))],
                [Some((4450.0, 3800.0)), Some((2400.0, 2900.0))],
                [Some((285.0, 110.0)), Some((270.0, 120.0))],
            ],
        ),
        (
            "NOM-LEX 2",
            [
                [Some((1250.0, 630.0)), Some((1320.0, 600.0))],
                [Some((1240.0, 600.0)), Some((1160.0, 660.0))],
                [Some((14.9, 12.0)), Some((4990.0, 3000.0))],
            ],
        ),
        (
            "NOM-LEX 3",
            [
                [Some((12.7, 7.0)), Some((1250.0, 640.0))],
                [Some((253.0, 140.0)), Some((269.0, 140.0))],
                [Some((8.38, 5.6)), Some((245.0, 140.0))],
            ],
        ),
        (
            "NOM-LEX 1 (SO)",
            [
                [Some((706.0, 770.0)), None],
                [Some((706.0, 770.0)), None],
                [Some((706.0, 770.0)), None],
            ],
        ),
        (
            "PF-LEX 1",
            [
                [Some((764.0, 210.0)), Some((723.0, 1.1e-12))],
                [Some((806.0, 240.0)), Some((723.0, 1.1e-12))],
                [Some((679.0, 77.0)), Some((723.0, 1.1e-12))],
            ],
        ),
        (
            "PF-LEX 2",
            [
                [Some((9820.0, 4.5)), Some((52.8, 14e-15))],
                [Some((5000.0, 860.0)), Some((94.6, 24.0))],
                [Some((52.8, 14e-15)), Some((105.0, 32.0))],
            ],
        ),
    ];
    let settings = ReproTable::Table3.settings();
    let mut out = Vec::new();
    for (learner, per_setting) in rows {
        for (s, values) in settings.iter().zip(per_setting) {
            cells(&mut out, s, learner, Notion::PriorityBased, &values);
        }
    }
    out
}

/// Priority-based and priority-free regret at T = 10^5 over 100 runs,
/// three-objective settings. Objective-2 priority-based regret in setting5
/// is identically zero and not reported.
pub fn table5_reference() -> Vec<ReferenceCell> {
    type Row = (&'static str, &'static str, Notion, [Option<(f64, f64)>; 3]);
    let pb = Notion::PriorityBased;
    let pf = Notion::PriorityFree;
    let rows: [Row; 10] = [
        (
            "setting4",
            "OM-LEX 2",
            pb,
            [
                Some((2000.0, 100.0)),
                Some((821.0, 75.0)),
                Some((367.0, 59.0)),
            ],
        ),
        (
            "setting4",
            "OM-LEX 2",
            pf,
            [
                Some((1990.0, 120.0)),
                Some((1440.0, 110.0)),
                Some((1290.0, 110.0)),
            ],
        ),
        (
            "setting4",
            "NOM-LEX 4",
            pb,
            [
                Some((6620.0, 2000.0)),
                Some((2160.0, 800.0)),
                Some((684.0, 420.0)),
            ],
        ),
        (
            "setting4",
            "NOM-LEX 4",
            pf,
            [
                Some((6840.0, 1800.0)),
                Some((-4490.0, 3000.0)),
                Some((-7910.0, 3200.0)),
            ],
        ),
        (
            "setting5",
            "OM-LEX 2",
            pb,
            [Some((1010.0, 82.0)), None, Some((373.0, 72.0))],
        ),
        (
            "setting5",
            "OM-LEX 2",
            pf,
            [
                Some((1040.0, 81.0)),
                Some((-350.0, 17.0)),
                Some((-350.0, 17.0)),
            ],
        ),
        (
            "setting5",
            "NOM-LEX 4",
            pb,
            [Some((7180.0, 2000.0)), None, Some((1160.0, 470.0))],
        ),
        (
            "setting5",
            "NOM-LEX 4",
            pf,
            [
                Some((7250.0, 2200.0)),
                Some((-14100.0, 4300.0)),
                Some((-5930.0, 2500.0)),
            ],
        ),
        (
            "setting5",
            "NOM-LEX 5",
            pb,
            [Some((6570.0, 2700.0)), None, Some((1020.0, 550.0))],
        ),
        (
            "setting5",
            "NOM-LEX 5",
            pf,
            [
                Some((6670.0, 2600.0)),
                Some((-12900.0, 5200.0)),
                Some((-5860.0, 2800.0)),
            ],
        ),
    ];
    let mut out = Vec::new();
    for (setting, learner, notion, values) in rows {
        cells(&mut out, setting, learner, notion, &values);
    }
    out
}

/// Acceptance band around a reference mean:
/// `max(k · std / sqrt(n), relative · |mean| + absolute)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerance {
    pub std_errors: f64,
    pub reference_replications: u64,
    pub relative: f64,
    pub absolute: f64,
    /// A negative reference mean also requires a negative observed mean.
    pub require_sign: bool,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            std_errors: 3.0,
            reference_replications: REFERENCE_REPLICATIONS,
            relative: 0.25,
            absolute: 1.0,
            require_sign: true,
        }
    }
}

impl Tolerance {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| LexError::Config(format!("tolerance file: {e}")))
    }

    pub fn band(&self, mean: f64, std: f64) -> f64 {
        let se = self.std_errors * std / (self.reference_replications as f64).sqrt();
        se.max(self.relative * mean.abs() + self.absolute)
    }

    pub fn accepts(&self, reference_mean: f64, reference_std: f64, observed: f64) -> bool {
        let within = (observed - reference_mean).abs() <= self.band(reference_mean, reference_std);
        let sign_ok = !(self.require_sign && reference_mean < 0.0) || observed < 0.0;
        within && sign_ok
    }
}

/// One compared cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub reference: ReferenceCell,
    pub observed_mean: f64,
    pub observed_std: f64,
    pub band: f64,
    pub pass: bool,
}

/// Compares summaries against the reference cells of `table`. A reference
/// cell with no matching run is an error.
pub fn compare(
    table: ReproTable,
    summaries: &[ExperimentSummary],
    tol: &Tolerance,
) -> Result<Vec<CellReport>> {
    table
        .reference()
        .into_iter()
        .map(|cell| {
            let stat = summaries
                .iter()
                .find(|s| s.setting == cell.setting)
                .and_then(|s| s.learner(&cell.learner))
                .and_then(|l| l.stat(cell.notion, cell.objective))
                .ok_or_else(|| {
                    LexError::Contract(format!(
                        "no result for {} / {} / objective {} / {}",
                        cell.setting,
                        cell.learner,
                        cell.objective + 1,
                        cell.notion
                    ))
                })?;
            Ok(CellReport {
                band: tol.band(cell.mean, cell.std),
                pass: tol.accepts(cell.mean, cell.std, stat.mean),
                observed_mean: stat.mean,
                observed_std: stat.std,
                reference: cell,
            })
        })
        .collect()
}
