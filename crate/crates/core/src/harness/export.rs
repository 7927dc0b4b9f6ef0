//! CSV output. Objectives and replications are written 1-based; floats use
//! the shortest round-trip representation, so output is byte-deterministic.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::experiment::ExperimentSummary;
use super::tables::CellReport;
use crate::error::{LexError, Result};

pub const SUMMARY_HEADER: &str = "setting,learner,objective,notion,mean,std,replications,T,seed";
pub const TRAJECTORY_HEADER: &str = "setting,learner,replication,round,objective,notion,value";
pub const MEAN_TRAJECTORY_HEADER: &str = "setting,learner,round,objective,notion,mean";
pub const COMPARISON_HEADER: &str =
    "setting,learner,objective,notion,reference_mean,reference_std,observed_mean,observed_std,band,verdict";

/// Quotes a field if it contains a delimiter or quote.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn summary_csv(summaries: &[ExperimentSummary]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for s in summaries {
        for l in &s.learners {
            for stat in &l.stats {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    csv_field(&s.setting),
                    csv_field(&l.label),
                    stat.objective + 1,
                    stat.notion,
                    stat.mean,
                    stat.std,
                    s.replications,
                    s.horizon,
                    s.seed
                );
            }
        }
    }
    out
}

/// Per-replication snapshot rows; learners without kept trajectories are skipped.
pub fn trajectory_csv(summaries: &[ExperimentSummary]) -> String {
    let mut out = String::from(TRAJECTORY_HEADER);
    out.push('\n');
    for s in summaries {
        for l in &s.learners {
            let Some(reps) = &l.replications else {
                continue;
            };
            let setting = csv_field(&s.setting);
            let label = csv_field(&l.label);
            for (r, rep) in reps.iter().enumerate() {
                for snap in rep.ledger.snapshots() {
                    for notion in &s.notions {
                        let values = snap.notion(*notion).unwrap_or(&[]);
                        for (obj, v) in values.iter().enumerate() {
                            let _ = writeln!(
                                out,
                                "{setting},{label},{},{},{},{notion},{v}",
                                r + 1,
                                snap.round,
                                obj + 1
                            );
                        }
                    }
                }
            }
        }
    }
    out
}

/// Snapshot-round means over replications, for plotting.
pub fn mean_trajectory_csv(summaries: &[ExperimentSummary]) -> String {
    let mut out = String::from(MEAN_TRAJECTORY_HEADER);
    out.push('\n');
    for s in summaries {
        for l in &s.learners {
            let setting = csv_field(&s.setting);
            let label = csv_field(&l.label);
            let traj = &l.mean_trajectory;
            for (round, per_notion) in traj.rounds.iter().zip(&traj.values) {
                for (notion, values) in s.notions.iter().zip(per_notion) {
                    for (obj, v) in values.iter().enumerate() {
                        let _ = writeln!(out, "{setting},{label},{round},{},{notion},{v}", obj + 1);
                    }
                }
            }
        }
    }
    out
}

pub fn comparison_csv(reports: &[CellReport]) -> String {
    let mut out = String::from(COMPARISON_HEADER);
    out.push('\n');
    for r in reports {
        let c = &r.reference;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            csv_field(&c.setting),
            csv_field(&c.learner),
            c.objective + 1,
            c.notion,
            c.mean,
            c.std,
            r.observed_mean,
            r.observed_std,
            r.band,
            if r.pass { "PASS" } else { "FAIL" }
        );
    }
    out
}

/// Which files [`export`] writes besides `summary.csv`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExportOptions {
    pub trajectories: bool,
    pub plot_data: bool,
}

fn write(path: PathBuf, contents: &str) -> Result<PathBuf> {
    fs::write(&path, contents).map_err(|e| LexError::io(&path, e))?;
    Ok(path)
}

/// Writes `summary.csv`, and optionally `trajectory.csv` and
/// `mean_trajectory.csv`, into `dir`. Returns the written paths.
pub fn export(
    summaries: &[ExperimentSummary],
    dir: &Path,
    options: ExportOptions,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| LexError::io(dir, e))?;
    let mut written = vec![write(dir.join("summary.csv"), &summary_csv(summaries))?];
    if options.trajectories {
        written.push(write(
            dir.join("trajectory.csv"),
            &trajectory_csv(summaries),
        )?);
    }
    if options.plot_data {
        written.push(write(
            dir.join("mean_trajectory.csv"),
            &mean_trajectory_csv(summaries),
        )?);
    }
    Ok(written)
}

/// Writes `comparison.csv` into `dir`.
pub fn export_comparison(reports: &[CellReport], dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| LexError::io(dir, e))?;
    write(dir.join("comparison.csv"), &comparison_csv(reports))
}
