use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use lexmab::bounds::{bound_report, BoundParams, BoundReport, Theorem};
use lexmab::envs::RewardFamily;
use lexmab::harness::{
    builtin_setting, compare, export, export_comparison, run_experiment, ExperimentSpec,
    ExperimentSummary, ExportOptions, ReproTable, Tolerance, REFERENCE_HORIZON,
    REFERENCE_REPLICATIONS, SETTINGS,
};
use lexmab::lexcore::{analyze_instance, analyze_satisficing, InstanceAnalysis, RewardMatrix};
use lexmab::LexError;

// Stdout writes that end the process quietly once the reader has gone away
// (for example when piped into `head`).
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        if write!(std::io::stdout().lock(), $($arg)*).is_err() {
            std::process::exit(0);
        }
    }};
}

macro_rules! outln {
    () => { out!("\n") };
    ($($arg:tt)*) => {{
        out!($($arg)*);
        out!("\n");
    }};
}

/// Simulator for multi-objective bandits under lexicographic preferences.
#[derive(Parser)]
#[command(name = "lexmab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in settings.
    Settings {
        /// Print JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Print optimal sets, drop sets and gaps of an instance.
    Analyze {
        #[command(flatten)]
        source: InstanceArgs,
        /// Print JSON instead of text.
        #[arg(long)]
        json: bool,
        /// Also write the JSON analysis to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the regret bounds of an instance.
    Bounds {
        #[command(flatten)]
        source: InstanceArgs,
        /// Theorem number 1-6; all applicable theorems when omitted.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=6))]
        theorem: Option<u8>,
        /// NOM-LEX thresholds, comma separated (theorems 2, 4, 6).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        thresholds: Option<Vec<f64>>,
        /// Horizon T (theorem 3).
        #[arg(long)]
        horizon: Option<u64>,
        /// PF-LEX epsilon (theorem 3).
        #[arg(long)]
        epsilon: Option<f64>,
        /// PF-LEX delta (theorem 3).
        #[arg(long)]
        delta: Option<f64>,
        /// Print CSV instead of a table.
        #[arg(long)]
        csv: bool,
        /// Also write the CSV to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an experiment described by a JSON config file.
    Run {
        /// Experiment config (JSON).
        config: PathBuf,
        /// Output directory; overrides the config's output_dir.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Write per-replication trajectories to trajectory.csv.
        #[arg(long)]
        trajectories: bool,
        /// Write mean trajectories to mean_trajectory.csv.
        #[arg(long)]
        plot_data: bool,
    },
    /// Rerun a published results table and compare cell by cell.
    Reproduce {
        /// table3 or table5.
        table: String,
        /// Master seed.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output directory.
        #[arg(long, default_value = "results")]
        out_dir: PathBuf,
        /// Replications per learner.
        #[arg(long, default_value_t = REFERENCE_REPLICATIONS)]
        replications: u64,
        /// Horizon T.
        #[arg(long, default_value_t = REFERENCE_HORIZON)]
        horizon: u64,
        /// JSON file overriding the acceptance tolerance.
        #[arg(long)]
        tolerance_file: Option<PathBuf>,
        /// Write per-replication trajectories to trajectory.csv.
        #[arg(long)]
        trajectories: bool,
        /// Write mean trajectories to mean_trajectory.csv.
        #[arg(long)]
        plot_data: bool,
    },
}

#[derive(Args)]
struct InstanceArgs {
    /// Built-in setting name.
    #[arg(conflicts_with_all = ["matrix", "config"])]
    setting: Option<String>,
    /// Inline mean matrix as JSON, e.g. '[[0.5,0.5],[0.4,0.9]]'.
    #[arg(long, conflicts_with = "config")]
    matrix: Option<String>,
    /// Take the instance from an experiment config file.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl InstanceArgs {
    fn load(&self) -> Result<(String, RewardMatrix, RewardFamily)> {
        if let Some(name) = &self.setting {
            let (inst, _) = builtin_setting(name)?;
            return Ok((name.clone(), inst.means, inst.family));
        }
        if let Some(text) = &self.matrix {
            let rows: Vec<Vec<f64>> = serde_json::from_str(text)
                .map_err(|e| LexError::Config(format!("--matrix: {e}")))?;
            return Ok((
                "custom".into(),
                RewardMatrix::new(rows)?,
                RewardFamily::Bernoulli,
            ));
        }
        if let Some(path) = &self.config {
            let spec = read_spec(path)?;
            let (inst, _) = spec.instance()?;
            return Ok((spec.setting_label(), inst.means, inst.family));
        }
        Err(LexError::Config("give a setting name, --matrix or --config".into()).into())
    }
}

fn read_spec(path: &Path) -> Result<ExperimentSpec> {
    let text = fs::read_to_string(path)
        .map_err(|e| LexError::Config(format!("cannot read {}: {e}", path.display())))?;
    Ok(ExperimentSpec::from_json(&text)?)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

/// `{1, 3}` with 1-based arm numbers.
fn arm_set(arms: &[usize]) -> String {
    let inner: Vec<String> = arms.iter().map(|a| (a + 1).to_string()).collect();
    format!("{{{}}}", inner.join(", "))
}

fn vector(values: &[f64]) -> String {
    let inner: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    format!("({})", inner.join(", "))
}

fn one_based(sets: &[Vec<usize>]) -> Vec<Vec<usize>> {
    sets.iter()
        .map(|s| s.iter().map(|a| a + 1).collect())
        .collect()
}

fn finite_or_null(v: f64) -> serde_json::Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!(null)
    }
}

fn analysis_json(label: &str, m: &RewardMatrix, a: &InstanceAnalysis) -> serde_json::Value {
    let d = a.num_objectives;
    json!({
        "instance": label,
        "num_arms": a.num_arms,
        "num_objectives": d,
        "means": m.to_rows(),
        "optimal_arms": a.optimal_arms().iter().map(|x| x + 1).collect::<Vec<_>>(),
        "reference_arm": a.reference_arm + 1,
        "optimal_means": a.optimal_means,
        "optimal_sets": one_based(&a.optimal_sets),
        "drop_sets": one_based(&a.drop_sets),
        "suboptimal_sets": one_based(&a.suboptimal_sets),
        "gaps": (0..a.num_arms).map(|x| a.gaps[x * d..(x + 1) * d].to_vec()).collect::<Vec<_>>(),
        "max_abs_gap": a.max_abs_gap,
        "min_gap": a.min_gap.iter().map(|v| finite_or_null(*v)).collect::<Vec<_>>(),
        "max_gap": a.max_gap,
    })
}

fn print_analysis(label: &str, m: &RewardMatrix, family: RewardFamily, a: &InstanceAnalysis) {
    outln!(
        "instance {label}: {} arms, {} objectives, {family} rewards",
        a.num_arms,
        a.num_objectives
    );
    outln!("lexicographic optimal arms: {}", arm_set(a.optimal_arms()));
    outln!(
        "reference arm: {}, optimal means {}",
        a.reference_arm + 1,
        vector(&a.optimal_means)
    );
    for i in 0..a.num_objectives {
        outln!(
            "objective {}: A* = {}  S* = {}  S = {}  min gap = {}  max gap = {}",
            i + 1,
            arm_set(&a.optimal_sets[i]),
            arm_set(&a.drop_sets[i]),
            arm_set(&a.suboptimal_sets[i]),
            a.min_gap[i],
            a.max_gap[i]
        );
    }
    outln!();
    let mut header = format!("{:>4}  {:<24}", "arm", "means");
    for i in 0..a.num_objectives {
        header.push_str(&format!("  {:>9}", format!("gap {}", i + 1)));
    }
    header.push_str("  drops at");
    outln!("{header}");
    for arm in 0..a.num_arms {
        let mut line = format!("{:>4}  {:<24}", arm + 1, vector(m.row(arm)));
        for i in 0..a.num_objectives {
            line.push_str(&format!("  {:>9.4}", a.gap(arm, i)));
        }
        match a.drop_objective[arm] {
            Some(i) => line.push_str(&format!("  {}", i + 1)),
            None => line.push_str("  -"),
        }
        outln!("{line}");
    }
}

fn cmd_settings(as_json: bool) -> Result<()> {
    if as_json {
        let list: Vec<_> = SETTINGS
            .iter()
            .map(|(name, desc)| {
                let arms = builtin_setting(name)
                    .map(|(i, _)| i.num_arms())
                    .unwrap_or(0);
                json!({"name": name, "arms": arms, "description": desc})
            })
            .collect();
        outln!("{}", serde_json::to_string_pretty(&list)?);
    } else {
        for (name, desc) in SETTINGS {
            outln!("{name:<14} {desc}");
        }
    }
    Ok(())
}

fn cmd_analyze(source: &InstanceArgs, as_json: bool, out: Option<&Path>) -> Result<()> {
    let (label, m, family) = source.load()?;
    let a = analyze_instance(&m);
    let j = analysis_json(&label, &m, &a);
    if as_json {
        outln!("{}", serde_json::to_string_pretty(&j)?);
    } else {
        print_analysis(&label, &m, family, &a);
    }
    if let Some(path) = out {
        write_file(path, &serde_json::to_string_pretty(&j)?)?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_bounds(
    source: &InstanceArgs,
    theorem: Option<u8>,
    params: BoundParams,
    as_csv: bool,
    out: Option<&Path>,
) -> Result<()> {
    let (_, m, _) = source.load()?;
    let a = analyze_instance(&m);
    let sat = params
        .thresholds
        .as_ref()
        .map(|eta| analyze_satisficing(&m, eta, false))
        .transpose()?;
    let wanted: Vec<Theorem> = match theorem {
        Some(n) => vec![Theorem::ALL[usize::from(n) - 1]],
        None => Theorem::ALL
            .into_iter()
            .filter(|t| match t {
                Theorem::NomLex | Theorem::NomLexPriorityFree | Theorem::Satisficing => {
                    params.thresholds.is_some()
                }
                Theorem::PfLex => {
                    params.horizon.is_some() && params.epsilon.is_some() && params.delta.is_some()
                }
                _ => true,
            })
            .collect(),
    };
    let reports = wanted
        .into_iter()
        .map(|t| bound_report(t, &a, sat.as_ref(), &params))
        .collect::<lexmab::Result<Vec<BoundReport>>>()?;

    let mut csv = String::from(BoundReport::csv_header());
    csv.push('\n');
    for r in &reports {
        for row in r.csv_rows() {
            csv.push_str(&row);
            csv.push('\n');
        }
    }
    if as_csv {
        out!("{csv}");
    } else {
        outln!(
            "{:<8} {:<38} {:>9} {:>16}  note",
            "theorem",
            "bound",
            "objective",
            "value"
        );
        for r in &reports {
            for (i, b) in r.per_objective.iter().enumerate() {
                outln!(
                    "{:<8} {:<38} {:>9} {:>16.4}  {}",
                    r.theorem.number(),
                    r.theorem.description(),
                    i + 1,
                    b.value,
                    b.diagnostic.as_deref().unwrap_or("")
                );
            }
        }
    }
    if let Some(path) = out {
        write_file(path, &csv)?;
    }
    Ok(())
}

fn print_summary(s: &ExperimentSummary) {
    outln!(
        "{}: T = {}, {} replications, seed {}",
        s.setting,
        s.horizon,
        s.replications,
        s.seed
    );
    outln!(
        "{:<18} {:>9} {:>6} {:>14} {:>12}",
        "learner",
        "objective",
        "notion",
        "mean",
        "std"
    );
    for l in &s.learners {
        for st in &l.stats {
            outln!(
                "{:<18} {:>9} {:>6} {:>14.4} {:>12.4}",
                l.label,
                st.objective + 1,
                st.notion,
                st.mean,
                st.std
            );
        }
    }
    for w in &s.warnings {
        eprintln!("warning: {w}");
    }
}

fn report_written(paths: &[PathBuf]) {
    for p in paths {
        eprintln!("wrote {}", p.display());
    }
}

fn cmd_run(config: &Path, out_dir: Option<PathBuf>, options: ExportOptions) -> Result<()> {
    let mut spec = read_spec(config)?;
    spec.trajectories |= options.trajectories;
    let dir = out_dir
        .or_else(|| spec.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("results"));
    let summary = run_experiment(&spec)?;
    print_summary(&summary);
    let options = ExportOptions {
        trajectories: spec.trajectories,
        plot_data: options.plot_data,
    };
    report_written(&export(std::slice::from_ref(&summary), &dir, options)?);
    Ok(())
}

fn cmd_reproduce(
    table: &str,
    seed: u64,
    out_dir: &Path,
    replications: u64,
    horizon: u64,
    tolerance_file: Option<&Path>,
    options: ExportOptions,
) -> Result<()> {
    let table = ReproTable::parse(table)?;
    let tolerance = match tolerance_file {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| LexError::Config(format!("cannot read {}: {e}", path.display())))?;
            Tolerance::from_json(&text)?
        }
        None => Tolerance::default(),
    };
    let mut summaries = Vec::new();
    for mut spec in table.experiments(seed, replications, horizon) {
        spec.trajectories = options.trajectories;
        eprintln!(
            "running {} ({} learners, T = {}, {} replications)",
            spec.setting_label(),
            spec.learners.len(),
            horizon,
            replications
        );
        summaries.push(run_experiment(&spec)?);
    }
    let reports = compare(table, &summaries, &tolerance)?;

    outln!(
        "{:<9} {:<15} {:>3} {:>6} {:>22} {:>22} {:>10}  verdict",
        "setting",
        "learner",
        "obj",
        "notion",
        "reference",
        "observed",
        "band"
    );
    for r in &reports {
        let c = &r.reference;
        outln!(
            "{:<9} {:<15} {:>3} {:>6} {:>22} {:>22} {:>10.3}  {}",
            c.setting,
            c.learner,
            c.objective + 1,
            c.notion,
            format!("{:.4} ± {:.3}", c.mean, c.std),
            format!("{:.4} ± {:.3}", r.observed_mean, r.observed_std),
            r.band,
            if r.pass { "PASS" } else { "FAIL" }
        );
    }
    let passed = reports.iter().filter(|r| r.pass).count();
    outln!("{passed}/{} cells within tolerance", reports.len());

    let mut written = export(&summaries, out_dir, options)?;
    written.push(export_comparison(&reports, out_dir)?);
    report_written(&written);
    Ok(())
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Settings { json } => cmd_settings(json),
        Command::Analyze { source, json, out } => cmd_analyze(&source, json, out.as_deref()),
        Command::Bounds {
            source,
            theorem,
            thresholds,
            horizon,
            epsilon,
            delta,
            csv,
            out,
        } => cmd_bounds(
            &source,
            theorem,
            BoundParams {
                thresholds,
                horizon,
                epsilon,
                delta,
            },
            csv,
            out.as_deref(),
        ),
        Command::Run {
            config,
            out_dir,
            trajectories,
            plot_data,
        } => cmd_run(
            &config,
            out_dir,
            ExportOptions {
                trajectories,
                plot_data,
            },
        ),
        Command::Reproduce {
            table,
            seed,
            out_dir,
            replications,
            horizon,
            tolerance_file,
            trajectories,
            plot_data,
        } => cmd_reproduce(
            &table,
            seed,
            &out_dir,
            replications,
            horizon,
            tolerance_file.as_deref(),
            ExportOptions {
                trajectories,
                plot_data,
            },
        ),
    }
}

/// 2 for configuration errors, 3 for everything else.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<LexError>() {
        Some(LexError::Config(_)) => 2,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
