//! Command-line entry points: the thin binary delegates everything here.
//!
//! Subcommands mirror the pipeline: `generate` synthetic datasets, `fit`
//! one model and dump its parameters, `eval` the replicated comparison,
//! `sweep` label budgets, and `report` results as markdown. Exit codes:
//! 0 on success, 1 on runtime failures (bad files, bad data), 2 on usage
//! errors.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::blend::{train_subgroup_classifiers, ClassifierOptions};
use crate::dgp;
use crate::error::{Error, Result};
use crate::experiment::{label_fraction_sweep, render_report, run_experiment};
use crate::hierarchy::build_hierarchy;
use crate::io::{
    self, load_config, load_dataset, write_classifiers, write_dataset, write_node_params,
    write_results, write_sweep, ClassifierFileRow, ExperimentConfig,
};
use crate::model::{split_labeled_with, Dataset, DatasetRole, SplitOptions};
use crate::optim::{fit_hierarchy, ObjectiveSpec, PowellOptions};

#[derive(Parser)]
#[command(
    name = "popadapt",
    version,
    about = "Population-aware domain adaptation for outbreak symptom surveys"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic symptom-survey datasets into a directory.
    Generate {
        /// Experiment config supplying generator overrides (optional).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Generator seed.
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Output directory (created if missing); one CSV per dataset.
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit the population-aware hierarchy once and write its parameters.
    Fit {
        #[arg(long)]
        config: PathBuf,
        /// Directory holding `<dataset>.csv` for every configured dataset.
        #[arg(long)]
        data: PathBuf,
        /// Output directory for `node_params.csv` and `classifiers.csv`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the replicated evaluation and write a results CSV.
    Eval {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Output results CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate across label fractions and write the aggregated CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Comma-separated label fractions, e.g. 0.05,0.1,0.25.
        #[arg(long, value_delimiter = ',', required = true)]
        fractions: Vec<f64>,
        /// Output CSV of per-fraction subgroup-mean AUCs.
        #[arg(long)]
        out: PathBuf,
        /// Optional CSV capturing every underlying result row.
        #[arg(long)]
        raw_out: Option<PathBuf>,
    },
    /// Render a results CSV as a markdown report.
    Report {
        /// Results CSV produced by `eval` (or `sweep --raw-out`).
        #[arg(long = "in")]
        input: PathBuf,
        /// Output markdown path.
        #[arg(long)]
        out: PathBuf,
    },
}

/// Parse `args` and run. Returns the process exit code instead of
/// exiting, so tests can drive it in-process.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests print to stdout and succeed; real
            // usage errors go to stderr with the conventional code 2.
            let is_usage_error = e.use_stderr();
            let _ = e.print();
            return if is_usage_error { 2 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Generate { config, seed, out } => generate(config.as_deref(), seed, &out),
        Command::Fit { config, data, out } => fit(&config, &data, &out),
        Command::Eval { config, data, out } => eval(&config, &data, &out),
        Command::Sweep { config, data, fractions, out, raw_out } => {
            sweep(&config, &data, &fractions, &out, raw_out.as_deref())
        }
        Command::Report { input, out } => report(&input, &out),
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))
}

/// Load every configured dataset from `dir`, assigning modes and roles
/// from the config.
fn load_datasets(cfg: &ExperimentConfig, dir: &Path) -> Result<Vec<Dataset>> {
    let mut out = Vec::new();
    for name in cfg.dataset_names() {
        let mode = cfg.mode_for(&name)?;
        let role =
            if name == cfg.target { DatasetRole::Target } else { DatasetRole::Source };
        let path = dir.join(format!("{name}.csv"));
        out.push(load_dataset(&path, &name, mode, role)?);
    }
    Ok(out)
}

fn generate(config: Option<&Path>, seed: u64, out: &Path) -> Result<()> {
    let mut dgp_cfg = dgp::default_config();
    if let Some(path) = config {
        let cfg = load_config(path)?;
        dgp_cfg.apply_overrides(&cfg.dgp)?;
    }
    let bundle = dgp::generate(&dgp_cfg, seed)?;
    ensure_dir(out)?;
    for d in &bundle.datasets {
        let path = out.join(format!("{}.csv", d.name));
        write_dataset(&path, d)?;
        println!("wrote {} ({} records)", path.display(), d.records.len());
    }
    Ok(())
}

/// Replicate the first evaluation seed's training view: split the
/// target's labels and hide everything outside the train split.
fn masked_fit_sets(cfg: &ExperimentConfig, datasets: Vec<Dataset>) -> Result<Vec<Dataset>> {
    let seed = cfg.seeds[0];
    let mut fit_sets = datasets;
    let target = fit_sets.last_mut().expect("dataset_names is never empty");
    let (train, _test) = split_labeled_with(
        target,
        cfg.label_fraction,
        seed,
        SplitOptions { stratified: cfg.stratified },
    )?;
    for (i, r) in target.records.iter_mut().enumerate() {
        if train.binary_search(&i).is_err() {
            r.flu = None;
        }
    }
    Ok(fit_sets)
}

fn fit(config: &Path, data: &Path, out: &Path) -> Result<()> {
    let cfg = load_config(config)?;
    cfg.validate()?;
    let fit_sets = masked_fit_sets(&cfg, load_datasets(&cfg, data)?)?;

    let graph = build_hierarchy(&fit_sets);
    let spec = ObjectiveSpec::for_datasets(graph, &fit_sets, cfg.lambda, cfg.beta, cfg.alpha);
    let fitted = fit_hierarchy(
        &spec,
        PowellOptions { tol: cfg.powell_tol, max_iter: cfg.powell_max_iter },
    );

    let target = fit_sets.last().expect("dataset_names is never empty");
    let opts = ClassifierOptions { tau: cfg.tau, ..ClassifierOptions::default() };
    let classifiers = train_subgroup_classifiers(&fitted, target, &fit_sets, &opts)?;

    ensure_dir(out)?;
    let named: Vec<(String, [f64; crate::NUM_SYMPTOMS])> = fitted
        .graph
        .nodes
        .iter()
        .zip(&fitted.params)
        .map(|(n, p)| (n.label(), *p))
        .collect();
    let params_path = out.join("node_params.csv");
    write_node_params(&params_path, &named)?;
    println!("wrote {} ({} nodes)", params_path.display(), named.len());

    let rows: Vec<ClassifierFileRow> = classifiers
        .iter()
        .map(|c| ClassifierFileRow {
            dataset: target.name.clone(),
            key: c.key,
            gamma: c.gamma,
            choice: c.choice,
            reason: c.reason,
        })
        .collect();
    let classifiers_path = out.join("classifiers.csv");
    write_classifiers(&classifiers_path, &rows)?;
    println!("wrote {} ({} subgroups)", classifiers_path.display(), rows.len());
    println!(
        "objective {:.6} after {} cycles ({})",
        fitted.objective,
        fitted.cycles,
        if fitted.converged { "converged" } else { "cycle cap reached" },
    );
    Ok(())
}

fn eval(config: &Path, data: &Path, out: &Path) -> Result<()> {
    let cfg = load_config(config)?;
    let datasets = load_datasets(&cfg, data)?;
    let rows = run_experiment(&datasets, &cfg)?;
    write_results(out, &rows)?;
    println!("wrote {} ({} rows)", out.display(), rows.len());
    Ok(())
}

fn sweep(
    config: &Path,
    data: &Path,
    fractions: &[f64],
    out: &Path,
    raw_out: Option<&Path>,
) -> Result<()> {
    let cfg = load_config(config)?;
    let datasets = load_datasets(&cfg, data)?;
    let outcome = label_fraction_sweep(&datasets, &cfg, fractions)?;
    write_sweep(out, &outcome.summary)?;
    println!("wrote {} ({} rows)", out.display(), outcome.summary.len());
    if let Some(raw_path) = raw_out {
        write_results(raw_path, &outcome.raw)?;
        println!("wrote {} ({} rows)", raw_path.display(), outcome.raw.len());
    }
    Ok(())
}

fn report(input: &Path, out: &Path) -> Result<()> {
    let rows = io::read_results(input)?;
    let markdown = render_report(&rows);
    std::fs::write(out, markdown).map_err(|e| Error::io(out.display().to_string(), e))?;
    println!("wrote {}", out.display());
    Ok(())
}
