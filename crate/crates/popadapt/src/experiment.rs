//! The evaluation harness: replicated label-budget experiments on a
//! target dataset, label-fraction sweeps, and markdown report rendering.
//!
//! Each replication draws a stratified train split of the target's
//! labeled records, hides every other target label from the methods, and
//! scores the held-out records against their true labels. The same split
//! serves every method in the replication, so per-seed differences are
//! method differences.

use crate::baselines::{run_method, Method};
use crate::blend::ThetaChoice;
use crate::error::{Error, Result};
use crate::io::ExperimentConfig;
use crate::model::{split_labeled_with, Dataset, DatasetRole, SplitOptions, SubgroupKey};
use crate::stats::auc;

/// One evaluation cell: a method's AUC on one subgroup (or on the whole
/// test split when `cell` is `None`) for one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub method: Method,
    /// Name of the evaluated (target) dataset.
    pub dataset: String,
    /// `None` for the overall row covering the whole test split.
    pub cell: Option<SubgroupKey>,
    pub label_fraction: f64,
    pub seed: u64,
    /// `None` when the cell's test records were single-class or absent.
    pub auc: Option<f64>,
    /// Licensing decision for this subgroup; populated only on the
    /// population-aware hierarchy's subgroup rows.
    pub theta_choice: Option<ThetaChoice>,
}

/// One point of a label-fraction sweep: a method's subgroup-averaged AUC
/// at one label budget, averaged over replications.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub method: Method,
    pub dataset: String,
    pub label_fraction: f64,
    /// Unweighted mean over defined subgroup AUCs, then over seeds;
    /// `None` when no replication produced a defined subgroup AUC.
    pub mean_subgroup_auc: Option<f64>,
}

/// Everything a sweep produces: the per-cell rows for every fraction and
/// the aggregated summary.
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub raw: Vec<ResultRow>,
    pub summary: Vec<SweepRow>,
}

/// Assemble the working datasets in canonical order (sources, then the
/// target), with roles assigned from the config.
fn arrange_datasets(datasets: &[Dataset], cfg: &ExperimentConfig) -> Result<Vec<Dataset>> {
    let mut working = Vec::with_capacity(cfg.sources.len() + 1);
    for name in cfg.dataset_names() {
        let found: Vec<&Dataset> = datasets.iter().filter(|d| d.name == name).collect();
        let d = match found.as_slice() {
            [d] => (*d).clone(),
            [] => return Err(Error::invalid(format!("dataset '{name}' not provided"))),
            _ => return Err(Error::invalid(format!("dataset '{name}' provided more than once"))),
        };
        let role = if name == cfg.target { DatasetRole::Target } else { DatasetRole::Source };
        working.push(Dataset { role, ..d });
    }
    Ok(working)
}

/// Run the replicated experiment described by `cfg` over `datasets`.
///
/// `datasets` must contain the target and every source by name; order and
/// declared roles in the input are ignored in favor of the config. For
/// each seed, the target's labeled records are split; methods see the
/// target with only the train labels revealed, and are scored on the
/// held-out records with their true labels. Emits, per seed and method,
/// one overall row followed by one row per demographic subgroup.
pub fn run_experiment(datasets: &[Dataset], cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let working = arrange_datasets(datasets, cfg)?;
    let target_pos = working.len() - 1;
    let target = &working[target_pos];
    debug_assert_eq!(target.name, cfg.target);

    let mut rows = Vec::new();
    for &seed in &cfg.seeds {
        let (train, test) = split_labeled_with(
            target,
            cfg.label_fraction,
            seed,
            SplitOptions { stratified: cfg.stratified },
        )?;
        assert!(
            test.iter().all(|i| train.binary_search(i).is_err()),
            "train and test splits must be disjoint"
        );

        // The masked target is what every method trains on: labels exist
        // only on the train split. True labels stay here for scoring.
        let mut masked = target.clone();
        for (i, r) in masked.records.iter_mut().enumerate() {
            if train.binary_search(&i).is_err() {
                r.flu = None;
            }
        }
        let mut fit_sets = working.clone();
        fit_sets[target_pos] = masked;

        for &method in &cfg.methods {
            let out = run_method(method, &fit_sets, &cfg.target, cfg)?;

            let eval = |indices: &[usize]| -> Option<f64> {
                let scores: Vec<f64> = indices.iter().map(|&i| out.scores[i]).collect();
                let labels: Vec<bool> = indices
                    .iter()
                    .map(|&i| target.records[i].flu.expect("test indices are labeled"))
                    .collect();
                if scores.is_empty() {
                    None
                } else {
                    auc(&scores, &labels)
                }
            };

            rows.push(ResultRow {
                method,
                dataset: cfg.target.clone(),
                cell: None,
                label_fraction: cfg.label_fraction,
                seed,
                auc: eval(&test),
                theta_choice: None,
            });
            for key in SubgroupKey::all() {
                let cell_indices: Vec<usize> = test
                    .iter()
                    .copied()
                    .filter(|&i| target.records[i].subgroup() == key)
                    .collect();
                let theta_choice = out
                    .classifiers
                    .as_ref()
                    .map(|classifiers| classifiers[key.index()].choice);
                rows.push(ResultRow {
                    method,
                    dataset: cfg.target.clone(),
                    cell: Some(key),
                    label_fraction: cfg.label_fraction,
                    seed,
                    auc: eval(&cell_indices),
                    theta_choice,
                });
            }
        }
    }
    Ok(rows)
}

/// Mean of the defined values, if any.
fn mean_defined(values: impl IntoIterator<Item = Option<f64>>) -> Option<f64> {
    let defined: Vec<f64> = values.into_iter().flatten().collect();
    if defined.is_empty() {
        None
    } else {
        Some(defined.iter().sum::<f64>() / defined.len() as f64)
    }
}

/// Re-run the experiment at each label fraction and aggregate.
///
/// Per method and fraction, each seed contributes the unweighted mean of
/// its defined subgroup AUCs; the summary averages those per-seed means.
pub fn label_fraction_sweep(
    datasets: &[Dataset],
    cfg: &ExperimentConfig,
    fractions: &[f64],
) -> Result<SweepOutcome> {
    if fractions.is_empty() {
        return Err(Error::invalid("sweep needs at least one label fraction"));
    }
    for (i, f) in fractions.iter().enumerate() {
        if !(*f > 0.0 && *f <= 1.0) {
            return Err(Error::invalid(format!("label fraction must be in (0, 1], got {f}")));
        }
        if fractions[..i].contains(f) {
            return Err(Error::invalid(format!("duplicate label fraction {f}")));
        }
    }

    let mut raw = Vec::new();
    for &fraction in fractions {
        let run_cfg = ExperimentConfig { label_fraction: fraction, ..cfg.clone() };
        raw.extend(run_experiment(datasets, &run_cfg)?);
    }

    let mut summary = Vec::new();
    for &method in &cfg.methods {
        for &fraction in fractions {
            let per_seed = cfg.seeds.iter().map(|&seed| {
                mean_defined(
                    raw.iter()
                        .filter(|r| {
                            r.method == method
                                && r.label_fraction == fraction
                                && r.seed == seed
                                && r.cell.is_some()
                        })
                        .map(|r| r.auc),
                )
            });
            summary.push(SweepRow {
                method,
                dataset: cfg.target.clone(),
                label_fraction: fraction,
                mean_subgroup_auc: mean_defined(per_seed),
            });
        }
    }
    Ok(SweepOutcome { raw, summary })
}

fn format_mean(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{v:.3}"),
        None => "-".to_string(),
    }
}

/// Render result rows as a markdown report.
///
/// The first table averages each method's overall AUC per dataset across
/// replications. Then, per dataset, a grid reports each subgroup's mean
/// AUC per method; population-aware hierarchy cells carry a dagger when
/// the licensing rule chose the local classifier in more replications
/// than the invariant one.
pub fn render_report(rows: &[ResultRow]) -> String {
    if rows.is_empty() {
        return "# Evaluation report\n\n_No result rows._\n".to_string();
    }
    let mut datasets: Vec<&str> = Vec::new();
    for r in rows {
        if !datasets.contains(&r.dataset.as_str()) {
            datasets.push(&r.dataset);
        }
    }
    let methods: Vec<Method> =
        Method::ALL.into_iter().filter(|m| rows.iter().any(|r| r.method == *m)).collect();

    let mut out = String::from("# Evaluation report\n");
    out.push_str("\n## Overall AUC by dataset\n\n");
    out.push_str("Mean across replications; `-` marks cells with no defined AUC.\n\n");
    out.push_str("| Method |");
    for d in &datasets {
        out.push_str(&format!(" {d} |"));
    }
    out.push_str("\n|---|");
    out.push_str(&"---|".repeat(datasets.len()));
    out.push('\n');
    for &m in &methods {
        out.push_str(&format!("| {} |", m.label()));
        for d in &datasets {
            let mean = mean_defined(
                rows.iter()
                    .filter(|r| r.method == m && &r.dataset == d && r.cell.is_none())
                    .map(|r| r.auc),
            );
            out.push_str(&format!(" {} |", format_mean(mean)));
        }
        out.push('\n');
    }

    for d in &datasets {
        out.push_str(&format!("\n## Subgroup AUC: {d}\n\n"));
        out.push_str(
            "Mean across replications. A dagger marks subgroups where the \
             licensing rule chose the local classifier in most replications.\n\n",
        );
        out.push_str("| Age | Gender |");
        for &m in &methods {
            out.push_str(&format!(" {} |", m.label()));
        }
        out.push_str("\n|---|---|");
        out.push_str(&"---|".repeat(methods.len()));
        out.push('\n');
        for key in SubgroupKey::all() {
            out.push_str(&format!("| {} | {} |", key.age.label(), key.gender.label()));
            for &m in &methods {
                let cell_rows: Vec<&ResultRow> = rows
                    .iter()
                    .filter(|r| r.method == m && &r.dataset == d && r.cell == Some(key))
                    .collect();
                let mean = mean_defined(cell_rows.iter().map(|r| r.auc));
                let local = cell_rows
                    .iter()
                    .filter(|r| r.theta_choice == Some(ThetaChoice::Local))
                    .count();
                let invariant = cell_rows
                    .iter()
                    .filter(|r| r.theta_choice == Some(ThetaChoice::Invariant))
                    .count();
                let dagger = if local > invariant { "†" } else { "" };
                out.push_str(&format!(" {}{} |", format_mean(mean), dagger));
            }
            out.push('\n');
        }
    }
    out
}
