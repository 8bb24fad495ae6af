//! File formats: dataset CSV, flat key=value config, results/sweep CSV,
//! and the fitted-model artifacts.
//!
//! Every format is a closed vocabulary. Parsers never coerce: an unexpected
//! header, key, or cell is a hard error naming the line (and column or key)
//! that caused it, so silently corrupted inputs cannot leak into results.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use crate::baselines::Method;
use crate::blend::{ChoiceReason, ThetaChoice};
use crate::error::{Error, Result};
use crate::experiment::{ResultRow, SweepRow};
use crate::model::{
    AgeGroup, CollectionMode, Dataset, DatasetRole, Gender, Record, SubgroupKey, SymptomVector,
};
use crate::{NUM_SYMPTOMS, SYMPTOM_NAMES};

/// Exact header line of a dataset CSV.
pub const DATASET_HEADER: &str = "fever,cough,muscle_pain,sore_throat,age_group,gender,flu";

/// Exact header line of a results CSV.
pub const RESULTS_HEADER: &str = "method,dataset,age_group,gender,label_fraction,seed,auc,theta_choice";

/// Exact header line of a sweep CSV.
pub const SWEEP_HEADER: &str = "method,dataset,label_fraction,mean_subgroup_auc";

/// Marker used for undefined numeric cells and the overall evaluation cell.
const UNDEFINED: &str = "-";
const ALL_CELL: &str = "ALL";

fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))
}

fn write_string(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content).map_err(|e| Error::io(path.display().to_string(), e))
}

/// Iterate the lines of a file's content, tolerating a trailing newline and
/// stripping one trailing carriage return per line. 1-based line numbers.
fn lines(content: &str) -> impl Iterator<Item = (usize, &str)> {
    let trimmed = content.strip_suffix('\n').unwrap_or(content);
    trimmed
        .split('\n')
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
}

// ---------------------------------------------------------------------------
// Dataset CSV
// ---------------------------------------------------------------------------

/// Load one dataset from `path`.
///
/// The file must carry the exact seven-column header; the caller supplies
/// the study name, collection mode, and role, which the format does not
/// encode. Any malformed cell aborts with its row and column.
pub fn load_dataset(path: &Path, name: &str, mode: CollectionMode, role: DatasetRole) -> Result<Dataset> {
    let content = read_to_string(path)?;
    parse_dataset(&content, &path.display().to_string(), name, mode, role)
}

/// Parse dataset CSV content; `origin` labels error messages.
pub fn parse_dataset(
    content: &str,
    origin: &str,
    name: &str,
    mode: CollectionMode,
    role: DatasetRole,
) -> Result<Dataset> {
    let mut it = lines(content);
    match it.next() {
        Some((_, header)) if header == DATASET_HEADER => {}
        Some((line, header)) => {
            return Err(Error::format(
                origin,
                line,
                format!("expected header '{DATASET_HEADER}', got '{header}'"),
            ))
        }
        None => return Err(Error::format(origin, 1, "empty file, expected header")),
    }
    let mut records = Vec::new();
    for (line, raw) in it {
        let cells: Vec<&str> = raw.split(',').collect();
        if cells.len() != 7 {
            return Err(Error::format(origin, line, format!("expected 7 columns, got {}", cells.len())));
        }
        let mut symptoms = [false; NUM_SYMPTOMS];
        for j in 0..NUM_SYMPTOMS {
            symptoms[j] = match cells[j] {
                "0" => false,
                "1" => true,
                other => {
                    return Err(Error::format(
                        origin,
                        line,
                        format!("column '{}': expected 0 or 1, got '{other}'", SYMPTOM_NAMES[j]),
                    ))
                }
            };
        }
        let age = AgeGroup::parse(cells[4]).ok_or_else(|| {
            Error::format(origin, line, format!("column 'age_group': unknown value '{}'", cells[4]))
        })?;
        let gender = Gender::parse(cells[5]).ok_or_else(|| {
            Error::format(origin, line, format!("column 'gender': unknown value '{}'", cells[5]))
        })?;
        let flu = match cells[6] {
            "" => None,
            "0" => Some(false),
            "1" => Some(true),
            other => {
                return Err(Error::format(
                    origin,
                    line,
                    format!("column 'flu': expected 0, 1, or empty, got '{other}'"),
                ))
            }
        };
        records.push(Record { symptoms: SymptomVector(symptoms), age, gender, flu });
    }
    Ok(Dataset { name: name.to_string(), mode, role, records })
}

/// Serialize a dataset in the exact format [`parse_dataset`] accepts.
pub fn format_dataset(d: &Dataset) -> String {
    let mut out = String::with_capacity(32 * (d.records.len() + 1));
    out.push_str(DATASET_HEADER);
    out.push('\n');
    for r in &d.records {
        for j in 0..NUM_SYMPTOMS {
            out.push(if r.symptoms.0[j] { '1' } else { '0' });
            out.push(',');
        }
        out.push_str(r.age.label());
        out.push(',');
        out.push_str(r.gender.label());
        out.push(',');
        match r.flu {
            Some(true) => out.push('1'),
            Some(false) => out.push('0'),
            None => {}
        }
        out.push('\n');
    }
    out
}

/// Write a dataset CSV to `path`.
pub fn write_dataset(path: &Path, d: &Dataset) -> Result<()> {
    write_string(path, &format_dataset(d))
}

// ---------------------------------------------------------------------------
// Flat config
// ---------------------------------------------------------------------------

/// Which granularity the feature-augmentation baseline treats as a domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FedaDomains {
    /// One domain per dataset (default).
    Dataset,
    /// One domain per collection mode.
    Mode,
}

/// Generator overrides carried in the config file: dataset sizes and
/// per-environment reporting distortion. Structural knobs (mixtures,
/// prevalences, emissions) are library-level API.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DgpOverrides {
    /// `dgp.size.<name> = <records>`
    pub sizes: BTreeMap<String, usize>,
    /// `dgp.distortion.<cs|hw>.<symptom> = <p_keep_if_1>, <p_report_if_0>`
    pub distortion: BTreeMap<(CollectionMode, usize), (f64, f64)>,
}

/// Everything an experiment run needs, parsed from a flat key=value file.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Name of the dataset adapted to (labels scarce).
    pub target: String,
    /// Names of the fully labeled source datasets.
    pub sources: Vec<String>,
    /// Fraction of the target's labeled records revealed for training.
    pub label_fraction: f64,
    /// Replication seeds; each produces an independent split and run.
    pub seeds: Vec<u64>,
    /// Additive smoothing folded into the data term.
    pub lambda: f64,
    /// Parent-divergence weight of the hierarchy objective.
    pub beta: f64,
    /// Prior-anchor weight of the hierarchy objective.
    pub alpha: f64,
    /// Prevalence-difference threshold of the selection rule.
    pub tau: f64,
    /// Relative-improvement tolerance of the optimizer.
    pub powell_tol: f64,
    /// Optimizer cycle cap.
    pub powell_max_iter: usize,
    /// Methods evaluated, in output order.
    pub methods: Vec<Method>,
    /// Stratify the label split by (subgroup, label) cell.
    pub stratified: bool,
    /// Domain granularity of the feature-augmentation baseline.
    pub feda_domains: FedaDomains,
    /// Collection modes for dataset names the loader cannot infer
    /// (the four built-in study names need no entry).
    pub modes: BTreeMap<String, CollectionMode>,
    /// Generator overrides for the `generate` subcommand.
    pub dgp: DgpOverrides,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            target: "goviral".into(),
            sources: vec!["fluwatch".into(), "hongkong".into(), "hutterite".into()],
            label_fraction: 0.2,
            seeds: vec![1, 2, 3, 4, 5],
            lambda: 1.0,
            beta: 0.2,
            alpha: 0.1,
            tau: 0.9,
            powell_tol: 1e-6,
            powell_max_iter: 500,
            methods: Method::ALL.to_vec(),
            stratified: true,
            feda_domains: FedaDomains::Dataset,
            modes: BTreeMap::new(),
            dgp: DgpOverrides::default(),
        }
    }
}

impl ExperimentConfig {
    /// Collection mode for a dataset name: explicit `mode.<name>` entry,
    /// else the built-in table for the four default study names.
    pub fn mode_for(&self, name: &str) -> Result<CollectionMode> {
        if let Some(&m) = self.modes.get(name) {
            return Ok(m);
        }
        match name {
            "goviral" | "fluwatch" => Ok(CollectionMode::CitizenScience),
            "hongkong" | "hutterite" => Ok(CollectionMode::HealthWorker),
            other => Err(Error::invalid(format!(
                "no collection mode known for dataset '{other}'; add 'mode.{other} = cs|hw' to the config"
            ))),
        }
    }

    /// All dataset names in canonical order: sources first, target last.
    pub fn dataset_names(&self) -> Vec<String> {
        let mut names = self.sources.clone();
        names.push(self.target.clone());
        names
    }

    /// Check every invariant a runnable config must satisfy.
    pub fn validate(&self) -> Result<()> {
        if self.target.is_empty() {
            return Err(Error::invalid("config key 'target' must be a dataset name"));
        }
        let mut seen = BTreeSet::new();
        for s in &self.sources {
            if s == &self.target {
                return Err(Error::invalid(format!("dataset '{s}' listed as both target and source")));
            }
            if !seen.insert(s.clone()) {
                return Err(Error::invalid(format!("duplicate source dataset '{s}'")));
            }
        }
        if !(self.label_fraction > 0.0 && self.label_fraction <= 1.0) {
            return Err(Error::invalid(format!(
                "label_fraction must be in (0, 1], got {}",
                self.label_fraction
            )));
        }
        if self.seeds.is_empty() {
            return Err(Error::invalid("seeds must be non-empty"));
        }
        if self.seeds.iter().collect::<BTreeSet<_>>().len() != self.seeds.len() {
            return Err(Error::invalid("seeds must be unique"));
        }
        if self.methods.is_empty() {
            return Err(Error::invalid("methods must be non-empty"));
        }
        if self.methods.iter().collect::<BTreeSet<_>>().len() != self.methods.len() {
            return Err(Error::invalid("methods must be unique"));
        }
        if self.lambda < 0.0 {
            return Err(Error::invalid(format!("lambda must be >= 0, got {}", self.lambda)));
        }
        if self.beta < 0.0 {
            return Err(Error::invalid(format!("beta must be >= 0, got {}", self.beta)));
        }
        if self.alpha <= 0.0 {
            return Err(Error::invalid(format!(
                "alpha must be > 0 (it keeps the objective bounded below), got {}",
                self.alpha
            )));
        }
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return Err(Error::invalid(format!("tau must be in (0, 1], got {}", self.tau)));
        }
        if self.powell_tol <= 0.0 {
            return Err(Error::invalid(format!("powell_tol must be > 0, got {}", self.powell_tol)));
        }
        if self.powell_max_iter == 0 {
            return Err(Error::invalid("powell_max_iter must be >= 1"));
        }
        for (name, &size) in &self.dgp.sizes {
            if size == 0 {
                return Err(Error::invalid(format!("dgp.size.{name} must be >= 1")));
            }
        }
        for (&(mode, j), &(keep, false_report)) in &self.dgp.distortion {
            for (what, v) in [("p_keep_if_1", keep), ("p_report_if_0", false_report)] {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::invalid(format!(
                        "dgp.distortion.{}.{}: {what} must be in [0, 1], got {v}",
                        mode.code(),
                        SYMPTOM_NAMES[j]
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Load and validate a config file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let content = read_to_string(path)?;
    parse_config(&content, &path.display().to_string())
}

/// Parse flat `key = value` config text; `origin` labels error messages.
///
/// `#` starts a comment anywhere on a line; blank lines are skipped; list
/// values are comma-separated. Unknown or repeated keys are errors. Only
/// `target` is required; every other key has the documented default.
pub fn parse_config(content: &str, origin: &str) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig { target: String::new(), sources: Vec::new(), ..Default::default() };
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut target_seen = false;
    let mut sources_seen = false;

    for (line, raw) in lines(content) {
        let uncommented = raw.split('#').next().unwrap_or("");
        let text = uncommented.trim();
        if text.is_empty() {
            continue;
        }
        let Some(eq) = text.find('=') else {
            return Err(Error::format(origin, line, format!("expected 'key = value', got '{text}'")));
        };
        let key = text[..eq].trim();
        let value = text[eq + 1..].trim();
        if key.is_empty() {
            return Err(Error::format(origin, line, "missing key before '='"));
        }
        if !seen.insert(key.to_string()) {
            return Err(Error::format(origin, line, format!("duplicate key '{key}'")));
        }

        let bad = |what: &str| Error::format(origin, line, format!("key '{key}': {what}, got '{value}'"));
        let parse_f64 = |_: ()| value.parse::<f64>().map_err(|_| bad("expected a number"));
        let parse_list = |value: &str| -> Vec<String> {
            if value.is_empty() {
                Vec::new()
            } else {
                value.split(',').map(|s| s.trim().to_string()).collect()
            }
        };

        match key {
            "target" => {
                cfg.target = value.to_string();
                target_seen = true;
            }
            "sources" => {
                let items = parse_list(value);
                if items.iter().any(|s| s.is_empty()) {
                    return Err(bad("empty dataset name in list"));
                }
                cfg.sources = items;
                sources_seen = true;
            }
            "label_fraction" => cfg.label_fraction = parse_f64(())?,
            "seeds" => {
                let mut seeds = Vec::new();
                for item in parse_list(value) {
                    seeds.push(item.parse::<u64>().map_err(|_| bad("expected integer seeds"))?);
                }
                cfg.seeds = seeds;
            }
            "lambda" => cfg.lambda = parse_f64(())?,
            "beta" => cfg.beta = parse_f64(())?,
            "alpha" => cfg.alpha = parse_f64(())?,
            "tau" => cfg.tau = parse_f64(())?,
            "powell_tol" => cfg.powell_tol = parse_f64(())?,
            "powell_max_iter" => {
                cfg.powell_max_iter = value.parse::<usize>().map_err(|_| bad("expected an integer"))?
            }
            "methods" => {
                let mut methods = Vec::new();
                for item in parse_list(value) {
                    methods.push(Method::parse(&item).ok_or_else(|| {
                        Error::format(
                            origin,
                            line,
                            format!("key 'methods': unknown method '{item}' (expected one of {})",
                                Method::ALL.map(|m| m.label()).join(", ")),
                        )
                    })?);
                }
                cfg.methods = methods;
            }
            "stratified" => {
                cfg.stratified = match value {
                    "true" => true,
                    "false" => false,
                    _ => return Err(bad("expected true or false")),
                }
            }
            "feda_domains" => {
                cfg.feda_domains = match value {
                    "dataset" => FedaDomains::Dataset,
                    "mode" => FedaDomains::Mode,
                    _ => return Err(bad("expected dataset or mode")),
                }
            }
            _ => {
                if let Some(name) = key.strip_prefix("mode.") {
                    let mode = CollectionMode::parse(value).ok_or_else(|| bad("expected cs or hw"))?;
                    cfg.modes.insert(name.to_string(), mode);
                } else if let Some(name) = key.strip_prefix("dgp.size.") {
                    let size = value.parse::<usize>().map_err(|_| bad("expected an integer"))?;
                    cfg.dgp.sizes.insert(name.to_string(), size);
                } else if let Some(rest) = key.strip_prefix("dgp.distortion.") {
                    let mut parts = rest.splitn(2, '.');
                    let mode = parts
                        .next()
                        .and_then(CollectionMode::parse)
                        .ok_or_else(|| Error::format(origin, line, format!("key '{key}': expected dgp.distortion.<cs|hw>.<symptom>")))?;
                    let symptom = parts
                        .next()
                        .and_then(|s| SYMPTOM_NAMES.iter().position(|n| *n == s))
                        .ok_or_else(|| Error::format(origin, line, format!("key '{key}': expected dgp.distortion.<cs|hw>.<symptom>")))?;
                    let nums = parse_list(value);
                    if nums.len() != 2 {
                        return Err(bad("expected two comma-separated probabilities"));
                    }
                    let keep = nums[0].parse::<f64>().map_err(|_| bad("expected a number"))?;
                    let report = nums[1].parse::<f64>().map_err(|_| bad("expected a number"))?;
                    cfg.dgp.distortion.insert((mode, symptom), (keep, report));
                } else {
                    return Err(Error::format(origin, line, format!("unknown key '{key}'")));
                }
            }
        }
    }

    if !target_seen {
        return Err(Error::format(origin, 1, "missing required key 'target'"));
    }
    if !sources_seen {
        return Err(Error::format(origin, 1, "missing required key 'sources' (may be an empty list)"));
    }
    cfg.validate()?;
    Ok(cfg)
}

// ---------------------------------------------------------------------------
// Results CSV
// ---------------------------------------------------------------------------

fn format_cell(key: Option<SubgroupKey>) -> (String, String) {
    match key {
        None => (ALL_CELL.into(), ALL_CELL.into()),
        Some(k) => (k.age.label().into(), k.gender.label().into()),
    }
}

/// Serialize result rows; AUC cells carry six decimals (or `-` when the
/// evaluation cell had a single class), the overall cell is `ALL,ALL`.
pub fn format_results(rows: &[ResultRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::invalid("refusing to write an empty results table"));
    }
    let mut out = String::new();
    out.push_str(RESULTS_HEADER);
    out.push('\n');
    for r in rows {
        let (age, gender) = format_cell(r.cell);
        let auc = match r.auc {
            Some(v) => format!("{v:.6}"),
            None => UNDEFINED.into(),
        };
        let choice = match r.theta_choice {
            Some(ThetaChoice::Local) => "local",
            Some(ThetaChoice::Invariant) => "invariant",
            None => "",
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.method.label(),
            r.dataset,
            age,
            gender,
            r.label_fraction,
            r.seed,
            auc,
            choice
        )
        .expect("string write cannot fail");
    }
    Ok(out)
}

/// Write a results CSV to `path`.
pub fn write_results(path: &Path, rows: &[ResultRow]) -> Result<()> {
    write_string(path, &format_results(rows)?)
}

/// Read a results CSV back (used by the `report` subcommand).
pub fn read_results(path: &Path) -> Result<Vec<ResultRow>> {
    let content = read_to_string(path)?;
    parse_results(&content, &path.display().to_string())
}

/// Parse results CSV content; `origin` labels error messages.
pub fn parse_results(content: &str, origin: &str) -> Result<Vec<ResultRow>> {
    let mut it = lines(content);
    match it.next() {
        Some((_, h)) if h == RESULTS_HEADER => {}
        Some((line, h)) => {
            return Err(Error::format(origin, line, format!("expected header '{RESULTS_HEADER}', got '{h}'")))
        }
        None => return Err(Error::format(origin, 1, "empty file, expected header")),
    }
    let mut rows = Vec::new();
    for (line, raw) in it {
        let cells: Vec<&str> = raw.split(',').collect();
        if cells.len() != 8 {
            return Err(Error::format(origin, line, format!("expected 8 columns, got {}", cells.len())));
        }
        let method = Method::parse(cells[0])
            .ok_or_else(|| Error::format(origin, line, format!("column 'method': unknown value '{}'", cells[0])))?;
        let cell = match (cells[2], cells[3]) {
            (ALL_CELL, ALL_CELL) => None,
            (a, g) => {
                let age = AgeGroup::parse(a).ok_or_else(|| {
                    Error::format(origin, line, format!("column 'age_group': unknown value '{a}'"))
                })?;
                let gender = Gender::parse(g).ok_or_else(|| {
                    Error::format(origin, line, format!("column 'gender': unknown value '{g}'"))
                })?;
                Some(SubgroupKey { age, gender })
            }
        };
        let label_fraction = cells[4]
            .parse::<f64>()
            .map_err(|_| Error::format(origin, line, format!("column 'label_fraction': bad number '{}'", cells[4])))?;
        let seed = cells[5]
            .parse::<u64>()
            .map_err(|_| Error::format(origin, line, format!("column 'seed': bad integer '{}'", cells[5])))?;
        let auc = match cells[6] {
            UNDEFINED => None,
            v => Some(v.parse::<f64>().map_err(|_| {
                Error::format(origin, line, format!("column 'auc': bad number '{v}'"))
            })?),
        };
        let theta_choice = match cells[7] {
            "" => None,
            "local" => Some(ThetaChoice::Local),
            "invariant" => Some(ThetaChoice::Invariant),
            other => {
                return Err(Error::format(
                    origin,
                    line,
                    format!("column 'theta_choice': expected local, invariant, or empty, got '{other}'"),
                ))
            }
        };
        rows.push(ResultRow { method, dataset: cells[1].to_string(), cell, label_fraction, seed, auc, theta_choice });
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Sweep CSV
// ---------------------------------------------------------------------------

/// Serialize sweep rows (per-method mean subgroup AUC by label fraction).
pub fn format_sweep(rows: &[SweepRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::invalid("refusing to write an empty sweep table"));
    }
    let mut out = String::new();
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        let mean = match r.mean_subgroup_auc {
            Some(v) => format!("{v:.6}"),
            None => UNDEFINED.into(),
        };
        writeln!(out, "{},{},{},{}", r.method.label(), r.dataset, r.label_fraction, mean)
            .expect("string write cannot fail");
    }
    Ok(out)
}

/// Write a sweep CSV to `path`.
pub fn write_sweep(path: &Path, rows: &[SweepRow]) -> Result<()> {
    write_string(path, &format_sweep(rows)?)
}

// ---------------------------------------------------------------------------
// Fitted-model artifacts
// ---------------------------------------------------------------------------

/// One fitted subgroup classifier, flattened for the `fit` artifact.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierFileRow {
    pub dataset: String,
    pub key: SubgroupKey,
    pub gamma: [f64; 4],
    pub choice: ThetaChoice,
    pub reason: ChoiceReason,
}

/// Serialize fitted node parameters as `node,symptom,value` rows.
pub fn format_node_params(named: &[(String, [f64; NUM_SYMPTOMS])]) -> String {
    let mut out = String::from("node,symptom,value\n");
    for (name, theta) in named {
        for j in 0..NUM_SYMPTOMS {
            writeln!(out, "{},{},{}", name, SYMPTOM_NAMES[j], theta[j]).expect("string write cannot fail");
        }
    }
    out
}

/// Write fitted node parameters to `path`.
pub fn write_node_params(path: &Path, named: &[(String, [f64; NUM_SYMPTOMS])]) -> Result<()> {
    write_string(path, &format_node_params(named))
}

/// Serialize subgroup classifiers as one row per (dataset, subgroup).
pub fn format_classifiers(rows: &[ClassifierFileRow]) -> String {
    let mut out = String::from("dataset,age_group,gender,g0,g1,g2,g3,choice,reason\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.dataset,
            r.key.age.label(),
            r.key.gender.label(),
            r.gamma[0],
            r.gamma[1],
            r.gamma[2],
            r.gamma[3],
            match r.choice {
                ThetaChoice::Local => "local",
                ThetaChoice::Invariant => "invariant",
            },
            match r.reason {
                ChoiceReason::DeltaCondition => "delta_condition",
                ChoiceReason::PrevalenceCondition => "prevalence_condition",
                ChoiceReason::Default => "default",
            }
        )
        .expect("string write cannot fail");
    }
    out
}

/// Write subgroup classifiers to `path`.
pub fn write_classifiers(path: &Path, rows: &[ClassifierFileRow]) -> Result<()> {
    write_string(path, &format_classifiers(rows))
}
