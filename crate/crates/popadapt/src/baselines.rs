//! The evaluated methods: four classical baselines plus the two
//! hierarchy-backed models, all behind one entry point that scores every
//! record of the target dataset.
//!
//! The classical baselines share a from-scratch logistic regression
//! (full-batch gradient descent with a backtracking line search). The
//! frustratingly-easy augmentation baselines replicate the feature block
//! per domain so the optimizer can split weights into shared and
//! domain-specific parts.

use crate::blend::{self, ClassifierOptions, SubgroupClassifier};
use crate::error::{Error, Result};
use crate::hierarchy::{build_hierarchy, build_hierarchy_without_demographics, hierarchy_subgroup_components};
use crate::io::{ExperimentConfig, FedaDomains};
use crate::model::{AgeGroup, CollectionMode, Dataset, Gender, Record};
use crate::optim::{fit_hierarchy, ObjectiveSpec, PowellOptions};
use crate::NUM_SYMPTOMS;

/// Every method the evaluation harness knows how to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    /// Logistic regression on the target's labeled records only.
    Tr,
    /// Logistic regression pooling labeled records from every dataset.
    Lr,
    /// Feature-augmentation transfer with symptom features.
    Feda,
    /// Feature-augmentation transfer with symptom plus demographic features.
    FedaPop,
    /// Hierarchy over collection environments only (no demographic nodes).
    Hier,
    /// The full population-aware hierarchy with licensed subgroup blends.
    HierPop,
}

impl Method {
    /// All methods in canonical output order.
    pub const ALL: [Method; 6] =
        [Method::Tr, Method::Lr, Method::Feda, Method::FedaPop, Method::Hier, Method::HierPop];

    /// Name used in configs, result files, and reports.
    pub fn label(&self) -> &'static str {
        match self {
            Method::Tr => "TR",
            Method::Lr => "LR",
            Method::Feda => "FEDA",
            Method::FedaPop => "FEDA_pop",
            Method::Hier => "Hier",
            Method::HierPop => "Hier_pop",
        }
    }

    /// Inverse of [`Method::label`].
    pub fn parse(s: &str) -> Option<Method> {
        Method::ALL.into_iter().find(|m| m.label() == s)
    }
}

/// Options of [`train_logistic`].
#[derive(Debug, Clone, Copy)]
pub struct LogisticOptions {
    /// Ridge penalty on the weights (the bias is never penalized).
    pub l2: f64,
    pub max_epochs: usize,
    /// Stop when the gradient's max-norm falls below this.
    pub grad_tol: f64,
}

impl Default for LogisticOptions {
    fn default() -> Self {
        LogisticOptions { l2: 1e-3, max_epochs: 5000, grad_tol: 1e-6 }
    }
}

/// A trained linear scorer.
#[derive(Debug, Clone)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    /// True when training saw a single class; the model then scores every
    /// record identically.
    pub degenerate: bool,
}

impl LogisticModel {
    /// Linear score (monotone in the predicted probability).
    pub fn score(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.weights.len(), "feature dimension mismatch");
        self.bias + self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
    }
}

/// `ln(1 + exp(s))` without overflow.
fn softplus(s: f64) -> f64 {
    if s > 0.0 {
        s + (-s).exp().ln_1p()
    } else {
        s.exp().ln_1p()
    }
}

fn sigmoid(s: f64) -> f64 {
    if s >= 0.0 {
        1.0 / (1.0 + (-s).exp())
    } else {
        let e = s.exp();
        e / (1.0 + e)
    }
}

/// Mean log-loss with a ridge penalty on the weights, and its gradient.
fn logistic_loss_grad(
    xs: &[Vec<f64>],
    ys: &[bool],
    w: &[f64],
    b: f64,
    l2: f64,
) -> (f64, Vec<f64>, f64) {
    let n = xs.len() as f64;
    let mut loss = 0.0;
    let mut gw = vec![0.0; w.len()];
    let mut gb = 0.0;
    for (x, &y) in xs.iter().zip(ys) {
        let s = b + w.iter().zip(x).map(|(wi, xi)| wi * xi).sum::<f64>();
        let yf = if y { 1.0 } else { 0.0 };
        loss += softplus(s) - yf * s;
        let r = sigmoid(s) - yf;
        for (g, xi) in gw.iter_mut().zip(x) {
            *g += r * xi;
        }
        gb += r;
    }
    loss /= n;
    gb /= n;
    for (g, wi) in gw.iter_mut().zip(w) {
        *g = *g / n + l2 * wi;
    }
    loss += 0.5 * l2 * w.iter().map(|v| v * v).sum::<f64>();
    (loss, gw, gb)
}

/// Train a binary logistic regression by full-batch gradient descent with
/// a backtracking (Armijo) line search. Deterministic: starts from zero
/// and uses no randomness. Single-class inputs yield a degenerate
/// constant model.
pub fn train_logistic(xs: &[Vec<f64>], ys: &[bool], opts: &LogisticOptions) -> LogisticModel {
    assert_eq!(xs.len(), ys.len(), "features and labels must align");
    assert!(!xs.is_empty(), "cannot train on an empty sample");
    let d = xs[0].len();
    assert!(xs.iter().all(|x| x.len() == d), "feature rows must share a dimension");

    let n_pos = ys.iter().filter(|&&y| y).count();
    if n_pos == 0 || n_pos == ys.len() {
        return LogisticModel { weights: vec![0.0; d], bias: 0.0, degenerate: true };
    }

    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let mut step = 1.0;
    let (mut loss, mut gw, mut gb) = logistic_loss_grad(xs, ys, &w, b, opts.l2);
    for _ in 0..opts.max_epochs {
        let gmax = gw.iter().fold(gb.abs(), |m, g| m.max(g.abs()));
        if gmax < opts.grad_tol {
            break;
        }
        let g2 = gb * gb + gw.iter().map(|g| g * g).sum::<f64>();
        let mut accepted = false;
        while step > 1e-18 {
            let cand_w: Vec<f64> = w.iter().zip(&gw).map(|(wi, g)| wi - step * g).collect();
            let cand_b = b - step * gb;
            let (cand_loss, cand_gw, cand_gb) =
                logistic_loss_grad(xs, ys, &cand_w, cand_b, opts.l2);
            if cand_loss <= loss - 1e-4 * step * g2 {
                w = cand_w;
                b = cand_b;
                loss = cand_loss;
                gw = cand_gw;
                gb = cand_gb;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
        step = (step * 2.0).min(1e3);
    }
    LogisticModel { weights: w, bias: b, degenerate: false }
}

/// Frustratingly-easy domain augmentation: one shared feature block plus
/// one block per domain, of which only the record's own is populated.
pub fn feda_augment(x: &[f64], domain: usize, n_domains: usize) -> Vec<f64> {
    assert!(domain < n_domains, "domain {domain} out of range ({n_domains} domains)");
    let d = x.len();
    let mut out = vec![0.0; d * (n_domains + 1)];
    out[..d].copy_from_slice(x);
    out[d * (domain + 1)..d * (domain + 2)].copy_from_slice(x);
    out
}

/// Symptom plus demographic features: four symptom indicators, a one-hot
/// age bucket, and a one-hot gender.
pub fn demographic_features(r: &Record) -> Vec<f64> {
    let mut out = Vec::with_capacity(NUM_SYMPTOMS + AgeGroup::ALL.len() + Gender::ALL.len());
    out.extend_from_slice(&r.symptoms.features());
    for a in AgeGroup::ALL {
        out.push(if r.age == a { 1.0 } else { 0.0 });
    }
    for g in Gender::ALL {
        out.push(if r.gender == g { 1.0 } else { 0.0 });
    }
    out
}

/// Scores for every record of the target dataset, plus the per-subgroup
/// classifiers when the method has them.
#[derive(Debug, Clone)]
pub struct BaselineOutput {
    /// One score per record of the target dataset, in record order.
    pub scores: Vec<f64>,
    /// Per-subgroup classifiers (populated by `Hier_pop` only).
    pub classifiers: Option<Vec<SubgroupClassifier>>,
}

fn symptom_features(r: &Record) -> Vec<f64> {
    r.symptoms.features().to_vec()
}

/// Domain index assignment for the augmentation baselines.
fn domain_ids(datasets: &[Dataset], by: FedaDomains) -> (Vec<usize>, usize) {
    match by {
        FedaDomains::Dataset => ((0..datasets.len()).collect(), datasets.len()),
        FedaDomains::Mode => {
            let mut modes: Vec<CollectionMode> = Vec::new();
            for m in [CollectionMode::CitizenScience, CollectionMode::HealthWorker] {
                if datasets.iter().any(|d| d.mode == m) {
                    modes.push(m);
                }
            }
            let ids = datasets
                .iter()
                .map(|d| modes.iter().position(|&m| m == d.mode).expect("mode is present"))
                .collect();
            (ids, modes.len())
        }
    }
}

fn labeled_training_set(
    datasets: &[Dataset],
    features: impl Fn(&Record) -> Vec<f64>,
    augment: Option<(&[usize], usize)>,
) -> (Vec<Vec<f64>>, Vec<bool>) {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (i, d) in datasets.iter().enumerate() {
        for r in d.labeled_records() {
            let x = features(r);
            let x = match augment {
                Some((ids, n)) => feda_augment(&x, ids[i], n),
                None => x,
            };
            xs.push(x);
            ys.push(r.flu == Some(true));
        }
    }
    (xs, ys)
}

/// Train `method` on `datasets` (the masked target plus all sources) and
/// score every record of the target dataset.
///
/// The target is identified by name; its labels must already be masked
/// down to whatever the method is allowed to see. All methods are
/// deterministic given their inputs.
pub fn run_method(
    method: Method,
    datasets: &[Dataset],
    target_name: &str,
    cfg: &ExperimentConfig,
) -> Result<BaselineOutput> {
    let target = datasets
        .iter()
        .find(|d| d.name == target_name)
        .ok_or_else(|| Error::invalid(format!("target dataset '{target_name}' not found")))?;
    if target.labeled_records().next().is_none() {
        return Err(Error::invalid(format!(
            "target dataset '{target_name}' has no labeled records"
        )));
    }
    let powell = PowellOptions { tol: cfg.powell_tol, max_iter: cfg.powell_max_iter };
    let logistic = LogisticOptions::default();

    let output = match method {
        Method::Tr => {
            let (xs, ys) =
                labeled_training_set(std::slice::from_ref(target), symptom_features, None);
            let model = train_logistic(&xs, &ys, &logistic);
            let scores =
                target.records.iter().map(|r| model.score(&symptom_features(r))).collect();
            BaselineOutput { scores, classifiers: None }
        }
        Method::Lr => {
            let (xs, ys) = labeled_training_set(datasets, symptom_features, None);
            let model = train_logistic(&xs, &ys, &logistic);
            let scores =
                target.records.iter().map(|r| model.score(&symptom_features(r))).collect();
            BaselineOutput { scores, classifiers: None }
        }
        Method::Feda | Method::FedaPop => {
            let features: fn(&Record) -> Vec<f64> = match method {
                Method::Feda => symptom_features,
                _ => demographic_features,
            };
            let (ids, n_domains) = domain_ids(datasets, cfg.feda_domains);
            let (xs, ys) = labeled_training_set(datasets, features, Some((&ids, n_domains)));
            let model = train_logistic(&xs, &ys, &logistic);
            let target_domain = ids[datasets.iter().position(|d| d.name == target_name).unwrap()];
            let scores = target
                .records
                .iter()
                .map(|r| model.score(&feda_augment(&features(r), target_domain, n_domains)))
                .collect();
            BaselineOutput { scores, classifiers: None }
        }
        Method::Hier => {
            let graph = build_hierarchy_without_demographics(datasets);
            let spec =
                ObjectiveSpec::for_datasets(graph, datasets, cfg.lambda, cfg.beta, cfg.alpha);
            let fitted = fit_hierarchy(&spec, powell);
            let gamma = blend::fit_dataset_gamma(&fitted, target, 2)?;
            let scores = target
                .records
                .iter()
                .map(|r| {
                    let (leaf, age, gender) = hierarchy_subgroup_components(
                        &fitted.graph,
                        &fitted.params,
                        &target.name,
                        r.subgroup(),
                    );
                    let row = blend::design_row(
                        &r.symptoms,
                        &leaf,
                        &age.unwrap_or([0.0; 4]),
                        &gender.unwrap_or([0.0; 4]),
                    );
                    gamma.iter().zip(row).map(|(g, f)| g * f).sum()
                })
                .collect();
            BaselineOutput { scores, classifiers: None }
        }
        Method::HierPop => {
            let graph = build_hierarchy(datasets);
            let spec =
                ObjectiveSpec::for_datasets(graph, datasets, cfg.lambda, cfg.beta, cfg.alpha);
            let fitted = fit_hierarchy(&spec, powell);
            let opts = ClassifierOptions { tau: cfg.tau, ..ClassifierOptions::default() };
            let classifiers = blend::train_subgroup_classifiers(&fitted, target, datasets, &opts)?;
            let scores = target
                .records
                .iter()
                .map(|r| classifiers[r.subgroup().index()].predict(&r.symptoms))
                .collect();
            BaselineOutput { scores, classifiers: Some(classifiers) }
        }
    };
    assert_eq!(output.scores.len(), target.records.len());
    Ok(output)
}
