//! Descriptive statistics: smoothed predictive values, symptom-distribution
//! spread, subgroup summaries, information, and tie-aware AUC.

use crate::model::{Dataset, Record, SubgroupKey};
use crate::NUM_SYMPTOMS;

/// Smoothed positive predictive value of symptom `j`:
/// `(#{x_j = 1 and y = 1} + laplace) / (#{x_j = 1} + 2 * laplace)`.
///
/// With `laplace > 0` the value is defined even when no record shows the
/// symptom (it degrades to 0.5, the uninformative midpoint).
pub fn ppv<'a>(records: impl IntoIterator<Item = &'a Record>, j: usize, laplace: f64) -> f64 {
    assert!(j < NUM_SYMPTOMS, "symptom index {j} out of range");
    assert!(laplace >= 0.0, "laplace smoothing must be non-negative");
    let mut present = 0u64;
    let mut present_pos = 0u64;
    for r in records {
        if r.symptoms.0[j] {
            present += 1;
            if r.flu == Some(true) {
                present_pos += 1;
            }
        }
    }
    (present_pos as f64 + laplace) / (present as f64 + 2.0 * laplace)
}

/// Distribution spread of one symptom conditioned on the outcome class `y`:
/// `|2 * P(X_j = 1 | Y = y) - 1|`, in [0, 1].
///
/// `None` when no labeled record of class `y` exists (the conditional is
/// undefined). 0 means the symptom is a coin flip in class `y`; 1 means it
/// is deterministic.
pub fn p_diff<'a>(records: impl IntoIterator<Item = &'a Record>, j: usize, y: bool) -> Option<f64> {
    assert!(j < NUM_SYMPTOMS, "symptom index {j} out of range");
    let mut in_class = 0u64;
    let mut with_symptom = 0u64;
    for r in records {
        if r.flu == Some(y) {
            in_class += 1;
            if r.symptoms.0[j] {
                with_symptom += 1;
            }
        }
    }
    if in_class == 0 {
        return None;
    }
    Some((2.0 * with_symptom as f64 / in_class as f64 - 1.0).abs())
}

/// Overall spread of the symptom distribution conditioned on class `y`:
/// the unweighted mean of the four per-symptom spreads.
///
/// The selection rule conditions on `y = true`; the parameter stays exposed
/// so the `y = false` variant can be used for sensitivity analysis.
pub fn delta(records: &[&Record], y: bool) -> Option<f64> {
    let mut sum = 0.0;
    for j in 0..NUM_SYMPTOMS {
        sum += p_diff(records.iter().copied(), j, y)?;
    }
    Some(sum / NUM_SYMPTOMS as f64)
}

/// Empirical positive rate over labeled records; `None` without any.
pub fn prevalence<'a>(records: impl IntoIterator<Item = &'a Record>) -> Option<f64> {
    let mut n = 0u64;
    let mut pos = 0u64;
    for r in records {
        match r.flu {
            Some(true) => {
                n += 1;
                pos += 1;
            }
            Some(false) => n += 1,
            None => {}
        }
    }
    if n == 0 {
        None
    } else {
        Some(pos as f64 / n as f64)
    }
}

/// Local (target) versus population summary of one demographic subgroup.
///
/// "Local" uses the target's labeled records in the cell; "population" pools
/// the cell's labeled records from every dataset, the target's labeled
/// subset included. Fields are `None` when the underlying conditional is
/// undefined (no labeled records, or no positives for the spreads).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubgroupStats {
    pub key: SubgroupKey,
    pub delta_local: Option<f64>,
    pub delta_pop: Option<f64>,
    pub prev_local: Option<f64>,
    pub prev_pop: Option<f64>,
    /// Labeled records behind the local estimates.
    pub n_local: usize,
    /// Labeled records behind the population estimates.
    pub n_pop: usize,
}

/// Compute [`SubgroupStats`] for `key`.
///
/// `datasets` must contain every dataset in the experiment, the (masked)
/// target included; `target` selects which one is local by name.
pub fn subgroup_stats(target: &Dataset, datasets: &[Dataset], key: SubgroupKey) -> SubgroupStats {
    fn cell(d: &Dataset, key: SubgroupKey) -> Vec<&Record> {
        d.records.iter().filter(|r| r.subgroup() == key && r.flu.is_some()).collect()
    }
    let local: Vec<&Record> = cell(target, key);
    let mut pop: Vec<&Record> = Vec::new();
    for d in datasets {
        pop.extend(cell(d, key));
    }
    SubgroupStats {
        key,
        delta_local: delta(&local, true),
        delta_pop: delta(&pop, true),
        prev_local: prevalence(local.iter().copied()),
        prev_pop: prevalence(pop.iter().copied()),
        n_local: local.len(),
        n_pop: pop.len(),
    }
}

/// Information carried by an event of probability `p`: `-ln p`.
///
/// Requires `p` in (0, 1]; certainty carries zero information and the value
/// grows without bound as `p` approaches zero.
pub fn information(p: f64) -> f64 {
    assert!(p > 0.0 && p <= 1.0, "information requires p in (0, 1], got {p}");
    -p.ln()
}

/// Tie-aware area under the ROC curve (Mann-Whitney statistic).
///
/// Equals the probability that a random positive outscores a random
/// negative, counting ties as half. `None` when either class is absent —
/// rendered as `-` in result tables. Computed from midranks in
/// O(n log n); the test suite checks it against exhaustive pair counting.
pub fn auc(scores: &[f64], labels: &[bool]) -> Option<f64> {
    assert_eq!(scores.len(), labels.len(), "scores and labels must align");
    debug_assert!(scores.iter().all(|s| s.is_finite()), "scores must be finite");
    let n_pos = labels.iter().filter(|&&y| y).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return None;
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap());
    // Midranks: tied scores share the average of the ranks they span.
    let mut rank_pos_sum = 0.0f64;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let midrank = (i + j) as f64 / 2.0 + 1.0; // ranks are 1-based
        for &idx in &order[i..=j] {
            if labels[idx] {
                rank_pos_sum += midrank;
            }
        }
        i = j + 1;
    }
    let u = rank_pos_sum - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Some(u / (n_pos as f64 * n_neg as f64))
}
