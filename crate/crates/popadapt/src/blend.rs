//! Stage two of the pipeline: turning fitted hierarchy parameters into
//! per-subgroup classifiers.
//!
//! For each record the hierarchy yields three symptom scores — from the
//! dataset leaf, the record's age node, and the record's gender node. A
//! non-negative least-squares blend learns how much of each score a
//! subgroup's classifier may use; non-negativity means a component can be
//! switched off but never inverted. A licensing rule decides per subgroup
//! whether the demographic (population-level) components are trustworthy:
//! when the subgroup's own labeled evidence is *more* concentrated than
//! the pooled population evidence, the subgroup keeps only its local
//! components.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::hierarchy::{hierarchy_subgroup_components, ParamVector};
use crate::model::{Dataset, Record, SubgroupKey, SymptomVector};
use crate::optim::FittedHierarchy;
use crate::stats::{information, SubgroupStats};

/// Which hierarchy components a subgroup's classifier is licensed to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaChoice {
    /// Only the leaf score; demographic weights are clamped to zero.
    Local,
    /// The full blend of leaf, age, and gender scores.
    Invariant,
}

/// Why the licensing rule picked what it picked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChoiceReason {
    /// Local symptom evidence is more concentrated than pooled evidence.
    DeltaCondition,
    /// Local prevalence exceeds pooled prevalence by at least tau.
    PrevalenceCondition,
    /// Neither condition fired; population components stay licensed.
    Default,
}

const MAX_COLUMNS: usize = 4;

/// Non-negative least squares via the Lawson-Hanson active-set method.
///
/// Minimizes `||A g - y||^2` subject to `g >= 0`, where `A` has `columns`
/// (at most 4) columns given by the leading entries of each row. Entries
/// of the result beyond `columns` are zero. Solved on the normal
/// equations, which a handful of columns keeps well conditioned; passive
/// subsets are solved by Gaussian elimination with partial pivoting.
pub fn nnls(rows: &[[f64; MAX_COLUMNS]], targets: &[f64], columns: usize) -> [f64; MAX_COLUMNS] {
    assert!((1..=MAX_COLUMNS).contains(&columns), "columns must be 1..=4, got {columns}");
    assert_eq!(rows.len(), targets.len(), "design rows and targets must align");

    // Normal equations: gram = A'A, b = A'y.
    let mut gram = [[0.0; MAX_COLUMNS]; MAX_COLUMNS];
    let mut b = [0.0; MAX_COLUMNS];
    for (row, &yi) in rows.iter().zip(targets) {
        for i in 0..columns {
            b[i] += row[i] * yi;
            for j in 0..columns {
                gram[i][j] += row[i] * row[j];
            }
        }
    }
    let scale = b.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let tol = 1e-10 * scale;

    let mut g = [0.0; MAX_COLUMNS];
    let mut passive = [false; MAX_COLUMNS];
    // Each outer iteration moves one variable into the passive set; the
    // cap only guards degenerate (rank-deficient) designs.
    for _ in 0..8 * MAX_COLUMNS {
        // Gradient of the objective at g: w = A'(y - A g).
        let mut w = [0.0; MAX_COLUMNS];
        for i in 0..columns {
            let mut dot = 0.0;
            for j in 0..columns {
                dot += gram[i][j] * g[j];
            }
            w[i] = b[i] - dot;
        }
        let mut enter = None;
        for j in 0..columns {
            if !passive[j] && w[j] > tol && enter.is_none_or(|(_, best)| w[j] > best) {
                enter = Some((j, w[j]));
            }
        }
        let Some((enter, _)) = enter else { break };
        passive[enter] = true;

        // Inner loop: step toward the unconstrained optimum over the
        // passive set, retiring variables that hit zero. Each pass
        // retires at least one variable, so it runs at most 4 times.
        for _ in 0..=MAX_COLUMNS {
            let z = solve_passive(&gram, &b, &passive, columns);
            let mut alpha: f64 = 1.0;
            let mut blocked = false;
            for j in 0..columns {
                if passive[j] && z[j] <= 0.0 {
                    blocked = true;
                    let denom = g[j] - z[j];
                    alpha = if denom > 0.0 { alpha.min(g[j] / denom) } else { 0.0 };
                }
            }
            if !blocked {
                g = z;
                break;
            }
            let zero_tol = 1e-12 * (1.0 + g.iter().fold(0.0f64, |m, v| m.max(v.abs())));
            for j in 0..columns {
                if passive[j] {
                    g[j] += alpha * (z[j] - g[j]);
                    if g[j] <= zero_tol {
                        g[j] = 0.0;
                        passive[j] = false;
                    }
                }
            }
        }
    }
    g
}

/// Solve the normal equations restricted to the passive variables by
/// Gaussian elimination with partial pivoting. Variables whose pivot
/// collapses (rank-deficient designs) are pinned to zero.
fn solve_passive(
    gram: &[[f64; MAX_COLUMNS]; MAX_COLUMNS],
    b: &[f64; MAX_COLUMNS],
    passive: &[bool; MAX_COLUMNS],
    columns: usize,
) -> [f64; MAX_COLUMNS] {
    let idx: Vec<usize> = (0..columns).filter(|&j| passive[j]).collect();
    let m = idx.len();
    let mut a = vec![vec![0.0; m + 1]; m];
    for (r, &i) in idx.iter().enumerate() {
        for (c, &j) in idx.iter().enumerate() {
            a[r][c] = gram[i][j];
        }
        a[r][m] = b[i];
    }
    let pivot_tol = 1e-12
        * a.iter()
            .flat_map(|row| row[..m].iter())
            .fold(1.0f64, |acc, v| acc.max(v.abs()));

    let mut pinned = vec![false; m];
    for col in 0..m {
        let pivot_row = (col..m)
            .max_by(|&x, &y| a[x][col].abs().partial_cmp(&a[y][col].abs()).unwrap())
            .unwrap();
        if a[pivot_row][col].abs() <= pivot_tol {
            pinned[col] = true;
            continue;
        }
        a.swap(col, pivot_row);
        for row in col + 1..m {
            let factor = a[row][col] / a[col][col];
            for c in col..=m {
                a[row][c] -= factor * a[col][c];
            }
        }
    }
    let mut x = vec![0.0; m];
    for col in (0..m).rev() {
        if pinned[col] {
            continue;
        }
        let mut rhs = a[col][m];
        for c in col + 1..m {
            rhs -= a[col][c] * x[c];
        }
        x[col] = rhs / a[col][col];
    }
    let mut out = [0.0; MAX_COLUMNS];
    for (r, &j) in idx.iter().enumerate() {
        out[j] = x[r];
    }
    out
}

/// Design row for one record: intercept, leaf score, age score, gender
/// score. Missing demographic components (hierarchies built without them)
/// enter as zero scores.
pub fn design_row(
    symptoms: &SymptomVector,
    theta_leaf: &ParamVector,
    theta_age: &ParamVector,
    theta_gender: &ParamVector,
) -> [f64; MAX_COLUMNS] {
    [1.0, symptoms.dot(theta_leaf), symptoms.dot(theta_age), symptoms.dot(theta_gender)]
}

/// Information content of the *dominant* outcome of a Bernoulli event:
/// `-ln max(p, 1-p)`. Concentrated events (p near 0 or 1) carry low
/// dominant information; coin flips carry the most (`ln 2`).
pub fn dominant_information(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "probability must be in (0, 1), got {p}");
    information(p.max(1.0 - p))
}

/// Compare a subgroup's dominant information against the population's.
///
/// `Ordering::Less` means the local evidence is more concentrated (lower
/// dominant information) than the pooled evidence — exactly the situation
/// in which the delta condition licenses the local-only classifier,
/// because concentration `|2p - 1|` and dominant information are
/// monotonically opposed.
pub fn licensing_case_oracle(p_local: f64, p_pop: f64) -> Ordering {
    dominant_information(p_local)
        .partial_cmp(&dominant_information(p_pop))
        .expect("dominant information is finite on (0, 1)")
}

/// Decide which components a subgroup's classifier may use.
///
/// Local wins when the subgroup's own labeled evidence is strictly more
/// concentrated than the population's (delta condition), or when local
/// prevalence exceeds pooled prevalence by at least `tau` (prevalence
/// condition). Undefined statistics (empty cells, single-class cells)
/// never license Local; the default is Invariant.
pub fn licensing_select(stats: &SubgroupStats, tau: f64) -> (ThetaChoice, ChoiceReason) {
    if let (Some(dl), Some(dp)) = (stats.delta_local, stats.delta_pop) {
        if dl < dp {
            return (ThetaChoice::Local, ChoiceReason::DeltaCondition);
        }
    }
    if let (Some(pl), Some(pp)) = (stats.prev_local, stats.prev_pop) {
        if pl - pp >= tau {
            return (ThetaChoice::Local, ChoiceReason::PrevalenceCondition);
        }
    }
    (ThetaChoice::Invariant, ChoiceReason::Default)
}

/// A fitted per-subgroup scorer: a non-negative blend of hierarchy
/// component scores.
#[derive(Debug, Clone)]
pub struct SubgroupClassifier {
    pub key: SubgroupKey,
    /// Blend weights over (intercept, leaf, age, gender) scores.
    pub gamma: [f64; MAX_COLUMNS],
    pub theta_leaf: ParamVector,
    pub theta_age: ParamVector,
    pub theta_gender: ParamVector,
    pub choice: ThetaChoice,
    pub reason: ChoiceReason,
    /// True when the subgroup had too few labeled records and the weights
    /// were fitted on the whole dataset instead.
    pub inherited: bool,
}

impl SubgroupClassifier {
    /// Design row for a record scored by this classifier.
    pub fn features(&self, symptoms: &SymptomVector) -> [f64; MAX_COLUMNS] {
        design_row(symptoms, &self.theta_leaf, &self.theta_age, &self.theta_gender)
    }

    /// Risk score (monotone in predicted positive probability).
    pub fn predict(&self, symptoms: &SymptomVector) -> f64 {
        let row = self.features(symptoms);
        self.gamma.iter().zip(row).map(|(g, f)| g * f).sum()
    }
}

/// Knobs of [`train_subgroup_classifiers`].
#[derive(Debug, Clone, Copy)]
pub struct ClassifierOptions {
    /// Prevalence-condition threshold.
    pub tau: f64,
    /// Minimum labeled records for a subgroup to fit its own weights.
    pub min_samples: usize,
}

impl Default for ClassifierOptions {
    fn default() -> Self {
        ClassifierOptions { tau: 0.9, min_samples: 5 }
    }
}

fn gamma_columns(choice: ThetaChoice) -> usize {
    match choice {
        ThetaChoice::Local => 2,
        ThetaChoice::Invariant => 4,
    }
}

/// Train one classifier per demographic subgroup of `dataset`.
///
/// `fitted` must contain a leaf for `dataset`; `all_datasets` supplies
/// the pooled population statistics the licensing rule compares against
/// (it should include `dataset` itself, with exactly the labels the fit
/// was allowed to see). Subgroups with fewer than
/// [`ClassifierOptions::min_samples`] labeled records inherit weights
/// fitted on the dataset's full labeled pool; the licensing decision is
/// still their own. Local classifiers refit intercept and leaf weight on
/// the same pool their full blend would have used.
pub fn train_subgroup_classifiers(
    fitted: &FittedHierarchy,
    dataset: &Dataset,
    all_datasets: &[Dataset],
    opts: &ClassifierOptions,
) -> Result<Vec<SubgroupClassifier>> {
    let graph = &fitted.graph;
    if fitted.params.len() != graph.len() {
        return Err(Error::invalid("fitted parameters do not match the hierarchy"));
    }
    graph.leaf_index(&dataset.name).ok_or_else(|| {
        Error::invalid(format!("hierarchy has no leaf for dataset '{}'", dataset.name))
    })?;

    let rows_for = |records: &[&Record]| -> (Vec<[f64; 4]>, Vec<f64>) {
        let mut rows = Vec::with_capacity(records.len());
        let mut y = Vec::with_capacity(records.len());
        for r in records {
            let (leaf, age, gender) =
                hierarchy_subgroup_components(graph, &fitted.params, &dataset.name, r.subgroup());
            let age = age.unwrap_or([0.0; 4]);
            let gender = gender.unwrap_or([0.0; 4]);
            rows.push(design_row(&r.symptoms, &leaf, &age, &gender));
            y.push(if r.flu == Some(true) { 1.0 } else { 0.0 });
        }
        (rows, y)
    };

    let pool: Vec<&Record> = dataset.labeled_records().collect();
    if pool.is_empty() {
        return Err(Error::invalid(format!(
            "dataset '{}' has no labeled records to fit classifiers on",
            dataset.name
        )));
    }

    let mut out = Vec::with_capacity(crate::model::NUM_SUBGROUPS);
    for key in SubgroupKey::all() {
        let stats = crate::stats::subgroup_stats(dataset, all_datasets, key);
        let (choice, reason) = licensing_select(&stats, opts.tau);
        let own: Vec<&Record> = pool.iter().copied().filter(|r| r.subgroup() == key).collect();
        let inherited = own.len() < opts.min_samples;
        let fit_pool: &[&Record] = if inherited { &pool } else { &own };
        let (rows, y) = rows_for(fit_pool);
        let gamma = nnls(&rows, &y, gamma_columns(choice));

        let (theta_leaf, theta_age, theta_gender) =
            hierarchy_subgroup_components(graph, &fitted.params, &dataset.name, key);
        out.push(SubgroupClassifier {
            key,
            gamma,
            theta_leaf,
            theta_age: theta_age.unwrap_or([0.0; 4]),
            theta_gender: theta_gender.unwrap_or([0.0; 4]),
            choice,
            reason,
            inherited,
        });
    }
    Ok(out)
}

/// Fit dataset-level blend weights on every labeled record, using the
/// first `columns` design columns (2 = intercept and leaf only; 4 = the
/// full blend).
pub fn fit_dataset_gamma(
    fitted: &FittedHierarchy,
    dataset: &Dataset,
    columns: usize,
) -> Result<[f64; MAX_COLUMNS]> {
    let graph = &fitted.graph;
    graph.leaf_index(&dataset.name).ok_or_else(|| {
        Error::invalid(format!("hierarchy has no leaf for dataset '{}'", dataset.name))
    })?;
    let mut rows = Vec::new();
    let mut y = Vec::new();
    for r in dataset.labeled_records() {
        let (leaf, age, gender) =
            hierarchy_subgroup_components(graph, &fitted.params, &dataset.name, r.subgroup());
        rows.push(design_row(&r.symptoms, &leaf, &age.unwrap_or([0.0; 4]), &gender.unwrap_or([0.0; 4])));
        y.push(if r.flu == Some(true) { 1.0 } else { 0.0 });
    }
    if rows.is_empty() {
        return Err(Error::invalid(format!(
            "dataset '{}' has no labeled records to fit classifiers on",
            dataset.name
        )));
    }
    Ok(nnls(&rows, &y, columns))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::build_hierarchy;
    use crate::model::{AgeGroup, CollectionMode, DatasetRole, Gender};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn residual(rows: &[[f64; 4]], y: &[f64], g: &[f64; 4]) -> f64 {
        rows.iter()
            .zip(y)
            .map(|(r, yi)| {
                let pred: f64 = r.iter().zip(g).map(|(a, b)| a * b).sum();
                (pred - yi).powi(2)
            })
            .sum()
    }

    #[test]
    fn nnls_recovers_an_exact_nonnegative_solution() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let truth = [0.5, 2.0, 0.0, 0.0];
        let rows: Vec<[f64; 4]> = (0..200)
            .map(|_| [1.0, rng.gen_range(0.0..3.0), rng.gen_range(-1.0..2.0), rng.gen_range(0.0..1.0)])
            .collect();
        let y: Vec<f64> =
            rows.iter().map(|r| r.iter().zip(truth).map(|(a, b)| a * b).sum()).collect();
        let g = nnls(&rows, &y, 4);
        for j in 0..4 {
            assert!((g[j] - truth[j]).abs() < 1e-8, "component {j}: {} vs {}", g[j], truth[j]);
        }
    }

    #[test]
    fn nnls_on_zero_targets_returns_zero() {
        let rows = vec![[1.0, 0.5, 0.2, 0.1]; 30];
        let y = vec![0.0; 30];
        assert_eq!(nnls(&rows, &y, 4), [0.0; 4]);
    }

    #[test]
    fn nnls_clamps_anticorrelated_components_to_zero() {
        // Targets move opposite to the second column; its weight must pin
        // at zero rather than go negative.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rows: Vec<[f64; 4]> =
            (0..100).map(|_| [1.0, rng.gen_range(0.0..2.0), 0.0, 0.0]).collect();
        let y: Vec<f64> = rows.iter().map(|r| 2.0 - 1.5 * r[1]).collect();
        let g = nnls(&rows, &y, 2);
        assert_eq!(g[1], 0.0);
        // With the slope pinned, the best intercept is the target mean
        // (positive here, so itself unclamped).
        let mean = y.iter().sum::<f64>() / y.len() as f64;
        assert!(mean > 0.0);
        assert!((g[0] - mean).abs() < 1e-8);
    }

    #[test]
    fn nnls_satisfies_the_optimality_conditions() {
        // For a convex problem the Karush-Kuhn-Tucker conditions certify
        // the exact optimum: at the solution, the gradient must be
        // non-positive on zeroed components and zero on active ones.
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for case in 0..300 {
            let n = rng.gen_range(4..40);
            let k = rng.gen_range(1..=4);
            let rows: Vec<[f64; 4]> = (0..n)
                .map(|_| std::array::from_fn(|j| if j < k { rng.gen_range(-2.0..2.0) } else { 0.0 }))
                .collect();
            let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let g = nnls(&rows, &y, k);
            let scale = 1.0 + y.iter().map(|v| v * v).sum::<f64>();
            for j in 0..k {
                assert!(g[j] >= 0.0, "case {case}: negative weight {}", g[j]);
                let grad_j: f64 = rows
                    .iter()
                    .zip(&y)
                    .map(|(r, yi)| {
                        let pred: f64 = r.iter().zip(g).map(|(a, b)| a * b).sum();
                        r[j] * (yi - pred)
                    })
                    .sum();
                if g[j] > 0.0 {
                    assert!(grad_j.abs() <= 1e-6 * scale, "case {case} col {j}: grad {grad_j}");
                } else {
                    assert!(grad_j <= 1e-6 * scale, "case {case} col {j}: grad {grad_j}");
                }
            }
        }
    }

    #[test]
    fn nnls_beats_a_fine_grid_on_small_problems() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..3 {
            let rows: Vec<[f64; 4]> =
                (0..20).map(|_| [1.0, rng.gen_range(0.0..1.5), 0.0, 0.0]).collect();
            let y: Vec<f64> = (0..20).map(|_| rng.gen_range(0.0..1.0)).collect();
            let g = nnls(&rows, &y, 2);
            let mut best = f64::INFINITY;
            for i in 0..=300 {
                for j in 0..=300 {
                    let cand = [i as f64 * 0.01, j as f64 * 0.01, 0.0, 0.0];
                    best = best.min(residual(&rows, &y, &cand));
                }
            }
            assert!(residual(&rows, &y, &g) <= best + 1e-9);
        }
    }

    fn stats_with(
        dl: Option<f64>,
        dp: Option<f64>,
        pl: Option<f64>,
        pp: Option<f64>,
    ) -> SubgroupStats {
        SubgroupStats {
            key: SubgroupKey { age: AgeGroup::A16to44, gender: Gender::Male },
            delta_local: dl,
            delta_pop: dp,
            prev_local: pl,
            prev_pop: pp,
            n_local: 10,
            n_pop: 100,
        }
    }

    #[test]
    fn licensing_prefers_concentrated_local_evidence() {
        let (c, r) = licensing_select(&stats_with(Some(0.2), Some(0.5), Some(0.5), Some(0.5)), 0.9);
        assert_eq!((c, r), (ThetaChoice::Local, ChoiceReason::DeltaCondition));
    }

    #[test]
    fn licensing_delta_condition_is_strict() {
        let (c, r) = licensing_select(&stats_with(Some(0.5), Some(0.5), Some(0.5), Some(0.5)), 0.9);
        assert_eq!((c, r), (ThetaChoice::Invariant, ChoiceReason::Default));
    }

    #[test]
    fn licensing_prevalence_condition_includes_the_boundary() {
        let stats = stats_with(Some(0.7), Some(0.5), Some(0.9), Some(0.0));
        // Delta condition fails (0.7 >= 0.5); prevalence gap is exactly tau.
        let (c, r) = licensing_select(&stats, 0.9);
        assert_eq!((c, r), (ThetaChoice::Local, ChoiceReason::PrevalenceCondition));
        let (c, _) = licensing_select(&stats, 0.9000001);
        assert_eq!(c, ThetaChoice::Invariant);
    }

    #[test]
    fn licensing_delta_condition_outranks_prevalence() {
        let stats = stats_with(Some(0.1), Some(0.9), Some(1.0), Some(0.0));
        let (_, r) = licensing_select(&stats, 0.5);
        assert_eq!(r, ChoiceReason::DeltaCondition);
    }

    #[test]
    fn licensing_undefined_statistics_fall_through_to_default() {
        for stats in [
            stats_with(None, Some(0.9), Some(0.5), Some(0.4)),
            stats_with(Some(0.1), None, Some(0.5), Some(0.4)),
            stats_with(None, None, None, Some(0.4)),
            stats_with(None, None, None, None),
        ] {
            let (c, r) = licensing_select(&stats, 0.9);
            assert_eq!((c, r), (ThetaChoice::Invariant, ChoiceReason::Default));
        }
    }

    #[test]
    fn case_oracle_matches_hand_computed_information() {
        // p = 0.8: dominant information -ln 0.8 < -ln 0.6 for p = 0.6.
        assert_eq!(licensing_case_oracle(0.8, 0.6), Ordering::Less);
        // Mirrored probabilities share the same dominant event mass.
        assert_eq!(licensing_case_oracle(0.2, 0.6), Ordering::Less);
        assert_eq!(licensing_case_oracle(0.5, 0.9), Ordering::Greater);
        assert_eq!(licensing_case_oracle(0.3, 0.7), Ordering::Equal);
    }

    #[test]
    fn case_oracle_agrees_with_concentration_ordering() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..2000 {
            let pl: f64 = rng.gen_range(0.01..0.99);
            let pp: f64 = rng.gen_range(0.01..0.99);
            let dl = (2.0 * pl - 1.0).abs();
            let dp = (2.0 * pp - 1.0).abs();
            if dl > dp {
                assert_eq!(licensing_case_oracle(pl, pp), Ordering::Less, "pl={pl}, pp={pp}");
            }
            if dl < dp {
                assert_eq!(licensing_case_oracle(pl, pp), Ordering::Greater, "pl={pl}, pp={pp}");
            }
        }
    }

    #[test]
    fn predict_is_the_weighted_sum_of_component_scores() {
        let c = SubgroupClassifier {
            key: SubgroupKey { age: AgeGroup::A0to4, gender: Gender::Female },
            gamma: [0.1, 1.0, 2.0, 3.0],
            theta_leaf: [1.0, 0.0, 0.5, 0.0],
            theta_age: [0.0, 1.0, 0.0, 0.0],
            theta_gender: [0.25, 0.25, 0.25, 0.25],
            choice: ThetaChoice::Invariant,
            reason: ChoiceReason::Default,
            inherited: false,
        };
        let x = SymptomVector([true, false, true, false]);
        // Scores: leaf 1.5, age 0.0, gender 0.5.
        let expected = 0.1 + 1.0 * 1.5 + 2.0 * 0.0 + 3.0 * 0.5;
        assert!((c.predict(&x) - expected).abs() < 1e-12);
    }

    fn record(sym: [bool; 4], age: AgeGroup, gender: Gender, flu: Option<bool>) -> Record {
        Record { symptoms: SymptomVector(sym), age, gender, flu }
    }

    /// Target dataset: a well-populated adult-male subgroup whose positive
    /// symptoms are a coin flip (concentration 0), plus a tiny elderly-male
    /// subgroup; a second dataset's adult males are all-symptomatic, which
    /// concentrates the pooled evidence.
    fn licensing_fixture() -> (Dataset, Dataset) {
        let am = |sym, flu| record(sym, AgeGroup::A16to44, Gender::Male, Some(flu));
        let mut records = vec![
            am([true, true, false, false], true),
            am([false, false, true, true], true),
            am([true, false, true, false], true),
            am([false, true, false, true], true),
            am([false, false, false, false], false),
            am([true, true, true, true], false),
        ];
        records.push(record([false, true, false, false], AgeGroup::A65plus, Gender::Male, Some(false)));
        records.push(record([true, false, false, false], AgeGroup::A65plus, Gender::Male, Some(false)));
        let target = Dataset {
            name: "t".into(),
            mode: CollectionMode::CitizenScience,
            role: DatasetRole::Target,
            records,
        };
        let other = Dataset {
            name: "o".into(),
            mode: CollectionMode::HealthWorker,
            role: DatasetRole::Source,
            records: (0..4).map(|_| am([true, true, true, true], true)).collect(),
        };
        (target, other)
    }

    fn fitted_for(datasets: &[Dataset]) -> FittedHierarchy {
        let graph = build_hierarchy(datasets);
        let params: Vec<ParamVector> =
            (0..graph.len()).map(|i| std::array::from_fn(|j| 0.1 * (i + j) as f64)).collect();
        FittedHierarchy { graph, params, objective: 0.0, cycles: 0, converged: true }
    }

    #[test]
    fn trainer_fits_own_weights_for_large_subgroups_and_inherits_for_small() {
        let (target, other) = licensing_fixture();
        let all = vec![target.clone(), other.clone()];
        let fitted = fitted_for(&all);
        let classifiers =
            train_subgroup_classifiers(&fitted, &target, &all, &ClassifierOptions::default())
                .unwrap();
        assert_eq!(classifiers.len(), crate::model::NUM_SUBGROUPS);
        assert_eq!(
            classifiers.iter().map(|c| c.key).collect::<Vec<_>>(),
            SubgroupKey::all().to_vec()
        );

        let adult_male = &classifiers
            [SubgroupKey { age: AgeGroup::A16to44, gender: Gender::Male }.index()];
        assert!(!adult_male.inherited);
        // Local evidence has concentration 0; the pool (with the second
        // dataset's uniformly symptomatic positives) is concentrated.
        assert_eq!(adult_male.choice, ThetaChoice::Local);
        assert_eq!(adult_male.reason, ChoiceReason::DeltaCondition);
        assert_eq!(adult_male.gamma[2], 0.0);
        assert_eq!(adult_male.gamma[3], 0.0);

        let elderly_male =
            &classifiers[SubgroupKey { age: AgeGroup::A65plus, gender: Gender::Male }.index()];
        assert!(elderly_male.inherited);
        // Both of its records are negative: no positives means no local
        // concentration estimate, and its prevalence (0) cannot exceed the
        // pool's, so the population components stay licensed.
        assert_eq!(elderly_male.choice, ThetaChoice::Invariant);
        assert_eq!(elderly_male.reason, ChoiceReason::Default);
        assert_eq!(elderly_male.gamma, fit_dataset_gamma(&fitted, &target, 4).unwrap());
    }

    #[test]
    fn trainer_refits_local_weights_on_the_same_pool() {
        let (target, other) = licensing_fixture();
        let all = vec![target.clone(), other.clone()];
        let fitted = fitted_for(&all);
        let classifiers =
            train_subgroup_classifiers(&fitted, &target, &all, &ClassifierOptions::default())
                .unwrap();
        let key = SubgroupKey { age: AgeGroup::A16to44, gender: Gender::Male };
        let adult_male = &classifiers[key.index()];

        // Reproduce the expected two-column fit on the subgroup's records.
        let own: Vec<&Record> =
            target.records.iter().filter(|r| r.subgroup() == key && r.flu.is_some()).collect();
        let rows: Vec<[f64; 4]> = own
            .iter()
            .map(|r| {
                design_row(&r.symptoms, &adult_male.theta_leaf, &adult_male.theta_age, &adult_male.theta_gender)
            })
            .collect();
        let y: Vec<f64> =
            own.iter().map(|r| if r.flu == Some(true) { 1.0 } else { 0.0 }).collect();
        assert_eq!(adult_male.gamma, nnls(&rows, &y, 2));
    }

    #[test]
    fn trainer_handles_hierarchies_without_demographic_nodes() {
        let (target, other) = licensing_fixture();
        let all = vec![target.clone(), other.clone()];
        let graph = crate::hierarchy::build_hierarchy_without_demographics(&all);
        let params: Vec<ParamVector> =
            (0..graph.len()).map(|i| std::array::from_fn(|j| 0.05 * (i * 4 + j) as f64)).collect();
        let fitted = FittedHierarchy { graph, params, objective: 0.0, cycles: 0, converged: true };
        let classifiers =
            train_subgroup_classifiers(&fitted, &target, &all, &ClassifierOptions::default())
                .unwrap();
        for c in &classifiers {
            assert_eq!(c.theta_age, [0.0; 4]);
            assert_eq!(c.theta_gender, [0.0; 4]);
        }
    }

    #[test]
    fn trainer_rejects_unlabeled_datasets_and_missing_leaves() {
        let (target, other) = licensing_fixture();
        let all = vec![target.clone(), other.clone()];
        let fitted = fitted_for(&all);

        let mut unlabeled = target.clone();
        for r in &mut unlabeled.records {
            r.flu = None;
        }
        let err =
            train_subgroup_classifiers(&fitted, &unlabeled, &all, &ClassifierOptions::default())
                .unwrap_err();
        assert!(err.to_string().contains("no labeled records"));

        let stranger = Dataset {
            name: "missing".into(),
            mode: CollectionMode::CitizenScience,
            role: DatasetRole::Target,
            records: target.records.clone(),
        };
        let err =
            train_subgroup_classifiers(&fitted, &stranger, &all, &ClassifierOptions::default())
                .unwrap_err();
        assert!(err.to_string().contains("no leaf"));
    }
}
