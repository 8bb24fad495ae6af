//! Run the full adaptation pipeline for one scarcely labeled target study
//! and inspect the per-subgroup classifiers it produces.
//!
//! Each demographic subgroup gets a small non-negative blend over an
//! intercept and the hierarchy's leaf/age/gender scores. A licensing rule
//! decides per subgroup whether the blend may also lean on the target's own
//! demographic nodes ("local") or must stay with the pooled, transferable
//! parts ("invariant"); subgroups with too few labeled records inherit a
//! dataset-level fit instead of overfitting their own handful.
//!
//! Run with: cargo run --example subgroup_classifiers

use popadapt::blend::{train_subgroup_classifiers, ChoiceReason, ClassifierOptions, ThetaChoice};
use popadapt::dgp::{default_config, generate};
use popadapt::hierarchy::build_hierarchy;
use popadapt::model::{split_labeled_with, SplitOptions};
use popadapt::optim::{fit_hierarchy, ObjectiveSpec, PowellOptions};

fn main() {
    let mut cfg = default_config();
    for spec in &mut cfg.datasets {
        spec.size = (spec.size / 2).max(200);
    }
    let mut datasets = generate(&cfg, 7).expect("config is valid").datasets;

    // Reveal 20% of the target's labels; hide the rest, as in deployment.
    let target_pos = datasets.iter().position(|d| d.name == "goviral").expect("target present");
    let (train, _test) = split_labeled_with(
        &datasets[target_pos],
        0.2,
        1,
        SplitOptions { stratified: true },
    )
    .expect("target has labels");
    for (i, r) in datasets[target_pos].records.iter_mut().enumerate() {
        if train.binary_search(&i).is_err() {
            r.flu = None;
        }
    }

    let graph = build_hierarchy(&datasets);
    let spec = ObjectiveSpec::for_datasets(graph, &datasets, 1.0, 0.2, 0.1);
    let fitted = fit_hierarchy(&spec, PowellOptions::default());

    let classifiers = train_subgroup_classifiers(
        &fitted,
        &datasets[target_pos],
        &datasets,
        &ClassifierOptions::default(),
    )
    .expect("target has labeled records");

    println!("Per-subgroup classifiers for `goviral` (20% labels revealed):\n");
    println!(
        "{:<6} {:<2}  {:>7} {:>7} {:>7} {:>7}  {:<9} {:<20} {}",
        "age", "g", "g0", "g1", "g2", "g3", "choice", "reason", "fit"
    );
    for c in &classifiers {
        println!(
            "{:<6} {:<2}  {:>7.3} {:>7.3} {:>7.3} {:>7.3}  {:<9} {:<20} {}",
            c.key.age.label(),
            c.key.gender.label(),
            c.gamma[0],
            c.gamma[1],
            c.gamma[2],
            c.gamma[3],
            match c.choice {
                ThetaChoice::Local => "local",
                ThetaChoice::Invariant => "invariant",
            },
            match c.reason {
                ChoiceReason::DeltaCondition => "concentration-gain",
                ChoiceReason::PrevalenceCondition => "prevalence-excess",
                ChoiceReason::Default => "default",
            },
            if c.inherited { "inherited (too few records)" } else { "own records" },
        );
    }

    // Score a few held-out records with their subgroup's classifier.
    println!("\nSample held-out scores:");
    let target = &datasets[target_pos];
    let held_out = target
        .records
        .iter()
        .enumerate()
        .filter(|(i, _)| train.binary_search(i).is_err())
        .take(5);
    for (i, r) in held_out {
        let c = &classifiers[r.subgroup().index()];
        println!(
            "  record {:>4}  subgroup {:<6} {:<2} symptoms {:?}  score {:.3}",
            i,
            r.age.label(),
            r.gender.label(),
            r.symptoms.0.map(|b| b as u8),
            c.predict(&r.symptoms),
        );
    }
}
