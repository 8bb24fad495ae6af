//! Replicated evaluation: adapt to a scarcely labeled target study and
//! compare the hierarchy against target-only, pooled, and
//! feature-augmentation baselines, subgroup by subgroup.
//!
//! Run with: cargo run --example run_experiment

use popadapt::baselines::Method;
use popadapt::dgp::{default_config, generate};
use popadapt::experiment::{render_report, run_experiment};
use popadapt::io::ExperimentConfig;

fn main() {
    let mut dgp = default_config();
    for spec in &mut dgp.datasets {
        spec.size = (spec.size / 2).max(200);
    }
    let bundle = generate(&dgp, 7).expect("config is valid");

    let cfg = ExperimentConfig {
        target: "goviral".into(),
        sources: vec!["fluwatch".into(), "hongkong".into(), "hutterite".into()],
        label_fraction: 0.2,
        seeds: (1..=5).collect(),
        methods: vec![Method::Tr, Method::Lr, Method::Feda, Method::Hier, Method::HierPop],
        ..ExperimentConfig::default()
    };

    println!(
        "Adapting to `{}` with {:.0}% of its labels, {} replications, methods: {}\n",
        cfg.target,
        cfg.label_fraction * 100.0,
        cfg.seeds.len(),
        cfg.methods.iter().map(|m| m.label()).collect::<Vec<_>>().join(", "),
    );

    let rows = run_experiment(&bundle.datasets, &cfg).expect("config matches the data");
    println!("{}", render_report(&rows));
}
