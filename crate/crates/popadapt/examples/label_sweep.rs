//! How the transfer advantage changes with the target's label budget:
//! sweep the revealed-label fraction and compare methods on the mean
//! per-subgroup AUC.
//!
//! Run with: cargo run --example label_sweep

use popadapt::baselines::Method;
use popadapt::dgp::{default_config, generate};
use popadapt::experiment::label_fraction_sweep;
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
        seeds: (1..=5).collect(),
        methods: vec![Method::Tr, Method::Lr, Method::HierPop],
        ..ExperimentConfig::default()
    };
    let fractions = [0.05, 0.1, 0.2, 0.4];

    let outcome = label_fraction_sweep(&bundle.datasets, &cfg, &fractions)
        .expect("fractions are valid");

    println!("method,dataset,label_fraction,mean_subgroup_auc");
    for row in &outcome.summary {
        println!(
            "{},{},{},{}",
            row.method.label(),
            row.dataset,
            row.label_fraction,
            row.mean_subgroup_auc.map_or("-".into(), |v| format!("{v:.3}")),
        );
    }

    println!("\nMean subgroup AUC by label budget:");
    print!("{:<10}", "method");
    for f in fractions {
        print!("  {:>6.0}%", f * 100.0);
    }
    println!();
    let cell = |method: Method, f: f64| -> Option<f64> {
        outcome
            .summary
            .iter()
            .find(|r| r.method == method && r.label_fraction == f)
            .and_then(|r| r.mean_subgroup_auc)
    };
    for method in &cfg.methods {
        print!("{:<10}", method.label());
        for f in fractions {
            match cell(*method, f) {
                Some(v) => print!("  {v:>7.3}"),
                None => print!("  {:>7}", "-"),
            }
        }
        println!();
    }

    // The interesting quantity: how much the hierarchy adds over training
    // on the target's own labels alone, as those labels grow.
    print!("{:<10}", "gain");
    for f in fractions {
        match (cell(Method::HierPop, f), cell(Method::Tr, f)) {
            (Some(h), Some(t)) => print!("  {:>+7.3}", h - t),
            _ => print!("  {:>7}", "-"),
        }
    }
    println!("\n\n(`gain` is Hier_pop minus TR; transfer pays most when labels are scarce)");
}
