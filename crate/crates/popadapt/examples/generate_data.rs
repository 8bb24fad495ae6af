//! Generate a synthetic multi-study symptom corpus and audit the three
//! structural properties the learner later exploits: a shared
//! outcome-given-subgroup law, environment-specific symptom reporting,
//! and visibly different demographic mixtures per study.
//!
//! Run with: cargo run --example generate_data

use popadapt::dgp::{default_config, empirical_mixture, generate, total_variation};
use popadapt::model::{CollectionMode, Record, SubgroupKey};

fn main() {
    let mut cfg = default_config();
    // Shrink the default sizes so the example is instant.
    for spec in &mut cfg.datasets {
        spec.size = (spec.size / 2).max(200);
    }

    let bundle = generate(&cfg, 7).expect("config is valid");

    println!("Generated {} datasets (seed 7):\n", bundle.datasets.len());
    println!("{:<10}  {:<16}  {:>7}  {:>10}", "dataset", "mode", "records", "prevalence");
    for d in &bundle.datasets {
        let labeled: Vec<&Record> = d.labeled_records().collect();
        let pos = labeled.iter().filter(|r| r.flu == Some(true)).count();
        println!(
            "{:<10}  {:<16}  {:>7}  {:>9.1}%",
            d.name,
            match d.mode {
                CollectionMode::CitizenScience => "citizen-science",
                CollectionMode::HealthWorker => "health-worker",
            },
            d.records.len(),
            100.0 * pos as f64 / labeled.len() as f64,
        );
    }

    println!("\nPairwise demographic-mixture distance (total variation):");
    for (i, a) in bundle.datasets.iter().enumerate() {
        for b in bundle.datasets.iter().skip(i + 1) {
            let tv = total_variation(&empirical_mixture(a), &empirical_mixture(b));
            println!("  {:<10} vs {:<10}  {tv:.3}", a.name, b.name);
        }
    }

    // The same subgroup carries the same outcome rate everywhere; what
    // changes across collection modes is how symptoms get *reported*.
    println!("\nP(symptom | positive) per environment (reporting distortion):");
    let by_mode = |mode: CollectionMode, j: usize| -> f64 {
        let (mut n, mut yes) = (0.0, 0.0);
        for d in bundle.datasets.iter().filter(|d| d.mode == mode) {
            for r in d.records.iter().filter(|r| r.flu == Some(true)) {
                n += 1.0;
                if r.symptoms.0[j] {
                    yes += 1.0;
                }
            }
        }
        yes / n
    };
    println!("  {:<12}  {:>15}  {:>13}", "symptom", "citizen-science", "health-worker");
    for (j, name) in popadapt::SYMPTOM_NAMES.iter().enumerate() {
        println!(
            "  {:<12}  {:>15.3}  {:>13.3}",
            name,
            by_mode(CollectionMode::CitizenScience, j),
            by_mode(CollectionMode::HealthWorker, j),
        );
    }

    println!("\nOutcome rate per subgroup, pooled over each environment:");
    println!("  {:<6} {:<2}  {:>15}  {:>13}", "age", "g", "citizen-science", "health-worker");
    for key in SubgroupKey::all() {
        let rate = |mode: CollectionMode| -> f64 {
            let (mut n, mut pos) = (0.0, 0.0);
            for d in bundle.datasets.iter().filter(|d| d.mode == mode) {
                for r in d.records.iter().filter(|r| r.subgroup() == key) {
                    n += 1.0;
                    if r.flu == Some(true) {
                        pos += 1.0;
                    }
                }
            }
            pos / n
        };
        println!(
            "  {:<6} {:<2}  {:>15.3}  {:>13.3}",
            key.age.label(),
            key.gender.label(),
            rate(CollectionMode::CitizenScience),
            rate(CollectionMode::HealthWorker),
        );
    }
}
