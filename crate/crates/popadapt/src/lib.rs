//! Population-aware hierarchical domain adaptation for binary outcome
//! prediction across data-collection environments.
//!
//! The library pools symptom surveys from several studies ("datasets"), each
//! gathered in a collection environment (citizen science or health worker),
//! and predicts a binary flu label for a target dataset with few labels.
//! Parameters live on a hierarchy — dataset leaves under environment nodes
//! under shared age/gender population nodes under a root — and are fit by
//! MAP estimation with Powell's method. A second stage blends the dataset,
//! age, and gender parameter scores per demographic subgroup with
//! non-negative weights, and an information-based rule decides per subgroup
//! whether to trust local or population-invariant parameters.
//!
//! A faithful synthetic data generator (invariant subgroup prevalences,
//! environment-specific reporting distortion, dataset-specific demographic
//! mixtures) and standard baselines (target-only, pooled, feature
//! augmentation, environment-only hierarchy) support end-to-end evaluation.
//!
//! # Examples
//!
//! Each major capability has a runnable example:
//!
//! ```text
//! cargo run --example generate_data        # synthesize the four-study bundle
//! cargo run --example fit_hierarchy        # MAP-fit node parameters
//! cargo run --example subgroup_classifiers # blend weights + licensing per subgroup
//! cargo run --example licensing_rule       # the local-vs-invariant selector alone
//! cargo run --example run_experiment       # full multi-method evaluation
//! cargo run --example label_sweep          # AUC vs. label budget
//! ```
//!
//! The `popadapt` binary wraps the same entry points as subcommands
//! (`generate`, `fit`, `eval`, `sweep`, `report`) for file-based pipelines.

pub mod baselines;
pub mod blend;
pub mod cli;
pub mod dgp;
pub mod error;
pub mod experiment;
pub mod hierarchy;
pub mod io;
pub mod model;
pub mod optim;
pub mod stats;

pub use error::Error;
pub use model::{AgeGroup, CollectionMode, Dataset, DatasetRole, Gender, Record, SubgroupKey, SymptomVector};

/// Number of symptom features per record.
pub const NUM_SYMPTOMS: usize = 4;

/// Canonical symptom order used by every vector, table, and file format.
pub const SYMPTOM_NAMES: [&str; NUM_SYMPTOMS] = ["fever", "cough", "muscle_pain", "sore_throat"];
