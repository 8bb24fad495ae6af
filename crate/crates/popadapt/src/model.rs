//! Core domain vocabulary: records, demographic subgroups, datasets, splits.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::NUM_SYMPTOMS;

/// Binary symptom indicators in canonical order
/// (fever, cough, muscle pain, sore throat).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct SymptomVector(pub [bool; NUM_SYMPTOMS]);

impl SymptomVector {
    /// Value of symptom `j` as 0.0/1.0, for dot products with parameters.
    #[inline]
    pub fn feature(&self, j: usize) -> f64 {
        if self.0[j] {
            1.0
        } else {
            0.0
        }
    }

    /// Dense 0/1 feature representation.
    pub fn features(&self) -> [f64; NUM_SYMPTOMS] {
        let mut out = [0.0; NUM_SYMPTOMS];
        for j in 0..NUM_SYMPTOMS {
            out[j] = self.feature(j);
        }
        out
    }

    /// Dot product with a parameter vector of the same length.
    #[inline]
    pub fn dot(&self, theta: &[f64; NUM_SYMPTOMS]) -> f64 {
        let mut s = 0.0;
        for j in 0..NUM_SYMPTOMS {
            if self.0[j] {
                s += theta[j];
            }
        }
        s
    }
}

/// Five-bucket age coding shared by every dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AgeGroup {
    A0to4,
    A5to15,
    A16to44,
    A45to64,
    A65plus,
}

impl AgeGroup {
    /// All buckets in canonical (ascending) order.
    pub const ALL: [AgeGroup; 5] =
        [AgeGroup::A0to4, AgeGroup::A5to15, AgeGroup::A16to44, AgeGroup::A45to64, AgeGroup::A65plus];

    /// The exact label used in files and reports.
    pub fn label(&self) -> &'static str {
        match self {
            AgeGroup::A0to4 => "0-4",
            AgeGroup::A5to15 => "5-15",
            AgeGroup::A16to44 => "16-44",
            AgeGroup::A45to64 => "45-64",
            AgeGroup::A65plus => "65+",
        }
    }

    /// Parse the exact file label; anything else is rejected.
    pub fn parse(s: &str) -> Option<AgeGroup> {
        AgeGroup::ALL.into_iter().find(|a| a.label() == s)
    }

    /// Position in [`AgeGroup::ALL`].
    pub fn index(&self) -> usize {
        AgeGroup::ALL.iter().position(|a| a == self).unwrap()
    }
}

/// Binary gender coding shared by every dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gender {
    Male,
    Female,
}

impl Gender {
    /// Both values in canonical order.
    pub const ALL: [Gender; 2] = [Gender::Male, Gender::Female];

    /// The exact label used in files and reports.
    pub fn label(&self) -> &'static str {
        match self {
            Gender::Male => "M",
            Gender::Female => "F",
        }
    }

    /// Parse the exact file label; anything else is rejected.
    pub fn parse(s: &str) -> Option<Gender> {
        Gender::ALL.into_iter().find(|g| g.label() == s)
    }

    /// Position in [`Gender::ALL`].
    pub fn index(&self) -> usize {
        Gender::ALL.iter().position(|g| g == self).unwrap()
    }
}

/// One demographic cell: an (age bucket, gender) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubgroupKey {
    pub age: AgeGroup,
    pub gender: Gender,
}

/// Number of demographic subgroups (5 age buckets x 2 genders).
pub const NUM_SUBGROUPS: usize = 10;

impl SubgroupKey {
    /// All ten cells, age-major with Male before Female inside each bucket.
    pub fn all() -> [SubgroupKey; NUM_SUBGROUPS] {
        let mut out = [SubgroupKey { age: AgeGroup::A0to4, gender: Gender::Male }; NUM_SUBGROUPS];
        let mut i = 0;
        for age in AgeGroup::ALL {
            for gender in Gender::ALL {
                out[i] = SubgroupKey { age, gender };
                i += 1;
            }
        }
        out
    }

    /// Dense index consistent with [`SubgroupKey::all`].
    pub fn index(&self) -> usize {
        self.age.index() * 2 + self.gender.index()
    }
}

/// One survey row: symptoms, demographics, and an optional flu label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Record {
    pub symptoms: SymptomVector,
    pub age: AgeGroup,
    pub gender: Gender,
    /// `None` when the outcome was never observed (unlabeled target rows).
    pub flu: Option<bool>,
}

impl Record {
    /// The demographic cell this record belongs to.
    pub fn subgroup(&self) -> SubgroupKey {
        SubgroupKey { age: self.age, gender: self.gender }
    }
}

/// How a study collected its data; determines the environment node the
/// dataset hangs under and which reporting-distortion profile applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CollectionMode {
    CitizenScience,
    HealthWorker,
}

impl CollectionMode {
    /// Both modes in canonical order.
    pub const ALL: [CollectionMode; 2] = [CollectionMode::CitizenScience, CollectionMode::HealthWorker];

    /// Short code used in config files.
    pub fn code(&self) -> &'static str {
        match self {
            CollectionMode::CitizenScience => "cs",
            CollectionMode::HealthWorker => "hw",
        }
    }

    /// Parse the exact short code; anything else is rejected.
    pub fn parse(s: &str) -> Option<CollectionMode> {
        CollectionMode::ALL.into_iter().find(|m| m.code() == s)
    }
}

/// Whether a dataset is the adaptation target (scarce labels) or a fully
/// labeled source.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetRole {
    Target,
    Source,
}

/// A named study: its collection mode, role, and records.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub mode: CollectionMode,
    pub role: DatasetRole,
    pub records: Vec<Record>,
}

impl Dataset {
    /// Indices of records that carry a label.
    pub fn labeled_indices(&self) -> Vec<usize> {
        (0..self.records.len()).filter(|&i| self.records[i].flu.is_some()).collect()
    }

    /// Labeled records, borrowed.
    pub fn labeled_records(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(|r| r.flu.is_some())
    }
}

/// Partition a dataset's record indices by demographic subgroup.
///
/// Every index appears in exactly one bucket; all ten buckets are present
/// (possibly empty) so downstream tables always cover the full grid.
pub fn subgroup_partition(d: &Dataset) -> [Vec<usize>; NUM_SUBGROUPS] {
    let mut out: [Vec<usize>; NUM_SUBGROUPS] = Default::default();
    for (i, r) in d.records.iter().enumerate() {
        out[r.subgroup().index()].push(i);
    }
    out
}

/// Options for [`split_labeled_with`].
#[derive(Debug, Clone, Copy)]
pub struct SplitOptions {
    /// Stratify the draw by (subgroup, label) cell. On by default so small
    /// demographic cells keep their share of the label budget.
    pub stratified: bool,
}

impl Default for SplitOptions {
    fn default() -> Self {
        SplitOptions { stratified: true }
    }
}

/// Stratified train/test split over a dataset's labeled records; see
/// [`split_labeled_with`].
pub fn split_labeled(d: &Dataset, fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    split_labeled_with(d, fraction, seed, SplitOptions::default())
}

/// Split the labeled records of `d` into (train, test) index sets.
///
/// `train` gets `round(fraction * n)` of the `n` labeled indices. When
/// stratified, the draw allocates per (subgroup, label) cell proportionally
/// (largest-remainder rounding), which guarantees at least one training
/// member from every cell with `ceil(1/fraction)` or more records. The
/// result is deterministic in `seed`; both index lists come back sorted.
pub fn split_labeled_with(
    d: &Dataset,
    fraction: f64,
    seed: u64,
    opts: SplitOptions,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::invalid(format!("label fraction must be in (0, 1], got {fraction}")));
    }
    let labeled = d.labeled_indices();
    if labeled.is_empty() {
        return Err(Error::invalid(format!("dataset '{}' has no labeled records to split", d.name)));
    }
    let n = labeled.len();
    let k = (fraction * n as f64).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut train = Vec::with_capacity(k);
    let mut test = Vec::with_capacity(n - k);
    if opts.stratified {
        // Cells ordered by (subgroup index, label), records in file order.
        let mut cells: Vec<Vec<usize>> = vec![Vec::new(); NUM_SUBGROUPS * 2];
        for &i in &labeled {
            let r = &d.records[i];
            let cell = r.subgroup().index() * 2 + usize::from(r.flu.unwrap());
            cells[cell].push(i);
        }
        // Proportional base allocation, then largest remainders up to k.
        let mut take: Vec<usize> = Vec::with_capacity(cells.len());
        let mut rem: Vec<(usize, f64)> = Vec::new();
        let mut assigned = 0usize;
        for (c, cell) in cells.iter().enumerate() {
            let quota = fraction * cell.len() as f64;
            let base = (quota + 1e-9).floor() as usize;
            take.push(base.min(cell.len()));
            assigned += take[c];
            rem.push((c, quota - base as f64));
        }
        rem.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        let mut short = k.saturating_sub(assigned);
        while short > 0 {
            let mut progressed = false;
            for &(c, _) in &rem {
                if short == 0 {
                    break;
                }
                if take[c] < cells[c].len() {
                    take[c] += 1;
                    short -= 1;
                    progressed = true;
                }
            }
            if !progressed {
                break; // every cell exhausted; k == n handled above this point
            }
        }
        for (c, cell) in cells.iter().enumerate() {
            let mut idx = cell.clone();
            idx.shuffle(&mut rng);
            train.extend_from_slice(&idx[..take[c]]);
            test.extend_from_slice(&idx[take[c]..]);
        }
    } else {
        let mut idx = labeled;
        idx.shuffle(&mut rng);
        train.extend_from_slice(&idx[..k]);
        test.extend_from_slice(&idx[k..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}
