//! The parameter hierarchy: dataset leaves under environment nodes, with
//! shared age and gender population nodes, all under a common root.
//!
//! Leaves see data; every node above them exists to share statistical
//! strength. An environment node averages over the demographic nodes (its
//! parents), so dataset parameters are pulled both toward their collection
//! environment and toward population-level demographic structure.

use crate::model::{AgeGroup, CollectionMode, Dataset, Gender, Record, SubgroupKey};
use crate::stats::ppv;
use crate::NUM_SYMPTOMS;

/// One symptom-parameter vector (one per hierarchy node).
pub type ParamVector = [f64; NUM_SYMPTOMS];

/// Identity of a hierarchy node.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NodeId {
    Root,
    Age(AgeGroup),
    Gender(Gender),
    Env(CollectionMode),
    Leaf(String),
}

impl NodeId {
    /// Stable label used in fitted-parameter artifacts.
    pub fn label(&self) -> String {
        match self {
            NodeId::Root => "root".into(),
            NodeId::Age(a) => format!("age:{}", a.label()),
            NodeId::Gender(g) => format!("gender:{}", g.label()),
            NodeId::Env(m) => format!("env:{}", m.code()),
            NodeId::Leaf(name) => format!("leaf:{name}"),
        }
    }
}

/// Directed hierarchy: `parents[i]` lists the node indices `nodes[i]`
/// diverges toward. The root has no parents; every other node has at
/// least one.
#[derive(Debug, Clone, PartialEq)]
pub struct HierarchyGraph {
    pub nodes: Vec<NodeId>,
    pub parents: Vec<Vec<usize>>,
}

impl HierarchyGraph {
    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    /// True when the graph has no nodes (never produced by the builders).
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Index of a node, if present.
    pub fn index(&self, id: &NodeId) -> Option<usize> {
        self.nodes.iter().position(|n| n == id)
    }

    /// Index of a dataset's leaf node, if present.
    pub fn leaf_index(&self, dataset: &str) -> Option<usize> {
        self.index(&NodeId::Leaf(dataset.to_string()))
    }

    /// Leaf indices in node order.
    pub fn leaves(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| matches!(self.nodes[i], NodeId::Leaf(_))).collect()
    }
}

/// Build the full hierarchy over `datasets`:
/// root -> {age, gender} -> environment -> leaf.
///
/// Only environments that actually occur get a node. Each environment node
/// lists all seven demographic nodes as parents (its divergence averages
/// over them); each demographic node's parent is the root; each leaf's
/// parent is its dataset's environment node.
pub fn build_hierarchy(datasets: &[Dataset]) -> HierarchyGraph {
    build(datasets, true)
}

/// Build the environment-only hierarchy (no demographic nodes):
/// root -> environment -> leaf. This is the structure the `Hier` baseline
/// fits; everything else about the objective is identical.
pub fn build_hierarchy_without_demographics(datasets: &[Dataset]) -> HierarchyGraph {
    build(datasets, false)
}

fn build(datasets: &[Dataset], demographics: bool) -> HierarchyGraph {
    let mut nodes = vec![NodeId::Root];
    let mut parents: Vec<Vec<usize>> = vec![Vec::new()];

    let mut demo_indices = Vec::new();
    if demographics {
        for age in AgeGroup::ALL {
            demo_indices.push(nodes.len());
            nodes.push(NodeId::Age(age));
            parents.push(vec![0]);
        }
        for gender in Gender::ALL {
            demo_indices.push(nodes.len());
            nodes.push(NodeId::Gender(gender));
            parents.push(vec![0]);
        }
    }

    let mut env_index = std::collections::BTreeMap::new();
    for mode in CollectionMode::ALL {
        if datasets.iter().any(|d| d.mode == mode) {
            env_index.insert(mode, nodes.len());
            nodes.push(NodeId::Env(mode));
            parents.push(if demographics { demo_indices.clone() } else { vec![0] });
        }
    }

    for d in datasets {
        nodes.push(NodeId::Leaf(d.name.clone()));
        parents.push(vec![env_index[&d.mode]]);
    }

    HierarchyGraph { nodes, parents }
}

/// Empirical-Bayes prior centers: the smoothed PPV vector of each node's
/// record pool (laplace = 1, so an empty pool centers at the uninformative
/// 0.5). Pools follow node meaning — the root pools every labeled record,
/// an age or gender node pools that demographic slice across all datasets,
/// an environment node pools its datasets, and a leaf pools its own
/// dataset. Unlabeled records contribute nowhere (PPV needs the outcome),
/// so a masked target contributes exactly its labeled subset.
pub fn empirical_centers(graph: &HierarchyGraph, datasets: &[Dataset]) -> Vec<ParamVector> {
    let pool = |pred: &dyn Fn(&Dataset, &Record) -> bool| -> Vec<&Record> {
        let mut out = Vec::new();
        for d in datasets {
            for r in &d.records {
                if r.flu.is_some() && pred(d, r) {
                    out.push(r);
                }
            }
        }
        out
    };
    graph
        .nodes
        .iter()
        .map(|node| {
            let records = match node {
                NodeId::Root => pool(&|_, _| true),
                NodeId::Age(a) => pool(&|_, r| r.age == *a),
                NodeId::Gender(g) => pool(&|_, r| r.gender == *g),
                NodeId::Env(m) => pool(&|d, _| d.mode == *m),
                NodeId::Leaf(name) => pool(&|d, _| &d.name == name),
            };
            let mut center = [0.0; NUM_SYMPTOMS];
            for (j, c) in center.iter_mut().enumerate() {
                *c = ppv(records.iter().copied(), j, 1.0);
            }
            center
        })
        .collect()
}

/// Per-leaf data statistics entering the fit objective: the smoothed PPV
/// vector (laplace = 1) of the dataset's labeled records.
pub fn leaf_stats(d: &Dataset) -> ParamVector {
    let mut f = [0.0; NUM_SYMPTOMS];
    for (j, v) in f.iter_mut().enumerate() {
        *v = ppv(d.labeled_records(), j, 1.0);
    }
    f
}

/// The parameter vectors scoring a subgroup of one dataset: the dataset
/// leaf, plus the age and gender nodes when the graph has them (the
/// environment-only hierarchy does not).
pub fn hierarchy_subgroup_components(
    graph: &HierarchyGraph,
    params: &[ParamVector],
    dataset: &str,
    key: SubgroupKey,
) -> (ParamVector, Option<ParamVector>, Option<ParamVector>) {
    assert_eq!(params.len(), graph.len(), "parameter vector count must match the graph");
    let leaf = graph.leaf_index(dataset).unwrap_or_else(|| panic!("no leaf node for dataset '{dataset}'"));
    let age = graph.index(&NodeId::Age(key.age)).map(|i| params[i]);
    let gender = graph.index(&NodeId::Gender(key.gender)).map(|i| params[i]);
    (params[leaf], age, gender)
}
