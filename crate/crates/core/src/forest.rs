//! Random forest of axis-aligned CART trees.
//!
//! Trees are grown greedily on Gini impurity. Each tree sees a bootstrap
//! sample (kept as integer multiplicities) and, at every node, a random
//! subset of the features. Split quality is compared exactly in integer
//! arithmetic: for a split with child class counts `l` and `r`,
//!
//! ```text
//! score = sum(l_k^2) / n_l + sum(r_k^2) / n_r
//! ```
//!
//! and minimizing the weighted child Gini impurity is the same as maximizing
//! `score`. Equal scores go to the lowest feature index, then the lowest
//! threshold. Thresholds are midpoints between adjacent distinct values and
//! a sample goes left when `x <= threshold`.
//!
//! Every tree draws from its own ChaCha stream, so a model is a pure function
//! of (rows sorted by key, parameters, seed) no matter how many threads
//! train it.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::describe_feature;

pub const MODEL_FORMAT: &str = "firesig-forest";
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ForestError {
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("feature dimension mismatch: model expects {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid hyperparameters: {0}")]
    Params(String),
    #[error("invalid model document: {0}")]
    Model(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_samples_leaf: usize,
    /// Features examined per split; `None` means `ceil(sqrt(dim))`.
    pub features_per_split: Option<usize>,
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_depth: 12,
            min_samples_leaf: 2,
            features_per_split: None,
            bootstrap: true,
        }
    }
}

impl ForestParams {
    pub fn validate(&self) -> Result<(), ForestError> {
        if self.n_trees == 0 {
            return Err(ForestError::Params("n_trees must be at least 1".into()));
        }
        if self.min_samples_leaf == 0 {
            return Err(ForestError::Params("min_samples_leaf must be at least 1".into()));
        }
        if self.features_per_split == Some(0) {
            return Err(ForestError::Params("features_per_split must be at least 1".into()));
        }
        Ok(())
    }

    pub fn resolved_features_per_split(&self, dim: usize) -> usize {
        self.features_per_split
            .unwrap_or_else(|| (dim as f64).sqrt().ceil() as usize)
            .clamp(1, dim.max(1))
    }
}

/// One training row. `key` defines the canonical row order.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub key: String,
    pub label: usize,
    pub features: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LabeledSet {
    pub class_names: Vec<String>,
    pub rows: Vec<Row>,
}

impl LabeledSet {
    pub fn new(class_names: Vec<String>) -> Self {
        Self {
            class_names,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, key: impl Into<String>, label: usize, features: Vec<f64>) {
        self.rows.push(Row {
            key: key.into(),
            label,
            features,
        });
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes()];
        for r in &self.rows {
            counts[r.label] += 1;
        }
        counts
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        counts: Vec<u32>,
    },
}

/// Flattened binary tree; node 0 is the root and children always come after
/// their parent.
#[derive(Clone, Debug, PartialEq)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
}

impl DecisionTree {
    /// Index of the leaf reached by `x`.
    pub fn leaf_index(&self, x: &[f64]) -> usize {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { .. } => return i,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    /// Majority class of the leaf reached by `x` (lowest index on ties).
    pub fn predict_class(&self, x: &[f64]) -> usize {
        match &self.nodes[self.leaf_index(x)] {
            Node::Leaf { counts } => argmax_u32(counts),
            Node::Split { .. } => unreachable!(),
        }
    }

    pub fn depth(&self) -> usize {
        fn go(t: &DecisionTree, i: usize) -> usize {
            match &t.nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(t, *left).max(go(t, *right)),
            }
        }
        go(self, 0)
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ForestModel {
    pub trees: Vec<DecisionTree>,
    pub n_classes: usize,
    pub class_names: Vec<String>,
    pub feature_dim: usize,
    pub train_seed: u64,
    pub params: ForestParams,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: usize,
    pub class_name: String,
    pub probabilities: Vec<f64>,
    pub votes: Vec<u32>,
}

/// Per-tree bootstrap multiplicities over the canonically ordered rows.
pub fn bootstrap_weights(n: usize, seed: u64, tree: usize, bootstrap: bool) -> Vec<u32> {
    draw_weights(n, bootstrap, &mut tree_rng(seed, tree))
}

fn draw_weights(n: usize, bootstrap: bool, rng: &mut impl Rng) -> Vec<u32> {
    if !bootstrap {
        return vec![1; n];
    }
    let mut w = vec![0u32; n];
    for _ in 0..n {
        w[rng.random_range(0..n)] += 1;
    }
    w
}

fn tree_rng(seed: u64, tree: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tree as u64);
    rng
}

/// Rows in canonical (key) order; training only ever sees this order.
pub fn canonical_rows(set: &LabeledSet) -> Vec<&Row> {
    let mut rows: Vec<&Row> = set.rows.iter().collect();
    rows.sort_by(|a, b| a.key.cmp(&b.key));
    rows
}

pub fn train(set: &LabeledSet, params: &ForestParams, seed: u64) -> Result<ForestModel, ForestError> {
    params.validate()?;
    if set.is_empty() {
        return Err(ForestError::InsufficientData("no training rows".into()));
    }
    let dim = set.rows[0].features.len();
    if dim == 0 {
        return Err(ForestError::InsufficientData("rows have no features".into()));
    }
    if let Some(r) = set.rows.iter().find(|r| r.features.len() != dim) {
        return Err(ForestError::DimensionMismatch {
            expected: dim,
            got: r.features.len(),
        });
    }
    if let Some(r) = set.rows.iter().find(|r| r.label >= set.n_classes()) {
        return Err(ForestError::InsufficientData(format!(
            "row {} has label {} but only {} classes are named",
            r.key,
            r.label,
            set.n_classes()
        )));
    }
    let counts = set.class_counts();
    let present = counts.iter().filter(|&&c| c > 0).count();
    if present < 2 {
        return Err(ForestError::InsufficientData(format!(
            "need at least 2 classes, found {present}"
        )));
    }
    if let Some((k, &c)) = counts
        .iter()
        .enumerate()
        .find(|(_, &c)| c > 0 && c < params.min_samples_leaf)
    {
        return Err(ForestError::InsufficientData(format!(
            "class {} has {c} samples, min_samples_leaf is {}",
            set.class_names[k], params.min_samples_leaf
        )));
    }

    let rows = canonical_rows(set);
    let labels: Vec<usize> = rows.iter().map(|r| r.label).collect();
    let columns: Vec<Vec<f64>> = (0..dim)
        .map(|f| rows.iter().map(|r| r.features[f]).collect())
        .collect();
    let data = TrainingData {
        columns: &columns,
        labels: &labels,
        n_classes: set.n_classes(),
    };

    let trees = (0..params.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = tree_rng(seed, t);
            let weights = draw_weights(rows.len(), params.bootstrap, &mut rng);
            grow_tree(&data, &weights, params, &mut rng)
        })
        .collect();

    Ok(ForestModel {
        trees,
        n_classes: set.n_classes(),
        class_names: set.class_names.clone(),
        feature_dim: dim,
        train_seed: seed,
        params: params.clone(),
    })
}

/// Column-major training matrix in canonical row order.
pub struct TrainingData<'a> {
    pub columns: &'a [Vec<f64>],
    pub labels: &'a [usize],
    pub n_classes: usize,
}

/// Grows one tree on rows with the given multiplicities (rows with weight 0
/// are out of bag).
pub fn grow_tree(
    data: &TrainingData<'_>,
    weights: &[u32],
    params: &ForestParams,
    rng: &mut impl Rng,
) -> DecisionTree {
    let samples: Vec<(usize, u32)> = weights
        .iter()
        .enumerate()
        .filter(|(_, &w)| w > 0)
        .map(|(i, &w)| (i, w))
        .collect();
    let mut builder = Builder {
        data,
        params,
        mtry: params.resolved_features_per_split(data.columns.len()),
        nodes: Vec::new(),
        rng,
    };
    builder.grow(samples, 0);
    DecisionTree {
        nodes: builder.nodes,
    }
}

/// Exact rational `num / den` used to compare split scores.
#[derive(Clone, Copy, Debug)]
pub struct Score {
    num: u128,
    den: u128,
}

impl Score {
    /// `sum(l^2)/n_l + sum(r^2)/n_r`.
    pub fn of_split(left: &[u64], right: &[u64]) -> Self {
        let (sl, nl) = sum_sq(left);
        let (sr, nr) = sum_sq(right);
        Self {
            num: sl * nr + sr * nl,
            den: nl * nr,
        }
    }

    /// `sum(c^2)/n` for an unsplit node.
    pub fn of_node(counts: &[u64]) -> Self {
        let (s, n) = sum_sq(counts);
        Self { num: s, den: n }
    }

    pub fn cmp(&self, other: &Score) -> Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }
}

fn sum_sq(counts: &[u64]) -> (u128, u128) {
    counts.iter().fold((0u128, 0u128), |(s, n), &c| {
        (s + (c as u128) * (c as u128), n + c as u128)
    })
}

/// Midpoint threshold that still separates `lo < hi`.
pub fn midpoint(lo: f64, hi: f64) -> f64 {
    let mid = lo + (hi - lo) / 2.0;
    if mid < hi {
        mid
    } else {
        lo
    }
}

struct Candidate {
    feature: usize,
    threshold: f64,
    score: Score,
}

impl Candidate {
    fn beats(&self, other: &Candidate) -> bool {
        match self.score.cmp(&other.score) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => {
                self.feature < other.feature
                    || (self.feature == other.feature && self.threshold < other.threshold)
            }
        }
    }
}

struct Builder<'a, 'd, R: Rng> {
    data: &'a TrainingData<'d>,
    params: &'a ForestParams,
    mtry: usize,
    nodes: Vec<Node>,
    rng: &'a mut R,
}

impl<R: Rng> Builder<'_, '_, R> {
    fn grow(&mut self, samples: Vec<(usize, u32)>, depth: usize) -> usize {
        let counts = self.class_counts(&samples);
        let total: u64 = counts.iter().sum();
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf {
            counts: counts.iter().map(|&c| c as u32).collect(),
        });

        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        if depth >= self.params.max_depth
            || pure
            || total < 2 * self.params.min_samples_leaf as u64
        {
            return id;
        }
        let Some(best) = self.best_split(&samples) else {
            return id;
        };
        if best.score.cmp(&Score::of_node(&counts)) != Ordering::Greater {
            return id;
        }

        let column = &self.data.columns[best.feature];
        let (left, right): (Vec<_>, Vec<_>) = samples
            .into_iter()
            .partition(|&(i, _)| column[i] <= best.threshold);
        let l = self.grow(left, depth + 1);
        let r = self.grow(right, depth + 1);
        self.nodes[id] = Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left: l,
            right: r,
        };
        id
    }

    fn class_counts(&self, samples: &[(usize, u32)]) -> Vec<u64> {
        let mut counts = vec![0u64; self.data.n_classes];
        for &(i, w) in samples {
            counts[self.data.labels[i]] += w as u64;
        }
        counts
    }

    fn best_split(&mut self, samples: &[(usize, u32)]) -> Option<Candidate> {
        let dim = self.data.columns.len();
        let mut order: Vec<usize> = (0..dim).collect();
        let mut examined = 0;
        let mut best: Option<Candidate> = None;
        let mut sorted = samples.to_vec();
        for i in 0..dim {
            if examined == self.mtry {
                break;
            }
            let j = self.rng.random_range(i..dim);
            order.swap(i, j);
            let feature = order[i];
            let column = &self.data.columns[feature];
            sorted.sort_by(|a, b| column[a.0].total_cmp(&column[b.0]).then(a.0.cmp(&b.0)));
            if column[sorted[0].0] == column[sorted[sorted.len() - 1].0] {
                continue;
            }
            examined += 1;
            if let Some(c) = self.best_threshold(feature, &sorted) {
                if best.as_ref().is_none_or(|b| c.beats(b)) {
                    best = Some(c);
                }
            }
        }
        best
    }

    fn best_threshold(&self, feature: usize, sorted: &[(usize, u32)]) -> Option<Candidate> {
        let column = &self.data.columns[feature];
        let min_leaf = self.params.min_samples_leaf as u64;
        let total = self.class_counts(sorted);
        let n: u64 = total.iter().sum();
        let mut left = vec![0u64; self.data.n_classes];
        let mut right = total;
        let mut n_left = 0u64;
        let mut best: Option<Candidate> = None;
        for k in 0..sorted.len() - 1 {
            let (i, w) = sorted[k];
            let label = self.data.labels[i];
            left[label] += w as u64;
            right[label] -= w as u64;
            n_left += w as u64;
            let (lo, hi) = (column[i], column[sorted[k + 1].0]);
            if lo == hi || n_left < min_leaf || n - n_left < min_leaf {
                continue;
            }
            let score = Score::of_split(&left, &right);
            if best
                .as_ref()
                .is_none_or(|b| score.cmp(&b.score) == Ordering::Greater)
            {
                best = Some(Candidate {
                    feature,
                    threshold: midpoint(lo, hi),
                    score,
                });
            }
        }
        best
    }
}

impl ForestModel {
    fn check_dim(&self, x: &[f64]) -> Result<(), ForestError> {
        if x.len() != self.feature_dim {
            return Err(ForestError::DimensionMismatch {
                expected: self.feature_dim,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Majority vote over the trees; probabilities are vote fractions.
    pub fn predict(&self, x: &[f64]) -> Result<Prediction, ForestError> {
        self.check_dim(x)?;
        let mut votes = vec![0u32; self.n_classes];
        for t in &self.trees {
            votes[t.predict_class(x)] += 1;
        }
        let n = self.trees.len() as f64;
        let probabilities = votes.iter().map(|&v| v as f64 / n).collect();
        let label = argmax_u32(&votes);
        Ok(Prediction {
            label,
            class_name: self.class_names[label].clone(),
            probabilities,
            votes,
        })
    }

    /// Number of split nodes using each feature, across all trees.
    pub fn feature_usage(&self) -> Vec<usize> {
        let mut usage = vec![0; self.feature_dim];
        for t in &self.trees {
            for n in &t.nodes {
                if let Node::Split { feature, .. } = n {
                    usage[*feature] += 1;
                }
            }
        }
        usage
    }

    /// The `k` most used features as `(feature, count)`, most used first
    /// (lower index first on ties). Unused features are omitted.
    pub fn top_features(&self, k: usize) -> Vec<(usize, usize)> {
        let mut ranked: Vec<(usize, usize)> = self
            .feature_usage()
            .into_iter()
            .enumerate()
            .filter(|&(_, c)| c > 0)
            .collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        ranked.truncate(k);
        ranked
    }

    pub fn explain(&self, x: &[f64]) -> Result<Explanation, ForestError> {
        self.check_dim(x)?;
        let tree = &self.trees[0];
        let mut steps = Vec::new();
        let mut i = 0;
        let leaf = loop {
            match &tree.nodes[i] {
                Node::Leaf { counts } => break (i, counts.clone()),
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    let went_left = x[*feature] <= *threshold;
                    steps.push(PathStep {
                        node: i,
                        feature: *feature,
                        description: describe_feature(*feature),
                        threshold: *threshold,
                        value: x[*feature],
                        went_left,
                    });
                    i = if went_left { *left } else { *right };
                }
            }
        };
        let leaf_class = argmax_u32(&leaf.1);
        Ok(Explanation {
            steps,
            leaf: leaf.0,
            leaf_counts: leaf.1,
            leaf_class: self.class_names[leaf_class].clone(),
            feature_usage: self.top_features(usize::MAX),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&ModelDocument::from(self)).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ForestError> {
        let doc: ModelDocument = serde_json::from_str(text)?;
        doc.try_into()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathStep {
    pub node: usize,
    pub feature: usize,
    pub description: String,
    pub threshold: f64,
    pub value: f64,
    pub went_left: bool,
}

impl std::fmt::Display for PathStep {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let (op, side) = if self.went_left {
            ("\u{2264}", "left")
        } else {
            (">", "right")
        };
        write!(
            f,
            "{} = {:.4} {op} {:.4} \u{2192} {side}",
            self.description, self.value, self.threshold
        )
    }
}

/// Decision path through the first tree plus forest-wide feature usage.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Explanation {
    pub steps: Vec<PathStep>,
    pub leaf: usize,
    pub leaf_counts: Vec<u32>,
    pub leaf_class: String,
    /// `(feature, split count)` pairs, most used first.
    pub feature_usage: Vec<(usize, usize)>,
}

impl Explanation {
    /// Follows the recorded branch decisions through `tree` and returns the
    /// node reached, or `None` if the path does not fit the tree.
    pub fn replay(&self, tree: &DecisionTree) -> Option<usize> {
        let mut i = 0;
        for step in &self.steps {
            match tree.nodes.get(i)? {
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } if *feature == step.feature && *threshold == step.threshold => {
                    i = if step.went_left { *left } else { *right };
                }
                _ => return None,
            }
        }
        matches!(tree.nodes.get(i)?, Node::Leaf { .. }).then_some(i)
    }

    pub fn render(&self, top: usize) -> String {
        let mut out = String::from("decision path (tree 0):\n");
        for (k, s) in self.steps.iter().enumerate() {
            out.push_str(&format!("  {}. {s}\n", k + 1));
        }
        out.push_str(&format!(
            "  leaf {} -> {} (counts {:?})\n",
            self.leaf, self.leaf_class, self.leaf_counts
        ));
        out.push_str("most used split features:\n");
        for (f, c) in self.feature_usage.iter().take(top) {
            out.push_str(&format!("  {:<28} {c}\n", describe_feature(*f)));
        }
        out
    }
}

fn argmax_u32(v: &[u32]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

/// On-disk JSON layout of a [`ForestModel`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub format: String,
    pub version: u32,
    pub n_classes: usize,
    pub class_names: Vec<String>,
    pub feature_dim: usize,
    pub train_seed: u64,
    pub hyperparams: ForestParams,
    pub trees: Vec<TreeDocument>,
}

/// Parallel node arrays. Leaves have `feature = -1` and child links `-1`;
/// split nodes have empty `counts`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeDocument {
    pub feature: Vec<i64>,
    pub threshold: Vec<f64>,
    pub left: Vec<i64>,
    pub right: Vec<i64>,
    pub counts: Vec<Vec<u32>>,
}

impl From<&ForestModel> for ModelDocument {
    fn from(m: &ForestModel) -> Self {
        let trees = m
            .trees
            .iter()
            .map(|t| {
                let mut d = TreeDocument {
                    feature: Vec::with_capacity(t.nodes.len()),
                    threshold: Vec::with_capacity(t.nodes.len()),
                    left: Vec::with_capacity(t.nodes.len()),
                    right: Vec::with_capacity(t.nodes.len()),
                    counts: Vec::with_capacity(t.nodes.len()),
                };
                for n in &t.nodes {
                    match n {
                        Node::Split {
                            feature,
                            threshold,
                            left,
                            right,
                        } => {
                            d.feature.push(*feature as i64);
                            d.threshold.push(*threshold);
                            d.left.push(*left as i64);
                            d.right.push(*right as i64);
                            d.counts.push(Vec::new());
                        }
                        Node::Leaf { counts } => {
                            d.feature.push(-1);
                            d.threshold.push(0.0);
                            d.left.push(-1);
                            d.right.push(-1);
                            d.counts.push(counts.clone());
                        }
                    }
                }
                d
            })
            .collect();
        ModelDocument {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            n_classes: m.n_classes,
            class_names: m.class_names.clone(),
            feature_dim: m.feature_dim,
            train_seed: m.train_seed,
            hyperparams: m.params.clone(),
            trees,
        }
    }
}

impl TryFrom<ModelDocument> for ForestModel {
    type Error = ForestError;

    fn try_from(doc: ModelDocument) -> Result<Self, ForestError> {
        let bad = |m: String| Err(ForestError::Model(m));
        if doc.format != MODEL_FORMAT {
            return bad(format!("unexpected format {:?}", doc.format));
        }
        if doc.version != MODEL_VERSION {
            return bad(format!("unsupported version {}", doc.version));
        }
        if doc.class_names.len() != doc.n_classes || doc.n_classes == 0 {
            return bad("class_names does not match n_classes".into());
        }
        if doc.trees.is_empty() {
            return bad("model has no trees".into());
        }
        let mut trees = Vec::with_capacity(doc.trees.len());
        for (ti, t) in doc.trees.into_iter().enumerate() {
            let n = t.feature.len();
            if n == 0 || [t.threshold.len(), t.left.len(), t.right.len(), t.counts.len()] != [n; 4] {
                return bad(format!("tree {ti}: node arrays have different lengths"));
            }
            let mut nodes = Vec::with_capacity(n);
            for i in 0..n {
                if t.feature[i] < 0 {
                    if t.counts[i].len() != doc.n_classes {
                        return bad(format!("tree {ti} node {i}: leaf histogram has wrong length"));
                    }
                    nodes.push(Node::Leaf {
                        counts: t.counts[i].clone(),
                    });
                } else {
                    let (f, l, r) = (t.feature[i] as usize, t.left[i], t.right[i]);
                    // children after the parent keeps the tree acyclic
                    let child_ok = |c: i64| c > i as i64 && (c as usize) < n;
                    if f >= doc.feature_dim || !child_ok(l) || !child_ok(r) {
                        return bad(format!("tree {ti} node {i}: bad feature or child index"));
                    }
                    nodes.push(Node::Split {
                        feature: f,
                        threshold: t.threshold[i],
                        left: l as usize,
                        right: r as usize,
                    });
                }
            }
            trees.push(DecisionTree { nodes });
        }
        Ok(ForestModel {
            trees,
            n_classes: doc.n_classes,
            class_names: doc.class_names,
            feature_dim: doc.feature_dim,
            train_seed: doc.train_seed,
            params: doc.hyperparams,
        })
    }
}
