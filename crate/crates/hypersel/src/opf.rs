//! Supervised Optimum-Path Forest classifier: the wrapper's fitness signal.
//!
//! Training finds prototypes on the class boundaries of the training set's
//! minimum spanning tree, then lets prototypes compete for the remaining
//! samples under the f_max path cost (the largest edge weight along the
//! path). Classification assigns a query the label of the node minimizing
//! max(cost(node), distance(node, query)).
//!
//! Distances are squared Euclidean throughout: f_max only ever compares
//! edge weights, and squaring preserves every comparison. All ties (MST
//! ordering, conquest ordering, classification argmin) resolve to the
//! lowest node index, so results do not depend on incidental float noise.

use crate::error::{Error, Result};
use crate::mapping::FeatureMask;

/// Trained optimum-path forest over one training partition and mask.
#[derive(Clone, Debug)]
pub struct OpfModel {
    features: Vec<Vec<f64>>,
    mask: FeatureMask,
    labels: Vec<usize>,
    costs: Vec<f64>,
    predecessors: Vec<Option<usize>>,
    ordered: Vec<usize>,
}

fn sqdist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn project(sample: &[f64], mask: &FeatureMask) -> Vec<f64> {
    sample
        .iter()
        .zip(mask)
        .filter_map(|(&v, &keep)| keep.then_some(v))
        .collect()
}

fn check_shapes(x: &[Vec<f64>], y: &[usize], mask: &FeatureMask) -> Result<()> {
    if x.is_empty() {
        return Err(Error::EmptyDataset("training partition".into()));
    }
    if x.len() != y.len() {
        return Err(Error::BadPairedSample { left: x.len(), right: y.len() });
    }
    for row in x {
        if row.len() != mask.len() {
            return Err(Error::SampleWidth { got: row.len(), want: mask.len() });
        }
    }
    let first = y[0];
    if y.iter().all(|&l| l == first) {
        return Err(Error::SingleClass);
    }
    Ok(())
}

/// Indices of the MST boundary nodes: both endpoints of every tree edge
/// whose endpoints disagree on the label. Prim's algorithm from node 0;
/// candidate selection and key updates use strict comparison, so equal
/// weights resolve to the lowest index and the earliest-seen parent.
pub fn find_prototypes(x: &[Vec<f64>], y: &[usize], mask: &FeatureMask) -> Result<Vec<usize>> {
    check_shapes(x, y, mask)?;
    let proj: Vec<Vec<f64>> = x.iter().map(|r| project(r, mask)).collect();
    let n = proj.len();
    let mut key = vec![f64::INFINITY; n];
    let mut parent = vec![usize::MAX; n];
    let mut in_tree = vec![false; n];
    let mut prototype = vec![false; n];
    key[0] = 0.0;
    for _ in 0..n {
        let mut u = usize::MAX;
        let mut best = f64::INFINITY;
        for (v, &k) in key.iter().enumerate() {
            if !in_tree[v] && k < best {
                best = k;
                u = v;
            }
        }
        in_tree[u] = true;
        if parent[u] != usize::MAX && y[u] != y[parent[u]] {
            prototype[u] = true;
            prototype[parent[u]] = true;
        }
        for v in 0..n {
            if !in_tree[v] {
                let w = sqdist(&proj[u], &proj[v]);
                if w < key[v] {
                    key[v] = w;
                    parent[v] = u;
                }
            }
        }
    }
    Ok((0..n).filter(|&v| prototype[v]).collect())
}

/// Trains the forest: prototypes start at cost 0, every other node at
/// infinity, and a Dijkstra-style competition conquers nodes in cost order
/// under c = max(cost(u), w(u, v)), propagating the conqueror's label.
pub fn train(x: &[Vec<f64>], y: &[usize], mask: &FeatureMask) -> Result<OpfModel> {
    let prototypes = find_prototypes(x, y, mask)?;
    let proj: Vec<Vec<f64>> = x.iter().map(|r| project(r, mask)).collect();
    let n = proj.len();
    let mut costs = vec![f64::INFINITY; n];
    let mut labels = y.to_vec();
    let mut predecessors: Vec<Option<usize>> = vec![None; n];
    let mut done = vec![false; n];
    let mut ordered = Vec::with_capacity(n);
    for &p in &prototypes {
        costs[p] = 0.0;
    }
    for _ in 0..n {
        let mut u = usize::MAX;
        let mut best = f64::INFINITY;
        for (v, &c) in costs.iter().enumerate() {
            if !done[v] && c < best {
                best = c;
                u = v;
            }
        }
        done[u] = true;
        ordered.push(u);
        for v in 0..n {
            if !done[v] {
                let c = costs[u].max(sqdist(&proj[u], &proj[v]));
                if c < costs[v] {
                    costs[v] = c;
                    labels[v] = labels[u];
                    predecessors[v] = Some(u);
                }
            }
        }
    }
    let model = OpfModel {
        features: proj,
        mask: mask.clone(),
        labels,
        costs,
        predecessors,
        ordered,
    };
    debug_assert!(model.verify_invariants());
    Ok(model)
}

impl OpfModel {
    /// Path-cost converged and ordering sound: prototypes sit at cost 0
    /// with no predecessor, every conquered node satisfies
    /// cost(v) == max(cost(pred), w(pred, v)), and `ordered` is
    /// non-decreasing in cost.
    pub fn verify_invariants(&self) -> bool {
        let ordered_ok = self
            .ordered
            .windows(2)
            .all(|w| self.costs[w[0]] <= self.costs[w[1]]);
        let converged = (0..self.features.len()).all(|v| match self.predecessors[v] {
            None => self.costs[v] == 0.0,
            Some(u) => {
                let w = sqdist(&self.features[u], &self.features[v]);
                self.costs[v] == self.costs[u].max(w)
            }
        });
        ordered_ok && converged && self.costs.iter().all(|c| c.is_finite())
    }

    /// Label of the node minimizing max(cost, distance to the query). Nodes
    /// are scanned in cost order; once the best value seen is <= the next
    /// node's cost no later node can win, because its value is at least its
    /// cost. Ties keep the earliest node in scan order.
    pub fn classify(&self, sample: &[f64]) -> Result<usize> {
        if sample.len() != self.mask.len() {
            return Err(Error::SampleWidth { got: sample.len(), want: self.mask.len() });
        }
        let q = project(sample, &self.mask);
        let mut best = f64::INFINITY;
        let mut label = self.labels[self.ordered[0]];
        for &node in &self.ordered {
            let c = self.costs[node];
            if best <= c {
                break;
            }
            let v = c.max(sqdist(&self.features[node], &q));
            if v < best {
                best = v;
                label = self.labels[node];
            }
        }
        Ok(label)
    }

    pub fn classify_batch(&self, samples: &[Vec<f64>]) -> Result<Vec<usize>> {
        samples.iter().map(|s| self.classify(s)).collect()
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn ordered_nodes(&self) -> &[usize] {
        &self.ordered
    }

    pub fn predecessors(&self) -> &[Option<usize>] {
        &self.predecessors
    }

    pub fn n_nodes(&self) -> usize {
        self.features.len()
    }
}

/// Balanced accuracy: 1 - sum over present classes of (false-positive
/// rate + false-negative rate) / (2 * number of present classes).
/// Reduces to plain accuracy on balanced sets with symmetric errors.
pub fn balanced_accuracy(y_true: &[usize], y_pred: &[usize]) -> Result<f64> {
    if y_true.is_empty() {
        return Err(Error::EmptyTestSet);
    }
    if y_true.len() != y_pred.len() {
        return Err(Error::BadPairedSample { left: y_true.len(), right: y_pred.len() });
    }
    let n = y_true.len();
    let mut classes: Vec<usize> = y_true.to_vec();
    classes.sort_unstable();
    classes.dedup();
    let mut err = 0.0;
    for &c in &classes {
        let nc = y_true.iter().filter(|&&t| t == c).count();
        let fn_ = y_true
            .iter()
            .zip(y_pred)
            .filter(|(&t, &p)| t == c && p != c)
            .count();
        let fp = y_true
            .iter()
            .zip(y_pred)
            .filter(|(&t, &p)| t != c && p == c)
            .count();
        let e1 = if n > nc { fp as f64 / (n - nc) as f64 } else { 0.0 };
        let e2 = fn_ as f64 / nc as f64;
        err += e1 + e2;
    }
    Ok(1.0 - err / (2.0 * classes.len() as f64))
}

/// Fraction of exact label matches.
pub fn plain_accuracy(y_true: &[usize], y_pred: &[usize]) -> Result<f64> {
    if y_true.is_empty() {
        return Err(Error::EmptyTestSet);
    }
    if y_true.len() != y_pred.len() {
        return Err(Error::BadPairedSample { left: y_true.len(), right: y_pred.len() });
    }
    let hits = y_true.iter().zip(y_pred).filter(|(t, p)| t == p).count();
    Ok(hits as f64 / y_true.len() as f64)
}
