//! Clustering from a matrix of pairwise sample distances.
//!
//! * [`cluster_known_k`]: farthest-point seeding followed by a single
//!   nearest-center assignment, for a known number of clusters.
//! * [`cluster_threshold`]: connected components of the graph joining
//!   samples closer than a threshold, for an unknown number of clusters.
//!
//! Sample indices and cluster labels are 0-based.

use crate::distance::{DistanceMatrix, Estimator, PairwiseDistances};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A partition of the sample indices `0..N` into `k` nonempty clusters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clustering {
    labels: Vec<usize>,
    k: usize,
    centers: Option<Vec<usize>>,
}

impl Clustering {
    /// Builds a clustering from arbitrary labels, renumbered densely in order
    /// of first appearance.
    pub fn from_labels<L: Eq + std::hash::Hash + Clone>(labels: &[L]) -> Self {
        let mut ids = std::collections::HashMap::new();
        let dense = labels
            .iter()
            .map(|l| {
                let next = ids.len();
                *ids.entry(l.clone()).or_insert(next)
            })
            .collect();
        Self {
            labels: dense,
            k: ids.len(),
            centers: None,
        }
    }

    /// Builds a clustering from explicit groups, which must partition `0..N`.
    pub fn from_groups(groups: &[Vec<usize>]) -> Result<Self> {
        let n: usize = groups.iter().map(Vec::len).sum();
        let mut labels = vec![usize::MAX; n];
        for (g, members) in groups.iter().enumerate() {
            if members.is_empty() {
                return Err(Error::invalid("groups", "empty cluster"));
            }
            for &i in members {
                if i >= n || labels[i] != usize::MAX {
                    return Err(Error::invalid(
                        "groups",
                        format!("index {i} is out of range or repeated"),
                    ));
                }
                labels[i] = g;
            }
        }
        Ok(Self::from_labels(&labels))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Number of nonempty clusters.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Seed indices, in seeding order; only set by [`cluster_known_k`].
    pub fn centers(&self) -> Option<&[usize]> {
        self.centers.as_deref()
    }

    /// Members of every cluster, ordered by label.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l].push(i);
        }
        out
    }

    /// True when both clusterings induce the same partition.
    pub fn same_partition(&self, other: &Clustering) -> Result<bool> {
        partition_equal(self, other)
    }
}

/// Label-invariant equality of two partitions of the same index set.
pub fn partition_equal(a: &Clustering, b: &Clustering) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::SizeMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.k != b.k {
        return Ok(false);
    }
    // A bijection between labels exists iff the label map is consistent both ways.
    let mut a_to_b = vec![usize::MAX; a.k];
    let mut b_to_a = vec![usize::MAX; b.k];
    for (&la, &lb) in a.labels.iter().zip(&b.labels) {
        if a_to_b[la] == usize::MAX && b_to_a[lb] == usize::MAX {
            a_to_b[la] = lb;
            b_to_a[lb] = la;
        } else if a_to_b[la] != lb || b_to_a[lb] != la {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Farthest-point seeding plus nearest-center assignment.
///
/// The first center is sample 0; each further center maximizes the distance
/// to its nearest chosen center. Ties go to the lowest index, and samples
/// that are already centers are never chosen again, so the result always
/// has exactly `k` clusters. Each center keeps its own label; every other
/// sample joins its nearest center (lowest label on ties).
///
/// Reads exactly `k·N` distances: one row per center.
pub fn cluster_known_k<T: Scalar, D: PairwiseDistances<T> + ?Sized>(
    dm: &D,
    k: usize,
) -> Result<Clustering> {
    let n = dm.len();
    if k < 1 || k > n {
        return Err(Error::invalid("k", format!("must be in 1..={n}, got {k}")));
    }
    let row = |c: usize| (0..n).map(|i| dm.distance(i, c)).collect::<Vec<T>>();

    let mut centers = vec![0usize];
    let mut is_center = vec![false; n];
    is_center[0] = true;
    let mut rows = vec![row(0)];
    let mut nearest = rows[0].clone();
    while centers.len() < k {
        let mut best: Option<(usize, T)> = None;
        for i in (0..n).filter(|&i| !is_center[i]) {
            if best.is_none_or(|(_, d)| nearest[i] > d) {
                best = Some((i, nearest[i]));
            }
        }
        let (c, _) = best.expect("k <= n leaves a non-center candidate");
        centers.push(c);
        is_center[c] = true;
        let r = row(c);
        for (near, &d) in nearest.iter_mut().zip(&r) {
            if d < *near {
                *near = d;
            }
        }
        rows.push(r);
    }

    let mut labels = vec![0usize; n];
    for (label, &c) in centers.iter().enumerate() {
        labels[c] = label;
    }
    for i in (0..n).filter(|&i| !is_center[i]) {
        let mut best = 0usize;
        for j in 1..k {
            if rows[j][i] < rows[best][i] {
                best = j;
            }
        }
        labels[i] = best;
    }
    Ok(Clustering {
        labels,
        k,
        centers: Some(centers),
    })
}

/// Connected components of the graph with an edge `(i, j)` iff
/// `dm(i, j) < delta`, for a precomputed [`DistanceMatrix`].
///
/// Logs a warning when the matrix was not built with the truncated
/// estimator on `[0,1]`-valued samples, the setting the threshold
/// schedules are designed for.
pub fn cluster_threshold<T: Scalar>(dm: &DistanceMatrix<T>, delta: T) -> Result<Clustering> {
    if !matches!(dm.estimator(), Some(Estimator::Truncated(_)) | None) {
        log::warn!("threshold clustering on a matrix not built with the truncated estimator");
    }
    if !dm.data_in_unit_interval() {
        log::warn!("threshold clustering on samples with values outside [0,1]");
    }
    threshold_components(dm, delta)
}

/// [`cluster_threshold`] over any distance source, without diagnostics.
pub fn threshold_components<T: Scalar, D: PairwiseDistances<T> + ?Sized>(
    dm: &D,
    delta: T,
) -> Result<Clustering> {
    if !(delta > T::zero()) || !delta.is_finite() {
        return Err(Error::invalid("delta", "must be positive and finite"));
    }
    let n = dm.len();
    let mut sets = DisjointSet::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if dm.distance(i, j) < delta {
                sets.union(i, j);
            }
        }
    }
    let roots: Vec<usize> = (0..n).map(|i| sets.find(i)).collect();
    Ok(Clustering::from_labels(&roots))
}

struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Keep the smaller index as root.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}
