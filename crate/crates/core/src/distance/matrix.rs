//! Pairwise distance matrices.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::exact::{exact_prepared, ExactConfig, PreparedSample};
use super::truncated::{emp_distance_truncated, TruncationSchedule};
use crate::error::{Error, Result};
use crate::partition::Sample;
use crate::scalar::Scalar;

/// Which estimator fills a matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Estimator {
    Exact(ExactConfig),
    Truncated(TruncationSchedule),
}

impl Default for Estimator {
    fn default() -> Self {
        Estimator::Exact(ExactConfig::default())
    }
}

/// Read access to pairwise distances between `len()` samples.
pub trait PairwiseDistances<T> {
    fn len(&self) -> usize;

    fn distance(&self, i: usize, j: usize) -> T;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Symmetric `N × N` matrix of pairwise distances.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix<T> {
    n: usize,
    entries: Vec<T>,
    estimator: Option<Estimator>,
    unit_interval: bool,
}

impl<T: Scalar> DistanceMatrix<T> {
    /// Builds a matrix from explicit rows, e.g. precomputed distances.
    ///
    /// Rows must form a square symmetric matrix of finite nonnegative
    /// entries with a zero diagonal.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::invalid("rows", "matrix must have at least one row"));
        }
        let mut entries = Vec::with_capacity(n * n);
        for row in &rows {
            if row.len() != n {
                return Err(Error::invalid("rows", "matrix is not square"));
            }
            entries.extend_from_slice(row);
        }
        for i in 0..n {
            if entries[i * n + i] != T::zero() {
                return Err(Error::invalid(
                    "rows",
                    format!("diagonal entry {i} is not zero"),
                ));
            }
            for j in 0..n {
                let v = entries[i * n + j];
                if !v.is_finite() || v < T::zero() {
                    return Err(Error::invalid(
                        "rows",
                        format!("entry ({i}, {j}) is not a distance"),
                    ));
                }
                if v != entries[j * n + i] {
                    return Err(Error::invalid(
                        "rows",
                        format!("entry ({i}, {j}) breaks symmetry"),
                    ));
                }
            }
        }
        Ok(Self {
            n,
            entries,
            estimator: None,
            unit_interval: true,
        })
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    /// Estimator that produced the entries; `None` for user-supplied rows.
    pub fn estimator(&self) -> Option<&Estimator> {
        self.estimator.as_ref()
    }

    /// True when every input sample was `[0,1]`-valued.
    pub fn data_in_unit_interval(&self) -> bool {
        self.unit_interval
    }

    /// Largest entry.
    pub fn max_entry(&self) -> T {
        self.entries.iter().copied().fold(T::zero(), T::max)
    }

    /// Every entry multiplied by `factor`, which must be positive.
    pub fn scaled(&self, factor: T) -> Result<Self> {
        if !(factor > T::zero()) || !factor.is_finite() {
            return Err(Error::invalid("factor", "must be positive and finite"));
        }
        Ok(Self {
            entries: self.entries.iter().map(|&v| v * factor).collect(),
            ..self.clone()
        })
    }
}

impl<T: Scalar> PairwiseDistances<T> for DistanceMatrix<T> {
    fn len(&self) -> usize {
        self.n
    }

    fn distance(&self, i: usize, j: usize) -> T {
        self.get(i, j)
    }
}

/// Evaluates all `N(N−1)/2` pairs; pairs run in parallel and the result is
/// identical to a sequential evaluation.
pub fn distance_matrix<T: Scalar>(
    samples: &[Sample<T>],
    estimator: &Estimator,
) -> Result<DistanceMatrix<T>> {
    let n = samples.len();
    if n == 0 {
        return Err(Error::invalid("samples", "need at least one sample"));
    }
    match estimator {
        Estimator::Exact(cfg) => cfg.validate()?,
        Estimator::Truncated(sched) => sched.validate()?,
    }
    if let Some(i) = samples.iter().position(Sample::is_empty) {
        return Err(Error::Pair {
            i,
            j: i,
            source: Box::new(Error::EmptySample),
        });
    }
    let prepared: Vec<PreparedSample<'_, T>> = match estimator {
        Estimator::Exact(_) => samples.par_iter().map(PreparedSample::new).collect(),
        Estimator::Truncated(_) => Vec::new(),
    };
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let values: Vec<Result<T>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let r = match estimator {
                Estimator::Exact(cfg) => {
                    exact_prepared(&prepared[i], &prepared[j], cfg).map(|d| d.total)
                }
                Estimator::Truncated(sched) => {
                    emp_distance_truncated(&samples[i], &samples[j], sched)
                }
            };
            r.map_err(|e| Error::Pair {
                i,
                j,
                source: Box::new(e),
            })
        })
        .collect();
    let mut entries = vec![T::zero(); n * n];
    for (&(i, j), v) in pairs.iter().zip(values) {
        let v = v?;
        entries[i * n + j] = v;
        entries[j * n + i] = v;
    }
    Ok(DistanceMatrix {
        n,
        entries,
        estimator: Some(*estimator),
        unit_interval: samples.iter().all(Sample::in_unit_interval),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::emp_distance_exact;

    fn s(v: &[f64]) -> Sample<f64> {
        Sample::new(v.to_vec()).unwrap()
    }

    #[test]
    fn single_sample_is_zero_matrix() {
        let dm = distance_matrix(&[s(&[0.1, 0.2])], &Estimator::default()).unwrap();
        assert_eq!(dm.len(), 1);
        assert_eq!(dm.get(0, 0), 0.0);
    }

    #[test]
    fn duplicates_have_zero_distance() {
        let a = s(&[0.1, 0.5, 0.9]);
        let b = s(&[0.7, 0.2]);
        let dm = distance_matrix(&[a.clone(), b, a], &Estimator::default()).unwrap();
        assert_eq!(dm.get(0, 2), 0.0);
        assert!(dm.get(0, 1) > 0.0);
    }

    #[test]
    fn matches_independent_pair_calls() {
        let xs = vec![
            s(&[0.1, 0.5, 0.9, 0.3]),
            s(&[0.7, 0.2, 0.2]),
            s(&[0.33, 0.1, 0.95, 0.6, 0.6]),
        ];
        let dm = distance_matrix(&xs, &Estimator::default()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j {
                    0.0
                } else {
                    emp_distance_exact(&xs[i], &xs[j]).unwrap()
                };
                assert_eq!(dm.get(i, j), expected);
            }
        }
        assert!(dm.data_in_unit_interval());
    }

    #[test]
    fn pair_errors_carry_identity() {
        let err = distance_matrix(&[s(&[0.1]), s(&[])], &Estimator::default()).unwrap_err();
        assert!(matches!(err, Error::Pair { i: 1, .. }));
    }

    #[test]
    fn from_rows_validates() {
        assert!(DistanceMatrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).is_ok());
        assert!(DistanceMatrix::from_rows(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        assert!(DistanceMatrix::from_rows(vec![vec![1.0]]).is_err());
        assert!(DistanceMatrix::<f64>::from_rows(vec![]).is_err());
    }
}
