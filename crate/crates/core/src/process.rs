//! Seeded generators of stationary ergodic processes and labelled datasets.
//!
//! Randomness comes from ChaCha8 (`rand_chacha`), which is portable and
//! reproducible across platforms. Seeds are split with [`derive_seed`]:
//! the 64-bit word at position `index` of ChaCha8 stream `stream` keyed by
//! the master seed. Every generated sample owns one generator.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clustering::Clustering;
use crate::error::{Error, Result};
use crate::partition::Sample;
use crate::scalar::Scalar;

/// Process law. All emitted values lie in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProcessKind {
    /// i.i.d. uniform on `[0, 1)`.
    IidUniform,
    /// i.i.d. two-level: `high` with probability `p`, else `low`.
    IidBernoulli { p: f64, low: f64, high: f64 },
    /// Two-state Markov chain started from its stationary law; `p01` is
    /// the probability of moving from state 0 to 1, `p10` the reverse.
    Markov2 {
        p01: f64,
        p10: f64,
        emit0: f64,
        emit1: f64,
    },
    /// Finite hidden Markov chain started from its stationary law; state `s`
    /// emits uniformly on `[means[s] − widths[s]/2, means[s] + widths[s]/2]`.
    Hmm {
        transition: Vec<Vec<f64>>,
        means: Vec<f64>,
        widths: Vec<f64>,
    },
    /// Irrational rotation `X_t = frac(U_0 + t·alpha)`; `U_0` is uniform
    /// from the seed unless `phase` fixes it.
    Rotation {
        alpha: f64,
        #[serde(default)]
        phase: Option<f64>,
    },
}

/// A process law together with the seed of its single realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessSpec {
    #[serde(flatten)]
    pub kind: ProcessKind,
    pub seed: u64,
}

fn probability(name: &'static str, p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid(name, format!("{p} is not in (0, 1)")));
    }
    Ok(())
}

fn unit_value(name: &'static str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::invalid(name, format!("{v} is not in [0, 1]")));
    }
    Ok(())
}

impl ProcessKind {
    pub fn validate(&self) -> Result<()> {
        match self {
            ProcessKind::IidUniform => Ok(()),
            ProcessKind::IidBernoulli { p, low, high } => {
                probability("p", *p)?;
                unit_value("low", *low)?;
                unit_value("high", *high)
            }
            ProcessKind::Markov2 {
                p01,
                p10,
                emit0,
                emit1,
            } => {
                probability("p01", *p01)?;
                probability("p10", *p10)?;
                unit_value("emit0", *emit0)?;
                unit_value("emit1", *emit1)
            }
            ProcessKind::Hmm {
                transition,
                means,
                widths,
            } => {
                let k = transition.len();
                if k == 0 || means.len() != k || widths.len() != k {
                    return Err(Error::invalid(
                        "transition",
                        "need a nonempty square matrix with one mean and width per state",
                    ));
                }
                for row in transition {
                    if row.len() != k || row.iter().any(|p| !(0.0..=1.0).contains(p)) {
                        return Err(Error::invalid(
                            "transition",
                            "rows must be probability vectors",
                        ));
                    }
                    if (row.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                        return Err(Error::invalid("transition", "rows must sum to 1"));
                    }
                }
                for (&mu, &w) in means.iter().zip(widths) {
                    if !(w >= 0.0) {
                        return Err(Error::invalid("widths", "must be nonnegative"));
                    }
                    unit_value("means - widths/2", mu - w / 2.0)?;
                    unit_value("means + widths/2", mu + w / 2.0)?;
                }
                stationary_law(transition).map(|_| ())
            }
            ProcessKind::Rotation { alpha, phase } => {
                probability("alpha", *alpha)?;
                if let Some(u) = phase {
                    if !(0.0..1.0).contains(u) {
                        return Err(Error::invalid("phase", "must lie in [0, 1)"));
                    }
                }
                Ok(())
            }
        }
    }

    /// Draws `n` consecutive observations from `rng`.
    fn realize(&self, rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        match self {
            ProcessKind::IidUniform => (0..n).map(|_| rng.random::<f64>()).collect(),
            ProcessKind::IidBernoulli { p, low, high } => (0..n)
                .map(|_| if rng.random_bool(*p) { *high } else { *low })
                .collect(),
            ProcessKind::Markov2 {
                p01,
                p10,
                emit0,
                emit1,
            } => {
                let pi1 = p01 / (p01 + p10);
                let mut state = rng.random_bool(pi1);
                let mut out = Vec::with_capacity(n);
                for _ in 0..n {
                    out.push(if state { *emit1 } else { *emit0 });
                    state = if state {
                        !rng.random_bool(*p10)
                    } else {
                        rng.random_bool(*p01)
                    };
                }
                out
            }
            ProcessKind::Hmm {
                transition,
                means,
                widths,
            } => {
                let pi = stationary_law(transition).expect("validated");
                let mut state = draw_index(rng, &pi);
                let mut out = Vec::with_capacity(n);
                for _ in 0..n {
                    let u: f64 = rng.random();
                    let v = means[state] + widths[state] * (u - 0.5);
                    out.push(v.clamp(0.0, 1.0));
                    state = draw_index(rng, &transition[state]);
                }
                out
            }
            ProcessKind::Rotation { alpha, phase } => {
                let mut x = phase.unwrap_or_else(|| rng.random::<f64>());
                let mut out = Vec::with_capacity(n);
                for _ in 0..n {
                    x += alpha;
                    if x >= 1.0 {
                        x -= 1.0;
                    }
                    out.push(x);
                }
                out
            }
        }
    }
}

fn draw_index(rng: &mut ChaCha8Rng, probs: &[f64]) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

/// Stationary distribution of a finite chain: solves `π P = π`, `Σ π = 1`.
pub fn stationary_law(transition: &[Vec<f64>]) -> Result<Vec<f64>> {
    let k = transition.len();
    // Rows 0..k-1 of (Pᵀ − I) π = 0, last row replaced by Σ π = 1.
    let mut a = vec![vec![0.0; k + 1]; k];
    for (i, row) in a.iter_mut().enumerate() {
        if i + 1 == k {
            row.iter_mut().for_each(|v| *v = 1.0);
        } else {
            for j in 0..k {
                row[j] = transition[j][i] - if i == j { 1.0 } else { 0.0 };
            }
        }
    }
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        if a[pivot][col].abs() < 1e-12 {
            return Err(Error::invalid(
                "transition",
                "chain has no unique stationary law",
            ));
        }
        a.swap(col, pivot);
        for r in 0..k {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..=k {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    Ok((0..k).map(|i| (a[i][k] / a[i][i]).max(0.0)).collect())
}

/// Documented seed-splitting rule: word `index` of ChaCha8 stream `stream`
/// under key `master`.
pub fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(stream);
    rng.set_word_pos(u128::from(index) * 2);
    rng.next_u64()
}

/// One realization of length `n`; identical for identical `(spec, n)`.
pub fn generate<T: Scalar>(spec: &ProcessSpec, n: usize) -> Result<Sample<T>> {
    if n == 0 {
        return Err(Error::invalid("n", "must be at least 1"));
    }
    spec.kind.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    to_sample(spec.kind.realize(&mut rng, n))
}

fn to_sample<T: Scalar>(values: Vec<f64>) -> Result<Sample<T>> {
    Sample::new(values.into_iter().map(T::lit).collect())
}

/// How samples of the same cluster relate to each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum Coupling {
    /// Every sample is its own realization.
    #[default]
    Independent,
    /// Sample `j` of a cluster is the window starting `j·lag` steps into one
    /// shared realization of the cluster's process.
    ShiftedCopies { lag: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSpec {
    pub process: ProcessKind,
    pub count: usize,
}

/// Cluster layout plus coupling. Different clusters always use independent
/// streams.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingSpec {
    #[serde(flatten)]
    pub coupling: Coupling,
    pub clusters: Vec<ClusterSpec>,
}

impl CouplingSpec {
    pub fn validate(&self) -> Result<()> {
        if self.clusters.is_empty() || self.clusters.iter().any(|c| c.count == 0) {
            return Err(Error::invalid(
                "clusters",
                "need at least one cluster, each with count >= 1",
            ));
        }
        for c in &self.clusters {
            c.process.validate()?;
        }
        Ok(())
    }

    pub fn num_samples(&self) -> usize {
        self.clusters.iter().map(|c| c.count).sum()
    }

    /// Ground-truth partition: samples are laid out cluster by cluster.
    pub fn target(&self) -> Clustering {
        let labels: Vec<usize> = self
            .clusters
            .iter()
            .enumerate()
            .flat_map(|(c, spec)| std::iter::repeat_n(c, spec.count))
            .collect();
        Clustering::from_labels(&labels)
    }
}

/// Samples together with the partition that generated them.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    pub samples: Vec<Sample<T>>,
    pub target: Clustering,
}

const INDEPENDENT_STREAM: u64 = 0;
const SHARED_STREAM: u64 = 1;

/// Generates `N` samples of length `n`.
///
/// Seeds: independent sample `i` (global index) uses
/// `derive_seed(master_seed, 0, i)`; the shared realization of cluster `c`
/// uses `derive_seed(master_seed, 1, c)`.
pub fn generate_dataset<T: Scalar>(
    coupling: &CouplingSpec,
    n: usize,
    master_seed: u64,
) -> Result<Dataset<T>> {
    coupling.validate()?;
    if n == 0 {
        return Err(Error::invalid("n", "must be at least 1"));
    }
    let mut samples = Vec::with_capacity(coupling.num_samples());
    let mut global = 0u64;
    for (c, cluster) in coupling.clusters.iter().enumerate() {
        match coupling.coupling {
            Coupling::Independent => {
                for _ in 0..cluster.count {
                    let seed = derive_seed(master_seed, INDEPENDENT_STREAM, global);
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    samples.push(to_sample(cluster.process.realize(&mut rng, n))?);
                    global += 1;
                }
            }
            Coupling::ShiftedCopies { lag } => {
                let seed = derive_seed(master_seed, SHARED_STREAM, c as u64);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let total = n + lag * (cluster.count - 1);
                let path = cluster.process.realize(&mut rng, total);
                for j in 0..cluster.count {
                    let start = j * lag;
                    samples.push(to_sample(path[start..start + n].to_vec())?);
                }
                global += cluster.count as u64;
            }
        }
    }
    Ok(Dataset {
        samples,
        target: coupling.target(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::partition_equal;

    fn markov(p01: f64, p10: f64) -> ProcessKind {
        ProcessKind::Markov2 {
            p01,
            p10,
            emit0: 0.0,
            emit1: 1.0,
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let spec = ProcessSpec {
            kind: markov(0.3, 0.6),
            seed: 11,
        };
        let a: Sample<f64> = generate(&spec, 500).unwrap();
        let b: Sample<f64> = generate(&spec, 500).unwrap();
        assert_eq!(a, b);
        let other: Sample<f64> = generate(&ProcessSpec { seed: 12, ..spec }, 500).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn rotation_first_value() {
        let spec = ProcessSpec {
            kind: ProcessKind::Rotation {
                alpha: (5f64.sqrt() - 1.0) / 2.0,
                phase: Some(0.0),
            },
            seed: 0,
        };
        let x: Sample<f64> = generate(&spec, 3).unwrap();
        assert!((x.values()[0] - 0.618_033_988_7).abs() < 1e-10);
        assert!((x.values()[1] - 0.236_067_977_5).abs() < 1e-10);
    }

    #[test]
    fn symmetric_markov_is_balanced() {
        let spec = ProcessSpec {
            kind: markov(0.3, 0.3),
            seed: 5,
        };
        let x: Sample<f64> = generate(&spec, 100_000).unwrap();
        let ones = x.values().iter().filter(|&&v| v == 1.0).count() as f64 / 1e5;
        assert!((ones - 0.5).abs() < 0.01, "{ones}");
    }

    #[test]
    fn markov_matches_stationary_law() {
        let spec = ProcessSpec {
            kind: markov(0.3, 0.6),
            seed: 99,
        };
        let x: Sample<f64> = generate(&spec, 100_000).unwrap();
        let zeros = x.values().iter().filter(|&&v| v == 0.0).count() as f64 / 1e5;
        assert!((zeros - 2.0 / 3.0).abs() < 0.01, "{zeros}");
    }

    #[test]
    fn hmm_generates_in_range() {
        let kind = ProcessKind::Hmm {
            transition: vec![vec![0.9, 0.1], vec![0.2, 0.8]],
            means: vec![0.25, 0.75],
            widths: vec![0.2, 0.4],
        };
        let x: Sample<f64> = generate(&ProcessSpec { kind, seed: 3 }, 10_000).unwrap();
        assert!(x.in_unit_interval());
        let low = x.values().iter().filter(|&&v| v < 0.5).count() as f64 / 1e4;
        // Stationary law is (2/3, 1/3).
        assert!((low - 2.0 / 3.0).abs() < 0.03, "{low}");
    }

    #[test]
    fn stationary_law_solves_balance() {
        let p = vec![
            vec![0.5, 0.5, 0.0],
            vec![0.1, 0.6, 0.3],
            vec![0.2, 0.0, 0.8],
        ];
        let pi = stationary_law(&p).unwrap();
        for j in 0..3 {
            let flow: f64 = (0..3).map(|i| pi[i] * p[i][j]).sum();
            assert!((flow - pi[j]).abs() < 1e-12);
        }
        assert!((pi.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_parameters() {
        assert!(markov(0.0, 0.5).validate().is_err());
        assert!(markov(0.5, 1.0).validate().is_err());
        let bad_emit = ProcessKind::Markov2 {
            p01: 0.5,
            p10: 0.5,
            emit0: -0.1,
            emit1: 1.0,
        };
        assert!(bad_emit.validate().is_err());
        assert!(ProcessKind::Rotation {
            alpha: 1.5,
            phase: None
        }
        .validate()
        .is_err());
        let spec = ProcessSpec {
            kind: ProcessKind::IidUniform,
            seed: 0,
        };
        assert!(generate::<f64>(&spec, 0).is_err());
    }

    #[test]
    fn dataset_layout_and_target() {
        let coupling = CouplingSpec {
            coupling: Coupling::Independent,
            clusters: vec![
                ClusterSpec {
                    process: markov(0.2, 0.8),
                    count: 3,
                },
                ClusterSpec {
                    process: markov(0.8, 0.2),
                    count: 3,
                },
            ],
        };
        let ds: Dataset<f64> = generate_dataset(&coupling, 100, 7).unwrap();
        assert_eq!(ds.samples.len(), 6);
        let expected = Clustering::from_groups(&[vec![0, 1, 2], vec![3, 4, 5]]).unwrap();
        assert!(partition_equal(&ds.target, &expected).unwrap());
        assert_eq!(ds, generate_dataset(&coupling, 100, 7).unwrap());
        assert_ne!(ds.samples[0], ds.samples[1]);
    }

    #[test]
    fn shifted_copies_share_a_realization() {
        let coupling = CouplingSpec {
            coupling: Coupling::ShiftedCopies { lag: 1 },
            clusters: vec![ClusterSpec {
                process: ProcessKind::IidUniform,
                count: 2,
            }],
        };
        let ds: Dataset<f64> = generate_dataset(&coupling, 50, 1).unwrap();
        assert_eq!(&ds.samples[1].values()[..49], &ds.samples[0].values()[1..]);
    }

    #[test]
    fn single_singleton_cluster() {
        let coupling = CouplingSpec {
            coupling: Coupling::Independent,
            clusters: vec![ClusterSpec {
                process: ProcessKind::IidUniform,
                count: 1,
            }],
        };
        let ds: Dataset<f64> = generate_dataset(&coupling, 10, 1).unwrap();
        assert_eq!(ds.target.k(), 1);
        assert_eq!(ds.target.len(), 1);
        let empty = CouplingSpec {
            clusters: vec![],
            ..coupling
        };
        assert!(generate_dataset::<f64>(&empty, 10, 1).is_err());
    }

    #[test]
    fn derive_seed_is_stable_and_spread() {
        assert_eq!(derive_seed(1, 0, 0), derive_seed(1, 0, 0));
        assert_ne!(derive_seed(1, 0, 0), derive_seed(1, 0, 1));
        assert_ne!(derive_seed(1, 0, 0), derive_seed(1, 1, 0));
        assert_ne!(derive_seed(1, 0, 0), derive_seed(2, 0, 0));
    }
}
