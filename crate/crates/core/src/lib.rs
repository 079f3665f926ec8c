//! Clustering of time-series samples by the stationary ergodic process that
//! generated them.
//!
//! Samples are compared with the empirical distributional distance: a
//! weighted sum, over tuple dimensions `m` and cube partitions of
//! decreasing side, of the L1 difference between sliding-window cell
//! frequencies. On top of it sit two clustering procedures:
//!
//! * [`cluster_known_k`] for a known number of clusters (farthest-point
//!   seeding and one nearest-center pass);
//! * [`cluster_threshold`] for an unknown number of clusters, with
//!   thresholds and error bounds from [`bounds`] under known α-mixing rates.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! `*64` aliases fix the common `f64` case.
//!
//! ```
//! use ergoclust::{emp_distance_exact, Sample64};
//!
//! let a = Sample64::new(vec![0.25, 0.25]).unwrap();
//! let b = Sample64::new(vec![0.75, 0.75]).unwrap();
//! assert!((emp_distance_exact(&a, &b).unwrap() - 1.5).abs() < 1e-12);
//! ```

pub mod bounds;
pub mod clustering;
pub mod distance;
mod error;
pub mod partition;
pub mod process;
mod scalar;

pub use bounds::{
    bosq_tail, default_schedule, error_bound, error_bound_from_gammas, gamma, Alg2Params,
    ErrorBound, MixingSchedule,
};
pub use clustering::{cluster_known_k, cluster_threshold, partition_equal, Clustering};
pub use distance::{
    distance_matrix, emp_distance_exact, emp_distance_exact_with, emp_distance_oracle,
    emp_distance_truncated, term, DistanceMatrix, Estimator, ExactConfig, TruncationSchedule,
};
pub use error::{Error, Result};
pub use partition::{
    cell_index, frequencies, s_min, CellId, FrequencyTable, PartitionFamily, PartitionSpec, Sample,
};
pub use process::{generate, generate_dataset, CouplingSpec, Dataset, ProcessKind, ProcessSpec};
pub use scalar::{CompensatedSum, Scalar};

pub type Sample64 = Sample<f64>;
pub type Sample32 = Sample<f32>;
pub type DistanceMatrix64 = DistanceMatrix<f64>;
pub type DistanceMatrix32 = DistanceMatrix<f32>;
pub type MixingSchedule64 = MixingSchedule<f64>;
pub type Alg2Params64 = Alg2Params<f64>;
pub type Dataset64 = Dataset<f64>;
