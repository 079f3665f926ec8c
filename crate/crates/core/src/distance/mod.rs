//! Empirical distributional distance between two samples.
//!
//! `d̂(x1, x2) = Σ_{m,l ≥ 1} w_m w_l Σ_{B ∈ B^{m,l}} |ν(x1, B) − ν(x2, B)|`
//! with `w_j = 2^-j`. Each inner sum `T^{m,l}` is an L1 distance between two
//! frequency vectors, so `0 ≤ d̂ ≤ 2` and `d̂` is a pseudometric on finite
//! sequences.

mod exact;
mod matrix;
mod oracle;
mod truncated;
mod windows;

pub use exact::{
    emp_distance_exact, emp_distance_exact_with, ExactConfig, ExactDistance, PreparedSample,
    DEFAULT_M_CAP,
};
pub use matrix::{distance_matrix, DistanceMatrix, Estimator, PairwiseDistances};
pub use oracle::{emp_distance_oracle, term, term_in};
pub use truncated::{emp_distance_truncated, CellRule, TruncationSchedule};

use crate::scalar::Scalar;

/// Weight `w_j = 2^-j`; the weights are positive and sum to 1.
pub fn weight<T: Scalar>(j: usize) -> T {
    T::weight(j)
}

/// `Σ_{i ≥ j} w_i = 2^{-(j-1)}`.
pub fn tail_weight<T: Scalar>(j: usize) -> T {
    T::lit(2.0) * T::weight(j)
}
