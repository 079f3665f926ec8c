//! Cube partitions of `R^m`, cell indexing, sliding-window frequency tables
//! and the cross-sample separation statistic `s_min`.
//!
//! A partition at scale level `l` tiles every axis into half-open cells
//! `[i·h, (i+1)·h)` anchored at the origin, where `h` is the cell side of the
//! level. Two families are supported: dyadic (`h = 2^-l`, the default) and
//! harmonic (`h = 1/l`).

use std::cmp::Ordering;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A finite real-valued sequence, one observation per time step.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample<T> {
    values: Vec<T>,
}

impl<T: Scalar> Sample<T> {
    /// Wraps `values`, rejecting NaN and infinities.
    pub fn new(values: Vec<T>) -> Result<Self> {
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { values })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    /// Largest absolute value, zero for an empty sample.
    pub fn max_abs(&self) -> T {
        self.values.iter().fold(
            T::zero(),
            |acc, v| if v.abs() > acc { v.abs() } else { acc },
        )
    }

    /// True when every value lies in `[0, 1]`.
    pub fn in_unit_interval(&self) -> bool {
        self.values.iter().all(|&v| v >= T::zero() && v <= T::one())
    }
}

impl<T: Scalar> TryFrom<Vec<T>> for Sample<T> {
    type Error = Error;

    fn try_from(values: Vec<T>) -> Result<Self> {
        Self::new(values)
    }
}

/// How the cell side shrinks with the scale level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PartitionFamily {
    /// Side `2^-l`.
    #[default]
    Dyadic,
    /// Side `1/l`.
    Harmonic,
}

impl PartitionFamily {
    /// Number of cells per unit length at level `l`, i.e. `1 / cell_side`.
    ///
    /// Both families give an exactly representable value, so
    /// `x * inverse_side(l)` is the exact quotient `x / cell_side` whenever it
    /// does not overflow.
    pub fn inverse_side<T: Scalar>(self, l: u32) -> T {
        match self {
            PartitionFamily::Dyadic => T::lit(2.0).powi(l as i32),
            PartitionFamily::Harmonic => T::from_usize_exact(l as usize),
        }
    }

    pub fn cell_side<T: Scalar>(self, l: u32) -> T {
        match self {
            PartitionFamily::Dyadic => T::lit(0.5).powi(l as i32),
            PartitionFamily::Harmonic => T::one() / T::from_usize_exact(l as usize),
        }
    }

    /// Smallest level whose cell side does not exceed `gap`.
    pub fn level_for_gap<T: Scalar>(self, gap: T) -> u32 {
        debug_assert!(gap > T::zero());
        let mut level = match self {
            PartitionFamily::Dyadic => {
                let raw = (T::one() / gap).log2().ceil();
                raw.to_f64().unwrap_or(f64::MAX).clamp(1.0, 1.0e9) as u32
            }
            PartitionFamily::Harmonic => {
                let raw = (T::one() / gap).ceil();
                raw.to_f64().unwrap_or(f64::MAX).clamp(1.0, 4.0e9) as u32
            }
        };
        // Correct for rounding in log2/division.
        while level < u32::MAX && self.cell_side::<T>(level) > gap {
            level += 1;
        }
        while level > 1 && self.cell_side::<T>(level - 1) <= gap {
            level -= 1;
        }
        level
    }
}

/// Partition `B^{m,l}` of `R^m` into cubes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PartitionSpec {
    pub m: usize,
    pub l: u32,
    pub family: PartitionFamily,
}

impl PartitionSpec {
    pub fn new(m: usize, l: u32, family: PartitionFamily) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("m", "tuple dimension must be at least 1"));
        }
        if l == 0 {
            return Err(Error::invalid("l", "scale level must be at least 1"));
        }
        Ok(Self { m, l, family })
    }

    pub fn dyadic(m: usize, l: u32) -> Result<Self> {
        Self::new(m, l, PartitionFamily::Dyadic)
    }

    pub fn cell_side<T: Scalar>(&self) -> T {
        self.family.cell_side(self.l)
    }

    /// Per-axis cell coordinate of one value.
    pub fn coordinate<T: Scalar>(&self, x: T) -> Result<i64> {
        if !x.is_finite() {
            return Err(Error::invalid("x", "coordinate is not finite"));
        }
        let scaled = (x * self.family.inverse_side::<T>(self.l)).floor();
        scaled.to_i64().ok_or(Error::CoordinateOverflow {
            value: scaled.to_f64_lossless(),
        })
    }
}

/// One cube of a partition `B^{m,l}`; `m` is `coords.len()`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellId {
    pub l: u32,
    pub coords: Box<[i64]>,
}

impl CellId {
    pub fn m(&self) -> usize {
        self.coords.len()
    }
}

/// Maps a point of `R^m` to the cube of `spec` containing it.
pub fn cell_index<T: Scalar>(x: &[T], spec: &PartitionSpec) -> Result<CellId> {
    if x.len() != spec.m {
        return Err(Error::invalid(
            "x",
            format!("expected {} coordinates, got {}", spec.m, x.len()),
        ));
    }
    let coords = x
        .iter()
        .map(|&v| spec.coordinate(v))
        .collect::<Result<Vec<_>>>()?;
    Ok(CellId {
        l: spec.l,
        coords: coords.into_boxed_slice(),
    })
}

/// Sliding-window occupancy counts of one sample over one partition.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyTable {
    spec: PartitionSpec,
    counts: FxHashMap<CellId, u64>,
    window_total: u64,
}

impl FrequencyTable {
    pub fn spec(&self) -> &PartitionSpec {
        &self.spec
    }

    /// `n - m + 1`, or 0 when the sample is shorter than `m`.
    pub fn window_total(&self) -> u64 {
        self.window_total
    }

    pub fn count(&self, cell: &CellId) -> u64 {
        self.counts.get(cell).copied().unwrap_or(0)
    }

    /// Empirical frequency `ν`; identically zero when there are no windows.
    pub fn frequency<T: Scalar>(&self, cell: &CellId) -> T {
        if self.window_total == 0 {
            return T::zero();
        }
        T::from_u64(self.count(cell)).unwrap() / T::from_u64(self.window_total).unwrap()
    }

    pub fn occupied(&self) -> usize {
        self.counts.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CellId, u64)> {
        self.counts.iter().map(|(k, &v)| (k, v))
    }
}

/// Counts every length-`m` window of `x` into its cell of `B^{m,l}`.
pub fn frequencies<T: Scalar>(x: &Sample<T>, spec: &PartitionSpec) -> Result<FrequencyTable> {
    let mut counts: FxHashMap<CellId, u64> = FxHashMap::default();
    let n = x.len();
    if n < spec.m {
        return Ok(FrequencyTable {
            spec: *spec,
            counts,
            window_total: 0,
        });
    }
    let axis: Vec<i64> = x
        .values()
        .iter()
        .map(|&v| spec.coordinate(v))
        .collect::<Result<_>>()?;
    for window in axis.windows(spec.m) {
        let cell = CellId {
            l: spec.l,
            coords: window.into(),
        };
        *counts.entry(cell).or_insert(0) += 1;
    }
    Ok(FrequencyTable {
        spec: *spec,
        counts,
        window_total: (n - spec.m + 1) as u64,
    })
}

fn sorted_values<T: Scalar>(x: &Sample<T>) -> Vec<T> {
    let mut v = x.values().to_vec();
    v.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    v
}

/// Smallest `|a - b|` over cross-sample pairs with `a != b`.
///
/// `None` when every value of `x1` equals every value of `x2`.
pub fn s_min<T: Scalar>(x1: &Sample<T>, x2: &Sample<T>) -> Result<Option<T>> {
    if x1.is_empty() || x2.is_empty() {
        return Err(Error::EmptySample);
    }
    let a = sorted_values(x1);
    let b = sorted_values(x2);
    Ok(s_min_sorted(&a, &b))
}

/// Sort-merge core of [`s_min`] over pre-sorted values.
pub(crate) fn s_min_sorted<T: Scalar>(a: &[T], b: &[T]) -> Option<T> {
    let mut best: Option<T> = None;
    let mut consider = |gap: T| {
        if best.is_none_or(|g| gap < g) {
            best = Some(gap);
        }
    };
    // lo: first index with b[lo] >= v; hi: first index with b[hi] > v.
    let mut lo = 0usize;
    let mut hi = 0usize;
    let mut prev: Option<T> = None;
    for &v in a {
        if prev == Some(v) {
            continue;
        }
        prev = Some(v);
        while lo < b.len() && b[lo] < v {
            lo += 1;
        }
        if hi < lo {
            hi = lo;
        }
        while hi < b.len() && b[hi] <= v {
            hi += 1;
        }
        if lo > 0 {
            consider(v - b[lo - 1]);
        }
        if hi < b.len() {
            consider(b[hi] - v);
        }
    }
    best
}
