//! Exact empirical distributional distance.
//!
//! The double series over tuple dimensions `m` and scale levels `l` is
//! summed in finitely many steps:
//!
//! * for `l ≥ L`, where the cell side at `L` is at most `s_min`, every
//!   `T^{m,l}` equals `T^{m,L}`, so the level series is truncated at `L` and
//!   the last term takes the weight of the whole tail (`2·w_L`);
//! * for `min(n1, n2) < m ≤ max(n1, n2)` one sample has no windows and
//!   `T^{m,l} = 1`, which sums to `2^-min − 2^-max` in closed form;
//! * for `m > max(n1, n2)` every term vanishes;
//! * once no cube at `(m, l)` is shared by both samples, no finer window
//!   length shares one either and the remaining terms at that level are 2.
//!
//! Dimensions beyond `m_cap` are dropped; their total weight is below
//! `2·2^-m_cap`.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::windows::{cell_key, PairClasses};
use crate::error::{Error, Result};
use crate::partition::{s_min_sorted, PartitionFamily, Sample};
use crate::scalar::{CompensatedSum, Scalar};

/// Default cap on the tuple dimension of the exact evaluator.
pub const DEFAULT_M_CAP: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactConfig {
    pub family: PartitionFamily,
    pub m_cap: usize,
}

impl Default for ExactConfig {
    fn default() -> Self {
        Self {
            family: PartitionFamily::Dyadic,
            m_cap: DEFAULT_M_CAP,
        }
    }
}

impl ExactConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m_cap == 0 {
            return Err(Error::invalid("m_cap", "must be at least 1"));
        }
        Ok(())
    }
}

/// Result of an exact evaluation with its per-dimension breakdown.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactDistance<T> {
    pub total: T,
    /// `per_m[m - 1] = w_m Σ_l w_l T^{m,l}`, up to `min(max(n1, n2), m_cap)`.
    pub per_m: Vec<T>,
    /// Highest scale level evaluated.
    pub level: u32,
    pub s_min: Option<T>,
    /// True when the stabilization level was not representable and the tail
    /// was taken from exact-value cells instead.
    pub pointwise_tail: bool,
}

/// A sample with the sorted copy of its values, reused across pairs.
#[derive(Debug, Clone)]
pub struct PreparedSample<'a, T> {
    sample: &'a Sample<T>,
    sorted: Vec<T>,
    max_abs: T,
}

impl<'a, T: Scalar> PreparedSample<'a, T> {
    pub fn new(sample: &'a Sample<T>) -> Self {
        let mut sorted = sample.values().to_vec();
        sorted.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        Self {
            sample,
            sorted,
            max_abs: sample.max_abs(),
        }
    }

    pub fn sample(&self) -> &Sample<T> {
        self.sample
    }
}

/// Exact `d̂(x1, x2)` with the default configuration.
pub fn emp_distance_exact<T: Scalar>(x1: &Sample<T>, x2: &Sample<T>) -> Result<T> {
    Ok(emp_distance_exact_with(x1, x2, &ExactConfig::default())?.total)
}

pub fn emp_distance_exact_with<T: Scalar>(
    x1: &Sample<T>,
    x2: &Sample<T>,
    config: &ExactConfig,
) -> Result<ExactDistance<T>> {
    if x1.is_empty() || x2.is_empty() {
        return Err(Error::EmptySample);
    }
    exact_prepared(&PreparedSample::new(x1), &PreparedSample::new(x2), config)
}

/// Largest level at which every scaled value stays finite.
fn representable_level<T: Scalar>(max_abs: T, family: PartitionFamily) -> u32 {
    let ok = |l: u32| {
        let inv = family.inverse_side::<T>(l);
        inv.is_finite() && (max_abs * inv).is_finite()
    };
    let (mut lo, mut hi) = (1u32, 1u32 << 16);
    if ok(hi) {
        return hi;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// True when no 1-D cell at `level` holds two distinct values of which one
/// comes from each sample.
fn cross_values_separated<T: Scalar>(x1: &[T], x2: &[T], inv: T) -> bool {
    use rustc_hash::FxHashMap;
    // cell -> (first value, seen in x1, seen in x2, holds distinct values)
    let mut cells: FxHashMap<u64, (T, bool, bool, bool)> = FxHashMap::default();
    for (values, first_sample) in [(x1, true), (x2, false)] {
        for &v in values {
            let e = cells
                .entry(cell_key(v * inv))
                .or_insert((v, false, false, false));
            if first_sample {
                e.1 = true;
            } else {
                e.2 = true;
            }
            e.3 |= e.0 != v;
        }
    }
    !cells.values().any(|&(_, a, b, mixed)| a && b && mixed)
}

pub(crate) fn exact_prepared<T: Scalar>(
    p1: &PreparedSample<'_, T>,
    p2: &PreparedSample<'_, T>,
    config: &ExactConfig,
) -> Result<ExactDistance<T>> {
    config.validate()?;
    let (x1, x2) = (p1.sample.values(), p2.sample.values());
    if x1.is_empty() || x2.is_empty() {
        return Err(Error::EmptySample);
    }
    let family = config.family;
    let n_min = x1.len().min(x2.len());
    let n_max = x1.len().max(x2.len());
    let m_top = n_max.min(config.m_cap);
    let m_shared = n_min.min(config.m_cap);

    let gap = s_min_sorted(&p1.sorted, &p2.sorted);
    let mut level = gap.map_or(1, |g| family.level_for_gap(g));
    let limit = representable_level(p1.max_abs.max(p2.max_abs), family);
    while level <= limit && !cross_values_separated(x1, x2, family.inverse_side::<T>(level)) {
        level += 1;
    }
    let pointwise_tail = level > limit;

    // (cell key at this level, weight of the level in the truncated series)
    let mut levels: Vec<(Option<T>, T)> = Vec::new();
    let top = if pointwise_tail { limit } else { level - 1 };
    for l in 1..=top {
        levels.push((Some(family.inverse_side::<T>(l)), T::weight(l as usize)));
    }
    if pointwise_tail {
        // Σ_{l > limit} w_l, applied to exact-value cells.
        levels.push((None, T::lit(2.0) * T::weight(limit as usize + 1)));
    } else {
        levels.push((
            Some(family.inverse_side::<T>(level)),
            T::lit(2.0) * T::weight(level as usize),
        ));
    }

    let mut per_m: Vec<CompensatedSum<T>> = vec![CompensatedSum::new(); m_top];
    let two = T::lit(2.0);
    for (inv, level_weight) in levels {
        let mut classes = match inv {
            Some(inv) => PairClasses::new(x1, x2, |v| Some(cell_key(v * inv))),
            None => PairClasses::new(x1, x2, |v| {
                Some((v + T::zero()).to_f64_lossless().to_bits())
            }),
        };
        for m in 1..=m_shared {
            let term = classes.term::<T>();
            per_m[m - 1].add(level_weight * T::weight(m) * term.value);
            if !term.shared {
                for (offset, acc) in per_m[m..m_shared].iter_mut().enumerate() {
                    acc.add(level_weight * T::weight(m + 1 + offset) * two);
                }
                break;
            }
            if m < m_shared {
                classes.advance();
            }
        }
    }
    // One side has no windows: T^{m,l} = 1 at every level, level weights sum to 1.
    for (idx, acc) in per_m.iter_mut().enumerate().skip(m_shared) {
        acc.add(T::weight(idx + 1));
    }

    let per_m: Vec<T> = per_m.iter().map(CompensatedSum::value).collect();
    let total = per_m.iter().copied().collect::<CompensatedSum<T>>().value();
    Ok(ExactDistance {
        total,
        per_m,
        level: if pointwise_tail { limit } else { level },
        s_min: gap,
        pointwise_tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::term_in;
    use crate::partition::PartitionSpec;

    fn s(v: &[f64]) -> Sample<f64> {
        Sample::new(v.to_vec()).unwrap()
    }

    #[test]
    fn anchor_value() {
        let d = emp_distance_exact_with(
            &s(&[0.25, 0.25]),
            &s(&[0.75, 0.75]),
            &ExactConfig::default(),
        )
        .unwrap();
        assert!((d.total - 1.5).abs() < 1e-12);
        assert_eq!(d.level, 1);
        assert_eq!(d.per_m, vec![1.0, 0.5]);
    }

    #[test]
    fn identity_is_zero() {
        let x = s(&[0.1, 0.4, 0.4, 0.9, 0.3]);
        assert_eq!(emp_distance_exact(&x, &x).unwrap(), 0.0);
        let c = s(&[0.5, 0.5, 0.5]);
        assert_eq!(emp_distance_exact(&c, &c).unwrap(), 0.0);
    }

    #[test]
    fn unequal_lengths_closed_form() {
        // Constant samples of the same value: only the closed-form region counts.
        let d = emp_distance_exact(&s(&[0.3; 2]), &s(&[0.3; 5])).unwrap();
        assert!((d - (0.25 - 1.0 / 32.0)).abs() < 1e-15);
    }

    #[test]
    fn empty_sample_rejected() {
        assert_eq!(
            emp_distance_exact(&s(&[]), &s(&[0.1])),
            Err(Error::EmptySample)
        );
    }

    #[test]
    fn matches_manual_level_sum() {
        let x1 = s(&[0.05, 0.3, 0.31, 0.7, 0.2, 0.9]);
        let x2 = s(&[0.3, 0.55, 0.05, 0.71, 0.69]);
        let d = emp_distance_exact_with(&x1, &x2, &ExactConfig::default()).unwrap();
        let big_l = d.level;
        let mut manual = 0.0;
        for m in 1..=x1.len().max(x2.len()) {
            let wm = 0.5f64.powi(m as i32);
            for l in 1..=big_l {
                let t = term_in(&x1, &x2, &PartitionSpec::dyadic(m, l).unwrap()).unwrap();
                let wl = 0.5f64.powi(l as i32) * if l == big_l { 2.0 } else { 1.0 };
                manual += wm * wl * t;
            }
        }
        assert!(
            (d.total - manual).abs() < 1e-12,
            "{} vs {}",
            d.total,
            manual
        );
    }

    #[test]
    fn harmonic_family_is_supported() {
        let cfg = ExactConfig {
            family: PartitionFamily::Harmonic,
            ..ExactConfig::default()
        };
        let d = emp_distance_exact_with(&s(&[0.25, 0.25]), &s(&[0.75, 0.75]), &cfg).unwrap();
        // s_min = 0.5 gives L = 2. Level 1 (side 1) merges both values, so
        // only the doubled level-2 weight contributes: 1/2·(1/2·2) + 1/4·(1/2·2).
        assert_eq!(d.level, 2);
        assert!((d.total - 0.75).abs() < 1e-12);
    }

    #[test]
    fn pointwise_tail_for_unrepresentable_levels() {
        let x1 = s(&[0.0, 1.0e300]);
        let x2 = s(&[1.0e-300, 1.0e300]);
        let d = emp_distance_exact_with(&x1, &x2, &ExactConfig::default()).unwrap();
        assert!(d.pointwise_tail);
        assert!(d.total > 0.0 && d.total <= 2.0);
    }

    #[test]
    fn f32_agrees_with_f64() {
        let a = [0.1f32, 0.6, 0.35, 0.85, 0.6];
        let b = [0.6f32, 0.1, 0.1, 0.9];
        let d32 = emp_distance_exact(
            &Sample::new(a.to_vec()).unwrap(),
            &Sample::new(b.to_vec()).unwrap(),
        )
        .unwrap();
        let d64 = emp_distance_exact(
            &Sample::new(a.iter().map(|&v| f64::from(v)).collect()).unwrap(),
            &Sample::new(b.iter().map(|&v| f64::from(v)).collect()).unwrap(),
        )
        .unwrap();
        assert!((f64::from(d32) - d64).abs() < 1e-6);
    }
}
