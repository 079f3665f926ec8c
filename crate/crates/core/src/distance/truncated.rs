//! Truncated distance: finitely many dimensions, levels and cells.

use serde::{Deserialize, Serialize};

use super::windows::{cell_key, PairClasses};
use crate::error::{Error, Result};
use crate::partition::{PartitionFamily, Sample};
use crate::scalar::{CompensatedSum, Scalar};

/// Which cubes of `B^{m,l}` the truncated sum visits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellRule {
    /// The cubes tiling `[0,1]^m`; the uppermost cube of every axis is
    /// closed, so the value 1 is counted. Windows leaving `[0,1]^m` are
    /// dropped (their mass still counts in the frequency denominators).
    #[default]
    UnitCube,
    /// Every cube of the partition.
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncationSchedule {
    pub m_max: usize,
    pub l_max: u32,
    #[serde(default)]
    pub cell_rule: CellRule,
    #[serde(default)]
    pub family: PartitionFamily,
}

impl TruncationSchedule {
    pub fn new(m_max: usize, l_max: u32) -> Result<Self> {
        let sched = Self {
            m_max,
            l_max,
            cell_rule: CellRule::UnitCube,
            family: PartitionFamily::Dyadic,
        };
        sched.validate()?;
        Ok(sched)
    }

    pub fn with_cell_rule(mut self, rule: CellRule) -> Self {
        self.cell_rule = rule;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.m_max == 0 {
            return Err(Error::invalid("m_max", "must be at least 1"));
        }
        if self.l_max == 0 {
            return Err(Error::invalid("l_max", "must be at least 1"));
        }
        Ok(())
    }

    /// `|B^{m,l,n}|` under the cell rule; `None` when unbounded (or too large for u128).
    pub fn cell_budget(&self, m: usize, l: u32) -> Option<u128> {
        match self.cell_rule {
            CellRule::Unbounded => None,
            CellRule::UnitCube => {
                let per_axis: u128 = match self.family {
                    PartitionFamily::Dyadic => 1u128.checked_shl(l)?,
                    PartitionFamily::Harmonic => u128::from(l),
                };
                per_axis.checked_pow(u32::try_from(m).ok()?)
            }
        }
    }

    /// `b_n = max_{m ≤ m_max, l ≤ l_max} |B^{m,l,n}|`.
    pub fn b_n(&self) -> Option<u128> {
        // Both families grow in m and l, so the maximum is at the corner.
        self.cell_budget(self.m_max, self.l_max)
    }
}

/// `ď(x1, x2)` under `sched`.
pub fn emp_distance_truncated<T: Scalar>(
    x1: &Sample<T>,
    x2: &Sample<T>,
    sched: &TruncationSchedule,
) -> Result<T> {
    sched.validate()?;
    if x1.is_empty() || x2.is_empty() {
        return Err(Error::EmptySample);
    }
    let (v1, v2) = (x1.values(), x2.values());
    let m_top = sched.m_max.min(v1.len().max(v2.len()));
    let mut acc = CompensatedSum::new();
    for l in 1..=sched.l_max {
        let inv = sched.family.inverse_side::<T>(l);
        let mut classes = match sched.cell_rule {
            CellRule::UnitCube => {
                let top = inv - T::one();
                PairClasses::new(v1, v2, move |v| unit_cube_key(v, inv, top))
            }
            CellRule::Unbounded => PairClasses::new(v1, v2, move |v| Some(cell_key(v * inv))),
        };
        let level_weight = T::weight(l as usize);
        for m in 1..=m_top {
            let term = classes.term::<T>();
            acc.add(level_weight * T::weight(m) * term.value);
            if m < m_top {
                classes.advance();
            }
        }
    }
    Ok(acc.value())
}

#[inline]
fn unit_cube_key<T: Scalar>(v: T, inv: T, top: T) -> Option<u64> {
    if v < T::zero() || v > T::one() {
        return None;
    }
    let c = (v * inv).floor();
    Some(cell_key(if c > top { top } else { c }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::emp_distance_exact;

    fn s(v: &[f64]) -> Sample<f64> {
        Sample::new(v.to_vec()).unwrap()
    }

    #[test]
    fn single_term_example() {
        let sched = TruncationSchedule::new(1, 1).unwrap();
        let d = emp_distance_truncated(&s(&[0.25, 0.25]), &s(&[0.75, 0.75]), &sched).unwrap();
        assert!((d - 0.5).abs() < 1e-15);
    }

    #[test]
    fn large_schedule_approaches_exact() {
        let x1 = s(&[0.25, 0.25]);
        let x2 = s(&[0.75, 0.75]);
        let sched = TruncationSchedule::new(2, 40).unwrap();
        let d = emp_distance_truncated(&x1, &x2, &sched).unwrap();
        let exact = emp_distance_exact(&x1, &x2).unwrap();
        assert!(d <= exact);
        assert!((exact - d) < 1e-11);
    }

    #[test]
    fn value_one_is_counted_under_unit_cube() {
        let sched = TruncationSchedule::new(1, 1).unwrap();
        let d = emp_distance_truncated(&s(&[1.0, 1.0]), &s(&[0.0, 0.0]), &sched).unwrap();
        assert_eq!(d, 0.5);
        let same = emp_distance_truncated(&s(&[1.0, 0.0]), &s(&[0.0, 1.0]), &sched).unwrap();
        assert_eq!(same, 0.0);
    }

    #[test]
    fn out_of_range_values_are_excluded() {
        let sched = TruncationSchedule::new(1, 1).unwrap();
        // Both samples have all their mass outside [0,1]: nothing is visited.
        let d = emp_distance_truncated(&s(&[2.0]), &s(&[-3.0]), &sched).unwrap();
        assert_eq!(d, 0.0);
        let unbounded = sched.with_cell_rule(CellRule::Unbounded);
        let d = emp_distance_truncated(&s(&[2.0]), &s(&[-3.0]), &unbounded).unwrap();
        assert_eq!(d, 0.5);
    }

    #[test]
    fn budget_closed_form() {
        let sched = TruncationSchedule::new(2, 2).unwrap();
        assert_eq!(sched.b_n(), Some(16));
        assert_eq!(sched.cell_budget(1, 2), Some(4));
        let harmonic = TruncationSchedule {
            family: PartitionFamily::Harmonic,
            ..TruncationSchedule::new(3, 5).unwrap()
        };
        assert_eq!(harmonic.b_n(), Some(125));
        assert_eq!(sched.with_cell_rule(CellRule::Unbounded).b_n(), None);
    }

    #[test]
    fn invalid_schedule() {
        assert!(TruncationSchedule::new(0, 1).is_err());
        assert!(TruncationSchedule::new(1, 0).is_err());
    }
}
