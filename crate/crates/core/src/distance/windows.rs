//! Joint window-class refinement for two samples.
//!
//! At a fixed scale level every value is mapped to a 1-D cell key. Two
//! length-`m` windows share a cube of `B^{m,l}` iff their keys agree
//! coordinatewise, so cube membership is tracked as dense class labels that
//! are refined one coordinate at a time: the class of a length-`m+1` window
//! is determined by the class of its length-`m` prefix and the key of its
//! last value. Labels are shared between the two samples, which makes each
//! `T^{m,l}` an O(n) pass over label counts.

use rustc_hash::FxHashMap;

use crate::scalar::Scalar;

/// Label of a window that falls outside the admissible cell set.
pub(crate) const EXCLUDED: u32 = u32::MAX;

pub(crate) struct PairClasses {
    a: Vec<u32>,
    b: Vec<u32>,
    base_a: Vec<u32>,
    base_b: Vec<u32>,
    classes: u32,
    m: usize,
    counts_a: Vec<u32>,
    counts_b: Vec<u32>,
    relabel: FxHashMap<u64, u32>,
}

/// One cube-partition term together with whether any cube is occupied by
/// windows of both samples.
pub(crate) struct Term<T> {
    pub value: T,
    pub shared: bool,
}

impl PairClasses {
    /// Labels the 1-D cells of both samples; `key` returns `None` for values
    /// outside the admissible cell set.
    pub(crate) fn new<T: Scalar>(x1: &[T], x2: &[T], key: impl Fn(T) -> Option<u64>) -> Self {
        let mut ids: FxHashMap<u64, u32> = FxHashMap::default();
        let mut label = |v: T| match key(v) {
            Some(k) => {
                let next = ids.len() as u32;
                *ids.entry(k).or_insert(next)
            }
            None => EXCLUDED,
        };
        let base_a: Vec<u32> = x1.iter().map(|&v| label(v)).collect();
        let base_b: Vec<u32> = x2.iter().map(|&v| label(v)).collect();
        let classes = ids.len() as u32;
        Self {
            a: base_a.clone(),
            b: base_b.clone(),
            base_a,
            base_b,
            classes,
            m: 1,
            counts_a: vec![0; classes as usize],
            counts_b: vec![0; classes as usize],
            relabel: FxHashMap::default(),
        }
    }

    /// Number of length-`m` windows currently tracked in each sample.
    #[cfg(test)]
    pub(crate) fn windows(&self) -> (usize, usize) {
        (self.a.len(), self.b.len())
    }

    /// `Σ_B |ν1(B) − ν2(B)|` over admissible cubes at the current `m`.
    ///
    /// Evaluated as one exact integer sum
    /// `Σ |c1·w2 − c2·w1| / (w1·w2)` so only the final division rounds.
    pub(crate) fn term<T: Scalar>(&mut self) -> Term<T> {
        let wa = self.a.len() as u64;
        let wb = self.b.len() as u64;
        for &c in &self.a {
            if c != EXCLUDED {
                self.counts_a[c as usize] += 1;
            }
        }
        for &c in &self.b {
            if c != EXCLUDED {
                self.counts_b[c as usize] += 1;
            }
        }
        let mut numerator: u128 = 0;
        let mut included: u64 = 0;
        let mut shared = false;
        for labels in [&self.a, &self.b] {
            for &c in labels.iter() {
                if c == EXCLUDED {
                    continue;
                }
                let ca = self.counts_a[c as usize] as u64;
                let cb = self.counts_b[c as usize] as u64;
                if ca == 0 && cb == 0 {
                    continue;
                }
                shared |= ca > 0 && cb > 0;
                included += ca + cb;
                numerator += (ca * wb).abs_diff(cb * wa) as u128;
                self.counts_a[c as usize] = 0;
                self.counts_b[c as usize] = 0;
            }
        }
        let value = match (wa, wb) {
            (0, 0) => T::zero(),
            // ν ≡ 0 on the empty side: the term is the other side's admissible mass.
            (0, w) | (w, 0) => T::from_u64(included).unwrap() / T::from_u64(w).unwrap(),
            _ => {
                T::from_u128(numerator).unwrap()
                    / (T::from_u64(wa).unwrap() * T::from_u64(wb).unwrap())
            }
        };
        Term { value, shared }
    }

    /// Refines the labels from length-`m` to length-`m+1` windows.
    pub(crate) fn advance(&mut self) {
        self.relabel.clear();
        let m = self.m;
        self.m += 1;
        let relabel = &mut self.relabel;
        let mut refine = |labels: &mut Vec<u32>, base: &[u32]| {
            if labels.is_empty() {
                return;
            }
            let next_len = labels.len() - 1;
            for i in 0..next_len {
                let prefix = labels[i];
                let last = base[i + m];
                labels[i] = if prefix == EXCLUDED || last == EXCLUDED {
                    EXCLUDED
                } else {
                    let key = (u64::from(prefix) << 32) | u64::from(last);
                    let next = relabel.len() as u32;
                    *relabel.entry(key).or_insert(next)
                };
            }
            labels.truncate(next_len);
        };
        refine(&mut self.a, &self.base_a);
        refine(&mut self.b, &self.base_b);
        self.classes = self.relabel.len() as u32;
        let needed = self.classes as usize;
        if self.counts_a.len() < needed {
            self.counts_a.resize(needed, 0);
            self.counts_b.resize(needed, 0);
        }
    }
}

/// Hash key of the 1-D cell containing an already scaled value.
#[inline]
pub(crate) fn cell_key<T: Scalar>(scaled: T) -> u64 {
    // `+ 0.0` folds -0.0 into +0.0.
    (scaled.floor() + T::zero()).to_f64_lossless().to_bits()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key_at(level: u32) -> impl Fn(f64) -> Option<u64> {
        let inv = 2f64.powi(level as i32);
        move |v| Some(cell_key(v * inv))
    }

    #[test]
    fn disjoint_halves() {
        let mut c = PairClasses::new(&[0.25, 0.25], &[0.75, 0.75], key_at(1));
        let t = c.term::<f64>();
        assert_eq!(t.value, 2.0);
        assert!(!t.shared);
        c.advance();
        assert_eq!(c.windows(), (1, 1));
        assert_eq!(c.term::<f64>().value, 2.0);
        c.advance();
        assert_eq!(c.windows(), (0, 0));
        assert_eq!(c.term::<f64>().value, 0.0);
    }

    #[test]
    fn one_side_exhausted_gives_its_mass() {
        let mut c = PairClasses::new(&[0.1, 0.2], &[0.1, 0.2, 0.3, 0.4, 0.5], key_at(2));
        c.advance();
        c.advance();
        assert_eq!(c.windows(), (0, 3));
        assert_eq!(c.term::<f64>().value, 1.0);
    }

    #[test]
    fn excluded_windows_keep_denominator() {
        let key = |v: f64| {
            if v <= 1.0 {
                Some(cell_key(v * 2.0))
            } else {
                None
            }
        };
        let mut c = PairClasses::new(&[0.1, 5.0], &[0.1, 0.1], key);
        // ν1(cell 0) = 1/2, ν2(cell 0) = 1.
        assert_eq!(c.term::<f64>().value, 0.5);
        c.advance();
        // The only window of x1 contains an excluded value.
        assert_eq!(c.term::<f64>().value, 1.0);
    }

    #[test]
    fn negative_zero_shares_cell_with_zero() {
        assert_eq!(cell_key(-0.0f64), cell_key(0.0f64));
        assert_eq!(cell_key(-0.5f64), cell_key(-1.0f64));
    }
}
