//! Brute-force reference evaluation by explicit cell enumeration.
//!
//! Shares nothing with the optimized evaluators beyond [`frequencies`]:
//! every `(m, l)` pair up to the given bounds is enumerated, with no
//! stabilization, closed forms or early exits.

use rustc_hash::FxHashSet;

use crate::error::{Error, Result};
use crate::partition::{frequencies, PartitionSpec, Sample};
use crate::scalar::Scalar;

/// `T^{m,l} = Σ_B |ν1(B) − ν2(B)|` on the dyadic partition.
pub fn term<T: Scalar>(x1: &Sample<T>, x2: &Sample<T>, m: usize, l: u32) -> Result<T> {
    term_in(x1, x2, &PartitionSpec::dyadic(m, l)?)
}

/// `T^{m,l}` on an arbitrary partition.
pub fn term_in<T: Scalar>(x1: &Sample<T>, x2: &Sample<T>, spec: &PartitionSpec) -> Result<T> {
    let f1 = frequencies(x1, spec)?;
    let f2 = frequencies(x2, spec)?;
    let cells: FxHashSet<_> = f1.iter().chain(f2.iter()).map(|(c, _)| c).collect();
    Ok(cells
        .into_iter()
        .map(|c| (f1.frequency::<T>(c) - f2.frequency::<T>(c)).abs())
        .sum())
}

/// Direct partial sum of the distance series over `m ≤ m_big`, `l ≤ l_big`.
///
/// Differs from the infinite series by at most `2(2^-l_big + 2^-m_big)`.
pub fn emp_distance_oracle<T: Scalar>(
    x1: &Sample<T>,
    x2: &Sample<T>,
    l_big: u32,
    m_big: usize,
) -> Result<T> {
    if l_big == 0 || m_big == 0 {
        return Err(Error::invalid("l_big/m_big", "must be at least 1"));
    }
    let mut total = T::zero();
    for m in 1..=m_big {
        for l in 1..=l_big {
            let t = term(x1, x2, m, l)?;
            total = total + T::weight(m) * T::weight(l as usize) * t;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[f64]) -> Sample<f64> {
        Sample::new(v.to_vec()).unwrap()
    }

    #[test]
    fn term_examples() {
        let x = s(&[0.1, 0.7, 0.3]);
        for m in 1..5 {
            for l in 1..5 {
                assert_eq!(term(&x, &x, m, l).unwrap(), 0.0);
            }
        }
        assert_eq!(
            term(&s(&[0.25, 0.25]), &s(&[0.75, 0.75]), 1, 1).unwrap(),
            2.0
        );
        let short = s(&[0.1, 0.2]);
        let long = s(&[0.1, 0.2, 0.3, 0.4, 0.5]);
        assert_eq!(term(&short, &long, 3, 2).unwrap(), 1.0);
        assert_eq!(term(&short, &long, 6, 2).unwrap(), 0.0);
    }

    #[test]
    fn oracle_anchor() {
        let d = emp_distance_oracle(&s(&[0.25, 0.25]), &s(&[0.75, 0.75]), 30, 30).unwrap();
        assert!((d - 1.5).abs() < 1e-8);
        let x = s(&[0.3, 0.2]);
        assert_eq!(emp_distance_oracle(&x, &x, 10, 10).unwrap(), 0.0);
    }
}
