//! Error-probability bounds for threshold clustering under α-mixing, and the
//! default parameter schedule derived from them.
//!
//! For a joint distribution whose α-mixing coefficients are bounded by a
//! known sequence `α_t`, the probability that threshold clustering misses the
//! target partition is at most
//!
//! ```text
//! 2N(N+1) (m_n l_n b_n γ(δ_n) + γ(ε_ρ)),
//! γ(δ) = 2 exp(−q_n δ²/32) + 11 (1 + 4/δ)^{1/2} q_n α_{(n − 2m_n)/(2q_n)}
//! ```
//!
//! which rests on the concentration inequality for α-mixing sums
//!
//! ```text
//! P(|Σ Y_i| > nε) ≤ 4 exp(−qε²/8) + 22 (1 + 4/ε)^{1/2} q α(n/(2q)).
//! ```
//!
//! Non-integer mixing indices are floored and clamped to at least 1.

use serde::{Deserialize, Serialize};

use crate::distance::TruncationSchedule;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Known upper bound `α_t` on the mixing coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "lowercase")]
pub enum MixingSchedule<T> {
    /// `α_t = c·r^t`.
    Exponential { c: T, r: T },
    /// `α_t = c·t^{−s}`.
    Polynomial { c: T, s: T },
    /// `α_t = values[t − 1]`; the last value is reused beyond the table.
    Tabulated { values: Vec<T> },
}

impl<T: Scalar> MixingSchedule<T> {
    pub fn exponential(c: T, r: T) -> Result<Self> {
        let s = MixingSchedule::Exponential { c, r };
        s.validate()?;
        Ok(s)
    }

    pub fn polynomial(c: T, s: T) -> Result<Self> {
        let sched = MixingSchedule::Polynomial { c, s };
        sched.validate()?;
        Ok(sched)
    }

    pub fn tabulated(values: Vec<T>) -> Result<Self> {
        let s = MixingSchedule::Tabulated { values };
        s.validate()?;
        Ok(s)
    }

    /// `α ≡ 0`: independent observations.
    pub fn independent() -> Self {
        MixingSchedule::Tabulated {
            values: vec![T::zero()],
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            MixingSchedule::Exponential { c, r } => {
                if !(*c >= T::zero()) || !c.is_finite() {
                    return Err(Error::invalid("c", "must be finite and nonnegative"));
                }
                if !(*r > T::zero() && *r < T::one()) {
                    return Err(Error::invalid("r", "must lie in (0, 1)"));
                }
            }
            MixingSchedule::Polynomial { c, s } => {
                if !(*c >= T::zero()) || !c.is_finite() {
                    return Err(Error::invalid("c", "must be finite and nonnegative"));
                }
                if !(*s > T::zero()) || !s.is_finite() {
                    return Err(Error::invalid("s", "must be positive"));
                }
            }
            MixingSchedule::Tabulated { values } => {
                if values.is_empty() {
                    return Err(Error::invalid("values", "table is empty"));
                }
                if values.iter().any(|v| !(*v >= T::zero() && *v <= T::one())) {
                    return Err(Error::invalid("values", "entries must lie in [0, 1]"));
                }
                if values.windows(2).any(|w| w[1] > w[0]) {
                    return Err(Error::invalid("values", "table must be non-increasing"));
                }
            }
        }
        Ok(())
    }

    /// `α_t` for `t ≥ 1`, capped at 1.
    pub fn at(&self, t: u64) -> T {
        let t = t.max(1);
        let v = match self {
            MixingSchedule::Exponential { c, r } => *c * r.powf(T::from_u64(t).unwrap()),
            MixingSchedule::Polynomial { c, s } => *c * T::from_u64(t).unwrap().powf(-*s),
            MixingSchedule::Tabulated { values } => values[(t as usize - 1).min(values.len() - 1)],
        };
        v.min(T::one())
    }
}

/// Parameters of threshold clustering at minimal sample length `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Alg2Params<T> {
    pub n: u64,
    pub m_n: u64,
    pub l_n: u64,
    pub b_n: u64,
    pub q_n: u64,
    pub delta_n: T,
    pub num_samples: u64,
}

impl<T: Scalar> Alg2Params<T> {
    pub fn validate(&self) -> Result<()> {
        if self.m_n == 0 || self.l_n == 0 || self.b_n == 0 {
            return Err(Error::invalid("m_n/l_n/b_n", "must be at least 1"));
        }
        if self.q_n < 1 || self.q_n > self.n / 2 {
            return Err(Error::invalid(
                "q_n",
                format!("must lie in [1, n/2] = [1, {}]", self.n / 2),
            ));
        }
        if !(self.delta_n > T::zero() && self.delta_n < T::one()) {
            return Err(Error::invalid("delta_n", "must lie in (0, 1)"));
        }
        if self.n <= 2 * self.m_n {
            return Err(Error::invalid("n", "must exceed 2·m_n"));
        }
        if self.num_samples == 0 {
            return Err(Error::invalid("num_samples", "must be at least 1"));
        }
        Ok(())
    }

    /// `max(1, floor((n − 2m_n) / (2q_n)))`
    pub fn mixing_index(&self) -> u64 {
        ((self.n - 2 * self.m_n) / (2 * self.q_n)).max(1)
    }

    /// The truncated-distance schedule these parameters prescribe.
    pub fn truncation(&self) -> Result<TruncationSchedule> {
        let l = u32::try_from(self.l_n).map_err(|_| Error::invalid("l_n", "too large"))?;
        TruncationSchedule::new(self.m_n as usize, l)
    }
}

/// The two summands of a deviation bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundTerms<T> {
    pub exponential: T,
    pub mixing: T,
}

impl<T: Scalar> BoundTerms<T> {
    pub fn total(&self) -> T {
        self.exponential + self.mixing
    }
}

fn check_positive<T: Scalar>(name: &'static str, v: T) -> Result<()> {
    if !(v > T::zero()) || !v.is_finite() {
        return Err(Error::invalid(name, "must be positive and finite"));
    }
    Ok(())
}

/// `γ(δ)` split into its exponential and mixing summands.
pub fn gamma_terms<T: Scalar>(
    delta: T,
    p: &Alg2Params<T>,
    alpha: &MixingSchedule<T>,
) -> Result<BoundTerms<T>> {
    check_positive("delta", delta)?;
    p.validate()?;
    alpha.validate()?;
    let q = T::from_u64(p.q_n).unwrap();
    let exponential = T::lit(2.0) * (-(q * delta * delta) / T::lit(32.0)).exp();
    let mixing =
        T::lit(11.0) * (T::one() + T::lit(4.0) / delta).sqrt() * q * alpha.at(p.mixing_index());
    Ok(BoundTerms {
        exponential,
        mixing,
    })
}

/// Per-pair deviation bound `γ(δ)`; may exceed 1.
pub fn gamma<T: Scalar>(delta: T, p: &Alg2Params<T>, alpha: &MixingSchedule<T>) -> Result<T> {
    Ok(gamma_terms(delta, p, alpha)?.total())
}

/// The α-mixing concentration bound, split into its two summands.
pub fn bosq_tail_terms<T: Scalar>(
    n: u64,
    q: u64,
    eps: T,
    alpha: &MixingSchedule<T>,
) -> Result<BoundTerms<T>> {
    if q < 1 || q > n / 2 {
        return Err(Error::invalid(
            "q",
            format!("must lie in [1, n/2] = [1, {}]", n / 2),
        ));
    }
    check_positive("eps", eps)?;
    alpha.validate()?;
    let qf = T::from_u64(q).unwrap();
    let index = (n / (2 * q)).max(1);
    Ok(BoundTerms {
        exponential: T::lit(4.0) * (-(qf * eps * eps) / T::lit(8.0)).exp(),
        mixing: T::lit(22.0) * (T::one() + T::lit(4.0) / eps).sqrt() * qf * alpha.at(index),
    })
}

/// `4 exp(−qε²/8) + 22 (1 + 4/ε)^{1/2} q α(n/(2q))`.
pub fn bosq_tail<T: Scalar>(n: u64, q: u64, eps: T, alpha: &MixingSchedule<T>) -> Result<T> {
    Ok(bosq_tail_terms(n, q, eps, alpha)?.total())
}

/// Misclustering probability bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorBound<T> {
    pub gamma_delta: T,
    pub gamma_epsilon: T,
    /// `2N(N+1)(m_n l_n b_n γ(δ_n) + γ(ε_ρ))`; may exceed 1.
    pub raw: T,
    /// `min(1, raw)`.
    pub clamped: T,
}

/// Combines already evaluated `γ(δ_n)` and `γ(ε_ρ)` into the bound.
pub fn error_bound_from_gammas<T: Scalar>(
    num_samples: u64,
    m_n: u64,
    l_n: u64,
    b_n: u64,
    gamma_delta: T,
    gamma_epsilon: T,
) -> Result<ErrorBound<T>> {
    if gamma_delta < T::zero() || gamma_epsilon < T::zero() {
        return Err(Error::invalid("gamma", "must be nonnegative"));
    }
    let nn = T::from_u64(num_samples).unwrap();
    let cells = T::from_u64(m_n).unwrap() * T::from_u64(l_n).unwrap() * T::from_u64(b_n).unwrap();
    let raw = T::lit(2.0) * nn * (nn + T::one()) * (cells * gamma_delta + gamma_epsilon);
    Ok(ErrorBound {
        gamma_delta,
        gamma_epsilon,
        raw,
        clamped: raw.min(T::one()),
    })
}

/// Bound on `P(T ≠ I)` for threshold clustering.
///
/// `epsilon_rho` is the (unknown) separation of the generating
/// distributions, supplied as a hypothetical.
pub fn error_bound<T: Scalar>(
    p: &Alg2Params<T>,
    alpha: &MixingSchedule<T>,
    epsilon_rho: T,
) -> Result<ErrorBound<T>> {
    check_positive("epsilon_rho", epsilon_rho)?;
    let gamma_delta = gamma(p.delta_n, p, alpha)?;
    let gamma_epsilon = gamma(epsilon_rho, p, alpha)?;
    error_bound_from_gammas(
        p.num_samples,
        p.m_n,
        p.l_n,
        p.b_n,
        gamma_delta,
        gamma_epsilon,
    )
}

/// Smallest `n` accepted by [`default_schedule`].
pub const MIN_SCHEDULE_LENGTH: u64 = 16;

/// Parameter schedule for minimal sample length `n`:
/// `m_n = l_n = max(1, ⌈0.5·√log2 n⌉)`, `b_n = 2^{l_n m_n}` (all dyadic cells
/// of `[0,1]^{m_n}`), `q_n = ⌊√n⌋`, `δ_n = n^{−1/8}`.
///
/// `alpha` is validated but does not enter the formulas; use
/// [`selection_product`] to check the decay condition for a given bound.
pub fn default_schedule<T: Scalar>(
    n: u64,
    num_samples: u64,
    alpha: &MixingSchedule<T>,
) -> Result<Alg2Params<T>> {
    alpha.validate()?;
    if n < MIN_SCHEDULE_LENGTH {
        return Err(Error::invalid(
            "n",
            format!("must be at least {MIN_SCHEDULE_LENGTH}"),
        ));
    }
    let nf = n as f64;
    let depth = ((0.5 * nf.log2().sqrt()).ceil() as u64).max(1);
    let b_n = 1u64
        .checked_shl((depth * depth) as u32)
        .filter(|_| depth * depth < 64)
        .ok_or_else(|| Error::invalid("n", "cell budget overflows"))?;
    let p = Alg2Params {
        n,
        m_n: depth,
        l_n: depth,
        b_n,
        q_n: nf.sqrt().floor() as u64,
        delta_n: T::lit(nf.powf(-0.125)),
        num_samples: num_samples.max(1),
    };
    p.validate()?;
    Ok(p)
}

/// `m_n l_n b_n (exp(−q_n δ_n²) + δ_n^{−1/2} q_n α_{(n−2m_n)/(2q_n)})`, which
/// must vanish as `n` grows for the schedule to be consistent.
pub fn selection_product<T: Scalar>(p: &Alg2Params<T>, alpha: &MixingSchedule<T>) -> Result<T> {
    p.validate()?;
    let q = T::from_u64(p.q_n).unwrap();
    let cells = T::from_u64(p.m_n * p.l_n).unwrap() * T::from_u64(p.b_n).unwrap();
    let d = p.delta_n;
    Ok(cells * ((-(q * d * d)).exp() + d.powf(T::lit(-0.5)) * q * alpha.at(p.mixing_index())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(n: u64, m: u64, q: u64) -> Alg2Params<f64> {
        Alg2Params {
            n,
            m_n: m,
            l_n: 1,
            b_n: 1,
            q_n: q,
            delta_n: 0.5,
            num_samples: 2,
        }
    }

    #[test]
    fn gamma_without_mixing() {
        let g = gamma(1.0, &params(100, 1, 8), &MixingSchedule::independent()).unwrap();
        // 2·e^{-8/32}
        assert_relative_eq!(g, 1.557_601_566_052_36, epsilon = 1e-9);
    }

    #[test]
    fn gamma_with_polynomial_mixing() {
        let alpha = MixingSchedule::polynomial(1.0, 1.0).unwrap();
        let p = params(102, 1, 1);
        assert_eq!(p.mixing_index(), 50);
        let g = gamma(4.0, &p, &alpha).unwrap();
        let expected = 2.0 * (-0.5f64).exp() + 11.0 * 2f64.sqrt() / 50.0;
        assert_relative_eq!(g, expected, epsilon = 1e-12);
        assert_relative_eq!(g, 1.524_188_3, epsilon = 1e-7);
    }

    #[test]
    fn gamma_monotone_in_delta() {
        let alpha = MixingSchedule::exponential(1.0, 0.9).unwrap();
        let p = params(1000, 2, 10);
        assert!(gamma(0.5, &p, &alpha).unwrap() >= gamma(1.0, &p, &alpha).unwrap());
    }

    #[test]
    fn bosq_examples() {
        let b = bosq_tail(10, 2, 2.0, &MixingSchedule::independent()).unwrap();
        assert_relative_eq!(b, 4.0 * (-1.0f64).exp(), epsilon = 1e-12);
        assert_relative_eq!(b, 1.471_517_764, epsilon = 1e-9);
        let alpha = MixingSchedule::exponential(0.5, 0.8).unwrap();
        assert!(bosq_tail(100, 3, 1.0, &alpha).unwrap() >= bosq_tail(100, 3, 2.0, &alpha).unwrap());
        assert!(bosq_tail(10, 6, 1.0, &alpha).is_err());
        assert!(bosq_tail(10, 0, 1.0, &alpha).is_err());
    }

    #[test]
    fn error_bound_arithmetic() {
        let b = error_bound_from_gammas(2, 1, 1, 1, 0.1, 0.05).unwrap();
        assert_relative_eq!(b.raw, 1.8, epsilon = 1e-12);
        assert_eq!(b.clamped, 1.0);
        let z = error_bound_from_gammas(2, 1, 1, 1, 0.0, 0.0).unwrap();
        assert_eq!(z.raw, 0.0);
        let doubled = error_bound_from_gammas(2, 1, 1, 2, 0.1, 0.05).unwrap();
        assert_relative_eq!(doubled.raw - b.raw, 12.0 * 0.1, epsilon = 1e-12);
    }

    #[test]
    fn error_bound_rejects_nonpositive_epsilon() {
        let alpha = MixingSchedule::independent();
        let p = params(100, 1, 8);
        assert!(error_bound(&p, &alpha, 0.0).is_err());
        assert!(error_bound(&p, &alpha, -1.0).is_err());
        assert!(error_bound(&p, &alpha, 0.3).is_ok());
    }

    #[test]
    fn default_schedule_at_65536() {
        let alpha = MixingSchedule::exponential(1.0, 0.9).unwrap();
        let p = default_schedule(65536, 6, &alpha).unwrap();
        assert_eq!((p.m_n, p.l_n, p.b_n, p.q_n), (2, 2, 16, 256));
        assert_relative_eq!(p.delta_n, 0.25, epsilon = 1e-15);
        assert!(default_schedule(15, 6, &alpha).is_err());
    }

    #[test]
    fn selection_product_decreases() {
        let alpha = MixingSchedule::exponential(1.0, 0.9).unwrap();
        let at = |n| selection_product(&default_schedule(n, 2, &alpha).unwrap(), &alpha).unwrap();
        assert!(at(4 * 65536) < at(65536));
    }

    #[test]
    fn params_validation() {
        let mut p = params(100, 1, 8);
        assert!(p.validate().is_ok());
        p.q_n = 51;
        assert!(p.validate().is_err());
        p.q_n = 8;
        p.delta_n = 1.0;
        assert!(p.validate().is_err());
        p.delta_n = 0.5;
        p.m_n = 50;
        assert!(p.validate().is_err());
    }

    #[test]
    fn mixing_validation() {
        assert!(MixingSchedule::exponential(1.0, 1.0).is_err());
        assert!(MixingSchedule::polynomial(1.0, 0.0).is_err());
        assert!(MixingSchedule::tabulated(vec![0.5, 0.6]).is_err());
        let t = MixingSchedule::tabulated(vec![0.5, 0.25]).unwrap();
        assert_eq!(t.at(1), 0.5);
        assert_eq!(t.at(9), 0.25);
        assert_eq!(MixingSchedule::exponential(4.0, 0.5).unwrap().at(1), 1.0);
    }
}
