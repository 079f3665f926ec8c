use approx::assert_relative_eq;
use ergoclust::bounds::{bosq_tail_terms, gamma_terms, selection_product};
use ergoclust::{default_schedule, Alg2Params64, MixingSchedule64};

fn params(n: u64, m: u64, q: u64, delta: f64) -> Alg2Params64 {
    Alg2Params64 {
        n,
        m_n: m,
        l_n: 1,
        b_n: 1,
        q_n: q,
        delta_n: delta,
        num_samples: 2,
    }
}

// The exponential part of γ(δ) is half the tail bound at ε = δ/2; the mixing
// part is half the tail bound at ε = δ on a window of length n − 2m.
#[test]
fn gamma_halves_the_tail_bound_termwise() {
    let alpha = MixingSchedule64::polynomial(0.7, 1.5).unwrap();
    for &(n, m, q) in &[(100u64, 1u64, 8u64), (1000, 3, 31), (5000, 2, 70)] {
        for &delta in &[0.05, 0.3, 1.0, 1.9] {
            let g = gamma_terms(delta, &params(n, m, q, 0.5), &alpha).unwrap();
            let half = bosq_tail_terms(n - 2 * m, q, delta / 2.0, &alpha).unwrap();
            let full = bosq_tail_terms(n - 2 * m, q, delta, &alpha).unwrap();
            assert_relative_eq!(g.exponential, half.exponential / 2.0, max_relative = 1e-14);
            assert_relative_eq!(g.mixing, full.mixing / 2.0, max_relative = 1e-14);
        }
    }
}

#[test]
fn default_schedule_drives_selection_product_down_under_fast_mixing() {
    let alpha = MixingSchedule64::exponential(1.0, 0.5).unwrap();
    let at = |n: u64| selection_product(&default_schedule(n, 6, &alpha).unwrap(), &alpha).unwrap();
    assert!(at(1 << 40) < at(1 << 24));
}
