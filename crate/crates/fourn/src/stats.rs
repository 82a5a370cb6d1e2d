//! Paired comparison of methods across replications.

use serde::Serialize;

/// One-sided sign test of "`a` is smaller than `b`" on paired values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignTest {
    /// Pairs with `a < b`.
    pub wins: usize,
    /// Pairs with `a > b`.
    pub losses: usize,
    pub ties: usize,
    /// `P(Bin(wins + losses, 1/2) ≥ wins)`; ties are discarded.
    pub p_value: f64,
}

pub fn sign_test_less(a: &[f64], b: &[f64]) -> SignTest {
    assert_eq!(a.len(), b.len(), "sign test needs paired samples");
    let wins = a.iter().zip(b).filter(|(x, y)| x < y).count();
    let losses = a.iter().zip(b).filter(|(x, y)| x > y).count();
    let ties = a.len() - wins - losses;
    SignTest {
        wins,
        losses,
        ties,
        p_value: binomial_upper_tail(wins + losses, wins),
    }
}

/// `P(X ≥ k)` for `X ~ Bin(n, 1/2)`.
pub fn binomial_upper_tail(n: usize, k: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k > n {
        return 0.0;
    }
    // Accumulate C(n, j) / 2ⁿ in log space to stay finite for large n.
    let ln_half = (0.5f64).ln() * n as f64;
    let mut ln_c = 0.0;
    let mut total = 0.0;
    for j in 0..=n {
        if j > 0 {
            ln_c += ((n - j + 1) as f64).ln() - (j as f64).ln();
        }
        if j >= k {
            total += (ln_c + ln_half).exp();
        }
    }
    total.min(1.0)
}
