//! Normalising series for the diagonal models.

use crate::error::{Error, Result};

// B_{2k} / (2k)! for k = 1..=8
const BERNOULLI_OVER_FACTORIAL: [f64; 8] = [
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40_320.0,
    5.0 / 66.0 / 3_628_800.0,
    -691.0 / 2730.0 / 479_001_600.0,
    7.0 / 6.0 / 87_178_291_200.0,
    -3617.0 / 510.0 / 20_922_789_888_000.0,
];

/// ζ(s) for real `s > 1` by Euler–Maclaurin summation with 20 explicit terms
/// and 8 correction terms (remainder far below 1e-15 for `s ≤ 60`).
pub fn riemann_zeta(s: f64) -> Result<f64> {
    if !(s > 1.0) || !s.is_finite() {
        return Err(Error::InvalidParameter(format!("zeta needs s > 1, got {s}")));
    }
    const N: usize = 20;
    let nf = N as f64;
    // small terms first
    let mut head = 0.0;
    for n in (1..N).rev() {
        head += (n as f64).powf(-s);
    }
    let mut tail = nf.powf(1.0 - s) / (s - 1.0) + 0.5 * nf.powf(-s);
    let mut rising = s; // s(s+1)…(s+2k-2)
    let mut npow = nf.powf(-s - 1.0);
    for (k, coeff) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        if k > 0 {
            let m = (2 * k) as f64;
            rising *= (s + m - 1.0) * (s + m);
            npow /= nf * nf;
        }
        tail += coeff * rising * npow;
    }
    Ok(head + tail)
}

/// `Σ_{n≥1} n^{-n^γ}` with a rigorous tail bound below `1e-16` relative.
pub fn superpower_sum(gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidParameter(format!("superpower needs γ > 0, got {gamma}")));
    }
    const MAX_TERMS: usize = 50_000_000;
    let mut sum = 0.0;
    for n in 1..=MAX_TERMS {
        let nf = n as f64;
        let e = nf.powf(gamma);
        sum += (-e * nf.ln()).exp();
        if n >= 2 && e > 1.0 {
            // Σ_{m>n} m^{-m^γ} ≤ Σ_{m>n} m^{-e} ≤ n^{1-e}/(e-1)
            let bound = (nf.ln() * (1.0 - e)).exp() / (e - 1.0);
            if bound < 1e-16 * sum {
                return Ok(sum);
            }
        }
    }
    Err(Error::Numerical(format!("superpower series with γ={gamma} did not converge")))
}
