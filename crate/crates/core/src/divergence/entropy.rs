//! Rényi entropies and conditional Rényi entropies.

use super::{d_alpha_z, AlphaZ};
use crate::error::{Error, Result};
use crate::log_sum_exp;
use crate::operator::{c64, CMatrix, HermitianOperator};
use crate::optim::nelder_mead;
use crate::random;
use serde::{Deserialize, Serialize};

/// `S_α(ρ) = ln Tr ρ^α / (1-α)`, cross-checked against `−D_{α,α}(ρ‖I)`.
pub fn renyi_entropy(rho: &HermitianOperator, alpha: f64) -> Result<f64> {
    let p = AlphaZ::sandwiched(alpha)?;
    rho.check_psd()?;
    let s = rho.spectral()?;
    if s.effective_rank() == 0 {
        return Err(Error::InvalidInput("ρ is the zero operator".into()));
    }
    let direct = log_sum_exp(s.support_eigenvalues().iter().map(|l| alpha * l.ln())) / (1.0 - alpha);
    let via_divergence = -d_alpha_z(rho, &HermitianOperator::identity(rho.dim()), p)?.value;
    if (direct - via_divergence).abs() > 1e-10 * direct.abs().max(1.0) {
        return Err(Error::Numerical(format!(
            "Rényi entropy routes disagree: {direct} vs {via_divergence}"
        )));
    }
    Ok(direct)
}

fn check_bipartition(rho_ab: &HermitianOperator, d_a: usize, d_b: usize) -> Result<()> {
    if d_a == 0 || d_b == 0 || d_a * d_b != rho_ab.dim() {
        return Err(Error::InvalidInput(format!(
            "bipartition {d_a}×{d_b} does not match dimension {}",
            rho_ab.dim()
        )));
    }
    Ok(())
}

/// `Tr_A ρ_AB` with the `A ⊗ B` index convention `a·d_B + b`.
pub fn partial_trace_a(rho_ab: &HermitianOperator, d_a: usize, d_b: usize) -> Result<HermitianOperator> {
    check_bipartition(rho_ab, d_a, d_b)?;
    let m = rho_ab.matrix();
    let out = CMatrix::from_fn(d_b, d_b, |b, bp| (0..d_a).map(|a| m[(a * d_b + b, a * d_b + bp)]).sum());
    Ok(HermitianOperator::from_matrix_hermitized(out))
}

/// `Tr_B ρ_AB`.
pub fn partial_trace_b(rho_ab: &HermitianOperator, d_a: usize, d_b: usize) -> Result<HermitianOperator> {
    check_bipartition(rho_ab, d_a, d_b)?;
    let m = rho_ab.matrix();
    let out = CMatrix::from_fn(d_a, d_a, |a, ap| (0..d_b).map(|b| m[(a * d_b + b, ap * d_b + b)]).sum());
    Ok(HermitianOperator::from_matrix_hermitized(out))
}

/// `S↓_{α,z}(A|B) = −D_{α,z}(ρ_AB ‖ I_A ⊗ ρ_B)`.
pub fn cond_entropy_down(rho_ab: &HermitianOperator, d_a: usize, d_b: usize, p: AlphaZ) -> Result<f64> {
    let rho_b = partial_trace_a(rho_ab, d_a, d_b)?;
    let sigma = HermitianOperator::identity(d_a).kron(&rho_b);
    Ok(-d_alpha_z(rho_ab, &sigma, p)?.value)
}

/// Settings for the multi-start search behind [`cond_entropy_up`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MinimizerConfig {
    pub random_starts: usize,
    pub seed: u64,
    pub max_evals: usize,
    pub ftol: f64,
}

impl Default for MinimizerConfig {
    fn default() -> Self {
        Self { random_starts: 20, seed: 0, max_evals: 4000, ftol: 1e-13 }
    }
}

#[derive(Clone, Debug)]
pub struct CondEntropyUp {
    /// `S↑ = −min_ω D_{α,z}(ρ_AB ‖ I_A ⊗ ω_B)` over the searched states.
    pub value: f64,
    pub minimizer: HermitianOperator,
    /// Spread between the worst and best local minima found.
    pub gap_estimate: f64,
    pub evaluations: usize,
}

fn omega_from_params(x: &[f64], d: usize) -> HermitianOperator {
    let w = CMatrix::from_fn(d, d, |i, j| nalgebra::Complex::new(x[2 * (i * d + j)], x[2 * (i * d + j) + 1]));
    let m = &w * w.adjoint();
    let tr: f64 = m.diagonal().iter().map(|z| z.re).sum();
    HermitianOperator::from_matrix_hermitized(m / c64(tr.max(1e-300)))
}

fn params_from_sqrt(w: &CMatrix) -> Vec<f64> {
    let d = w.nrows();
    let mut x = Vec::with_capacity(2 * d * d);
    for i in 0..d {
        for j in 0..d {
            x.push(w[(i, j)].re);
            x.push(w[(i, j)].im);
        }
    }
    x
}

/// `S↑_{α,z}(A|B) = −inf_{ω_B} D_{α,z}(ρ_AB ‖ I_A ⊗ ω_B)`, searched by
/// Nelder–Mead over `ω = WW*/Tr(WW*)` from `ω = ρ_B` and `random_starts`
/// random starting points. The result is never below `S↓`.
pub fn cond_entropy_up(
    rho_ab: &HermitianOperator,
    d_a: usize,
    d_b: usize,
    p: AlphaZ,
    opt: &MinimizerConfig,
) -> Result<CondEntropyUp> {
    let rho_b = partial_trace_a(rho_ab, d_a, d_b)?;
    let id_a = HermitianOperator::identity(d_a);
    let mut objective = |x: &[f64]| -> f64 {
        let omega = omega_from_params(x, d_b);
        match d_alpha_z(rho_ab, &id_a.kron(&omega), p) {
            Ok(v) => v.value,
            Err(_) => f64::INFINITY,
        }
    };

    let mut starts = vec![params_from_sqrt(rho_b.power(0.5)?.matrix())];
    let mut rng = random::seeded(opt.seed);
    for _ in 0..opt.random_starts {
        starts.push(params_from_sqrt(&random::ginibre(d_b, d_b, &mut rng)));
    }

    let mut results = Vec::with_capacity(starts.len());
    let mut evaluations = 0;
    for x0 in &starts {
        let m = nelder_mead(&mut objective, x0, 0.2, opt.ftol, opt.max_evals);
        evaluations += m.evaluations;
        results.push(m);
    }
    let best = results
        .iter()
        .filter(|m| m.value.is_finite())
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .ok_or_else(|| Error::Numerical("no finite objective value in S↑ search".into()))?;
    let worst = results.iter().filter(|m| m.value.is_finite()).map(|m| m.value).fold(f64::MIN, f64::max);
    Ok(CondEntropyUp {
        value: -best.value,
        minimizer: omega_from_params(&best.x, d_b),
        gap_estimate: worst - best.value,
        evaluations,
    })
}
