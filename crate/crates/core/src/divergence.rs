//! Rényi (α,z)-divergences and their special cases on finite matrices.
//!
//! For PSD `ρ, σ` with `supp ρ ⊆ supp σ`,
//!
//! ```text
//! ρ_{σ,α,z} = σ^{(1-α)/2z} ρ^{α/z} σ^{(1-α)/2z}
//! Q_{α,z}   = Tr ρ_{σ,α,z}^z = ‖σ^{(1-α)/2z} ρ^{α/2z}‖_{2z}^{2z}
//! D_{α,z}   = log Q_{α,z} / (α-1)
//! ```
//!
//! and all of these are `+∞` when the supports do not nest. Negative powers
//! act on the support only. `Q` is evaluated by both expressions and their
//! agreement is checked; disagreement is reported as a numerical failure.

use crate::error::{Error, Result};
use crate::extended::{ExtendedValue, Reason};
use crate::log_sum_exp;
use crate::operator::{c64, singular_values, support_leq, CMatrix, HermitianOperator};
use serde::{Deserialize, Serialize};

mod entropy;

pub use entropy::{
    cond_entropy_down, cond_entropy_up, partial_trace_a, partial_trace_b, renyi_entropy,
    CondEntropyUp, MinimizerConfig,
};

/// Relative agreement required between the two closed forms of `Q`.
pub const Q_AGREEMENT_TOL: f64 = 1e-8;

/// A validated parameter pair `(α, z) ∈ (1,∞) × (0,∞)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawAlphaZ")]
pub struct AlphaZ {
    alpha: f64,
    z: f64,
}

#[derive(Deserialize)]
struct RawAlphaZ {
    alpha: f64,
    z: f64,
}

impl TryFrom<RawAlphaZ> for AlphaZ {
    type Error = Error;
    fn try_from(r: RawAlphaZ) -> Result<Self> {
        AlphaZ::new(r.alpha, r.z)
    }
}

impl AlphaZ {
    pub fn new(alpha: f64, z: f64) -> Result<Self> {
        if !(alpha > 1.0) || !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!("α must be a finite number > 1, got {alpha}")));
        }
        if !(z > 0.0) || !z.is_finite() {
            return Err(Error::InvalidParameter(format!("z must be a finite number > 0, got {z}")));
        }
        Ok(Self { alpha, z })
    }

    /// `z = α`.
    pub fn sandwiched(alpha: f64) -> Result<Self> {
        Self::new(alpha, alpha)
    }

    /// `z = 1`.
    pub fn petz(alpha: f64) -> Result<Self> {
        Self::new(alpha, 1.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    /// `α/z`
    pub fn rho_exponent(&self) -> f64 {
        self.alpha / self.z
    }

    /// `(α-1)/z`
    pub fn sigma_exponent(&self) -> f64 {
        (self.alpha - 1.0) / self.z
    }

    /// `(1-α)/(2z)`
    pub fn sandwich_exponent(&self) -> f64 {
        (1.0 - self.alpha) / (2.0 * self.z)
    }
}

/// The operator `ρ_{σ,α,z}` or `+∞` when the supports do not nest.
#[derive(Clone, Debug)]
pub enum RhoSigma {
    Operator(HermitianOperator),
    Infinite(ExtendedValue),
}

pub(crate) fn validate_pair(rho: &HermitianOperator, sigma: &HermitianOperator) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), sigma.dim()));
    }
    rho.check_psd()?;
    sigma.check_psd()?;
    if rho.is_zero()? {
        return Err(Error::InvalidInput("ρ is the zero operator".into()));
    }
    if sigma.is_zero()? {
        return Err(Error::InvalidInput("σ is the zero operator".into()));
    }
    Ok(())
}

/// `σ^{(1-α)/2z} ρ^{α/z} σ^{(1-α)/2z}` on `supp σ`.
pub fn rho_sigma_alpha_z(rho: &HermitianOperator, sigma: &HermitianOperator, p: AlphaZ) -> Result<RhoSigma> {
    validate_pair(rho, sigma)?;
    if !support_leq(rho, sigma)? {
        return Ok(RhoSigma::Infinite(ExtendedValue::pos_inf(Reason::SupportViolation)));
    }
    Ok(RhoSigma::Operator(sandwich_operator(rho, sigma, p)?))
}

/// `M = Λ_σ^{(1-α)/2z} (U_σ* U_ρ) Λ_ρ^{α/2z}` on the two supports, so that
/// `σ^{(1-α)/2z} ρ^{α/2z} = U_σ M U_ρ*` and `ρ_{σ,α,z} = U_σ M M* U_σ*`.
/// Building `M` entrywise keeps small eigenvalues of either operator from
/// being swamped by rounding in the dense powers.
fn sandwich_factor(rho: &HermitianOperator, sigma: &HermitianOperator, p: AlphaZ) -> Result<(CMatrix, CMatrix)> {
    let ss = sigma.spectral()?;
    let rs = rho.spectral()?;
    let us = ss.support_basis();
    let ur = rs.support_basis();
    let mut m = us.adjoint() * &ur;
    let e = p.sandwich_exponent();
    let h = p.rho_exponent() / 2.0;
    for (i, ls) in ss.support_eigenvalues().iter().enumerate() {
        let fi = ls.powf(e);
        for (j, lr) in rs.support_eigenvalues().iter().enumerate() {
            m[(i, j)] *= c64(fi * lr.powf(h));
        }
    }
    Ok((m, us))
}

fn sandwich_operator(rho: &HermitianOperator, sigma: &HermitianOperator, p: AlphaZ) -> Result<HermitianOperator> {
    let (m, us) = sandwich_factor(rho, sigma, p)?;
    Ok(HermitianOperator::from_matrix_hermitized(&us * (&m * m.adjoint()) * us.adjoint())
        .with_rank_tol(rho.rank_tol()))
}

/// `ln Q_{α,z}(ρ‖σ)`, `+∞` on support violation.
pub fn log_q_alpha_z(rho: &HermitianOperator, sigma: &HermitianOperator, p: AlphaZ) -> Result<ExtendedValue> {
    validate_pair(rho, sigma)?;
    if !support_leq(rho, sigma)? {
        return Ok(ExtendedValue::pos_inf(Reason::SupportViolation));
    }
    let z = p.z();
    // with supp ρ ≤ supp σ both forms have rank exactly rank ρ
    let rank = rho.spectral()?.effective_rank();
    let (m, _) = sandwich_factor(rho, sigma, p)?;

    // Tr ρ_{σ,α,z}^z
    let x = HermitianOperator::from_matrix_hermitized(&m * m.adjoint());
    let mu = x.spectral()?.eigenvalues().to_vec();
    let first = log_sum_exp(mu.iter().take(rank).map(|l| z * l.max(0.0).ln()));

    // ‖σ^{(1-α)/2z} ρ^{α/2z}‖_{2z}^{2z}
    let sv = singular_values(&m)?;
    let second = log_sum_exp(sv.iter().take(rank).map(|v| 2.0 * z * v.ln()));

    if !first.is_finite() || !second.is_finite() {
        return Err(Error::Numerical(format!("Q evaluation produced ln Q = {first} / {second}")));
    }
    // eigenvalues of M M* carry an absolute error of order ε‖M‖², which the
    // z-th power turns into a floor that dominates for small z
    let mu_max = mu.first().copied().unwrap_or(0.0);
    let floor = rank as f64 * (8.0 * mu.len() as f64 * f64::EPSILON * mu_max).powf(z);
    let tol = Q_AGREEMENT_TOL * (1.0 + second.abs()) + floor / second.exp().max(f64::MIN_POSITIVE);
    if (first - second).abs() > tol {
        return Err(Error::Numerical(format!(
            "closed forms of Q disagree: ln Q = {first} vs {second}"
        )));
    }
    Ok(ExtendedValue::finite(second))
}

/// `Q_{α,z}(ρ‖σ)`.
pub fn q_alpha_z(rho: &HermitianOperator, sigma: &HermitianOperator, p: AlphaZ) -> Result<ExtendedValue> {
    let lq = log_q_alpha_z(rho, sigma, p)?;
    if !lq.is_finite() {
        return Ok(lq);
    }
    let q = lq.value.exp();
    if !q.is_finite() {
        return Err(Error::Numerical(format!("Q overflows (ln Q = {}); use log_q_alpha_z", lq.value)));
    }
    Ok(ExtendedValue::finite(q))
}

/// `D_{α,z}(ρ‖σ) = ln Q_{α,z} / (α-1)`.
pub fn d_alpha_z(rho: &HermitianOperator, sigma: &HermitianOperator, p: AlphaZ) -> Result<ExtendedValue> {
    Ok(log_q_alpha_z(rho, sigma, p)?.map_finite(|l| l / (p.alpha() - 1.0)))
}

/// `D̃_{α,z}(ρ‖σ) = D_{α,z}(ρ‖σ) − ln Tr ρ / (α-1)`.
pub fn d_tilde(rho: &HermitianOperator, sigma: &HermitianOperator, p: AlphaZ) -> Result<ExtendedValue> {
    let tr = rho.trace();
    Ok(d_alpha_z(rho, sigma, p)?.map_finite(|d| d - tr.ln() / (p.alpha() - 1.0)))
}

/// Sandwiched Rényi divergence `D*_α = D_{α,α}`.
pub fn d_sandwiched(rho: &HermitianOperator, sigma: &HermitianOperator, alpha: f64) -> Result<ExtendedValue> {
    d_alpha_z(rho, sigma, AlphaZ::sandwiched(alpha)?)
}

/// Petz-type Rényi divergence `D_{α,1}`.
pub fn d_petz(rho: &HermitianOperator, sigma: &HermitianOperator, alpha: f64) -> Result<ExtendedValue> {
    d_alpha_z(rho, sigma, AlphaZ::petz(alpha)?)
}

/// `D̃*_α`.
pub fn d_tilde_sandwiched(rho: &HermitianOperator, sigma: &HermitianOperator, alpha: f64) -> Result<ExtendedValue> {
    d_tilde(rho, sigma, AlphaZ::sandwiched(alpha)?)
}

/// Max-relative entropy `ln inf{λ : ρ ≤ λσ}`, the log of the largest
/// eigenvalue of `σ^{-1/2} ρ σ^{-1/2}` on `supp σ`.
pub fn d_max(rho: &HermitianOperator, sigma: &HermitianOperator) -> Result<ExtendedValue> {
    validate_pair(rho, sigma)?;
    if !support_leq(rho, sigma)? {
        return Ok(ExtendedValue::pos_inf(Reason::SupportViolation));
    }
    let s = sigma.spectral()?.function_on_support(|l| l.powf(-0.5));
    let m = HermitianOperator::from_matrix_hermitized(&s * rho.matrix() * &s);
    let top = m.spectral()?.lambda_max();
    if !(top > 0.0) {
        return Err(Error::Numerical("σ^{-1/2}ρσ^{-1/2} has no positive eigenvalue".into()));
    }
    Ok(ExtendedValue::finite(top.ln()))
}

/// Umegaki relative entropy `Tr ρ(log ρ − log σ)` with `log 0 := 0` on
/// kernels; `+∞` when `supp ρ ⊄ supp σ`.
pub fn relative_entropy(rho: &HermitianOperator, sigma: &HermitianOperator) -> Result<ExtendedValue> {
    validate_pair(rho, sigma)?;
    if !support_leq(rho, sigma)? {
        return Ok(ExtendedValue::pos_inf(Reason::SupportViolation));
    }
    let rs = rho.spectral()?;
    let ss = sigma.spectral()?;
    let u = rs.support_basis();
    let v = ss.support_basis();
    let overlaps = u.adjoint() * &v;
    let lam = rs.support_eigenvalues();
    let mu = ss.support_eigenvalues();
    let mut total = 0.0;
    for (i, &l) in lam.iter().enumerate() {
        let ll = l.ln();
        for (j, &m) in mu.iter().enumerate() {
            let w = overlaps[(i, j)].norm_sqr();
            if w > 0.0 {
                total += w * l * (ll - m.ln());
            }
        }
    }
    Ok(ExtendedValue::finite(total))
}

/// `‖ρ_{σ,α,z}‖_∞`, the least `λ` with `ρ^{α/z} ≤ λ σ^{(α-1)/z}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dominance {
    pub lambda: ExtendedValue,
    /// Membership of `ρ` in the dominance domain of `σ` (always true in finite
    /// dimension when the supports nest).
    pub member: bool,
}

pub fn lambda_min_dominance(rho: &HermitianOperator, sigma: &HermitianOperator, p: AlphaZ) -> Result<Dominance> {
    match rho_sigma_alpha_z(rho, sigma, p)? {
        RhoSigma::Infinite(v) => Ok(Dominance { lambda: v, member: false }),
        RhoSigma::Operator(r) => {
            let top = r.spectral()?.lambda_max();
            Ok(Dominance { lambda: ExtendedValue::finite(top), member: true })
        }
    }
}
