//! Variational representations of `Q_{α,z}` and `ln Q_{α,z}`.
//!
//! For PSD `H` let
//!
//! ```text
//! F(H) = Tr(H^{1/2} ρ^{α/z} H^{1/2})^{z/α}
//! G(H) = Tr(H^{1/2} σ^{(α-1)/z} H^{1/2})^{z/(α-1)}
//! ```
//!
//! Then `Q = sup_H {αF(H) + (1-α)G(H)}` and
//! `ln Q = sup_H {α ln F(H) + (1-α) ln G(H)}` over `H` with `G(H) > 0`.

use crate::divergence::{log_q_alpha_z, AlphaZ};
use crate::error::{Error, Result};
use crate::extended::{ExtendedValue, Reason};
use crate::operator::{
    c64, compress_projection, product_singular_values, spectral_truncation, support_leq, support_projection, CMatrix,
    HermitianOperator,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// `G(H)` at or below this is treated as zero.
pub const G_ADMISSIBLE: f64 = 1e-300;

/// Relative gap below which a certificate is accepted.
pub const CERTIFICATE_TOL: f64 = 1e-6;

/// Objectives above this certify `Q = +∞` in a witness sweep.
pub const UNBOUNDED_CAP: f64 = 1e12;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VariationalWitness {
    #[serde(skip)]
    pub h: Option<HermitianOperator>,
    pub f_value: f64,
    pub g_value: f64,
    pub objective_q: f64,
    /// `None` when `G(H) = 0`.
    pub objective_log_q: Option<f64>,
}

impl VariationalWitness {
    pub fn evaluate(h: HermitianOperator, rho: &HermitianOperator, sigma: &HermitianOperator, p: AlphaZ) -> Result<Self> {
        let f = eval_f(&h, rho, p)?;
        let g = eval_g(&h, sigma, p)?;
        let a = p.alpha();
        Ok(Self {
            h: Some(h),
            f_value: f,
            g_value: g,
            objective_q: a * f + (1.0 - a) * g,
            objective_log_q: (g > G_ADMISSIBLE).then(|| a * f.ln() + (1.0 - a) * g.ln()),
        })
    }
}

/// `Σ s^t` over singular values above a round-off floor.
fn power_sum(sv: &[f64], t: f64) -> f64 {
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0.0;
    }
    let floor = 64.0 * f64::EPSILON * smax * sv.len() as f64;
    sv.iter().filter(|&&s| s > floor).map(|s| s.powf(t)).sum()
}

fn check_dims(h: &HermitianOperator, a: &HermitianOperator) -> Result<()> {
    if h.dim() != a.dim() {
        return Err(Error::DimensionMismatch(h.dim(), a.dim()));
    }
    h.check_psd()?;
    a.check_psd()
}

/// `F(H) = ‖H^{1/2} ρ^{α/2z}‖_{2z/α}^{2z/α}`.
pub fn eval_f(h: &HermitianOperator, rho: &HermitianOperator, p: AlphaZ) -> Result<f64> {
    check_dims(h, rho)?;
    let sv = product_singular_values(h, 0.5, rho, p.rho_exponent() / 2.0)?;
    Ok(power_sum(&sv, 2.0 * p.z() / p.alpha()))
}

/// `G(H) = ‖H^{1/2} σ^{(α-1)/2z}‖_{2z/(α-1)}^{2z/(α-1)}`.
pub fn eval_g(h: &HermitianOperator, sigma: &HermitianOperator, p: AlphaZ) -> Result<f64> {
    check_dims(h, sigma)?;
    let sv = product_singular_values(h, 0.5, sigma, p.sigma_exponent() / 2.0)?;
    Ok(power_sum(&sv, 2.0 * p.z() / (p.alpha() - 1.0)))
}

/// `αF(H) + (1-α)G(H)`.
pub fn q_var_objective(h: &HermitianOperator, rho: &HermitianOperator, sigma: &HermitianOperator, p: AlphaZ) -> Result<f64> {
    let a = p.alpha();
    Ok(a * eval_f(h, rho, p)? + (1.0 - a) * eval_g(h, sigma, p)?)
}

/// `α ln F(H) + (1-α) ln G(H)`; requires `G(H) > 0`.
pub fn logq_var_objective(
    h: &HermitianOperator,
    rho: &HermitianOperator,
    sigma: &HermitianOperator,
    p: AlphaZ,
) -> Result<f64> {
    let g = eval_g(h, sigma, p)?;
    if !(g > G_ADMISSIBLE) {
        return Err(Error::InvalidWitness(format!("G(H) = {g} is not positive")));
    }
    let a = p.alpha();
    Ok(a * eval_f(h, rho, p)?.ln() + (1.0 - a) * g.ln())
}

/// The saturating witness `H = S X^{α-1} S` with `S = σ_n^{(1-α)/2z}` and
/// `X = S ρ^{α/z} S`, where `σ_n = σ𝟙_{(c,d)}(σ)`. With no window the full
/// support of `σ` is used.
pub fn optimizer_h(
    rho: &HermitianOperator,
    sigma: &HermitianOperator,
    p: AlphaZ,
    window: Option<(f64, f64)>,
) -> Result<VariationalWitness> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), sigma.dim()));
    }
    if !support_leq(rho, sigma)? {
        return Err(Error::InvalidInput("supp ρ ⊄ supp σ: no optimizer exists".into()));
    }
    let sigma_n = match window {
        Some((c, d)) => compress_projection(&spectral_truncation(sigma, c, d)?, sigma),
        None => sigma.clone(),
    };
    let ss = sigma_n.spectral()?;
    let u = ss.support_basis();
    let e = p.sandwich_exponent();
    let lam_e: Vec<f64> = ss.support_eigenvalues().iter().map(|l| l.powf(e)).collect();
    // Y = Λ^e U* ρ^{α/z} U Λ^e, so that X = U Y U*
    let rs = rho.spectral()?;
    let mut m = u.adjoint() * rs.support_basis();
    let h_exp = p.rho_exponent() / 2.0;
    for (i, le) in lam_e.iter().enumerate() {
        for (j, lr) in rs.support_eigenvalues().iter().enumerate() {
            m[(i, j)] *= c64(le * lr.powf(h_exp));
        }
    }
    let y = HermitianOperator::from_matrix_hermitized(&m * m.adjoint());
    let yp = y.spectral()?.function_on_support(|l| l.powf(p.alpha() - 1.0));
    let mut core = yp;
    for i in 0..core.nrows() {
        for j in 0..core.ncols() {
            core[(i, j)] *= c64(lam_e[i] * lam_e[j]);
        }
    }
    let h = HermitianOperator::from_matrix_hermitized(&u * core * u.adjoint()).with_rank_tol(1e-14);
    VariationalWitness::evaluate(h, rho, sigma, p)
}

/// Rank-one witnesses `t|x⟩⟨x|` with the best scaling `t` along
/// `x_s = √(1-s)ψ + √s φ`, `σψ = 0`, `⟨ψ,ρψ⟩ > 0`. Their objectives equal
/// `(⟨x,ρ^{α/z}x⟩ / ⟨x,σ^{(α-1)/z}x⟩)^z` and grow without bound as `s → 0`.
pub fn dominance_violation_witnesses(
    rho: &HermitianOperator,
    sigma: &HermitianOperator,
    p: AlphaZ,
    ss: &[f64],
) -> Result<Vec<VariationalWitness>> {
    let d = rho.dim();
    let kernel = CMatrix::identity(d, d) - support_projection(sigma)?.matrix();
    let rk = HermitianOperator::from_matrix_hermitized(&kernel * rho.matrix() * &kernel);
    let ks = rk.spectral()?;
    if ks.lambda_max() <= crate::operator::SUPPORT_TOL * rho.spectral()?.lambda_max() {
        return Err(Error::InvalidInput("supp ρ ⊆ supp σ; no violating direction".into()));
    }
    let psi = ks.eigenvectors().column(0).clone_owned();
    let phi = sigma.spectral()?.eigenvectors().column(0).clone_owned();
    let ra = rho.power(p.rho_exponent())?;
    let sb = sigma.power(p.sigma_exponent())?;
    ss.iter()
        .map(|&s| {
            if !(s > 0.0 && s <= 1.0) {
                return Err(Error::InvalidParameter(format!("s must lie in (0,1], got {s}")));
            }
            let mut x = &psi * c64((1.0 - s).sqrt()) + &phi * c64(s.sqrt());
            let n = x.norm();
            x /= c64(n);
            let a = (x.adjoint() * ra.matrix() * &x)[(0, 0)].re;
            let b = (x.adjoint() * sb.matrix() * &x)[(0, 0)].re;
            // maximiser of α(ta)^{z/α} − (α-1)(tb)^{z/(α-1)} over t > 0
            let (al, z) = (p.alpha(), p.z());
            let big_a = a.powf(z / al);
            let big_b = b.powf(z / (al - 1.0));
            let t = (big_a / big_b).powf(al * (al - 1.0) / z);
            let h = HermitianOperator::from_matrix_hermitized(&x * x.adjoint() * c64(t));
            VariationalWitness::evaluate(h, rho, sigma, p)
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VarCertificate {
    pub q: ExtendedValue,
    #[serde(with = "crate::serde_f64")]
    pub max_objective: f64,
    pub best_index: Option<usize>,
    /// `(Q − max objective)/Q`, `+∞` when `Q` is infinite.
    #[serde(with = "crate::serde_f64")]
    pub relative_gap: f64,
    /// Largest violation of weak duality, `max(objective − Q, 0)/Q`.
    #[serde(with = "crate::serde_f64")]
    pub max_excess: f64,
    pub certified: bool,
}

/// Compare the best witness objective with the closed-form `Q`. For
/// `Q = +∞` the certificate holds when some objective exceeds
/// [`UNBOUNDED_CAP`].
pub fn var_certificate(
    rho: &HermitianOperator,
    sigma: &HermitianOperator,
    p: AlphaZ,
    witnesses: &[HermitianOperator],
) -> Result<VarCertificate> {
    let q = log_q_alpha_z(rho, sigma, p)?;
    let objectives: Result<Vec<f64>> = witnesses.par_iter().map(|h| q_var_objective(h, rho, sigma, p)).collect();
    let objectives = objectives?;
    let (best_index, max_objective) = objectives
        .iter()
        .copied()
        .enumerate()
        .fold((None, f64::NEG_INFINITY), |(bi, bv), (i, v)| if v > bv { (Some(i), v) } else { (bi, bv) });
    if q.is_pos_inf() {
        return Ok(VarCertificate {
            q: ExtendedValue::pos_inf(Reason::SupportViolation),
            max_objective,
            best_index,
            relative_gap: f64::INFINITY,
            max_excess: 0.0,
            certified: max_objective > UNBOUNDED_CAP,
        });
    }
    let qv = q.value.exp();
    let relative_gap = (qv - max_objective) / qv;
    let max_excess = objectives.iter().map(|o| (o - qv).max(0.0) / qv).fold(0.0, f64::max);
    Ok(VarCertificate {
        q: ExtendedValue::finite(qv),
        max_objective,
        best_index,
        relative_gap,
        max_excess,
        certified: relative_gap.abs() < CERTIFICATE_TOL,
    })
}
