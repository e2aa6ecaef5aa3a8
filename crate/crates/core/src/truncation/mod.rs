//! Finite-dimensional approximation of `Q_{α,z}` along projection ladders.
//!
//! A ladder evaluates `Q_{α,z}(PρP‖PσP)` on an increasing family of
//! projections `P` and classifies the resulting sequence. For diagonal
//! models the projections are basis cutoffs `N`, for matrices they are
//! spectral windows `𝟙_{(c,d)}(σ)`.

use crate::divergence::{d_max, d_tilde_sandwiched, log_q_alpha_z, AlphaZ};
use crate::error::{Error, Result};
use crate::extended::{ExtendedValue, Reason};
use crate::operator::{
    c64, compress, compress_projection, spectral_truncation, support_projection, CMatrix, DiagonalModel,
    HermitianOperator, Projection,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// A pair of operators, either explicit matrices or diagonal models.
#[derive(Clone, Debug)]
pub enum Pair {
    Matrices { rho: HermitianOperator, sigma: HermitianOperator },
    Models { rho: DiagonalModel, sigma: DiagonalModel },
}

/// Truncation levels of a ladder.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Levels {
    /// Basis cutoffs `N` for diagonal models.
    Cutoffs(Vec<usize>),
    /// Spectral windows `(c, d)` of `σ` for matrices.
    Windows(Vec<(f64, f64)>),
    /// `N = 2^k, k = 1..=12` for models, halving lower windows for matrices.
    Default,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderConfig {
    pub conv_tol: f64,
    pub div_cap: f64,
    pub growth_factor: f64,
    pub monotone_slack: f64,
}

impl Default for LadderConfig {
    fn default() -> Self {
        Self { conv_tol: 1e-6, div_cap: 1e12, growth_factor: 10.0, monotone_slack: 1e-10 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderPoint {
    /// Cutoff `N`, lower window edge, or `α`, depending on the ladder.
    pub level: f64,
    pub window: Option<(f64, f64)>,
    /// Saturates to `+∞` (ladder_divergent) when `exp(log_value)` overflows.
    pub value: ExtendedValue,
    #[serde(with = "crate::serde_f64")]
    pub log_value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Converged {
        #[serde(with = "crate::serde_f64")]
        limit: f64,
        #[serde(with = "crate::serde_f64")]
        est_error: f64,
    },
    Diverging,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderReport {
    pub points: Vec<LadderPoint>,
    pub monotone: bool,
    pub verdict: Verdict,
}

impl LadderReport {
    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value.value).collect()
    }

    pub fn last(&self) -> &LadderPoint {
        self.points.last().expect("ladders are never empty")
    }

    /// The limit as an extended value: the converged limit, `+∞` when
    /// diverging, and the last finite level otherwise.
    pub fn limit(&self) -> ExtendedValue {
        match self.verdict {
            Verdict::Converged { limit, .. } => ExtendedValue::finite(limit),
            Verdict::Diverging => ExtendedValue::pos_inf(Reason::LadderDivergent),
            Verdict::Inconclusive => self.last().value,
        }
    }
}

fn point(level: f64, window: Option<(f64, f64)>, log_value: f64) -> LadderPoint {
    let value = if log_value == f64::INFINITY {
        ExtendedValue::pos_inf(Reason::SupportViolation)
    } else {
        let v = log_value.exp();
        if v.is_finite() {
            ExtendedValue::finite(v)
        } else {
            ExtendedValue::pos_inf(Reason::LadderDivergent)
        }
    };
    LadderPoint { level, window, value, log_value }
}

/// `|v_i − v_{i−1}| / |v_i|` computed from logarithms.
fn relative_increment(prev: f64, cur: f64) -> f64 {
    if cur == f64::NEG_INFINITY {
        return if prev == f64::NEG_INFINITY { 0.0 } else { f64::INFINITY };
    }
    (1.0 - (prev - cur).exp()).abs()
}

/// Classify a ladder from its log-values.
pub fn classify(log_values: &[f64], cfg: &LadderConfig) -> Verdict {
    let n = log_values.len();
    if n == 0 {
        return Verdict::Inconclusive;
    }
    if log_values.contains(&f64::INFINITY) || log_values[n - 1] > cfg.div_cap.ln() {
        return Verdict::Diverging;
    }
    if n < 4 {
        return Verdict::Inconclusive;
    }
    if log_values[n - 1] - log_values[n - 4] >= cfg.growth_factor.ln() {
        return Verdict::Diverging;
    }
    // increments that do not shrink (e.g. linear growth in N)
    let abs_inc: Vec<f64> = (n - 3..n).map(|i| log_values[i].exp() - log_values[i - 1].exp()).collect();
    if abs_inc[0] > 0.0
        && abs_inc.windows(2).all(|w| w[1] >= w[0])
        && relative_increment(log_values[n - 2], log_values[n - 1]) >= cfg.conv_tol
    {
        return Verdict::Diverging;
    }
    let incs: Vec<f64> = (n - 3..n).map(|i| relative_increment(log_values[i - 1], log_values[i])).collect();
    let last = log_values[n - 1].exp();
    if incs.iter().all(|&r| r < cfg.conv_tol) {
        return Verdict::Converged { limit: last, est_error: incs[2] * last };
    }
    // geometrically shrinking increments: bound the remaining tail
    if incs[1] < incs[0] && incs[2] < incs[1] {
        let q = incs[2] / incs[1];
        let tail = incs[2] * q / (1.0 - q);
        if tail < cfg.conv_tol {
            let signed = (log_values[n - 1] - log_values[n - 2]).signum();
            return Verdict::Converged { limit: last * (1.0 + signed * tail), est_error: tail * last };
        }
    }
    Verdict::Inconclusive
}

fn is_monotone(log_values: &[f64], slack: f64) -> bool {
    log_values.windows(2).all(|w| {
        if w[0] == f64::NEG_INFINITY || w[1] == f64::INFINITY {
            return true;
        }
        w[1].exp() >= w[0].exp() - slack * w[0].exp().max(1.0)
    })
}

fn report(points: Vec<LadderPoint>, cfg: &LadderConfig) -> LadderReport {
    let logs: Vec<f64> = points.iter().map(|p| p.log_value).collect();
    LadderReport { monotone: is_monotone(&logs, cfg.monotone_slack), verdict: classify(&logs, cfg), points }
}

/// `N = 2^k` for `k = 1..=max_exp`.
pub fn doubling_levels(max_exp: u32) -> Vec<usize> {
    (1..=max_exp).map(|k| 1usize << k).collect()
}

/// Windows `(λ_max·2^{-k}, 2λ_max)` for `k = 1, 2, …` until the window
/// contains the whole support of `σ`.
pub fn default_windows(sigma: &HermitianOperator) -> Result<Vec<(f64, f64)>> {
    let s = sigma.spectral()?;
    let lmax = s.lambda_max();
    if !(lmax > 0.0) {
        return Err(Error::InvalidInput("σ is the zero operator".into()));
    }
    let lmin = *s.support_eigenvalues().last().expect("nonzero operator has support");
    let mut out = Vec::new();
    let mut k = 1;
    loop {
        let c = lmax * 0.5f64.powi(k);
        out.push((c, 2.0 * lmax));
        if c < lmin {
            return Ok(out);
        }
        k += 1;
    }
}

/// `ln Σ_{n≤N} λ_n^α μ_n^{1-α}` for every `N ≤ n_max`, index `N-1`.
/// Diagonal pairs do not depend on `z`.
pub fn model_log_q_prefix(rho: &DiagonalModel, sigma: &DiagonalModel, alpha: f64, n_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max);
    let mut acc = f64::NEG_INFINITY;
    for n in 1..=n_max {
        let lr = rho.log_eigenvalue(n);
        let ls = sigma.log_eigenvalue(n);
        if lr > f64::NEG_INFINITY {
            if ls == f64::NEG_INFINITY {
                acc = f64::INFINITY;
            } else if acc < f64::INFINITY {
                let t = alpha * lr + (1.0 - alpha) * ls;
                acc = log_add_exp(acc, t);
            }
        }
        out.push(acc);
    }
    out
}

fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Umegaki relative entropy of the `N`-level truncations of two models.
pub fn model_relative_entropy(rho: &DiagonalModel, sigma: &DiagonalModel, n: usize) -> ExtendedValue {
    let mut sum = 0.0;
    for k in 1..=rho.clamp_level(n) {
        let lr = rho.log_eigenvalue(k);
        if lr == f64::NEG_INFINITY {
            continue;
        }
        let ls = sigma.log_eigenvalue(k);
        if ls == f64::NEG_INFINITY {
            return ExtendedValue::pos_inf(Reason::SupportViolation);
        }
        sum += lr.exp() * (lr - ls);
    }
    ExtendedValue::finite(sum)
}

/// `sup_n ln(λ_n/μ_n)` for two models, from the running maximum at the
/// given cutoffs: converged values are returned as is, a diverging
/// sequence of `sup λ_n/μ_n` gives `+∞`.
pub fn model_d_max(rho: &DiagonalModel, sigma: &DiagonalModel, levels: &[usize], cfg: &LadderConfig) -> ExtendedValue {
    let n_max = levels.iter().copied().max().unwrap_or(1);
    let mut running = Vec::with_capacity(n_max);
    let mut best = f64::NEG_INFINITY;
    for k in 1..=rho.clamp_level(n_max) {
        let lr = rho.log_eigenvalue(k);
        if lr > f64::NEG_INFINITY {
            let ls = sigma.log_eigenvalue(k);
            best = if ls == f64::NEG_INFINITY { f64::INFINITY } else { best.max(lr - ls) };
        }
        running.push(best);
    }
    let at_levels: Vec<f64> = levels.iter().map(|&n| running[rho.clamp_level(n).max(1) - 1]).collect();
    let last = *at_levels.last().unwrap_or(&best);
    if last == f64::INFINITY {
        return ExtendedValue::pos_inf(Reason::SupportViolation);
    }
    match classify(&at_levels, cfg) {
        Verdict::Diverging => ExtendedValue::pos_inf(Reason::LadderDivergent),
        _ => ExtendedValue::finite(last),
    }
}

/// `Q_{α,z}(PρP‖PσP)`, with `0` for `PρP = 0` and `+∞` for `PσP = 0 ≠ PρP`.
fn compressed_log_q(rho: &HermitianOperator, sigma: &HermitianOperator, p: AlphaZ) -> Result<f64> {
    if rho.is_zero()? {
        return Ok(f64::NEG_INFINITY);
    }
    if sigma.is_zero()? {
        return Ok(f64::INFINITY);
    }
    Ok(log_q_alpha_z(rho, sigma, p)?.value)
}

/// Evaluate `Q_{α,z}` along a ladder of truncations.
pub fn ladder(pair: &Pair, p: AlphaZ, levels: &Levels, cfg: &LadderConfig) -> Result<LadderReport> {
    match pair {
        Pair::Models { rho, sigma } => {
            let cutoffs = match levels {
                Levels::Cutoffs(c) => c.clone(),
                Levels::Default => doubling_levels(12),
                Levels::Windows(_) => {
                    return Err(Error::InvalidInput("diagonal models take basis cutoffs as levels".into()))
                }
            };
            ladder_models(rho, sigma, p, &cutoffs, cfg)
        }
        Pair::Matrices { rho, sigma } => {
            let windows = match levels {
                Levels::Windows(w) => w.clone(),
                Levels::Default => default_windows(sigma)?,
                Levels::Cutoffs(_) => {
                    return Err(Error::InvalidInput("matrix ladders take spectral windows as levels".into()))
                }
            };
            ladder_matrices(rho, sigma, p, &windows, cfg)
        }
    }
}

pub fn ladder_models(
    rho: &DiagonalModel,
    sigma: &DiagonalModel,
    p: AlphaZ,
    levels: &[usize],
    cfg: &LadderConfig,
) -> Result<LadderReport> {
    if levels.is_empty() {
        return Err(Error::InvalidInput("empty ladder".into()));
    }
    if levels.contains(&0) {
        return Err(Error::InvalidInput("truncation levels must be ≥ 1".into()));
    }
    let n_max = *levels.iter().max().expect("nonempty");
    let n_max = rho.clamp_level(sigma.clamp_level(n_max));
    let prefix = model_log_q_prefix(rho, sigma, p.alpha(), n_max);
    let points = levels
        .iter()
        .map(|&n| {
            let k = rho.clamp_level(sigma.clamp_level(n));
            point(n as f64, None, prefix[k - 1])
        })
        .collect();
    Ok(report(points, cfg))
}

pub fn ladder_matrices(
    rho: &HermitianOperator,
    sigma: &HermitianOperator,
    p: AlphaZ,
    windows: &[(f64, f64)],
    cfg: &LadderConfig,
) -> Result<LadderReport> {
    if windows.is_empty() {
        return Err(Error::InvalidInput("empty ladder".into()));
    }
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), sigma.dim()));
    }
    let points: Result<Vec<LadderPoint>> = windows
        .par_iter()
        .map(|&(c, d)| {
            let proj = spectral_truncation(sigma, c, d)?;
            let lq = compressed_log_q(&compress_projection(&proj, rho), &compress_projection(&proj, sigma), p)?;
            Ok(point(c, Some((c, d)), lq))
        })
        .collect();
    Ok(report(points?, cfg))
}

/// `Tr(σ_n^{(1-α)/2z} ρ^{α/z} σ_n^{(1-α)/2z})^z` with `σ_n = σ𝟙_{(c,d)}(σ)`
/// and `ρ` left uncompressed.
pub fn windowed_log_q(rho: &HermitianOperator, sigma: &HermitianOperator, p: AlphaZ, window: (f64, f64)) -> Result<f64> {
    let proj = spectral_truncation(sigma, window.0, window.1)?;
    let sn = compress_projection(&proj, sigma);
    let s = sn.spectral()?.function_on_support(|l| l.powf(p.sandwich_exponent()));
    let r = rho.spectral()?.function_on_support(|l| l.powf(p.rho_exponent() / 2.0));
    let sv = crate::operator::singular_values(&(s * r))?;
    let rank = rho.spectral()?.effective_rank();
    Ok(crate::log_sum_exp(sv.iter().take(rank).filter(|&&v| v > 0.0).map(|v| 2.0 * p.z() * v.ln())))
}

/// Result of a finite-dimensional approximation estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QfaEstimate {
    /// Supremum over the family, or `+∞` (ladder_divergent) when the family
    /// values are classified as diverging.
    pub value: ExtendedValue,
    pub ladder: LadderReport,
}

/// `sup_P Q_{α,z}(PρP‖PσP)` over the supplied family, in the order given.
/// Members with `PρP = 0` contribute nothing.
pub fn q_fa_estimate(
    rho: &HermitianOperator,
    sigma: &HermitianOperator,
    p: AlphaZ,
    family: &[Projection],
    cfg: &LadderConfig,
) -> Result<QfaEstimate> {
    if family.is_empty() {
        return Err(Error::InvalidInput("empty projection family".into()));
    }
    let points: Result<Vec<LadderPoint>> = family
        .par_iter()
        .enumerate()
        .map(|(i, proj)| {
            let lq = compressed_log_q(&compress_projection(proj, rho), &compress_projection(proj, sigma), p)?;
            Ok(point(i as f64, None, lq))
        })
        .collect();
    let ladder = report(points?, cfg);
    let value = if ladder.verdict == Verdict::Diverging {
        ExtendedValue::pos_inf(Reason::LadderDivergent)
    } else {
        let best = ladder.points.iter().map(|p| p.log_value).fold(f64::NEG_INFINITY, f64::max);
        ExtendedValue::finite(best.exp())
    };
    Ok(QfaEstimate { value, ladder })
}

/// Rank-one projections onto `ψ_t = √(1-t)ψ + √t φ` with `σψ = 0`,
/// `⟨ψ,ρψ⟩ > 0` and `φ` the top eigenvector of `σ`. Requires
/// `supp ρ ⊄ supp σ`.
pub fn support_violation_family(rho: &HermitianOperator, sigma: &HermitianOperator, ts: &[f64]) -> Result<Vec<Projection>> {
    let d = rho.dim();
    let ps = support_projection(sigma)?;
    let kernel = CMatrix::identity(d, d) - ps.matrix();
    let rk = HermitianOperator::from_matrix_hermitized(&kernel * rho.matrix() * &kernel);
    let ks = rk.spectral()?;
    if ks.lambda_max() <= crate::operator::SUPPORT_TOL * rho.spectral()?.lambda_max() {
        return Err(Error::InvalidInput("supp ρ ⊆ supp σ; no violating direction".into()));
    }
    let psi = ks.eigenvectors().column(0).clone_owned();
    let phi = sigma.spectral()?.eigenvectors().column(0).clone_owned();
    ts.iter()
        .map(|&t| {
            if !(t > 0.0 && t <= 1.0) {
                return Err(Error::InvalidParameter(format!("t must lie in (0,1], got {t}")));
            }
            let mut v = &psi * c64((1.0 - t).sqrt()) + &phi * c64(t.sqrt());
            let norm = v.norm();
            v /= c64(norm);
            Ok(Projection::from_orthonormal_columns(&CMatrix::from_columns(&[v])))
        })
        .collect()
}

/// `Q(KρK*‖KσK*) ≤ Q(PρP‖PσP)` for `P = |K|^0`, with `1e-9` relative slack.
pub fn contraction_vs_projection_check(
    k: &CMatrix,
    rho: &HermitianOperator,
    sigma: &HermitianOperator,
    p: AlphaZ,
) -> Result<bool> {
    let lhs = compressed_log_q(&compress(k, rho)?, &compress(k, sigma)?, p)?;
    let kk = HermitianOperator::from_matrix_hermitized(k.adjoint() * k);
    let proj = support_projection(&kk)?;
    let rhs = compressed_log_q(&compress_projection(&proj, rho), &compress_projection(&proj, sigma), p)?;
    if lhs == f64::NEG_INFINITY || rhs == f64::INFINITY {
        return Ok(true);
    }
    Ok(lhs.exp() <= rhs.exp() * (1.0 + 1e-9) + 1e-300)
}

/// Result of following `D̃*_α` along an increasing `α` grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaLimitReport {
    /// Points carry `level = α` and `value = D̃*_α` (or `D*_α` when `ρ` is
    /// not trace-class).
    pub ladder: LadderReport,
    /// `D*_α` without the trace normalisation.
    pub raw: Vec<ExtendedValue>,
    pub d_max: ExtendedValue,
    /// Extrapolation of the last two values in `1/(α-1)`.
    #[serde(with = "crate::serde_f64")]
    pub extrapolated: f64,
    pub trace_class: bool,
    /// The raw divergences run off to `+∞` while `D_max` is finite.
    pub limit_differs_from_d_max: bool,
}

/// Tolerance used when matching the extrapolated limit against `D_max`.
pub const ALPHA_LIMIT_TOL: f64 = 1e-3;

pub fn alpha_limit_to_dmax(pair: &Pair, alphas: &[f64], cfg: &LadderConfig) -> Result<AlphaLimitReport> {
    if alphas.is_empty() {
        return Err(Error::InvalidInput("empty α grid".into()));
    }
    if alphas.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("α grid must be increasing".into()));
    }
    let (raw, tilde, dmax, trace_class): (Vec<ExtendedValue>, Vec<ExtendedValue>, ExtendedValue, bool) = match pair {
        Pair::Matrices { rho, sigma } => {
            let tilde: Result<Vec<ExtendedValue>> =
                alphas.par_iter().map(|&a| d_tilde_sandwiched(rho, sigma, a)).collect();
            let tilde = tilde?;
            let shift = rho.trace().ln();
            let raw = tilde
                .iter()
                .zip(alphas)
                .map(|(t, a)| t.map_finite(|v| v + shift / (a - 1.0)))
                .collect();
            (raw, tilde, d_max(rho, sigma)?, true)
        }
        Pair::Models { rho, sigma } => {
            let levels = doubling_levels(12);
            let raw: Result<Vec<ExtendedValue>> = alphas
                .par_iter()
                .map(|&a| {
                    let rep = ladder_models(rho, sigma, AlphaZ::sandwiched(a)?, &levels, cfg)?;
                    Ok(rep.limit().map_finite(|q| q.ln() / (a - 1.0)))
                })
                .collect();
            let raw = raw?;
            let trace_class = rho.is_trace_class();
            let tilde = if trace_class {
                let ln_tr = rho.total_trace().ln();
                raw.iter().zip(alphas).map(|(d, a)| d.map_finite(|v| v - ln_tr / (a - 1.0))).collect()
            } else {
                raw.clone()
            };
            (raw, tilde, model_d_max(rho, sigma, &levels, cfg), trace_class)
        }
    };
    let points: Vec<LadderPoint> = alphas
        .iter()
        .zip(&tilde)
        .map(|(&a, v)| LadderPoint { level: a, window: None, value: *v, log_value: v.value.ln() })
        .collect();
    let vals: Vec<f64> = tilde.iter().map(|v| v.value).collect();
    let monotone = vals.windows(2).all(|w| w[1] >= w[0] - 1e-9 * w[0].abs().max(1.0) || w[1].is_nan());
    let n = vals.len();
    let extrapolated = if n >= 2 && vals[n - 1].is_finite() && vals[n - 2].is_finite() {
        let (a1, a2) = (alphas[n - 2] - 1.0, alphas[n - 1] - 1.0);
        (vals[n - 1] * a2 - vals[n - 2] * a1) / (a2 - a1)
    } else {
        vals[n - 1]
    };
    let diverging = raw.iter().any(|v| v.is_pos_inf());
    let limit_differs_from_d_max = diverging && dmax.is_finite();
    let verdict = if diverging {
        Verdict::Diverging
    } else if dmax.is_finite() && (extrapolated - dmax.value).abs() < ALPHA_LIMIT_TOL * dmax.value.abs().max(1.0) {
        Verdict::Converged { limit: dmax.value, est_error: (extrapolated - dmax.value).abs() }
    } else {
        Verdict::Inconclusive
    };
    Ok(AlphaLimitReport {
        ladder: LadderReport { points, monotone, verdict },
        raw,
        d_max: dmax,
        extrapolated,
        trace_class,
        limit_differs_from_d_max,
    })
}

/// Both sides of an inf–max exchange over a directed family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimaxReport {
    pub inf_max: f64,
    pub max_inf: f64,
    pub gap: f64,
    pub holds: bool,
}

/// `inf_k max_u f_k(u)` against `max_u inf_k f_k(u)` for values
/// `values[k][i] = f_k(u_i)` that decrease along `k`.
pub fn minimax_exchange_check(values: &[Vec<f64>], u_grid: &[f64], tol: f64) -> Result<MinimaxReport> {
    if values.is_empty() || u_grid.is_empty() {
        return Err(Error::InvalidInput("empty family or grid".into()));
    }
    if values.iter().any(|row| row.len() != u_grid.len()) {
        return Err(Error::InvalidInput("every family member needs one value per grid point".into()));
    }
    for w in values.windows(2) {
        for (a, b) in w[0].iter().zip(&w[1]) {
            if *b > *a + tol {
                return Err(Error::InvalidInput("family values must decrease along the family".into()));
            }
        }
    }
    let inf_max = values
        .iter()
        .map(|row| row.iter().cloned().fold(f64::NEG_INFINITY, f64::max))
        .fold(f64::INFINITY, f64::min);
    let max_inf = (0..u_grid.len())
        .map(|i| values.iter().map(|row| row[i]).fold(f64::INFINITY, f64::min))
        .fold(f64::NEG_INFINITY, f64::max);
    let gap = (inf_max - max_inf).abs();
    Ok(MinimaxReport { inf_max, max_inf, gap, holds: gap <= tol })
}

#[cfg(test)]
mod tests;
