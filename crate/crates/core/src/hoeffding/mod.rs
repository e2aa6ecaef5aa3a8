//! The curve `ψ̃*(u) = (1-u) ln Q*_{1/(1-u)}`, its Legendre–Fenchel
//! transforms (Hoeffding anti-divergences) and generalized cutoff rates.
//!
//! Endpoints follow the limit conventions `ψ̃*(0) = ln Tr ρ` and
//! `ψ̃*(1) = D_max(ρ‖σ)`. In extended arithmetic `ur − (+∞) = −∞`.

use crate::divergence::{d_max, log_q_alpha_z, validate_pair, AlphaZ};
use crate::error::{Error, Result};
use crate::extended::{ExtendedValue, Reason};
use crate::operator::{DiagonalModel, HermitianOperator};
use crate::optim::golden_max;
use crate::truncation::{doubling_levels, ladder_models, model_d_max, LadderConfig, Pair, Verdict};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Largest total dimension accepted for explicit tensor powers.
pub const MAX_TENSOR_DIM: usize = 4096;

const GOLDEN_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Exact,
    /// Interior values are limits of basis-cutoff ladders up to `level`.
    FaLadder { level: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsiCurve {
    #[serde(with = "crate::serde_f64::vec")]
    pub u_grid: Vec<f64>,
    pub values: Vec<ExtendedValue>,
    pub provenance: Provenance,
}

impl PsiCurve {
    /// Smallest discrete second difference on the (possibly non-uniform)
    /// grid over runs of finite values.
    pub fn min_second_difference(&self) -> f64 {
        let mut worst = f64::INFINITY;
        for i in 1..self.u_grid.len().saturating_sub(1) {
            let (v0, v1, v2) = (self.values[i - 1].value, self.values[i].value, self.values[i + 1].value);
            if !(v0.is_finite() && v1.is_finite() && v2.is_finite()) {
                continue;
            }
            let (h0, h1) = (self.u_grid[i] - self.u_grid[i - 1], self.u_grid[i + 1] - self.u_grid[i]);
            let d = 2.0 * (h0 * v2 - (h0 + h1) * v1 + h1 * v0) / (h0 * h1 * (h0 + h1));
            worst = worst.min(d * h0.max(h1).powi(2));
        }
        worst
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Plain,
    Fa,
    Ofa,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AntiDivergenceReport {
    pub r: f64,
    /// Supremum over `u ∈ (0,1)`.
    pub h_star: ExtendedValue,
    /// Supremum over `u ∈ [0,1]`.
    pub h_hat: ExtendedValue,
    pub maximizer_u: Option<f64>,
    pub variant: Variant,
}

/// Evaluator of `ψ̃*(ρ‖σ|u)` for a pair.
#[derive(Clone, Debug)]
pub struct Psi {
    pair: Pair,
    levels: Vec<usize>,
    cfg: LadderConfig,
    variant: Variant,
}

/// `n + 1` equally spaced points on `[0,1]`.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    (0..=n).map(|i| i as f64 / n as f64).collect()
}

/// The default 101-point grid on `[0,1]`.
pub fn default_u_grid() -> Vec<f64> {
    uniform_grid(100)
}

fn ext_add_linear(u: f64, r: f64, psi: ExtendedValue) -> f64 {
    if psi.is_pos_inf() {
        f64::NEG_INFINITY
    } else {
        u * r - psi.value
    }
}

impl Psi {
    pub fn matrices(rho: HermitianOperator, sigma: HermitianOperator) -> Result<Self> {
        validate_pair(&rho, &sigma)?;
        Ok(Self {
            pair: Pair::Matrices { rho, sigma },
            levels: Vec::new(),
            cfg: LadderConfig::default(),
            variant: Variant::Plain,
        })
    }

    /// Models are evaluated through basis-cutoff ladders (default `2^1..2^12`).
    pub fn models(rho: DiagonalModel, sigma: DiagonalModel, levels: Option<Vec<usize>>, cfg: LadderConfig) -> Result<Self> {
        let levels = levels.unwrap_or_else(|| doubling_levels(12));
        if levels.is_empty() {
            return Err(Error::InvalidInput("empty ladder".into()));
        }
        Ok(Self { pair: Pair::Models { rho, sigma }, levels, cfg, variant: Variant::Fa })
    }

    /// Explicit `n`-fold tensor powers of a matrix pair.
    pub fn tensor_power(rho: &HermitianOperator, sigma: &HermitianOperator, n: usize) -> Result<Self> {
        let (rn, sn) = tensor_powers(rho, sigma, n)?;
        let mut psi = Self::matrices(rn, sn)?;
        psi.variant = Variant::Ofa;
        Ok(psi)
    }

    pub fn pair(&self) -> &Pair {
        &self.pair
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    fn provenance(&self) -> Provenance {
        match self.pair {
            Pair::Matrices { .. } => Provenance::Exact,
            Pair::Models { .. } => Provenance::FaLadder { level: *self.levels.iter().max().expect("nonempty") },
        }
    }

    /// `ln Tr ρ`.
    pub fn log_trace(&self) -> ExtendedValue {
        match &self.pair {
            Pair::Matrices { rho, .. } => ExtendedValue::finite(rho.trace().ln()),
            Pair::Models { rho, .. } => ExtendedValue::from_f64(rho.total_trace().ln(), Reason::EndpointConvention),
        }
    }

    pub fn d_max(&self) -> Result<ExtendedValue> {
        match &self.pair {
            Pair::Matrices { rho, sigma } => d_max(rho, sigma),
            Pair::Models { rho, sigma } => Ok(model_d_max(rho, sigma, &self.levels, &self.cfg)),
        }
    }

    /// `ln Q*_α`; `+∞` on support violation or a diverging ladder.
    pub fn log_q_sandwiched(&self, alpha: f64) -> Result<ExtendedValue> {
        let p = AlphaZ::sandwiched(alpha)?;
        match &self.pair {
            Pair::Matrices { rho, sigma } => log_q_alpha_z(rho, sigma, p),
            Pair::Models { rho, sigma } => {
                let rep = ladder_models(rho, sigma, p, &self.levels, &self.cfg)?;
                Ok(match rep.verdict {
                    Verdict::Diverging => ExtendedValue::pos_inf(Reason::LadderDivergent),
                    Verdict::Converged { limit, .. } => ExtendedValue::finite(limit.ln()),
                    Verdict::Inconclusive => ExtendedValue::finite(rep.last().log_value),
                })
            }
        }
    }

    /// `ψ̃*(u)` for `u ∈ [0,1]`.
    pub fn value(&self, u: f64) -> Result<ExtendedValue> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::InvalidParameter(format!("u must lie in [0,1], got {u}")));
        }
        if u == 0.0 {
            return Ok(self.log_trace());
        }
        if u == 1.0 {
            return self.d_max();
        }
        Ok(self.log_q_sandwiched(1.0 / (1.0 - u))?.map_finite(|l| (1.0 - u) * l))
    }

    pub fn curve(&self, u_grid: &[f64]) -> Result<PsiCurve> {
        if u_grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter("u grid must be increasing".into()));
        }
        let values: Result<Vec<ExtendedValue>> = u_grid.par_iter().map(|&u| self.value(u)).collect();
        Ok(PsiCurve { u_grid: u_grid.to_vec(), values: values?, provenance: self.provenance() })
    }

    /// `D*_α = ψ̃*(1 − 1/α)/(1 − 1/α)`.
    pub fn d_sandwiched(&self, alpha: f64) -> Result<ExtendedValue> {
        Ok(self.log_q_sandwiched(alpha)?.map_finite(|l| l / (alpha - 1.0)))
    }
}

/// `ρ^{⊗n}, σ^{⊗n}` with total dimension at most [`MAX_TENSOR_DIM`].
pub fn tensor_powers(rho: &HermitianOperator, sigma: &HermitianOperator, n: usize) -> Result<(HermitianOperator, HermitianOperator)> {
    if n == 0 {
        return Err(Error::InvalidParameter("tensor power must be ≥ 1".into()));
    }
    let total = (rho.dim() as f64).powi(n as i32);
    if total > MAX_TENSOR_DIM as f64 {
        return Err(Error::InvalidParameter(format!(
            "{}^{n} exceeds the tensor dimension limit {MAX_TENSOR_DIM}",
            rho.dim()
        )));
    }
    let (mut rn, mut sn) = (rho.clone(), sigma.clone());
    for _ in 1..n {
        rn = rn.kron(rho);
        sn = sn.kron(sigma);
    }
    Ok((rn, sn))
}

/// `ψ̃*(ρ^{⊗n}‖σ^{⊗n}|u)` by explicit Kronecker powers.
pub fn tensor_power_psi(rho: &HermitianOperator, sigma: &HermitianOperator, n: usize, u: f64) -> Result<ExtendedValue> {
    Psi::tensor_power(rho, sigma, n)?.value(u)
}

/// `H_r*` and `Ĥ_r*` from a curve, refined by golden-section search on the
/// exact curve around the grid maximiser.
pub fn hoeffding_anti(psi: &Psi, curve: &PsiCurve, r: f64) -> Result<AntiDivergenceReport> {
    let grid = &curve.u_grid;
    if grid.is_empty() {
        return Err(Error::InvalidInput("empty curve".into()));
    }
    let g: Vec<f64> = grid.iter().zip(&curve.values).map(|(&u, &v)| ext_add_linear(u, r, v)).collect();
    let interior_finite = grid.iter().zip(&curve.values).any(|(&u, v)| u > 0.0 && u < 1.0 && !v.is_pos_inf());

    let (mut best_i, mut best) = (None, f64::NEG_INFINITY);
    for (i, &v) in g.iter().enumerate() {
        if v > best {
            best = v;
            best_i = Some(i);
        }
    }
    let mut best_u = best_i.map(|i| grid[i]);
    if let Some(i) = best_i {
        // ladder values can look finite just inside an infinite region, so
        // only cells known to be finite are refined there
        let exact = curve.provenance == Provenance::Exact;
        let usable = |j: usize| exact || !curve.values[j].is_pos_inf();
        let lo = if i > 0 && usable(i - 1) { grid[i - 1] } else { grid[i] };
        let hi = if i + 1 < grid.len() && usable(i + 1) { grid[i + 1] } else { grid[i] };
        if hi > lo {
            let mut err = None;
            let mut f = |u: f64| match psi.value(u) {
                Ok(v) => ext_add_linear(u, r, v),
                Err(e) => {
                    err.get_or_insert(e);
                    f64::NEG_INFINITY
                }
            };
            let (u, v) = golden_max(&mut f, lo, hi, GOLDEN_TOL);
            if let Some(e) = err {
                return Err(e);
            }
            if v > best {
                best = v;
                best_u = Some(u);
            }
        }
    }
    let h_hat = if best == f64::NEG_INFINITY {
        ExtendedValue::neg_inf(Reason::SupportViolation)
    } else {
        ExtendedValue::finite(best)
    };
    let h_star = if interior_finite { h_hat } else { ExtendedValue::neg_inf(Reason::SupportViolation) };
    Ok(AntiDivergenceReport { r, h_star, h_hat, maximizer_u: best_u, variant: psi.variant })
}

/// `Ĥ_r*` over an `r` grid, evaluated in parallel.
pub fn hoeffding_sweep(psi: &Psi, curve: &PsiCurve, r_grid: &[f64]) -> Result<Vec<AntiDivergenceReport>> {
    r_grid.par_iter().map(|&r| hoeffding_anti(psi, curve, r)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BipolarResult {
    pub u: f64,
    pub value: ExtendedValue,
    pub argmax_r: Option<f64>,
    /// The supremum sits on the edge of the `r` grid.
    pub boundary: bool,
}

/// `sup_r {ur − Ĥ_r*}` over the supplied reports.
pub fn bipolar_recover(reports: &[AntiDivergenceReport], u: f64) -> BipolarResult {
    let mut best = (None, f64::NEG_INFINITY);
    for (i, rep) in reports.iter().enumerate() {
        let v = if rep.h_hat.is_neg_inf() { f64::INFINITY } else { u * rep.r - rep.h_hat.value };
        if v > best.1 {
            best = (Some(i), v);
        }
    }
    let boundary = matches!(best.0, Some(i) if i == 0 || i + 1 == reports.len());
    BipolarResult {
        u,
        value: ExtendedValue::from_f64(best.1, Reason::EndpointConvention),
        argmax_r: best.0.map(|i| reports[i].r),
        boundary,
    }
}

/// `[−5(1+|D_max|), 5(1+|D_max|)]` with 401 points (`D_max` replaced by
/// `ψ̃*(1/2)` when infinite).
pub fn default_r_grid(psi: &Psi) -> Result<Vec<f64>> {
    let dm = psi.d_max()?;
    let scale = if dm.is_finite() {
        dm.value.abs()
    } else {
        let mid = psi.value(0.5)?;
        if mid.is_finite() { 2.0 * mid.value.abs() } else { 10.0 }
    };
    let half = 5.0 * (1.0 + scale);
    Ok((0..=400).map(|i| -half + 2.0 * half * i as f64 / 400.0).collect())
}

/// Bipolar recovery on the default `r` grid with a golden-section refinement
/// in `r` around the grid maximiser.
pub fn bipolar_recover_refined(psi: &Psi, curve: &PsiCurve, u: f64, r_grid: Option<&[f64]>) -> Result<BipolarResult> {
    let owned;
    let grid = match r_grid {
        Some(g) => g,
        None => {
            owned = default_r_grid(psi)?;
            &owned
        }
    };
    let reports = hoeffding_sweep(psi, curve, grid)?;
    let coarse = bipolar_recover(&reports, u);
    let Some(r0) = coarse.argmax_r else { return Ok(coarse) };
    if coarse.value.is_pos_inf() {
        return Ok(coarse);
    }
    let i = grid.iter().position(|&r| r == r0).expect("argmax comes from the grid");
    let lo = grid[i.saturating_sub(1)];
    let hi = grid[(i + 1).min(grid.len() - 1)];
    let mut err = None;
    let mut f = |r: f64| match hoeffding_anti(psi, curve, r) {
        Ok(rep) if rep.h_hat.is_finite() => u * r - rep.h_hat.value,
        Ok(_) => f64::INFINITY,
        Err(e) => {
            err.get_or_insert(e);
            f64::NEG_INFINITY
        }
    };
    let (r, v) = golden_max(&mut f, lo, hi, 1e-9);
    if let Some(e) = err {
        return Err(e);
    }
    let (r, v) = if v > coarse.value.value { (r, v) } else { (r0, coarse.value.value) };
    Ok(BipolarResult { u, value: ExtendedValue::finite(v), argmax_r: Some(r), boundary: coarse.boundary })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutoffRate {
    pub kappa: f64,
    pub alpha0: f64,
    /// `D*_{1/(1-κ)}` when regular; otherwise the upper end of the bracket.
    pub value: ExtendedValue,
    /// `[lower, upper]`; a single point when the regularity check passes.
    #[serde(with = "crate::serde_f64::vec")]
    pub bracket: Vec<f64>,
    pub regular: bool,
}

/// Generalized `κ`-cutoff rate. Regularity is checked on the stencil
/// `κ ± min(κ, 1-κ)/10`.
pub fn cutoff_rate(psi: &Psi, kappa: f64) -> Result<CutoffRate> {
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(Error::InvalidParameter(format!("κ must lie in (0,1), got {kappa}")));
    }
    let alpha0 = 1.0 / (1.0 - kappa);
    let delta = kappa.min(1.0 - kappa) / 10.0;
    let stencil = [kappa - delta, kappa, kappa + delta];
    let ds: Result<Vec<ExtendedValue>> = stencil.iter().map(|&k| psi.d_sandwiched(1.0 / (1.0 - k))).collect();
    let ds = ds?;
    let centre = ds[1];
    if ds.iter().all(|d| d.is_finite()) {
        return Ok(CutoffRate { kappa, alpha0, value: centre, bracket: vec![centre.value, centre.value], regular: true });
    }
    Ok(CutoffRate { kappa, alpha0, value: centre, bracket: vec![f64::NEG_INFINITY, centre.value], regular: false })
}

#[cfg(test)]
mod tests;
