use super::classical::classical_log_q;
use crate::divergence::{d_sandwiched, rho_sigma_alpha_z, validate_pair, RhoSigma};
use crate::error::{Error, Result};
use crate::extended::{ExtendedValue, Reason};
use crate::operator::{c64, support_leq, CMatrix, HermitianOperator, SpectralData, C64};
use crate::optim::nelder_mead;
use crate::random::{ginibre, seeded, unitary};
use nalgebra::DVector;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Tolerance on `Σ M_i = I`.
pub const POVM_TOL: f64 = 1e-10;

/// Largest total dimension for explicit copies.
pub const MAX_COPY_DIM: usize = 4096;

#[derive(Clone, Debug)]
pub struct Povm {
    effects: Vec<HermitianOperator>,
}

impl Povm {
    pub fn new(effects: Vec<HermitianOperator>) -> Result<Self> {
        let d = effects.first().ok_or_else(|| Error::InvalidInput("POVM has no effects".into()))?.dim();
        let mut sum = CMatrix::zeros(d, d);
        for e in &effects {
            if e.dim() != d {
                return Err(Error::DimensionMismatch(e.dim(), d));
            }
            e.check_psd()?;
            sum += e.matrix();
        }
        let dev = (sum - CMatrix::identity(d, d)).iter().fold(0.0f64, |a, z| a.max(z.norm()));
        if !(dev <= POVM_TOL) {
            return Err(Error::InvalidInput(format!("POVM effects sum to I only up to {dev:e}")));
        }
        Ok(Self { effects })
    }

    /// The single-outcome POVM `{I}`.
    pub fn trivial(d: usize) -> Self {
        Self { effects: vec![HermitianOperator::identity(d)] }
    }

    /// Rank-one projections onto the columns of a unitary.
    pub fn from_basis(u: &CMatrix) -> Result<Self> {
        let d = u.nrows();
        if u.ncols() != d {
            return Err(Error::NotSquare(d, u.ncols()));
        }
        let dev = (u.adjoint() * u - CMatrix::identity(d, d)).iter().fold(0.0f64, |a, z| a.max(z.norm()));
        if dev > POVM_TOL {
            return Err(Error::InvalidInput(format!("basis is not orthonormal ({dev:e})")));
        }
        let effects = (0..d)
            .map(|j| {
                let c = u.column(j);
                HermitianOperator::from_matrix_hermitized(c * c.adjoint())
            })
            .collect();
        Ok(Self { effects })
    }

    pub fn effects(&self) -> &[HermitianOperator] {
        &self.effects
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }

    /// `(Tr ρ M_i)_i`, with round-off negatives clamped to zero.
    pub fn outcome_distribution(&self, rho: &HermitianOperator) -> Result<Vec<f64>> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch(rho.dim(), self.dim()));
        }
        Ok(self.effects.iter().map(|m| (rho.matrix() * m.matrix()).trace().re.max(0.0)).collect())
    }

    pub fn kron(&self, other: &Self) -> Self {
        let effects = self.effects.iter().flat_map(|a| other.effects.iter().map(move |b| a.kron(b))).collect();
        Self { effects }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 1.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("α must be a finite number > 1, got {alpha}")))
    }
}

/// `D_α` of the outcome distributions of `M` on `ρ` and `σ`.
pub fn measured_renyi(rho: &HermitianOperator, sigma: &HermitianOperator, m: &Povm, alpha: f64) -> Result<ExtendedValue> {
    check_alpha(alpha)?;
    validate_pair(rho, sigma)?;
    let p = m.outcome_distribution(rho)?;
    let q = m.outcome_distribution(sigma)?;
    Ok(outcome_divergence(&p, &q, alpha))
}

/// Outcome weights below this fraction of the total are treated as zero when
/// deciding support violations.
const OUTCOME_ZERO: f64 = 1e-13;

fn outcome_divergence(p: &[f64], q: &[f64], alpha: f64) -> ExtendedValue {
    let (sp, sq): (f64, f64) = (p.iter().sum(), q.iter().sum());
    let clean = |v: &[f64], s: f64| v.iter().map(|&x| if x <= OUTCOME_ZERO * s { 0.0 } else { x }).collect::<Vec<_>>();
    let (p, q) = (clean(p, sp), clean(q, sq));
    classical_log_q(&p, &q, alpha).map_finite(|l| l / (alpha - 1.0))
}

fn basis_divergence(u: &CMatrix, rho: &CMatrix, sigma: &CMatrix, alpha: f64) -> f64 {
    let diag = |a: &CMatrix| -> Vec<f64> { (u.adjoint() * a * u).diagonal().iter().map(|z| z.re.max(0.0)).collect() };
    let v = outcome_divergence(&diag(rho), &diag(sigma), alpha);
    if v.is_pos_inf() { f64::INFINITY } else { v.value }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeasuredSearch {
    pub random_trials: usize,
    pub local_steps: usize,
    pub seed: u64,
}

impl Default for MeasuredSearch {
    fn default() -> Self {
        Self { random_trials: 64, local_steps: 200, seed: 0 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeasuredBound {
    pub n: usize,
    pub alpha: f64,
    /// `max (1/n) D_α^meas(ρ^{⊗n}‖σ^{⊗n})` over the searched bases.
    pub best: ExtendedValue,
    pub sandwiched: ExtendedValue,
    /// `D*_α − best` for this `n`.
    pub gap: f64,
    /// Smallest gap over all copy numbers up to and including `n`.
    pub best_gap: f64,
    pub family: String,
    #[serde(skip)]
    pub basis: Option<CMatrix>,
}

fn eigenbasis(a: &HermitianOperator) -> Result<CMatrix> {
    Ok(a.spectral()?.eigenvectors().clone())
}

/// Eigenbasis of `ρ` pinched by the eigenprojections of `σ`; it diagonalises
/// both the pinched `ρ` and `σ`.
fn pinching_basis(rho: &HermitianOperator, sigma: &HermitianOperator) -> Result<CMatrix> {
    let s = sigma.spectral()?;
    let d = s.dim();
    let vals = s.eigenvalues();
    let vecs = s.eigenvectors();
    let tol = 1e-10 * s.lambda_max().abs().max(f64::MIN_POSITIVE);
    let mut out = CMatrix::zeros(d, d);
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && (vals[start] - vals[end]).abs() <= tol {
            end += 1;
        }
        let b = vecs.columns(start, end - start).clone_owned();
        let block = b.adjoint() * rho.matrix() * &b;
        let w = SpectralData::compute(&block, 0.0)?;
        out.columns_mut(start, end - start).copy_from(&(&b * w.eigenvectors()));
        start = end;
    }
    Ok(out)
}

/// `exp(iεH)` for a Hermitian `H`.
fn unitary_step(h: &HermitianOperator, eps: f64) -> Result<CMatrix> {
    let s = h.spectral()?;
    let v = s.eigenvectors();
    let mut scaled = v.clone();
    for (j, &l) in s.eigenvalues().iter().enumerate() {
        let ph = C64::new(0.0, eps * l).exp();
        scaled.column_mut(j).iter_mut().for_each(|z| *z *= ph);
    }
    Ok(scaled * v.adjoint())
}

fn qubit_basis(theta: f64, phi: f64) -> CMatrix {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let e = C64::from_polar(1.0, phi);
    CMatrix::from_row_slice(2, 2, &[c64(c), -e.conj() * c64(s), e * c64(s), c64(c)])
}

fn search_bases(
    rho: &HermitianOperator,
    sigma: &HermitianOperator,
    alpha: f64,
    mut candidates: Vec<(String, CMatrix)>,
    cfg: &MeasuredSearch,
    rng: &mut impl Rng,
) -> Result<(f64, String, CMatrix)> {
    let d = rho.dim();
    let (rm, sm) = (rho.matrix(), sigma.matrix());
    for _ in 0..cfg.random_trials {
        candidates.push(("random".into(), unitary(d, rng)));
    }
    let mut best = (f64::NEG_INFINITY, String::new(), CMatrix::identity(d, d));
    for (name, u) in candidates {
        let v = basis_divergence(&u, rm, sm, alpha);
        if v > best.0 {
            best = (v, name, u);
        }
    }
    if best.0 == f64::INFINITY {
        return Ok(best);
    }
    if d == 2 {
        let mut f = |x: &[f64]| -basis_divergence(&qubit_basis(x[0], x[1]), rm, sm, alpha);
        let mut top: Option<(f64, Vec<f64>)> = None;
        for i in 0..8 {
            for j in 0..8 {
                let x = [std::f64::consts::PI * (i as f64 + 0.5) / 8.0, std::f64::consts::TAU * j as f64 / 8.0];
                let v = f(&x);
                if top.as_ref().is_none_or(|t| v < t.0) {
                    top = Some((v, x.to_vec()));
                }
            }
        }
        let x0 = top.expect("grid is nonempty").1;
        let m = nelder_mead(&mut f, &x0, 0.2, 1e-15, 4000);
        if -m.value > best.0 {
            best = (-m.value, "local".into(), qubit_basis(m.x[0], m.x[1]));
        }
    }
    let mut eps = 0.3;
    for _ in 0..cfg.local_steps {
        let g = ginibre(d, d, rng);
        let h = HermitianOperator::from_matrix_hermitized((&g + g.adjoint()) * c64(0.5));
        let trial = &best.2 * unitary_step(&h, eps)?;
        let v = basis_divergence(&trial, rm, sm, alpha);
        if v > best.0 {
            best = (v, "local".into(), trial);
            eps = (eps * 1.5).min(1.0);
        } else {
            eps *= 0.85;
            if eps < 1e-6 {
                break;
            }
        }
    }
    Ok(best)
}

/// Lower bounds `(1/n) D_α^meas(ρ^{⊗n}‖σ^{⊗n})` for each `n` in `ns`, with
/// searched families: eigenbases of `ρ^{⊗n}`, `σ^{⊗n}` and `ρ_{σ,α,α}` on
/// `n` copies, the pinching basis, tensor powers of the best smaller-`n`
/// bases, Haar-random bases and a local unitary search from the best of these.
pub fn measured_lower_bound(
    rho: &HermitianOperator,
    sigma: &HermitianOperator,
    alpha: f64,
    ns: &[usize],
    cfg: &MeasuredSearch,
) -> Result<Vec<MeasuredBound>> {
    check_alpha(alpha)?;
    validate_pair(rho, sigma)?;
    let sandwiched = d_sandwiched(rho, sigma, alpha)?;
    let mut out: Vec<MeasuredBound> = Vec::with_capacity(ns.len());
    let mut found: Vec<(usize, CMatrix)> = Vec::new();
    let mut best_gap = f64::INFINITY;
    for &n in ns {
        if n == 0 {
            return Err(Error::InvalidParameter("copy number must be ≥ 1".into()));
        }
        if (rho.dim() as f64).powi(n as i32) > MAX_COPY_DIM as f64 {
            return Err(Error::InvalidParameter(format!("{}^{n} exceeds {MAX_COPY_DIM}", rho.dim())));
        }
        let mut rn = rho.clone();
        let mut sn = sigma.clone();
        for _ in 1..n {
            rn = rn.kron(rho);
            sn = sn.kron(sigma);
        }
        let mut cands = vec![
            ("eigenbasis_rho".to_string(), eigenbasis(&rn)?),
            ("eigenbasis_sigma".to_string(), eigenbasis(&sn)?),
            ("pinching".to_string(), pinching_basis(&rn, &sn)?),
        ];
        if let RhoSigma::Operator(x) = rho_sigma_alpha_z(&rn, &sn, crate::divergence::AlphaZ::sandwiched(alpha)?)? {
            cands.push(("eigenbasis_rho_sigma".into(), eigenbasis(&x)?));
        }
        for (k, u) in &found {
            if n % k == 0 {
                let mut t = u.clone();
                for _ in 1..n / k {
                    t = t.kronecker(u);
                }
                cands.push((format!("product_of_{k}"), t));
            }
        }
        for (k1, u1) in &found {
            for (k2, u2) in &found {
                if k1 + k2 == n {
                    cands.push((format!("product_{k1}_{k2}"), u1.kronecker(u2)));
                }
            }
        }
        let mut rng = seeded(cfg.seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let (value, family, basis) = search_bases(&rn, &sn, alpha, cands, cfg, &mut rng)?;
        let per_copy = value / n as f64;
        let best = ExtendedValue::from_f64(per_copy, Reason::SupportViolation);
        let gap = if sandwiched.is_finite() && best.is_finite() {
            sandwiched.value - per_copy
        } else if sandwiched.is_pos_inf() && best.is_pos_inf() {
            0.0
        } else {
            f64::INFINITY
        };
        best_gap = best_gap.min(gap);
        found.push((n, basis.clone()));
        out.push(MeasuredBound { n, alpha, best, sandwiched, gap, best_gap, family, basis: Some(basis) });
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DmaxTest {
    /// `ln sup_T Tr ρT / Tr σT` over the searched rank-one tests.
    pub value: ExtendedValue,
    #[serde(skip)]
    pub vector: Option<DVector<C64>>,
}

fn ratio(v: &DVector<C64>, rho: &CMatrix, sigma: &CMatrix) -> f64 {
    let a = (v.adjoint() * rho * v)[(0, 0)].re;
    let b = (v.adjoint() * sigma * v)[(0, 0)].re;
    a / b
}

/// `D_max` through rank-one tests `|ψ⟩⟨ψ|`: `ψ = σ^{-1/2} v` with `v` the top
/// eigenvector of `σ^{-1/2} ρ σ^{-1/2}`, refined by random perturbations.
pub fn dmax_two_outcome(rho: &HermitianOperator, sigma: &HermitianOperator, trials: usize, seed: u64) -> Result<DmaxTest> {
    validate_pair(rho, sigma)?;
    if !support_leq(rho, sigma)? {
        return Ok(DmaxTest { value: ExtendedValue::pos_inf(Reason::SupportViolation), vector: None });
    }
    let isq = sigma.power(-0.5)?;
    let x = HermitianOperator::from_matrix_hermitized(isq.matrix() * rho.matrix() * isq.matrix());
    let top = x.spectral()?.eigenvectors().column(0).clone_owned();
    let mut v = isq.matrix() * top;
    v /= c64(v.norm());
    let (rm, sm) = (rho.matrix(), sigma.matrix());
    let mut best = ratio(&v, rm, sm);
    let mut rng = seeded(seed);
    let mut eps = 1e-2;
    for _ in 0..trials {
        let g = ginibre(v.len(), 1, &mut rng);
        let mut w = &v + g.column(0) * c64(eps);
        w /= c64(w.norm());
        let r = ratio(&w, rm, sm);
        if r > best {
            best = r;
            v = w;
        } else {
            eps *= 0.9;
        }
    }
    Ok(DmaxTest { value: ExtendedValue::finite(best.ln()), vector: Some(v) })
}
