use crate::divergence::d_sandwiched;
use crate::error::{Error, Result};
use crate::extended::ExtendedValue;
use crate::operator::{c64, CMatrix, HermitianOperator};
use crate::random::isometry;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Tolerance on `Σ V_i* V_i = I`.
pub const KRAUS_TOL: f64 = 1e-10;

/// A channel given by Kraus operators `V_i : C^{d_in} → C^{d_out}`.
///
/// The unital map acts on observables as `Φ(B) = Σ V_i* B V_i` and its dual
/// on states as `Φ*(ρ) = Σ V_i ρ V_i*`.
#[derive(Clone, Debug)]
pub struct Channel {
    kraus: Vec<CMatrix>,
}

impl Channel {
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or_else(|| Error::InvalidInput("no Kraus operators".into()))?;
        let (d_out, d_in) = first.shape();
        if let Some(v) = kraus.iter().find(|v| v.shape() != (d_out, d_in)) {
            return Err(Error::InvalidInput(format!(
                "Kraus operators have mixed shapes {:?} and {:?}",
                (d_out, d_in),
                v.shape()
            )));
        }
        let mut sum = CMatrix::zeros(d_in, d_in);
        for v in &kraus {
            sum += v.adjoint() * v;
        }
        let dev = (sum - CMatrix::identity(d_in, d_in)).iter().fold(0.0f64, |a, z| a.max(z.norm()));
        if !(dev <= KRAUS_TOL) {
            return Err(Error::InvalidInput(format!("Σ V*V deviates from I by {dev:e}")));
        }
        Ok(Self { kraus })
    }

    pub fn identity(d: usize) -> Self {
        Self { kraus: vec![CMatrix::identity(d, d)] }
    }

    /// `ρ ↦ Tr ρ · I/d` with Kraus operators `|i⟩⟨j|/√d`.
    pub fn completely_depolarizing(d: usize) -> Self {
        let s = c64(1.0 / (d as f64).sqrt());
        let kraus = (0..d * d)
            .map(|k| {
                let mut v = CMatrix::zeros(d, d);
                v[(k / d, k % d)] = s;
                v
            })
            .collect();
        Self { kraus }
    }

    /// Kraus operators cut from a Haar-random isometry `C^{d_in} → C^{d_out} ⊗ C^k`.
    pub fn random<R: Rng + ?Sized>(d_in: usize, d_out: usize, k: usize, rng: &mut R) -> Result<Self> {
        if d_in == 0 || d_out == 0 || k == 0 {
            return Err(Error::InvalidParameter("channel dimensions must be positive".into()));
        }
        if d_out * k < d_in {
            return Err(Error::InvalidParameter(format!(
                "{k} Kraus operators of size {d_out}×{d_in} cannot form a channel"
            )));
        }
        let w = isometry(d_out * k, d_in, rng);
        let kraus = (0..k).map(|i| w.rows(i * d_out, d_out).clone_owned()).collect();
        Self::new(kraus)
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn d_in(&self) -> usize {
        self.kraus[0].ncols()
    }

    pub fn d_out(&self) -> usize {
        self.kraus[0].nrows()
    }

    /// `Φ*(A) = Σ V_i A V_i*`.
    pub fn apply(&self, a: &HermitianOperator) -> Result<HermitianOperator> {
        if a.dim() != self.d_in() {
            return Err(Error::DimensionMismatch(a.dim(), self.d_in()));
        }
        let mut out = CMatrix::zeros(self.d_out(), self.d_out());
        for v in &self.kraus {
            out += v * a.matrix() * v.adjoint();
        }
        Ok(HermitianOperator::from_matrix_hermitized(out).with_rank_tol(a.rank_tol()))
    }

    /// `Φ(B) = Σ V_i* B V_i`.
    pub fn apply_heisenberg(&self, b: &HermitianOperator) -> Result<HermitianOperator> {
        if b.dim() != self.d_out() {
            return Err(Error::DimensionMismatch(b.dim(), self.d_out()));
        }
        let mut out = CMatrix::zeros(self.d_in(), self.d_in());
        for v in &self.kraus {
            out += v.adjoint() * b.matrix() * v;
        }
        Ok(HermitianOperator::from_matrix_hermitized(out).with_rank_tol(b.rank_tol()))
    }
}

/// `Φ*(A)`.
pub fn apply_channel(ch: &Channel, a: &HermitianOperator) -> Result<HermitianOperator> {
    ch.apply(a)
}

fn sandwich_trace(a: &HermitianOperator, x: &HermitianOperator) -> Result<f64> {
    let h = a.power(0.5)?;
    Ok((h.matrix() * x.matrix() * h.matrix()).trace().re)
}

/// Both sides of `Tr A^{1/2} Φ*(ρ) A^{1/2} = Tr Φ(A)^{1/2} ρ Φ(A)^{1/2}` for PSD `A`.
pub fn transpose_map_identity(ch: &Channel, a: &HermitianOperator, rho: &HermitianOperator) -> Result<(f64, f64)> {
    a.check_psd()?;
    let lhs = sandwich_trace(a, &ch.apply(rho)?)?;
    let rhs = sandwich_trace(&ch.apply_heisenberg(a)?, rho)?;
    Ok((lhs, rhs))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DpiReport {
    pub alpha: f64,
    pub before: ExtendedValue,
    pub after: ExtendedValue,
    pub holds: bool,
}

/// `D*_α(Φ*(ρ)‖Φ*(σ)) ≤ D*_α(ρ‖σ) + slack`.
pub fn dpi_check(ch: &Channel, rho: &HermitianOperator, sigma: &HermitianOperator, alpha: f64, slack: f64) -> Result<DpiReport> {
    let before = d_sandwiched(rho, sigma, alpha)?;
    let after = d_sandwiched(&ch.apply(rho)?, &ch.apply(sigma)?, alpha)?;
    let holds = before.is_pos_inf() || (!after.is_pos_inf() && after.value <= before.value + slack);
    Ok(DpiReport { alpha, before, after, holds })
}

/// The two-outcome test statistics `(γ, β) = (Tr T^{1/2} ρ T^{1/2}, Tr T^{1/2} σ T^{1/2})`.
pub fn generalized_errors(t: &HermitianOperator, rho: &HermitianOperator, sigma: &HermitianOperator) -> Result<(f64, f64)> {
    if t.dim() != rho.dim() || t.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(t.dim(), rho.dim()));
    }
    let s = t.spectral()?;
    let tol = 1e-10 * s.lambda_max().abs().max(1.0);
    if s.lambda_min() < -tol || s.lambda_max() > 1.0 + tol {
        return Err(Error::InvalidInput(format!(
            "test spectrum [{}, {}] is not inside [0,1]",
            s.lambda_min(),
            s.lambda_max()
        )));
    }
    Ok((sandwich_trace(t, rho)?, sandwich_trace(t, sigma)?))
}
