//! Seeded random ensembles used by the property checks, the acceptance suite
//! and the CLI's randomized trials.

use crate::operator::{c64, CMatrix, HermitianOperator, C64};
use nalgebra::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// Density matrix `GG*/Tr(GG*)` with `G` a `d × rank` Ginibre matrix.
pub fn density_of_rank<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> HermitianOperator {
    let g = ginibre(d, rank, rng);
    let m = &g * g.adjoint();
    let tr: f64 = m.diagonal().iter().map(|z| z.re).sum();
    HermitianOperator::from_matrix_hermitized(m / c64(tr))
}

/// Full-rank random density matrix.
pub fn density<R: Rng + ?Sized>(d: usize, rng: &mut R) -> HermitianOperator {
    density_of_rank(d, d, rng)
}

/// Full-rank density matrix mixed with `I/d` so that its smallest eigenvalue
/// is at least `floor/d`.
pub fn well_conditioned_density<R: Rng + ?Sized>(d: usize, floor: f64, rng: &mut R) -> HermitianOperator {
    let rho = density(d, rng);
    let m = rho.matrix() * c64(1.0 - floor) + CMatrix::identity(d, d) * c64(floor / d as f64);
    HermitianOperator::from_matrix_hermitized(m)
}

/// Random PSD (not normalised) with trace drawn from `(0.2, 5)`.
pub fn psd<R: Rng + ?Sized>(d: usize, rng: &mut R) -> HermitianOperator {
    let t: f64 = rng.random_range(0.2..5.0);
    density(d, rng).scale(t)
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix, with
/// the phases of `R`'s diagonal absorbed.
pub fn unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    isometry(d, d, rng)
}

/// Haar-random isometry `rows × cols` (`rows ≥ cols`): `V*V = I`.
pub fn isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    assert!(rows >= cols, "isometry needs rows ≥ cols");
    let g = ginibre(rows, cols, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..cols {
        let d = r[(j, j)];
        let n = d.norm();
        if n > 0.0 {
            let phase: C64 = d / c64(n);
            q.column_mut(j).iter_mut().for_each(|z| *z *= phase);
        }
    }
    q
}

/// A contraction with operator norm drawn from `(0.1, 1]`.
pub fn contraction<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(rows, cols, rng);
    let norm = crate::operator::operator_norm(&g).unwrap_or(1.0).max(1e-300);
    let target: f64 = rng.random_range(0.1..=1.0);
    g * c64(target / norm)
}

/// Random probability vector of length `m` with entries bounded below by
/// `floor / m`.
pub fn probability<R: Rng + ?Sized>(m: usize, floor: f64, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..m).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    let s: f64 = raw.iter().sum();
    raw.iter().map(|x| (1.0 - floor) * x / s + floor / m as f64).collect()
}

/// Random Hermitian matrix with Gaussian entries.
pub fn hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> HermitianOperator {
    let g = ginibre(d, d, rng);
    HermitianOperator::from_matrix_hermitized((&g + g.adjoint()) * c64(0.5))
}
