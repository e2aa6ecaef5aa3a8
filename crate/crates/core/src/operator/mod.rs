//! Spectral calculus for finite Hermitian matrices.
//!
//! Every operator carries a relative rank tolerance `rank_tol`: eigenvalues at
//! or below `rank_tol · max|λ|` count as exact zeros. Fractional powers,
//! inverses and support projections act only on the eigenvectors above that
//! cutoff, so `0^p := 0` for every real `p` (negative powers invert on the
//! support only).

mod model;
mod series;

pub use model::{DiagonalModel, ModelFamily};
pub use series::{riemann_zeta, superpower_sum};

use crate::error::{Error, Result};
use nalgebra::{Complex, DMatrix, SymmetricEigen};
use std::sync::OnceLock;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

/// Default relative eigenvalue cutoff.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;
/// Tolerance of the support inclusion test.
pub const SUPPORT_TOL: f64 = 1e-8;
/// Relative tolerance of the Hermiticity check.
pub const HERMITIAN_TOL: f64 = 1e-12;
const CONTRACTION_TOL: f64 = 1e-8;
const EIGEN_MAX_ITER: usize = 100_000;

#[inline]
pub fn c64(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

/// Eigen-decomposition with eigenvalues in descending order.
///
/// Degenerate eigenspaces get a reproducible basis: standard basis vectors are
/// projected onto the eigenspace in lexicographic order and orthonormalised.
/// Each eigenvector is then rotated so that its first non-negligible entry is
/// real and positive.
#[derive(Clone, Debug)]
pub struct SpectralData {
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
    effective_rank: usize,
    cutoff: f64,
}

impl SpectralData {
    pub fn compute(m: &CMatrix, rank_tol: f64) -> Result<Self> {
        let d = m.nrows();
        if d == 0 {
            return Err(Error::InvalidInput("empty matrix".into()));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Numerical("non-finite matrix entry".into()));
        }
        let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, EIGEN_MAX_ITER)
            .ok_or_else(|| Error::Numerical("Hermitian eigensolver did not converge".into()))?;

        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut vectors = CMatrix::zeros(d, d);
        for (j, &i) in order.iter().enumerate() {
            vectors.set_column(j, &eig.eigenvectors.column(i));
        }

        let scale = eigenvalues.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let cutoff = rank_tol * scale;
        let cluster_tol = rank_tol.max(f64::EPSILON * 16.0) * scale;

        let mut start = 0;
        while start < d {
            let mut end = start + 1;
            while end < d && (eigenvalues[end - 1] - eigenvalues[end]).abs() <= cluster_tol {
                end += 1;
            }
            if end - start > 1 {
                canonical_cluster_basis(&mut vectors, start, end);
            }
            start = end;
        }
        for j in 0..d {
            fix_phase(&mut vectors, j);
        }

        let effective_rank = eigenvalues.iter().filter(|&&v| v > cutoff).count();
        Ok(Self { eigenvalues, eigenvectors: vectors, effective_rank, cutoff })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    pub fn effective_rank(&self) -> usize {
        self.effective_rank
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn lambda_min(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }

    /// Eigenvalues above the cutoff (the support, for PSD operators).
    pub fn support_eigenvalues(&self) -> &[f64] {
        &self.eigenvalues[..self.effective_rank]
    }

    /// Orthonormal basis of the support as a `dim × rank` matrix.
    pub fn support_basis(&self) -> CMatrix {
        self.eigenvectors.columns(0, self.effective_rank).clone_owned()
    }

    /// `U f(Λ) U*` restricted to the support; zero on the kernel.
    pub fn function_on_support(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let r = self.effective_rank;
        let u = self.eigenvectors.columns(0, r);
        let mut scaled = u.clone_owned();
        for j in 0..r {
            let fj = c64(f(self.eigenvalues[j]));
            scaled.column_mut(j).iter_mut().for_each(|z| *z *= fj);
        }
        &scaled * u.adjoint()
    }

    /// `U Λ U*` from the stored data (all eigenvalues).
    pub fn reconstruct(&self) -> CMatrix {
        let mut scaled = self.eigenvectors.clone();
        for j in 0..self.dim() {
            let fj = c64(self.eigenvalues[j]);
            scaled.column_mut(j).iter_mut().for_each(|z| *z *= fj);
        }
        &scaled * self.eigenvectors.adjoint()
    }
}

fn canonical_cluster_basis(vectors: &mut CMatrix, start: usize, end: usize) {
    let d = vectors.nrows();
    let k = end - start;
    let block = vectors.columns(start, k).clone_owned();
    let mut picked: Vec<nalgebra::DVector<C64>> = Vec::with_capacity(k);
    for j in 0..d {
        if picked.len() == k {
            break;
        }
        // projection of e_j onto the cluster: block * (row j of block)^*
        let coeffs = block.row(j).adjoint();
        let mut w = &block * coeffs;
        for _ in 0..2 {
            for u in &picked {
                let ov = u.dotc(&w);
                w -= u * ov;
            }
        }
        let n = w.norm();
        if n > 1e-3 {
            picked.push(w / c64(n));
        }
    }
    if picked.len() < k {
        // cannot happen for an orthonormal block; keep the solver's basis
        return;
    }
    for (i, u) in picked.into_iter().enumerate() {
        vectors.set_column(start + i, &u);
    }
}

fn fix_phase(vectors: &mut CMatrix, j: usize) {
    let col = vectors.column(j);
    if let Some(z) = col.iter().find(|z| z.norm() > 1e-8) {
        let phase = z.conj() / c64(z.norm());
        vectors.column_mut(j).iter_mut().for_each(|v| *v *= phase);
    }
}

/// A dense Hermitian matrix with lazily computed, cached spectral data.
#[derive(Clone, Debug)]
pub struct HermitianOperator {
    matrix: CMatrix,
    rank_tol: f64,
    spectral: OnceLock<Result<SpectralData>>,
}

impl HermitianOperator {
    /// Validates Hermiticity to `1e-12 · max|entry|` and stores the exactly
    /// symmetrised matrix.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let (r, c) = matrix.shape();
        if r != c {
            return Err(Error::NotSquare(r, c));
        }
        if r == 0 {
            return Err(Error::InvalidInput("empty matrix".into()));
        }
        let max_entry = matrix.iter().fold(0.0f64, |a, z| a.max(z.norm()));
        if !max_entry.is_finite() {
            return Err(Error::InvalidInput("non-finite matrix entry".into()));
        }
        let mut asym = 0.0f64;
        for i in 0..r {
            for j in 0..=i {
                asym = asym.max((matrix[(i, j)] - matrix[(j, i)].conj()).norm());
            }
        }
        if asym > HERMITIAN_TOL * max_entry {
            return Err(Error::NotHermitian(asym));
        }
        Ok(Self::from_matrix_hermitized(matrix))
    }

    /// As [`HermitianOperator::new`] followed by a PSD check.
    pub fn psd(matrix: CMatrix) -> Result<Self> {
        let op = Self::new(matrix)?;
        op.check_psd()?;
        Ok(op)
    }

    /// Builds from real and imaginary parts given row by row.
    pub fn from_parts(re: &[Vec<f64>], im: Option<&[Vec<f64>]>) -> Result<Self> {
        let d = re.len();
        if re.iter().any(|row| row.len() != d) {
            return Err(Error::InvalidInput("real part is not a square array".into()));
        }
        if let Some(im) = im {
            if im.len() != d || im.iter().any(|row| row.len() != d) {
                return Err(Error::InvalidInput("imaginary part does not match real part".into()));
            }
        }
        let m = CMatrix::from_fn(d, d, |i, j| {
            Complex::new(re[i][j], im.map_or(0.0, |im| im[i][j]))
        });
        Self::new(m)
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d = diag.len();
        Self::from_matrix_hermitized(CMatrix::from_fn(d, d, |i, j| {
            if i == j {
                c64(diag[i])
            } else {
                C64::default()
            }
        }))
    }

    pub fn identity(d: usize) -> Self {
        Self::from_matrix_hermitized(CMatrix::identity(d, d))
    }

    /// Symmetrises `(M + M*)/2` without validation; for matrices that are
    /// Hermitian up to round-off by construction.
    pub fn from_matrix_hermitized(mut matrix: CMatrix) -> Self {
        let d = matrix.nrows();
        for i in 0..d {
            matrix[(i, i)].im = 0.0;
            for j in 0..i {
                let avg = (matrix[(i, j)] + matrix[(j, i)].conj()) * 0.5;
                matrix[(i, j)] = avg;
                matrix[(j, i)] = avg.conj();
            }
        }
        Self { matrix, rank_tol: DEFAULT_RANK_TOL, spectral: OnceLock::new() }
    }

    pub fn with_rank_tol(mut self, rank_tol: f64) -> Self {
        self.rank_tol = rank_tol;
        self.spectral = OnceLock::new();
        self
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn rank_tol(&self) -> f64 {
        self.rank_tol
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn spectral(&self) -> Result<&SpectralData> {
        self.spectral
            .get_or_init(|| SpectralData::compute(&self.matrix, self.rank_tol))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Rejects eigenvalues below `-rank_tol · λ_max`; smaller negative
    /// eigenvalues are round-off and treated as zero.
    pub fn check_psd(&self) -> Result<()> {
        let s = self.spectral()?;
        let min = s.lambda_min();
        let max = s.lambda_max().max(0.0);
        if min < -self.rank_tol * max || (max == 0.0 && min < 0.0) {
            return Err(Error::NotPsd(min));
        }
        Ok(())
    }

    pub fn is_psd(&self) -> bool {
        self.check_psd().is_ok()
    }

    /// True when no eigenvalue is above the cutoff or the matrix is exactly 0.
    pub fn is_zero(&self) -> Result<bool> {
        if self.matrix.iter().all(|z| *z == C64::default()) {
            return Ok(true);
        }
        Ok(self.spectral()?.effective_rank() == 0)
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self::from_matrix_hermitized(&self.matrix * c64(factor)).with_rank_tol(self.rank_tol)
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self::from_matrix_hermitized(self.matrix.kronecker(&other.matrix)).with_rank_tol(self.rank_tol)
    }

    /// `A^p` on the support (PSD operators only).
    pub fn power(&self, p: f64) -> Result<Self> {
        fractional_power(self, p)
    }

    /// `f(A)` on the support.
    pub fn apply_on_support(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let s = self.spectral()?;
        Ok(Self::from_matrix_hermitized(s.function_on_support(f)).with_rank_tol(self.rank_tol))
    }

    pub fn operator_norm(&self) -> Result<f64> {
        let s = self.spectral()?;
        Ok(s.lambda_max().abs().max(s.lambda_min().abs()))
    }
}

/// A Hermitian idempotent.
#[derive(Clone, Debug)]
pub struct Projection {
    op: HermitianOperator,
    rank: usize,
}

impl Projection {
    /// Projection onto the span of orthonormal columns.
    pub fn from_orthonormal_columns(basis: &CMatrix) -> Self {
        let rank = basis.ncols();
        let m = basis * basis.adjoint();
        Self { op: HermitianOperator::from_matrix_hermitized(m), rank }
    }

    pub fn zero(d: usize) -> Self {
        Self { op: HermitianOperator::from_matrix_hermitized(CMatrix::zeros(d, d)), rank: 0 }
    }

    pub fn identity(d: usize) -> Self {
        Self { op: HermitianOperator::identity(d), rank: d }
    }

    /// Validates `‖P² − P‖ ≤ 1e-10` and a `{0,1}` spectrum.
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let m = op.matrix();
        let defect = operator_norm(&(m * m - m))?;
        if defect > 1e-10 {
            return Err(Error::InvalidInput(format!("not idempotent (defect {defect:e})")));
        }
        let s = op.spectral()?;
        if s.eigenvalues().iter().any(|&v| v.abs() > 1e-10 && (v - 1.0).abs() > 1e-10) {
            return Err(Error::InvalidInput("projection spectrum outside {0,1}".into()));
        }
        let rank = s.eigenvalues().iter().filter(|&&v| v > 0.5).count();
        Ok(Self { op, rank })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_empty(&self) -> bool {
        self.rank == 0
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        self.op.matrix()
    }

    pub fn as_operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn into_operator(self) -> HermitianOperator {
        self.op
    }
}

/// Spectral data of `a` (a copy of the cached decomposition).
pub fn spectral_decompose(a: &HermitianOperator) -> Result<SpectralData> {
    a.spectral().cloned()
}

/// `A^p` with `λ^p` on the effective support and `0` elsewhere. `A^0` is the
/// support projection.
pub fn fractional_power(a: &HermitianOperator, p: f64) -> Result<HermitianOperator> {
    a.check_psd()?;
    if !p.is_finite() {
        return Err(Error::InvalidParameter(format!("power must be finite, got {p}")));
    }
    if p == 1.0 {
        return Ok(a.clone());
    }
    a.apply_on_support(|l| if p == 0.0 { 1.0 } else { l.powf(p) })
}

pub fn support_projection(a: &HermitianOperator) -> Result<Projection> {
    a.check_psd()?;
    let s = a.spectral()?;
    Ok(Projection::from_orthonormal_columns(&s.support_basis()))
}

/// `supp A ⊆ supp B`, tested as `‖(I − B⁰)A⁰‖ ≤ SUPPORT_TOL`.
pub fn support_leq(a: &HermitianOperator, b: &HermitianOperator) -> Result<bool> {
    support_leq_tol(a, b, SUPPORT_TOL)
}

pub fn support_leq_tol(a: &HermitianOperator, b: &HermitianOperator, tol: f64) -> Result<bool> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    let ua = a.spectral()?.support_basis();
    if ua.ncols() == 0 {
        return Ok(true);
    }
    let ub = b.spectral()?.support_basis();
    let residual = if ub.ncols() == 0 { ua } else { &ua - &ub * (ub.adjoint() * &ua) };
    Ok(operator_norm(&residual)? <= tol)
}

/// `𝟙_{(c,d)}(σ)`: projection onto eigenvectors with eigenvalue strictly
/// inside the window. An empty window yields the zero projection.
pub fn spectral_truncation(sigma: &HermitianOperator, c: f64, d: f64) -> Result<Projection> {
    if !(c > 0.0 && c < d) {
        return Err(Error::InvalidParameter(format!("need 0 < c < d, got c={c}, d={d}")));
    }
    sigma.check_psd()?;
    let s = sigma.spectral()?;
    let cols: Vec<usize> =
        (0..s.dim()).filter(|&i| s.eigenvalues()[i] > c && s.eigenvalues()[i] < d).collect();
    if cols.is_empty() {
        return Ok(Projection::zero(sigma.dim()));
    }
    Ok(Projection::from_orthonormal_columns(&s.eigenvectors().select_columns(cols.iter())))
}

/// Singular values in descending order.
pub fn singular_values(m: &CMatrix) -> Result<Vec<f64>> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(Vec::new());
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numerical("non-finite matrix entry".into()));
    }
    let svd = nalgebra::SVD::try_new(m.clone(), false, false, f64::EPSILON, EIGEN_MAX_ITER)
        .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

pub fn operator_norm(m: &CMatrix) -> Result<f64> {
    Ok(singular_values(m)?.first().copied().unwrap_or(0.0))
}

/// `‖X‖_p = (Σ s_i^p)^{1/p}` over singular values above `DEFAULT_RANK_TOL · s_max`;
/// a quasi-norm for `p < 1`.
pub fn schatten_norm(m: &CMatrix, p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::InvalidParameter(format!("Schatten index must be positive, got {p}")));
    }
    let s = singular_values(m)?;
    let smax = s.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return Ok(0.0);
    }
    let cut = DEFAULT_RANK_TOL * smax;
    if p.is_infinite() {
        return Ok(smax);
    }
    // factor out s_max to avoid overflow for large p
    let sum: f64 = s.iter().filter(|&&v| v > cut).map(|&v| (v / smax).powf(p)).sum();
    Ok(smax * sum.powf(1.0 / p))
}

/// Singular values of `A^p B^q` (powers on the supports), from the factor
/// `Λ_A^p (U_A* U_B) Λ_B^q` assembled entrywise so that small eigenvalues
/// of either operator keep their relative accuracy.
pub fn product_singular_values(a: &HermitianOperator, p: f64, b: &HermitianOperator, q: f64) -> Result<Vec<f64>> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    let sa = a.spectral()?;
    let sb = b.spectral()?;
    let mut m = sa.support_basis().adjoint() * sb.support_basis();
    for (i, la) in sa.support_eigenvalues().iter().enumerate() {
        let fa = la.powf(p);
        for (j, lb) in sb.support_eigenvalues().iter().enumerate() {
            m[(i, j)] *= c64(fa * lb.powf(q));
        }
    }
    singular_values(&m)
}

/// `K A K*` for a contraction `K` (`‖K‖ ≤ 1 + 1e-8`).
pub fn compress(k: &CMatrix, a: &HermitianOperator) -> Result<HermitianOperator> {
    if k.ncols() != a.dim() {
        return Err(Error::DimensionMismatch(k.ncols(), a.dim()));
    }
    let norm = operator_norm(k)?;
    if norm > 1.0 + CONTRACTION_TOL {
        return Err(Error::InvalidInput(format!("not a contraction (norm {norm})")));
    }
    Ok(HermitianOperator::from_matrix_hermitized(k * a.matrix() * k.adjoint())
        .with_rank_tol(a.rank_tol()))
}

/// `P A P` for a projection.
pub fn compress_projection(p: &Projection, a: &HermitianOperator) -> HermitianOperator {
    let pm = p.matrix();
    HermitianOperator::from_matrix_hermitized(pm * a.matrix() * pm).with_rank_tol(a.rank_tol())
}

/// `diag(λ(1), …, λ(N))` for a diagonal model.
pub fn realize(model: &DiagonalModel, n: usize) -> Result<HermitianOperator> {
    if n == 0 {
        return Err(Error::InvalidParameter("truncation level must be ≥ 1".into()));
    }
    if let Some(dim) = model.dimension() {
        if n > dim {
            return Err(Error::InvalidParameter(format!(
                "level {n} exceeds finite model dimension {dim}"
            )));
        }
    }
    let diag: Vec<f64> = (1..=n).map(|k| model.eigenvalue(k)).collect();
    Ok(HermitianOperator::from_real_diagonal(&diag))
}
