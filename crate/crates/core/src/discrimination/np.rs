//! Neyman–Pearson tests for i.i.d. classical pairs.
//!
//! Optimal tests accept sequences in decreasing order of likelihood ratio,
//! randomizing on the boundary atom. Symbols sharing a likelihood ratio are
//! merged, then the log-likelihood-ratio sum is enumerated exactly over type
//! classes when their number is at most [`MAX_EXACT_TYPES`]; otherwise the
//! per-symbol ratios are rounded to a lattice and the sum distribution is
//! built by direct convolution.

use super::classical::{classical_psi, ClassicalPair};
use crate::error::{Error, Result};
use crate::hoeffding::{default_u_grid, hoeffding_anti, Psi};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const MAX_ALPHABET: usize = 8;
pub const MAX_BLOCK_LENGTH: usize = 5000;
pub const MAX_EXACT_TYPES: f64 = 4.0e6;
/// Finest lattice spacing of the quantized engine, in nats per symbol.
pub const QUANT_WIDTH: f64 = 1e-4;
/// Upper bound on `n · (lattice length per symbol) · alphabet` for the
/// quantized engine.
const QUANT_BUDGET: f64 = 4.0e8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NpResult {
    pub n: usize,
    pub r: f64,
    /// `ln γ_n`, the largest type I success under `β_n ≤ e^{-nr}`.
    pub log_gamma: f64,
    pub log_beta: f64,
    pub exact: bool,
    /// Lattice spacing of the per-symbol log-likelihood ratios (0 when exact).
    /// The test is still exactly evaluated; this bounds how far its exponent
    /// can be from the optimal one.
    pub llr_width: f64,
}

impl NpResult {
    pub fn gamma(&self) -> f64 {
        self.log_gamma.exp()
    }

    pub fn beta(&self) -> f64 {
        self.log_beta.exp()
    }

    /// `−(1/n) ln γ_n`.
    pub fn exponent(&self) -> f64 {
        -self.log_gamma / self.n as f64
    }
}

#[derive(Clone, Copy, Debug)]
struct Atom {
    llr: f64,
    lp: f64,
    lq: f64,
}

fn lse2(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// `ln(1 − e^x)` for `x ≤ 0`.
fn ln_1m_exp(x: f64) -> f64 {
    if x > -std::f64::consts::LN_2 { (-x.exp_m1()).ln() } else { (-x.exp()).ln_1p() }
}

/// Symbols with `p > 0`, merged by likelihood ratio, as `(ln p, ln q)`.
fn merged_symbols(pair: &ClassicalPair) -> Vec<(f64, f64)> {
    let mut syms: Vec<(f64, f64)> = Vec::new();
    for (&p, &q) in pair.p().iter().zip(pair.q()) {
        if p == 0.0 {
            continue;
        }
        let llr = p.ln() - q.ln();
        match syms.iter_mut().find(|(sp, sq)| {
            let l = sp.ln() - sq.ln();
            l == llr || (l.is_finite() && (l - llr).abs() <= 1e-12 * (1.0 + l.abs()))
        }) {
            Some(s) => {
                s.0 += p;
                s.1 += q;
            }
            None => syms.push((p, q)),
        }
    }
    syms.into_iter().map(|(p, q)| (p.ln(), q.ln())).collect()
}

fn type_count(n: usize, k: usize) -> f64 {
    (1..k).fold(1.0, |acc, i| acc * (n + i) as f64 / i as f64)
}

fn exact_atoms(syms: &[(f64, f64)], n: usize) -> Vec<Atom> {
    let mut lnfact = vec![0.0; n + 1];
    for i in 1..=n {
        lnfact[i] = lnfact[i - 1] + (i as f64).ln();
    }
    let k = syms.len();
    let mut out = Vec::with_capacity(type_count(n, k) as usize);
    let mut counts = vec![0usize; k];
    fn rec(i: usize, left: usize, counts: &mut [usize], syms: &[(f64, f64)], lnfact: &[f64], n: usize, out: &mut Vec<Atom>) {
        if i + 1 == counts.len() {
            counts[i] = left;
            let mut lp = lnfact[n];
            let mut lq = lnfact[n];
            for (c, (sp, sq)) in counts.iter().zip(syms) {
                lp -= lnfact[*c];
                lq -= lnfact[*c];
                if *c > 0 {
                    lp += *c as f64 * sp;
                    lq += *c as f64 * sq;
                }
            }
            out.push(Atom { llr: lp - lq, lp, lq });
            return;
        }
        for c in 0..=left {
            counts[i] = c;
            rec(i + 1, left - c, counts, syms, lnfact, n, out);
        }
    }
    rec(0, n, &mut counts, syms, &lnfact, n, &mut out);
    out
}

/// Lattice engine; returns the atoms and the lattice spacing.
fn quantized_atoms(syms: &[(f64, f64)], n: usize) -> (Vec<Atom>, f64) {
    let (free, finite): (Vec<_>, Vec<_>) = syms.iter().partition(|(_, q)| *q == f64::NEG_INFINITY);
    let llrs: Vec<f64> = finite.iter().map(|(p, q)| p - q).collect();
    let lmin = llrs.iter().copied().fold(f64::INFINITY, f64::min);
    let lmax = llrs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let k = finite.len() as f64;
    let max_len = (QUANT_BUDGET / (n as f64 * k)).max(16.0);
    let h = QUANT_WIDTH.max(n as f64 * (lmax - lmin) / max_len);
    let offs: Vec<usize> = llrs.iter().map(|l| ((l - lmin) / h).round() as usize).collect();
    let kmax = *offs.iter().max().unwrap_or(&0);

    let mut lp = vec![0.0f64];
    let mut lq = vec![0.0f64];
    for _ in 0..n {
        let len = lp.len() + kmax;
        let mut np = vec![f64::NEG_INFINITY; len];
        let mut nq = vec![f64::NEG_INFINITY; len];
        for (s, (&a, &b)) in lp.iter().zip(&lq).enumerate() {
            if a == f64::NEG_INFINITY && b == f64::NEG_INFINITY {
                continue;
            }
            for (o, (sp, sq)) in offs.iter().zip(&finite) {
                np[s + o] = lse2(np[s + o], a + sp);
                nq[s + o] = lse2(nq[s + o], b + sq);
            }
        }
        lp = np;
        lq = nq;
    }
    let mut atoms: Vec<Atom> = lp
        .iter()
        .zip(&lq)
        .enumerate()
        .filter(|(_, (a, _))| **a > f64::NEG_INFINITY)
        .map(|(s, (&a, &b))| Atom { llr: n as f64 * lmin + s as f64 * h, lp: a, lq: b })
        .collect();
    if let Some(&(fp, _)) = free.first() {
        // sequences containing a symbol with q = 0
        let ln_rest = finite.iter().map(|(p, _)| p.exp()).sum::<f64>().ln();
        let total = lse2(ln_rest, fp);
        let lp_free = n as f64 * total + ln_1m_exp(n as f64 * (ln_rest - total));
        atoms.push(Atom { llr: f64::INFINITY, lp: lp_free, lq: f64::NEG_INFINITY });
    }
    (atoms, h)
}

fn greedy(mut atoms: Vec<Atom>, log_budget: f64) -> (f64, f64) {
    atoms.sort_by(|a, b| b.llr.total_cmp(&a.llr));
    let (mut lg, mut lb) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for a in atoms {
        let nb = lse2(lb, a.lq);
        if nb <= log_budget {
            lg = lse2(lg, a.lp);
            lb = nb;
            continue;
        }
        let room = log_budget + ln_1m_exp(lb - log_budget);
        lg = lse2(lg, room - a.lq + a.lp);
        lb = log_budget;
        break;
    }
    (lg, lb)
}

/// Optimal randomized test for `n` i.i.d. copies with `β_n ≤ e^{-nr}`.
pub fn np_sweep(pair: &ClassicalPair, n: usize, r: f64) -> Result<NpResult> {
    if !pair.is_normalized() {
        return Err(Error::InvalidInput("Neyman–Pearson sweeps need normalized distributions".into()));
    }
    if pair.alphabet_size() > MAX_ALPHABET {
        return Err(Error::InvalidInput(format!("alphabet larger than {MAX_ALPHABET}")));
    }
    if n == 0 || n > MAX_BLOCK_LENGTH {
        return Err(Error::InvalidParameter(format!("block length must lie in 1..={MAX_BLOCK_LENGTH}, got {n}")));
    }
    if !r.is_finite() && r != f64::INFINITY {
        return Err(Error::InvalidParameter(format!("invalid rate {r}")));
    }
    let syms = merged_symbols(pair);
    let (atoms, exact, width) = if type_count(n, syms.len()) <= MAX_EXACT_TYPES {
        (exact_atoms(&syms, n), true, 0.0)
    } else {
        let (a, h) = quantized_atoms(&syms, n);
        (a, false, h)
    };
    let (log_gamma, log_beta) = greedy(atoms, -(n as f64) * r);
    Ok(NpResult { n, r, log_gamma, log_beta, exact, llr_width: width })
}

/// Smallest slack of `−(1/n)ln γ ≥ u·(−(1/n)ln β) − ψ̃*(u)` over `u_grid`;
/// grid points with `ψ̃*(u) = +∞` are skipped.
pub fn optimality_slack(pair: &ClassicalPair, res: &NpResult, u_grid: &[f64]) -> Result<f64> {
    let n = res.n as f64;
    let (eg, eb) = (-res.log_gamma / n, -res.log_beta / n);
    let mut worst = f64::INFINITY;
    for &u in u_grid {
        let psi = classical_psi(pair, u)?;
        if psi.is_pos_inf() || res.log_gamma == f64::NEG_INFINITY {
            continue;
        }
        let rhs = if u == 0.0 { -psi.value } else { u * eb - psi.value };
        worst = worst.min(eg - rhs);
    }
    Ok(worst)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScExponentReport {
    pub r: f64,
    pub points: Vec<NpResult>,
    pub exponents: Vec<f64>,
    /// Fit of `e + a ln(n)/n + b/n` to the tail of the sequence.
    pub extrapolated: f64,
    /// `Ĥ_r*(p‖q)`.
    pub prediction: f64,
}

fn extrapolate(ns: &[usize], es: &[f64]) -> f64 {
    let n_max = *ns.iter().max().unwrap_or(&1) as f64;
    let pts: Vec<(f64, f64)> = ns
        .iter()
        .zip(es)
        .filter(|(n, e)| **n as f64 >= n_max / 8.0 && e.is_finite())
        .map(|(&n, &e)| (n as f64, e))
        .collect();
    if pts.len() < 3 {
        return es.last().copied().unwrap_or(f64::NAN);
    }
    let rows: Vec<[f64; 3]> = pts.iter().map(|(n, _)| [1.0, n.ln() / n, 1.0 / n]).collect();
    let a = nalgebra::DMatrix::from_fn(rows.len(), 3, |i, j| rows[i][j]);
    let b = nalgebra::DVector::from_iterator(pts.len(), pts.iter().map(|p| p.1));
    match a.svd(true, true).solve(&b, 1e-14) {
        Ok(x) => x[0],
        Err(_) => es.last().copied().unwrap_or(f64::NAN),
    }
}

/// `−(1/n) ln γ_n` over `n_grid`, with extrapolation and the Hoeffding
/// anti-divergence it should approach.
pub fn sc_exponent_estimate(pair: &ClassicalPair, r: f64, n_grid: &[usize]) -> Result<ScExponentReport> {
    if n_grid.is_empty() {
        return Err(Error::InvalidParameter("empty block-length grid".into()));
    }
    let points: Result<Vec<NpResult>> = n_grid.par_iter().map(|&n| np_sweep(pair, n, r)).collect();
    let points = points?;
    let exponents: Vec<f64> = points.iter().map(NpResult::exponent).collect();
    let extrapolated = extrapolate(n_grid, &exponents);
    let (rho, sigma) = pair.to_operators();
    let psi = Psi::matrices(rho, sigma)?;
    let curve = psi.curve(&default_u_grid())?;
    let prediction = hoeffding_anti(&psi, &curve, r)?.h_hat.value;
    Ok(ScExponentReport { r, points, exponents, extrapolated, prediction })
}
