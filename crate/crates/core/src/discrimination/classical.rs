use crate::error::{Error, Result};
use crate::extended::{ExtendedValue, Reason};
use crate::log_sum_exp;
use crate::operator::HermitianOperator;
use serde::{Deserialize, Serialize};

/// A pair of nonnegative weight vectors on a common finite alphabet.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalPair {
    p: Vec<f64>,
    q: Vec<f64>,
}

impl ClassicalPair {
    pub fn new(p: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        if p.len() != q.len() {
            return Err(Error::DimensionMismatch(p.len(), q.len()));
        }
        if p.is_empty() {
            return Err(Error::InvalidInput("empty alphabet".into()));
        }
        for (name, w) in [("p", &p), ("q", &q)] {
            if w.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
                return Err(Error::InvalidInput(format!("{name} has a negative or non-finite weight")));
            }
            if w.iter().all(|&x| x == 0.0) {
                return Err(Error::InvalidInput(format!("{name} is identically zero")));
            }
        }
        Ok(Self { p, q })
    }

    pub fn bernoulli(p: f64, q: f64) -> Result<Self> {
        Self::new(vec![p, 1.0 - p], vec![q, 1.0 - q])
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn alphabet_size(&self) -> usize {
        self.p.len()
    }

    pub fn is_normalized(&self) -> bool {
        let tol = 1e-12;
        (self.p.iter().sum::<f64>() - 1.0).abs() <= tol && (self.q.iter().sum::<f64>() - 1.0).abs() <= tol
    }

    pub fn supports_nest(&self) -> bool {
        self.p.iter().zip(&self.q).all(|(&a, &b)| a == 0.0 || b > 0.0)
    }

    /// Push both distributions through a row-stochastic matrix `w[i][j] = W(j|i)`.
    pub fn process(&self, w: &[Vec<f64>]) -> Result<Self> {
        if w.len() != self.p.len() {
            return Err(Error::DimensionMismatch(w.len(), self.p.len()));
        }
        let m_out = w[0].len();
        for row in w {
            if row.len() != m_out || row.iter().any(|x| !(*x >= 0.0)) || (row.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidInput("post-processing matrix is not row-stochastic".into()));
            }
        }
        let push = |v: &[f64]| -> Vec<f64> {
            (0..m_out).map(|j| v.iter().zip(w).map(|(x, row)| x * row[j]).sum()).collect()
        };
        Self::new(push(&self.p), push(&self.q))
    }

    pub fn to_operators(&self) -> (HermitianOperator, HermitianOperator) {
        (HermitianOperator::from_real_diagonal(&self.p), HermitianOperator::from_real_diagonal(&self.q))
    }
}

/// `ln Σ p^α q^{1-α}`, `+∞` when some `p_i > 0 = q_i`.
pub fn classical_log_q(p: &[f64], q: &[f64], alpha: f64) -> ExtendedValue {
    if p.iter().zip(q).any(|(&a, &b)| a > 0.0 && b == 0.0) {
        return ExtendedValue::pos_inf(Reason::SupportViolation);
    }
    let terms = p.iter().zip(q).filter(|(a, _)| **a > 0.0).map(|(a, b)| alpha * a.ln() + (1.0 - alpha) * b.ln());
    ExtendedValue::finite(log_sum_exp(terms))
}

/// `D_α(p‖q) = ln Σ p^α q^{1-α} / (α-1)` for `α > 1`.
pub fn classical_divergence(pair: &ClassicalPair, alpha: f64) -> Result<ExtendedValue> {
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("α must be a finite number > 1, got {alpha}")));
    }
    Ok(classical_log_q(&pair.p, &pair.q, alpha).map_finite(|l| l / (alpha - 1.0)))
}

/// `ψ̃*(p‖q|u)` with the endpoint conventions `ln Σp` and `ln max p/q`.
pub fn classical_psi(pair: &ClassicalPair, u: f64) -> Result<ExtendedValue> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::InvalidParameter(format!("u must lie in [0,1], got {u}")));
    }
    if u == 0.0 {
        return Ok(ExtendedValue::finite(pair.p.iter().sum::<f64>().ln()));
    }
    if u == 1.0 {
        if !pair.supports_nest() {
            return Ok(ExtendedValue::pos_inf(Reason::SupportViolation));
        }
        let m = pair
            .p
            .iter()
            .zip(&pair.q)
            .filter(|(a, _)| **a > 0.0)
            .map(|(a, b)| a.ln() - b.ln())
            .fold(f64::NEG_INFINITY, f64::max);
        return Ok(ExtendedValue::finite(m));
    }
    let alpha = 1.0 / (1.0 - u);
    Ok(classical_log_q(&pair.p, &pair.q, alpha).map_finite(|l| (1.0 - u) * l))
}

/// `Σ p ln(p/q)`.
pub fn classical_relative_entropy(pair: &ClassicalPair) -> ExtendedValue {
    if !pair.supports_nest() {
        return ExtendedValue::pos_inf(Reason::SupportViolation);
    }
    let d = pair.p.iter().zip(&pair.q).filter(|(a, _)| **a > 0.0).map(|(a, b)| a * (a.ln() - b.ln())).sum();
    ExtendedValue::finite(d)
}
