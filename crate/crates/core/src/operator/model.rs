//! Closed-form diagonal models of infinite-dimensional operators.

use super::series::{riemann_zeta, superpower_sum};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Eigenvalue law `n ↦ λ(n)` (up to the normaliser `c`), `n = 1, 2, …`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ModelFamily {
    /// `n^{-β}`
    Power { beta: f64 },
    /// `n^{-n^γ}`
    Superpower { gamma: f64 },
    /// `r^n`
    Geometric { ratio: f64 },
    /// an explicit finite list
    Finite { values: Vec<f64> },
}

/// Diagonal operator `Σ_n c·λ(n) |e_n⟩⟨e_n|`, realised at a truncation level.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalModel {
    family: ModelFamily,
    normalize: bool,
    log_c: f64,
    trace_class: bool,
}

impl DiagonalModel {
    /// With `normalize`, `c` makes the infinite sum equal to 1 whenever it
    /// converges; otherwise `c = 1`.
    pub fn new(family: ModelFamily, normalize: bool) -> Result<Self> {
        let (trace_class, raw_sum) = match &family {
            ModelFamily::Power { beta } => {
                if !beta.is_finite() || *beta < 0.0 {
                    return Err(Error::InvalidParameter(format!("power law needs β ≥ 0, got {beta}")));
                }
                if *beta > 1.0 {
                    (true, Some(riemann_zeta(*beta)?))
                } else {
                    (false, None)
                }
            }
            ModelFamily::Superpower { gamma } => (true, Some(superpower_sum(*gamma)?)),
            ModelFamily::Geometric { ratio } => {
                if !(*ratio > 0.0) || !ratio.is_finite() {
                    return Err(Error::InvalidParameter(format!("geometric ratio must be > 0, got {ratio}")));
                }
                if *ratio < 1.0 {
                    (true, Some(ratio / (1.0 - ratio)))
                } else {
                    (false, None)
                }
            }
            ModelFamily::Finite { values } => {
                if values.is_empty() {
                    return Err(Error::InvalidParameter("finite model needs at least one value".into()));
                }
                if values.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
                    return Err(Error::InvalidParameter("finite model values must be positive".into()));
                }
                (true, Some(values.iter().sum()))
            }
        };
        let log_c = match (normalize, raw_sum) {
            (true, Some(s)) => -f64::ln(s),
            _ => 0.0,
        };
        Ok(Self { family, normalize, log_c, trace_class })
    }

    pub fn power(beta: f64, normalize: bool) -> Result<Self> {
        Self::new(ModelFamily::Power { beta }, normalize)
    }

    pub fn superpower(gamma: f64, normalize: bool) -> Result<Self> {
        Self::new(ModelFamily::Superpower { gamma }, normalize)
    }

    pub fn geometric(ratio: f64, normalize: bool) -> Result<Self> {
        Self::new(ModelFamily::Geometric { ratio }, normalize)
    }

    pub fn finite(values: Vec<f64>, normalize: bool) -> Result<Self> {
        Self::new(ModelFamily::Finite { values }, normalize)
    }

    pub fn family(&self) -> &ModelFamily {
        &self.family
    }

    pub fn normalized(&self) -> bool {
        self.normalize
    }

    /// The normaliser `c`.
    pub fn normalizer(&self) -> f64 {
        self.log_c.exp()
    }

    pub fn log_normalizer(&self) -> f64 {
        self.log_c
    }

    /// Whether `Σ λ(n)` converges.
    pub fn is_trace_class(&self) -> bool {
        self.trace_class
    }

    /// `Some(len)` for finite models.
    pub fn dimension(&self) -> Option<usize> {
        match &self.family {
            ModelFamily::Finite { values } => Some(values.len()),
            _ => None,
        }
    }

    /// `ln λ(n)` including the normaliser, `n ≥ 1`. Exact in closed form, so
    /// it stays accurate where `λ(n)` itself underflows.
    pub fn log_eigenvalue(&self, n: usize) -> f64 {
        debug_assert!(n >= 1);
        let nf = n as f64;
        let raw = match &self.family {
            ModelFamily::Power { beta } => -beta * nf.ln(),
            ModelFamily::Superpower { gamma } => -nf.powf(*gamma) * nf.ln(),
            ModelFamily::Geometric { ratio } => nf * ratio.ln(),
            ModelFamily::Finite { values } => values.get(n - 1).map_or(f64::NEG_INFINITY, |v| v.ln()),
        };
        self.log_c + raw
    }

    pub fn eigenvalue(&self, n: usize) -> f64 {
        self.log_eigenvalue(n).exp()
    }

    /// Trace of the full (untruncated) operator; `+∞` if not trace-class.
    pub fn total_trace(&self) -> f64 {
        if !self.trace_class {
            return f64::INFINITY;
        }
        if self.normalize {
            return 1.0;
        }
        match &self.family {
            ModelFamily::Power { beta } => riemann_zeta(*beta).unwrap_or(f64::INFINITY),
            ModelFamily::Superpower { gamma } => superpower_sum(*gamma).unwrap_or(f64::INFINITY),
            ModelFamily::Geometric { ratio } => ratio / (1.0 - ratio),
            ModelFamily::Finite { values } => values.iter().sum(),
        }
    }

    /// Clamp a requested level to the model's dimension.
    pub fn clamp_level(&self, n: usize) -> usize {
        self.dimension().map_or(n, |d| n.min(d))
    }
}
