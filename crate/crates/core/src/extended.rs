//! Extended-real results with a reason code.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Why a value is what it is.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    Finite,
    SupportViolation,
    LadderDivergent,
    EndpointConvention,
    NotEvaluated,
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Reason::Finite => "finite",
            Reason::SupportViolation => "support_violation",
            Reason::LadderDivergent => "ladder_divergent",
            Reason::EndpointConvention => "endpoint_convention",
            Reason::NotEvaluated => "not_evaluated",
        };
        f.write_str(s)
    }
}

/// A value in ℝ ∪ {±∞} tagged with a [`Reason`].
///
/// Infinite values never carry [`Reason::Finite`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtendedValue {
    #[serde(with = "crate::serde_f64")]
    pub value: f64,
    pub reason: Reason,
}

impl ExtendedValue {
    pub fn finite(value: f64) -> Self {
        debug_assert!(value.is_finite() || value.is_nan());
        Self { value, reason: Reason::Finite }
    }

    pub fn pos_inf(reason: Reason) -> Self {
        debug_assert!(reason != Reason::Finite);
        Self { value: f64::INFINITY, reason }
    }

    pub fn neg_inf(reason: Reason) -> Self {
        debug_assert!(reason != Reason::Finite);
        Self { value: f64::NEG_INFINITY, reason }
    }

    /// Wraps a raw float; infinities get `reason`, finite values get `Finite`.
    pub fn from_f64(value: f64, reason_if_infinite: Reason) -> Self {
        if value.is_infinite() {
            Self { value, reason: reason_if_infinite }
        } else {
            Self::finite(value)
        }
    }

    pub fn not_evaluated() -> Self {
        Self { value: f64::NAN, reason: Reason::NotEvaluated }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }

    pub fn is_pos_inf(&self) -> bool {
        self.value == f64::INFINITY
    }

    pub fn is_neg_inf(&self) -> bool {
        self.value == f64::NEG_INFINITY
    }

    /// Applies `f` to finite values and keeps infinities (with their reason) intact.
    pub fn map_finite(self, f: impl FnOnce(f64) -> f64) -> Self {
        if self.is_finite() {
            Self::finite(f(self.value))
        } else {
            self
        }
    }
}

impl fmt::Display for ExtendedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.value.is_finite() {
            write!(f, "{}", self.value)
        } else {
            write!(f, "{} ({})", self.value, self.reason)
        }
    }
}
