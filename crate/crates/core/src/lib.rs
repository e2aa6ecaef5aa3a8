//! # renyi-core
//!
//! Quantum Rényi (α,z)-divergences for pairs of positive semi-definite
//! operators, represented as dense Hermitian matrices or as closed-form
//! diagonal models of infinite-dimensional operators.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`operator`] | spectral calculus, fractional powers on supports, Schatten norms, diagonal models |
//! | [`divergence`] | `Q_{α,z}`, `D_{α,z}`, sandwiched and Petz cases, `D_max`, Umegaki, Rényi entropies |
//! | [`truncation`] | projection ladders, finite-dimensional approximations, convergence verdicts |
//! | [`variational`] | variational functionals, explicit optimisers, certificates |
//! | [`hoeffding`] | `ψ̃*` curves, Hoeffding anti-divergences, bipolar recovery, cutoff rates |
//! | [`discrimination`] | tests, Neyman–Pearson sweeps, measured divergences, channels |
//!
//! All logarithms are natural.
//!
//! ```
//! use renyi_core::{divergence::{q_alpha_z, AlphaZ}, operator::HermitianOperator};
//!
//! let rho = HermitianOperator::from_real_diagonal(&[0.7, 0.3]);
//! let sigma = HermitianOperator::from_real_diagonal(&[0.5, 0.5]);
//! let q = q_alpha_z(&rho, &sigma, AlphaZ::new(2.0, 2.0).unwrap()).unwrap();
//! assert!((q.value - 1.16).abs() < 1e-12);
//! ```

#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod discrimination;
pub mod divergence;
pub mod error;
pub mod extended;
pub mod hoeffding;
mod optim;
pub mod operator;
pub mod random;
pub mod serde_f64;
pub mod truncation;
pub mod variational;

pub use error::{Error, Result};
pub use extended::{ExtendedValue, Reason};
pub use operator::{DiagonalModel, HermitianOperator, ModelFamily, Projection, SpectralData};

/// `ln Σ exp(x_i)`, ignoring `-∞` entries; `-∞` for an empty or all-`-∞` input.
pub(crate) fn log_sum_exp(xs: impl IntoIterator<Item = f64>) -> f64 {
    let xs: Vec<f64> = xs.into_iter().filter(|x| *x > f64::NEG_INFINITY).collect();
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::INFINITY {
        return f64::INFINITY;
    }
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}
