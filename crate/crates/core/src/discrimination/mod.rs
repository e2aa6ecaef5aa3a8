//! Hypothesis testing: generalized type I/II quantities, channels and the
//! data-processing inequality, measured Rényi divergences, two-outcome
//! `D_max` tests and exact classical Neyman–Pearson sweeps.

mod channel;
mod classical;
mod measured;
mod np;

pub use channel::{apply_channel, dpi_check, generalized_errors, transpose_map_identity, Channel, DpiReport, KRAUS_TOL};
pub use classical::{classical_divergence, classical_log_q, classical_psi, classical_relative_entropy, ClassicalPair};
pub use measured::{
    dmax_two_outcome, measured_lower_bound, measured_renyi, DmaxTest, MeasuredBound, MeasuredSearch, Povm,
    MAX_COPY_DIM, POVM_TOL,
};
pub use np::{
    np_sweep, optimality_slack, sc_exponent_estimate, NpResult, ScExponentReport, MAX_ALPHABET, MAX_BLOCK_LENGTH,
    MAX_EXACT_TYPES, QUANT_WIDTH,
};
