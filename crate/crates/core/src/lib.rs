//! Thermodynamic-style evidence for binomial hypothesis contrasts.
//!
//! An observation of `x` heads in `n` tosses is scored against a contrast
//! `H1: θ ∈ Θ1` vs `H2: θ ∈ Θ2` through the state functions `S` (log
//! likelihood ratio), `V` (likelihood volume) and, for nested contrasts, a
//! correction `b`. They combine into `E = (exp(S) / (V − b)^c2)^(1/c1)`.

pub mod analysis;
pub mod binomial;
pub mod eos;
pub mod error;
pub mod optimize;
pub mod quadrature;
pub mod state;
pub mod verification;

pub use analysis::{
    favored, find_trp, iso_contour, iso_sample_size, sweep_evidence, sweep_grid, ContourPoint, ContourSpec, Favored,
    IsoContour, IsoOptions, SweepGrid, SweepRow, TransitionPoint, TransitionPoints,
};
pub use binomial::{kld, kld_obs, log_likelihood, ContrastClass, HypothesisContrast, Interval, Observation, Side};
pub use eos::{dof_c1, evaluate, evidence_e, Evidence, EvidenceConfig, EvidenceResult};
pub use error::{EvidenceError, Result};
pub use quadrature::QuadratureConfig;
pub use state::{
    correction_b, entropy_s, log_volume, min_fisher_info, rate_constants, state_functions, volume_v, CorrectionRule,
    StateFunctions,
};
