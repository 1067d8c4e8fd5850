//! Quantum Fisher information for single-mode Gaussian states and their
//! photon-subtracted / photon-added variants.
//!
//! The crate has four layers:
//!
//! - [`phase_space`]: Wigner functions as polynomial-times-Gaussian objects
//!   ([`phase_space::PolyGaussian`]) with exact moment integration.
//! - [`qfi_closed`]: closed-form QFI expressions for Gaussian,
//!   photon-subtracted and photon-added families, with their special cases
//!   and asymptotic expansions.
//! - [`qfi_numeric`]: independent numerical evaluation of the same QFI by
//!   exact phase-space moment integration and by finite differences on a
//!   quadrature grid.
//! - [`fock_oracle`]: a truncated number-basis simulator (squeezed coherent
//!   states, beam splitter, heralded photon subtraction, fidelity-based QFI)
//!   that serves as ground truth for everything above.
//!
//! All types are immutable values and all operations are pure functions, so
//! everything here is safe to use from multiple threads without
//! synchronization.

pub mod fock_oracle;
pub mod phase_space;
pub mod qfi_closed;
pub mod qfi_numeric;

pub use phase_space::{GaussianSpec, ParamJet, PolyGaussian, StateKind};
pub use qfi_closed::{Method, QfiReport};

/// Errors shared by all modules.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Gamma outside the accepted range `[1e-8, 1e8]` (or not finite).
    #[error("gamma must lie in [1e-8, 1e8], got {0}")]
    GammaOutOfRange(f64),

    /// A state parameter or derivative is NaN or infinite.
    #[error("non-finite parameter {name}: {value}")]
    NonFinite { name: &'static str, value: f64 },

    /// Photon subtraction from (exact) vacuum: the normalization N vanishes.
    #[error("photon subtraction from vacuum undefined (mean photon number {0})")]
    VacuumSubtraction(f64),

    /// A normalization constant that must be positive was not.
    #[error("normalization constant must be positive, got {0}")]
    NonPositiveNormalization(f64),

    /// Evaluation exactly at a singular point of a closed form.
    #[error("singular point: {0}")]
    Singular(String),

    /// A documented precondition was violated.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Requested Fock-space cutoff exceeds the hard limit.
    #[error("cutoff {requested} exceeds hard limit {limit}")]
    CutoffExceeded { requested: usize, limit: usize },

    /// Conditioning on a heralding outcome whose probability vanishes.
    #[error("heralding impossible: event probability {0:.3e}")]
    HeraldingImpossible(f64),

    /// A state that should be normalized is not.
    #[error("state normalization error: {0}")]
    Normalization(String),
}

pub type Result<T> = std::result::Result<T, Error>;
