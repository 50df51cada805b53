use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Which pair of arguments in a Bethe sum sits on a pole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PolePartner {
    /// Root `alpha` against site `j`.
    Site(usize),
    /// Root `alpha` against another root `beta`.
    Root(usize),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("elliptic modulus k = {0} lies outside (0, 1)")]
    ModulusDomain(f64),

    #[error("argument {arg} is within {distance:.3e} of the lattice pole {pole}")]
    PoleProximity {
        arg: Complex64,
        pole: Complex64,
        distance: f64,
    },

    #[error("root {alpha} collides with {partner:?} (separation {distance:.3e})")]
    BethePole {
        alpha: usize,
        partner: PolePartner,
        distance: f64,
    },

    #[error("Newton step at iteration {iteration} cannot avoid a pole even at minimal damping")]
    PoleCollision { iteration: usize },

    #[error("invalid spin magnitude {0}: 2s must be a positive integer")]
    InvalidSpin(f64),

    #[error("coupling is singular at z = {0} (sn vanishes)")]
    SingularCoupling(f64),

    #[error("invalid spin system: {0}")]
    InvalidSystem(String),

    #[error("Hilbert space dimension {dim} exceeds the dense budget of {limit}")]
    DimensionTooLarge { dim: usize, limit: usize },

    #[error("matrix is not Hermitian (max |A - A^H| = {0:.3e})")]
    NonHermitian(f64),

    #[error("operator does not commute with parity (max |[A, P]| = {0:.3e})")]
    NonCommuting(f64),

    #[error(
        "eigensolver did not converge after {iterations} iterations (residual {residual:.3e})"
    )]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("eigenvalue r_{index} has imaginary part {imag:.3e}")]
    NonRealEigenvalue { index: usize, imag: f64 },

    #[error("enumeration incomplete: found {found} of {expected} solutions")]
    IncompleteEnumeration { found: usize, expected: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("no ground-state pattern found in {attempts} attempts")]
    SeedNotFound { attempts: usize },

    #[error("arc fit diverged: {0}")]
    FitDivergence(String),

    #[error("continuation failed at N = {target} (last good N = {last_good})")]
    ContinuationFailed { last_good: usize, target: usize },

    #[error("extrapolation needs at least {need} points, got {got}")]
    InsufficientPoints { got: usize, need: usize },
}
