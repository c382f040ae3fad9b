//! Desk-scale laboratory for GL(3)×GL(2) shifted convolution sums.
//!
//! The crate is organised around exact identities that can be checked to
//! floating-point accuracy at small parameter sizes:
//!
//! * [`arith`] — integer and modular arithmetic primitives,
//! * [`charsum`] — complete exponential/character sums (Kloosterman and
//!   Ramanujan sums, twisted correlation sums and their closed-form
//!   reductions),
//! * [`coeffs`] — Hecke eigenvalue tables for the weight-12 cusp form and its
//!   symmetric-square lift,
//! * [`bump`], [`quad`], [`bessel`], [`voronoi`] — smooth cutoffs, adaptive
//!   oscillatory quadrature and GL(2) Voronoi summation numerics,
//! * [`delta`] — a reformulated delta method and the hyperbola splitting of
//!   a fixed-shift sum; [`split`] — the twisted two-range split of smooth
//!   shift counts with its Poisson-dual evaluator,
//! * [`harness`] — experiment configuration, sweeps, CSV output and exponent
//!   fits; [`verify`] — self-contained identity checks used by the CLI and
//!   the acceptance suite.
//!
//! Every reduced or transformed quantity ships next to a brute-force route,
//! and the test suite insists the two agree.

pub mod arith;
pub mod bessel;
pub mod bump;
pub mod charsum;
pub mod coeffs;
pub mod delta;
pub mod harness;
pub mod numeric;
pub mod quad;
pub mod split;
pub mod verify;
pub mod voronoi;

use serde::{Deserialize, Serialize};

/// Sign parameter (η or ± in the various sums).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn to_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    /// `±x`.
    pub fn apply(self, x: i64) -> i64 {
        self.to_i64() * x
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0} is not invertible mod {1}")]
    NotInvertible(i64, u64),
    #[error("imaginary residue {residue:.3e} exceeds {limit:.3e} in a sum that must be real")]
    NumericalInconsistency { residue: f64, limit: f64 },
    #[error("modulus {0} is not coprime to {1}")]
    NotCoprime(u64, u64),
    #[error("index {index} outside table bound {bound}")]
    OutOfRange { index: u64, bound: u64 },
    #[error("source table covers {have}, need {need}")]
    InsufficientSourceTable { have: u64, need: u64 },
    #[error("coefficient table too small: need {need}, have {have}")]
    TableTooSmall { need: u64, have: u64 },
    #[error("window fails to be 1 where the identity needs it: {0}")]
    WindowMismatch(String),
    #[error("empty shift set")]
    EmptyShiftSet,
    #[error("shift windows admit no lattice points")]
    EmptySupport,
    #[error("quadrature error estimate {estimate:.3e} exceeds budget {budget:.3e}")]
    QuadratureFailure { estimate: f64, budget: f64 },
    #[error("exponent fit needs >= 4 records with nonzero magnitude")]
    DegenerateFit,
    #[error("twist base must be positive")]
    NonpositiveBase,
    #[error("arithmetic overflow in exact integer series")]
    Overflow,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
