//! Numerical core for quantum and classical dynamics on star graphs.
//!
//! The crate samples wavefunctions on a uniform grid over `[0, x_max]`
//! (a truncated half line), one copy per edge of an `n`-edge star graph.
//! On top of that it provides:
//!
//! - Gaussian wave packets with complex width, optional truncation to the
//!   half line, and their free-motion parameter flow ([`states`]).
//! - Unitary sine and cosine transforms with the exact half-line propagators
//!   they diagonalize, including the incoming/outgoing kernel splitting
//!   ([`spectral`]).
//! - The vertex scattering matrix, the graph propagator built from it, wave
//!   operators, and the stationary scattering operator ([`quantum_graph`]).
//! - Classical transport of phase-space fields over the same graph
//!   ([`classical_graph`]).
//! - Quantitative experiments comparing true quantum evolution against
//!   semiclassically transported predictions, with explicit error bounds
//!   ([`experiments`]).
//!
//! Everything numerical is generic over the scalar type through [`Real`];
//! the aliases below fix the two concrete precisions.

pub mod classical_graph;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod oracles;
pub mod quantum_graph;
pub mod real;
pub mod spectral;
pub mod states;
pub mod wave;

pub use error::{Error, Result};
pub use real::{Real, C};

/// Sign selector for the incoming/outgoing pair of wave operators and their
/// classical counterparts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// `+1` or `-1` as a scalar.
    pub fn value<T: Real>(self) -> T {
        match self {
            Sign::Plus => T::one(),
            Sign::Minus => -T::one(),
        }
    }

    /// The opposite sign.
    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }
}

/// Double-precision grid.
pub type Grid64 = grid::Grid<f64>;
/// Single-precision grid.
pub type Grid32 = grid::Grid<f32>;
/// Double-precision interior-node wavefunction.
pub type EdgeWave64 = wave::EdgeWave<f64>;
/// Double-precision full-node wavefunction.
pub type FullWave64 = wave::FullWave<f64>;
/// Double-precision graph wavefunction.
pub type GraphWave64 = wave::GraphWave<f64>;
/// Double-precision vertex matrix.
pub type SMatrix64 = quantum_graph::SMatrix<f64>;
/// Double-precision packet parameters.
pub type CoherentParams64 = states::CoherentParams<f64>;
