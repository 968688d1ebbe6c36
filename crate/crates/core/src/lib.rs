//! Free spin-½ particle in 1+1 dimensions under two readings of the Dirac
//! equation: the conventional one (retarded wavefunction, probability
//! density, collapse at measurement) and the time-symmetric one (product of a
//! retarded positive-energy state and an advanced conjugate state, complex
//! amplitude density, no collapse).
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the aliases at
//! the crate root fix the scalar to `f64`, which every tolerance in the test
//! suites assumes.

// `!(x > 0)` comparisons intentionally reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod ci;
pub mod config;
pub mod error;
pub mod field;
pub mod grid;
pub mod io;
pub mod mat2;
pub mod oracle;
pub mod params;
pub mod rsi;
pub mod scalar;
pub mod scenario;
pub mod spectral;

pub use error::{Error, Result};
pub use field::{gaussian_initial_state, inner_product, norm_squared, Spinor};
pub use params::MassTerm;
pub use scalar::Real;
pub use scenario::{FinalState, ProjectionNorm, SeriesKind};
pub use spectral::EnergySign;

pub type Grid1D = grid::Grid1D<f64>;
pub type SpinorField = field::SpinorField<f64>;
pub type PhysicalParams = params::PhysicalParams<f64>;
pub type Scenario = scenario::Scenario<f64>;
pub type TimeSeries = scenario::TimeSeries<f64>;
pub type SpectralEngine = spectral::SpectralEngine<f64>;
pub type CiTransitionResult = ci::CiTransitionResult<f64>;
pub type RsiTransitionResult = rsi::RsiTransitionResult<f64>;
pub type TrajectoryReport = analysis::TrajectoryReport<f64>;

pub type Grid1D32 = grid::Grid1D<f32>;
pub type SpinorField32 = field::SpinorField<f32>;
pub type Scenario32 = scenario::Scenario<f32>;
