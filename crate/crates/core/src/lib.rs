//! Pseudospectral simulation of the third-order Lugiato–Lefever equation
//!
//! ```text
//! ∂ₜu = ∂ₓ³u + i∂ₓ²u − u − iθu + i|u|²u + f,   x ∈ 𝕋 = ℝ/2πℤ
//! ```
//!
//! with tools for the Talbot effect: exact revivals at rational multiples of
//! π, the Duhamel part after gauge removal, fractal dimension of graphs and
//! dispersive norms.
//!
//! Fourier coefficients are unnormalized, `û(k) = ∫ e^{−ikx} u(x) dx`, and
//! synthesis carries the factor `1/2π`.

pub mod analysis;
pub mod decompose;
pub mod error;
pub mod evolve;
pub mod grid;
pub mod harness;
pub mod par;
pub mod profiles;
pub mod propagator;

pub use error::{Error, Result};
pub use evolve::{solve, solve_field, Dealias, Scheme, SolverConfig, Trajectory};
pub use grid::{from_spectral, make_grid, to_spectral, FourierGrid, Forcing, ModelParams, SpectralField};
pub use profiles::{step_profile, AnalyticProfile};
pub use propagator::{linear_evolve, revival_evolve, RationalTime, Time};
