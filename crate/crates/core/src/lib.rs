//! Exact moment computation on convex polytopes and the constructive family
//! of `SL(n)` covariant matrix-valued valuations
//! `Psi(h) = K(xi o h) + s rho_{pi/2}` on `L^p(R^n, |x|^2 dx)`, with tools to
//! check the valuation, covariance, continuity and zero-structure
//! properties numerically.

pub mod cli;
pub mod error;
pub mod functions;
pub mod geometry;
pub mod harness;
pub mod io;
pub mod parallel;
pub mod seed;
pub mod valuation;

pub use error::{Error, Result};
