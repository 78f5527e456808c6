//! Simple and grid functions on `R^n`, the weighted norm of `L^p(mu_n)`
//! with `dmu_n = |x|^2 dx`, and composition functions `xi`.

mod composition;
mod distance;
pub mod expr;
mod grid;
mod radial;
mod sequence;
mod simple;

pub use composition::{check_growth, CompositionFunction, GrowthReport, GrowthVerdict, SampleSpec};
pub use distance::{indicator_distance, Approximant, IndicatorDistance};
pub use grid::{lattice_join_meet, GridFunction};
pub use radial::{radial_membership_and_k_probe, ProbeVerdict, RadialProbeReport};
pub use sequence::{FunctionSequence, Schedule};
pub use simple::{compose, lp_norm, pullback, Piece, SimpleFunction, OVERLAP_TOL};
