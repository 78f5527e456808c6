//! The moment operator `K`, the family `Psi(h) = K(xi o h) + s rho`, and
//! checks that apply to any matrix-valued map on simple functions.

mod checks;
mod monte_carlo;
mod spec;

pub use checks::{
    covariance_residual, decomposition_residual, extract_xi_and_s, valuation_residual, zero_structure, Extraction,
    XiSample, ZeroReport,
};
pub use monte_carlo::{moment_monte_carlo, MonteCarloEstimate, MonteCarloSampler};
pub use spec::{moment_of_simple, psi_evaluate, BlackBoxValuation, RotationTerm, Valuation, ValuationSpec};
