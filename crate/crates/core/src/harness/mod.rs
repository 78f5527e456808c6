//! Seeded property suite and the numerical probes behind it.

pub mod cases;
mod probes;
mod suite;

pub use probes::{
    continuity_probe, cube_convergence_probe, oracle_crosscheck, ContinuityReport, ContinuityRow, CrosscheckReport,
    CrosscheckTarget, CubeConvergenceReport, CubeLevel, CubeVerdict, CONTINUITY_NORM_LEVEL, MONOTONE_WINDOW,
};
pub use suite::{
    case_seed, property_ids, rerun_case, run_suite, run_suite_with, CaseRecord, CoverageRow, Platform, PropertyReport,
    Rule, Runtime, SuiteConfig, SuiteReport, ValuationFactory, DEFAULT_TOLERANCES, SCHEMA_VERSION,
};
