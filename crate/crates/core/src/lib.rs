//! Ergodic optimization toolkit for the XY model.
//!
//! The pipeline runs: potential -> letter graph -> optimal mean -> reduced
//! weights -> subaction -> reweighted graph -> barriers -> Aubry structure,
//! with orbit-level experiments (descent, gap functions, perturbations)
//! layered on top. Everything is deterministic: given the same spec, grid,
//! and seed, every artifact is bitwise reproducible.

pub mod aubry;
pub mod error;
pub mod numfmt;
pub mod orbitlab;

pub mod minplus;

pub mod potential;

pub mod lettergraph;
pub mod mane;

pub mod spectrum;

pub mod subaction;

pub use error::{Error, Result};
pub use aubry::{
    aubry_letters, aubry_report, default_tol_zero, equivalence_classes, mather_support,
    minimizer_distance, static_check, static_subaction_defect, AubryReport, MatherSupport,
    StaticCertificate,
};
pub use lettergraph::{build_graph, reduce, LetterGrid, ReducedMatrix, WeightMatrix};
pub use orbitlab::{
    crossing_surgery, gap_phi, multi_descent, orbit_descent, tpo_experiment, DescentInit,
    GapTable, OrbitDescentTrace, SurgeryOutcome, TPOReport, DESCENT_RESIDUAL_TOL,
};
pub use mane::{
    default_window, mane_matrix, peierls_letter, sequence_barrier, sequence_mane,
    shift_distance, BarrierMatrix, EventuallyPeriodicPoint, ManeMatrix, SequenceBarrierResult,
    SequenceValue, DIVERGENCE_TOL,
};
pub use minplus::{MinPlusMatrix, UNREACHABLE};
pub use potential::{
    certify_twist, diag_profile, lipschitz_bound, perturb, BivariatePoly, LipschitzBound,
    PotentialSpec, RawSpec, TwistCertificate, UnivariatePoly,
};
pub use spectrum::{
    cycle_mean, diagonal_analysis, karp_min_mean, mean_trace, optimal_mean, spectral_analysis,
    DiagonalAnalysis, MeanTrace, MinimizerSet, OptimalMean, SpectralResult,
};
pub use subaction::{
    anchored, default_max_iters, reweight, solve_subaction, subaction_ambiguity,
    verify_calibration, CalibrationReport, ReweightedGraph, Subaction, SOLVER_TOL,
};
