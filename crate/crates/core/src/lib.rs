//! Numerical laboratory for colored Jones invariants of the figure-eight
//! knot and the Borromean rings at odd roots of unity, the associated
//! potential functions, and hyperbolic cone-manifold volumes.
//!
//! The crate is organized around the pipeline
//! `specfun` -> `qseries` -> `invariant` -> `asymptotics`, with `geometry`
//! holding the closed volume formulas, `potential` the complex potential
//! functions and their critical points, and `contour` the level-set
//! machinery for the deformed integration paths.

pub mod asymptotics;
pub mod contour;
pub mod error;
pub mod geometry;
pub mod invariant;
mod poly;
pub mod potential;
pub mod qseries;
pub mod specfun;

pub use asymptotics::{
    convergence_study, equal_angle_bound_b, growth_rate, omega0_boundary, omega0_classify,
    threshold_alpha0, ConvergenceStudy, GridSpec3, GrowthRecord, RegionSample, Threshold,
};
pub use contour::{
    default_level, export_grid, field, level_path, partials, EndpointKind, ExportFormat, FieldGrid,
    GridSpec, LevelPath, Quadrant,
};
pub use error::{Error, Result};
pub use geometry::{
    is_hyperbolic, vol_cone, vol_cone_b, vol_cone_e, ConeAngles, Knot, VolumeResult,
};
pub use invariant::{
    colored_jones, colored_jones_b, colored_jones_e, partial_sum, weights_for_angles, Branch,
    InvariantValue, WeightChoice,
};
pub use potential::{
    branch_cuts, critical_points, im_phi_real, phi, phi_finite_r, stationary_residual, BranchCut,
    CriticalPointSet, PolynomialRoots, PotentialSpec,
};
pub use qseries::{
    index_partition, q_factorial, q_integer, term, term_b, term_e, term_ratio_b, term_ratio_e,
    unimodality_profile, IndexPartition, LogPolarValue, RootContext, SetLabel, SignedLogValue,
    Weights,
};
pub use specfun::{
    delta_fn, dilog, im_dilog_unit_circle, lobachevsky, qd_pochhammer, quantum_dilog,
    quantum_dilog_with, QuadConfig,
};
