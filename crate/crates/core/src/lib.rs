//! Matrix Bregman projections with Legendre-type convex families.
//!
//! The crate computes Bregman divergences and Legendre-Bregman projections
//! of Hermitian matrices, solves the projection onto a linear family with
//! seven iterative algorithms (exact and approximate projections, their
//! Kullback-Leibler forms, partition-function minimization and quantum
//! iterative scaling), and ships brute-force oracles to check them.

pub mod cli;
pub mod error;
pub mod legendre;
pub mod matcore;
pub mod oracle;
pub mod random;
pub mod solvers;

pub use error::{Error, Result};
pub use legendre::{
    bregman_divergence, dual_objective, dual_objective_gradient, dual_potential, lb_conjugate,
    lb_conjugate_scalar_lift, lb_projection, lb_projection_scalar_lift, ExtendedReal, FamilyRegistry,
    LegendreFamily, ProjectionBase,
};
pub use matcore::{HermitianMatrix, Interval};
pub use solvers::{
    adaboost_embed, exact_bregman, kl_parallel, kl_sequential, maxent, parallel_approx, partition_min, qis,
    sequential_approx, solve, Algorithm, ConstraintSystem, ConvergenceTrace, Normalization, Solution,
    SolverConfig, SolverState, Status, StoppingRule,
};
