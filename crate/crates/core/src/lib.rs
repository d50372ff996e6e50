//! Drone base-station placement with user-in-the-loop incentives.
//!
//! The drone serves a ground disk whose largest radius follows from the
//! air-to-ground channel ([`channel`]). Users outside the disk can be offered
//! a discount to walk in ([`uil`]). Three configurations are provided:
//! coverage first and prices after ([`usnc`]), joint placement and pricing on
//! a triangulated profit surface, and placement on a fitted profit-of-distance
//! curve with closed-form prices ([`jsnc`], [`pwl`]). [`regional`] treats a
//! uniform user density analytically and [`harness`] runs experiments.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod jsnc;
pub mod pwl;
pub mod regional;
pub mod search;
pub mod solution;
pub mod uil;
pub mod usnc;

pub use channel::{
    find_alpha_star, gamma_of_alpha, los_probability, path_loss, AlphaStarResult, ChannelConfig, CoverageModel,
    Environment,
};
pub use error::{Result, SncError};
pub use geometry::{Bounds, Point};
pub use jsnc::{
    brute_force_center, exact_profit, solve_exact, solve_jsnc, solve_semi_jsnc, Objective, ObjectiveKind, SearchOptions,
};
pub use pwl::{build_grid, eval_pwl1d, fit_profit_curve, fit_pwl1d, Pwl1D, PwlGrid};
pub use regional::{optimal_regional_incentive, p_cov_core, p_cov_uil, regional_profit, tau_infinity, RegionalModel};
pub use solution::{Method, Placement, RegionFlags, SncSolution, SolverStats};
pub use uil::{beta, move_probability, optimal_incentive, unit_profit, IncentiveOffer, PersuasionFit};
pub use usnc::{attach_incentives, brute_force_usnc, solve_usnc, usnc_solution, CoverageAssignment, User};
