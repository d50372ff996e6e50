//! Scenarios, Monte Carlo experiments and the two-group toy comparison.

pub mod experiment;
pub mod scenario;
pub mod toy;

pub use experiment::{
    run_density_sweep, run_monte_carlo, score, solve_methods, ExperimentReport, MethodOutcome, MethodSummary,
    TrialRecord, DEFAULT_METHODS,
};
pub use scenario::{
    generate_users, generate_users_seeded, trial_rng, BoundsSpec, EnvironmentSpec, Prepared, PwlConfig, Scenario,
    SearchConfig, UsersSpec, World, GENERATOR, SCHEMA_VERSION,
};
pub use toy::{run_toy_scenario, ToyLayout, ToyReport};
