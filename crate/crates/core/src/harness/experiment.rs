use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::scenario::{generate_users, trial_rng, Prepared, GENERATOR};
use crate::error::{Result, SncError};
use crate::jsnc::{exact_profit, solve_exact, solve_jsnc, solve_semi_jsnc};
use crate::solution::{Method, SncSolution};
use crate::usnc::{usnc_solution, without_incentives, User};

/// Methods compared by default; the exact oracle is opt-in.
pub const DEFAULT_METHODS: [Method; 4] = [Method::NoUil, Method::Usnc, Method::Jsnc, Method::SemiJsnc];

/// Exact expected profit of a solution: covered users plus optimal offers to
/// everyone within `d_u` of its coverage disk. Without UIL only coverage counts.
pub fn score(sol: &SncSolution, users: &[User], prepared: &Prepared) -> f64 {
    if sol.method == Method::NoUil {
        return sol.covered_count() as f64;
    }
    exact_profit(
        sol.center(),
        users,
        sol.placement.coverage_radius,
        prepared.d_u(),
        prepared.fit(),
    )
    .objective
}

/// Solves `methods` on one user set. The no-UIL baseline reuses the USNC placement.
pub fn solve_methods(users: &[User], prepared: &Prepared, methods: &[Method]) -> Vec<(Method, Result<SncSolution>)> {
    let p = prepared;
    let needs_usnc = methods.iter().any(|m| matches!(m, Method::Usnc | Method::NoUil));
    let usnc = needs_usnc.then(|| usnc_solution(users, &p.bounds, &p.model, p.d_u(), p.fit()));
    methods
        .iter()
        .map(|&m| {
            let res = match m {
                Method::Usnc => clone_result(usnc.as_ref().unwrap()),
                Method::NoUil => clone_result(usnc.as_ref().unwrap()).map(|s| without_incentives(&s)),
                Method::Jsnc => solve_jsnc(users, &p.bounds, &p.model, p.d_u(), &p.grid, p.fit(), &p.search),
                Method::SemiJsnc => solve_semi_jsnc(users, &p.bounds, &p.model, p.d_u(), &p.curve, p.fit(), &p.search),
                Method::ExactOracle => solve_exact(users, &p.bounds, &p.model, p.d_u(), p.fit(), &p.search),
            };
            (m, res)
        })
        .collect()
}

fn clone_result(r: &Result<SncSolution>) -> Result<SncSolution> {
    match r {
        Ok(s) => Ok(s.clone()),
        Err(e) => Err(SncError::InvalidParameter(e.to_string())),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodOutcome {
    pub method: Method,
    /// Exact-scored profit; `None` if the solve failed.
    pub score: Option<f64>,
    pub solver_objective: Option<f64>,
    pub approx_objective: Option<f64>,
    pub covered: Option<usize>,
    pub wall_time_s: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    /// Generator stream the users were drawn from.
    pub stream: u64,
    pub outcomes: Vec<MethodOutcome>,
}

impl TrialRecord {
    pub fn score(&self, method: Method) -> Option<f64> {
        self.outcomes.iter().find(|o| o.method == method).and_then(|o| o.score)
    }

    pub fn wall_time(&self, method: Method) -> Option<f64> {
        self.outcomes
            .iter()
            .find(|o| o.method == method)
            .and_then(|o| o.wall_time_s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: Method,
    pub mean: f64,
    /// `(profit, fraction of trials with profit <= it)`, sorted by profit.
    pub cdf: Vec<(f64, f64)>,
    pub median_wall_time_s: f64,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub scenario: String,
    pub scenario_hash: String,
    pub generator: String,
    pub master_seed: u64,
    pub user_count: usize,
    /// Users per square metre of world area.
    pub density: f64,
    pub gamma_star: f64,
    pub trials: Vec<TrialRecord>,
    pub summaries: Vec<MethodSummary>,
}

impl ExperimentReport {
    pub fn summary(&self, method: Method) -> Option<&MethodSummary> {
        self.summaries.iter().find(|s| s.method == method)
    }

    pub fn mean(&self, method: Method) -> Option<f64> {
        self.summary(method).map(|s| s.mean)
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn summarize(method: Method, trials: &[TrialRecord]) -> MethodSummary {
    let mut scores: Vec<f64> = trials.iter().filter_map(|t| t.score(method)).collect();
    let failures = trials.len() - scores.len();
    scores.sort_by(f64::total_cmp);
    let n = scores.len();
    let mean = if n == 0 {
        f64::NAN
    } else {
        scores.iter().sum::<f64>() / n as f64
    };
    let cdf = scores
        .iter()
        .enumerate()
        .map(|(i, &s)| (s, (i + 1) as f64 / n as f64))
        .collect();
    MethodSummary {
        method,
        mean,
        cdf,
        median_wall_time_s: median(trials.iter().filter_map(|t| t.wall_time(method)).collect()),
        failures,
    }
}

fn run_trial(prepared: &Prepared, users: &[User], methods: &[Method], trial: usize, stream: u64) -> TrialRecord {
    let outcomes = solve_methods(users, prepared, methods)
        .into_iter()
        .map(|(method, res)| match res {
            Ok(sol) => MethodOutcome {
                method,
                score: Some(score(&sol, users, prepared)),
                solver_objective: Some(sol.objective),
                approx_objective: sol.approx_objective,
                covered: Some(sol.covered_count()),
                wall_time_s: Some(sol.stats.wall_time_s),
                error: None,
            },
            Err(e) => {
                log::warn!("trial {trial}: {method} failed: {e}");
                MethodOutcome {
                    method,
                    score: None,
                    solver_objective: None,
                    approx_objective: None,
                    covered: None,
                    wall_time_s: None,
                    error: Some(e.to_string()),
                }
            }
        })
        .collect();
    TrialRecord {
        trial,
        stream,
        outcomes,
    }
}

/// Monte Carlo comparison with `user_count` fresh users per trial, trial `t`
/// drawing from stream `t` of `master_seed`.
pub fn run_monte_carlo(
    prepared: &Prepared,
    user_count: usize,
    trials: usize,
    methods: &[Method],
    master_seed: u64,
) -> Result<ExperimentReport> {
    if trials == 0 {
        return Err(SncError::InvalidParameter("trials must be >= 1".into()));
    }
    let world = prepared.scenario.world;
    let mut records: Vec<TrialRecord> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let stream = t as u64;
            let users = generate_users(&world, user_count, &mut trial_rng(master_seed, stream));
            run_trial(prepared, &users, methods, t, stream)
        })
        .collect();
    records.sort_by_key(|r| r.trial);
    let summaries = methods.iter().map(|&m| summarize(m, &records)).collect();
    Ok(ExperimentReport {
        scenario: prepared.scenario.name.clone(),
        scenario_hash: prepared.hash.clone(),
        generator: GENERATOR.to_string(),
        master_seed,
        user_count,
        density: user_count as f64 / world.area(),
        gamma_star: prepared.gamma_star(),
        trials: records,
        summaries,
    })
}

/// One Monte Carlo report per user count. Each count uses its own master seed
/// `master_seed + count` so that series do not share user draws.
pub fn run_density_sweep(
    prepared: &Prepared,
    user_counts: &[usize],
    trials_per_count: usize,
    methods: &[Method],
    master_seed: u64,
) -> Result<Vec<ExperimentReport>> {
    user_counts
        .iter()
        .map(|&n| {
            run_monte_carlo(
                prepared,
                n,
                trials_per_count,
                methods,
                master_seed.wrapping_add(n as u64),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::scenario::Scenario;

    fn quick() -> Prepared {
        let mut s = Scenario::paper_default();
        s.pwl.samples = 400;
        s.search.random_starts = 4;
        s.prepare().unwrap()
    }

    #[test]
    fn single_trial_is_replayable() {
        let p = quick();
        let a = run_monte_carlo(&p, 8, 1, &DEFAULT_METHODS, 11).unwrap();
        let b = run_monte_carlo(&p, 8, 1, &DEFAULT_METHODS, 11).unwrap();
        let strip = |r: &ExperimentReport| {
            r.trials
                .iter()
                .map(|t| t.outcomes.iter().map(|o| o.score).collect::<Vec<_>>())
                .collect::<Vec<_>>()
        };
        assert_eq!(strip(&a), strip(&b));
        assert_eq!(a.scenario_hash, b.scenario_hash);
        for s in &a.summaries {
            assert!(s.cdf.windows(2).all(|w| w[0].0 <= w[1].0 && w[0].1 <= w[1].1));
        }
    }

    #[test]
    fn density_matches_world_area() {
        let p = quick();
        let r = run_monte_carlo(&p, 15, 1, &[Method::Usnc], 0).unwrap();
        let expected = 15.0 / (std::f64::consts::PI * 700.0 * 700.0);
        assert!((r.density - expected).abs() < 1e-15);
        assert!(run_density_sweep(&p, &[], 3, &[Method::Usnc], 0).unwrap().is_empty());
        assert!(run_monte_carlo(&p, 15, 0, &[Method::Usnc], 0).is_err());
    }
}
