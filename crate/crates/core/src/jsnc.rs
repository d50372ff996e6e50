//! Joint and semi-joint configuration.
//!
//! For a fixed drone centre the profit splits into independent per-user terms
//! that depend only on the user's distance, so each solver reduces to a 2-D
//! search over the centre. The per-user term comes from the exact optimal
//! incentive, the triangulated profit surface, or the fitted profit curve.

use std::cmp::Ordering;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::CoverageModel;
use crate::error::{Result, SncError};
use crate::geometry::{min_enclosing_circle, Bounds, Point};
use crate::pwl::{Pwl1D, PwlGrid};
use crate::search::{compass_polish, nelder_mead_max, NelderMeadOptions};
use crate::solution::{Method, Placement, RegionFlags, SncSolution, SolverStats};
use crate::uil::{optimal_incentive_unchecked, IncentiveOffer, PersuasionFit};
use crate::usnc::{coverage_candidates, points, User, COVER_TOL};

/// Per-user profit model used when scoring a centre.
#[derive(Debug, Clone, Copy)]
pub enum Objective<'a> {
    Exact,
    Triangle(&'a PwlGrid),
    Univariate(&'a Pwl1D),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectiveKind {
    Exact,
    Triangle,
    Univariate,
}

impl Objective<'_> {
    pub fn kind(&self) -> ObjectiveKind {
        match self {
            Objective::Exact => ObjectiveKind::Exact,
            Objective::Triangle(_) => ObjectiveKind::Triangle,
            Objective::Univariate(_) => ObjectiveKind::Univariate,
        }
    }

    /// Profit from a user who must move `d ∈ (0, d_u]`.
    fn band_value(&self, d: f64, fit: &PersuasionFit) -> f64 {
        match self {
            Objective::Exact => optimal_incentive_unchecked(d, fit).1,
            Objective::Triangle(grid) => grid.best_feasible(d).map_or(0.0, |o| o.value),
            Objective::Univariate(curve) => curve.value(d),
        }
    }
}

/// Shared inputs of a centre search.
#[derive(Debug, Clone, Copy)]
struct Problem<'a> {
    pts: &'a [Point],
    gamma_star: f64,
    d_u: f64,
    fit: &'a PersuasionFit,
    objective: Objective<'a>,
}

impl Problem<'_> {
    fn user_value(&self, r: f64) -> f64 {
        if r <= self.gamma_star + COVER_TOL {
            return 1.0;
        }
        let d = r - self.gamma_star;
        if d <= self.d_u {
            self.objective.band_value(d, self.fit)
        } else {
            0.0
        }
    }

    fn value(&self, c: Point) -> f64 {
        self.pts.iter().map(|p| self.user_value(p.dist(c))).sum()
    }
}

/// Surrogate or exact objective at `center`.
pub fn objective_value(
    center: Point,
    users: &[User],
    gamma_star: f64,
    d_u: f64,
    fit: &PersuasionFit,
    objective: Objective<'_>,
) -> f64 {
    let pts = points(users);
    Problem {
        pts: &pts,
        gamma_star,
        d_u,
        fit,
        objective,
    }
    .value(center)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Region {
    Covered,
    Band,
    Outside,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserOutcome {
    pub user_id: usize,
    pub r: f64,
    pub region: Region,
    /// Distance to the coverage boundary; zero when covered.
    pub d: f64,
    pub tau: f64,
    pub profit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfitBreakdown {
    pub objective: f64,
    pub covered: usize,
    pub users: Vec<UserOutcome>,
}

/// Expected profit at `center` with the optimal incentive for every band user.
pub fn exact_profit(center: Point, users: &[User], radius: f64, d_u: f64, fit: &PersuasionFit) -> ProfitBreakdown {
    let mut objective = 0.0;
    let mut covered = 0;
    let users = users
        .iter()
        .map(|u| {
            let r = u.point().dist(center);
            let (region, d, tau, profit) = if r <= radius + COVER_TOL {
                covered += 1;
                (Region::Covered, 0.0, 0.0, 1.0)
            } else if r - radius <= d_u {
                let d = r - radius;
                let (tau, p) = optimal_incentive_unchecked(d, fit);
                (Region::Band, d, tau, p)
            } else {
                (Region::Outside, r - radius, 0.0, 0.0)
            };
            objective += profit;
            UserOutcome {
                user_id: u.id,
                r,
                region,
                d,
                tau,
                profit,
            }
        })
        .collect();
    ProfitBreakdown {
        objective,
        covered,
        users,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    pub random_starts: usize,
    pub seed: u64,
    /// k-means centroids for every k up to this are used as starts.
    pub max_clusters: usize,
    pub nelder_mead: NelderMeadOptions,
    pub polish_step: f64,
    pub polish_min_step: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            random_starts: 32,
            seed: 0,
            max_clusters: 4,
            nelder_mead: NelderMeadOptions::default(),
            polish_step: 1.0,
            polish_min_step: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CenterSearch {
    pub center: Point,
    pub value: f64,
    pub covered: usize,
    pub stats: SolverStats,
}

/// Lloyd iterations from a farthest-point initialisation; deterministic.
fn kmeans(pts: &[Point], k: usize) -> Vec<Point> {
    let n = pts.len() as f64;
    let mean = Point::new(
        pts.iter().map(|p| p.x).sum::<f64>() / n,
        pts.iter().map(|p| p.y).sum::<f64>() / n,
    );
    let mut centers = vec![mean];
    while centers.len() < k {
        let far = pts
            .iter()
            .max_by(|a, b| {
                let da = centers.iter().map(|c| a.dist2(*c)).fold(f64::INFINITY, f64::min);
                let db = centers.iter().map(|c| b.dist2(*c)).fold(f64::INFINITY, f64::min);
                da.total_cmp(&db)
            })
            .copied()
            .unwrap();
        centers.push(far);
    }
    for _ in 0..50 {
        let mut sums = vec![(0.0, 0.0, 0usize); k];
        for p in pts {
            let (idx, _) = centers
                .iter()
                .enumerate()
                .map(|(i, c)| (i, p.dist2(*c)))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            sums[idx].0 += p.x;
            sums[idx].1 += p.y;
            sums[idx].2 += 1;
        }
        let next: Vec<Point> = sums
            .iter()
            .zip(&centers)
            .map(|(&(sx, sy, m), &c)| {
                if m > 0 {
                    Point::new(sx / m as f64, sy / m as f64)
                } else {
                    c
                }
            })
            .collect();
        if next == centers {
            break;
        }
        centers = next;
    }
    centers
}

fn starting_points(pts: &[Point], bounds: &Bounds, gamma_star: f64, opts: &SearchOptions) -> Vec<Point> {
    let mut seeds = coverage_candidates(pts, bounds, gamma_star);
    for k in 1..=opts.max_clusters.min(pts.len()) {
        seeds.extend(kmeans(pts, k).into_iter().map(|c| bounds.clamp(c)));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.random_starts {
        let x = if bounds.x_u > bounds.x_l {
            rng.random_range(bounds.x_l..=bounds.x_u)
        } else {
            bounds.x_l
        };
        let y = if bounds.y_u > bounds.y_l {
            rng.random_range(bounds.y_l..=bounds.y_u)
        } else {
            bounds.y_l
        };
        seeds.push(Point::new(x, y));
    }
    seeds.sort_by(|a, b| a.lex_cmp(*b));
    seeds.dedup_by(|a, b| a.dist(*b) < 1e-9);
    seeds
}

struct Candidate {
    center: Point,
    value: f64,
    covered: usize,
    enclosing: f64,
    iterations: usize,
    evaluations: usize,
    converged: bool,
}

/// Total order: higher value, more covered users, tighter enclosing circle, lexicographic centre.
fn better(a: &Candidate, b: &Candidate) -> Ordering {
    b.value
        .total_cmp(&a.value)
        .then(b.covered.cmp(&a.covered))
        .then(a.enclosing.total_cmp(&b.enclosing))
        .then(a.center.lex_cmp(b.center))
}

fn optimize(problem: &Problem<'_>, bounds: &Bounds, opts: &SearchOptions) -> CenterSearch {
    let start = Instant::now();
    let seeds = starting_points(problem.pts, bounds, problem.gamma_star, opts);
    let f = |x: &[f64]| problem.value(Point::new(x[0], x[1]));
    let project = |x: &mut [f64]| {
        x[0] = x[0].clamp(bounds.x_l, bounds.x_u);
        x[1] = x[1].clamp(bounds.y_l, bounds.y_u);
    };
    let runs: Vec<Candidate> = seeds
        .par_iter()
        .map(|s| {
            let nm = nelder_mead_max(f, project, &[s.x, s.y], &opts.nelder_mead);
            let (x, value, polish_evals) =
                compass_polish(f, project, &nm.x, nm.value, opts.polish_step, opts.polish_min_step);
            let center = Point::new(x[0], x[1]);
            let inside: Vec<Point> = problem
                .pts
                .iter()
                .filter(|p| p.dist(center) <= problem.gamma_star + COVER_TOL)
                .copied()
                .collect();
            Candidate {
                center,
                value,
                covered: inside.len(),
                enclosing: min_enclosing_circle(&inside).map_or(0.0, |c| c.radius),
                iterations: nm.iterations,
                evaluations: nm.evaluations + polish_evals,
                converged: nm.converged,
            }
        })
        .collect();
    let iterations = runs.iter().map(|c| c.iterations).sum();
    let evaluations = runs.iter().map(|c| c.evaluations).sum();
    let best = runs.into_iter().min_by(better).expect("at least one start");
    CenterSearch {
        center: best.center,
        value: best.value,
        covered: best.covered,
        stats: SolverStats {
            candidates: seeds.len(),
            iterations,
            evaluations,
            wall_time_s: start.elapsed().as_secs_f64(),
            converged: best.converged,
        },
    }
}

/// Multistart search for the centre maximizing `objective`.
pub fn optimize_center(
    users: &[User],
    bounds: &Bounds,
    gamma_star: f64,
    d_u: f64,
    fit: &PersuasionFit,
    objective: Objective<'_>,
    opts: &SearchOptions,
) -> Result<CenterSearch> {
    if users.is_empty() {
        return Err(SncError::InvalidParameter("no users to serve".into()));
    }
    bounds.validate()?;
    let pts = points(users);
    let problem = Problem {
        pts: &pts,
        gamma_star,
        d_u,
        fit,
        objective,
    };
    let out = optimize(&problem, bounds, opts);
    if !out.stats.converged {
        log::warn!("centre search hit the iteration cap; returning best point found");
    }
    Ok(out)
}

fn full_radius_placement(center: Point, model: &CoverageModel, bounds: &Bounds) -> Result<Placement> {
    let radius = model.gamma_star();
    let (h_d, alpha) = model.altitude_for(radius, bounds.h_l, bounds.h_u)?;
    Ok(Placement {
        x_d: center.x,
        y_d: center.y,
        h_d,
        coverage_radius: radius,
        alpha,
    })
}

fn region_flags(center: Point, users: &[User], radius: f64, d_u: f64) -> (RegionFlags, Vec<f64>) {
    let r: Vec<f64> = users.iter().map(|u| u.point().dist(center)).collect();
    let u: Vec<bool> = r.iter().map(|&ri| ri <= radius + COVER_TOL).collect();
    let w = r.iter().zip(&u).map(|(&ri, &ui)| !ui && ri - radius <= d_u).collect();
    (RegionFlags { u, w }, r)
}

/// Joint placement and pricing on the triangulated profit surface.
///
/// Band users receive the surface's best `(τ, d)` with `d` at least their
/// distance to the disk; moves shorter than the first grid distance are
/// rounded up to it.
pub fn solve_jsnc(
    users: &[User],
    bounds: &Bounds,
    model: &CoverageModel,
    d_u: f64,
    grid: &PwlGrid,
    fit: &PersuasionFit,
    opts: &SearchOptions,
) -> Result<SncSolution> {
    if grid.d_range().1 + 1e-9 < d_u {
        return Err(SncError::InvalidParameter(format!(
            "grid d vertices end at {} but d_u = {d_u}",
            grid.d_range().1
        )));
    }
    let gamma_star = model.gamma_star();
    let search = optimize_center(users, bounds, gamma_star, d_u, fit, Objective::Triangle(grid), opts)?;
    let placement = full_radius_placement(search.center, model, bounds)?;
    let (flags, r) = region_flags(search.center, users, gamma_star, d_u);
    let mut offers = Vec::new();
    let mut objective = flags.covered_count() as f64;
    for (i, user) in users.iter().enumerate() {
        if !flags.w[i] {
            continue;
        }
        if let Some(opt) = grid.best_feasible(r[i] - gamma_star) {
            let dir = [search.center.x - user.x, search.center.y - user.y];
            let offer = IncentiveOffer::new(user.id, opt.tau, opt.d, dir, fit)?;
            objective += offer.expected_profit;
            offers.push(offer);
        }
    }
    Ok(SncSolution {
        method: Method::Jsnc,
        placement,
        flags,
        offers,
        objective,
        approx_objective: Some(search.value),
        stats: search.stats,
    })
}

fn closed_form_offers(
    center: Point,
    users: &[User],
    flags: &RegionFlags,
    r: &[f64],
    gamma_star: f64,
    fit: &PersuasionFit,
) -> Result<(Vec<IncentiveOffer>, f64)> {
    let mut offers = Vec::new();
    let mut objective = flags.covered_count() as f64;
    for (i, user) in users.iter().enumerate() {
        if flags.w[i] {
            let dir = [center.x - user.x, center.y - user.y];
            let offer = IncentiveOffer::optimal(user.id, r[i] - gamma_star, dir, fit)?;
            objective += offer.expected_profit;
            offers.push(offer);
        }
    }
    Ok((offers, objective))
}

/// Placement on the fitted profit-of-distance curve, then closed-form incentives.
pub fn solve_semi_jsnc(
    users: &[User],
    bounds: &Bounds,
    model: &CoverageModel,
    d_u: f64,
    curve: &Pwl1D,
    fit: &PersuasionFit,
    opts: &SearchOptions,
) -> Result<SncSolution> {
    let (lo, hi) = curve.domain();
    if lo > 0.0 || hi + 1e-9 < d_u {
        return Err(SncError::InvalidParameter(format!(
            "profit curve spans [{lo}, {hi}] but must cover [0, {d_u}]"
        )));
    }
    let gamma_star = model.gamma_star();
    let search = optimize_center(users, bounds, gamma_star, d_u, fit, Objective::Univariate(curve), opts)?;
    let placement = full_radius_placement(search.center, model, bounds)?;
    let (flags, r) = region_flags(search.center, users, gamma_star, d_u);
    let (offers, objective) = closed_form_offers(search.center, users, &flags, &r, gamma_star, fit)?;
    Ok(SncSolution {
        method: Method::SemiJsnc,
        placement,
        flags,
        offers,
        objective,
        approx_objective: Some(search.value),
        stats: search.stats,
    })
}

/// Centre search on the exact objective.
pub fn solve_exact(
    users: &[User],
    bounds: &Bounds,
    model: &CoverageModel,
    d_u: f64,
    fit: &PersuasionFit,
    opts: &SearchOptions,
) -> Result<SncSolution> {
    let gamma_star = model.gamma_star();
    let search = optimize_center(users, bounds, gamma_star, d_u, fit, Objective::Exact, opts)?;
    let placement = full_radius_placement(search.center, model, bounds)?;
    let (flags, r) = region_flags(search.center, users, gamma_star, d_u);
    let (offers, objective) = closed_form_offers(search.center, users, &flags, &r, gamma_star, fit)?;
    Ok(SncSolution {
        method: Method::ExactOracle,
        placement,
        flags,
        offers,
        objective,
        approx_objective: Some(search.value),
        stats: search.stats,
    })
}

/// Exhaustive centre scan on a `grid_step` lattice over `bounds`.
pub fn brute_force_center(
    users: &[User],
    bounds: &Bounds,
    gamma_star: f64,
    d_u: f64,
    fit: &PersuasionFit,
    grid_step: f64,
    objective: Objective<'_>,
) -> (Point, f64) {
    assert!(grid_step > 0.0, "grid_step must be positive");
    let pts = points(users);
    let problem = Problem {
        pts: &pts,
        gamma_star,
        d_u,
        fit,
        objective,
    };
    let nx = ((bounds.x_u - bounds.x_l) / grid_step).floor() as usize;
    let ny = ((bounds.y_u - bounds.y_l) / grid_step).floor() as usize;
    (0..=nx)
        .into_par_iter()
        .map(|ix| {
            let x = bounds.x_l + ix as f64 * grid_step;
            let mut best = (Point::new(x, bounds.y_l), f64::NEG_INFINITY);
            for iy in 0..=ny {
                let c = Point::new(x, bounds.y_l + iy as f64 * grid_step);
                let v = problem.value(c);
                if v > best.1 {
                    best = (c, v);
                }
            }
            best
        })
        .reduce(
            || (Point::new(bounds.x_l, bounds.y_l), f64::NEG_INFINITY),
            |a, b| match a.1.total_cmp(&b.1) {
                Ordering::Greater => a,
                Ordering::Less => b,
                Ordering::Equal => {
                    if a.0.lex_cmp(b.0) == Ordering::Greater {
                        b
                    } else {
                        a
                    }
                }
            },
        )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{ChannelConfig, Environment};
    use crate::pwl::{build_grid, fit_profit_curve};
    use approx::assert_abs_diff_eq;

    fn model(radius: f64) -> CoverageModel {
        CoverageModel::with_coverage_radius(
            Environment::dense_urban(),
            ChannelConfig::new(2.5e9, 90.0).unwrap(),
            radius,
        )
        .unwrap()
    }

    fn grid() -> PwlGrid {
        build_grid(
            &[0.05, 0.1, 0.2, 0.9],
            &[5.0, 10.0, 20.0, 40.0, 200.0],
            &PersuasionFit::default(),
        )
        .unwrap()
    }

    #[test]
    fn everyone_inside() {
        let users: Vec<User> = (0..6).map(|i| User::new(i, 10.0 * i as f64, 5.0)).collect();
        let b = exact_profit(Point::new(25.0, 5.0), &users, 200.0, 200.0, &PersuasionFit::default());
        assert_eq!(b.objective, 6.0);
        let fit = PersuasionFit::default();
        let sol = solve_jsnc(
            &users,
            &Bounds::square(700.0),
            &model(200.0),
            200.0,
            &grid(),
            &fit,
            &SearchOptions::default(),
        )
        .unwrap();
        assert_eq!(sol.objective, 6.0);
        assert!(sol.offers.is_empty());
    }

    #[test]
    fn single_band_user() {
        let users = [User::new(0, 210.0, 0.0)];
        let b = exact_profit(Point::new(0.0, 0.0), &users, 200.0, 200.0, &PersuasionFit::default());
        assert_abs_diff_eq!(b.objective, 0.65, epsilon = 0.01);
        assert_eq!(b.users[0].region, Region::Band);
    }

    #[test]
    fn nobody_reachable() {
        let users = [User::new(0, 5000.0, 0.0), User::new(1, -5000.0, 0.0)];
        let fit = PersuasionFit::default();
        let curve = fit_profit_curve(&fit, 3, 200.0, 500).unwrap();
        let sol = solve_semi_jsnc(
            &users,
            &Bounds::square(700.0),
            &model(200.0),
            200.0,
            &curve,
            &fit,
            &SearchOptions::default(),
        )
        .unwrap();
        assert_eq!(sol.objective, 0.0);
        assert!(sol.offers.is_empty());
    }

    #[test]
    fn symmetric_pair_centres_on_bisector() {
        // The lens covering both users is under a metre wide around x = 0.
        let users = [User::new(0, -199.6, 40.0), User::new(1, 199.6, 40.0)];
        let fit = PersuasionFit::default();
        let b = Bounds::square(700.0);
        let (c, v) = brute_force_center(&users, &b, 200.0, 200.0, &fit, 1.0, Objective::Exact);
        assert!(c.x.abs() <= 1.0 + 1e-9, "{c:?}");
        assert_eq!(v, 2.0);
        let sol = solve_exact(&users, &b, &model(200.0), 200.0, &fit, &SearchOptions::default()).unwrap();
        assert!(sol.objective >= v - 1e-6);
    }

    #[test]
    fn triangle_offers_move_users_inside() {
        let users = [
            User::new(0, 0.0, 0.0),
            User::new(1, 260.0, 0.0),
            User::new(2, 0.0, -330.0),
        ];
        let fit = PersuasionFit::default();
        let m = model(200.0);
        let sol = solve_jsnc(
            &users,
            &Bounds::square(700.0),
            &m,
            200.0,
            &grid(),
            &fit,
            &SearchOptions::default(),
        )
        .unwrap();
        let c = sol.center();
        for o in &sol.offers {
            let u = users.iter().find(|u| u.id == o.user_id).unwrap();
            let moved = Point::new(u.x + o.displacement[0], u.y + o.displacement[1]);
            assert!(moved.dist(c) <= m.gamma_star() + 1e-6);
            let b = fit.beta(o.tau).unwrap();
            assert_abs_diff_eq!(o.expected_profit, (1.0 - o.tau) * (-b * o.d).exp(), epsilon = 1e-12);
        }
        for i in 0..users.len() {
            assert!(!(sol.flags.u[i] && sol.flags.w[i]));
        }
    }

    #[test]
    fn kmeans_splits_clusters() {
        let pts = [
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(100.0, 0.0),
            Point::new(101.0, 0.0),
        ];
        let mut c = kmeans(&pts, 2);
        c.sort_by(|a, b| a.lex_cmp(*b));
        assert_abs_diff_eq!(c[0].x, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(c[1].x, 100.5, epsilon = 1e-12);
    }
}
