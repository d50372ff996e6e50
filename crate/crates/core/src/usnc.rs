//! Uncoordinated configuration: place the drone for maximum coverage, then
//! price incentives for the users left outside.

use std::cmp::Ordering;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::CoverageModel;
use crate::error::{Result, SncError};
use crate::geometry::{circle_box_intersections, equal_circle_intersections, min_enclosing_circle, Bounds, Point};
use crate::solution::{Method, Placement, RegionFlags, SncSolution, SolverStats};
use crate::uil::{IncentiveOffer, PersuasionFit};

/// Floor on the coverage radius so that the altitude stays positive.
pub const R_MIN: f64 = 1.0;

/// Slack on the coverage test `r <= R`.
pub const COVER_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct User {
    pub id: usize,
    pub x: f64,
    pub y: f64,
}

impl User {
    pub fn new(id: usize, x: f64, y: f64) -> Self {
        Self { id, x, y }
    }

    pub fn point(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

pub fn points(users: &[User]) -> Vec<Point> {
    users.iter().map(User::point).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageAssignment {
    pub covered: Vec<bool>,
    pub distances: Vec<f64>,
}

impl CoverageAssignment {
    pub fn new(center: Point, users: &[User], radius: f64) -> Self {
        let distances: Vec<f64> = users.iter().map(|u| u.point().dist(center)).collect();
        let covered = distances.iter().map(|&r| r <= radius + COVER_TOL).collect();
        Self { covered, distances }
    }

    pub fn count(&self) -> usize {
        self.covered.iter().filter(|&&c| c).count()
    }
}

/// Candidate centres for a max-coverage disk of radius `radius` within `bounds`:
/// user points, pairwise circle intersections, circle/box crossings and box corners.
pub fn coverage_candidates(pts: &[Point], bounds: &Bounds, radius: f64) -> Vec<Point> {
    let mut out: Vec<Point> = pts.iter().filter(|p| bounds.contains(**p)).copied().collect();
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            out.extend(
                equal_circle_intersections(pts[i], pts[j], radius)
                    .into_iter()
                    .filter(|p| bounds.contains_tol(*p, 1e-9))
                    .map(|p| bounds.clamp(p)),
            );
        }
        out.extend(circle_box_intersections(pts[i], radius, bounds));
    }
    out.extend(bounds.corners());
    out
}

fn count_within(center: Point, pts: &[Point], radius: f64) -> usize {
    pts.iter().filter(|p| p.dist(center) <= radius + COVER_TOL).count()
}

/// Best disk centre found by exact enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxCoverage {
    pub center: Point,
    pub count: usize,
    /// Radius of the smallest circle through the covered users.
    pub enclosing_radius: f64,
    pub candidates: usize,
}

/// Centre maximizing the number of users within `radius`, ties broken by the
/// smaller enclosing circle of the covered set and then by lexicographic position.
pub fn max_coverage_center(pts: &[Point], bounds: &Bounds, radius: f64) -> Result<MaxCoverage> {
    let cands = coverage_candidates(pts, bounds, radius);
    if cands.is_empty() {
        return Err(SncError::InfeasibleBounds);
    }
    let counts: Vec<usize> = cands.par_iter().map(|&c| count_within(c, pts, radius)).collect();
    let best_count = *counts.iter().max().unwrap();
    let enclosing = |c: Point| -> f64 {
        let covered: Vec<Point> = pts
            .iter()
            .filter(|p| p.dist(c) <= radius + COVER_TOL)
            .copied()
            .collect();
        min_enclosing_circle(&covered).map_or(0.0, |m| m.radius)
    };
    let (center, enclosing_radius) = cands
        .par_iter()
        .zip(&counts)
        .filter(|(_, &n)| n == best_count)
        .map(|(&c, _)| (c, enclosing(c)))
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.lex_cmp(b.0)))
        .unwrap();
    Ok(MaxCoverage {
        center,
        count: best_count,
        enclosing_radius,
        candidates: cands.len(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct UsncResult {
    pub placement: Placement,
    pub assignment: CoverageAssignment,
    pub stats: SolverStats,
}

/// Maximum-coverage placement with radius Γ*, shrunk to the covered users.
pub fn solve_usnc(users: &[User], bounds: &Bounds, model: &CoverageModel) -> Result<UsncResult> {
    if users.is_empty() {
        return Err(SncError::InvalidParameter("no users to cover".into()));
    }
    bounds.validate()?;
    let start = Instant::now();
    let gamma_star = model.gamma_star();
    let pts = points(users);
    let best = max_coverage_center(&pts, bounds, gamma_star)?;

    let covered: Vec<Point> = pts
        .iter()
        .filter(|p| p.dist(best.center) <= gamma_star + COVER_TOL)
        .copied()
        .collect();
    let mut center = best.center;
    if let Some(mec) = min_enclosing_circle(&covered) {
        if mec.radius <= gamma_star + COVER_TOL && bounds.contains(mec.center) {
            center = mec.center;
        }
    }
    let reach = covered.iter().map(|p| p.dist(center)).fold(0.0, f64::max);
    let radius = reach.min(gamma_star).max(R_MIN.min(gamma_star));
    let (h_d, alpha) = model.altitude_for(radius, bounds.h_l, bounds.h_u)?;
    let assignment = CoverageAssignment::new(center, users, radius);
    Ok(UsncResult {
        placement: Placement {
            x_d: center.x,
            y_d: center.y,
            h_d,
            coverage_radius: radius,
            alpha,
        },
        assignment,
        stats: SolverStats {
            candidates: best.candidates,
            iterations: 1,
            evaluations: best.candidates,
            wall_time_s: start.elapsed().as_secs_f64(),
            converged: true,
        },
    })
}

/// Prices the optimal incentive for every uncovered user within `d_u` of the disk.
pub fn attach_incentives(
    placement: &Placement,
    assignment: &CoverageAssignment,
    users: &[User],
    d_u: f64,
    fit: &PersuasionFit,
) -> Result<SncSolution> {
    let center = Point::new(placement.x_d, placement.y_d);
    let n = users.len();
    let mut flags = RegionFlags {
        u: assignment.covered.clone(),
        w: vec![false; n],
    };
    let mut offers = Vec::new();
    let mut objective = assignment.count() as f64;
    for (i, user) in users.iter().enumerate() {
        if assignment.covered[i] {
            continue;
        }
        let d = assignment.distances[i] - placement.coverage_radius;
        if d > 0.0 && d <= d_u {
            let dir = [center.x - user.x, center.y - user.y];
            let offer = IncentiveOffer::optimal(user.id, d, dir, fit)?;
            objective += offer.expected_profit;
            offers.push(offer);
            flags.w[i] = true;
        }
    }
    Ok(SncSolution {
        method: Method::Usnc,
        placement: *placement,
        flags,
        offers,
        objective,
        approx_objective: None,
        stats: SolverStats::default(),
    })
}

/// USNC end to end: placement, then incentives.
pub fn usnc_solution(
    users: &[User],
    bounds: &Bounds,
    model: &CoverageModel,
    d_u: f64,
    fit: &PersuasionFit,
) -> Result<SncSolution> {
    let res = solve_usnc(users, bounds, model)?;
    let mut sol = attach_incentives(&res.placement, &res.assignment, users, d_u, fit)?;
    sol.stats = res.stats;
    Ok(sol)
}

/// The same placement with every offer withdrawn.
pub fn without_incentives(sol: &SncSolution) -> SncSolution {
    let mut out = sol.clone();
    out.method = Method::NoUil;
    out.offers.clear();
    out.flags.w.iter_mut().for_each(|w| *w = false);
    out.objective = out.flags.covered_count() as f64;
    out
}

/// Exhaustive scan of `bounds` on a `grid_step` lattice; returns the best count and its centre.
pub fn brute_force_usnc(users: &[User], bounds: &Bounds, gamma_star: f64, grid_step: f64) -> (usize, Point) {
    assert!(grid_step > 0.0, "grid_step must be positive");
    let pts = points(users);
    let nx = ((bounds.x_u - bounds.x_l) / grid_step).floor() as usize;
    let ny = ((bounds.y_u - bounds.y_l) / grid_step).floor() as usize;
    (0..=nx)
        .into_par_iter()
        .map(|ix| {
            let x = bounds.x_l + ix as f64 * grid_step;
            let mut best = (0usize, Point::new(x, bounds.y_l));
            for iy in 0..=ny {
                let c = Point::new(x, bounds.y_l + iy as f64 * grid_step);
                let n = count_within(c, &pts, gamma_star);
                if n > best.0 {
                    best = (n, c);
                }
            }
            best
        })
        .reduce(
            || (0, Point::new(bounds.x_l, bounds.y_l)),
            |a, b| match a.0.cmp(&b.0) {
                Ordering::Greater => a,
                Ordering::Less => b,
                Ordering::Equal => {
                    if a.1.lex_cmp(b.1) == Ordering::Greater {
                        b
                    } else {
                        a
                    }
                }
            },
        )
}
