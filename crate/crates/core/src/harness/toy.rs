use serde::{Deserialize, Serialize};

use super::experiment::score;
use super::scenario::Scenario;
use crate::error::Result;
use crate::geometry::Point;
use crate::jsnc::{solve_jsnc, solve_semi_jsnc};
use crate::solution::SncSolution;
use crate::usnc::usnc_solution;

/// Two anchors on the x axis, each with two satellites placed outward at
/// `±satellite_angle_deg` from the line joining the anchors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToyLayout {
    pub anchor_separation: f64,
    pub satellite_offset: f64,
    pub satellite_angle_deg: f64,
    pub coverage_radius: f64,
}

impl Default for ToyLayout {
    fn default() -> Self {
        Self {
            anchor_separation: 400.0,
            satellite_offset: 25.0,
            satellite_angle_deg: 42.5,
            coverage_radius: 200.0,
        }
    }
}

impl ToyLayout {
    /// Users 1..=6 in order: left anchor, right anchor, left satellites, right satellites.
    pub fn points(&self) -> Vec<Point> {
        let half = 0.5 * self.anchor_separation;
        let (s, c) = self.satellite_angle_deg.to_radians().sin_cos();
        let o = self.satellite_offset;
        vec![
            Point::new(-half, 0.0),
            Point::new(half, 0.0),
            Point::new(-half - o * c, o * s),
            Point::new(-half - o * c, -o * s),
            Point::new(half + o * c, o * s),
            Point::new(half + o * c, -o * s),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToyReport {
    pub layout: ToyLayout,
    pub gamma_star: f64,
    pub usnc: SncSolution,
    pub jsnc: SncSolution,
    pub semi_jsnc: SncSolution,
    pub usnc_profit: f64,
    pub jsnc_profit: f64,
    pub semi_jsnc_profit: f64,
    /// JSNC over USNC, percent.
    pub jsnc_gain_percent: f64,
    /// |semi-JSNC − JSNC| / JSNC, percent.
    pub semi_gap_percent: f64,
}

pub fn run_toy_scenario(layout: &ToyLayout) -> Result<ToyReport> {
    let scenario = Scenario::toy_with(layout);
    let p = scenario.prepare()?;
    let users = scenario.users();
    let usnc = usnc_solution(&users, &p.bounds, &p.model, p.d_u(), p.fit())?;
    let jsnc = solve_jsnc(&users, &p.bounds, &p.model, p.d_u(), &p.grid, p.fit(), &p.search)?;
    let semi = solve_semi_jsnc(&users, &p.bounds, &p.model, p.d_u(), &p.curve, p.fit(), &p.search)?;
    let (u, j, s) = (
        score(&usnc, &users, &p),
        score(&jsnc, &users, &p),
        score(&semi, &users, &p),
    );
    Ok(ToyReport {
        layout: *layout,
        gamma_star: p.gamma_star(),
        usnc,
        jsnc,
        semi_jsnc: semi,
        usnc_profit: u,
        jsnc_profit: j,
        semi_jsnc_profit: s,
        jsnc_gain_percent: 100.0 * (j / u - 1.0),
        semi_gap_percent: 100.0 * (s - j).abs() / j,
    })
}
