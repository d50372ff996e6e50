use std::fmt;

use serde::{Deserialize, Serialize};

use crate::uil::IncentiveOffer;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Coverage count only, no incentives.
    NoUil,
    Usnc,
    Jsnc,
    SemiJsnc,
    ExactOracle,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::NoUil,
        Method::Usnc,
        Method::Jsnc,
        Method::SemiJsnc,
        Method::ExactOracle,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::NoUil => "no-uil",
            Method::Usnc => "usnc",
            Method::Jsnc => "jsnc",
            Method::SemiJsnc => "semi-jsnc",
            Method::ExactOracle => "exact-oracle",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown method {s:?}"))
    }
}

/// Drone position and the disk it serves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub x_d: f64,
    pub y_d: f64,
    pub h_d: f64,
    pub coverage_radius: f64,
    pub alpha: f64,
}

/// Per-user region membership: `u` inside the disk, `w` inside the incentive band.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RegionFlags {
    pub u: Vec<bool>,
    pub w: Vec<bool>,
}

impl RegionFlags {
    pub fn covered_count(&self) -> usize {
        self.u.iter().filter(|&&b| b).count()
    }

    pub fn band_count(&self) -> usize {
        self.w.iter().filter(|&&b| b).count()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverStats {
    /// Candidate centres or starting points examined.
    pub candidates: usize,
    pub iterations: usize,
    pub evaluations: usize,
    pub wall_time_s: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SncSolution {
    pub method: Method,
    pub placement: Placement,
    pub flags: RegionFlags,
    pub offers: Vec<IncentiveOffer>,
    /// Covered users plus the expected profit of every offer.
    pub objective: f64,
    /// Value of the surrogate objective the solver maximized, if any.
    pub approx_objective: Option<f64>,
    pub stats: SolverStats,
}

impl SncSolution {
    pub fn center(&self) -> crate::geometry::Point {
        crate::geometry::Point::new(self.placement.x_d, self.placement.y_d)
    }

    pub fn covered_count(&self) -> usize {
        self.flags.covered_count()
    }
}
