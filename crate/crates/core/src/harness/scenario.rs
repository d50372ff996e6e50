use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::channel::{ChannelConfig, CoverageModel, Environment};
use crate::error::{Result, SncError};
use crate::geometry::{Bounds, Point};
use crate::jsnc::SearchOptions;
use crate::pwl::{build_grid, fit_profit_curve, Pwl1D, PwlGrid, DEFAULT_PWL_SAMPLES};
use crate::search::NelderMeadOptions;
use crate::uil::PersuasionFit;
use crate::usnc::User;

pub const SCHEMA_VERSION: u32 = 1;

/// Name and version of the user-placement generator.
pub const GENERATOR: &str = "chacha20/v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EnvironmentSpec {
    Preset(String),
    Inline(Environment),
}

impl EnvironmentSpec {
    pub fn resolve(&self) -> Result<Environment> {
        match self {
            EnvironmentSpec::Preset(name) => Environment::preset(name),
            EnvironmentSpec::Inline(env) => {
                env.validate()?;
                Ok(env.clone())
            }
        }
    }
}

/// Placement box; a missing `h_u` means no ceiling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsSpec {
    pub x_l: f64,
    pub x_u: f64,
    pub y_l: f64,
    pub y_u: f64,
    #[serde(default)]
    pub h_l: f64,
    #[serde(default)]
    pub h_u: Option<f64>,
}

impl BoundsSpec {
    pub fn to_bounds(&self) -> Result<Bounds> {
        Bounds::new(
            (self.x_l, self.x_u),
            (self.y_l, self.y_u),
            (self.h_l, self.h_u.unwrap_or(f64::INFINITY)),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum World {
    Disk { radius: f64 },
    Rectangle { x_l: f64, x_u: f64, y_l: f64, y_u: f64 },
}

impl World {
    pub fn area(&self) -> f64 {
        match *self {
            World::Disk { radius } => std::f64::consts::PI * radius * radius,
            World::Rectangle { x_l, x_u, y_l, y_u } => (x_u - x_l) * (y_u - y_l),
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        match *self {
            World::Disk { radius } => p.x * p.x + p.y * p.y <= radius * radius * (1.0 + 1e-12),
            World::Rectangle { x_l, x_u, y_l, y_u } => p.x >= x_l && p.x <= x_u && p.y >= y_l && p.y <= y_u,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            World::Disk { radius } => radius > 0.0 && radius.is_finite(),
            World::Rectangle { x_l, x_u, y_l, y_u } => x_l < x_u && y_l < y_u,
        };
        if ok {
            Ok(())
        } else {
            Err(SncError::Scenario(format!("degenerate world {self:?}")))
        }
    }
}

/// Uniform i.i.d. user positions in `world`.
pub fn generate_users<R: Rng>(world: &World, count: usize, rng: &mut R) -> Vec<User> {
    (0..count)
        .map(|id| {
            let (x, y) = match *world {
                World::Disk { radius } => {
                    let r = radius * rng.random::<f64>().sqrt();
                    let theta = std::f64::consts::TAU * rng.random::<f64>();
                    (r * theta.cos(), r * theta.sin())
                }
                World::Rectangle { x_l, x_u, y_l, y_u } => (
                    x_l + (x_u - x_l) * rng.random::<f64>(),
                    y_l + (y_u - y_l) * rng.random::<f64>(),
                ),
            };
            User::new(id, x, y)
        })
        .collect()
}

/// Generator for trial `stream` under `master_seed`.
pub fn trial_rng(master_seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

pub fn generate_users_seeded(world: &World, count: usize, seed: u64) -> Vec<User> {
    generate_users(world, count, &mut trial_rng(seed, 0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum UsersSpec {
    Explicit { points: Vec<[f64; 2]> },
    Random { count: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PwlConfig {
    pub tau_vertices: Vec<f64>,
    pub d_vertices: Vec<f64>,
    pub breakpoints: usize,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    DEFAULT_PWL_SAMPLES
}

impl Default for PwlConfig {
    fn default() -> Self {
        Self {
            tau_vertices: vec![0.05, 0.1, 0.2, 0.9],
            d_vertices: vec![5.0, 10.0, 20.0, 40.0, 200.0],
            breakpoints: 3,
            samples: DEFAULT_PWL_SAMPLES,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub random_starts: usize,
    pub seed: u64,
    pub max_iterations: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            random_starts: 32,
            seed: 0,
            max_iterations: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub schema_version: u32,
    pub name: String,
    pub environment: EnvironmentSpec,
    pub gamma_db: f64,
    pub fc_hz: f64,
    /// Forces Γ* to this value by shifting the path-loss threshold.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coverage_radius_m: Option<f64>,
    pub bounds: BoundsSpec,
    pub d_u: f64,
    pub world: World,
    pub users: UsersSpec,
    #[serde(default)]
    pub fit: PersuasionFit,
    #[serde(default)]
    pub pwl: PwlConfig,
    #[serde(default)]
    pub search: SearchConfig,
}

impl Scenario {
    pub const PRESETS: [&'static str; 2] = ["paper-default", "toy"];

    /// Dense urban, 90 dB, 2.5 GHz, ±700 m box, 15 users in a 700 m disk.
    pub fn paper_default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            name: "paper-default".into(),
            environment: EnvironmentSpec::Preset("dense-urban".into()),
            gamma_db: 90.0,
            fc_hz: 2.5e9,
            coverage_radius_m: None,
            bounds: BoundsSpec {
                x_l: -700.0,
                x_u: 700.0,
                y_l: -700.0,
                y_u: 700.0,
                h_l: 0.0,
                h_u: None,
            },
            d_u: 200.0,
            world: World::Disk { radius: 700.0 },
            users: UsersSpec::Random { count: 15, seed: 1 },
            fit: PersuasionFit::default(),
            pwl: PwlConfig::default(),
            search: SearchConfig::default(),
        }
    }

    /// Two groups of three, anchors 400 m apart, 200 m coverage radius.
    pub fn toy() -> Self {
        Self::toy_with(&super::toy::ToyLayout::default())
    }

    pub fn toy_with(layout: &super::toy::ToyLayout) -> Self {
        let points = layout.points().iter().map(|p| [p.x, p.y]).collect();
        Self {
            name: "toy".into(),
            coverage_radius_m: Some(layout.coverage_radius),
            users: UsersSpec::Explicit { points },
            ..Self::paper_default()
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "paper-default" | "paper_default" => Ok(Self::paper_default()),
            "toy" => Ok(Self::toy()),
            other => Err(SncError::Scenario(format!(
                "unknown preset {other:?} (expected one of {:?})",
                Self::PRESETS
            ))),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: Self = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// SHA-256 of the compact JSON encoding, lowercase hex.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("scenario serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(SncError::Scenario(format!(
                "schema_version {} not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        self.environment.resolve()?;
        ChannelConfig::new(self.fc_hz, self.gamma_db)?;
        self.bounds.to_bounds()?;
        self.world.validate()?;
        if !(self.d_u >= 0.0 && self.d_u.is_finite()) {
            return Err(SncError::Scenario(format!("d_u = {} must be >= 0", self.d_u)));
        }
        if let Some(r) = self.coverage_radius_m {
            if !(r > 0.0 && r.is_finite()) {
                return Err(SncError::Scenario(format!("coverage_radius_m = {r} must be > 0")));
            }
        }
        PersuasionFit::new(self.fit.k1, self.fit.k2)?;
        if self.pwl.breakpoints < 2 {
            return Err(SncError::Scenario("pwl.breakpoints must be >= 2".into()));
        }
        if let UsersSpec::Explicit { points } = &self.users {
            if let Some(p) = points.iter().find(|p| !self.world.contains(Point::new(p[0], p[1]))) {
                return Err(SncError::Scenario(format!(
                    "user at ({}, {}) lies outside the world",
                    p[0], p[1]
                )));
            }
        }
        Ok(())
    }

    /// Users of the scenario; random sets are drawn from stream 0 of their seed.
    pub fn users(&self) -> Vec<User> {
        match &self.users {
            UsersSpec::Explicit { points } => points
                .iter()
                .enumerate()
                .map(|(i, p)| User::new(i, p[0], p[1]))
                .collect(),
            UsersSpec::Random { count, seed } => generate_users_seeded(&self.world, *count, *seed),
        }
    }

    pub fn user_count(&self) -> usize {
        match &self.users {
            UsersSpec::Explicit { points } => points.len(),
            UsersSpec::Random { count, .. } => *count,
        }
    }

    pub fn coverage_model(&self) -> Result<CoverageModel> {
        let env = self.environment.resolve()?;
        let cfg = ChannelConfig::new(self.fc_hz, self.gamma_db)?;
        match self.coverage_radius_m {
            Some(r) => CoverageModel::with_coverage_radius(env, cfg, r),
            None => CoverageModel::new(env, cfg),
        }
    }

    pub fn search_options(&self) -> SearchOptions {
        SearchOptions {
            random_starts: self.search.random_starts,
            seed: self.search.seed,
            nelder_mead: NelderMeadOptions {
                max_iterations: self.search.max_iterations,
                ..NelderMeadOptions::default()
            },
            ..SearchOptions::default()
        }
    }

    /// Resolves the channel model and builds both profit surrogates.
    pub fn prepare(&self) -> Result<Prepared> {
        self.validate()?;
        let model = self.coverage_model()?;
        let grid = build_grid(&self.pwl.tau_vertices, &self.pwl.d_vertices, &self.fit)?;
        let curve = fit_profit_curve(
            &self.fit,
            self.pwl.breakpoints,
            self.d_u.max(f64::MIN_POSITIVE),
            self.pwl.samples,
        )?;
        Ok(Prepared {
            bounds: self.bounds.to_bounds()?,
            search: self.search_options(),
            hash: self.hash(),
            scenario: self.clone(),
            model,
            grid,
            curve,
        })
    }
}

/// Scenario with its derived, reusable pieces.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub scenario: Scenario,
    pub hash: String,
    pub model: CoverageModel,
    pub bounds: Bounds,
    pub grid: PwlGrid,
    pub curve: Pwl1D,
    pub search: SearchOptions,
}

impl Prepared {
    pub fn fit(&self) -> &PersuasionFit {
        &self.scenario.fit
    }

    pub fn d_u(&self) -> f64 {
        self.scenario.d_u
    }

    pub fn gamma_star(&self) -> f64 {
        self.model.gamma_star()
    }
}
