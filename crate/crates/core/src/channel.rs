//! Air-to-ground propagation: LOS probability, mean path loss, and the
//! altitude-to-radius trade-off that fixes the largest ground coverage disk.

use std::f64::consts::{LN_10, PI};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result, SncError};
use crate::search::{bisect_sign, golden_section_max};

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Search interval for the altitude/radius ratio.
pub const ALPHA_RANGE: (f64, f64) = (0.01, 100.0);

pub const DEFAULT_ALPHA_TOL: f64 = 1e-6;

const RAD_TO_DEG: f64 = 180.0 / PI;

/// Propagation environment of the S-curve LOS model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub name: String,
    pub a: f64,
    pub b: f64,
    /// Excess loss of LOS links, dB.
    pub eta_los: f64,
    /// Excess loss of NLOS links, dB.
    pub eta_nlos: f64,
}

impl Environment {
    pub const PRESETS: [&'static str; 3] = ["suburban", "urban", "dense-urban"];

    pub fn new(name: impl Into<String>, a: f64, b: f64, eta_los: f64, eta_nlos: f64) -> Result<Self> {
        let env = Self {
            name: name.into(),
            a,
            b,
            eta_los,
            eta_nlos,
        };
        env.validate()?;
        Ok(env)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(domain("a", self.a, "a > 0"));
        }
        if !(self.b > 0.0 && self.b.is_finite()) {
            return Err(domain("b", self.b, "b > 0"));
        }
        if !(self.eta_los >= 0.0 && self.eta_nlos >= self.eta_los && self.eta_nlos.is_finite()) {
            return Err(SncError::InvalidParameter(format!(
                "environment {}: need eta_nlos >= eta_los >= 0, got ({}, {})",
                self.name, self.eta_los, self.eta_nlos
            )));
        }
        Ok(())
    }

    pub fn suburban() -> Self {
        Self::preset_unchecked("suburban", 4.88, 0.43, 0.1, 21.0)
    }

    pub fn urban() -> Self {
        Self::preset_unchecked("urban", 9.61, 0.16, 1.0, 20.0)
    }

    pub fn dense_urban() -> Self {
        Self::preset_unchecked("dense-urban", 12.08, 0.11, 1.6, 23.0)
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().replace(['_', ' '], "-").as_str() {
            "suburban" => Ok(Self::suburban()),
            "urban" => Ok(Self::urban()),
            "dense-urban" | "denseurban" => Ok(Self::dense_urban()),
            other => Err(SncError::InvalidParameter(format!(
                "unknown environment preset {other:?} (expected one of {:?})",
                Self::PRESETS
            ))),
        }
    }

    pub fn all_presets() -> [Self; 3] {
        [Self::suburban(), Self::urban(), Self::dense_urban()]
    }

    fn preset_unchecked(name: &str, a: f64, b: f64, eta_los: f64, eta_nlos: f64) -> Self {
        Self {
            name: name.to_string(),
            a,
            b,
            eta_los,
            eta_nlos,
        }
    }

    /// LOS minus NLOS excess loss; non-positive for the tabulated environments.
    pub fn z1(&self) -> f64 {
        self.eta_los - self.eta_nlos
    }

    /// Free-space constant plus NLOS excess loss at carrier `fc_hz`.
    pub fn z2(&self, fc_hz: f64) -> f64 {
        20.0 * (4.0 * PI * fc_hz / SPEED_OF_LIGHT).log10() + self.eta_nlos
    }

    /// `exp(-b (θ - a))` for an elevation angle θ in degrees.
    fn s_curve_exp(&self, elevation_deg: f64) -> f64 {
        (-self.b * (elevation_deg - self.a)).exp()
    }

    fn los_from_elevation(&self, elevation_deg: f64) -> f64 {
        1.0 / (1.0 + self.a * self.s_curve_exp(elevation_deg))
    }

    /// LOS probability as a function of the ratio `h / r`.
    pub fn los_from_ratio(&self, alpha: f64) -> f64 {
        self.los_from_elevation(RAD_TO_DEG * alpha.atan())
    }
}

/// Carrier and QoS threshold of the link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    pub fc_hz: f64,
    /// Maximum tolerable path loss, dB.
    pub gamma_db: f64,
}

impl ChannelConfig {
    pub fn new(fc_hz: f64, gamma_db: f64) -> Result<Self> {
        if !(fc_hz > 0.0 && fc_hz.is_finite()) {
            return Err(domain("fc", fc_hz, "fc > 0"));
        }
        if !gamma_db.is_finite() {
            return Err(domain("gamma", gamma_db, "finite dB value"));
        }
        Ok(Self { fc_hz, gamma_db })
    }

    /// Rejects thresholds at or below `z2`, for which no geometry is covered.
    pub fn check_against(&self, env: &Environment) -> Result<()> {
        let z2 = env.z2(self.fc_hz);
        if self.gamma_db <= z2 {
            return Err(SncError::InvalidParameter(format!(
                "gamma = {} dB does not exceed z2 = {z2:.3} dB; coverage set is empty",
                self.gamma_db
            )));
        }
        Ok(())
    }
}

fn check_geometry(h: f64, r: f64) -> Result<()> {
    if !(h >= 0.0) {
        return Err(domain("h", h, "h >= 0"));
    }
    if !(r >= 0.0) {
        return Err(domain("r", r, "r >= 0"));
    }
    if h == 0.0 && r == 0.0 {
        return Err(SncError::DegenerateGeometry);
    }
    Ok(())
}

/// Probability of a LOS link from altitude `h` to a user at ground distance `r`.
pub fn los_probability(h: f64, r: f64, env: &Environment) -> Result<f64> {
    check_geometry(h, r)?;
    // atan2 handles r = 0 (90°) without dividing.
    Ok(env.los_from_elevation(RAD_TO_DEG * h.atan2(r)))
}

/// Mean path loss in dB.
pub fn path_loss(h: f64, r: f64, env: &Environment, cfg: &ChannelConfig) -> Result<f64> {
    let p = los_probability(h, r, env)?;
    Ok(20.0 * h.hypot(r).log10() + env.z1() * p + env.z2(cfg.fc_hz))
}

/// Largest ground radius meeting the QoS threshold when `h = alpha * R`.
pub fn gamma_of_alpha(alpha: f64, env: &Environment, cfg: &ChannelConfig) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(domain("alpha", alpha, "alpha > 0"));
    }
    Ok(gamma_unchecked(alpha, env, cfg))
}

fn gamma_unchecked(alpha: f64, env: &Environment, cfg: &ChannelConfig) -> f64 {
    let p = env.los_from_ratio(alpha);
    let budget = cfg.gamma_db - env.z1() * p - env.z2(cfg.fc_hz);
    (10f64.powf(budget / 10.0) / (1.0 + alpha * alpha)).sqrt()
}

/// `(1 + α²) · d ln Γ / dα`; shares its sign with dΓ/dα.
fn log_gamma_slope(alpha: f64, env: &Environment) -> f64 {
    let e = env.s_curve_exp(RAD_TO_DEG * alpha.atan());
    let q = 1.0 + env.a * e;
    -(LN_10 / 20.0) * RAD_TO_DEG * env.z1() * env.a * env.b * e / (q * q) - alpha
}

/// Analytic dΓ/dα.
pub fn gamma_derivative(alpha: f64, env: &Environment, cfg: &ChannelConfig) -> Result<f64> {
    let g = gamma_of_alpha(alpha, env, cfg)?;
    Ok(g * log_gamma_slope(alpha, env) / (1.0 + alpha * alpha))
}

/// Left-hand side of the stationarity condition
/// `απ (a e + 1)² − k3 e = 0` with `e = exp(-b(θ° − a))`, `k3 = −9 ln10 · a b z1`.
pub fn alpha_star_equation(alpha: f64, env: &Environment) -> f64 {
    let e = env.s_curve_exp(RAD_TO_DEG * alpha.atan());
    let k3 = -9.0 * LN_10 * env.a * env.b * env.z1();
    let q = env.a * e + 1.0;
    alpha * PI * q * q - k3 * e
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaStarResult {
    pub alpha_star: f64,
    /// Maximum ground coverage radius Γ(α*), m.
    pub gamma_star: f64,
    pub iterations: usize,
    /// |stationarity equation| at `alpha_star`.
    pub residual: f64,
}

/// Locates the unique maximizer of Γ(α) on [0.01, 100] by bisection on the
/// sign of dΓ/dα. `tol` is the absolute width of the final bracket.
pub fn find_alpha_star(env: &Environment, cfg: &ChannelConfig, tol: f64) -> Result<AlphaStarResult> {
    env.validate()?;
    cfg.check_against(env)?;
    if !(tol > 0.0) {
        return Err(domain("tol", tol, "tol > 0"));
    }
    let (lo, hi) = ALPHA_RANGE;
    // Γ > 0, so the sign of the slope is the sign of the derivative.
    let found =
        bisect_sign(|a| log_gamma_slope(a, env), lo, hi, tol, 10_000).ok_or(SncError::NoStationaryPoint { lo, hi })?;
    let alpha_star = found.root;
    Ok(AlphaStarResult {
        alpha_star,
        gamma_star: gamma_unchecked(alpha_star, env, cfg),
        iterations: found.iterations,
        residual: alpha_star_equation(alpha_star, env).abs(),
    })
}

/// Bound on |stationarity equation| implied by an α error of `tol/2`.
pub fn alpha_star_residual_bound(alpha_star: f64, env: &Environment, tol: f64) -> f64 {
    let h = 1e-6 * alpha_star.max(1e-3);
    let slope = (alpha_star_equation(alpha_star + h, env) - alpha_star_equation(alpha_star - h, env)) / (2.0 * h);
    // Factor 2 absorbs the finite-difference slope error.
    slope.abs() * tol
}

/// Number of sign changes of the forward difference of Γ over `points`
/// log-spaced ratios in [0.01, 100]. One means a single interior maximum.
pub fn gamma_slope_sign_changes(env: &Environment, cfg: &ChannelConfig, points: usize) -> usize {
    let (lo, hi) = ALPHA_RANGE;
    let step = (hi / lo).ln() / (points - 1) as f64;
    let values: Vec<f64> = (0..points)
        .map(|i| gamma_unchecked(lo * (step * i as f64).exp(), env, cfg))
        .collect();
    let mut changes = 0;
    let mut last_sign = 0.0;
    for w in values.windows(2) {
        let diff = w[1] - w[0];
        if diff == 0.0 {
            continue;
        }
        let s = diff.signum();
        if last_sign != 0.0 && s != last_sign {
            changes += 1;
        }
        last_sign = s;
    }
    changes
}

/// Channel model bundled with its optimal altitude/radius ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageModel {
    pub environment: Environment,
    pub channel: ChannelConfig,
    pub alpha: AlphaStarResult,
}

impl CoverageModel {
    pub fn new(environment: Environment, channel: ChannelConfig) -> Result<Self> {
        let alpha = find_alpha_star(&environment, &channel, DEFAULT_ALPHA_TOL)?;
        Ok(Self {
            environment,
            channel,
            alpha,
        })
    }

    /// Same environment and carrier with the QoS threshold shifted so that the
    /// maximum coverage radius equals `radius`. α* does not move: γ only scales Γ.
    pub fn with_coverage_radius(environment: Environment, channel: ChannelConfig, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(domain("coverage radius", radius, "radius > 0"));
        }
        let base = Self::new(environment, channel)?;
        let gamma_db = channel.gamma_db + 20.0 * (radius / base.gamma_star()).log10();
        Self::new(base.environment, ChannelConfig::new(channel.fc_hz, gamma_db)?)
    }

    pub fn gamma_star(&self) -> f64 {
        self.alpha.gamma_star
    }

    pub fn alpha_star(&self) -> f64 {
        self.alpha.alpha_star
    }

    pub fn path_loss(&self, h: f64, r: f64) -> Result<f64> {
        path_loss(h, r, &self.environment, &self.channel)
    }

    /// Altitude serving a disk of `radius`, kept within `[h_l, h_u]`.
    ///
    /// Uses α* when `α*·radius` is admissible, otherwise the admissible ratio
    /// with the largest Γ. Fails if that Γ cannot reach `radius`.
    pub fn altitude_for(&self, radius: f64, h_l: f64, h_u: f64) -> Result<(f64, f64)> {
        let alpha = self.alpha_star();
        let h = alpha * radius;
        if h >= h_l && h <= h_u {
            return Ok((h, alpha));
        }
        let lo = (h_l / radius).max(f64::MIN_POSITIVE);
        let hi = h_u / radius;
        if !(hi >= lo) {
            return Err(SncError::InfeasibleAltitude { radius, h_l, h_u });
        }
        let (best_alpha, best_gamma) =
            golden_section_max(|a| gamma_unchecked(a, &self.environment, &self.channel), lo, hi, 1e-9);
        if best_gamma + 1e-9 < radius {
            return Err(SncError::InfeasibleAltitude { radius, h_l, h_u });
        }
        Ok((best_alpha * radius, best_alpha))
    }
}
