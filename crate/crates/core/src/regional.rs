//! Regional profit under a uniform user density: a disk of radius `R` inside a
//! world disk of radius `W`, with one discount `τ` offered to everyone in the
//! band of width `d_u` around the coverage disk.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result, SncError};
use crate::search::{bisect_sign, golden_section_max};
use crate::uil::PersuasionFit;

/// Lower end of the discount search interval.
pub const TAU_FLOOR: f64 = 1e-4;
pub const TAU_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionalModel {
    pub radius: f64,
    pub world: f64,
    pub d_u: f64,
    /// Users per square metre.
    pub density: f64,
    pub fit: PersuasionFit,
}

impl RegionalModel {
    pub fn new(radius: f64, world: f64, d_u: f64, density: f64, fit: PersuasionFit) -> Result<Self> {
        if !(radius >= 0.0 && radius <= world && world > 0.0 && world.is_finite()) {
            return Err(SncError::InvalidParameter(format!(
                "need 0 <= R <= W, got R={radius}, W={world}"
            )));
        }
        if !(d_u >= 0.0 && d_u <= world - radius + 1e-9) {
            return Err(SncError::InvalidParameter(format!(
                "need 0 <= d_u <= W - R, got d_u={d_u}"
            )));
        }
        if !(density >= 0.0) {
            return Err(domain("density", density, "density >= 0"));
        }
        Ok(Self {
            radius,
            world,
            d_u,
            density,
            fit,
        })
    }

    /// Same model with the band stretched to the world edge.
    pub fn full_band(radius: f64, world: f64, fit: PersuasionFit) -> Result<Self> {
        Self::new(radius, world, world - radius, 0.0, fit)
    }

    fn beta(&self, tau: f64) -> Result<f64> {
        let b = self.fit.beta(tau)?;
        if !(b > 0.0) {
            return Err(domain("beta(tau)", b, "beta > 0"));
        }
        Ok(b)
    }
}

/// Probability that a uniformly placed user is inside the coverage disk.
pub fn p_cov_core(model: &RegionalModel) -> f64 {
    (model.radius / model.world).powi(2)
}

fn band_numerator(beta: f64, r: f64, d_u: f64) -> f64 {
    (-beta * (r + d_u) - 1.0) * (-beta * d_u).exp() + beta * r + 1.0
}

/// Probability that a uniformly placed user sits in the band and accepts `tau`.
pub fn p_cov_uil(model: &RegionalModel, tau: f64) -> Result<f64> {
    let b = model.beta(tau)?;
    if model.d_u == 0.0 {
        return Ok(0.0);
    }
    Ok(2.0 * band_numerator(b, model.radius, model.d_u) / (model.world * model.world * b * b))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionalProfit {
    pub tau: f64,
    pub p_core: f64,
    pub p_uil: f64,
    /// Expected normalized revenue per user.
    pub profit: f64,
    /// Band revenue relative to core revenue, percent; `None` when the core is empty.
    pub gain_percent: Option<f64>,
}

pub fn regional_profit(model: &RegionalModel, tau: f64) -> Result<RegionalProfit> {
    let p_core = p_cov_core(model);
    let p_uil = p_cov_uil(model, tau)?;
    let extra = p_uil * (1.0 - tau);
    Ok(RegionalProfit {
        tau,
        p_core,
        p_uil,
        profit: p_core + extra,
        gain_percent: (p_core > 0.0).then(|| 100.0 * extra / p_core),
    })
}

pub fn uil_gain_percent(model: &RegionalModel, tau: f64) -> Result<f64> {
    regional_profit(model, tau)?
        .gain_percent
        .ok_or_else(|| SncError::InvalidParameter("gain undefined for an empty coverage disk".into()))
}

/// Analytic dΠ∘/dτ.
pub fn regional_profit_derivative(model: &RegionalModel, tau: f64) -> Result<f64> {
    let b = model.beta(tau)?;
    let (r, d) = (model.radius, model.d_u);
    let w2 = model.world * model.world;
    let e = (-b * d).exp();
    let n = band_numerator(b, r, d);
    let dn = -(r + d) * e + d * (b * (r + d) + 1.0) * e + r;
    let dpd_dbeta = 2.0 / w2 * (dn / (b * b) - 2.0 * n / (b * b * b));
    let dbeta = model.fit.k1 / tau;
    let pd = 2.0 * n / (w2 * b * b);
    Ok(-pd + (1.0 - tau) * dpd_dbeta * dbeta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionalOptimum {
    pub tau: f64,
    pub profit: f64,
    pub gain_percent: Option<f64>,
}

/// Discount maximizing Π∘ on `[TAU_FLOOR, 1]`.
pub fn optimal_regional_incentive(model: &RegionalModel) -> Result<RegionalOptimum> {
    optimal_regional_incentive_with_floor(model, TAU_FLOOR)
}

pub fn optimal_regional_incentive_with_floor(model: &RegionalModel, floor: f64) -> Result<RegionalOptimum> {
    if model.d_u == 0.0 {
        let p = p_cov_core(model);
        return Ok(RegionalOptimum {
            tau: 0.0,
            profit: p,
            gain_percent: (p > 0.0).then_some(0.0),
        });
    }
    // Reject fits with β <= 0 anywhere in the search range up front.
    model.beta(1.0)?;
    let (tau, _) = golden_section_max(
        |t| regional_profit(model, t).map_or(f64::NEG_INFINITY, |p| p.profit),
        floor,
        1.0,
        TAU_TOL,
    );
    let p = regional_profit(model, tau)?;
    Ok(RegionalOptimum {
        tau,
        profit: p.profit,
        gain_percent: p.gain_percent,
    })
}

/// Sign changes of the first difference of Π∘ on `points` uniform τ samples.
pub fn profit_slope_sign_changes(model: &RegionalModel, points: usize) -> Result<usize> {
    let taus: Vec<f64> = (0..points)
        .map(|i| TAU_FLOOR + (1.0 - TAU_FLOOR) * i as f64 / (points - 1) as f64)
        .collect();
    let vals = taus
        .iter()
        .map(|&t| regional_profit(model, t).map(|p| p.profit))
        .collect::<Result<Vec<_>>>()?;
    let mut changes = 0;
    let mut last = 0.0;
    for w in vals.windows(2) {
        let s = (w[1] - w[0]).signum();
        if w[1] != w[0] {
            if last != 0.0 && s != last {
                changes += 1;
            }
            last = s;
        }
    }
    Ok(changes)
}

/// `(d_u, optimum)` for each band width, at fixed `R` and `W`.
pub fn tau_star_sweep(
    radius: f64,
    world: f64,
    fit: PersuasionFit,
    d_values: &[f64],
) -> Result<Vec<(f64, RegionalOptimum)>> {
    d_values
        .iter()
        .map(|&d| {
            let m = RegionalModel::new(radius, world, d, 0.0, fit)?;
            Ok((d, optimal_regional_incentive(&m)?))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauInfinity {
    pub tau: f64,
    /// Π_N^∞ / λ = π (R² + 2 (1 − τ)(βR + 1) / β²).
    pub profit_per_density: f64,
    pub residual: f64,
}

/// Profit of an unbounded world per unit density.
pub fn infinite_profit_per_density(radius: f64, tau: f64, fit: &PersuasionFit) -> Result<f64> {
    let b = fit.beta(tau)?;
    Ok(PI * (radius * radius + 2.0 * (1.0 - tau) * (b * radius + 1.0) / (b * b)))
}

/// `τ β³ / 2 · dΠ_N^∞/dτ / (λπ)`; vanishes at the unbounded-world optimum.
pub fn infinite_stationarity(radius: f64, tau: f64, fit: &PersuasionFit) -> Result<f64> {
    let b = fit.beta(tau)?;
    let k1 = fit.k1;
    let rb1 = radius * b + 1.0;
    Ok(k1 * radius * b * (1.0 - tau) - tau * b * rb1 - 2.0 * k1 * (1.0 - tau) * rb1)
}

/// Optimal discount as `W → ∞` with the band reaching the world edge.
pub fn tau_infinity(radius: f64, fit: &PersuasionFit) -> Result<TauInfinity> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(domain("R", radius, "R > 0"));
    }
    fit.beta(1.0)
        .ok()
        .filter(|b| *b > 0.0)
        .ok_or_else(|| SncError::InvalidParameter("fit gives beta(1) <= 0".into()))?;
    let (coarse, _) = golden_section_max(
        |t| infinite_profit_per_density(radius, t, fit).unwrap_or(f64::NEG_INFINITY),
        TAU_FLOOR,
        1.0,
        TAU_TOL,
    );
    let g = |t: f64| infinite_stationarity(radius, t, fit).unwrap_or(f64::NAN);
    let lo = (coarse - 1e-3).max(TAU_FLOOR);
    let hi = (coarse + 1e-3).min(1.0);
    let tau = bisect_sign(g, lo, hi, 1e-15, 200).map_or(coarse, |b| b.root);
    Ok(TauInfinity {
        tau,
        profit_per_density: infinite_profit_per_density(radius, tau, fit)?,
        residual: g(tau).abs(),
    })
}
