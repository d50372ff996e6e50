//! User-in-the-loop persuasion model.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Survey measurements of β at discount levels 20/40/60/80 %.
pub const SURVEY_POINTS: [(f64, f64); 4] = [(0.2, 0.0244), (0.4, 0.0164), (0.6, 0.0117), (0.8, 0.0082)];

/// Logarithmic fit `β(τ) = k1 ln τ + k2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PersuasionFit {
    pub k1: f64,
    pub k2: f64,
}

impl Default for PersuasionFit {
    fn default() -> Self {
        Self {
            k1: -0.01166,
            k2: 0.005676,
        }
    }
}

impl PersuasionFit {
    pub fn new(k1: f64, k2: f64) -> Result<Self> {
        if !(k1 < 0.0 && k1.is_finite()) {
            return Err(domain("k1", k1, "k1 < 0"));
        }
        if !k2.is_finite() {
            return Err(domain("k2", k2, "finite"));
        }
        Ok(Self { k1, k2 })
    }

    pub fn beta(&self, tau: f64) -> Result<f64> {
        check_tau(tau)?;
        Ok(self.beta_unchecked(tau))
    }

    pub(crate) fn beta_unchecked(&self, tau: f64) -> f64 {
        self.k1 * tau.ln() + self.k2
    }

    /// Root-mean-square error against [`SURVEY_POINTS`].
    pub fn survey_rmse(&self) -> f64 {
        let sse: f64 = SURVEY_POINTS
            .iter()
            .map(|&(t, b)| (self.beta_unchecked(t) - b).powi(2))
            .sum();
        (sse / SURVEY_POINTS.len() as f64).sqrt()
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(domain("tau", tau, "0 < tau <= 1"));
    }
    Ok(())
}

fn check_d(d: f64) -> Result<()> {
    if !(d >= 0.0 && d.is_finite()) {
        return Err(domain("d", d, "d >= 0"));
    }
    Ok(())
}

pub fn beta(tau: f64, fit: &PersuasionFit) -> Result<f64> {
    fit.beta(tau)
}

/// Probability that a user offered `tau` moves `d` metres.
///
/// Capped at 1 when a user-supplied fit makes β negative.
pub fn move_probability(tau: f64, d: f64, fit: &PersuasionFit) -> Result<f64> {
    check_d(d)?;
    let b = fit.beta(tau)?;
    Ok(survival(b, d))
}

fn survival(beta: f64, d: f64) -> f64 {
    let p = (-beta * d).exp();
    if p > 1.0 {
        log::warn!("negative persuasion parameter beta={beta}; move probability clamped to 1");
        1.0
    } else {
        p
    }
}

/// Expected normalized revenue `(1 - tau) P(move)`.
pub fn unit_profit(tau: f64, d: f64, fit: &PersuasionFit) -> Result<f64> {
    Ok((1.0 - tau) * move_probability(tau, d, fit)?)
}

pub(crate) fn unit_profit_unchecked(tau: f64, d: f64, fit: &PersuasionFit) -> f64 {
    (1.0 - tau) * survival(fit.beta_unchecked(tau), d)
}

/// Profit-maximizing discount for a move of `d` metres: `k1 d / (k1 d - 1)`.
///
/// `d = 0` needs no persuasion and returns `(0, 1)`.
pub fn optimal_incentive(d: f64, fit: &PersuasionFit) -> Result<(f64, f64)> {
    check_d(d)?;
    Ok(optimal_incentive_unchecked(d, fit))
}

pub(crate) fn optimal_incentive_unchecked(d: f64, fit: &PersuasionFit) -> (f64, f64) {
    if d == 0.0 {
        return (0.0, 1.0);
    }
    let kd = fit.k1 * d;
    let tau = kd / (kd - 1.0);
    (tau, unit_profit_unchecked(tau, d, fit))
}

/// `d ↦ Π(τ*(d), d)`, the best achievable profit from a user `d` metres out.
pub fn optimal_profit(d: f64, fit: &PersuasionFit) -> Result<f64> {
    Ok(optimal_incentive(d, fit)?.1)
}

/// Discount offered to one user together with the move it asks for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncentiveOffer {
    pub user_id: usize,
    pub tau: f64,
    pub d: f64,
    pub accept_prob: f64,
    pub expected_profit: f64,
    /// Suggested move (dx, dy): toward the drone, length `d`.
    pub displacement: [f64; 2],
}

impl IncentiveOffer {
    /// Offer at `tau` for a move of `d` along `direction` (need not be normalized).
    pub fn new(user_id: usize, tau: f64, d: f64, direction: [f64; 2], fit: &PersuasionFit) -> Result<Self> {
        let accept_prob = move_probability(tau, d, fit)?;
        let norm = direction[0].hypot(direction[1]);
        let displacement = if norm > 0.0 {
            [direction[0] / norm * d, direction[1] / norm * d]
        } else {
            [0.0, 0.0]
        };
        Ok(Self {
            user_id,
            tau,
            d,
            accept_prob,
            expected_profit: (1.0 - tau) * accept_prob,
            displacement,
        })
    }

    /// Offer at the optimal discount for a move of `d > 0`.
    pub fn optimal(user_id: usize, d: f64, direction: [f64; 2], fit: &PersuasionFit) -> Result<Self> {
        if !(d > 0.0) {
            return Err(domain("d", d, "d > 0 for an offer"));
        }
        let (tau, _) = optimal_incentive(d, fit)?;
        Self::new(user_id, tau, d, direction, fit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn fit() -> PersuasionFit {
        PersuasionFit::default()
    }

    #[test]
    fn beta_matches_survey() {
        for (t, b) in SURVEY_POINTS {
            assert_abs_diff_eq!(beta(t, &fit()).unwrap(), b, epsilon = 5e-4);
        }
        assert_eq!(beta(1.0, &fit()).unwrap(), fit().k2);
        assert!(fit().survey_rmse() <= 1e-4);
    }

    #[test]
    fn beta_rejects_nonpositive_tau() {
        assert!(beta(0.0, &fit()).is_err());
        assert!(beta(-0.1, &fit()).is_err());
        assert!(beta(1.1, &fit()).is_err());
    }

    #[test]
    fn move_probability_values() {
        assert_eq!(move_probability(0.3, 0.0, &fit()).unwrap(), 1.0);
        let b = fit().k1 * 0.2f64.ln() + fit().k2;
        assert_abs_diff_eq!(
            move_probability(0.2, 100.0, &fit()).unwrap(),
            (-100.0 * b).exp(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(move_probability(0.2, 100.0, &fit()).unwrap(), 0.0867, epsilon = 1e-3);
        assert_abs_diff_eq!((-0.0082f64 * 50.0).exp(), 0.6637, epsilon = 1e-4);
        assert_abs_diff_eq!(move_probability(0.8, 50.0, &fit()).unwrap(), 0.6637, epsilon = 5e-3);
    }

    #[test]
    fn negative_beta_is_clamped() {
        let odd = PersuasionFit::new(-0.01, -0.05).unwrap();
        assert_eq!(move_probability(0.9, 30.0, &odd).unwrap(), 1.0);
    }

    #[test]
    fn optimal_incentive_examples() {
        let (t10, p10) = optimal_incentive(10.0, &fit()).unwrap();
        assert_abs_diff_eq!(t10, 0.1044, epsilon = 1e-3);
        assert_abs_diff_eq!(p10, 0.65, epsilon = 5e-3);
        let (t100, p100) = optimal_incentive(100.0, &fit()).unwrap();
        assert_abs_diff_eq!(t100, 0.5383, epsilon = 1e-3);
        assert_abs_diff_eq!(p100, 0.127, epsilon = 5e-3);
        assert_eq!(optimal_incentive(0.0, &fit()).unwrap(), (0.0, 1.0));
        assert_eq!(unit_profit(1.0, 37.0, &fit()).unwrap(), 0.0);
    }

    #[test]
    fn optimal_incentive_beats_grid() {
        let (_, best) = optimal_incentive(10.0, &fit()).unwrap();
        for i in 1..=10_000 {
            let t = i as f64 / 10_000.0;
            assert!(unit_profit(t, 10.0, &fit()).unwrap() <= best + 1e-12);
        }
    }

    #[test]
    fn optimum_monotone_in_distance() {
        let mut last = optimal_incentive(1.0, &fit()).unwrap();
        for d in (2..500).map(f64::from) {
            let cur = optimal_incentive(d, &fit()).unwrap();
            assert!(cur.0 > last.0 && cur.1 < last.1);
            last = cur;
        }
    }

    #[test]
    fn offer_is_coherent() {
        let o = IncentiveOffer::optimal(3, 10.0, [3.0, -4.0], &fit()).unwrap();
        assert_abs_diff_eq!(o.expected_profit, 0.65, epsilon = 5e-3);
        assert_abs_diff_eq!(o.displacement[0].hypot(o.displacement[1]), 10.0, epsilon = 1e-12);
        assert_abs_diff_eq!(o.displacement[0], 6.0, epsilon = 1e-12);
        assert!(IncentiveOffer::optimal(0, 0.0, [1.0, 0.0], &fit()).is_err());
    }
}
