//! Piecewise-linear surrogates of the unit-profit surface.
//!
//! [`PwlGrid`] interpolates Π(τ, d) on a rectangular grid split into two
//! triangles per cell; only the three vertices of one triangle ever carry
//! weight. [`Pwl1D`] approximates the profit-of-distance curve
//! d ↦ Π(τ*(d), d) with free breakpoints; at most two adjacent breakpoints
//! carry weight.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result, SncError};
use crate::search::{nelder_mead_max, NelderMeadOptions};
use crate::uil::{optimal_incentive_unchecked, unit_profit, PersuasionFit};

/// Which half of a grid cell a query falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Triangle {
    /// Upper-left half: vertices (k, j), (k, j+1), (k+1, j+1).
    T1,
    /// Lower-right half: vertices (k, j), (k+1, j), (k+1, j+1).
    T2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TriangleApprox {
    pub value: f64,
    pub triangle: Triangle,
    /// `(tau index, d index)` of the three active vertices.
    pub vertices: [(usize, usize); 3],
    pub weights: [f64; 3],
}

/// Best point of the triangulated surface on the half-plane `d >= d_min`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridOptimum {
    pub value: f64,
    pub tau: f64,
    pub d: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PwlGrid {
    pub tau_vertices: Vec<f64>,
    pub d_vertices: Vec<f64>,
    /// `values[k][j] = Π(tau_vertices[k], d_vertices[j])`.
    pub values: Vec<Vec<f64>>,
    #[serde(skip)]
    suffix_best: Vec<(f64, usize, usize)>,
}

fn check_increasing(name: &str, v: &[f64]) -> Result<()> {
    if v.len() < 2 {
        return Err(SncError::InvalidParameter(format!(
            "{name}: need at least two vertices"
        )));
    }
    if v.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(SncError::InvalidParameter(format!(
            "{name}: vertices must be strictly increasing"
        )));
    }
    Ok(())
}

/// Index `i` of the interval `[v[i], v[i+1]]` holding `x`, with `x` inside `[v[0], v[last]]`.
fn locate(v: &[f64], x: f64) -> usize {
    let i = v.partition_point(|&e| e <= x);
    i.saturating_sub(1).min(v.len() - 2)
}

/// Evaluates Π on the grid vertices.
pub fn build_grid(tau_vertices: &[f64], d_vertices: &[f64], fit: &PersuasionFit) -> Result<PwlGrid> {
    check_increasing("tau vertices", tau_vertices)?;
    check_increasing("d vertices", d_vertices)?;
    if !(tau_vertices[0] > 0.0 && tau_vertices[tau_vertices.len() - 1] <= 1.0) {
        return Err(SncError::InvalidParameter("tau vertices must lie in (0, 1]".into()));
    }
    if !(d_vertices[0] > 0.0 && d_vertices[d_vertices.len() - 1].is_finite()) {
        return Err(SncError::InvalidParameter(
            "d vertices must be positive and finite".into(),
        ));
    }
    let values = tau_vertices
        .iter()
        .map(|&t| {
            d_vertices
                .iter()
                .map(|&d| unit_profit(t, d, fit))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut grid = PwlGrid {
        tau_vertices: tau_vertices.to_vec(),
        d_vertices: d_vertices.to_vec(),
        values,
        suffix_best: Vec::new(),
    };
    grid.index();
    Ok(grid)
}

impl PwlGrid {
    pub fn from_parts(tau_vertices: Vec<f64>, d_vertices: Vec<f64>, fit: &PersuasionFit) -> Result<Self> {
        build_grid(&tau_vertices, &d_vertices, fit)
    }

    fn index(&mut self) {
        let n = self.d_vertices.len();
        self.suffix_best = vec![(f64::NEG_INFINITY, 0, 0); n];
        let mut best = (f64::NEG_INFINITY, 0, 0);
        for j in (0..n).rev() {
            for (k, row) in self.values.iter().enumerate() {
                if row[j] > best.0 {
                    best = (row[j], k, j);
                }
            }
            self.suffix_best[j] = best;
        }
    }

    pub fn tau_range(&self) -> (f64, f64) {
        (self.tau_vertices[0], *self.tau_vertices.last().unwrap())
    }

    pub fn d_range(&self) -> (f64, f64) {
        (self.d_vertices[0], *self.d_vertices.last().unwrap())
    }

    pub fn contains(&self, tau: f64, d: f64) -> bool {
        let (t0, t1) = self.tau_range();
        let (d0, d1) = self.d_range();
        tau >= t0 && tau <= t1 && d >= d0 && d <= d1
    }

    /// Triangle-method interpolation at `(tau, d)`.
    pub fn triangle_approx(&self, tau: f64, d: f64) -> Result<TriangleApprox> {
        if !self.contains(tau, d) {
            return Err(SncError::InvalidParameter(format!(
                "query ({tau}, {d}) outside grid {:?} x {:?}",
                self.tau_range(),
                self.d_range()
            )));
        }
        let k = locate(&self.tau_vertices, tau);
        let j = locate(&self.d_vertices, d);
        let s = (tau - self.tau_vertices[k]) / (self.tau_vertices[k + 1] - self.tau_vertices[k]);
        let t = (d - self.d_vertices[j]) / (self.d_vertices[j + 1] - self.d_vertices[j]);
        let (triangle, vertices, weights) = if t > s {
            (Triangle::T1, [(k, j), (k, j + 1), (k + 1, j + 1)], [1.0 - t, t - s, s])
        } else {
            (Triangle::T2, [(k, j), (k + 1, j), (k + 1, j + 1)], [1.0 - s, s - t, t])
        };
        let value = vertices
            .iter()
            .zip(weights)
            .map(|(&(a, b), w)| w * self.values[a][b])
            .sum();
        Ok(TriangleApprox {
            value,
            triangle,
            vertices,
            weights,
        })
    }

    /// Maximum of the surface over grid points with `d >= d_min`.
    ///
    /// Moves shorter than the first d vertex are served at that vertex. Returns
    /// `None` when `d_min` exceeds the last d vertex.
    pub fn best_feasible(&self, d_min: f64) -> Option<GridOptimum> {
        let (d0, d_last) = self.d_range();
        if d_min > d_last {
            return None;
        }
        let d_min = d_min.max(d0);
        let j0 = self.d_vertices.partition_point(|&e| e < d_min);
        let (v, k, j) = self.suffix_best[j0];
        let mut best = GridOptimum {
            value: v,
            tau: self.tau_vertices[k],
            d: self.d_vertices[j],
        };
        if j0 == 0 || self.d_vertices[j0] == d_min {
            return Some(best);
        }
        // Cut through row j: cell edges and cell diagonals.
        let j = j0 - 1;
        let t = (d_min - self.d_vertices[j]) / (self.d_vertices[j + 1] - self.d_vertices[j]);
        let m = self.tau_vertices.len();
        let mut consider = |value: f64, tau: f64| {
            if value > best.value {
                best = GridOptimum { value, tau, d: d_min };
            }
        };
        for k in 0..m {
            let edge = (1.0 - t) * self.values[k][j] + t * self.values[k][j + 1];
            consider(edge, self.tau_vertices[k]);
            if k + 1 < m {
                let diag = (1.0 - t) * self.values[k][j] + t * self.values[k + 1][j + 1];
                let tau = self.tau_vertices[k] + t * (self.tau_vertices[k + 1] - self.tau_vertices[k]);
                consider(diag, tau);
            }
        }
        Some(best)
    }

    /// Largest |Π − surface| over a `probes × probes` sample of every cell.
    pub fn max_secant_error(&self, fit: &PersuasionFit, probes: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..self.tau_vertices.len() - 1 {
            for j in 0..self.d_vertices.len() - 1 {
                for a in 0..=probes {
                    for b in 0..=probes {
                        let tau = self.tau_vertices[k]
                            + (self.tau_vertices[k + 1] - self.tau_vertices[k]) * a as f64 / probes as f64;
                        let d = self.d_vertices[j]
                            + (self.d_vertices[j + 1] - self.d_vertices[j]) * b as f64 / probes as f64;
                        let approx = self.triangle_approx(tau, d).unwrap().value;
                        let exact = unit_profit(tau, d, fit).unwrap();
                        worst = worst.max((approx - exact).abs());
                    }
                }
            }
        }
        worst
    }

    /// Largest gap between the exact per-user optimum and [`Self::best_feasible`]
    /// over `samples` distances in `[0, d_max]`.
    pub fn max_envelope_error(&self, fit: &PersuasionFit, d_max: f64, samples: usize) -> f64 {
        (0..=samples)
            .map(|i| {
                let d = d_max * i as f64 / samples as f64;
                let exact = optimal_incentive_unchecked(d, fit).1;
                let approx = self.best_feasible(d).map_or(0.0, |o| o.value);
                (exact - approx).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Continuous piecewise-linear curve through `(t_j, node_values[j])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pwl1D {
    pub breakpoints: Vec<f64>,
    pub node_values: Vec<f64>,
    pub slopes: Vec<f64>,
    pub intercepts: Vec<f64>,
    pub rmse: f64,
    pub samples: usize,
}

/// Value of a [`Pwl1D`] with its interpolation weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Sos2Eval {
    pub value: f64,
    /// One weight per breakpoint; at most two adjacent entries are nonzero.
    pub lambda: Vec<f64>,
    pub segment: usize,
}

impl Pwl1D {
    pub fn from_nodes(breakpoints: Vec<f64>, node_values: Vec<f64>) -> Result<Self> {
        check_increasing("breakpoints", &breakpoints)?;
        if node_values.len() != breakpoints.len() {
            return Err(SncError::InvalidParameter(
                "one node value per breakpoint required".into(),
            ));
        }
        let (slopes, intercepts) = breakpoints
            .windows(2)
            .zip(node_values.windows(2))
            .map(|(t, v)| {
                let p = (v[1] - v[0]) / (t[1] - t[0]);
                (p, v[0] - p * t[0])
            })
            .unzip();
        Ok(Self {
            breakpoints,
            node_values,
            slopes,
            intercepts,
            rmse: f64::NAN,
            samples: 0,
        })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.breakpoints[0], *self.breakpoints.last().unwrap())
    }

    pub fn eval(&self, d: f64) -> Result<Sos2Eval> {
        let (lo, hi) = self.domain();
        if !(d >= lo && d <= hi) {
            return Err(domain("d", d, "inside the breakpoint range"));
        }
        let j = locate(&self.breakpoints, d);
        let (t0, t1) = (self.breakpoints[j], self.breakpoints[j + 1]);
        let w = (d - t0) / (t1 - t0);
        let mut lambda = vec![0.0; self.breakpoints.len()];
        lambda[j] = 1.0 - w;
        lambda[j + 1] = w;
        let value = (1.0 - w) * self.node_values[j] + w * self.node_values[j + 1];
        Ok(Sos2Eval {
            value,
            lambda,
            segment: j,
        })
    }

    /// Value at `d`, clamped to the domain.
    pub fn value(&self, d: f64) -> f64 {
        let (lo, hi) = self.domain();
        let d = d.clamp(lo, hi);
        let j = locate(&self.breakpoints, d);
        self.slopes[j] * d + self.intercepts[j]
    }
}

pub fn eval_pwl1d(fit: &Pwl1D, d: f64) -> Result<Sos2Eval> {
    fit.eval(d)
}

/// How node values are chosen once the breakpoints are fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeFit {
    /// Node values equal the target at each breakpoint.
    Interpolate,
    /// Least squares over the samples, with the first node held at the target.
    #[default]
    LeastSquares,
}

/// Uniform samples of `target` on `[0, d_u]`.
struct Samples {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl Samples {
    fn new(target: &dyn Fn(f64) -> f64, d_u: f64, count: usize) -> Self {
        let x: Vec<f64> = (0..count).map(|i| d_u * i as f64 / (count - 1) as f64).collect();
        let y = x.iter().map(|&v| target(v)).collect();
        Self { x, y }
    }

    /// Segment index and weight of the right node for every sample.
    fn hats(&self, t: &[f64]) -> Vec<(usize, f64)> {
        let mut seg = 0;
        self.x
            .iter()
            .map(|&x| {
                while seg + 2 < t.len() && x > t[seg + 1] {
                    seg += 1;
                }
                let span = t[seg + 1] - t[seg];
                (
                    seg,
                    if span > 0.0 {
                        ((x - t[seg]) / span).clamp(0.0, 1.0)
                    } else {
                        0.0
                    },
                )
            })
            .collect()
    }

    /// RMSE of the interpolant through `(t, v)`, `t` sorted and spanning the samples.
    fn rmse(&self, t: &[f64], v: &[f64]) -> f64 {
        let sse: f64 = self
            .hats(t)
            .iter()
            .zip(&self.y)
            .map(|(&(seg, w), &y)| {
                let e = v[seg] + w * (v[seg + 1] - v[seg]) - y;
                e * e
            })
            .sum();
        (sse / self.x.len() as f64).sqrt()
    }

    fn node_values(&self, t: &[f64], target: &dyn Fn(f64) -> f64, mode: NodeFit) -> Vec<f64> {
        let exact: Vec<f64> = t.iter().map(|&x| target(x)).collect();
        match mode {
            NodeFit::Interpolate => exact,
            NodeFit::LeastSquares => self.least_squares(t, exact[0]).unwrap_or(exact),
        }
    }

    /// Continuous PWL regression on knots `t` with `v[0] = v0` fixed.
    fn least_squares(&self, t: &[f64], v0: f64) -> Option<Vec<f64>> {
        let n = t.len();
        // Tridiagonal normal equations in the hat-function basis.
        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n - 1];
        let mut rhs = vec![0.0; n];
        for (&(seg, w), &y) in self.hats(t).iter().zip(&self.y) {
            let (a, b) = (1.0 - w, w);
            diag[seg] += a * a;
            diag[seg + 1] += b * b;
            off[seg] += a * b;
            rhs[seg] += a * y;
            rhs[seg + 1] += b * y;
        }
        // Eliminate the pinned first node.
        rhs[1] -= off[0] * v0;
        let (d, o, r) = (&mut diag[1..], &off[1..], &mut rhs[1..]);
        let m = d.len();
        let mut c = vec![0.0; m];
        for i in 0..m {
            let denom = d[i] - if i > 0 { o[i - 1] * c[i - 1] } else { 0.0 };
            if denom.abs() < 1e-300 {
                return None;
            }
            if i + 1 < m {
                c[i] = o[i] / denom;
            }
            r[i] = (r[i] - if i > 0 { o[i - 1] * r[i - 1] } else { 0.0 }) / denom;
        }
        for i in (0..m.saturating_sub(1)).rev() {
            r[i] -= c[i] * r[i + 1];
        }
        let mut v = Vec::with_capacity(n);
        v.push(v0);
        v.extend_from_slice(r);
        Some(v)
    }
}

pub const DEFAULT_PWL_SAMPLES: usize = 2000;

/// Fits `n` breakpoints on `[0, d_u]` to `target`, minimizing sampled RMSE.
///
/// End breakpoints are pinned to `0` and `d_u`. Interior breakpoints come from
/// a multistart simplex search followed by coordinate moves of ±0.1 % of `d_u`
/// until none improves the fit; node values follow `mode`.
pub fn fit_pwl1d(target: &dyn Fn(f64) -> f64, n: usize, d_u: f64, samples: usize) -> Result<Pwl1D> {
    fit_pwl1d_with(target, n, d_u, samples, NodeFit::default())
}

pub fn fit_pwl1d_with(target: &dyn Fn(f64) -> f64, n: usize, d_u: f64, samples: usize, mode: NodeFit) -> Result<Pwl1D> {
    if n < 2 {
        return Err(SncError::InvalidParameter("need at least two breakpoints".into()));
    }
    if !(d_u > 0.0 && d_u.is_finite()) {
        return Err(domain("d_u", d_u, "d_u > 0"));
    }
    if n > samples {
        return Err(SncError::TooFewSamples {
            samples,
            breakpoints: n,
        });
    }
    let data = Samples::new(target, d_u, samples.max(2));
    let min_gap = 1e-6 * d_u;

    // Interior breakpoints, sorted and kept apart, mapped to a full knot vector.
    let knots = |interior: &[f64]| -> Vec<f64> {
        let mut t = Vec::with_capacity(n);
        t.push(0.0);
        t.extend_from_slice(interior);
        t.push(d_u);
        t
    };
    let project = |x: &mut [f64]| {
        for v in x.iter_mut() {
            *v = v.clamp(min_gap, d_u - min_gap);
        }
        x.sort_by(f64::total_cmp);
        for i in 1..x.len() {
            if x[i] < x[i - 1] + min_gap {
                x[i] = x[i - 1] + min_gap;
            }
        }
    };
    let score = |interior: &[f64]| -> f64 {
        let t = knots(interior);
        data.rmse(&t, &data.node_values(&t, target, mode))
    };

    let m = n - 2;
    let mut best: (Vec<f64>, f64) = (Vec::new(), score(&[]));
    if m > 0 {
        let mut starts: Vec<Vec<f64>> = [1.0, 2.0, 3.0]
            .iter()
            .map(|&p| (1..=m).map(|i| d_u * (i as f64 / (m + 1) as f64).powf(p)).collect())
            .collect();
        let mut rng = ChaCha20Rng::seed_from_u64(0x5eed);
        for _ in 0..8 {
            starts.push((0..m).map(|_| rng.random_range(0.0..d_u)).collect());
        }
        let opts = NelderMeadOptions {
            initial_step: 0.05 * d_u,
            min_diameter: 1e-5 * d_u,
            max_iterations: 4000,
        };
        best = (Vec::new(), f64::INFINITY);
        for mut x0 in starts {
            project(&mut x0);
            let r = nelder_mead_max(|x| -score(x), project, &x0, &opts);
            if -r.value < best.1 {
                best = (r.x, -r.value);
            }
        }
        // Certification sweep.
        let step = 1e-3 * d_u;
        loop {
            let mut improved = false;
            for i in 0..m {
                for sign in [1.0, -1.0] {
                    let mut trial = best.0.clone();
                    trial[i] += sign * step;
                    project(&mut trial);
                    let s = score(&trial);
                    if s < best.1 {
                        best = (trial, s);
                        improved = true;
                    }
                }
            }
            if !improved {
                break;
            }
        }
    }
    let t = knots(&best.0);
    let v = data.node_values(&t, target, mode);
    let mut out = Pwl1D::from_nodes(t, v)?;
    out.rmse = best.1;
    out.samples = data.x.len();
    Ok(out)
}

/// [`fit_pwl1d`] applied to the optimal-profit curve d ↦ Π(τ*(d), d).
pub fn fit_profit_curve(fit: &PersuasionFit, n: usize, d_u: f64, samples: usize) -> Result<Pwl1D> {
    fit_profit_curve_with(fit, n, d_u, samples, NodeFit::default())
}

pub fn fit_profit_curve_with(fit: &PersuasionFit, n: usize, d_u: f64, samples: usize, mode: NodeFit) -> Result<Pwl1D> {
    let fit = *fit;
    fit_pwl1d_with(&move |d| optimal_incentive_unchecked(d, &fit).1, n, d_u, samples, mode)
}

/// RMSE of `curve` against `target` at `samples` uniform points of its domain.
pub fn rmse_against(curve: &Pwl1D, target: &dyn Fn(f64) -> f64, samples: usize) -> f64 {
    let (_, hi) = curve.domain();
    let data = Samples::new(target, hi, samples);
    data.rmse(&curve.breakpoints, &curve.node_values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn table_grid() -> PwlGrid {
        build_grid(
            &[0.05, 0.1, 0.2, 0.9],
            &[5.0, 10.0, 20.0, 40.0, 200.0],
            &PersuasionFit::default(),
        )
        .unwrap()
    }

    #[test]
    fn grid_shape_and_values() {
        let g = table_grid();
        assert_eq!(g.values.len(), 4);
        assert!(g.values.iter().all(|r| r.len() == 5));
        let fit = PersuasionFit::default();
        for (k, &t) in g.tau_vertices.iter().enumerate() {
            for (j, &d) in g.d_vertices.iter().enumerate() {
                assert_eq!(g.values[k][j], unit_profit(t, d, &fit).unwrap());
            }
        }
    }

    #[test]
    fn grid_rejects_bad_vertices() {
        let fit = PersuasionFit::default();
        assert!(build_grid(&[0.2, 0.1], &[1.0, 2.0], &fit).is_err());
        assert!(build_grid(&[0.0, 0.1], &[1.0, 2.0], &fit).is_err());
        assert!(build_grid(&[0.1, 0.2], &[0.0, 2.0], &fit).is_err());
        assert!(build_grid(&[0.1], &[1.0, 2.0], &fit).is_err());
    }

    #[test]
    fn exact_at_vertices() {
        let g = table_grid();
        for (k, &t) in g.tau_vertices.iter().enumerate() {
            for (j, &d) in g.d_vertices.iter().enumerate() {
                let a = g.triangle_approx(t, d).unwrap();
                assert_abs_diff_eq!(a.value, g.values[k][j], epsilon = 1e-15);
                let w: f64 = a
                    .vertices
                    .iter()
                    .zip(a.weights)
                    .filter(|(v, _)| **v == (k, j))
                    .map(|(_, w)| w)
                    .sum();
                assert_abs_diff_eq!(w, 1.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn diagonal_midpoint_averages() {
        let g = table_grid();
        let a = g.triangle_approx(0.15, 15.0).unwrap();
        assert_abs_diff_eq!(a.value, 0.5 * (g.values[1][1] + g.values[2][2]), epsilon = 1e-15);
    }

    #[test]
    fn out_of_rectangle_is_an_error() {
        let g = table_grid();
        assert!(g.triangle_approx(0.01, 50.0).is_err());
        assert!(g.triangle_approx(0.5, 201.0).is_err());
    }

    #[test]
    fn best_feasible_matches_dense_scan() {
        let g = table_grid();
        for d_min in [0.0, 3.0, 5.0, 7.3, 12.0, 20.0, 33.0, 150.0, 200.0] {
            let best = g.best_feasible(d_min).unwrap();
            let lo = d_min.max(5.0);
            let mut scan: f64 = 0.0;
            for a in 0..=400 {
                for b in 0..=400 {
                    let tau = 0.05 + 0.85 * a as f64 / 400.0;
                    let d = lo + (200.0 - lo) * b as f64 / 400.0;
                    scan = scan.max(g.triangle_approx(tau, d).unwrap().value);
                }
            }
            assert!(best.value >= scan - 1e-12, "d_min={d_min}");
            assert!(best.d >= lo - 1e-12);
            assert_abs_diff_eq!(
                g.triangle_approx(best.tau, best.d).unwrap().value,
                best.value,
                epsilon = 1e-12
            );
        }
        assert!(g.best_feasible(200.5).is_none());
    }

    #[test]
    fn linear_target_fits_exactly() {
        let f = fit_pwl1d(&|d| 1.0 - 0.002 * d, 3, 200.0, 500).unwrap();
        assert!(f.rmse < 1e-12);
    }

    #[test]
    fn profit_curve_fits_improve_with_breakpoints() {
        let fit = PersuasionFit::default();
        let f3 = fit_profit_curve(&fit, 3, 200.0, DEFAULT_PWL_SAMPLES).unwrap();
        let f4 = fit_profit_curve(&fit, 4, 200.0, DEFAULT_PWL_SAMPLES).unwrap();
        assert!(f3.breakpoints[1] > 0.0 && f3.breakpoints[1] < 200.0);
        assert!(f4.rmse <= f3.rmse);
        assert_abs_diff_eq!(f3.node_values[0], 1.0, epsilon = 0.02);
        for w in f4.breakpoints.windows(2) {
            assert!(w[1] > w[0]);
        }
        for j in 0..f4.slopes.len() - 1 {
            let t = f4.breakpoints[j + 1];
            assert_abs_diff_eq!(
                f4.slopes[j] * t + f4.intercepts[j],
                f4.slopes[j + 1] * t + f4.intercepts[j + 1],
                epsilon = 1e-9
            );
        }
    }

    #[test]
    fn too_many_breakpoints() {
        assert!(matches!(
            fit_pwl1d(&|d| d, 10, 1.0, 5),
            Err(SncError::TooFewSamples { .. })
        ));
    }

    #[test]
    fn sos2_weights() {
        let f = Pwl1D::from_nodes(vec![0.0, 10.0, 50.0, 200.0], vec![1.0, 0.7, 0.3, 0.05]).unwrap();
        let e = f.eval(10.0).unwrap();
        assert_abs_diff_eq!(e.value, 0.7, epsilon = 1e-15);
        assert_eq!(e.lambda.iter().filter(|&&l| l != 0.0).count(), 1);
        let e = f.eval(30.0).unwrap();
        assert_abs_diff_eq!(e.lambda[1], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(e.lambda[2], 0.5, epsilon = 1e-15);
        let e = f.eval(120.0).unwrap();
        assert_abs_diff_eq!(e.value, f.slopes[2] * 120.0 + f.intercepts[2], epsilon = 1e-12);
        assert!(f.eval(-1.0).is_err() && f.eval(201.0).is_err());
    }
}
