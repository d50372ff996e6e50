//! Derivative-free scalar and low-dimensional search routines shared by the solvers.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Outcome of a bracketing root search.
#[derive(Debug, Clone, Copy)]
pub struct Bisection {
    pub root: f64,
    pub iterations: usize,
}

/// Bisection on the sign of `f`, which must differ at `lo` and `hi`.
///
/// Stops once the bracket is narrower than `tol` and returns its midpoint.
/// Returns `None` when the endpoints do not bracket a sign change.
pub fn bisect_sign<F>(f: F, mut lo: f64, mut hi: f64, tol: f64, max_iter: usize) -> Option<Bisection>
where
    F: Fn(f64) -> f64,
{
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Some(Bisection {
            root: lo,
            iterations: 0,
        });
    }
    if f_hi == 0.0 {
        return Some(Bisection {
            root: hi,
            iterations: 0,
        });
    }
    if f_lo.signum() == f_hi.signum() || !f_lo.is_finite() || !f_hi.is_finite() {
        return None;
    }
    let mut iterations = 0;
    while hi - lo > tol && iterations < max_iter {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        iterations += 1;
        if f_mid == 0.0 {
            return Some(Bisection { root: mid, iterations });
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Some(Bisection {
        root: 0.5 * (lo + hi),
        iterations,
    })
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
///
/// Returns `(x_max, f_max)`; the endpoints are compared too, so a monotone `f`
/// yields the better boundary.
pub fn golden_section_max<F>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let (lo0, hi0) = (a, b);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (b - a).abs() > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        }
    }
    let mut best = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    for x in [lo0, hi0] {
        let fx = f(x);
        if fx > best.1 {
            best = (x, fx);
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    /// Edge length of the initial simplex.
    pub initial_step: f64,
    /// Terminate once the simplex diameter falls below this.
    pub min_diameter: f64,
    pub max_iterations: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            initial_step: 10.0,
            min_diameter: 0.01,
            max_iterations: 500,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

/// Nelder-Mead maximization of `f` starting from `x0`.
///
/// `project` maps trial points back into the feasible set (e.g. clamps to a box).
/// The returned point is never worse than `f(project(x0))`.
pub fn nelder_mead_max<F, P>(f: F, project: P, x0: &[f64], opts: &NelderMeadOptions) -> NelderMeadResult
where
    F: Fn(&[f64]) -> f64,
    P: Fn(&mut [f64]),
{
    let n = x0.len();
    let mut evaluations = 0usize;
    let mut eval = |x: &mut Vec<f64>| {
        project(x);
        evaluations += 1;
        f(x)
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let mut start = x0.to_vec();
    let v0 = eval(&mut start);
    simplex.push((start, v0));
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += opts.initial_step;
        let v = eval(&mut p);
        simplex.push((p, v));
    }

    let mut iterations = 0;
    let mut converged = false;
    loop {
        // Best first, worst last.
        simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
        if diameter(&simplex) < opts.min_diameter {
            converged = true;
            break;
        }
        if iterations >= opts.max_iterations {
            break;
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..n)
            .map(|k| simplex[..n].iter().map(|(p, _)| p[k]).sum::<f64>() / n as f64)
            .collect();
        let worst = simplex[n].clone();
        let along = |t: f64| -> Vec<f64> { (0..n).map(|k| centroid[k] + t * (worst.0[k] - centroid[k])).collect() };

        let mut reflected = along(-1.0);
        let v_r = eval(&mut reflected);
        if v_r > simplex[0].1 {
            let mut expanded = along(-2.0);
            let v_e = eval(&mut expanded);
            simplex[n] = if v_e > v_r { (expanded, v_e) } else { (reflected, v_r) };
            continue;
        }
        if v_r > simplex[n - 1].1 {
            simplex[n] = (reflected, v_r);
            continue;
        }
        let (mut contracted, t) = if v_r > worst.1 {
            (along(-0.5), v_r)
        } else {
            (along(0.5), worst.1)
        };
        let v_c = eval(&mut contracted);
        if v_c > t {
            simplex[n] = (contracted, v_c);
            continue;
        }
        // Shrink toward the best vertex.
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let mut p: Vec<f64> = (0..n).map(|k| best[k] + 0.5 * (vertex.0[k] - best[k])).collect();
            let v = eval(&mut p);
            *vertex = (p, v);
        }
    }

    simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
    let (x, value) = simplex.swap_remove(0);
    NelderMeadResult {
        x,
        value,
        iterations,
        evaluations,
        converged,
    }
}

fn diameter(simplex: &[(Vec<f64>, f64)]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..simplex.len() {
        for j in (i + 1)..simplex.len() {
            let dist = simplex[i]
                .0
                .iter()
                .zip(&simplex[j].0)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            d = d.max(dist);
        }
    }
    d
}

/// Compass search: probe ±step along each axis, accept improvements, halve the
/// step when none helps. Never returns a worse point than `x0`.
pub fn compass_polish<F, P>(
    f: F,
    project: P,
    x0: &[f64],
    value0: f64,
    step: f64,
    min_step: f64,
) -> (Vec<f64>, f64, usize)
where
    F: Fn(&[f64]) -> f64,
    P: Fn(&mut [f64]),
{
    let mut x = x0.to_vec();
    let mut value = value0;
    let mut step = step;
    let mut evaluations = 0;
    while step >= min_step {
        let mut improved = false;
        for k in 0..x.len() {
            for sign in [1.0, -1.0] {
                let mut trial = x.clone();
                trial[k] += sign * step;
                project(&mut trial);
                evaluations += 1;
                let v = f(&trial);
                if v > value {
                    x = trial;
                    value = v;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (x, value, evaluations)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect_sign(|x| x * x - 2.0, 0.0, 2.0, 1e-12, 200).unwrap();
        assert!((r.root - 2f64.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn bisect_rejects_unbracketed() {
        assert!(bisect_sign(|x| x * x + 1.0, -1.0, 1.0, 1e-9, 100).is_none());
    }

    #[test]
    fn golden_section_parabola() {
        let (x, v) = golden_section_max(|x| -(x - 0.3).powi(2) + 1.0, 0.0, 1.0, 1e-9);
        assert!((x - 0.3).abs() < 1e-6);
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn golden_section_monotone_returns_endpoint() {
        let (x, _) = golden_section_max(|x| x, 0.0, 1.0, 1e-9);
        assert_eq!(x, 1.0);
    }

    #[test]
    fn nelder_mead_concave_bowl() {
        let f = |p: &[f64]| -((p[0] - 3.0).powi(2) + 2.0 * (p[1] + 1.0).powi(2));
        let opts = NelderMeadOptions {
            initial_step: 1.0,
            min_diameter: 1e-8,
            max_iterations: 2000,
        };
        let r = nelder_mead_max(f, |_| {}, &[0.0, 0.0], &opts);
        assert!(r.converged);
        assert!((r.x[0] - 3.0).abs() < 1e-6 && (r.x[1] + 1.0).abs() < 1e-6);
    }

    #[test]
    fn nelder_mead_respects_projection() {
        let f = |p: &[f64]| p[0] + p[1];
        let clamp = |p: &mut [f64]| {
            for v in p.iter_mut() {
                *v = v.clamp(-1.0, 1.0);
            }
        };
        let r = nelder_mead_max(f, clamp, &[0.0, 0.0], &NelderMeadOptions::default());
        assert!(r.x.iter().all(|v| (-1.0..=1.0).contains(v)));
        assert!((r.value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn compass_never_worsens() {
        let f = |p: &[f64]| -(p[0].abs() + p[1].abs());
        let (x, v, _) = compass_polish(f, |_| {}, &[0.3, -0.2], f(&[0.3, -0.2]), 0.1, 1e-6);
        assert!(v >= f(&[0.3, -0.2]));
        assert!(x[0].abs() < 1e-5 && x[1].abs() < 1e-5);
    }
}
