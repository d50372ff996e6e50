mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use snc_core::harness::{generate_users_seeded, score, solve_methods, DEFAULT_METHODS};
use snc_core::jsnc::{brute_force_center, exact_profit, solve_exact, Objective};
use snc_core::pwl::{fit_profit_curve, NodeFit};
use snc_core::regional::{p_cov_uil, regional_profit, RegionalModel};
use snc_core::uil::{beta, optimal_incentive, unit_profit, PersuasionFit};
use snc_core::usnc::{brute_force_usnc, solve_usnc};

use common::{p_cov_uil_quadrature, paper_default, simpson};

#[test]
fn optimal_incentive_matches_dense_grid() {
    let fit = PersuasionFit::default();
    for d in [0.5, 3.0, 10.0, 37.0, 100.0, 250.0, 800.0] {
        let grid_best = (1..=100_000)
            .map(|i| unit_profit(i as f64 / 100_000.0, d, &fit).unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        let (_, best) = optimal_incentive(d, &fit).unwrap();
        assert!(best >= grid_best - 1e-12 && best - grid_best < 1e-6, "d = {d}");
    }
}

#[test]
fn triangle_surface_matches_plane_through_its_vertices() {
    let p = paper_default();
    let g = &p.grid;
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    for _ in 0..2000 {
        let k = rng.random_range(0..g.tau_vertices.len() - 1);
        let j = rng.random_range(0..g.d_vertices.len() - 1);
        let (s, t): (f64, f64) = (rng.random(), rng.random());
        let tau = g.tau_vertices[k] + s * (g.tau_vertices[k + 1] - g.tau_vertices[k]);
        let d = g.d_vertices[j] + t * (g.d_vertices[j + 1] - g.d_vertices[j]);
        let a = g.triangle_approx(tau, d).unwrap();
        // Plane through the three chosen vertices, solved directly.
        let v: Vec<(f64, f64, f64)> = a
            .vertices
            .iter()
            .map(|&(i, l)| (g.tau_vertices[i], g.d_vertices[l], g.values[i][l]))
            .collect();
        let (ux, uy, uz) = (v[1].0 - v[0].0, v[1].1 - v[0].1, v[1].2 - v[0].2);
        let (wx, wy, wz) = (v[2].0 - v[0].0, v[2].1 - v[0].1, v[2].2 - v[0].2);
        let (nx, ny, nz) = (uy * wz - uz * wy, uz * wx - ux * wz, ux * wy - uy * wx);
        let plane = v[0].2 - (nx * (tau - v[0].0) + ny * (d - v[0].1)) / nz;
        assert!((a.value - plane).abs() < 1e-10);
    }
}

#[test]
fn univariate_fit_matches_segment_formula() {
    let fit = PersuasionFit::default();
    for mode in [NodeFit::LeastSquares, NodeFit::Interpolate] {
        let c = snc_core::pwl::fit_profit_curve_with(&fit, 4, 200.0, 1000, mode).unwrap();
        assert_eq!(c.breakpoints[0], 0.0);
        assert_eq!(*c.breakpoints.last().unwrap(), 200.0);
        for i in 0..=400 {
            let x = 0.5 * i as f64;
            let j = c.breakpoints.windows(2).position(|w| x >= w[0] && x <= w[1]).unwrap();
            let (t0, t1) = (c.breakpoints[j], c.breakpoints[j + 1]);
            let want = c.node_values[j] + (c.node_values[j + 1] - c.node_values[j]) * (x - t0) / (t1 - t0);
            assert!((c.value(x) - want).abs() < 1e-12);
        }
    }
    let c = fit_profit_curve(&fit, 3, 200.0, 2000).unwrap();
    assert!((c.value(0.0) - 1.0).abs() <= 0.02);
}

#[test]
fn band_probability_matches_quadrature() {
    let fit = PersuasionFit::default();
    for (radius, world, d_u, tau) in [
        (200.0, 2000.0, 1800.0, 0.5),
        (50.0, 300.0, 10.0, 0.05),
        (500.0, 20_000.0, 700.0, 0.9),
    ] {
        let m = RegionalModel::new(radius, world, d_u, 0.0, fit).unwrap();
        let closed = p_cov_uil(&m, tau).unwrap();
        let quad = p_cov_uil_quadrature(radius, world, d_u, beta(tau, &fit).unwrap());
        assert!((closed - quad).abs() <= 1e-9 * quad);
    }
}

#[test]
fn regional_profit_matches_expectation_over_disk() {
    let fit = PersuasionFit::default();
    let (radius, world, d_u, tau) = (150.0, 900.0, 400.0, 0.4);
    let m = RegionalModel::new(radius, world, d_u, 0.0, fit).unwrap();
    let b = beta(tau, &fit).unwrap();
    let density = |r: f64| 2.0 * r / (world * world);
    let revenue = |r: f64| {
        if r <= radius {
            1.0
        } else if r <= radius + d_u {
            (1.0 - tau) * (-b * (r - radius)).exp()
        } else {
            0.0
        }
    };
    let f = |r: f64| density(r) * revenue(r);
    let quad = simpson(&f, 0.0, radius, 1e-14) + simpson(&f, radius, world, 1e-14);
    assert!((regional_profit(&m, tau).unwrap().profit - quad).abs() < 1e-9);
}

#[test]
fn usnc_matches_brute_force_grid() {
    let p = paper_default();
    for seed in 0..8 {
        let users = generate_users_seeded(&p.scenario.world, 12, 500 + seed);
        let count = solve_usnc(&users, &p.bounds, &p.model).unwrap().assignment.count();
        let (grid, _) = brute_force_usnc(&users, &p.bounds, p.gamma_star(), 2.0);
        assert!(count >= grid, "seed {seed}: {count} < {grid}");
        assert!(count <= users.len());
    }
}

#[test]
fn exact_oracle_bounds_every_method() {
    let p = paper_default();
    for seed in 0..6 {
        let users = generate_users_seeded(&p.scenario.world, 15, 900 + seed);
        let (c, grid_best) = brute_force_center(
            &users,
            &p.bounds,
            p.gamma_star(),
            p.d_u(),
            p.fit(),
            2.0,
            Objective::Exact,
        );
        let exact = solve_exact(&users, &p.bounds, &p.model, p.d_u(), p.fit(), &p.search).unwrap();
        let oracle = grid_best.max(exact.objective);
        assert!(
            exact.objective >= grid_best - 1e-6,
            "seed {seed}: multistart below grid"
        );
        assert!((exact_profit(c, &users, p.gamma_star(), p.d_u(), p.fit()).objective - grid_best).abs() < 1e-9);
        for (m, sol) in solve_methods(&users, &p, &DEFAULT_METHODS) {
            let s = score(&sol.unwrap(), &users, &p);
            assert!(s <= oracle + 1e-6, "seed {seed}: {m} scored {s} above oracle {oracle}");
        }
    }
}
