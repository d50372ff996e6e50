mod common;

use snc_core::harness::{
    generate_users_seeded, run_density_sweep, run_monte_carlo, run_toy_scenario, Scenario, ToyLayout, UsersSpec, World,
    DEFAULT_METHODS,
};
use snc_core::Method;

use common::paper_default;

#[test]
fn generated_users_stay_in_the_world() {
    let disk = World::Disk { radius: 700.0 };
    assert!(generate_users_seeded(&disk, 0, 1).is_empty());
    let users = generate_users_seeded(&disk, 2000, 1);
    assert!(users.iter().all(|u| u.x * u.x + u.y * u.y <= 700.0 * 700.0));
    assert_eq!(users, generate_users_seeded(&disk, 2000, 1));
    assert_ne!(users, generate_users_seeded(&disk, 2000, 2));
}

#[test]
fn scenario_json_round_trips() {
    for name in Scenario::PRESETS {
        let s = Scenario::preset(name).unwrap();
        let back = Scenario::from_json(&s.to_json()).unwrap();
        assert_eq!(s, back);
        assert_eq!(s.hash(), back.hash());
    }
    let mut moved = Scenario::paper_default();
    moved.d_u = 150.0;
    assert_ne!(moved.hash(), Scenario::paper_default().hash());
}

#[test]
fn scenario_rejects_bad_input() {
    let mut s = Scenario::paper_default();
    s.users = UsersSpec::Explicit {
        points: vec![[800.0, 0.0]],
    };
    assert!(Scenario::from_json(&s.to_json()).is_err());
    let mut s = Scenario::paper_default();
    s.schema_version = 99;
    assert!(Scenario::from_json(&s.to_json()).is_err());
    assert!(Scenario::from_json("{\"name\": 1}").is_err());
    assert!(Scenario::preset("nowhere").is_err());
}

#[test]
fn monte_carlo_replays_bit_for_bit() {
    let p = paper_default();
    let strip = |r: &snc_core::harness::ExperimentReport| {
        r.trials
            .iter()
            .map(|t| t.outcomes.iter().map(|o| (o.score, o.covered)).collect::<Vec<_>>())
            .collect::<Vec<_>>()
    };
    let a = run_monte_carlo(&p, 15, 6, &DEFAULT_METHODS, 42).unwrap();
    let b = run_monte_carlo(&p, 15, 6, &DEFAULT_METHODS, 42).unwrap();
    assert_eq!(strip(&a), strip(&b));
    assert_eq!(a.master_seed, 42);
    assert_eq!(a.scenario_hash, p.hash);
    assert!(a.trials.windows(2).all(|w| w[0].trial < w[1].trial));
    for s in &a.summaries {
        assert_eq!(s.failures, 0);
        assert!(s.cdf.windows(2).all(|w| w[0].0 <= w[1].0 && w[0].1 <= w[1].1));
        assert_eq!(s.cdf.last().unwrap().1, 1.0);
    }
}

fn sweep() -> Vec<snc_core::harness::ExperimentReport> {
    let p = paper_default();
    let counts: Vec<usize> = (10..=27).collect();
    let reports = run_density_sweep(&p, &counts, 10, &[Method::NoUil, Method::Usnc, Method::SemiJsnc], 0).unwrap();
    assert_eq!(reports.len(), counts.len());
    assert!(reports.windows(2).all(|w| w[0].density < w[1].density));
    reports
}

#[test]
fn density_sweep_semi_jsnc_dominates_usnc() {
    for r in sweep() {
        let (base, usnc, semi) = (
            r.mean(Method::NoUil).unwrap(),
            r.mean(Method::Usnc).unwrap(),
            r.mean(Method::SemiJsnc).unwrap(),
        );
        assert!(semi > usnc, "{} users: semi {semi} vs USNC {usnc}", r.user_count);
        assert!(usnc >= base);
    }
}

#[test]
fn density_sweep_usnc_within_five_percent_of_baseline() {
    for r in sweep() {
        let (base, usnc) = (r.mean(Method::NoUil).unwrap(), r.mean(Method::Usnc).unwrap());
        assert!(
            (usnc - base) / base < 0.05,
            "{} users: USNC {usnc} vs baseline {base}",
            r.user_count
        );
    }
}

#[test]
fn toy_layout_is_configurable() {
    let r = run_toy_scenario(&ToyLayout::default()).unwrap();
    assert!((r.gamma_star - 200.0).abs() < 1e-6);
    assert_eq!(r.usnc.covered_count(), 3);
    let wide = ToyLayout {
        anchor_separation: 1000.0,
        ..ToyLayout::default()
    };
    let r = run_toy_scenario(&wide).unwrap();
    assert!(
        (r.jsnc_profit - 3.0).abs() < 1e-9,
        "groups too far apart to share a band"
    );
}
