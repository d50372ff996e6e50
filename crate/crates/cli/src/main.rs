use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use snc_core::channel::{find_alpha_star, ChannelConfig, Environment, DEFAULT_ALPHA_TOL};
use snc_core::harness::{
    run_density_sweep, run_monte_carlo, run_toy_scenario, score, solve_methods, ExperimentReport, Prepared, Scenario,
    ToyLayout, DEFAULT_METHODS,
};
use snc_core::jsnc::{exact_profit, Region};
use snc_core::pwl::fit_profit_curve;
use snc_core::regional::{optimal_regional_incentive, regional_profit, tau_infinity, tau_star_sweep, RegionalModel};
use snc_core::{Method, SncSolution};

#[derive(Parser)]
#[command(name = "snc", version, about = "Drone placement with user-in-the-loop incentives")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario JSON file.
    #[arg(long, global = true, conflicts_with = "preset")]
    scenario: Option<PathBuf>,
    /// Built-in scenario: paper-default or toy.
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Search seed for single solves; master seed for experiments.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo trials (per user count for density-sweep).
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Directory to write results into instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Coverage-first placement (USNC) with incentives priced afterwards.
    Place,
    /// Joint placement and pricing on the triangulated profit surface.
    Jsnc,
    /// Placement on the fitted profit curve, closed-form pricing.
    SemiJsnc,
    /// Regional profit curve and optimal-discount sweep for a uniform density.
    Regional {
        #[arg(long, default_value_t = 200.0)]
        radius: f64,
        #[arg(long, default_value_t = 2000.0)]
        world: f64,
        /// Band width; defaults to world - radius.
        #[arg(long)]
        d_u: Option<f64>,
        /// Samples of the discount curve.
        #[arg(long, default_value_t = 1000)]
        points: usize,
        /// Band widths in the sweep.
        #[arg(long, default_value_t = 100)]
        sweep_points: usize,
    },
    /// Two-group toy comparison.
    Toy {
        #[arg(long)]
        satellite_angle: Option<f64>,
    },
    /// Monte Carlo comparison of all methods.
    Montecarlo {
        /// Users per trial; defaults to the scenario's user count.
        #[arg(long)]
        users: Option<usize>,
    },
    /// Mean profit per method over a range of user counts.
    DensitySweep {
        #[arg(long, default_value_t = 10)]
        min_users: usize,
        #[arg(long, default_value_t = 27)]
        max_users: usize,
    },
    /// Optimal altitude/radius ratio and maximum coverage radius.
    AlphaStar {
        /// Report every built-in environment with the scenario's channel.
        #[arg(long)]
        all: bool,
    },
    /// Piecewise-linear fit of the optimal profit against distance.
    FitPwl {
        #[arg(long)]
        breakpoints: Option<usize>,
        #[arg(long)]
        d_u: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
    },
}

/// Failures before any solving starts; reported with exit code 2.
#[derive(Debug)]
struct InputError(anyhow::Error);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for InputError {}

fn load_scenario(common: &Common) -> Result<Scenario> {
    let loaded = match (&common.scenario, &common.preset) {
        (Some(path), _) => Scenario::load(path).with_context(|| format!("loading {}", path.display())),
        (None, Some(name)) => Scenario::preset(name).map_err(Into::into),
        (None, None) => Ok(Scenario::paper_default()),
    };
    loaded.map_err(|e| InputError(e).into())
}

fn prepare(scenario: &Scenario) -> Result<Prepared> {
    scenario.prepare().map_err(|e| InputError(e.into()).into())
}

struct Output<'a> {
    dir: Option<&'a Path>,
    format: Format,
}

impl Output<'_> {
    fn sink(&self, name: &str) -> Result<Box<dyn Write>> {
        Ok(match self.dir {
            Some(dir) => {
                std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
                let ext = match self.format {
                    Format::Json => "json",
                    Format::Csv => "csv",
                };
                let path = dir.join(format!("{name}.{ext}"));
                Box::new(File::create(&path).with_context(|| format!("writing {}", path.display()))?)
            }
            None => Box::new(io::stdout().lock()),
        })
    }

    fn emit<J: Serialize, R: Serialize>(&self, name: &str, json: &J, rows: impl IntoIterator<Item = R>) -> Result<()> {
        let mut w = self.sink(name)?;
        match self.format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut w, json)?;
                writeln!(w)?;
            }
            Format::Csv => {
                let mut c = csv::Writer::from_writer(w);
                for row in rows {
                    c.serialize(row)?;
                }
                c.flush()?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct SolveReport<'a> {
    scenario: &'a str,
    scenario_hash: &'a str,
    gamma_star: f64,
    score: f64,
    solution: &'a SncSolution,
}

#[derive(Serialize)]
struct UserRow {
    user_id: usize,
    x: f64,
    y: f64,
    r: f64,
    region: Region,
    offered: bool,
    tau: Option<f64>,
    d: Option<f64>,
    accept_prob: Option<f64>,
    expected_profit: f64,
    x_d: f64,
    y_d: f64,
    h_d: f64,
    coverage_radius: f64,
}

fn solve(common: &Common, method: Method, out: &Output) -> Result<()> {
    let mut scenario = load_scenario(common)?;
    if let Some(seed) = common.seed {
        scenario.search.seed = seed;
    }
    let p = prepare(&scenario)?;
    let users = scenario.users();
    let (_, sol) = solve_methods(&users, &p, &[method])
        .pop()
        .expect("one method requested");
    let sol = sol.with_context(|| format!("{method} failed"))?;
    let total = score(&sol, &users, &p);
    let pl = sol.placement;
    let breakdown = exact_profit(sol.center(), &users, pl.coverage_radius, p.d_u(), p.fit());
    let rows = users.iter().zip(&breakdown.users).enumerate().map(|(i, (u, o))| {
        let offer = sol.offers.iter().find(|f| f.user_id == u.id);
        let covered = sol.flags.u[i];
        UserRow {
            user_id: u.id,
            x: u.x,
            y: u.y,
            r: o.r,
            region: o.region,
            offered: offer.is_some(),
            tau: offer.map(|f| f.tau),
            d: offer.map(|f| f.d),
            accept_prob: offer.map(|f| f.accept_prob),
            expected_profit: offer.map_or(if covered { 1.0 } else { 0.0 }, |f| f.expected_profit),
            x_d: pl.x_d,
            y_d: pl.y_d,
            h_d: pl.h_d,
            coverage_radius: pl.coverage_radius,
        }
    });
    let report = SolveReport {
        scenario: &scenario.name,
        scenario_hash: &p.hash,
        gamma_star: p.gamma_star(),
        score: total,
        solution: &sol,
    };
    out.emit(method.as_str(), &report, rows)
}

#[derive(Serialize)]
struct CurveRow {
    series: &'static str,
    x: f64,
    tau: f64,
    profit: f64,
    gain_percent: Option<f64>,
}

#[derive(Serialize)]
struct RegionalReport {
    radius: f64,
    world: f64,
    d_u: f64,
    optimum: snc_core::regional::RegionalOptimum,
    tau_infinity: snc_core::regional::TauInfinity,
    curve: Vec<CurveRow>,
    sweep: Vec<CurveRow>,
}

fn regional(
    common: &Common,
    out: &Output,
    (radius, world, d_u, points, sweep_points): (f64, f64, Option<f64>, usize, usize),
) -> Result<()> {
    let scenario = load_scenario(common)?;
    let fit = scenario.fit;
    let d_u = d_u.unwrap_or(world - radius);
    if points < 2 || sweep_points < 1 {
        return Err(InputError(anyhow::anyhow!("need at least 2 curve points and 1 sweep point")).into());
    }
    let model = RegionalModel::new(radius, world, d_u, 0.0, fit).map_err(|e| InputError(e.into()))?;
    let floor = snc_core::regional::TAU_FLOOR;
    let curve = (0..points)
        .map(|i| {
            let tau = floor + (1.0 - floor) * i as f64 / (points - 1) as f64;
            let r = regional_profit(&model, tau)?;
            Ok(CurveRow {
                series: "curve",
                x: tau,
                tau,
                profit: r.profit,
                gain_percent: r.gain_percent,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let widths: Vec<f64> = (1..=sweep_points)
        .map(|i| (world - radius) * i as f64 / sweep_points as f64)
        .collect();
    let sweep = tau_star_sweep(radius, world, fit, &widths)?
        .into_iter()
        .map(|(d, o)| CurveRow {
            series: "sweep",
            x: d,
            tau: o.tau,
            profit: o.profit,
            gain_percent: o.gain_percent,
        })
        .collect();
    let report = RegionalReport {
        radius,
        world,
        d_u,
        optimum: optimal_regional_incentive(&model)?,
        tau_infinity: tau_infinity(radius, &fit)?,
        curve,
        sweep,
    };
    let rows = report.curve.iter().chain(&report.sweep);
    out.emit("regional", &report, rows)
}

#[derive(Serialize)]
struct MethodRow {
    method: Method,
    profit: f64,
    covered: usize,
    offers: usize,
    x_d: f64,
    y_d: f64,
    h_d: f64,
    coverage_radius: f64,
}

fn method_row(sol: &SncSolution, profit: f64) -> MethodRow {
    MethodRow {
        method: sol.method,
        profit,
        covered: sol.covered_count(),
        offers: sol.offers.len(),
        x_d: sol.placement.x_d,
        y_d: sol.placement.y_d,
        h_d: sol.placement.h_d,
        coverage_radius: sol.placement.coverage_radius,
    }
}

fn toy(out: &Output, satellite_angle: Option<f64>) -> Result<()> {
    let mut layout = ToyLayout::default();
    if let Some(a) = satellite_angle {
        layout.satellite_angle_deg = a;
    }
    let r = run_toy_scenario(&layout)?;
    let rows = [
        method_row(&r.usnc, r.usnc_profit),
        method_row(&r.jsnc, r.jsnc_profit),
        method_row(&r.semi_jsnc, r.semi_jsnc_profit),
    ];
    out.emit("toy", &r, rows)
}

#[derive(Serialize)]
struct TrialRow<'a> {
    trial: usize,
    stream: u64,
    method: Method,
    score: Option<f64>,
    covered: Option<usize>,
    wall_time_s: Option<f64>,
    error: Option<&'a str>,
}

fn trial_rows(report: &ExperimentReport) -> impl Iterator<Item = TrialRow<'_>> {
    report.trials.iter().flat_map(|t| {
        t.outcomes.iter().map(move |o| TrialRow {
            trial: t.trial,
            stream: t.stream,
            method: o.method,
            score: o.score,
            covered: o.covered,
            wall_time_s: o.wall_time_s,
            error: o.error.as_deref(),
        })
    })
}

fn montecarlo(common: &Common, out: &Output, users: Option<usize>) -> Result<()> {
    let scenario = load_scenario(common)?;
    let p = prepare(&scenario)?;
    let n = users.unwrap_or_else(|| scenario.user_count());
    let report = run_monte_carlo(
        &p,
        n,
        common.trials.unwrap_or(100),
        &DEFAULT_METHODS,
        common.seed.unwrap_or(0),
    )?;
    out.emit("montecarlo", &report, trial_rows(&report))?;
    fail_on_errors(std::slice::from_ref(&report))
}

#[derive(Serialize)]
struct DensityRow {
    user_count: usize,
    density: f64,
    master_seed: u64,
    method: Method,
    mean: f64,
    median_wall_time_s: f64,
    failures: usize,
}

fn density_sweep(common: &Common, out: &Output, min_users: usize, max_users: usize) -> Result<()> {
    if min_users > max_users {
        return Err(InputError(anyhow::anyhow!(
            "--min-users {min_users} exceeds --max-users {max_users}"
        ))
        .into());
    }
    let scenario = load_scenario(common)?;
    let p = prepare(&scenario)?;
    let counts: Vec<usize> = (min_users..=max_users).collect();
    let reports = run_density_sweep(
        &p,
        &counts,
        common.trials.unwrap_or(10),
        &DEFAULT_METHODS,
        common.seed.unwrap_or(0),
    )?;
    let rows = reports.iter().flat_map(|r| {
        r.summaries.iter().map(move |s| DensityRow {
            user_count: r.user_count,
            density: r.density,
            master_seed: r.master_seed,
            method: s.method,
            mean: s.mean,
            median_wall_time_s: s.median_wall_time_s,
            failures: s.failures,
        })
    });
    out.emit("density-sweep", &reports, rows)?;
    fail_on_errors(&reports)
}

/// Every solve failed for some method: the experiment carries no information for it.
fn fail_on_errors(reports: &[ExperimentReport]) -> Result<()> {
    for r in reports {
        for s in &r.summaries {
            if s.failures == r.trials.len() {
                bail!("{} failed in every trial ({} users)", s.method, r.user_count);
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct AlphaRow {
    environment: String,
    fc_hz: f64,
    gamma_db: f64,
    alpha_star: f64,
    gamma_star: f64,
    residual: f64,
    iterations: usize,
}

fn alpha_star(common: &Common, out: &Output, all: bool) -> Result<()> {
    let scenario = load_scenario(common)?;
    let envs = if all {
        Environment::all_presets().to_vec()
    } else {
        vec![scenario.environment.resolve().map_err(|e| InputError(e.into()))?]
    };
    let cfg = ChannelConfig::new(scenario.fc_hz, scenario.gamma_db).map_err(|e| InputError(e.into()))?;
    let rows = envs
        .into_iter()
        .map(|env| {
            let a = find_alpha_star(&env, &cfg, DEFAULT_ALPHA_TOL)?;
            Ok(AlphaRow {
                environment: env.name,
                fc_hz: cfg.fc_hz,
                gamma_db: cfg.gamma_db,
                alpha_star: a.alpha_star,
                gamma_star: a.gamma_star,
                residual: a.residual,
                iterations: a.iterations,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    out.emit("alpha-star", &rows, &rows)
}

#[derive(Serialize)]
struct NodeRow {
    index: usize,
    breakpoint: f64,
    node_value: f64,
    slope: Option<f64>,
    intercept: Option<f64>,
    rmse: f64,
}

fn fit_pwl(
    common: &Common,
    out: &Output,
    (n, d_u, samples): (Option<usize>, Option<f64>, Option<usize>),
) -> Result<()> {
    let scenario = load_scenario(common)?;
    let n = n.unwrap_or(scenario.pwl.breakpoints);
    let d_u = d_u.unwrap_or(scenario.d_u);
    let samples = samples.unwrap_or(scenario.pwl.samples);
    let curve = fit_profit_curve(&scenario.fit, n, d_u, samples).map_err(|e| InputError(e.into()))?;
    let rows = curve.breakpoints.iter().enumerate().map(|(i, &t)| NodeRow {
        index: i,
        breakpoint: t,
        node_value: curve.node_values[i],
        slope: curve.slopes.get(i).copied(),
        intercept: curve.intercepts.get(i).copied(),
        rmse: curve.rmse,
    });
    out.emit("fit-pwl", &curve, rows)
}

fn run(cli: &Cli) -> Result<()> {
    let c = &cli.common;
    let out = Output {
        dir: c.out.as_deref(),
        format: c.format,
    };
    match &cli.command {
        Command::Place => solve(c, Method::Usnc, &out),
        Command::Jsnc => solve(c, Method::Jsnc, &out),
        Command::SemiJsnc => solve(c, Method::SemiJsnc, &out),
        Command::Regional {
            radius,
            world,
            d_u,
            points,
            sweep_points,
        } => regional(c, &out, (*radius, *world, *d_u, *points, *sweep_points)),
        Command::Toy { satellite_angle } => toy(&out, *satellite_angle),
        Command::Montecarlo { users } => montecarlo(c, &out, *users),
        Command::DensitySweep { min_users, max_users } => density_sweep(c, &out, *min_users, *max_users),
        Command::AlphaStar { all } => alpha_star(c, &out, *all),
        Command::FitPwl {
            breakpoints,
            d_u,
            samples,
        } => fit_pwl(c, &out, (*breakpoints, *d_u, *samples)),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<InputError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
