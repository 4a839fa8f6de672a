//! Command-line front end for the comparison-geometry engine.
//!
//! Subcommands load spacetime description files, run the catalog, Riccati,
//! geodesic, distance, Busemann and comparison workflows, and emit
//! plot-ready CSV or JSON. Exit codes: 0 on success, 1 when a verified
//! property fails, 2 on usage or configuration errors.

use clap::{Args, Parser, Subcommand};
use lorentz_comparison::comparison::{
    default_t_grid, monotonicity_report, nonrigid_example, splitting_reconstruct, RegionSpec,
};
use lorentz_comparison::config::SpacetimeConfig;
use lorentz_comparison::distance::ShootingOptions;
use lorentz_comparison::model::{build_profile, ModelParams};
use lorentz_comparison::riccati::{
    comparison_verdict, integrate_matrix, random_psd, MatrixInit, RiccatiOptions,
};
use lorentz_comparison::spacetime::{Hypersurface, Point, Spacetime};
use lorentz_comparison::tolerances;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "lorentz-compare",
    about = "Numerical Lorentzian comparison geometry on warped-product spacetimes",
    long_about = "Runs catalog, Riccati, geodesic, distance, Busemann and area/volume \
                  comparison workflows over generalized Robertson-Walker spacetimes.\n\
                  Exit codes: 0 success, 1 a verified inequality failed, 2 usage/config error."
)]
struct Cli {
    /// RNG seed; falls back to LORENTZ_COMPARE_SEED, then 0.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for sample batches.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Validate configuration and inputs without computing.
    #[arg(long, global = true)]
    dry_run: bool,
    /// Run-configuration JSON file; command-line flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (defaults to stdout).
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true, value_parser = ["csv", "json"])]
    format: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the comparison-space catalog row for (kappa, beta, n).
    ///
    /// JSON fields: kappa, beta, n, c, fiber_curvature, b (null = infinite),
    /// regime_tag. Text output prints the same row on one line.
    Table(TableArgs),
    /// Integrate the matrix Riccati equation and export (t, trace, margin).
    ///
    /// CSV columns: t, trace, margin where margin = dim*s_kappa(t) - tr S(t).
    Riccati(RiccatiArgs),
    /// Integrate a geodesic and export its reduced samples.
    ///
    /// CSV columns: s, t, tp, sigma, sigmap (affine parameter, time, its
    /// rate, fiber arclength, its rate).
    Geodesic(GeodesicArgs),
    /// Time separation between two points (or from a slice).
    ///
    /// JSON fields: value, converged, foot_point, diagnostics.
    Tau(TauArgs),
    /// Busemann truncation table of a vertical Sigma-ray.
    ///
    /// CSV columns: r, truncation (= r - tau_x(gamma(r))).
    Busemann(BusemannArgs),
    /// Area/volume comparison ratios against a catalog profile.
    ///
    /// CSV columns: t, area_ratio, vol_ratio, rigidity_flag.
    Compare(CompareArgs),
    /// Warped-product reconstruction of a maximal spacetime.
    ///
    /// JSON fields: worst_anisotropy, precondition_ok, max_rel_error, pass.
    Split(SplitArgs),
    /// Non-rigidity witnesses for the excluded parameter regime.
    ///
    /// JSON fields: beta_tilde, ccc_holds, cut_parameters, volumes,
    /// relative_difference, distinguishable.
    Counterexample(CounterexampleArgs),
}

#[derive(Args)]
struct TableArgs {
    #[arg(long, allow_hyphen_values = true)]
    kappa: f64,
    #[arg(long, allow_hyphen_values = true)]
    beta: f64,
    #[arg(long)]
    n: u32,
}

#[derive(Args)]
struct RiccatiArgs {
    #[arg(long, allow_hyphen_values = true)]
    kappa: f64,
    #[arg(long, default_value_t = 3)]
    dim: usize,
    /// saturating: asymptotic start on the scalar comparison solution;
    /// model: start at beta/dim Id; psd: kappa Id plus seeded random PSD.
    #[arg(long, value_parser = ["saturating", "model", "psd"], default_value = "saturating")]
    mode: String,
    /// Mean-curvature bound for --mode model.
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    #[arg(long)]
    horizon: Option<f64>,
    /// Number of seeded runs for --mode psd.
    #[arg(long, default_value_t = 1)]
    runs: usize,
}

#[derive(Args)]
struct GeodesicArgs {
    /// Spacetime description file.
    #[arg(long)]
    spec: PathBuf,
    /// Start point "t,x1[,x2,...]".
    #[arg(long, allow_hyphen_values = true)]
    p: String,
    /// Initial velocity "dt,dx1[,dx2,...]".
    #[arg(long, allow_hyphen_values = true)]
    v: String,
    #[arg(long, default_value_t = 5.0)]
    span: f64,
}

#[derive(Args)]
struct TauArgs {
    #[arg(long)]
    spec: PathBuf,
    /// Source point "t,x1[,...]"; omit when --sigma-slice is given.
    #[arg(long, allow_hyphen_values = true)]
    p: Option<String>,
    /// Target point "t,x1[,...]".
    #[arg(long, allow_hyphen_values = true)]
    q: String,
    /// Use the slice t = t0 as the source hypersurface.
    #[arg(long, allow_hyphen_values = true)]
    sigma_slice: Option<f64>,
}

#[derive(Args)]
struct BusemannArgs {
    #[arg(long)]
    spec: PathBuf,
    /// Slice height carrying the ray's foot.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    slice: f64,
    /// Ray foot "x1[,x2,...]".
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    foot: String,
    /// Evaluation point "t,x1[,...]".
    #[arg(long, allow_hyphen_values = true)]
    x: String,
    #[arg(long, default_value_t = 8)]
    schedule_points: usize,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    spec: PathBuf,
    /// Comparison-space parameters.
    #[arg(long, allow_hyphen_values = true)]
    kappa: f64,
    #[arg(long, allow_hyphen_values = true)]
    beta: f64,
    /// Base region: fiber geodesic ball radius on the t = 0 slice.
    #[arg(long, default_value_t = 0.7)]
    radius: f64,
    #[arg(long, default_value_t = tolerances::T_GRID_POINTS)]
    grid: usize,
}

#[derive(Args)]
struct SplitArgs {
    #[arg(long)]
    spec: PathBuf,
    /// Comparison parameters; default to the spec's catalog parameters.
    #[arg(long, allow_hyphen_values = true)]
    kappa: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    #[arg(long, default_value_t = 24)]
    grid: usize,
}

#[derive(Args)]
struct CounterexampleArgs {
    #[arg(long, allow_hyphen_values = true)]
    kappa: f64,
    #[arg(long, allow_hyphen_values = true)]
    beta: f64,
    #[arg(long, allow_hyphen_values = true)]
    beta_tilde1: f64,
    #[arg(long, allow_hyphen_values = true)]
    beta_tilde2: f64,
    #[arg(long, default_value_t = 2)]
    n: u32,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    t_eval: f64,
}

/// Run-configuration file; flags override these values.
#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    schema_version: u32,
    #[serde(default)]
    spec_path: Option<PathBuf>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    output: Option<OutputConfig>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputConfig {
    format: String,
    #[serde(default)]
    path: Option<PathBuf>,
}

const KNOWN_TOLERANCE_KEYS: &[&str] = &["horizon", "samples", "radius", "grid_points"];

struct Ctx {
    seed: u64,
    jobs: usize,
    dry_run: bool,
    output: Option<PathBuf>,
    format: String,
    overrides: BTreeMap<String, f64>,
    spec_path: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    let file_cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            let cfg: RunConfig =
                serde_json::from_str(&text).map_err(|e| format!("config parse error: {e}"))?;
            if cfg.schema_version != 1 {
                return Err(format!(
                    "unsupported run-config schema_version {}",
                    cfg.schema_version
                ));
            }
            for key in cfg.tolerances.keys() {
                if !KNOWN_TOLERANCE_KEYS.contains(&key.as_str()) {
                    return Err(format!(
                        "unknown tolerance key {key:?}; known keys: {KNOWN_TOLERANCE_KEYS:?}"
                    ));
                }
            }
            cfg
        }
        None => RunConfig {
            schema_version: 1,
            ..Default::default()
        },
    };
    let env_seed = std::env::var("LORENTZ_COMPARE_SEED")
        .ok()
        .and_then(|s| s.parse::<u64>().ok());
    let seed = cli.seed.or(file_cfg.seed).or(env_seed).unwrap_or(0);
    let format = cli
        .format
        .or(file_cfg.output.as_ref().map(|o| o.format.clone()))
        .unwrap_or_else(|| "csv".to_string());
    let output = cli.output.or(file_cfg.output.and_then(|o| o.path));
    let ctx = Ctx {
        seed,
        jobs: cli.jobs.max(1),
        dry_run: cli.dry_run,
        output,
        format,
        overrides: file_cfg.tolerances,
        spec_path: file_cfg.spec_path,
    };
    match &cli.command {
        Command::Table(a) => cmd_table(&ctx, a),
        Command::Riccati(a) => cmd_riccati(&ctx, a),
        Command::Geodesic(a) => cmd_geodesic(&ctx, a),
        Command::Tau(a) => cmd_tau(&ctx, a),
        Command::Busemann(a) => cmd_busemann(&ctx, a),
        Command::Compare(a) => cmd_compare(&ctx, a),
        Command::Split(a) => cmd_split(&ctx, a),
        Command::Counterexample(a) => cmd_counterexample(&ctx, a),
    }
}

fn emit(ctx: &Ctx, text: &str) -> Result<(), String> {
    match &ctx.output {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("cannot write output: {e}")),
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn parse_coords(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad coordinate {p:?}: {e}"))
        })
        .collect()
}

fn load_spacetime(ctx: &Ctx, arg_path: &std::path::Path) -> Result<Spacetime, String> {
    let path = ctx.spec_path.clone().unwrap_or_else(|| arg_path.to_path_buf());
    let cfg = SpacetimeConfig::load(&path).map_err(|e| e.to_string())?;
    cfg.build().map_err(|e| e.to_string())
}

fn point_from(coords: &[f64]) -> Result<Point, String> {
    if coords.len() < 2 {
        return Err("a point needs a t plus at least one fiber coordinate".to_string());
    }
    Ok(Point::new(coords[0], DVector::from_column_slice(&coords[1..])))
}

fn cmd_table(ctx: &Ctx, a: &TableArgs) -> Result<ExitCode, String> {
    let profile = build_profile(ModelParams {
        kappa: a.kappa,
        beta: a.beta,
        n: a.n,
    })
    .map_err(|e| e.to_string())?;
    if ctx.dry_run {
        println!("config ok");
        return Ok(ExitCode::SUCCESS);
    }
    let summary = profile.summary();
    let text = if ctx.format == "json" {
        serde_json::to_string_pretty(&summary).unwrap()
    } else {
        let b = summary
            .b
            .map(|b| format!("{b}"))
            .unwrap_or_else(|| "inf".to_string());
        format!(
            "kappa={} beta={} n={} regime={} c={} fiber={} b={b}\n",
            summary.kappa, summary.beta, summary.n, summary.regime_tag, summary.c,
            summary.fiber_curvature
        )
    };
    emit(ctx, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_riccati(ctx: &Ctx, a: &RiccatiArgs) -> Result<ExitCode, String> {
    let horizon = a
        .horizon
        .or_else(|| ctx.overrides.get("horizon").copied())
        .unwrap_or(4.0);
    if ctx.dry_run {
        println!("config ok");
        return Ok(ExitCode::SUCCESS);
    }
    let dim = a.dim;
    let kappa = a.kappa;
    let run_one = |seed: u64| -> Result<(String, bool), String> {
        let init = match a.mode.as_str() {
            "model" => {
                let beta = a.beta.ok_or("--mode model requires --beta")?;
                MatrixInit::Value {
                    t0: 0.0,
                    s0: DMatrix::from_diagonal_element(dim, dim, beta / dim as f64),
                }
            }
            _ => MatrixInit::Asymptotic {
                kappa,
                epsilon0: 0.0,
                t_start: tolerances::ASYMPTOTIC_T_START,
            },
        };
        let psd = if a.mode == "psd" {
            let mut rng = lorentz_comparison::seeded_rng(seed);
            Some(random_psd(dim, &mut rng))
        } else {
            None
        };
        let r = move |_t: f64| {
            let base = DMatrix::from_diagonal_element(dim, dim, kappa);
            match &psd {
                Some(p) => base + p,
                None => base,
            }
        };
        let sol = integrate_matrix(&r, dim, init, horizon, RiccatiOptions::default())
            .map_err(|e| e.to_string())?;
        let verdict = comparison_verdict(&sol, kappa);
        let mut out = sol.to_csv(kappa);
        if let Some(b) = sol.blow_up_time {
            out.push_str(&format!("# blow_up_time,{b:.9e}\n"));
        }
        Ok((out, verdict.holds))
    };

    let runs = if a.mode == "psd" { a.runs.max(1) } else { 1 };
    let seeds: Vec<u64> = (0..runs as u64).map(|k| ctx.seed.wrapping_add(k)).collect();
    // Seeded runs are independent; distribute over --jobs workers and
    // reassemble in seed order.
    let results: Vec<Result<(String, bool), String>> = if ctx.jobs > 1 && runs > 1 {
        let chunk = runs.div_ceil(ctx.jobs);
        std::thread::scope(|scope| {
            let handles: Vec<_> = seeds
                .chunks(chunk)
                .map(|part| {
                    scope.spawn(move || part.iter().map(|s| run_one(*s)).collect::<Vec<_>>())
                })
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("worker panicked"))
                .collect()
        })
    } else {
        seeds.iter().map(|s| run_one(*s)).collect()
    };

    let mut all_hold = true;
    let mut text = String::new();
    for (i, r) in results.into_iter().enumerate() {
        let (csv, holds) = r?;
        if runs > 1 {
            text.push_str(&format!("# run,{i}\n"));
        }
        text.push_str(&csv);
        all_hold &= holds;
    }
    emit(ctx, &text)?;
    if all_hold {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("trace comparison bound violated");
        Ok(ExitCode::from(1))
    }
}

fn cmd_geodesic(ctx: &Ctx, a: &GeodesicArgs) -> Result<ExitCode, String> {
    let st = load_spacetime(ctx, &a.spec)?;
    let p = point_from(&parse_coords(&a.p)?)?;
    let v_coords = parse_coords(&a.v)?;
    if v_coords.len() != p.x.len() + 1 {
        return Err("velocity dimension does not match the point".to_string());
    }
    if ctx.dry_run {
        println!("config ok");
        return Ok(ExitCode::SUCCESS);
    }
    let v = st.tangent(&p, v_coords[0], DVector::from_column_slice(&v_coords[1..]));
    let trace = st.geodesic(&p, &v, a.span).map_err(|e| e.to_string())?;
    let mut text = String::from("s,t,tp,sigma,sigmap\n");
    for s in trace.samples(&st) {
        let r = trace.reduced_at(s.s);
        text.push_str(&format!(
            "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}\n",
            r.s, r.t, r.tp, r.sigma, r.sigmap
        ));
    }
    text.push_str(&format!(
        "# energy,{:.3e},angular_momentum,{:.3e},energy_drift,{:.3e},angular_momentum_drift,{:.3e},truncated,{}\n",
        trace.energy, trace.angular_momentum, trace.energy_drift, trace.angular_momentum_drift,
        trace.truncated
    ));
    emit(ctx, &text)?;
    if trace.energy_drift > 1e-9 || trace.angular_momentum_drift > 1e-9 {
        eprintln!("conservation drift exceeds 1e-9");
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct TauOutput {
    value: f64,
    converged: bool,
    foot_point: Option<Vec<f64>>,
    diagnostics: lorentz_comparison::distance::Diagnostics,
}

fn cmd_tau(ctx: &Ctx, a: &TauArgs) -> Result<ExitCode, String> {
    let st = load_spacetime(ctx, &a.spec)?;
    let q = point_from(&parse_coords(&a.q)?)?;
    if ctx.dry_run {
        println!("config ok");
        return Ok(ExitCode::SUCCESS);
    }
    let opts = ShootingOptions::default();
    let res = match (a.sigma_slice, &a.p) {
        (Some(t0), _) => st.tau_sigma(&Hypersurface::Slice(t0), &q, &opts),
        (None, Some(p)) => {
            let p = point_from(&parse_coords(p)?)?;
            st.tau_point(&p, &q, &opts)
        }
        (None, None) => return Err("tau needs --p or --sigma-slice".to_string()),
    };
    let foot = res.maximizer.as_ref().map(|m| {
        let start = m.point_at(0.0);
        let mut v = vec![start.t];
        v.extend(start.x.iter());
        v
    });
    let out = TauOutput {
        value: res.value,
        converged: res.diagnostics.converged,
        foot_point: foot,
        diagnostics: res.diagnostics.clone(),
    };
    let text = if ctx.format == "json" {
        serde_json::to_string_pretty(&out).unwrap()
    } else {
        format!("{}\n", res.value)
    };
    emit(ctx, &text)?;
    if res.diagnostics.converged {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("shooting search did not converge");
        Ok(ExitCode::from(1))
    }
}

fn cmd_busemann(ctx: &Ctx, a: &BusemannArgs) -> Result<ExitCode, String> {
    let st = load_spacetime(ctx, &a.spec)?;
    let foot = DVector::from_column_slice(&parse_coords(&a.foot)?);
    let x = point_from(&parse_coords(&a.x)?)?;
    if ctx.dry_run {
        println!("config ok");
        return Ok(ExitCode::SUCCESS);
    }
    let opts = ShootingOptions::default();
    let sigma = Hypersurface::Slice(a.slice);
    let ray = st.sigma_ray(&sigma, &foot, &opts).map_err(|e| e.to_string())?;
    let r0 = 0.2 * ray.trace.span();
    let schedule = st.busemann_schedule(&ray, r0, a.schedule_points);
    let value = st
        .busemann(&x, &ray, &schedule, &opts)
        .map_err(|e| e.to_string())?;
    let mut text = value.to_csv();
    text.push_str(&format!(
        "# value,{:.12e},tail_bound,{:.3e},monotone,{}\n",
        value.value, value.tail_bound, value.monotone
    ));
    emit(ctx, &text)?;
    if value.monotone {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("truncation sequence failed to be monotone");
        Ok(ExitCode::from(1))
    }
}

fn cmd_compare(ctx: &Ctx, a: &CompareArgs) -> Result<ExitCode, String> {
    let st = load_spacetime(ctx, &a.spec)?;
    let profile = build_profile(ModelParams {
        kappa: a.kappa,
        beta: a.beta,
        n: st.n,
    })
    .map_err(|e| e.to_string())?;
    if ctx.dry_run {
        println!("config ok");
        return Ok(ExitCode::SUCCESS);
    }
    let radius = ctx.overrides.get("radius").copied().unwrap_or(a.radius);
    let grid_points = ctx
        .overrides
        .get("grid_points")
        .map(|g| *g as usize)
        .unwrap_or(a.grid);
    let spec = RegionSpec::slice_ball(0.0, radius);
    let grid = default_t_grid(&profile, grid_points, st.t_max);
    let report = monotonicity_report(&st, &spec, &profile, &grid).map_err(|e| e.to_string())?;
    let text = if ctx.format == "json" {
        serde_json::to_string_pretty(&report).unwrap()
    } else {
        report.to_csv()
    };
    emit(ctx, &text)?;
    if report.monotone_area && report.monotone_vol {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!(
            "comparison inequality failed at t = {:?}",
            report.first_violation
        );
        Ok(ExitCode::from(1))
    }
}

fn cmd_split(ctx: &Ctx, a: &SplitArgs) -> Result<ExitCode, String> {
    let path = ctx.spec_path.clone().unwrap_or_else(|| a.spec.clone());
    let cfg = SpacetimeConfig::load(&path).map_err(|e| e.to_string())?;
    let st = cfg.build().map_err(|e| e.to_string())?;
    let (kappa, beta) = match (a.kappa, a.beta) {
        (Some(k), Some(b)) => (k, b),
        _ => match &cfg.f {
            lorentz_comparison::config::WarpSpec::Table1 { kappa, beta } => (*kappa, *beta),
            _ => return Err("split needs --kappa/--beta for non-catalog warps".to_string()),
        },
    };
    let profile = build_profile(ModelParams {
        kappa,
        beta,
        n: st.n,
    })
    .map_err(|e| e.to_string())?;
    if ctx.dry_run {
        println!("config ok");
        return Ok(ExitCode::SUCCESS);
    }
    let grid = default_t_grid(&profile, a.grid, st.t_max);
    let mut rng = lorentz_comparison::seeded_rng(ctx.seed);
    let samples: Vec<DVector<f64>> = (0..4)
        .map(|_| st.random_fiber_point(1.0, &mut rng))
        .collect();
    let report =
        splitting_reconstruct(&st, &profile, &grid, &samples).map_err(|e| e.to_string())?;
    let text = if ctx.format == "json" {
        serde_json::to_string_pretty(&report).unwrap()
    } else {
        format!(
            "worst_anisotropy,{:.3e}\nprecondition_ok,{}\nmax_rel_error,{:.3e}\npass,{}\n",
            report.worst_anisotropy, report.precondition_ok, report.max_rel_error, report.pass
        )
    };
    emit(ctx, &text)?;
    if report.pass {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("reconstruction failed");
        Ok(ExitCode::from(1))
    }
}

fn cmd_counterexample(ctx: &Ctx, a: &CounterexampleArgs) -> Result<ExitCode, String> {
    if ctx.dry_run {
        // Validate the parameter regime without running the searches.
        let nm1 = (a.n - 1) as f64;
        let boundary = -nm1 * a.kappa.abs().sqrt();
        if !(a.kappa <= 0.0 && a.beta > boundary) {
            return Err(
                "counterexample regime needs kappa <= 0, beta > -(n-1) sqrt|kappa|".into(),
            );
        }
        println!("config ok");
        return Ok(ExitCode::SUCCESS);
    }
    let opts = ShootingOptions::default();
    let report = nonrigid_example(
        a.kappa,
        a.beta,
        (a.beta_tilde1, a.beta_tilde2),
        a.n,
        a.t_eval,
        &opts,
    )
    .map_err(|e| e.to_string())?;
    let text = if ctx.format == "json" {
        serde_json::to_string_pretty(&report).unwrap()
    } else {
        format!(
            "beta_tilde,{},{}\nccc_holds,{},{}\nvolumes,{:.9e},{:.9e}\nrelative_difference,{:.3e}\ndistinguishable,{}\n",
            report.beta_tilde.0,
            report.beta_tilde.1,
            report.ccc_holds.0,
            report.ccc_holds.1,
            report.volumes.0,
            report.volumes.1,
            report.relative_difference,
            report.distinguishable
        )
    };
    emit(ctx, &text)?;
    // The witnesses are expected to stay within the curvature condition.
    if report.ccc_holds.0 && report.ccc_holds.1 {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("witness violated the curvature condition");
        Ok(ExitCode::from(1))
    }
}
