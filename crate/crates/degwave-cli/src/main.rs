//! Command-line laboratory for the degenerate/singular wave equation with
//! boundary control at x = 1.
//!
//! Exit codes: 0 success, 1 configuration/usage error, 2 a scientific check
//! (hypothesis, tolerance, or inequality) failed.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use degwave::sampling::{left_moving_packet, random_smooth_data};
use degwave::{
    check_direct_inequality, check_inverse_inequality, chp_closed_form_bound, degeneracy_report,
    estimate_chp, estimate_ct, inverse_constants, simulate_homogeneous, solve_hum,
    verify_null_control, check_hypotheses, CoefficientSet,
    ConstantInputs, Error as DegError, Grid, ObservabilityConstants, WaveState,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "degwave", about = "degenerate/singular 1D wave laboratory", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// run configuration file (TOML)
    #[arg(long)]
    config: PathBuf,
    /// use the closed-form Hardy-Poincare bound instead of the eigenvalue
    /// estimate (safe direction for every derived constant)
    #[arg(long)]
    conservative: bool,
    /// RNG seed override for all randomized suites
    #[arg(long)]
    seed: Option<u64>,
    /// output directory override
    #[arg(long)]
    out: Option<PathBuf>,
    /// relative tolerance override for inequality margins
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// degeneracy classes, drift constants, hypotheses, explicit constants
    Report(Common),
    /// homogeneous run: energy/trace CSV plus conservation and direct checks
    Simulate(Common),
    /// observability: C_T estimate and the randomized inequality suite
    Observe(Common),
    /// HUM null control synthesis and verification
    Control(Common),
    /// Cartesian parameter sweep over (K_a, K_d, lambda, T)
    Sweep(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, run): (&Common, fn(&Ctx) -> Result<ExitCode, CliError>) = match &cli.command {
        Command::Report(c) => (c, cmd_report),
        Command::Simulate(c) => (c, cmd_simulate),
        Command::Observe(c) => (c, cmd_observe),
        Command::Control(c) => (c, cmd_control),
        Command::Sweep(c) => (c, cmd_sweep),
    };
    match Ctx::prepare(common).and_then(|ctx| run(&ctx)) {
        Ok(code) => code,
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Internal(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

enum CliError {
    /// invalid config or usage -> exit 1
    Config(String),
    /// solver-level failure -> exit 2
    Internal(String),
}

impl From<config::ConfigError> for CliError {
    fn from(e: config::ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<DegError> for CliError {
    fn from(e: DegError) -> Self {
        CliError::Internal(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Internal(format!("io: {e}"))
    }
}

/// Everything resolved once per invocation.
struct Ctx {
    cfg: config::RunConfig,
    set: CoefficientSet,
    grid: Arc<Grid>,
    report: degwave::DegeneracyReport,
    chp_estimate: f64,
    chp_bound: Option<f64>,
    /// the C_HP actually used for constants (bound when --conservative)
    chp: f64,
    constants: Result<ObservabilityConstants, String>,
    verdicts: degwave::HypothesisVerdicts,
    seed: u64,
    out: PathBuf,
    margin_tol: f64,
}

impl Ctx {
    fn prepare(common: &Common) -> Result<Ctx, CliError> {
        let mut cfg = config::RunConfig::load(&common.config)?;
        if common.conservative {
            cfg.run.conservative = true;
        }
        let base_dir = common
            .config
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."));
        let mut set = cfg.coefficient_set(&base_dir)?;

        let grid0 = Grid::build(&set, cfg.grid.n)?;
        let chp_estimate = estimate_chp(&grid0)?;
        let chp_bound = chp_closed_form_bound(&set).ok();
        let chp = if cfg.run.conservative {
            chp_bound.ok_or_else(|| {
                CliError::Config(
                    "--conservative needs degenerate a and d for the closed-form bound".into(),
                )
            })?
        } else {
            chp_estimate
        };

        let lambda = if cfg.coefficients.lambda_is_fraction {
            cfg.coefficients.lambda / chp
        } else {
            cfg.coefficients.lambda
        };
        set.lambda = lambda;
        let grid = Grid::build(&set, cfg.grid.n)?;

        let report = degeneracy_report(&set);
        let verdicts = check_hypotheses(&set, chp);
        let d_max = (0..=1024)
            .map(|i| set.d.value_at(i as f64 / 1024.0))
            .fold(0.0f64, f64::max);
        let constants = match report.m_effective() {
            None => Err("drift constant unavailable: K_a > 1 with unbounded x b / a".into()),
            Some(m_eff) => {
                let inp = ConstantInputs {
                    a1: set.a.value_at(1.0),
                    d_max,
                    eta1: grid.eta_right,
                    k_a: report.k_a,
                    k_d: report.k_d,
                    m_eff,
                    chp,
                    lambda,
                };
                inverse_constants(&inp).map_err(|e| e.to_string())
            }
        };

        let seed = common.seed.unwrap_or(cfg.run.seed);
        let out = common
            .out
            .clone()
            .or_else(|| cfg.run.out.clone())
            .unwrap_or_else(|| PathBuf::from("."));
        std::fs::create_dir_all(&out)
            .map_err(|e| CliError::Config(format!("cannot create {}: {e}", out.display())))?;
        let margin_tol = common.tol.unwrap_or(cfg.tolerances.margin);

        Ok(Ctx {
            cfg,
            set,
            grid,
            report,
            chp_estimate,
            chp_bound,
            chp,
            constants,
            verdicts,
            seed,
            out,
            margin_tol,
        })
    }

    /// Horizon in seconds; `default_factor` multiplies T0 when the config
    /// gives neither an absolute time nor a factor.
    fn horizon(&self, default_factor: f64) -> Result<f64, CliError> {
        if let Some(t) = self.cfg.time.t {
            return Ok(t);
        }
        let factor = self.cfg.time.t_factor.unwrap_or(default_factor);
        match &self.constants {
            Ok(c) => Ok(factor * c.t0),
            Err(e) => Err(CliError::Config(format!(
                "time.t_factor needs the critical time, but constants are unavailable: {e}"
            ))),
        }
    }

    fn nsteps(&self, t: f64) -> usize {
        ((t / (self.cfg.grid.dt_factor * self.grid.h)).ceil() as usize).max(2)
    }

    fn initial_data(&self) -> (Vec<f64>, Vec<f64>) {
        let d = &self.cfg.data;
        match d.kind.as_str() {
            "zero" => (vec![0.0; self.grid.n], vec![0.0; self.grid.n]),
            "packet" => left_moving_packet(&self.grid, d.center, d.width),
            "modes" => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                random_smooth_data(&self.grid, d.modes, &mut rng)
            }
            // "sine"
            _ => {
                let k = d.mode as f64;
                let y0 = self
                    .grid
                    .nodes
                    .iter()
                    .map(|&x| (k * std::f64::consts::PI * x).sin())
                    .collect();
                (y0, vec![0.0; self.grid.n])
            }
        }
    }

    fn write(&self, name: &str, body: &str) -> Result<(), CliError> {
        std::fs::write(self.out.join(name), body)?;
        Ok(())
    }
}

fn kv(lines: &mut String, key: &str, value: impl std::fmt::Display) {
    lines.push_str(&format!("{key} = {value}\n"));
}

fn report_block(ctx: &Ctx) -> (String, bool) {
    let mut s = String::new();
    let r = &ctx.report;
    kv(&mut s, "k_a", r.k_a);
    kv(&mut s, "k_d", r.k_d);
    kv(&mut s, "class_a", r.class_a);
    kv(&mut s, "class_d", r.class_d);
    kv(&mut s, "m", r.m);
    match r.m_inf {
        Some(v) => kv(&mut s, "m_inf", v),
        None => kv(&mut s, "m_inf", "unbounded"),
    }
    kv(&mut s, "b_over_a_integrable", r.b_over_a_integrable);
    kv(&mut s, "eta1", ctx.grid.eta_right);
    kv(&mut s, "lambda", ctx.set.lambda);
    kv(&mut s, "chp_estimate", ctx.chp_estimate);
    match ctx.chp_bound {
        Some(b) => kv(&mut s, "chp_bound", b),
        None => kv(&mut s, "chp_bound", "unavailable (a or d not degenerate)"),
    }
    kv(&mut s, "chp_used", ctx.chp);

    let v = &ctx.verdicts;
    for (name, verdict) in [
        ("hyp_basic", &v.basic),
        ("hyp_lambda_admissible", &v.lambda_admissible),
        ("hyp_domain", &v.domain),
        ("hyp_classes", &v.classes),
        ("hyp_ka_le_one", &v.ka_le_one),
        ("hyp_ka_gt_one_drift", &v.ka_gt_one_drift),
    ] {
        kv(
            &mut s,
            name,
            format!("{} ({})", if verdict.pass { "pass" } else { "FAIL" }, verdict.detail),
        );
    }
    match v.control_case {
        Some(case) => kv(&mut s, "control_case", case),
        None => kv(&mut s, "control_case", format!("none ({})", v.control_detail)),
    }

    let mut ok = v.all_required_pass();
    match &ctx.constants {
        Ok(c) => {
            kv(&mut s, "c1", c.c1);
            kv(&mut s, "c2", c.c2);
            kv(&mut s, "c3", c.c3);
            kv(&mut s, "c4", c.c4);
            kv(&mut s, "c5", c.c5);
            kv(&mut s, "c6", c.c6);
            kv(&mut s, "epsilon", c.epsilon);
            kv(&mut s, "t0", c.t0);
            // the lambda > 0 lower bound drops a positive singular term when
            // this combination goes negative; flag it for the reader
            let drop = 1.0 - r.k_a / 2.0 - r.k_d - ctx.report.m_effective().unwrap_or(0.0);
            if ctx.set.lambda > 0.0 && drop < 0.0 {
                kv(
                    &mut s,
                    "note",
                    format!("dropped singular term has negative coefficient {drop}"),
                );
            }
        }
        Err(e) => {
            kv(&mut s, "constants", format!("unavailable ({e})"));
            ok = false;
        }
    }
    (s, ok)
}

fn cmd_report(ctx: &Ctx) -> Result<ExitCode, CliError> {
    let (block, ok) = report_block(ctx);
    print!("{block}");
    ctx.write("report.txt", &block)?;
    Ok(ExitCode::from(if ok { 0 } else { 2 }))
}

fn cmd_simulate(ctx: &Ctx) -> Result<ExitCode, CliError> {
    let t = ctx.horizon(2.0)?;
    let nsteps = ctx.nsteps(t);
    let (y0, v0) = ctx.initial_data();
    let st = WaveState::new(y0, v0)?;
    let traj = simulate_homogeneous(
        &ctx.grid,
        ctx.set.lambda,
        &st,
        t,
        nsteps,
        0,
        ctx.cfg.tolerances.drift,
    )?;

    let mut csv = String::from("t,energy,trace\n");
    for k in 0..traj.times.len() {
        csv.push_str(&format!("{},{},{}\n", traj.times[k], traj.energy[k], traj.trace[k]));
    }
    ctx.write("trajectory.csv", &csv)?;

    let e0 = traj.energy[0];
    let mut s = String::new();
    kv(&mut s, "t", t);
    kv(&mut s, "nsteps", nsteps);
    kv(&mut s, "e0", e0);
    kv(&mut s, "energy_drift", traj.energy_drift);
    let mut ok = !traj.drift_exceeded;
    if let Ok(c) = &ctx.constants {
        let chk = check_direct_inequality(c, e0, &traj.trace, traj.dt);
        kv(&mut s, "direct_boundary", chk.boundary);
        kv(&mut s, "direct_bound", chk.bound);
        kv(&mut s, "direct_margin", chk.margin);
        if e0 > 0.0 && chk.margin < -ctx.margin_tol * e0 {
            ok = false;
        }
    }
    kv(&mut s, "verdict", if ok { "pass" } else { "FAIL" });
    print!("{s}");
    ctx.write("simulate.txt", &s)?;
    Ok(ExitCode::from(if ok { 0 } else { 2 }))
}

fn cmd_observe(ctx: &Ctx) -> Result<ExitCode, CliError> {
    if ctx.cfg.observe.budget == 0 {
        return Err(CliError::Config("observe.budget must be positive".into()));
    }
    let t = ctx.horizon(2.0)?;
    let nsteps = ctx.nsteps(t);
    let mut s = String::new();
    kv(&mut s, "t", t);

    let est = estimate_ct(
        &ctx.grid,
        ctx.set.lambda,
        ctx.grid.eta_right,
        t,
        nsteps,
        ctx.cfg.data.modes,
        ctx.cfg.observe.budget,
        ctx.cfg.observe.refine,
        ctx.seed,
    )?;
    // est.cost is sup E0/boundary; the observability constant is the
    // reciprocal, its inverse the control cost
    kv(&mut s, "ct_hat", 1.0 / est.cost);
    kv(&mut s, "cost_hat", est.cost);
    kv(&mut s, "ct_samples", est.samples);

    let mut ok = true;
    let below_t0 = match &ctx.constants {
        Ok(c) => t <= c.t0,
        Err(_) => true,
    };
    if below_t0 {
        kv(
            &mut s,
            "warning",
            "horizon at or below the critical time; inequality suite skipped",
        );
    } else {
        let c = ctx.constants.as_ref().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
        let mut csv = String::from("sample,e0,boundary,direct_margin,inverse_margin\n");
        let mut worst_direct = f64::INFINITY;
        let mut worst_inverse = f64::INFINITY;
        for i in 0..ctx.cfg.observe.suite {
            let (y0, v0) = random_smooth_data(&ctx.grid, ctx.cfg.data.modes, &mut rng);
            let st = WaveState::new(y0, v0)?;
            let traj =
                simulate_homogeneous(&ctx.grid, ctx.set.lambda, &st, t, nsteps, 0, 1e9)?;
            let e0 = traj.energy[0];
            if e0 <= 0.0 {
                continue;
            }
            let d = check_direct_inequality(c, e0, &traj.trace, traj.dt);
            let inv = check_inverse_inequality(c, e0, &traj.trace, traj.dt)?;
            csv.push_str(&format!(
                "{i},{e0},{},{},{}\n",
                d.boundary, d.margin, inv.margin
            ));
            worst_direct = worst_direct.min(d.margin / e0);
            worst_inverse = worst_inverse.min(inv.margin / inv.bound.abs().max(e0));
        }
        ctx.write("margins.csv", &csv)?;
        kv(&mut s, "worst_direct_margin_rel", worst_direct);
        kv(&mut s, "worst_inverse_margin_rel", worst_inverse);
        if worst_direct < -ctx.margin_tol || worst_inverse < -ctx.margin_tol {
            ok = false;
        }
    }
    kv(&mut s, "verdict", if ok { "pass" } else { "FAIL" });
    print!("{s}");
    ctx.write("observe.txt", &s)?;
    Ok(ExitCode::from(if ok { 0 } else { 2 }))
}

fn cmd_control(ctx: &Ctx) -> Result<ExitCode, CliError> {
    let t = ctx.horizon(1.5)?;
    let nsteps = ctx.nsteps(t);
    let (u0, u1) = ctx.initial_data();
    let res = solve_hum(
        &ctx.grid,
        ctx.set.lambda,
        &u0,
        &u1,
        t,
        nsteps,
        ctx.cfg.tolerances.cg,
        ctx.cfg.tolerances.cg_max_iters,
    )?;

    let mut csv = String::from("t,f\n");
    for (k, f) in res.f.iter().enumerate() {
        csv.push_str(&format!("{},{}\n", k as f64 * res.dt, f));
    }
    ctx.write("control.csv", &csv)?;

    let verify = verify_null_control(
        &ctx.grid,
        ctx.set.lambda,
        &u0,
        &u1,
        &res.f,
        t,
        nsteps,
        10,
        ctx.seed,
    )?;

    let mut s = String::new();
    kv(&mut s, "t", t);
    kv(&mut s, "nsteps", nsteps);
    kv(&mut s, "cg_iterations", res.iterations);
    kv(&mut s, "cg_converged", res.converged);
    if let Some(r) = res.cg_residuals.last() {
        kv(&mut s, "cg_final_residual", r);
    }
    if res.coercivity_warning {
        kv(
            &mut s,
            "warning",
            "coercivity lost during CG; horizon is likely below the critical time",
        );
    }
    kv(&mut s, "final_y_rel", verify.final_y_rel);
    kv(&mut s, "final_yt_rel", verify.final_yt_rel);
    kv(&mut s, "transposition_residual", verify.transposition_residual);

    let zero_data = u0.iter().chain(u1.iter()).all(|&q| q == 0.0);
    let ok = zero_data
        || (verify.final_y_rel <= ctx.cfg.tolerances.control
            && verify.final_yt_rel <= ctx.cfg.tolerances.control);
    kv(&mut s, "verdict", if ok { "pass" } else { "FAIL" });
    print!("{s}");
    ctx.write("control.txt", &s)?;
    Ok(ExitCode::from(if ok { 0 } else { 2 }))
}

fn cmd_sweep(ctx: &Ctx) -> Result<ExitCode, CliError> {
    use rayon::prelude::*;
    let sw = &ctx.cfg.sweep;
    let kas = sw.k_a.clone().unwrap_or_else(|| vec![ctx.report.k_a]);
    let kds = sw.k_d.clone().unwrap_or_else(|| vec![ctx.report.k_d]);
    let base_frac = ctx.set.lambda * ctx.chp;
    let fracs = sw.lambda_frac.clone().unwrap_or_else(|| vec![base_frac]);
    let tfs = sw.t_factor.clone().unwrap_or_else(|| vec![2.0]);

    let mut cells = Vec::new();
    for &ka in &kas {
        for &kd in &kds {
            for &lf in &fracs {
                for &tf in &tfs {
                    cells.push((ka, kd, lf, tf));
                }
            }
        }
    }

    let n = ctx.cfg.grid.n;
    let b = ctx.set.b.clone();
    let rows: Vec<Result<String, CliError>> = cells
        .par_iter()
        .map(|&(ka, kd, lf, tf)| {
            let mut set = CoefficientSet::new(
                degwave::CoefficientProfile::power(ka, 1.0),
                b.clone(),
                degwave::CoefficientProfile::power(kd, 1.0),
                0.0,
            )
            .map_err(|e| CliError::Config(e.to_string()))?;
            let grid = Grid::build(&set, n)?;
            let chp = estimate_chp(&grid)?;
            set.lambda = lf / chp;
            let report = degeneracy_report(&set);
            let verdicts = check_hypotheses(&set, chp);
            let d_max = (0..=256)
                .map(|i| set.d.value_at(i as f64 / 256.0))
                .fold(0.0f64, f64::max);
            let consts = report.m_effective().ok_or(()).and_then(|m_eff| {
                inverse_constants(&ConstantInputs {
                    a1: set.a.value_at(1.0),
                    d_max,
                    eta1: grid.eta_right,
                    k_a: report.k_a,
                    k_d: report.k_d,
                    m_eff,
                    chp,
                    lambda: set.lambda,
                })
                .map_err(|_| ())
            });
            let pass = verdicts.all_required_pass() && consts.is_ok();
            let row = match consts {
                Ok(c) => format!(
                    "{ka},{kd},{},{},{chp},{},{},{},{},{},{},{},{},{},{pass}\n",
                    set.lambda,
                    tf * c.t0,
                    grid.eta_right,
                    c.c1,
                    c.c2,
                    c.c3,
                    c.c4,
                    c.c5,
                    c.c6,
                    c.epsilon,
                    c.t0,
                ),
                Err(()) => format!(
                    "{ka},{kd},{},nan,{chp},{},nan,nan,nan,nan,nan,nan,nan,nan,{pass}\n",
                    set.lambda,
                    grid.eta_right,
                ),
            };
            Ok(row)
        })
        .collect();

    let mut csv =
        String::from("k_a,k_d,lambda,t,chp,eta1,c1,c2,c3,c4,c5,c6,epsilon,t0,hypotheses_pass\n");
    let mut all_pass = true;
    for row in rows {
        let row = row?;
        if row.ends_with("false\n") {
            all_pass = false;
        }
        csv.push_str(&row);
    }
    ctx.write("sweep.csv", &csv)?;
    println!("sweep: {} cells written to {}", cells.len(), ctx.out.join("sweep.csv").display());
    Ok(ExitCode::from(if all_pass { 0 } else { 2 }))
}
