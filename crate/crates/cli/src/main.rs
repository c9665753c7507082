use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use qmarch::analysis::{
    bifurcation_sweep, compare_to_oracle, run_trajectory, verify_suite, CompareOptions, Config, Engine, SweepConfig,
    DEFAULT_CHAOS_THRESHOLD, DEFAULT_CLUSTER_TOL,
};
use qmarch::block_encoding::{dt_grid, sigma_max_curve};
use qmarch::marching::{march_with, resource_report_for, Mode};
use qmarch::nonlinear::NonlinearPrep;
use qmarch::{Error, LorenzParams, Scheme, State3};

type CliResult<T> = std::result::Result<T, String>;

#[derive(Parser)]
#[command(name = "qmarch", version, about = "Quantum time-marching of the Lorenz system")]
struct Cli {
    /// Flat `key = value` file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one trajectory and write `step,t,x,y,z[,p_block,p_nl]`.
    Simulate(SimulateArgs),
    /// Sweep β and write the Poincaré section as `beta,z`.
    Bifurcate(BifurcateArgs),
    /// Print the resource report as JSON.
    Resources(ResourcesArgs),
    /// Write the largest singular value of the time-advance matrix as `dt,sigma_max`.
    SigmaMax(SigmaMaxArgs),
    /// Run the oracle cross-checks.
    Verify,
}

#[derive(Args)]
struct ParamArgs {
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
}

#[derive(Args)]
struct InitArgs {
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    y0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    z0: Option<f64>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    init: InitArgs,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    /// euler, classical (rk2), rk4, quantum-collapsed or quantum-full.
    #[arg(long)]
    engine: Option<String>,
    /// Augmented scheme for the quantum engines: rk2, rk2-printed or euler.
    #[arg(long)]
    scheme: Option<String>,
    /// Keep every n-th step.
    #[arg(long)]
    stride: Option<usize>,
    /// Also write the RK4 comparison report (JSON) here.
    #[arg(long)]
    compare: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BifurcateArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    init: InitArgs,
    #[arg(long)]
    beta_min: Option<f64>,
    #[arg(long)]
    beta_max: Option<f64>,
    #[arg(long)]
    beta_step: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    /// Simulated time per β.
    #[arg(long)]
    t_total: Option<f64>,
    #[arg(long)]
    engine: Option<String>,
    #[arg(long)]
    scheme: Option<String>,
    /// Fraction of the run discarded before recording crossings.
    #[arg(long)]
    transient: Option<f64>,
    #[arg(long)]
    cluster_tol: Option<f64>,
    #[arg(long)]
    chaos_threshold: Option<usize>,
    /// Also write per-β periods and the transitions (JSON) here.
    #[arg(long)]
    summary: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ResourcesArgs {
    #[arg(long)]
    nt: Option<usize>,
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SigmaMaxArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long)]
    dt_min: Option<f64>,
    #[arg(long)]
    dt_max: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Settings {
    config: Config,
}

impl Settings {
    fn load(path: Option<&Path>) -> CliResult<Self> {
        let config = match path {
            Some(p) => {
                let text = fs::read_to_string(p).map_err(|e| format!("cannot read {}: {e}", p.display()))?;
                Config::parse(&text).map_err(|e| format!("{}: {e}", p.display()))?
            }
            None => Config::default(),
        };
        Ok(Self { config })
    }

    fn get<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> CliResult<T> {
        if let Some(v) = flag {
            return Ok(v);
        }
        Ok(self.config.get_parsed(key).map_err(|e| e.to_string())?.unwrap_or(default))
    }

    fn get_opt<T: FromStr>(&self, flag: Option<T>, key: &str) -> CliResult<Option<T>> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.config.get_parsed(key).map_err(|e| e.to_string()),
        }
    }

    fn parsed<T: FromStr<Err = Error>>(&self, flag: Option<String>, key: &str, default: &str) -> CliResult<T> {
        let s = self.get(flag, key, default.to_string())?;
        s.parse::<T>().map_err(|e| e.to_string())
    }

    fn params(&self, a: &ParamArgs, beta_default: f64) -> CliResult<LorenzParams> {
        LorenzParams::new(
            self.get(a.sigma, "sigma", 10.0)?,
            self.get(a.rho, "rho", 28.0)?,
            self.get(a.beta, "beta", beta_default)?,
        )
        .map_err(|e| e.to_string())
    }

    fn init(&self, a: &InitArgs, z_default: f64) -> CliResult<State3> {
        Ok(State3::new(self.get(a.x0, "x0", 0.1)?, self.get(a.y0, "y0", -1.1)?, self.get(a.z0, "z0", z_default)?))
    }

    fn out(&self, flag: Option<PathBuf>) -> CliResult<Option<PathBuf>> {
        self.get_opt(flag, "out")
    }
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> CliResult<String> {
    serde_json::to_string_pretty(v).map(|s| s + "\n").map_err(|e| e.to_string())
}

fn simulate(s: &Settings, a: SimulateArgs) -> CliResult<()> {
    let p = s.params(&a.params, 0.55)?;
    let x0 = s.init(&a.init, 10.1)?;
    let dt = s.get(a.dt, "dt", 2.5e-4)?;
    let steps = s.get(a.steps, "steps", 1000)?;
    let engine: Engine = s.parsed(a.engine, "engine", "quantum-collapsed")?;
    let scheme: Scheme = s.parsed(a.scheme, "scheme", "rk2")?;
    let stride = s.get(a.stride, "stride", 1)?;
    let tr = if engine == Engine::QuantumFull {
        march_with(scheme, x0, p, dt, steps, Mode::Full).map_err(|e| e.to_string())?.trajectory
    } else {
        run_trajectory(engine, scheme, p, dt, steps, x0, stride).map_err(|e| e.to_string())?
    };
    if let Some(path) = s.get_opt(a.compare, "compare")? {
        let report = compare_to_oracle(&tr, &CompareOptions::default()).map_err(|e| e.to_string())?;
        emit(Some(&path), &to_json(&report)?)?;
    }
    emit(s.out(a.out)?.as_deref(), &tr.to_csv())
}

fn bifurcate(s: &Settings, a: BifurcateArgs) -> CliResult<()> {
    let d = SweepConfig::default();
    let cfg = SweepConfig {
        base: s.params(&a.params, d.base.beta)?,
        beta_min: s.get(a.beta_min, "beta-min", d.beta_min)?,
        beta_max: s.get(a.beta_max, "beta-max", d.beta_max)?,
        beta_step: s.get(a.beta_step, "beta-step", d.beta_step)?,
        dt: s.get(a.dt, "dt", d.dt)?,
        t_total: s.get(a.t_total, "t-total", d.t_total)?,
        engine: s.parsed(a.engine, "engine", "classical")?,
        scheme: s.parsed(a.scheme, "scheme", "rk2")?,
        x0: s.init(&a.init, d.x0.z)?,
        transient_fraction: s.get(a.transient, "transient", d.transient_fraction)?,
        cluster_tol: s.get(a.cluster_tol, "cluster-tol", DEFAULT_CLUSTER_TOL)?,
        chaos_threshold: s.get(a.chaos_threshold, "chaos-threshold", DEFAULT_CHAOS_THRESHOLD)?,
    };
    let diagram = bifurcation_sweep(&cfg).map_err(|e| e.to_string())?;
    if let Some(path) = s.get_opt(a.summary, "summary")? {
        let periods: Vec<_> = diagram
            .entries
            .iter()
            .map(|e| {
                serde_json::json!({
                    "beta": e.beta,
                    "crossings": e.z.len(),
                    "clusters": e.period.as_ref().map(|r| r.count()),
                    "chaotic": e.period.as_ref().map(|r| r.chaotic),
                })
            })
            .collect();
        let summary = serde_json::json!({ "engine": cfg.engine, "entries": periods, "transitions": diagram.transitions() });
        emit(Some(&path), &to_json(&summary)?)?;
    }
    emit(s.out(a.out)?.as_deref(), &diagram.to_csv())
}

fn resources(s: &Settings, a: ResourcesArgs) -> CliResult<()> {
    let nt = s.get(a.nt, "nt", 1)?;
    let scheme: Scheme = s.parsed(a.scheme, "scheme", "rk2")?;
    let lcu = NonlinearPrep::new(scheme).map_err(|e| e.to_string())?.lcu_qubits();
    let report =
        resource_report_for(nt, scheme.name(), scheme.num_qubits(), lcu, scheme.max_degree()).map_err(|e| e.to_string())?;
    emit(s.out(a.out)?.as_deref(), &to_json(&report)?)
}

fn sigma_max(s: &Settings, a: SigmaMaxArgs) -> CliResult<()> {
    let p = s.params(&a.params, 0.55)?;
    let scheme: Scheme = s.parsed(a.scheme, "scheme", "rk2")?;
    let dts = dt_grid(s.get(a.dt_min, "dt-min", 1e-4)?, s.get(a.dt_max, "dt-max", 1e-2)?, s.get(a.points, "points", 50)?)
        .map_err(|e| e.to_string())?;
    let curve = sigma_max_curve(&p, scheme, &dts).map_err(|e| e.to_string())?;
    let mut csv = String::from("dt,sigma_max\n");
    for (dt, sm) in curve {
        csv.push_str(&format!("{dt},{sm}\n"));
    }
    emit(s.out(a.out)?.as_deref(), &csv)
}

fn verify() -> CliResult<bool> {
    let checks = verify_suite().map_err(|e| e.to_string())?;
    let mut all = true;
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        all &= c.passed;
    }
    Ok(all)
}

fn run(cli: Cli) -> CliResult<bool> {
    let s = Settings::load(cli.config.as_deref())?;
    match cli.command {
        Command::Simulate(a) => simulate(&s, a).map(|_| true),
        Command::Bifurcate(a) => bifurcate(&s, a).map(|_| true),
        Command::Resources(a) => resources(&s, a).map(|_| true),
        Command::SigmaMax(a) => sigma_max(&s, a).map(|_| true),
        Command::Verify => verify(),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
