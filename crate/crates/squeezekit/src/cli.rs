use std::f64::consts::TAU;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use squeezekit_core::atomic::{detuning_sweep, epsilon_ratio};
use squeezekit_core::moments::{integrate_three_mode_sampled, integrate_two_mode_sampled, ThreeModeMoments, TwoModeMoments};
use squeezekit_core::oracle::{FockDims, OracleOptions, ThreeFockDims};
use squeezekit_core::params::{cavity_tuning, compensation_field, derive_two_mode, ThreeModeParams, TwoModeParams};
use squeezekit_core::stochastic::{conditional_closed_form, conditional_monte_carlo, t_qnd, EnsembleSpec};

use crate::atomfile::resolve_atom;
use crate::compare::{compare_three_mode, compare_two_mode};
use crate::ensemble::run_ensemble_par;
use crate::error::{CliError, Result};
use crate::output::{csv_sink, finish, num, opt};
use crate::reproduce::{canonical, run_scenario, SCENARIOS};
use crate::runconfig::{Couplings, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "squeezekit", version, about = "Spin squeezing under vector and tensor light shifts")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Vector and tensor couplings over a detuning grid, as sum of w / (detuning in GHz).
    #[command(allow_negative_numbers = true)]
    Couplings(CouplingsArgs),
    /// Derived rates for a configured atom and cavity, with an optional detuning sweep.
    #[command(allow_negative_numbers = true)]
    Params(ParamsArgs),
    /// Integrates the Gaussian moment equations from the vacuum.
    #[command(allow_negative_numbers = true)]
    Moments(MomentsArgs),
    /// Homodyne trajectories of the conditional state.
    #[command(allow_negative_numbers = true)]
    Trajectories(TrajArgs),
    /// Conditional mean slope m and variance v, optionally with Monte Carlo estimates.
    #[command(allow_negative_numbers = true)]
    Conditional(CondArgs),
    /// Truncated Fock-space master equation against the moment equations.
    #[command(allow_negative_numbers = true)]
    OracleCheck(OracleArgs),
    /// Runs a built-in scenario and reports each check.
    #[command(allow_negative_numbers = true)]
    Reproduce(ReproduceArgs),
}

#[derive(Args, Debug)]
pub struct CouplingsArgs {
    /// Built-in atom (yb173, he3, sr87).
    #[arg(long, conflicts_with = "atom_file")]
    pub atom: Option<String>,
    #[arg(long)]
    pub atom_file: Option<PathBuf>,
    /// First detuning, GHz.
    #[arg(long, default_value_t = -5.0)]
    pub start: f64,
    #[arg(long, default_value_t = 10.0)]
    pub end: f64,
    #[arg(long, default_value_t = 601)]
    pub points: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ParamsArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Sweep start, GHz. Requires --sweep-end.
    #[arg(long, requires = "sweep_end")]
    pub sweep_start: Option<f64>,
    #[arg(long, requires = "sweep_start")]
    pub sweep_end: Option<f64>,
    #[arg(long, default_value_t = 201)]
    pub points: usize,
    /// Sweep CSV (stdout after the report when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Two,
    Three,
}

#[derive(Args, Debug)]
pub struct MomentsArgs {
    #[arg(long, value_enum, default_value_t = Mode::Two)]
    pub mode: Mode,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// End of the run in units of the measurement rate.
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Step in the same units (default 0.02 / fastest rate).
    #[arg(long)]
    pub dt: Option<f64>,
    /// Take parameters from the dimensionless flags below. Implied by any of them.
    #[arg(long)]
    pub dimensionless: bool,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Two-mode decoherence over measurement rate.
    #[arg(long)]
    pub gamma_tilde: Option<f64>,
    /// Two-mode cavity decay over measurement rate.
    #[arg(long)]
    pub kappa_tilde: Option<f64>,
    /// Three-mode gamma_beta / Omega_V.
    #[arg(long)]
    pub gamma_beta: Option<f64>,
    /// Three-mode kappa / Omega_V.
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Three-mode gamma_f / gamma_m.
    #[arg(long)]
    pub gamma_ratio: Option<f64>,
    /// Keep every n-th step (default: about 1000 rows).
    #[arg(long)]
    pub record_every: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct StochasticParams {
    /// Reads epsilon and gamma / Gamma from a run config.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub gamma_tilde: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 1e-3)]
    pub dtau: f64,
}

#[derive(Args, Debug)]
pub struct TrajArgs {
    #[command(flatten)]
    pub p: StochasticParams,
    #[arg(long)]
    pub n_traj: Option<usize>,
    #[arg(long)]
    pub tau_end: Option<f64>,
    #[arg(long, default_value_t = 100)]
    pub record_every: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CondArgs {
    #[command(flatten)]
    pub p: StochasticParams,
    #[arg(long)]
    pub tau_end: Option<f64>,
    #[arg(long, default_value_t = 100)]
    pub points: usize,
    /// Adds Monte Carlo estimates from this many trajectories.
    #[arg(long)]
    pub mc: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[arg(long, value_enum, default_value_t = Mode::Two)]
    pub mode: Mode,
    /// Fock dimensions, e.g. 12x12 (atom x cavity) or 8x5x4 (alpha x beta x cavity).
    #[arg(long, default_value = "12x12")]
    pub dims: String,
    /// Allows the three-mode oracle, which is slow.
    #[arg(long)]
    pub slow: bool,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub omega_v: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub gamma_m: Option<f64>,
    #[arg(long)]
    pub gamma_f: Option<f64>,
    /// End of the run in units of the measurement rate.
    #[arg(long, default_value_t = 5.0)]
    pub t_end: f64,
    /// Step in the same units (default 0.02 / fastest rate).
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, default_value_t = 25)]
    pub record_every: usize,
    /// Largest allowed population of a top Fock level.
    #[arg(long, default_value_t = 1e-6)]
    pub leak_tolerance: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ReproduceArgs {
    /// Scenario id.
    #[arg(required_unless_present_any = ["list", "all"])]
    pub scenario: Option<String>,
    #[arg(long)]
    pub list: bool,
    #[arg(long, conflicts_with = "scenario")]
    pub all: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `argv` (program name first), runs, and returns the exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Couplings(a) => couplings(a),
        Command::Params(a) => params(a),
        Command::Moments(a) => moments(a),
        Command::Trajectories(a) => trajectories(a),
        Command::Conditional(a) => conditional(a),
        Command::OracleCheck(a) => oracle_check(a),
        Command::Reproduce(a) => reproduce(a),
    }
}

fn couplings(a: CouplingsArgs) -> Result<()> {
    let atom = resolve_atom(a.atom.as_deref(), a.atom_file.as_deref())?;
    let rows = detuning_sweep(&atom, a.start, a.end, a.points)?;
    // per unit squared Rabi pulsation with the detuning in GHz: sum of w / (x - x_line)
    let ghz = TAU * 1e9;
    let mut w = csv_sink(a.out.as_deref())?;
    w.write_record(["detuning_ghz", "alpha_v", "alpha_t", "epsilon"])?;
    for r in rows {
        let v = r.values;
        w.write_record([
            num(r.detuning_ghz),
            opt(v.map(|v| v.alpha_v * ghz)),
            opt(v.map(|v| v.alpha_t * ghz)),
            opt(v.and_then(|v| v.epsilon)),
        ])?;
    }
    finish(w)
}

fn params(a: ParamsArgs) -> Result<()> {
    let cfg = RunConfig::read(&a.config)?;
    let two = cfg.two_mode()?;
    let gamma = two.gamma_big();
    let mut lines: Vec<(&str, f64)> = vec![("omega_v_hz", two.omega_v / TAU), ("epsilon", two.epsilon), ("gamma_big_hz", gamma)];
    if gamma > 0.0 {
        lines.push(("kappa_tilde", two.kappa / gamma));
        lines.push(("gamma_tilde", two.gamma / gamma));
    }
    if let Couplings::Atom { atom, detuning_ghz, cavity, n_atoms } = &cfg.couplings {
        if let Some(g) = cfg.gyro {
            lines.push(("b0_gauss", compensation_field(atom, cavity, *detuning_ghz, g)?));
        }
        lines.push(("delta_c_hz", cavity_tuning(atom, *n_atoms, *detuning_ghz, cavity)? / TAU));
    }
    if cfg.gamma_m.is_some() {
        let three = cfg.three_mode()?;
        lines.push(("gamma_alpha_hz", three.gamma_alpha_rate()));
        lines.push(("gamma0_hz", three.gamma0()));
        if three.epsilon > 0.0 {
            lines.push(("t_qnd_s", t_qnd(&three, 0.0)?));
        }
    }
    let report: String = lines.iter().map(|(k, v)| format!("{k} = {v}\n")).collect();
    let sweep = match (a.sweep_start, a.sweep_end) {
        (Some(s), Some(e)) => Some((s, e)),
        _ => None,
    };
    if sweep.is_none() || a.out.is_some() {
        print!("{report}");
        let _ = std::io::stdout().flush();
    } else {
        eprint!("{report}");
    }
    if let Some((start, end)) = sweep {
        let Couplings::Atom { atom, cavity, n_atoms, .. } = &cfg.couplings else {
            return Err(CliError::config("a detuning sweep needs an [atom] section"));
        };
        if a.points < 2 {
            return Err(CliError::config("--points must be at least 2"));
        }
        let mut w = csv_sink(a.out.as_deref())?;
        w.write_record(["detuning_ghz", "b0", "epsilon", "eps_gamma_hz"])?;
        for k in 0..a.points {
            let x = start + (end - start) * k as f64 / (a.points - 1) as f64;
            let b0 = cfg.gyro.and_then(|g| compensation_field(atom, cavity, x, g).ok());
            let eps = epsilon_ratio(atom, x).ok();
            let rate = derive_two_mode(atom, cavity, *n_atoms, x, 0.0).ok().and_then(|p| eps.map(|e| e * p.gamma_big()));
            w.write_record([num(x), opt(b0), opt(eps), opt(rate)])?;
        }
        finish(w)?;
    }
    Ok(())
}

/// Explicit RK4 cost cap. Physical-unit helium runs are stiff (kappa is ~1e8
/// times the slow rate) and belong in the dimensionless form.
const MAX_STEPS: f64 = 5e8;

fn check_budget(t_end: f64, dt: f64) -> Result<()> {
    let steps = t_end / dt;
    if steps > MAX_STEPS {
        return Err(CliError::config(format!(
            "run needs {steps:.2e} steps (limit {MAX_STEPS:.0e}); use the dimensionless flags or a shorter --t-end"
        )));
    }
    Ok(())
}

fn auto_every(steps: f64, every: Option<usize>) -> usize {
    every.unwrap_or_else(|| (steps / 1000.0).ceil().max(1.0) as usize).max(1)
}

fn moments(a: MomentsArgs) -> Result<()> {
    let dimless = a.dimensionless
        || [a.eps, a.gamma_tilde, a.kappa_tilde, a.gamma_beta, a.kappa, a.gamma_ratio].iter().any(Option::is_some);
    let cfg = match (&a.config, dimless) {
        (Some(_), true) => return Err(CliError::config("--config and the dimensionless flags are exclusive")),
        (None, false) => return Err(CliError::config("give --config or the dimensionless flags (--eps ...)")),
        (Some(p), false) => Some(RunConfig::read(p)?),
        (None, true) => None,
    };
    let t_end_tau = a.t_end.or(cfg.as_ref().and_then(|c| c.dynamics.t_end)).unwrap_or(10.0);
    let dt_tau = a.dt.or(cfg.as_ref().and_then(|c| c.dynamics.dt));
    let mut w = csv_sink(a.out.as_deref())?;
    match a.mode {
        Mode::Two => {
            if a.gamma_beta.is_some() || a.kappa.is_some() || a.gamma_ratio.is_some() {
                return Err(CliError::config("--gamma-beta, --kappa and --gamma-ratio are three-mode flags"));
            }
            let p = match &cfg {
                Some(c) => c.two_mode()?,
                None => TwoModeParams::dimensionless(
                    a.eps.unwrap_or(0.0),
                    a.gamma_tilde.unwrap_or(0.0),
                    a.kappa_tilde.unwrap_or(100.0),
                )?,
            };
            let rate = measurement_rate(p.gamma_big())?;
            let dt = dt_tau.map_or(0.02 / p.max_rate(), |d| d / rate);
            let t_end = t_end_tau / rate;
            check_budget(t_end, dt)?;
            let tr = integrate_two_mode_sampled(&p, t_end, dt, auto_every(t_end / dt, a.record_every))?;
            w.write_record(std::iter::once("tau").chain(TwoModeMoments::NAMES))?;
            for (t, s) in tr.times.iter().zip(&tr.states) {
                w.write_record(std::iter::once(num(t * rate)).chain(s.to_array().map(num)))?;
            }
        }
        Mode::Three => {
            if a.gamma_tilde.is_some() || a.kappa_tilde.is_some() {
                return Err(CliError::config("--gamma-tilde and --kappa-tilde are two-mode flags"));
            }
            let p = match &cfg {
                Some(c) => c.three_mode()?,
                None => ThreeModeParams::from_ratios(
                    a.eps.unwrap_or(0.0),
                    a.gamma_beta.unwrap_or(0.48),
                    a.kappa.unwrap_or(39.0),
                    a.gamma_ratio.unwrap_or(0.01),
                )?,
            };
            let rate = measurement_rate(p.gamma_alpha_rate())?;
            let dt = dt_tau.map_or(0.02 / p.max_rate(), |d| d / rate);
            let t_end = t_end_tau / rate;
            check_budget(t_end, dt)?;
            let tr = integrate_three_mode_sampled(&p, t_end, dt, auto_every(t_end / dt, a.record_every))?;
            w.write_record(std::iter::once("tau").chain(ThreeModeMoments::NAMES))?;
            for (t, s) in tr.times.iter().zip(&tr.states) {
                w.write_record(std::iter::once(num(t * rate)).chain(s.to_array().map(num)))?;
            }
        }
    }
    finish(w)
}

fn measurement_rate(r: f64) -> Result<f64> {
    if r > 0.0 && r.is_finite() {
        Ok(r)
    } else {
        Err(CliError::config("measurement rate is zero, so tau is undefined"))
    }
}

struct Stoch {
    eps: f64,
    gamma_tilde: f64,
    seed: u64,
    tau_end: Option<f64>,
    n_traj: Option<usize>,
}

fn stochastic_params(p: &StochasticParams) -> Result<Stoch> {
    let cfg = p.config.as_deref().map(RunConfig::read).transpose()?;
    let (mut eps, mut gt, mut seed, mut tau_end, mut n_traj) = (None, None, 0, None, None);
    if let Some(c) = &cfg {
        let two = c.two_mode()?;
        eps = Some(two.epsilon);
        gt = Some(two.gamma_tilde().ok_or_else(|| CliError::config("measurement rate is zero"))?);
        seed = c.dynamics.seed;
        tau_end = c.dynamics.t_end;
        n_traj = c.dynamics.n_traj;
    }
    Ok(Stoch {
        eps: p.eps.or(eps).ok_or_else(|| CliError::config("give --eps or --config"))?,
        gamma_tilde: p.gamma_tilde.or(gt).unwrap_or(0.0),
        seed: p.seed.unwrap_or(seed),
        tau_end,
        n_traj,
    })
}

fn trajectories(a: TrajArgs) -> Result<()> {
    let s = stochastic_params(&a.p)?;
    let spec = EnsembleSpec {
        eps: s.eps,
        gamma_tilde: s.gamma_tilde,
        n_traj: a.n_traj.or(s.n_traj).unwrap_or(100),
        tau_end: a.tau_end.or(s.tau_end).unwrap_or(10.0),
        dtau: a.p.dtau,
        seed: s.seed,
        record_every: a.record_every.max(1),
    };
    let ens = run_ensemble_par(&spec)?;
    let mut w = csv_sink(a.out.as_deref())?;
    w.write_record(["tau", "traj_id", "pbar", "sigma"])?;
    for (id, tr) in ens.trajectories.iter().enumerate() {
        for (k, t) in ens.taus.iter().enumerate() {
            w.write_record([num(*t), id.to_string(), num(tr.pbar[k]), num(tr.sigma[k])])?;
        }
    }
    finish(w)
}

fn conditional(a: CondArgs) -> Result<()> {
    let s = stochastic_params(&a.p)?;
    let tau_end = a.tau_end.or(s.tau_end).unwrap_or(10.0);
    if a.points < 1 || !(tau_end > 0.0) {
        return Err(CliError::config("need --points >= 1 and --tau-end > 0"));
    }
    let h = tau_end / a.points as f64;
    let mut w = csv_sink(a.out.as_deref())?;
    match a.mc {
        None => {
            w.write_record(["tau", "m", "v"])?;
            for k in 1..=a.points {
                let c = conditional_closed_form(k as f64 * h, s.eps, s.gamma_tilde)?;
                w.write_record([num(c.tau), num(c.m), num(c.v)])?;
            }
        }
        Some(n) => {
            let every = (h / a.p.dtau).round() as usize;
            if every == 0 || (every as f64 * a.p.dtau - h).abs() > 1e-9 * h {
                return Err(CliError::config("tau_end / points must be a multiple of --dtau"));
            }
            let spec = EnsembleSpec {
                eps: s.eps,
                gamma_tilde: s.gamma_tilde,
                n_traj: n,
                tau_end,
                dtau: a.p.dtau,
                seed: s.seed,
                record_every: every,
            };
            let ens = run_ensemble_par(&spec)?;
            w.write_record(["tau", "m", "v", "m_hat", "v_hat", "se_m", "se_v"])?;
            for &t in ens.taus.iter().skip(1) {
                let c = conditional_closed_form(t, s.eps, s.gamma_tilde)?;
                let mc = conditional_monte_carlo(&ens, t)?;
                w.write_record([t, c.m, c.v, mc.m_hat, mc.v_hat, mc.se_m, mc.se_v].map(num))?;
            }
        }
    }
    finish(w)
}

fn parse_dims(s: &str) -> Result<Vec<usize>> {
    s.split(['x', 'X', ','])
        .map(|x| x.trim().parse::<usize>().map_err(|_| CliError::config(format!("bad --dims '{s}'"))))
        .collect()
}

fn oracle_check(a: OracleArgs) -> Result<()> {
    let dims = parse_dims(&a.dims)?;
    let flags = [a.omega_v, a.eps, a.kappa, a.gamma, a.gamma_m, a.gamma_f];
    let cfg = match &a.config {
        Some(_) if flags.iter().any(Option::is_some) => {
            return Err(CliError::config("--config and parameter flags are exclusive"));
        }
        Some(p) => Some(RunConfig::read(p)?),
        None => None,
    };
    let opts = OracleOptions { record_every: a.record_every.max(1), leak_tolerance: a.leak_tolerance, check_positivity: true };
    let (cmp, rate) = match a.mode {
        Mode::Two => {
            let [da, dc] = dims[..] else {
                return Err(CliError::config("two-mode --dims takes two numbers, e.g. 12x12"));
            };
            let p = match &cfg {
                Some(c) => c.two_mode()?,
                None => TwoModeParams::new(
                    a.omega_v.unwrap_or(0.1),
                    a.eps.unwrap_or(0.3),
                    a.kappa.unwrap_or(1.0),
                    a.gamma.unwrap_or(0.0),
                )?,
            };
            let rate = measurement_rate(p.gamma_big())?;
            let dt = a.dt.map_or(0.02 / p.max_rate(), |d| d / rate);
            (compare_two_mode(FockDims::new(da, dc)?, &p, a.t_end / rate, dt, &opts)?, rate)
        }
        Mode::Three => {
            if !a.slow {
                return Err(CliError::config("the three-mode oracle is slow; pass --slow to run it"));
            }
            let [dim_alpha, dim_beta, dim_cavity] = dims[..] else {
                return Err(CliError::config("three-mode --dims takes three numbers, e.g. 8x5x4"));
            };
            let p = match &cfg {
                Some(c) => c.three_mode()?,
                None => ThreeModeParams::new(
                    a.gamma_m.unwrap_or(0.3),
                    a.gamma_f.unwrap_or(0.2),
                    a.kappa.unwrap_or(2.0),
                    a.omega_v.unwrap_or(0.25),
                    a.eps.unwrap_or(0.4),
                )?,
            };
            let rate = measurement_rate(p.gamma_alpha_rate())?;
            let dt = a.dt.map_or(0.02 / p.max_rate(), |d| d / rate);
            let d = ThreeFockDims { dim_alpha, dim_beta, dim_cavity };
            (compare_three_mode(d, &p, a.t_end / rate, dt, &opts)?, rate)
        }
    };
    let mut w = csv_sink(a.out.as_deref())?;
    let mut header = vec!["tau".to_string()];
    for n in &cmp.names {
        header.extend([format!("{n}_oracle"), format!("{n}_gaussian"), format!("{n}_abs_diff")]);
    }
    w.write_record(&header)?;
    for (k, t) in cmp.times.iter().enumerate() {
        let mut row = vec![num(t * rate)];
        for (o, g) in cmp.oracle[k].iter().zip(&cmp.gaussian[k]) {
            row.extend([num(*o), num(*g), num((o - g).abs())]);
        }
        w.write_record(&row)?;
    }
    finish(w)?;
    let d = cmp.diagnostics;
    eprintln!(
        "max_abs_diff = {:e}  trace_drift = {:e}  min_eigenvalue = {:e}  top_population = {:e}",
        cmp.max_abs_diff(),
        d.max_trace_drift,
        d.min_eigenvalue,
        d.max_top_population
    );
    Ok(())
}

fn reproduce(a: ReproduceArgs) -> Result<()> {
    if a.list {
        for s in SCENARIOS {
            println!("{s}");
        }
        return Ok(());
    }
    let ids: Vec<String> = match &a.scenario {
        Some(s) => vec![s.clone()],
        None => SCENARIOS.iter().map(|s| s.to_string()).collect(),
    };
    if let Some(bad) = ids.iter().find(|i| canonical(i).is_none()) {
        return Err(CliError::UnknownScenario(bad.clone()));
    }
    let mut w = csv_sink(a.out.as_deref())?;
    w.write_record(["scenario", "check", "measured", "target", "tolerance", "pass"])?;
    let (mut passed, mut total) = (0, 0);
    for id in &ids {
        for c in run_scenario(id)? {
            total += 1;
            passed += c.pass as usize;
            w.write_record([
                c.scenario.to_string(),
                c.check,
                num(c.measured),
                num(c.target),
                num(c.tolerance),
                c.pass.to_string(),
            ])?;
        }
    }
    finish(w)?;
    eprintln!("{passed}/{total} checks passed");
    Ok(())
}

