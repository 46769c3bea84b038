//! Command-line front end: argument parsing, dispatch and serialisation.

use std::ffi::OsString;
use std::fmt::{self, Write as _};
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::classify::{self, censored_mean, classify, critical_rho, h_kappa, recurrent_extension_kappa, region_grid, verdict_with_tol, Sign, Verdict, BOUNDARY_TOL};
use crate::error::{Error, Result};
use crate::estimates::{verify_comparability, Envelope, GridSpec};
use crate::kernels::ResurrectionKernel;
use crate::phi::{is_symmetric, Phi, PolyPhi};
use crate::simulate::{simulate_endpoints, simulate_paths, SimConfig};
use crate::stable::StableParams;
use crate::stats::mean_and_se;

#[derive(Parser, Debug)]
#[command(name = "pssmp", version, about = "Resurrected stable pssMp toolkit", arg_required_else_help = true)]
pub struct Cli {
    /// Worker threads for grid sweeps and simulation
    #[arg(long, global = true, env = "PSSMP_THREADS")]
    pub threads: Option<usize>,

    /// Print the JSON schema of the classification report and exit
    #[arg(long)]
    pub json_schema: bool,

    /// Write results to FILE instead of standard output
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Read the run configuration from a JSON file written by --print-config
    #[arg(long, conflicts_with = "print_config")]
    pub config: Option<PathBuf>,

    /// Print the run configuration as JSON instead of running it
    #[arg(long)]
    pub print_config: bool,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Params {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub rho: f64,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "subcommand")]
pub enum Command {
    /// Mean of ξ̄₁ and the absorption verdict, as JSON
    Classify {
        #[command(flatten)]
        params: Params,
        /// φ descriptor, e.g. poly:beta=1-alpha*rho,gamma=1, or a preset (trace, resurrected)
        #[arg(long)]
        phi: String,
        /// |E ξ̄₁| at or below this counts as zero
        #[arg(long, default_value_t = BOUNDARY_TOL)]
        zero_tol: f64,
    },
    /// Critical ρ as a function of α, as CSV alpha,rho_critical
    Curve {
        #[arg(long)]
        phi: String,
        /// number of α points in (0, 2)
        #[arg(long, default_value_t = 99)]
        points: usize,
    },
    /// Sign of E ξ̄₁ over an (α, ρ) grid, as CSV alpha,rho,sign,mean
    Region {
        #[arg(long)]
        phi: String,
        /// NxM: N values of α in (0, 2), M of ρ in (0, 1)
        #[arg(long, default_value = "50x50")]
        grid: String,
        /// |E ξ̄₁| at or below this counts as zero
        #[arg(long, default_value_t = BOUNDARY_TOL)]
        zero_tol: f64,
    },
    /// q, j, J and B over log grids, as CSV x,y,q,j,J,B
    Kernel {
        #[command(flatten)]
        params: Params,
        #[arg(long)]
        phi: String,
        /// log grid lo:hi:n for x
        #[arg(long, default_value = "0.1:10:5")]
        x: String,
        /// log grid lo:hi:n for y
        #[arg(long, default_value = "0.1:10:5")]
        y: String,
    },
    /// Monte Carlo paths of ξ̄ and the pssMp
    Simulate {
        #[command(flatten)]
        params: Params,
        #[arg(long)]
        phi: String,
        #[arg(long, default_value_t = 100)]
        paths: usize,
        #[arg(long, default_value_t = 1.0)]
        horizon: f64,
        #[arg(long, default_value_t = 1e-3)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.01)]
        dt_out: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// starting point of the pssMp
        #[arg(long, default_value_t = 1.0)]
        start: f64,
        #[arg(long, value_enum, default_value_t = Gaussian::Auto)]
        gaussian: Gaussian,
        #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
        out: OutFormat,
    },
    /// Compare q with its two-sided envelope on a log grid, as JSON
    CheckEstimates {
        #[command(flatten)]
        params: Params,
        #[arg(long)]
        phi: String,
        #[arg(long, default_value_t = 6)]
        decades: u32,
        #[arg(long, default_value_t = 25)]
        per_decade: u32,
        #[arg(long, default_value_t = 1e3)]
        budget: f64,
    },
    /// Density-level symmetry test φ(1/t) = t^{1+α}φ(t), as JSON
    Symmetry {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long)]
        phi: String,
    },
    /// Exponent κ* of the recurrent extension, as JSON
    RecurrentExtension {
        #[command(flatten)]
        params: Params,
        #[arg(long)]
        phi: String,
    },
    /// Mean of the censored stable process and its verdict, as JSON
    CensoredClassify {
        #[command(flatten)]
        params: Params,
        /// |E ξ₁| at or below this counts as zero
        #[arg(long, default_value_t = BOUNDARY_TOL)]
        zero_tol: f64,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutFormat {
    Csv,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gaussian {
    Auto,
    On,
    Off,
}

/// Everything needed to repeat a run; its text form is JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub threads: Option<usize>,
    pub output: Option<PathBuf>,
    pub command: Command,
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_string_pretty(self).map_err(|_| fmt::Error)?;
        f.write_str(&s)
    }
}

impl FromStr for RunConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parameter(format!("bad run configuration: {e}")))
    }
}

/// A φ descriptor whose parameters may be expressions in alpha and rho.
#[derive(Debug, Clone)]
pub struct PhiSpec(pub String);

impl PhiSpec {
    pub fn resolve(&self, alpha: f64, rho: f64) -> Result<Phi> {
        let s = self.0.trim();
        match s {
            "trace" => return Ok(Phi::Poly(PolyPhi::trace(alpha, rho)?)),
            "resurrected" => return Phi::poly(1.0, 1.0 + alpha),
            _ => {}
        }
        let (family, body) = s
            .split_once(':')
            .ok_or_else(|| Error::Parameter(format!("phi descriptor '{s}' lacks a family prefix")))?;
        if family.trim() == "table" {
            return s.parse();
        }
        let mut resolved = format!("{}:", family.trim());
        for (i, (k, v)) in crate::phi::parse_kv(body)?.into_iter().enumerate() {
            let value = eval_expr(&v, alpha, rho)?;
            if i > 0 {
                resolved.push(',');
            }
            let _ = write!(resolved, "{k}={value:?}");
        }
        resolved.parse()
    }

    /// Whether the descriptor refers to alpha or rho.
    pub fn is_coupled(&self) -> bool {
        let s = self.0.trim();
        s == "trace" || s == "resurrected" || s.contains("alpha") || s.contains("rho")
    }
}

fn eval_expr(text: &str, alpha: f64, rho: f64) -> Result<f64> {
    let expr: meval::Expr = text.parse().map_err(|e| Error::Parameter(format!("cannot parse '{text}': {e}")))?;
    let mut ctx = meval::Context::new();
    ctx.var("alpha", alpha).var("rho", rho);
    expr.eval_with_context(ctx).map_err(|e| Error::Parameter(format!("cannot evaluate '{text}': {e}")))
}

fn parse_grid(s: &str) -> Result<(usize, usize)> {
    let (a, b) = s.split_once('x').ok_or_else(|| Error::Parameter(format!("grid must be NxM, got '{s}'")))?;
    let n = a.trim().parse().map_err(|_| Error::Parameter(format!("bad grid '{s}'")))?;
    let m = b.trim().parse().map_err(|_| Error::Parameter(format!("bad grid '{s}'")))?;
    if n == 0 || m == 0 {
        return Err(Error::Parameter("grid sizes must be positive".into()));
    }
    Ok((n, m))
}

fn parse_log_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Error::Parameter(format!("log grid must be lo:hi:n, got '{s}'"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].parse().map_err(|_| bad())?;
    let n: usize = parts[2].parse().map_err(|_| bad())?;
    if !(lo > 0.0 && hi >= lo && n >= 1) {
        return Err(bad());
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.log10(), hi.log10());
    Ok((0..n)
        .map(|i| match i {
            0 => lo,
            i if i == n - 1 => hi,
            i => 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64),
        })
        .collect())
}

/// Midpoints of n equal cells of (0, w).
fn cell_centres(n: usize, w: f64) -> Vec<f64> {
    (0..n).map(|i| w * (i as f64 + 0.5) / n as f64).collect()
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map_err(|e| Error::Numeric(format!("serialisation failed: {e}")))
}

/// JSON schema of [`classify::ClassificationReport`].
pub fn report_schema() -> serde_json::Value {
    let num = json!({"type": "number"});
    let opt_num = json!({"type": ["number", "null"]});
    json!({
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "title": "ClassificationReport",
        "type": "object",
        "required": ["alpha", "rho", "phi", "mean_xi1", "verdict", "absorption_time_infinite", "l_phi", "a_phi", "a_phi_plus_log_convention", "rho_critical", "kappa_star"],
        "properties": {
            "alpha": num,
            "rho": num,
            "phi": {"type": "string"},
            "mean_xi1": num,
            "verdict": {"enum": ["infinite_absorption", "finite_absorption_continuous", "boundary_zero_mean"]},
            "absorption_time_infinite": {"type": "boolean"},
            "l_phi": num,
            "a_phi": num,
            "a_phi_plus_log_convention": num,
            "rho_critical": opt_num,
            "kappa_star": opt_num
        },
        "additionalProperties": false
    })
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Classify { params, phi, zero_tol } => {
            let p = StableParams::new(params.alpha, params.rho)?;
            let phi = PhiSpec(phi).resolve(p.alpha, p.rho)?;
            let mut report = classify(&p, &phi)?;
            report.verdict = verdict_with_tol(report.mean_xi1, zero_tol);
            report.absorption_time_infinite = report.verdict.absorption_infinite();
            writeln!(out, "{}", to_json(&report)?)?;
        }
        Command::Curve { phi, points } => {
            let spec = PhiSpec(phi);
            writeln!(out, "alpha,rho_critical")?;
            for alpha in cell_centres(points.max(1), 2.0) {
                let r = critical_rho(alpha, |a, r| spec.resolve(a, r));
                match r {
                    Some(r) => writeln!(out, "{alpha},{r}")?,
                    None => writeln!(out, "{alpha},")?,
                }
            }
        }
        Command::Region { phi, grid, zero_tol } => {
            let spec = PhiSpec(phi);
            let (n, m) = parse_grid(&grid)?;
            let alphas = cell_centres(n, 2.0);
            let rhos = cell_centres(m, 1.0);
            let rows = region_grid(&alphas, &rhos, |a, r| spec.resolve(a, r));
            writeln!(out, "alpha,rho,sign,mean")?;
            for row in rows {
                let (sign, mean) = match row.mean {
                    Some(m) => (
                        match Sign::of(m, zero_tol) {
                            Sign::Positive => "+",
                            Sign::Negative => "-",
                            _ => "0",
                        },
                        m.to_string(),
                    ),
                    None => (row.sign.as_str(), String::new()),
                };
                writeln!(out, "{},{},{sign},{mean}", row.alpha, row.rho)?;
            }
        }
        Command::Kernel { params, phi, x, y } => {
            let p = StableParams::new(params.alpha, params.rho)?;
            let phi = PhiSpec(phi).resolve(p.alpha, p.rho)?;
            let k = ResurrectionKernel::new(p, phi);
            writeln!(out, "x,y,q,j,J,B")?;
            for &xv in &parse_log_grid(&x)? {
                for &yv in &parse_log_grid(&y)? {
                    let q = k.q_density(xv, yv)?;
                    if xv == yv {
                        writeln!(out, "{xv},{yv},{q},,,1")?;
                    } else {
                        let j = k.j_density(xv, yv)?;
                        writeln!(out, "{xv},{yv},{q},{j},{},{}", j + q, 1.0 + q / j)?;
                    }
                }
            }
        }
        Command::Simulate { params, phi, paths, horizon, epsilon, dt_out, seed, start, gaussian, out: format } => {
            let p = StableParams::new(params.alpha, params.rho)?;
            let phi = PhiSpec(phi).resolve(p.alpha, p.rho)?;
            let cfg = SimConfig {
                epsilon,
                horizon,
                dt_out,
                seed,
                n_paths: paths,
                gaussian_compensation: match gaussian {
                    Gaussian::Auto => None,
                    Gaussian::On => Some(true),
                    Gaussian::Off => Some(false),
                },
            };
            cfg.validate()?;
            match format {
                OutFormat::Csv => {
                    let sims = simulate_paths(&p, &phi, start, &cfg)?;
                    let steps = (horizon / dt_out).round() as usize;
                    writeln!(out, "path_id,t,xi_bar,X")?;
                    for (id, (xi, _)) in sims.iter().enumerate() {
                        for k in 0..=steps {
                            let t = (k as f64 * dt_out).min(horizon);
                            let v = xi.value_at(t);
                            writeln!(out, "{id},{t},{v},{}", start * v.exp())?;
                        }
                    }
                }
                OutFormat::Json => {
                    let ends = simulate_endpoints(&p, &phi, &cfg)?;
                    let xs: Vec<f64> = ends.iter().map(|e| e.0).collect();
                    let (mean, se) = mean_and_se(&xs);
                    let chi: Vec<u64> = ends.iter().map(|e| e.1).collect();
                    let summary = json!({
                        "alpha": p.alpha,
                        "rho": p.rho,
                        "phi": phi.to_string(),
                        "config": cfg,
                        "xi_bar_end_mean": mean,
                        "xi_bar_end_se": se,
                        "mean_xi1": classify::mean_xi1(&p, &phi).ok().map(|m| m * horizon),
                        "xi_bar_end": xs,
                        "chi_jumps": chi,
                    });
                    writeln!(out, "{}", to_json(&summary)?)?;
                }
            }
        }
        Command::CheckEstimates { params, phi, decades, per_decade, budget } => {
            let p = StableParams::new(params.alpha, params.rho)?;
            let phi = PhiSpec(phi).resolve(p.alpha, p.rho)?;
            let env = Envelope::new(p.alpha, &phi);
            let k = ResurrectionKernel::new(p, phi);
            let c = verify_comparability(&k, &env, GridSpec { decades, per_decade, budget })?;
            writeln!(out, "{}", to_json(&c)?)?;
        }
        Command::Symmetry { alpha, phi } => {
            let phi = PhiSpec(phi).resolve(alpha, 0.5)?;
            let v = is_symmetric(&phi, alpha);
            writeln!(out, "{}", to_json(&json!({"alpha": alpha, "phi": phi.to_string(), "symmetric": v.symmetric, "residual": v.residual, "worst_t": v.worst_t}))?)?;
        }
        Command::RecurrentExtension { params, phi } => {
            let p = StableParams::new(params.alpha, params.rho)?;
            let phi = PhiSpec(phi).resolve(p.alpha, p.rho)?;
            let kappa = recurrent_extension_kappa(&p, &phi)?;
            let h = h_kappa(&p, &phi, kappa)?;
            writeln!(out, "{}", to_json(&json!({"alpha": p.alpha, "rho": p.rho, "phi": phi.to_string(), "kappa_star": kappa, "h_residual": h}))?)?;
        }
        Command::CensoredClassify { params, zero_tol } => {
            let p = StableParams::new(params.alpha, params.rho)?;
            let mean = censored_mean(&p);
            let verdict: Verdict = verdict_with_tol(mean, zero_tol);
            writeln!(
                out,
                "{}",
                to_json(&json!({"alpha": p.alpha, "rho": p.rho, "mean": mean, "verdict": verdict, "absorption_time_infinite": verdict.absorption_infinite()}))?
            )?;
        }
    }
    Ok(())
}

/// Parse `argv`, run the command, and return the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    if cli.json_schema {
        let _ = writeln!(out, "{}", serde_json::to_string_pretty(&report_schema()).unwrap_or_default());
        return 0;
    }
    let cfg = match (&cli.config, cli.command) {
        (Some(path), _) => match std::fs::read_to_string(path).map_err(Error::from).and_then(|t| t.parse::<RunConfig>()) {
            Ok(mut c) => {
                c.threads = cli.threads.or(c.threads);
                c.output = cli.output.clone().or(c.output);
                c
            }
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                return e.exit_code();
            }
        },
        (None, Some(command)) => RunConfig { threads: cli.threads, output: cli.output.clone(), command },
        (None, None) => {
            let _ = writeln!(err, "error: a subcommand is required (see --help)");
            return 2;
        }
    };
    if cli.print_config {
        let _ = writeln!(out, "{cfg}");
        return 0;
    }
    if let Some(n) = cfg.threads {
        // the global pool can only be configured once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let result = match &cfg.output {
        Some(path) => {
            let mut buf = Vec::new();
            execute(cfg.command, &mut buf).and_then(|()| std::fs::write(path, buf).map_err(Error::from))
        }
        None => execute(cfg.command, out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
