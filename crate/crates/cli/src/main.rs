//! `gbs`: generate generalized binomial states, overlaps, bases and
//! squeezing scans, and run the invariant suites.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage, input or I/O error.

mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use gbs_core::delta_basis::delta_basis;
use gbs_core::gbs::{gbs_overlap, gbs_state, orthogonal_partner, GbsParams};
use gbs_core::numeric::linspace;
use gbs_core::resolution::{reconstruct, SphereQuadrature};
use gbs_core::squeezing::{squeeze_scan, Source};
use gbs_core::verify::{self, VerifyConfig, GROUPS};
use gbs_core::DEFAULT_TOLERANCE;
use serde::Serialize;

use crate::io::{amplitudes, emit, read_state_file, squeeze_csv, to_json, Amplitude, StateFile};

#[derive(Debug, Parser)]
#[command(name = "gbs", version, about = "Generalized binomial states of a single field mode")]
struct Cli {
    /// Read phase arguments in degrees instead of radians.
    #[arg(long, global = true)]
    degrees: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, clap::Args)]
struct StateArgs {
    /// Maximum photon number.
    #[arg(short = 'N', long = "photons")]
    n: usize,
    /// Single-photon probability.
    #[arg(short = 'p', long)]
    p: f64,
    /// Mixing phase.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    phi: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Amplitudes of |N,p,phi> as JSON.
    State {
        #[command(flatten)]
        params: StateArgs,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Overlap <N,p1,phi1|N,p2,phi2>.
    Overlap {
        #[arg(short = 'N', long = "photons")]
        n: usize,
        #[arg(long)]
        p1: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        phi1: f64,
        #[arg(long)]
        p2: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        phi2: f64,
    },
    /// The orthogonal partner |N,1-p,phi+pi> as JSON.
    Partner {
        #[command(flatten)]
        params: StateArgs,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Orthonormal basis interpolating between |N,p,phi> and its partner.
    Basis {
        #[command(flatten)]
        params: StateArgs,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Rebuild a state from its expansion over N-photon GBSs.
    Expand {
        /// JSON state file in the format written by `state`.
        #[arg(long = "state")]
        state_file: PathBuf,
        /// Photon number of the expansion; defaults to the file's N.
        #[arg(short = 'N', long = "photons")]
        n: Option<usize>,
        /// Polar quadrature nodes (default ceil((N+1)/2) + 2).
        #[arg(long)]
        theta_nodes: Option<usize>,
        /// Azimuthal quadrature nodes (default N + 3).
        #[arg(long)]
        phi_nodes: Option<usize>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Squeezing indexes on a (p, phi) grid as CSV, p in [0,1] and phi in [0, 2pi].
    SqueezeScan {
        #[arg(short = 'N', long = "photons")]
        n: usize,
        #[arg(long, default_value_t = 101)]
        p_steps: usize,
        #[arg(long, default_value_t = 129)]
        phi_steps: usize,
        #[arg(long, value_enum, default_value_t = SourceArg::ClosedForm)]
        source: SourceArg,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Run the invariant suites and print a JSON report.
    Verify {
        #[arg(long, env = "GBS_TOLERANCE", default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Restrict every group to this photon number.
        #[arg(short = 'N', long = "photons")]
        n: Option<usize>,
        /// Run only these groups (repeatable).
        #[arg(long = "group", value_parser = clap::builder::PossibleValuesParser::new(GROUPS))]
        groups: Vec<String>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SourceArg {
    ClosedForm,
    Direct,
}

impl From<SourceArg> for Source {
    fn from(s: SourceArg) -> Self {
        match s {
            SourceArg::ClosedForm => Source::ClosedForm,
            SourceArg::Direct => Source::Direct,
        }
    }
}

#[derive(Serialize)]
struct OverlapOut {
    re: f64,
    im: f64,
    abs: f64,
}

#[derive(Serialize)]
struct BasisOut {
    #[serde(rename = "N")]
    n: usize,
    p: f64,
    phi: f64,
    states: Vec<Vec<Amplitude>>,
}

#[derive(Serialize)]
struct ExpandOut {
    #[serde(rename = "N")]
    n: usize,
    theta_nodes: usize,
    phi_nodes: usize,
    /// Largest deviation from the input restricted to levels 0..=N.
    max_deviation: f64,
    /// Norm squared of the input above level N, which the expansion cannot represent.
    discarded_weight: f64,
    amplitudes: Vec<Amplitude>,
}

#[derive(Serialize)]
struct GroupOut {
    name: String,
    passed: bool,
    checks: usize,
    failures: usize,
    max_residual: f64,
    failed: Vec<String>,
}

#[derive(Serialize)]
struct VerifyOut {
    passed: bool,
    tolerance: f64,
    seed: u64,
    groups: Vec<GroupOut>,
}

enum Outcome {
    Done,
    VerificationFailed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::VerificationFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn phase(cli_degrees: bool, x: f64) -> f64 {
    if cli_degrees {
        x.to_radians()
    } else {
        x
    }
}

fn gbs_params(args: &StateArgs, degrees: bool) -> Result<GbsParams> {
    Ok(GbsParams::new(args.n, args.p, phase(degrees, args.phi))?)
}

fn state_file(params: &GbsParams) -> Result<StateFile> {
    let state = gbs_state(params, params.n() + 1)?;
    Ok(StateFile { n: Some(params.n()), p: Some(params.p()), phi: Some(params.phi()), amplitudes: amplitudes(&state) })
}

fn run(cli: Cli) -> Result<Outcome> {
    let degrees = cli.degrees;
    match cli.command {
        Command::State { params, out } => {
            let params = gbs_params(&params, degrees)?;
            emit(out.as_deref(), &to_json(&state_file(&params)?)?)?;
        }
        Command::Overlap { n, p1, phi1, p2, phi2 } => {
            let a = GbsParams::new(n, p1, phase(degrees, phi1))?;
            let b = GbsParams::new(n, p2, phase(degrees, phi2))?;
            let z = gbs_overlap(&a, &b)?;
            emit(None, &to_json(&OverlapOut { re: z.re, im: z.im, abs: z.norm() })?)?;
        }
        Command::Partner { params, out } => {
            let params = orthogonal_partner(&gbs_params(&params, degrees)?);
            emit(out.as_deref(), &to_json(&state_file(&params)?)?)?;
        }
        Command::Basis { params, out } => {
            let params = gbs_params(&params, degrees)?;
            let basis = delta_basis(params.n(), params.p(), params.phi())?;
            let body = BasisOut {
                n: params.n(),
                p: params.p(),
                phi: params.phi(),
                states: basis.states.iter().map(amplitudes).collect(),
            };
            emit(out.as_deref(), &to_json(&body)?)?;
        }
        Command::Expand { state_file, n, theta_nodes, phi_nodes, out } => {
            let file = read_state_file(&state_file)?;
            let psi = file.state().with_context(|| format!("invalid state in {}", state_file.display()))?;
            let Some(n) = n.or(file.n) else {
                bail!("photon number not given and field `N` missing in {}", state_file.display());
            };
            if psi.dim() < n + 1 {
                bail!("state has {} amplitudes but N = {n} needs at least {}", psi.dim(), n + 1);
            }
            let default = SphereQuadrature::default_for(n);
            let quad = SphereQuadrature::new(
                theta_nodes.unwrap_or(default.theta_nodes.len()),
                phi_nodes.unwrap_or(default.phi_nodes),
            )?;
            let back = reconstruct(&psi, n, &quad)?;
            let max_deviation = (0..=n).map(|k| (back[k] - psi[k]).norm()).fold(0.0, f64::max);
            let discarded_weight = psi.amplitudes()[n + 1..].iter().map(|z| z.norm_sqr()).sum::<f64>() + 0.0;
            let body = ExpandOut {
                n,
                theta_nodes: quad.theta_nodes.len(),
                phi_nodes: quad.phi_nodes,
                max_deviation,
                discarded_weight,
                amplitudes: amplitudes(&back),
            };
            emit(out.as_deref(), &to_json(&body)?)?;
        }
        Command::SqueezeScan { n, p_steps, phi_steps, source, out } => {
            if p_steps < 2 || phi_steps < 2 {
                bail!("grid steps must be at least 2 (got p-steps {p_steps}, phi-steps {phi_steps})");
            }
            let ps = linspace(0.0, 1.0, p_steps);
            let phis = linspace(0.0, std::f64::consts::TAU, phi_steps);
            let rows = squeeze_scan(n, &ps, &phis, source.into())?;
            emit(out.as_deref(), &squeeze_csv(&rows))?;
        }
        Command::Verify { tolerance, seed, n, groups, out } => {
            if !tolerance.is_finite() || tolerance <= 0.0 {
                bail!("tolerance must be a positive number, got {tolerance}");
            }
            let config =
                VerifyConfig { tolerance, seed, n, groups: if groups.is_empty() { None } else { Some(groups) } };
            let report = verify::run(&config)?;
            let passed = report.passed();
            let body = VerifyOut {
                passed,
                tolerance,
                seed,
                groups: report
                    .groups
                    .into_iter()
                    .map(|g| GroupOut {
                        name: g.name,
                        passed: g.passed,
                        checks: g.checks,
                        failures: g.failures,
                        max_residual: g.max_residual,
                        failed: g.failed,
                    })
                    .collect(),
            };
            emit(out.as_deref(), &to_json(&body)?)?;
            if !passed {
                return Ok(Outcome::VerificationFailed);
            }
        }
    }
    Ok(Outcome::Done)
}
