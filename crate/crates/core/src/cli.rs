//! The `siegel-runge` command line.
//!
//! Every subcommand prints one line of JSON on stdout. Failures print
//! `{"error": ...}` on stderr and exit with 2 for bad input, 1 for numerical
//! failures. Predicates report their verdict in a `"holds"` field and exit 0.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::embedding::{
    in_tube, is_product_locus, min_tube_parameter, near_zero_coordinates, psi_with, relation_rank,
    ProjectivePoint, TubeParameter, DEFAULT_TUBE_CUTOFF, DEFAULT_VANISHING_REL_TOL,
};
use crate::error::{Error, Result};
use crate::heights::{
    bound_case_a, bound_case_b, weil_height_gaussian, weil_height_rational, FieldKind, GaussianInt,
};
use crate::runge::{m_y_value, runge_condition, siegel_runge_condition, DivisorIncidence};
use crate::sampling::sample_reduced_points;
use crate::siegel::{reduce_to_fundamental_domain, SiegelPoint, DEFAULT_REDUCTION_TOL};
use crate::theta::{theta_constant_with, Characteristic, Normalization};

/// Environment variable capping the worker threads; `0` runs sequentially.
pub const THREADS_ENV: &str = "SIEGEL_RUNGE_THREADS";

/// Significant digits kept for every floating-point number in the output.
pub const OUTPUT_DIGITS: usize = 12;

/// Numerical settings shared by all subcommands.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub tolerance: f64,
    pub rel_tol_vanishing: f64,
    pub tube_cutoff: f64,
    pub seed: Option<u64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            rel_tol_vanishing: DEFAULT_VANISHING_REL_TOL,
            tube_cutoff: DEFAULT_TUBE_CUTOFF,
            seed: None,
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::InvalidInput(format!("bad config {}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("tolerance", self.tolerance), ("rel_tol_vanishing", self.rel_tol_vanishing)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidParameter(format!("{name} = {v} must lie in (0, 1)")));
            }
        }
        if !(self.tube_cutoff >= min_tube_parameter()) {
            return Err(Error::InvalidParameter(format!("tube_cutoff = {} is below √3/2", self.tube_cutoff)));
        }
        Ok(())
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "siegel-runge",
    version,
    about = "Genus-2 theta constants, the level-2 theta embedding and Runge-type height bounds"
)]
struct Cli {
    /// JSON file overriding the default RunConfig.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Absolute tolerance for theta evaluations.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Relative threshold for vanishing coordinates.
    #[arg(long, global = true)]
    rel_tol: Option<f64>,
    /// Tube height beyond which the product-locus detector abstains.
    #[arg(long, global = true)]
    tube_cutoff: Option<f64>,
    /// Seed for sampling subcommands.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum NormArg {
    Classical,
    Doubled,
}

impl From<NormArg> for Normalization {
    fn from(n: NormArg) -> Self {
        match n {
            NormArg::Classical => Normalization::Classical,
            NormArg::Doubled => Normalization::Doubled,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Case {
    A,
    B,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate Θ_m(τ) with an error bound.
    Theta {
        /// Characteristic as the bit pattern a1a2b1b2, e.g. 1010.
        #[arg(long = "char")]
        characteristic: String,
        /// Point as JSON: {"tau1":[re,im],"tau2":[re,im],"tau4":[re,im]}.
        #[arg(long)]
        tau: String,
        #[arg(long, value_enum, default_value = "classical")]
        normalization: NormArg,
    },
    /// Reduce τ to the fundamental domain and report the transform.
    Reduce {
        #[arg(long)]
        tau: String,
    },
    /// ψ(τ) as a point of P⁹.
    Embed {
        #[arg(long)]
        tau: String,
        #[arg(long, value_enum, default_value = "classical")]
        normalization: NormArg,
    },
    /// Indices of the near-zero coordinates of ψ(τ) and the product-locus verdict.
    Vanishing {
        #[arg(long)]
        tau: String,
    },
    /// Numerical rank of ψ over seeded random reduced points.
    Rank {
        /// Number of samples.
        #[arg(long = "n", default_value_t = 50)]
        samples: usize,
        #[arg(long, value_enum, default_value = "classical")]
        normalization: NormArg,
    },
    /// Membership of the reduced point in the tube Im τ₄ ≥ t.
    Tube {
        #[arg(long)]
        tau: String,
        #[arg(long)]
        t: f64,
    },
    /// The Runge condition, for the level-n Siegel variety or an incidence file.
    Runge {
        /// Even level n.
        #[arg(long = "n", conflicts_with = "incidence", required_unless_present = "incidence")]
        level: Option<u32>,
        /// DivisorIncidence JSON file.
        #[arg(long)]
        incidence: Option<PathBuf>,
        /// Number of places s.
        #[arg(long = "s")]
        places: u64,
    },
    /// Height bounds in case (a) or (b).
    Bounds {
        #[arg(long = "case", value_enum)]
        case: Case,
        #[arg(long)]
        sp: u32,
        /// Q or imaginary_quadratic (case a).
        #[arg(long, default_value = "Q")]
        field: String,
        /// Number of archimedean places (case b).
        #[arg(long, default_value_t = 1)]
        places: u32,
        /// Tube parameter (case b).
        #[arg(long, default_value_t = 1.0)]
        t: f64,
    },
    /// Weil height of an integer or Gaussian-integer point.
    Height {
        #[arg(long, num_args = 1.., allow_negative_numbers = true, conflicts_with = "gaussian", required_unless_present = "gaussian")]
        rational: Vec<i64>,
        /// Coordinates such as 2, -3i, 1+i, 4-2i.
        #[arg(long, num_args = 1.., allow_hyphen_values = true)]
        gaussian: Vec<String>,
    },
}

fn parse_point(text: &str) -> Result<SiegelPoint> {
    serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("bad point {text:?}: {e}")))
}

/// Parses `a`, `bi`, `a+bi`, `a-bi`, `i` and `-i`.
pub fn parse_gaussian(text: &str) -> Result<GaussianInt> {
    let bad = || Error::InvalidInput(format!("bad Gaussian integer {text:?}"));
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(body) = s.strip_suffix('i') else {
        return Ok(GaussianInt::new(s.parse().map_err(|_| bad())?, 0));
    };
    let split = body.char_indices().skip(1).filter(|&(_, c)| c == '+' || c == '-').last().map(|(k, _)| k);
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1,
        "-" => -1,
        other => other.parse().map_err(|_| bad())?,
    };
    Ok(GaussianInt::new(re.parse().map_err(|_| bad())?, im))
}

fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::InvalidInput(format!("{THREADS_ENV}={v:?} is not a thread count"))),
        Err(_) => Ok(None),
    }
}

fn embed_all(points: &[SiegelPoint], tol: f64, norm: Normalization) -> Result<Vec<ProjectivePoint>> {
    let eval = || points.par_iter().map(|t| psi_with(t, tol, norm)).collect::<Result<Vec<_>>>();
    match threads_from_env()? {
        Some(0) => points.iter().map(|t| psi_with(t, tol, norm)).collect(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Resource(format!("thread pool: {e}")))?
            .install(eval),
        None => eval(),
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Inconsistency(format!("serialization failed: {e}")))
}

/// Rounds every float in `v` to [`OUTPUT_DIGITS`] significant digits.
pub fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            let rounded: f64 = format!("{x:.*e}", OUTPUT_DIGITS - 1).parse().unwrap_or(x);
            json!(rounded)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_floats).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, x)| (k, round_floats(x))).collect()),
        other => other,
    }
}

fn resolve_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(x) = cli.tolerance {
        cfg.tolerance = x;
    }
    if let Some(x) = cli.rel_tol {
        cfg.rel_tol_vanishing = x;
    }
    if let Some(x) = cli.tube_cutoff {
        cfg.tube_cutoff = x;
    }
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cli: &Cli) -> Result<Value> {
    let cfg = resolve_config(cli)?;
    let tol = cfg.tolerance;
    match &cli.command {
        Command::Theta { characteristic, tau, normalization } => {
            let m: Characteristic = characteristic.parse()?;
            let v = theta_constant_with(&m, &parse_point(tau)?, tol, (*normalization).into())?;
            let mut out = to_value(&v)?;
            out["characteristic"] = json!(characteristic);
            Ok(out)
        }
        Command::Reduce { tau } => {
            to_value(&reduce_to_fundamental_domain(&parse_point(tau)?, DEFAULT_REDUCTION_TOL)?)
        }
        Command::Embed { tau, normalization } => {
            to_value(&psi_with(&parse_point(tau)?, tol, (*normalization).into())?)
        }
        Command::Vanishing { tau } => {
            let tau = parse_point(tau)?;
            let p = psi_with(&tau, tol, Normalization::Classical)?;
            let cutoff = TubeParameter::new(cfg.tube_cutoff)?;
            Ok(json!({
                "indices": near_zero_coordinates(&p, cfg.rel_tol_vanishing),
                "rel_tol": cfg.rel_tol_vanishing,
                "verdict": is_product_locus(&tau, cfg.rel_tol_vanishing, cutoff, tol)?,
            }))
        }
        Command::Rank { samples, normalization } => {
            let seed = cfg
                .seed
                .ok_or_else(|| Error::InvalidInput("rank needs --seed (or \"seed\" in the config)".into()))?;
            let points = sample_reduced_points(*samples, seed)?;
            let report = relation_rank(&embed_all(&points, tol, (*normalization).into())?)?;
            let mut out = to_value(&report)?;
            out["gap"] = json!(report.gap());
            out["samples"] = json!(samples);
            out["seed"] = json!(seed);
            Ok(out)
        }
        Command::Tube { tau, t } => {
            let t = TubeParameter::new(*t)?;
            let reduced = reduce_to_fundamental_domain(&parse_point(tau)?, DEFAULT_REDUCTION_TOL)?.reduced;
            Ok(json!({ "holds": in_tube(&reduced, t), "t": t.value(), "reduced": reduced }))
        }
        Command::Runge { level, incidence, places } => {
            let verdict = match (level, incidence) {
                (Some(n), _) => siegel_runge_condition(*n, *places)?,
                (None, Some(path)) => {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
                    let inc: DivisorIncidence = serde_json::from_str(&text)
                        .map_err(|e| Error::InvalidInput(format!("bad incidence {}: {e}", path.display())))?;
                    runge_condition(m_y_value(&inc)? as u64, *places, inc.r() as u64)?
                }
                (None, None) => return Err(Error::InvalidInput("give --n or --incidence".into())),
            };
            to_value(&verdict)
        }
        Command::Bounds { case, sp, field, places, t } => match case {
            Case::A => to_value(&bound_case_a(*sp, field.parse::<FieldKind>()?)),
            Case::B => to_value(&bound_case_b(*sp, *places, TubeParameter::new(*t)?)?),
        },
        Command::Height { rational, gaussian } => {
            let h = if gaussian.is_empty() {
                weil_height_rational(rational)?
            } else {
                let coords = gaussian.iter().map(|s| parse_gaussian(s)).collect::<Result<Vec<_>>>()?;
                weil_height_gaussian(&coords)?
            };
            Ok(json!({ "height": h }))
        }
    }
}

/// Exit code, stdout and stderr of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs one command line (including the program name) without printing.
pub fn dispatch<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match execute(&cli) {
        Ok(v) => Outcome { code: 0, stdout: format!("{}\n", round_floats(v)), stderr: String::new() },
        Err(e) => Outcome {
            code: if e.is_input_error() { 2 } else { 1 },
            stdout: String::new(),
            stderr: format!("{}\n", json!({ "error": e.to_string() })),
        },
    }
}

/// Runs one command line and prints its output; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let out = dispatch(args);
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    out.code
}
