//! Command-line flags and the optional `key=value` configuration file.
//!
//! A config file contributes defaults only: each line `key = value` becomes the flag
//! `--key=value` placed ahead of the real command line, and later occurrences of a
//! flag override earlier ones. Blank lines and lines starting with `#` are skipped.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use cantor_core::{BuildMode, CantorSpec, Segment, MAX_DEPTH};
use clap::{Parser, ValueEnum};

use crate::error::{CliError, CliResult};
use crate::formats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Build the nested intervals of the bounded set of F_c
    BuildModel,
    /// Build the refinement of a target Cantor set
    BuildTarget,
    /// Evaluate the conjugating map, or export its knots
    Phi,
    /// Evaluate the conjugated map F* = phi . F_c . phi^-1
    Fstar,
    /// Classify one orbit as bounded or escaped
    Iterate,
    /// Classify a uniform grid of starting points
    Classify,
    /// Export a cobweb diagram as CSV or SVG
    Cobweb,
    /// Render an escape-time image of the parameter plane
    Mandelbrot,
    /// Run every invariant suite and report PASS/FAIL per check
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MapChoice {
    /// F_c on the real line
    Model,
    /// F* on the target side
    Target,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlotFormat {
    Csv,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Strict,
    Natural,
}

impl From<ModeArg> for BuildMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Strict => BuildMode::Strict,
            ModeArg::Natural => BuildMode::Natural,
        }
    }
}

/// Target Cantor set as written on the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum TargetArg {
    MiddleThirds,
    MiddleAlpha(f64),
    Ifs2(f64, f64),
    Fat(f64, f64),
    Gaps(PathBuf),
}

fn parse_reals<const N: usize>(s: &str, what: &str) -> Result<[f64; N], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != N {
        return Err(format!("{what} expects {N} comma-separated numbers, got '{s}'"));
    }
    let mut out = [0.0; N];
    for (slot, part) in out.iter_mut().zip(parts) {
        *slot = part.parse().map_err(|_| format!("'{part}' is not a number in {what}"))?;
    }
    Ok(out)
}

impl FromStr for TargetArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        match name {
            "middle-thirds" if rest.is_empty() => Ok(Self::MiddleThirds),
            "middle-alpha" => parse_reals::<1>(rest, "middle-alpha").map(|[a]| Self::MiddleAlpha(a)),
            "ifs2" => parse_reals::<2>(rest, "ifs2").map(|[r1, r2]| Self::Ifs2(r1, r2)),
            "fat" => parse_reals::<2>(rest, "fat").map(|[b, r]| Self::Fat(b, r)),
            "gaps" if !rest.is_empty() => Ok(Self::Gaps(PathBuf::from(rest))),
            _ => Err(format!(
                "unknown target '{s}'; expected middle-thirds, middle-alpha:A, ifs2:R1,R2, fat:BASE,RATIO or gaps:PATH"
            )),
        }
    }
}

impl TargetArg {
    pub fn to_spec(&self, hull: Option<Segment>) -> CliResult<CantorSpec> {
        let spec = match self {
            Self::MiddleThirds => CantorSpec::middle_thirds(),
            Self::MiddleAlpha(a) => CantorSpec::middle_alpha(*a),
            Self::Ifs2(r1, r2) => CantorSpec::affine_ifs2(*r1, *r2),
            Self::Fat(b, r) => CantorSpec::fat(*b, *r),
            Self::Gaps(path) => {
                if hull.is_some() {
                    return Err(CliError::Usage("--hull cannot be combined with a gap-tree file".into()));
                }
                return Ok(CantorSpec::explicit(formats::read_gaps(path)?));
            }
        };
        Ok(match hull {
            Some(h) => spec.with_hull(h),
            None => spec,
        })
    }
}

fn parse_hull(s: &str) -> Result<Segment, String> {
    parse_reals::<2>(s, "--hull").map(|[a, b]| Segment::new(a, b))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionArg(pub [f64; 4]);

impl FromStr for RegionArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        parse_reals::<4>(s, "--region").map(RegionArg)
    }
}

#[derive(Debug, Clone, Parser)]
#[command(
    name = "cantor",
    version,
    about = "Cantor sets of x^2 + c, target Cantor sets and the conjugacy between them",
    args_override_self = true,
    allow_negative_numbers = true
)]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,

    /// Map parameter c of F_c(x) = x^2 + c
    #[arg(long, default_value_t = -3.0)]
    pub c: f64,

    /// Refinement depth N
    #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u32).range(0..=MAX_DEPTH as i64))]
    pub depth: u32,

    /// middle-thirds | middle-alpha:A | ifs2:R1,R2 | fat:BASE,RATIO | gaps:PATH
    #[arg(long, default_value = "middle-thirds")]
    pub target: TargetArg,

    /// Target hull as A,B (family targets only; default 0,1)
    #[arg(long, value_parser = parse_hull, allow_hyphen_values = true)]
    pub hull: Option<Segment>,

    /// Target refinement mode
    #[arg(long, value_enum, default_value_t = ModeArg::Strict)]
    pub mode: ModeArg,

    /// Output file; standard output when absent (required for mandelbrot)
    #[arg(long, short)]
    pub out: Option<PathBuf>,

    /// Points at which to evaluate phi or F*; repeatable
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    pub eval: Vec<f64>,

    /// Evaluate phi^-1 instead of phi
    #[arg(long)]
    pub inverse: bool,

    /// Map to iterate, classify or plot
    #[arg(long, value_enum, default_value_t = MapChoice::Model)]
    pub map: MapChoice,

    /// Starting point of an orbit
    #[arg(long, default_value_t = 0.0)]
    pub x0: f64,

    /// Iteration limit
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_iter: u64,

    /// Print every iterate of the orbit
    #[arg(long)]
    pub trajectory: bool,

    /// Number of cobweb steps
    #[arg(long, default_value_t = 5)]
    pub steps: usize,

    /// Cobweb output format; inferred from the --out extension when absent
    #[arg(long, value_enum)]
    pub format: Option<PlotFormat>,

    /// Grid start for classify; defaults to the hull of the chosen map
    #[arg(long)]
    pub lo: Option<f64>,

    /// Grid end for classify
    #[arg(long)]
    pub hi: Option<f64>,

    /// Grid size for classify
    #[arg(long, default_value_t = 1001, value_parser = clap::value_parser!(u64).range(2..))]
    pub points: u64,

    /// Image width in pixels
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
    pub width: u64,

    /// Image height in pixels
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
    pub height: u64,

    /// Parameter-plane rectangle RE_MIN,RE_MAX,IM_MIN,IM_MAX
    #[arg(long, default_value = "-2.5,1,-1.75,1.75", allow_hyphen_values = true)]
    pub region: RegionArg,

    /// File of key=value lines supplying default flags
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Reads `key=value` lines into `--key=value` arguments.
pub fn config_file_args(path: &Path) -> CliResult<Vec<OsString>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut args = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("{}:{}: expected key=value, got '{line}'", path.display(), i + 1))
        })?;
        let key = key.trim();
        if key.is_empty() || key == "config" || key == "command" {
            return Err(CliError::Usage(format!(
                "{}:{}: '{key}' cannot be set from a config file",
                path.display(),
                i + 1
            )));
        }
        match value.trim() {
            "true" => args.push(OsString::from(format!("--{key}"))),
            "false" => {}
            value => args.push(OsString::from(format!("--{key}={value}"))),
        }
    }
    Ok(args)
}

/// Location of `--config` on the raw command line, if any.
fn find_config(args: &[OsString]) -> Option<PathBuf> {
    let mut found = None;
    let mut iter = args.iter();
    while let Some(arg) = iter.next() {
        let s = arg.to_string_lossy();
        if s == "--" {
            break;
        }
        if s == "--config" {
            found = iter.next().map(PathBuf::from);
        } else if let Some(v) = s.strip_prefix("--config=") {
            found = Some(PathBuf::from(v));
        }
    }
    found
}

/// Parses `argv` (program name first), merging in the config file when one is named.
/// Help and version requests surface as clap errors with exit status 0.
pub fn parse_args<I, T>(argv: I) -> Result<RunConfig, ParseFailure>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let (program, rest) = argv.split_first().map(|(p, r)| (p.clone(), r)).unwrap_or(("cantor".into(), &[]));
    let mut merged = vec![program];
    if let Some(path) = find_config(rest) {
        merged.extend(config_file_args(&path).map_err(ParseFailure::Cli)?);
    }
    merged.extend(rest.iter().cloned());
    RunConfig::try_parse_from(merged).map_err(ParseFailure::Clap)
}

#[derive(Debug)]
pub enum ParseFailure {
    Clap(clap::Error),
    Cli(CliError),
}
