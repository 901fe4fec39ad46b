//! Command-line surface and the optional `key=value` config file.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ucurve::data::DataFormat;
use ucurve::search::DirectionPolicy;

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "ucurve", version, about = "U-curve feature selection benchmark harness")]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one algorithm, repeated over consecutive seeds.
    Run(RunArgs),
    /// Compare SFFS against budgeted (UC) and complete (UCC) U-curve runs.
    Compare(CompareArgs),
    /// Check the search against full enumeration on small synthetic instances.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Ucurve,
    Sffs,
    Exhaustive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Budgeted: stop at `--budget` nodes or once `--target` is beaten.
    Uc,
    /// Complete: run until the search space is exhausted.
    Ucc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CostKind {
    /// Penalized mean conditional entropy of a dataset.
    Pmce,
    /// Random cost that is U-shaped on every chain.
    Synth,
    /// Six-feature instance that misleads forward selection.
    Trap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutFormat {
    Csv,
    #[default]
    Md,
    JsonLines,
}

/// One preprocessing step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preprocess {
    Binarize,
    Quantize(usize),
    Filter(usize),
}

impl std::str::FromStr for Preprocess {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let number = |v: &str| v.parse::<usize>().map_err(|_| format!("`{s}`: expected a non-negative integer"));
        match s.split_once('=') {
            None if s == "binarize" => Ok(Self::Binarize),
            Some(("quantize", k)) => {
                let k = number(k)?;
                if k < 2 {
                    return Err("quantize needs at least 2 levels".into());
                }
                Ok(Self::Quantize(k))
            }
            Some(("filter", m)) => Ok(Self::Filter(number(m)?)),
            _ => Err(format!("`{s}`: expected binarize, quantize=<k> or filter=<m>")),
        }
    }
}

impl std::fmt::Display for Preprocess {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Binarize => f.write_str("binarize"),
            Self::Quantize(k) => write!(f, "quantize={k}"),
            Self::Filter(m) => write!(f, "filter={m}"),
        }
    }
}

fn parse_direction(s: &str) -> Result<DirectionPolicy, String> {
    if s == "adaptive" {
        return Ok(DirectionPolicy::Adaptive);
    }
    let p = s
        .strip_prefix("p=")
        .ok_or_else(|| format!("`{s}`: expected p=<float> or adaptive"))?
        .parse::<f64>()
        .map_err(|e| format!("`{s}`: {e}"))?;
    if !(0.0..=1.0).contains(&p) {
        return Err(format!("`{s}`: probability must lie in [0, 1]"));
    }
    Ok(DirectionPolicy::Fixed(p))
}

fn parse_format(s: &str) -> Result<DataFormat, String> {
    s.parse::<DataFormat>().map_err(|e| e.to_string())
}

/// Where the cost function comes from.
#[derive(Debug, Clone, Args)]
pub struct ProblemArgs {
    #[arg(long, value_enum, default_value = "pmce")]
    pub cost: CostKind,
    /// Dataset file(s); `compare` emits one row per file.
    #[arg(long)]
    pub data: Vec<PathBuf>,
    #[arg(long, value_parser = parse_format, default_value = "csv_labeled_last")]
    pub format: DataFormat,
    /// Applied after loading; `filter` always runs first, on raw values.
    #[arg(long, value_delimiter = ',')]
    pub preprocess: Vec<Preprocess>,
    /// Number of features of a synthetic instance.
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    /// Seed of the synthetic instance (defaults to `--seed`); fixed across repeats.
    #[arg(long)]
    pub instance_seed: Option<u64>,
}

/// Search knobs shared by `run` and `compare`.
#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub repeats: u64,
    /// SFFS overshoot past the best (or target) dimension.
    #[arg(long, default_value_t = 3)]
    pub delta: usize,
    /// SFFS target dimension; sweeps when absent.
    #[arg(long)]
    pub target_dim: Option<usize>,
    /// `p=<float>` (probability of a down-up chain) or `adaptive`.
    #[arg(long, value_parser = parse_direction, default_value = "p=0.5")]
    pub direction: DirectionPolicy,
    /// Distinct-evaluation budget for U-curve runs.
    #[arg(long)]
    pub budget: Option<usize>,
    /// Stop exhausting a node after this many consecutive costlier neighbours.
    #[arg(long)]
    pub trial_limit: Option<usize>,
    #[arg(long, value_enum, default_value = "md")]
    pub out: OutFormat,
    /// Flat `key=value` file mirroring the long flags; flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long, value_enum, default_value = "ucurve")]
    pub algo: Algo,
    #[arg(long, value_enum, default_value = "ucc")]
    pub mode: Mode,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub result_capacity: u64,
    /// U-curve UC mode: stop at the first node costing strictly less.
    #[arg(long)]
    pub target: Option<f64>,
    /// Let `exhaustive` enumerate more than 2^24 subsets.
    #[arg(long)]
    pub allow_large: bool,
    /// Write the U-curve event trace of every run to this file.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub search: SearchArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    /// `uc` skips the complete run; by default both run.
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Run UCC even above the full-search size guard.
    #[arg(long)]
    pub force: bool,
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub search: SearchArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SelftestArgs {
    /// Largest lattice degree exercised.
    #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u64).range(4..=20))]
    pub n: u64,
    /// Instances (and membership cases) per suite.
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Flat `key=value` file mirroring the long flags; flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Flags that take no value; `key=true` in a config file turns them on.
const SWITCHES: [&str; 2] = ["allow-large", "force"];

/// Expands a config file into long flags.
fn config_tokens(text: &str) -> Result<Vec<OsString>, CliError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", i + 1)))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if key == "config" {
            return Err(CliError::Usage(format!("config line {}: nested config files are not supported", i + 1)));
        }
        if SWITCHES.contains(&key.as_str()) {
            match value {
                "true" => out.push(format!("--{key}").into()),
                "false" => {}
                _ => return Err(CliError::Usage(format!("config line {}: {key} takes true or false", i + 1))),
            }
        } else {
            out.push(format!("--{key}").into());
            out.push(value.into());
        }
    }
    Ok(out)
}

fn config_path(args: &[OsString]) -> Option<PathBuf> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

/// Parses the command line, splicing config-file flags in front of the
/// explicit ones so that the latter override them.
pub fn parse_args<I, T>(args: I) -> Result<Cli, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let mut args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    if let Some(path) = config_path(&args) {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::Usage(format!("config file {}: {e}", path.display())))?;
        let tokens = config_tokens(&text)?;
        // Right after the subcommand name.
        let at = 2.min(args.len());
        args.splice(at..at, tokens);
    }
    Cli::try_parse_from(args).map_err(CliError::Clap)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(cli: Cli) -> RunArgs {
        match cli.command {
            Command::Run(r) => r,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn preprocess_steps_parse() {
        assert_eq!("binarize".parse(), Ok(Preprocess::Binarize));
        assert_eq!("quantize=3".parse(), Ok(Preprocess::Quantize(3)));
        assert_eq!("filter=100".parse(), Ok(Preprocess::Filter(100)));
        assert!("quantize=1".parse::<Preprocess>().is_err());
        assert!("scale".parse::<Preprocess>().is_err());
    }

    #[test]
    fn direction_parses() {
        assert_eq!(parse_direction("p=0.25"), Ok(DirectionPolicy::Fixed(0.25)));
        assert_eq!(parse_direction("adaptive"), Ok(DirectionPolicy::Adaptive));
        assert!(parse_direction("p=1.5").is_err());
        assert!(parse_direction("0.5").is_err());
    }

    #[test]
    fn defaults() {
        let r = run_args(parse_args(["ucurve", "run", "--cost", "synth"]).unwrap());
        assert_eq!(r.algo, Algo::Ucurve);
        assert_eq!(r.mode, Mode::Ucc);
        assert_eq!(r.search.delta, 3);
        assert_eq!(r.search.repeats, 1);
        assert_eq!(r.search.direction, DirectionPolicy::Fixed(0.5));
    }

    #[test]
    fn flags_override_the_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        std::fs::write(&path, "# comment\ncost = synth\nn=7\nseed=3\nallow_large=true\n").unwrap();
        let p = path.to_str().unwrap();
        let r = run_args(parse_args(["ucurve", "run", "--config", p, "--seed", "9"]).unwrap());
        assert_eq!(r.problem.cost, CostKind::Synth);
        assert_eq!(r.problem.n, 7);
        assert_eq!(r.search.seed, 9);
        assert!(r.allow_large);
    }

    #[test]
    fn bad_config_lines_are_usage_errors() {
        assert!(matches!(config_tokens("seed 3"), Err(CliError::Usage(_))));
        assert!(matches!(config_tokens("force=maybe"), Err(CliError::Usage(_))));
    }

    #[test]
    fn repeated_preprocess_flags_accumulate() {
        let r = run_args(
            parse_args(["ucurve", "run", "--preprocess", "filter=2,binarize", "--preprocess", "quantize=3"]).unwrap(),
        );
        assert_eq!(
            r.problem.preprocess,
            [Preprocess::Filter(2), Preprocess::Binarize, Preprocess::Quantize(3)]
        );
    }
}
