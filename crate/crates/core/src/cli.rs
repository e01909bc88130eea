//! Command-line front end.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::filtration::{build_enriched_nerve_with_cap, build_vietoris_rips_with_cap, ComplexKind, DEFAULT_MAX_CELLS};
use crate::homology::{euler_check, magnitude_homology_with_cap, Mode, DEFAULT_MAX_GENERATORS};
use crate::io::{parse_distance_matrix, parse_point_cloud, parse_rational, snap_point_cloud, PointMetric};
use crate::limits::{c_approximation_check, limit_homology, ordinary_mh_limit, stabilization_threshold};
use crate::magnitude::{magnitude_function_eval, magnitude_rational};
use crate::metric::FiniteMetricSpace;
use crate::persistence::{reduce_persistence, Barcode};

pub const THREADS_VAR: &str = "MAGNIPERSIST_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Magnitude as a rational function of q.
    Magnitude,
    /// Magnitude function at t.
    Magfun,
    /// Magnitude homology table.
    Mh,
    /// Euler characteristic against the power series of the magnitude.
    Euler,
    /// Vietoris–Rips barcode.
    Ph,
    /// Blurred magnitude homology barcode.
    Blurred,
    /// Small-scale limits of both filtrations and of magnitude homology.
    Limits,
    /// Chain-level comparison of the nerve and Vietoris–Rips filtrations.
    Approx,
}

fn rational_arg(s: &str) -> std::result::Result<BigRational, String> {
    parse_rational(s)
}

fn mode_arg(s: &str) -> std::result::Result<Mode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn metric_arg(s: &str) -> std::result::Result<PointMetric, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Clone, Parser)]
#[command(name = "magnipersist", version, about = "Magnitude, magnitude homology and persistence of finite metric spaces")]
pub struct RunConfig {
    #[arg(long, value_enum)]
    pub command: Command,
    /// Distance matrix, or a point cloud when --metric is given; `-` reads standard input.
    #[arg(long)]
    pub input: PathBuf,
    /// Largest homological degree (or simplex dimension).
    #[arg(long = "n-max", visible_alias = "dim-max")]
    pub n_max: Option<usize>,
    /// Largest grade (or filtration value).
    #[arg(long = "l-max", visible_alias = "eps-max", value_parser = rational_arg)]
    pub l_max: Option<BigRational>,
    #[arg(long, default_value_t = 2)]
    pub prime: u64,
    #[arg(long, value_parser = mode_arg, default_value = "normalized")]
    pub mode: Mode,
    /// Digits after the decimal point for `magfun`.
    #[arg(long, default_value_t = 12)]
    pub precision: usize,
    /// Read a point cloud and build distances with l1, linf or euclid:D.
    #[arg(long, value_parser = metric_arg)]
    pub metric: Option<PointMetric>,
    #[arg(long, default_value_t = DEFAULT_MAX_GENERATORS)]
    pub max_generators: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_CELLS)]
    pub max_cells: usize,
    /// Write the result here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Scale for `magfun`.
    #[arg(long, value_parser = rational_arg)]
    pub t: Option<BigRational>,
    /// Homological degree for `limits` and `approx`.
    #[arg(long)]
    pub k: Option<usize>,
    /// Comma-separated scales for `approx`.
    #[arg(long, value_parser = rational_arg, value_delimiter = ',')]
    pub sample_eps: Option<Vec<BigRational>>,
    /// Also write the filtered complex for `ph` and `blurred` to this file.
    #[arg(long)]
    pub dump_complex: Option<PathBuf>,
}

/// Everything a run produces besides its exit status.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunOutput {
    pub stdout: String,
    pub warnings: Vec<String>,
    /// Filtered complex text, when requested.
    pub complex: Option<String>,
}

impl RunConfig {
    fn validate(&self) -> Result<()> {
        if self.max_generators == 0 || self.max_cells == 0 {
            return Err(Error::Usage("resource caps must be positive".into()));
        }
        if self.l_max.as_ref().is_some_and(|l| l.is_negative()) {
            return Err(Error::Usage("--l-max must be non-negative".into()));
        }
        if matches!(self.command, Command::Ph | Command::Blurred | Command::Limits | Command::Approx) {
            crate::chain::check_prime(self.prime)?;
        }
        Ok(())
    }
}

pub fn load_space(text: &str, metric: Option<PointMetric>, warnings: &mut Vec<String>) -> Result<FiniteMetricSpace> {
    match metric {
        None => parse_distance_matrix(text),
        Some(m) => {
            let snapped = snap_point_cloud(&parse_point_cloud(text)?, m)?;
            warnings.extend(snapped.warning);
            Ok(snapped.space)
        }
    }
}

fn barcode_text(b: &Barcode) -> String {
    let incomplete = b.incomplete_degrees();
    let mut s = String::new();
    if !incomplete.is_empty() {
        let ks: Vec<String> = incomplete.iter().map(|k| k.to_string()).collect();
        let _ = writeln!(s, "# incomplete degrees (truncated at dimension {}): {}", b.complete_below, ks.join(" "));
    }
    s + &b.to_tsv()
}

/// Run one command on already-loaded input text.
pub fn run_on_text(config: &RunConfig, text: &str) -> Result<RunOutput> {
    config.validate()?;
    let mut out = RunOutput::default();
    let space = load_space(text, config.metric, &mut out.warnings)?;
    let delta = space.min_positive_distance().unwrap_or_else(BigRational::zero);
    let diameter = space.diameter();
    match config.command {
        Command::Magnitude => {
            out.stdout = format!("{}\n", magnitude_rational(&space)?);
        }
        Command::Magfun => {
            let t = config.t.as_ref().ok_or_else(|| Error::Usage("magfun needs --t".into()))?;
            let v = magnitude_function_eval(&space, t, config.precision)?;
            out.stdout = format!("{}\t{}\n", v.t, v.decimal);
        }
        Command::Mh => {
            let n_max = config.n_max.unwrap_or(3);
            let l_max = config.l_max.clone().unwrap_or_else(|| &delta * BigInt::from(n_max));
            out.stdout = magnitude_homology_with_cap(&space, n_max, &l_max, config.mode, config.max_generators)?.to_tsv();
        }
        Command::Euler => {
            let n_max = config.n_max.unwrap_or(3);
            let l_max = config.l_max.clone().unwrap_or_else(|| &delta * BigInt::from(n_max));
            out.stdout = euler_check(&space, n_max, &l_max)?.to_tsv();
        }
        Command::Ph | Command::Blurred => {
            let dim_max = config.n_max.unwrap_or(2);
            let complex = if config.command == Command::Ph {
                let eps = config.l_max.clone().unwrap_or(diameter);
                build_vietoris_rips_with_cap(&space, dim_max, &eps, config.max_cells)?
            } else {
                let eps = config.l_max.clone().unwrap_or_else(|| &diameter * BigInt::from(dim_max.max(1)));
                build_enriched_nerve_with_cap(&space, dim_max, &eps, config.max_cells)?
            };
            if config.dump_complex.is_some() {
                out.complex = Some(complex.to_text());
            }
            out.stdout = barcode_text(&reduce_persistence(&complex, config.prime)?);
        }
        Command::Limits => {
            let k_max = config.k.unwrap_or(1);
            let threshold = stabilization_threshold(&space).map_or("none".to_string(), |d| d.to_string());
            let mut s = format!("# stabilization threshold: {threshold}\n");
            for k in 0..=k_max {
                let nerve = limit_homology(&space, k, ComplexKind::Nerve, config.prime)?;
                let rips = limit_homology(&space, k, ComplexKind::Rips, config.prime)?;
                let ordinary = ordinary_mh_limit(&space, k)?.rank;
                let _ = writeln!(s, "{k}\t{nerve}\t{rips}\t{ordinary}");
            }
            out.stdout = s;
        }
        Command::Approx => {
            let k = config.k.unwrap_or(1);
            let sample = config.sample_eps.clone().unwrap_or_else(|| {
                let mut v = vec![&delta / BigInt::from(2), delta.clone(), diameter.clone()];
                v.dedup();
                v
            });
            let report = c_approximation_check(&space, k, config.prime, &sample)?;
            out.stdout = format!("{}\n{}", report.to_text(), report.to_tsv());
        }
    }
    Ok(out)
}

/// Size the global worker pool from the environment.
pub fn init_threads(var: Option<String>) -> Result<()> {
    let Some(v) = var else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Usage(format!("{THREADS_VAR} must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Usage(format!("cannot start {n} worker threads: {e}")))
}

/// Read input, run, write results; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return 0;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            eprintln!("error:usage: {first}");
            return 1;
        }
    };
    match execute(&config) {
        Ok(warnings) => {
            for w in warnings {
                eprintln!("{w}");
            }
            0
        }
        Err(e) => {
            eprintln!("error:{}: {}", e.kind().as_str(), e.to_string().replace('\n', " "));
            e.kind().exit_code()
        }
    }
}

fn execute(config: &RunConfig) -> Result<Vec<String>> {
    init_threads(std::env::var(THREADS_VAR).ok())?;
    let text = if config.input.as_os_str() == "-" {
        std::io::read_to_string(std::io::stdin())
    } else {
        std::fs::read_to_string(&config.input)
    }
    .map_err(|e| Error::Usage(format!("cannot read {}: {e}", config.input.display())))?;
    let out = run_on_text(config, &text)?;
    if let (Some(path), Some(complex)) = (&config.dump_complex, &out.complex) {
        std::fs::write(path, complex).map_err(|e| Error::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    match &config.output {
        Some(path) => std::fs::write(path, &out.stdout)
            .map_err(|e| Error::Usage(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{}", out.stdout),
    }
    Ok(out.warnings)
}
