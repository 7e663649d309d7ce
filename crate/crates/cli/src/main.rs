use clap::{Args, Parser, Subcommand};
use meanlab_cli::config::{parse_config, Command, ConfigError, Format, JobConfig};
use std::path::PathBuf;
use std::process::exit;

#[derive(Parser)]
#[command(
    name = "meanlab",
    version,
    about = "Weighted quasi-arithmetic and Bajraktarevic mean laboratory"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct CommonArgs {
    /// Seed for randomized validation grids.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Report destination; standard out when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Report format: json or csv.
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a weighted quasi-arithmetic or Bajraktarevic mean.
    EvalMean {
        /// Mean family: quasi or bajraktarevic.
        #[arg(long)]
        kind: String,
        /// Generator expression for quasi-arithmetic means.
        #[arg(long)]
        phi: Option<String>,
        /// First generator expression for Bajraktarevic means.
        #[arg(long)]
        f: Option<String>,
        /// Second generator expression for Bajraktarevic means.
        #[arg(long)]
        g: Option<String>,
        /// Evaluation domain (lo hi); inferred from the points if omitted.
        #[arg(long, num_args = 2, allow_negative_numbers = true)]
        domain: Option<Vec<f64>>,
        /// Sample points.
        #[arg(long, num_args = 1.., allow_negative_numbers = true, required = true)]
        points: Vec<f64>,
        /// Weights matching the points; all 1 if omitted.
        #[arg(long, num_args = 1.., allow_negative_numbers = true)]
        weights: Vec<f64>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Check the fundamental functional equation on a residual grid.
    CheckFe {
        /// Strictly monotone generator expression.
        #[arg(long)]
        phi: String,
        /// Multiplier function expression.
        #[arg(long)]
        f: String,
        /// Two-point weight in (0, 1).
        #[arg(long)]
        t: f64,
        /// Domain (lo hi).
        #[arg(long, num_args = 2, allow_negative_numbers = true, required = true)]
        domain: Vec<f64>,
        /// Residual grid resolution per axis.
        #[arg(long)]
        grid: Option<usize>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Build a functional-equation solution from a kernel or a polynomial.
    Construct {
        /// Kernel parameter p for the kernel route.
        #[arg(long, allow_negative_numbers = true)]
        kernel_p: Option<f64>,
        /// Kernel route coefficients (a b c d) with ad - bc nonzero.
        #[arg(long, num_args = 4, allow_negative_numbers = true)]
        coeffs: Option<Vec<f64>>,
        /// Polynomial route coefficients (alpha beta gamma), constant first.
        #[arg(long, num_args = 3, allow_negative_numbers = true)]
        poly: Option<Vec<f64>>,
        /// Two-point weight; 1/2 if omitted.
        #[arg(long)]
        t: Option<f64>,
        /// Domain (lo hi).
        #[arg(long, num_args = 2, allow_negative_numbers = true, required = true)]
        domain: Vec<f64>,
        /// Residual grid resolution per axis.
        #[arg(long)]
        grid: Option<usize>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Classify a generator pair, or test equality against a given h.
    Classify {
        /// First generator expression (positive on the domain).
        #[arg(long)]
        f: String,
        /// Second generator expression.
        #[arg(long)]
        g: String,
        /// Domain (lo hi).
        #[arg(long, num_args = 2, allow_negative_numbers = true, required = true)]
        domain: Vec<f64>,
        /// Run the all-weight classification instead of the two-variable one.
        #[arg(long)]
        weighted: bool,
        /// Quasi-arithmetic generator for the equality oracle.
        #[arg(long)]
        h: Option<String>,
        /// Two-point weight for the oracle; 1/2 if omitted.
        #[arg(long)]
        t: Option<f64>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Emit the Wronskian profile of a pair as a plot-ready table.
    Report {
        /// First generator expression.
        #[arg(long)]
        f: String,
        /// Second generator expression.
        #[arg(long)]
        g: String,
        /// Domain (lo hi).
        #[arg(long, num_args = 2, allow_negative_numbers = true, required = true)]
        domain: Vec<f64>,
        /// Number of grid rows.
        #[arg(long)]
        grid: Option<usize>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run a job described by a flat key = value config file.
    Job {
        /// Config file path.
        path: PathBuf,
    },
}

fn apply_common(job: &mut JobConfig, common: CommonArgs) -> Result<(), ConfigError> {
    job.seed = common.seed;
    job.output = common.output;
    job.format = match common.format.as_str() {
        "json" => Format::Json,
        "csv" => Format::Csv,
        other => {
            return Err(ConfigError::field(
                "format",
                format!("must be json or csv, got '{other}'"),
            ))
        }
    };
    Ok(())
}

fn two(field: &str, v: Vec<f64>) -> Result<(f64, f64), ConfigError> {
    if v.len() == 2 {
        Ok((v[0], v[1]))
    } else {
        Err(ConfigError::field(
            field,
            format!("needs exactly 2 numbers, got {}", v.len()),
        ))
    }
}

fn to_job(cmd: Cmd) -> Result<JobConfig, ConfigError> {
    match cmd {
        Cmd::EvalMean {
            kind,
            phi,
            f,
            g,
            domain,
            points,
            weights,
            common,
        } => {
            let mut job = JobConfig::new(Command::EvalMean);
            job.kind = Some(kind);
            job.phi = phi;
            job.f = f;
            job.g = g;
            job.domain = domain.map(|v| two("domain", v)).transpose()?;
            job.points = points;
            job.weights = weights;
            apply_common(&mut job, common)?;
            Ok(job)
        }
        Cmd::CheckFe {
            phi,
            f,
            t,
            domain,
            grid,
            common,
        } => {
            let mut job = JobConfig::new(Command::CheckFe);
            job.phi = Some(phi);
            job.f = Some(f);
            job.t = Some(t);
            job.domain = Some(two("domain", domain)?);
            job.grid = grid;
            apply_common(&mut job, common)?;
            Ok(job)
        }
        Cmd::Construct {
            kernel_p,
            coeffs,
            poly,
            t,
            domain,
            grid,
            common,
        } => {
            let mut job = JobConfig::new(Command::Construct);
            job.kernel_p = kernel_p;
            job.coeffs = coeffs
                .map(|v| {
                    <[f64; 4]>::try_from(v).map_err(|v| {
                        ConfigError::field("coeffs", format!("needs 4 numbers, got {}", v.len()))
                    })
                })
                .transpose()?;
            job.poly = poly
                .map(|v| {
                    <[f64; 3]>::try_from(v).map_err(|v| {
                        ConfigError::field("poly", format!("needs 3 numbers, got {}", v.len()))
                    })
                })
                .transpose()?;
            job.t = t;
            job.domain = Some(two("domain", domain)?);
            job.grid = grid;
            apply_common(&mut job, common)?;
            Ok(job)
        }
        Cmd::Classify {
            f,
            g,
            domain,
            weighted,
            h,
            t,
            common,
        } => {
            let mut job = JobConfig::new(Command::Classify);
            job.f = Some(f);
            job.g = Some(g);
            job.domain = Some(two("domain", domain)?);
            job.weighted = weighted;
            job.h = h;
            job.t = t;
            apply_common(&mut job, common)?;
            Ok(job)
        }
        Cmd::Report {
            f,
            g,
            domain,
            grid,
            common,
        } => {
            let mut job = JobConfig::new(Command::Report);
            job.f = Some(f);
            job.g = Some(g);
            job.domain = Some(two("domain", domain)?);
            job.grid = grid;
            apply_common(&mut job, common)?;
            Ok(job)
        }
        Cmd::Job { path } => {
            let text = std::fs::read_to_string(&path).map_err(|e| {
                ConfigError::plain(format!("cannot read {}: {e}", path.display()))
            })?;
            parse_config(&text)
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let job = match to_job(cli.command) {
        Ok(job) => job,
        Err(e) => {
            eprintln!("{e}");
            exit(2);
        }
    };
    match meanlab_cli::run(&job) {
        Ok(code) => exit(code),
        Err(e) => {
            eprintln!("{e}");
            exit(2);
        }
    }
}
