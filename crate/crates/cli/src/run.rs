//! Job dispatcher: validated configs map onto the library operations, and
//! verdicts map onto exit codes (0 pass, 1 fail, 2 error at the callers).

use crate::config::{Command, ConfigError, Format, JobConfig};
use crate::report::{
    deliver, render, residual_grid_csv, CheckFePayload, ClassifyPayload, ConstructPayload,
    Envelope, EvalPayload, OraclePayload, ProfilePayload,
};
use meanlab::characterize::{
    classify_m3, classify_m4, construct_from_kernel, construct_from_polynomial, fe_residual,
    weighted_equality_oracle, FEInstance, FEReport, Verdict,
};
use meanlab::generator::{from_expr, GeneratorRef};
use meanlab::means::{bajraktarevic_mean, quasi_arithmetic_mean, GeneratorPair, WeightedSample};
use meanlab::wronskians::{QuadraticPolynomial, WronskianProfile};
use meanlab::{Interval, Tolerances};
use std::fmt;
use std::path::PathBuf;

const DEFAULT_FE_GRID: usize = 64;
/// Constructed-instance pass thresholds on the FE residual.
const KERNEL_PASS: f64 = 1e-10;
const POLY_PASS: f64 = 1e-8;

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Core(meanlab::Error),
    Render(String),
    Io {
        path: Option<PathBuf>,
        source: std::io::Error,
    },
}

impl fmt::Display for CliError {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(out, "{e}"),
            CliError::Core(e) => write!(out, "error: {e}"),
            CliError::Render(msg) => write!(out, "error: {msg}"),
            CliError::Io { path, source } => match path {
                Some(p) => write!(out, "error: failed to write {}: {source}", p.display()),
                None => write!(out, "error: {source}"),
            },
        }
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<meanlab::Error> for CliError {
    fn from(e: meanlab::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<meanlab::error::ParseError> for CliError {
    fn from(e: meanlab::error::ParseError) -> Self {
        CliError::Core(e.into())
    }
}

/// Run one job to completion. `Ok` carries the process exit code (0 pass,
/// 1 fail); every error path exits 2 at the caller.
pub fn run(job: &JobConfig) -> Result<i32, CliError> {
    job.validate()?;
    let scale = tolerance_scale()?;
    let tol = effective_tolerances(job, scale)?;
    match job.command {
        Command::EvalMean => run_eval(job, &tol),
        Command::CheckFe => run_check_fe(job, &tol),
        Command::Construct => run_construct(job, &tol, scale),
        Command::Classify => run_classify(job, &tol),
        Command::Report => run_report(job),
    }
}

/// MEANLAB_TOLERANCE_SCALE multiplies every tolerance; default 1.
fn tolerance_scale() -> Result<f64, CliError> {
    match std::env::var("MEANLAB_TOLERANCE_SCALE") {
        Ok(raw) => {
            let value: f64 = raw.trim().parse().map_err(|_| {
                ConfigError::field(
                    "MEANLAB_TOLERANCE_SCALE",
                    format!("must be a number, got '{raw}'"),
                )
            })?;
            if !(value.is_finite() && value > 0.0) {
                return Err(ConfigError::field(
                    "MEANLAB_TOLERANCE_SCALE",
                    format!("must be positive and finite, got {value}"),
                )
                .into());
            }
            Ok(value)
        }
        Err(_) => Ok(1.0),
    }
}

fn effective_tolerances(job: &JobConfig, scale: f64) -> Result<Tolerances, CliError> {
    let mut tol = Tolerances::default().scaled(scale);
    for (key, value) in &job.tolerance_overrides {
        match key.as_str() {
            "tol_fe_residual" => tol.fe_residual = *value,
            "tol_identity" => tol.identity = *value,
            "tol_derivative" => tol.derivative = *value,
            "tol_fit" => tol.fit = *value,
            "tol_mean_equality" => tol.mean_equality = *value,
            "tol_root" => tol.root = *value,
            "tol_quadrature" => tol.quadrature = *value,
            other => {
                return Err(ConfigError::field(other, "unknown tolerance override").into());
            }
        }
    }
    Ok(tol)
}

fn emit<P: serde::Serialize>(
    job: &JobConfig,
    envelope: &Envelope<P>,
    csv: Option<String>,
) -> Result<(), CliError> {
    let text = render(envelope, job.format, csv).map_err(CliError::Render)?;
    deliver(&text, job.output.as_deref()).map_err(|source| CliError::Io {
        path: job.output.clone(),
        source,
    })
}

fn build_sample(job: &JobConfig) -> Result<WeightedSample, CliError> {
    let weights = if job.weights.is_empty() {
        vec![1.0; job.points.len()]
    } else {
        job.weights.clone()
    };
    Ok(WeightedSample::new(job.points.clone(), weights)?)
}

fn job_interval(job: &JobConfig) -> Result<Interval, CliError> {
    let (lo, hi) = job.domain.expect("validated");
    Ok(Interval::new(lo, hi)?)
}

fn build_pair(job: &JobConfig) -> Result<GeneratorPair, CliError> {
    let f = from_expr(job.f.as_ref().expect("validated"))?;
    let g = from_expr(job.g.as_ref().expect("validated"))?;
    Ok(GeneratorPair::new(f, g, job_interval(job)?)?)
}

fn run_eval(job: &JobConfig, tol: &Tolerances) -> Result<i32, CliError> {
    let sample = build_sample(job)?;
    let (kind, value): (&'static str, f64) = match job.kind.as_deref().expect("validated") {
        "quasi" => {
            let phi = from_expr(job.phi.as_ref().expect("validated"))?;
            ("quasi", quasi_arithmetic_mean(phi.as_ref(), &sample, tol.root)?)
        }
        _ => {
            let f = from_expr(job.f.as_ref().expect("validated"))?;
            let g = from_expr(job.g.as_ref().expect("validated"))?;
            let domain = match job.domain {
                Some((lo, hi)) => Interval::new(lo, hi)?,
                None => inferred_domain(&sample)?,
            };
            let pair = GeneratorPair::new(f, g, domain)?;
            (
                "bajraktarevic",
                bajraktarevic_mean(&pair, &sample, tol.root)?,
            )
        }
    };
    let payload = EvalPayload {
        kind,
        n: sample.points().len(),
        value,
    };
    let envelope = Envelope::new("eval-mean", job.seed, None, payload);
    emit(job, &envelope, None)?;
    Ok(0)
}

/// Smallest interval strictly containing the sample, for mean evaluations
/// given without an explicit domain.
fn inferred_domain(sample: &WeightedSample) -> Result<Interval, CliError> {
    let (lo, hi) = sample.positive_bounds();
    let pad = (1e-3 * (hi - lo)).max(1e-3);
    Ok(Interval::new(lo - pad, hi + pad)?)
}

fn run_check_fe(job: &JobConfig, tol: &Tolerances) -> Result<i32, CliError> {
    let phi = from_expr(job.phi.as_ref().expect("validated"))?;
    let f = from_expr(job.f.as_ref().expect("validated"))?;
    let instance = FEInstance::new(phi, f, job.t.expect("validated"), job_interval(job)?)?;
    let report = fe_residual(&instance, job.grid.unwrap_or(DEFAULT_FE_GRID))?;
    let pass = report.trivial || report.max_residual <= tol.fe_residual;
    finish_fe(job, "check-fe", pass, report, |report| CheckFePayload {
        phi: instance.phi().name(),
        f: instance.f().name(),
        t: instance.t(),
        threshold: tol.fe_residual,
        fe: report,
    })
}

fn run_construct(job: &JobConfig, _tol: &Tolerances, scale: f64) -> Result<i32, CliError> {
    let domain = job_interval(job)?;
    let (instance, route, p, threshold) = if let Some(p) = job.kernel_p {
        let [a, b, c, d] = job.coeffs.expect("validated");
        let mut instance = construct_from_kernel(p, a, b, c, d, &domain)?;
        if let Some(t) = job.t {
            instance = instance.with_t(t)?;
        }
        (instance, "kernel", Some(p), KERNEL_PASS * scale)
    } else {
        let [alpha, beta, gamma] = job.poly.expect("validated");
        let poly = QuadraticPolynomial::new(alpha, beta, gamma);
        let t = job.t.unwrap_or(0.5);
        let instance = construct_from_polynomial(&poly, &domain, t)?;
        let p = poly.discriminant() / 4.0;
        (instance, "polynomial", Some(p), POLY_PASS * scale)
    };
    let report = fe_residual(&instance, job.grid.unwrap_or(DEFAULT_FE_GRID))?;
    let pass = report.max_residual <= threshold;
    finish_fe(job, "construct", pass, report, |report| ConstructPayload {
        route,
        phi: instance.phi().name(),
        f: instance.f().name(),
        t: instance.t(),
        p,
        threshold,
        fe: report,
    })
}

fn finish_fe<P: serde::Serialize>(
    job: &JobConfig,
    command: &'static str,
    pass: bool,
    report: FEReport,
    payload: impl FnOnce(FEReport) -> P,
) -> Result<i32, CliError> {
    let csv = matches!(job.format, Format::Csv).then(|| residual_grid_csv(&report));
    let envelope = Envelope::new(command, job.seed, Some(pass), payload(report));
    emit(job, &envelope, csv)?;
    Ok(i32::from(!pass))
}

fn run_classify(job: &JobConfig, tol: &Tolerances) -> Result<i32, CliError> {
    let pair = build_pair(job)?;
    if let Some(h_src) = &job.h {
        let h: GeneratorRef = from_expr(h_src)?;
        let t = job.t.unwrap_or(0.5);
        let outcome = weighted_equality_oracle(&pair, &h, t, tol)?;
        let pass = outcome.pass;
        let payload = OraclePayload {
            f: pair.f().name(),
            g: pair.g().name(),
            h: h.name(),
            t,
            oracle: outcome,
        };
        let envelope = Envelope::new("classify", job.seed, Some(pass), payload);
        emit(job, &envelope, None)?;
        return Ok(i32::from(!pass));
    }
    let report = if job.weighted {
        classify_m4(&pair, tol, job.seed)?
    } else {
        classify_m3(&pair, tol)?
    };
    let pass = matches!(report.verdict, Verdict::SymmetricQa | Verdict::WeightedQa);
    let payload = ClassifyPayload {
        f: pair.f().name(),
        g: pair.g().name(),
        weighted: job.weighted,
        report,
    };
    let envelope = Envelope::new("classify", job.seed, Some(pass), payload);
    emit(job, &envelope, None)?;
    Ok(i32::from(!pass))
}

fn run_report(job: &JobConfig) -> Result<i32, CliError> {
    let f = from_expr(job.f.as_ref().expect("validated"))?;
    let g = from_expr(job.g.as_ref().expect("validated"))?;
    let domain = job_interval(job)?;
    let n = job.grid.unwrap_or(meanlab::tolerances::GRID_POINTS);
    let profile = WronskianProfile::build(f.as_ref(), g.as_ref(), &domain, n)?;
    let csv = matches!(job.format, Format::Csv).then(|| profile.to_csv());
    let payload = ProfilePayload {
        f: f.name(),
        g: g.name(),
        profile,
    };
    let envelope = Envelope::new("report", job.seed, Some(true), payload);
    emit(job, &envelope, csv)?;
    Ok(0)
}
