//! Job configuration: the normalized form every invocation reduces to,
//! whether it arrived as command-line flags or as a flat key = value file.

use std::fmt;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    EvalMean,
    CheckFe,
    Construct,
    Classify,
    Report,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::EvalMean => "eval-mean",
            Command::CheckFe => "check-fe",
            Command::Construct => "construct",
            Command::Classify => "classify",
            Command::Report => "report",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "eval-mean" => Some(Command::EvalMean),
            "check-fe" => Some(Command::CheckFe),
            "construct" => Some(Command::Construct),
            "classify" => Some(Command::Classify),
            "report" => Some(Command::Report),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// One fully validated job. Optional fields are per-command; `validate`
/// enforces the cross-field rules before anything runs.
#[derive(Debug, Clone)]
pub struct JobConfig {
    pub command: Command,
    pub phi: Option<String>,
    pub f: Option<String>,
    pub g: Option<String>,
    pub h: Option<String>,
    pub kind: Option<String>,
    pub domain: Option<(f64, f64)>,
    pub t: Option<f64>,
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    pub kernel_p: Option<f64>,
    pub coeffs: Option<[f64; 4]>,
    pub poly: Option<[f64; 3]>,
    pub grid: Option<usize>,
    pub weighted: bool,
    pub seed: u64,
    pub tolerance_overrides: Vec<(String, f64)>,
    pub output: Option<PathBuf>,
    pub format: Format,
}

impl JobConfig {
    pub fn new(command: Command) -> Self {
        JobConfig {
            command,
            phi: None,
            f: None,
            g: None,
            h: None,
            kind: None,
            domain: None,
            t: None,
            points: Vec::new(),
            weights: Vec::new(),
            kernel_p: None,
            coeffs: None,
            poly: None,
            grid: None,
            weighted: false,
            seed: 42,
            tolerance_overrides: Vec::new(),
            output: None,
            format: Format::Json,
        }
    }

    /// Cross-field validation shared by both input routes.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if let Some((lo, hi)) = self.domain {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(ConfigError::field(
                    "domain",
                    format!("lower bound must be finite and below the upper bound, got {lo} {hi}"),
                ));
            }
        }
        if let Some(t) = self.t {
            if !(t > 0.0 && t < 1.0) {
                return Err(ConfigError::field(
                    "t",
                    format!("weight must lie strictly inside (0, 1), got {t}"),
                ));
            }
        }
        if !self.weights.is_empty() && self.weights.len() != self.points.len() {
            return Err(ConfigError::field(
                "weights",
                format!(
                    "expected {} entries to match the points, got {}",
                    self.points.len(),
                    self.weights.len()
                ),
            ));
        }
        for (name, value) in &self.tolerance_overrides {
            if !(value.is_finite() && *value > 0.0) {
                return Err(ConfigError::field(
                    name,
                    format!("tolerance must be positive and finite, got {value}"),
                ));
            }
        }
        match self.command {
            Command::EvalMean => {
                match self.kind.as_deref() {
                    Some("quasi") => {
                        self.require(self.phi.is_some(), "phi", "quasi means need a generator")?
                    }
                    Some("bajraktarevic") => self.require(
                        self.f.is_some() && self.g.is_some(),
                        "f",
                        "Bajraktarevic means need both generators f and g",
                    )?,
                    Some(other) => {
                        return Err(ConfigError::field(
                            "kind",
                            format!("expected 'quasi' or 'bajraktarevic', got '{other}'"),
                        ))
                    }
                    None => return Err(ConfigError::field("kind", "missing mean kind")),
                }
                self.require(self.points.len() >= 2, "points", "need at least two points")?;
            }
            Command::CheckFe => {
                self.require(self.phi.is_some(), "phi", "missing generator")?;
                self.require(self.f.is_some(), "f", "missing multiplier function")?;
                self.require(self.domain.is_some(), "domain", "missing domain")?;
                self.require(self.t.is_some(), "t", "missing weight")?;
            }
            Command::Construct => {
                let kernel = self.kernel_p.is_some() || self.coeffs.is_some();
                let poly = self.poly.is_some();
                if kernel == poly {
                    return Err(ConfigError::field(
                        "kernel_p",
                        "give exactly one of the kernel route (kernel_p + coeffs) \
                         or the polynomial route (poly)",
                    ));
                }
                if kernel {
                    self.require(self.kernel_p.is_some(), "kernel_p", "missing parameter")?;
                    self.require(self.coeffs.is_some(), "coeffs", "missing coefficients")?;
                }
                self.require(self.domain.is_some(), "domain", "missing domain")?;
            }
            Command::Classify => {
                self.require(self.f.is_some(), "f", "missing generator")?;
                self.require(self.g.is_some(), "g", "missing generator")?;
                self.require(self.domain.is_some(), "domain", "missing domain")?;
            }
            Command::Report => {
                self.require(self.f.is_some(), "f", "missing generator")?;
                self.require(self.g.is_some(), "g", "missing generator")?;
                self.require(self.domain.is_some(), "domain", "missing domain")?;
            }
        }
        Ok(())
    }

    fn require(&self, ok: bool, field: &str, msg: &str) -> Result<(), ConfigError> {
        if ok {
            Ok(())
        } else {
            Err(ConfigError::field(field, msg))
        }
    }
}

/// Invalid configuration, tagged with the source line (file route) or the
/// offending field (either route).
#[derive(Debug, Clone)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub field: Option<String>,
    pub message: String,
}

impl ConfigError {
    fn at_line(line: usize, message: impl Into<String>) -> Self {
        ConfigError {
            line: Some(line),
            field: None,
            message: message.into(),
        }
    }

    pub fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError {
            line: None,
            field: Some(field.into()),
            message: message.into(),
        }
    }

    pub fn plain(message: impl Into<String>) -> Self {
        ConfigError {
            line: None,
            field: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.line, &self.field) {
            (Some(line), Some(field)) => {
                write!(out, "config error at line {line}, key '{field}': {}", self.message)
            }
            (Some(line), None) => write!(out, "config error at line {line}: {}", self.message),
            (None, Some(field)) => write!(out, "config error in '{field}': {}", self.message),
            (None, None) => write!(out, "config error: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

const TOLERANCE_KEYS: [&str; 7] = [
    "tol_fe_residual",
    "tol_identity",
    "tol_derivative",
    "tol_fit",
    "tol_mean_equality",
    "tol_root",
    "tol_quadrature",
];

/// Parse the flat `key = value` job format: one directive per line,
/// `#` starts a comment, whitespace-separated lists.
pub fn parse_config(text: &str) -> Result<JobConfig, ConfigError> {
    let mut command = None;
    let mut directives: Vec<(usize, String, String)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::at_line(
                line_no,
                format!("expected 'key = value', got '{line}'"),
            ));
        };
        let key = key.trim().replace('-', "_");
        let value = value.trim().to_string();
        if value.is_empty() {
            return Err(ConfigError::at_line(line_no, format!("key '{key}' has no value")));
        }
        if key == "command" {
            command = Some((line_no, value));
        } else {
            directives.push((line_no, key, value));
        }
    }
    let Some((cmd_line, cmd_value)) = command else {
        return Err(ConfigError::field("command", "missing required key"));
    };
    let Some(cmd) = Command::parse(&cmd_value) else {
        return Err(ConfigError::at_line(
            cmd_line,
            format!("unknown command '{cmd_value}'"),
        ));
    };
    let mut job = JobConfig::new(cmd);
    for (line_no, key, value) in directives {
        apply_directive(&mut job, line_no, &key, &value)?;
    }
    Ok(job)
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(pos) => &line[..pos],
        None => line,
    }
}

fn apply_directive(
    job: &mut JobConfig,
    line: usize,
    key: &str,
    value: &str,
) -> Result<(), ConfigError> {
    let bad = |msg: String| ConfigError::at_line(line, msg);
    match key {
        "phi" => job.phi = Some(value.to_string()),
        "f" => job.f = Some(value.to_string()),
        "g" => job.g = Some(value.to_string()),
        "h" => job.h = Some(value.to_string()),
        "kind" => job.kind = Some(value.to_string()),
        "domain" => {
            let v = parse_floats(value).map_err(|e| bad(format!("domain: {e}")))?;
            if v.len() != 2 {
                return Err(bad(format!("domain needs exactly 2 numbers, got {}", v.len())));
            }
            job.domain = Some((v[0], v[1]));
        }
        "t" => job.t = Some(parse_float(value).map_err(|e| bad(format!("t: {e}")))?),
        "points" => job.points = parse_floats(value).map_err(|e| bad(format!("points: {e}")))?,
        "weights" => job.weights = parse_floats(value).map_err(|e| bad(format!("weights: {e}")))?,
        "kernel_p" => {
            job.kernel_p = Some(parse_float(value).map_err(|e| bad(format!("kernel_p: {e}")))?)
        }
        "coeffs" => {
            let v = parse_floats(value).map_err(|e| bad(format!("coeffs: {e}")))?;
            let arr: [f64; 4] = v
                .try_into()
                .map_err(|v: Vec<f64>| bad(format!("coeffs needs 4 numbers, got {}", v.len())))?;
            job.coeffs = Some(arr);
        }
        "poly" => {
            let v = parse_floats(value).map_err(|e| bad(format!("poly: {e}")))?;
            let arr: [f64; 3] = v
                .try_into()
                .map_err(|v: Vec<f64>| bad(format!("poly needs 3 numbers, got {}", v.len())))?;
            job.poly = Some(arr);
        }
        "grid" => {
            job.grid = Some(
                value
                    .parse::<usize>()
                    .map_err(|_| bad(format!("grid must be a positive integer, got '{value}'")))?,
            )
        }
        "weighted" => {
            job.weighted = match value {
                "true" => true,
                "false" => false,
                other => return Err(bad(format!("weighted must be true or false, got '{other}'"))),
            }
        }
        "seed" => {
            job.seed = value
                .parse::<u64>()
                .map_err(|_| bad(format!("seed must be a non-negative integer, got '{value}'")))?
        }
        "output" => job.output = Some(PathBuf::from(value)),
        "format" => {
            job.format = match value {
                "json" => Format::Json,
                "csv" => Format::Csv,
                other => return Err(bad(format!("format must be json or csv, got '{other}'"))),
            }
        }
        k if TOLERANCE_KEYS.contains(&k) => {
            let v = parse_float(value).map_err(|e| bad(format!("{k}: {e}")))?;
            job.tolerance_overrides.push((k.to_string(), v));
        }
        other => return Err(bad(format!("unknown key '{other}'"))),
    }
    Ok(())
}

fn parse_float(s: &str) -> Result<f64, String> {
    s.parse::<f64>()
        .map_err(|_| format!("expected a number, got '{s}'"))
}

fn parse_floats(s: &str) -> Result<Vec<f64>, String> {
    s.split_whitespace().map(parse_float).collect()
}
