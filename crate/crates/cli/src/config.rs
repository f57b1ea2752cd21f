//! Flat dotted-key configuration: `section.key = value` lines, `#` comments,
//! diff-friendly. Every key is documented in docs/config-schema.txt. Any key
//! can be overridden through the environment with the `QUADGPE_` prefix
//! (`QUADGPE_MODEL_MU=2.0` sets `model.mu`; the first underscore after the
//! prefix separates the section).

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use quadgpe::QuadraticModel;

/// Environment override prefix.
pub const ENV_PREFIX: &str = "QUADGPE_";

#[derive(Debug)]
pub struct ConfigError {
    pub location: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn err(location: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError { location: location.into(), message: message.into() }
}

/// Which top-level pipeline to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Workflow {
    Exact,
    Evolve,
    Verify,
    Sweep,
}

impl Workflow {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "exact" => Some(Self::Exact),
            "evolve" => Some(Self::Evolve),
            "verify" => Some(Self::Verify),
            "sweep" => Some(Self::Sweep),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::Evolve => "evolve",
            Self::Verify => "verify",
            Self::Sweep => "sweep",
        }
    }
}

/// Fully parsed and validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: QuadraticModel,
    pub kappa_tilde_override: Option<f64>,
    /// Optional grid overrides; when absent the grid is sized from the model.
    pub grid_points: Option<usize>,
    pub grid_half_width: Option<f64>,
    pub dt: f64,
    pub t_final: f64,
    pub record_every: usize,
    pub workflow: Option<Workflow>,
    pub nu_list: Vec<usize>,
    pub alpha_list: Vec<Complex64>,
    pub out_dir: Option<PathBuf>,
    pub sweep_key: Option<String>,
    pub sweep_values: Vec<f64>,
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: quadgpe::suite::default_model(),
            kappa_tilde_override: None,
            grid_points: None,
            grid_half_width: None,
            dt: 2e-4,
            t_final: 1.0,
            record_every: 500,
            workflow: None,
            nu_list: vec![0],
            alpha_list: vec![Complex64::new(0.0, 0.0)],
            out_dir: None,
            sweep_key: None,
            sweep_values: Vec::new(),
            workers: 1,
        }
    }
}

/// Parses the literal complex form `re`, `re+imi` or `re-imi`
/// (e.g. `0.5+0.5i`, `1-0.25i`, `0.7`).
pub fn parse_alpha(s: &str) -> Result<Complex64, String> {
    let t = s.trim();
    if t.is_empty() {
        return Err("empty complex literal".into());
    }
    if let Some(body) = t.strip_suffix('i') {
        // split at the last explicit sign that is not the leading one and
        // not part of an exponent
        let bytes = body.as_bytes();
        let mut split = None;
        for (i, &b) in bytes.iter().enumerate().skip(1) {
            if (b == b'+' || b == b'-') && bytes[i - 1] != b'e' && bytes[i - 1] != b'E' {
                split = Some(i);
            }
        }
        let i = split.ok_or_else(|| {
            format!("'{t}' has no explicit sign before the imaginary part (use re+imi)")
        })?;
        let re: f64 =
            body[..i].parse().map_err(|_| format!("bad real part '{}'", &body[..i]))?;
        let im: f64 =
            body[i..].parse().map_err(|_| format!("bad imaginary part '{}'", &body[i..]))?;
        Ok(Complex64::new(re, im))
    } else {
        let re: f64 = t.parse().map_err(|_| format!("bad real literal '{t}'"))?;
        Ok(Complex64::new(re, 0.0))
    }
}

/// Raw key/value pairs with their source locations, ready for validation.
struct RawConfig {
    entries: BTreeMap<String, (String, String)>, // key -> (value, location)
}

impl RawConfig {
    fn from_text(text: &str, file_label: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line = raw_line.trim();
            let location = format!("{file_label}:{}", idx + 1);
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(&location, format!("expected 'key = value', got '{line}'")))?;
            let key = key.trim().to_string();
            if key.is_empty() {
                return Err(err(&location, "empty key"));
            }
            entries.insert(key, (value.trim().to_string(), location));
        }
        Ok(Self { entries })
    }

    fn apply_env(&mut self) {
        for (var, value) in std::env::vars() {
            if let Some(rest) = var.strip_prefix(ENV_PREFIX) {
                if let Some((section, key)) = rest.split_once('_') {
                    let dotted =
                        format!("{}.{}", section.to_lowercase(), key.to_lowercase());
                    self.entries.insert(dotted, (value, format!("env {var}")));
                }
            }
        }
    }

    fn take(&mut self, key: &str) -> Option<(String, String)> {
        self.entries.remove(key)
    }
}

fn parse_f64(value: &str, location: &str) -> Result<f64, ConfigError> {
    value.parse().map_err(|_| err(location, format!("expected a number, got '{value}'")))
}

fn parse_usize(value: &str, location: &str) -> Result<usize, ConfigError> {
    value
        .parse()
        .map_err(|_| err(location, format!("expected a non-negative integer, got '{value}'")))
}

/// Reads, merges (file, then environment) and validates a configuration.
/// `path` may be absent, in which case only defaults and the environment
/// apply.
pub fn load(path: Option<&Path>) -> Result<RunConfig, ConfigError> {
    let (text, label) = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| err(p.display().to_string(), format!("cannot read config: {e}")))?;
            (text, p.display().to_string())
        }
        None => (String::new(), "<defaults>".to_string()),
    };
    let mut raw = RawConfig::from_text(&text, &label)?;
    raw.apply_env();
    let mut cfg = RunConfig::default();

    let float_field = |raw: &mut RawConfig, key: &str, slot: &mut f64| -> Result<(), ConfigError> {
        if let Some((v, loc)) = raw.take(key) {
            *slot = parse_f64(&v, &loc)?;
        }
        Ok(())
    };
    float_field(&mut raw, "model.mu", &mut cfg.model.mu)?;
    float_field(&mut raw, "model.rho", &mut cfg.model.rho)?;
    float_field(&mut raw, "model.sigma", &mut cfg.model.sigma)?;
    float_field(&mut raw, "model.a", &mut cfg.model.a)?;
    float_field(&mut raw, "model.b", &mut cfg.model.b)?;
    float_field(&mut raw, "model.c", &mut cfg.model.c)?;
    float_field(&mut raw, "model.kappa", &mut cfg.model.kappa)?;
    float_field(&mut raw, "model.hbar", &mut cfg.model.hbar)?;
    float_field(&mut raw, "evolution.dt", &mut cfg.dt)?;
    float_field(&mut raw, "evolution.t_final", &mut cfg.t_final)?;

    if let Some((v, loc)) = raw.take("model.kappa_tilde_override") {
        cfg.kappa_tilde_override = Some(parse_f64(&v, &loc)?);
    }
    if let Some((v, loc)) = raw.take("grid.points") {
        let n = parse_usize(&v, &loc)?;
        if !n.is_power_of_two() || n < 64 {
            return Err(err(&loc, format!("grid.points must be a power of two >= 64, got {n}")));
        }
        cfg.grid_points = Some(n);
    }
    if let Some((v, loc)) = raw.take("grid.half_width") {
        let hw = parse_f64(&v, &loc)?;
        if !(hw > 0.0) {
            return Err(err(&loc, format!("grid.half_width must be > 0, got {hw}")));
        }
        cfg.grid_half_width = Some(hw);
    }
    if let Some((v, loc)) = raw.take("evolution.record_every") {
        let n = parse_usize(&v, &loc)?;
        if n == 0 {
            return Err(err(&loc, "evolution.record_every must be positive"));
        }
        cfg.record_every = n;
    }
    if let Some((v, loc)) = raw.take("task.workflow") {
        cfg.workflow = Some(
            Workflow::parse(&v).ok_or_else(|| {
                err(&loc, format!("workflow must be exact|evolve|verify|sweep, got '{v}'"))
            })?,
        );
    }
    if let Some((v, loc)) = raw.take("task.nu") {
        cfg.nu_list = v
            .split(',')
            .map(|item| {
                let nu = parse_usize(item.trim(), &loc)?;
                if nu > quadgpe::closedform::MAX_NU {
                    return Err(err(
                        &loc,
                        format!("nu = {nu} exceeds the supported maximum {}", quadgpe::closedform::MAX_NU),
                    ));
                }
                Ok(nu)
            })
            .collect::<Result<_, _>>()?;
        if cfg.nu_list.is_empty() {
            return Err(err(&loc, "task.nu must list at least one entry"));
        }
    }
    if let Some((v, loc)) = raw.take("task.alpha") {
        cfg.alpha_list = v
            .split(',')
            .map(|item| parse_alpha(item).map_err(|m| err(&loc, m)))
            .collect::<Result<_, _>>()?;
        if cfg.alpha_list.is_empty() {
            return Err(err(&loc, "task.alpha must list at least one entry"));
        }
    }
    if let Some((v, _)) = raw.take("task.out_dir") {
        cfg.out_dir = Some(PathBuf::from(v));
    }
    if let Some((v, _)) = raw.take("sweep.key") {
        cfg.sweep_key = Some(v);
    }
    if let Some((v, loc)) = raw.take("sweep.values") {
        cfg.sweep_values = v
            .split(',')
            .map(|item| parse_f64(item.trim(), &loc))
            .collect::<Result<_, _>>()?;
    }
    if let Some((v, loc)) = raw.take("task.workers") {
        let n = parse_usize(&v, &loc)?;
        if n == 0 {
            return Err(err(&loc, "task.workers must be positive"));
        }
        cfg.workers = n;
    }

    if let Some((_, (_, loc))) = raw.entries.iter().next() {
        let key = raw.entries.keys().next().unwrap();
        return Err(err(loc, format!("unknown key '{key}'")));
    }

    // structural checks that need the whole picture
    QuadraticModel::new(
        cfg.model.mu,
        cfg.model.rho,
        cfg.model.sigma,
        cfg.model.a,
        cfg.model.b,
        cfg.model.c,
        cfg.model.kappa,
        cfg.model.hbar,
    )
    .map_err(|e| err(&label, e.to_string()))?;
    if !(cfg.dt > 0.0) {
        return Err(err(&label, format!("evolution.dt must be > 0, got {}", cfg.dt)));
    }
    if !(cfg.t_final >= 0.0) {
        return Err(err(&label, format!("evolution.t_final must be >= 0, got {}", cfg.t_final)));
    }
    Ok(cfg)
}

/// Applies a sweep value to one dotted model key.
pub fn apply_model_key(model: &mut QuadraticModel, key: &str, value: f64) -> Result<(), String> {
    match key {
        "model.mu" => model.mu = value,
        "model.rho" => model.rho = value,
        "model.sigma" => model.sigma = value,
        "model.a" => model.a = value,
        "model.b" => model.b = value,
        "model.c" => model.c = value,
        "model.kappa" => model.kappa = value,
        "model.hbar" => model.hbar = value,
        other => return Err(format!("'{other}' is not a sweepable model key")),
    }
    Ok(())
}
