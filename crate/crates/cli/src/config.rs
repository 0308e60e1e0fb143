//! Run configuration: flags over config file over defaults.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::BufReader;
use std::path::PathBuf;

use deltawall::observables::time_grid;
use deltawall::{Mode, PotentialConfig, SpectralFunction, Tolerance, WaveField};

/// Keys accepted in a config file; identical to the long flag names.
pub const KEYS: [&str; 14] = [
    "L", "V0", "K", "sf", "x-grid", "t-grid", "upper", "fit-window", "out", "format", "tol-abs",
    "tol-rel", "gnuplot", "mode",
];

#[derive(Debug)]
pub enum CliError {
    /// Bad flag, config entry or file; carries the offending field.
    Usage(String),
    Lib(deltawall::Error),
    /// The verify suite ran and something failed.
    Verify { convergence: bool },
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Verify { convergence: true } => write!(f, "verification failed (convergence)"),
            CliError::Verify { convergence: false } => write!(f, "verification failed"),
        }
    }
}

impl From<deltawall::Error> for CliError {
    fn from(e: deltawall::Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Lib(e.into())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use deltawall::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Verify { convergence: true } => 3,
            CliError::Verify { convergence: false } => 4,
            CliError::Lib(E::Convergence { .. } | E::Fit { .. }) => 3,
            CliError::Lib(E::Io(_)) => 1,
            CliError::Lib(_) => 2,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn usage(field: &str, msg: impl fmt::Display) -> CliError {
    CliError::Usage(format!("{field}: {msg}"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub log: bool,
}

impl GridSpec {
    pub fn parse(field: &str, s: &str) -> CliResult<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(usage(field, "expected min:max:n[:log]"));
        }
        let min = parse_f64(field, parts[0])?;
        let max = parse_f64(field, parts[1])?;
        let count: usize = parts[2]
            .parse()
            .map_err(|_| usage(field, format!("bad count '{}'", parts[2])))?;
        let log = match parts.get(3) {
            None | Some(&"lin") => false,
            Some(&"log") => true,
            Some(other) => return Err(usage(field, format!("unknown spacing '{other}'"))),
        };
        if count < 2 {
            return Err(usage(field, "count must be at least 2"));
        }
        if !(min < max) {
            return Err(usage(field, "min must be below max"));
        }
        if log && !(min > 0.0) {
            return Err(usage(field, "log spacing needs min > 0"));
        }
        Ok(Self { min, max, count, log })
    }

    pub fn points(&self) -> Vec<f64> {
        time_grid(self.min, self.max, self.count, self.log)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SfSpec {
    Gaussian,
    Square,
    Table(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub length: f64,
    pub strength: f64,
    pub k: f64,
    pub sf: SfSpec,
    pub x_grid: Option<GridSpec>,
    pub t_grid: Option<GridSpec>,
    pub upper: Option<f64>,
    pub fit_window: Option<(f64, f64)>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub tol: Tolerance,
    pub gnuplot: bool,
    pub mode: Mode,
}

fn parse_f64(field: &str, s: &str) -> CliResult<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| usage(field, format!("not a number: '{s}'")))?;
    if !v.is_finite() {
        return Err(usage(field, "must be finite"));
    }
    Ok(v)
}

fn parse_bool(field: &str, s: &str) -> CliResult<bool> {
    match s.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(usage(field, format!("not a boolean: '{other}'"))),
    }
}

/// Reads `key=value` lines; `#` starts a comment, blank lines are skipped.
pub fn read_config_file(path: &str) -> CliResult<BTreeMap<String, String>> {
    let text = fs::read_to_string(path).map_err(|e| usage("config", format!("{path}: {e}")))?;
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| usage("config", format!("line {}: expected key=value", n + 1)))?;
        let k = k.trim();
        if !KEYS.contains(&k) {
            return Err(usage("config", format!("line {}: unknown key '{k}'", n + 1)));
        }
        map.insert(k.to_string(), v.trim().to_string());
    }
    Ok(map)
}

impl RunConfig {
    /// Builds the configuration from already-merged settings. `allow_free`
    /// admits V0 = 0 (verification of the free-particle limit).
    pub fn from_settings(s: &BTreeMap<String, String>, allow_free: bool) -> CliResult<Self> {
        let get = |k: &str| s.get(k).map(String::as_str);
        let num = |k: &str, default: f64| get(k).map_or(Ok(default), |v| parse_f64(k, v));

        let length = num("L", 3.0)?;
        if !(length > 0.0) {
            return Err(usage("L", "must be positive"));
        }
        let strength = num("V0", 1.0)?;
        if strength < 0.0 || (strength == 0.0 && !allow_free) {
            return Err(usage("V0", "must be positive"));
        }
        let k = num("K", 0.5)?;
        if !(k > 0.0) {
            return Err(usage("K", "must be positive"));
        }
        let sf = match get("sf").unwrap_or("gaussian") {
            "gaussian" => SfSpec::Gaussian,
            "square" => SfSpec::Square,
            other => match other.strip_prefix("table:") {
                Some(p) if !p.is_empty() => SfSpec::Table(PathBuf::from(p)),
                _ => return Err(usage("sf", format!("expected gaussian|square|table:<path>, got '{other}'"))),
            },
        };
        let x_grid = get("x-grid").map(|v| GridSpec::parse("x-grid", v)).transpose()?;
        let t_grid = get("t-grid").map(|v| GridSpec::parse("t-grid", v)).transpose()?;
        let upper = get("upper").map(|v| parse_f64("upper", v)).transpose()?;
        if upper.is_some_and(|u| !(u > 0.0)) {
            return Err(usage("upper", "must be positive"));
        }
        let fit_window = match get("fit-window") {
            None => None,
            Some(v) => {
                let (a, b) = v
                    .split_once(':')
                    .ok_or_else(|| usage("fit-window", "expected lo:hi"))?;
                let (a, b) = (parse_f64("fit-window", a)?, parse_f64("fit-window", b)?);
                if !(a < b) {
                    return Err(usage("fit-window", "lo must be below hi"));
                }
                Some((a, b))
            }
        };
        let format = match get("format").unwrap_or("csv") {
            "csv" => Format::Csv,
            "json" => Format::Json,
            other => return Err(usage("format", format!("expected csv|json, got '{other}'"))),
        };
        let tol = Tolerance::new(num("tol-abs", 1e-10)?, num("tol-rel", 1e-8)?);
        if !(tol.abs > 0.0) {
            return Err(usage("tol-abs", "must be positive"));
        }
        if !(tol.rel > 0.0) {
            return Err(usage("tol-rel", "must be positive"));
        }
        let gnuplot = get("gnuplot").map_or(Ok(false), |v| parse_bool("gnuplot", v))?;
        let mode: Mode = get("mode")
            .unwrap_or("auto")
            .parse()
            .map_err(|e| usage("mode", e))?;
        if mode == Mode::ClosedForm && sf != SfSpec::Gaussian {
            return Err(usage("mode", "closed_form needs the gaussian spectral function"));
        }
        Ok(Self {
            length,
            strength,
            k,
            sf,
            x_grid,
            t_grid,
            upper,
            fit_window,
            out: get("out").map(PathBuf::from),
            format,
            tol,
            gnuplot,
            mode,
        })
    }

    pub fn potential(&self) -> CliResult<PotentialConfig> {
        Ok(PotentialConfig::with_optional_barrier(self.length, self.strength)?)
    }

    pub fn spectral(&self) -> CliResult<SpectralFunction> {
        Ok(match &self.sf {
            SfSpec::Gaussian => SpectralFunction::gaussian(self.k)?,
            SfSpec::Square => SpectralFunction::square_pulse(self.length)?,
            SfSpec::Table(p) => {
                let f = fs::File::open(p).map_err(|e| usage("sf", format!("{}: {e}", p.display())))?;
                SpectralFunction::read_csv(BufReader::new(f))?
            }
        })
    }

    pub fn is_gaussian(&self) -> bool {
        self.sf == SfSpec::Gaussian
    }

    pub fn field(&self) -> CliResult<WaveField> {
        Ok(WaveField::new(self.potential()?, self.spectral()?, self.mode, self.tol)?)
    }
}
