use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use deltawall::io::Metadata;
use deltawall::observables::{self, time_grid, DecayCurve};
use deltawall::verify::{self, SuiteConfig};
use deltawall::{Execution, PotentialConfig, WaveField};
use serde_json::{json, Value};

use crate::config::{CliError, CliResult, Format, GridSpec, RunConfig};
use crate::output::{emit, number, Table};

const FIG1_TIMES: [f64; 6] = [0.0, 0.3, 0.6, 0.9, 1.2, 1.5];

fn exec() -> Execution {
    Execution::default()
}

fn extension(format: Format) -> &'static str {
    match format {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

/// Shortest fixed-point label for a time value: 0.3 → "0.3", 1 → "1".
fn time_label(t: f64) -> String {
    let s = format!("{t:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".to_string() } else { s.to_string() }
}

fn base_meta(cfg: &RunConfig, wf: Option<&WaveField>) -> Metadata {
    match wf {
        Some(wf) => wf.metadata(),
        None => {
            let mut m = Metadata::new();
            m.push_num("L", cfg.length).push_num("V0", cfg.strength).push_num("K", cfg.k);
            m
        }
    }
}

fn require_gaussian(cfg: &RunConfig, what: &str) -> CliResult<()> {
    if cfg.is_gaussian() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("sf: {what} needs the gaussian spectral function")))
    }
}

fn gnuplot_target(cfg: &RunConfig) -> CliResult<Option<&Path>> {
    if !cfg.gnuplot {
        return Ok(None);
    }
    if cfg.format != Format::Csv {
        return Err(CliError::Usage("gnuplot: needs --format csv".into()));
    }
    cfg.out
        .as_deref()
        .map(Some)
        .ok_or_else(|| CliError::Usage("gnuplot: needs --out".into()))
}

fn script_path(data: &Path) -> PathBuf {
    data.with_extension("gp")
}

fn file_name(p: &Path) -> String {
    p.file_name().map_or_else(|| p.display().to_string(), |n| n.to_string_lossy().into_owned())
}

/// Density snapshots, one file per time: `<prefix>_t<time>.<ext>`.
pub fn density(cfg: &RunConfig) -> CliResult<Vec<PathBuf>> {
    let wf = cfg.field()?;
    let xs = cfg
        .x_grid
        .clone()
        .unwrap_or(GridSpec {
            min: 0.0,
            max: 5.0 * cfg.length,
            count: 501,
            log: false,
        })
        .points();
    let ts = cfg.t_grid.as_ref().map_or(FIG1_TIMES.to_vec(), GridSpec::points);
    let prefix = cfg.out.clone().unwrap_or_else(|| PathBuf::from("density"));
    let prefix = prefix.to_string_lossy().into_owned();

    let mut written = Vec::new();
    for &t in &ts {
        let path = PathBuf::from(format!("{prefix}_t{}.{}", time_label(t), extension(cfg.format)));
        if written.contains(&path) {
            return Err(CliError::Usage(format!("t-grid: times {t} collide in file names")));
        }
        let samples = wf.evaluate_grid(&xs, &[t], exec())?;
        let mut meta = wf.metadata();
        meta.push_num("t", t);
        if t == 0.0 && cfg.is_gaussian() && cfg.strength > 0.0 {
            meta.push_num("centroid_region2", verify::region_two_centroid(&wf, 0.0)?);
        }
        let mut table = Table::new(meta);
        table
            .column("x", samples.iter().map(|s| s.x).collect())
            .column("t", samples.iter().map(|s| s.t).collect())
            .column("re_psi", samples.iter().map(|s| s.psi.re).collect())
            .column("im_psi", samples.iter().map(|s| s.psi.im).collect())
            .column("density", samples.iter().map(|s| s.density()).collect());
        emit(Some(&path), &table.render(cfg.format)?)?;
        written.push(path);
    }

    if cfg.gnuplot {
        if cfg.format != Format::Csv {
            return Err(CliError::Usage("gnuplot: needs --format csv".into()));
        }
        let mut gp = String::from("set datafile separator ','\nset datafile commentschars '#'\n");
        gp.push_str("set xlabel 'x'\nset ylabel '|psi|^2'\nplot \\\n");
        let lines: Vec<String> = written
            .iter()
            .map(|p| format!("  '{}' skip 1 using 1:5 with lines title '{}'", file_name(p), file_name(p)))
            .collect();
        gp.push_str(&lines.join(", \\\n"));
        gp.push('\n');
        let script = PathBuf::from(format!("{prefix}.gp"));
        emit(Some(&script), &gp)?;
        written.push(script);
    }
    Ok(written)
}

/// P_in(t): closed form for the gaussian packet, quadrature otherwise or
/// when `--upper` moves the integration limit.
pub fn survival(cfg: &RunConfig, quadrature_column: bool) -> CliResult<()> {
    let ts = cfg
        .t_grid
        .as_ref()
        .map_or_else(|| time_grid(0.0, 10.0, 101, false), GridSpec::points);
    let pot = cfg.potential()?;
    let wf = cfg.field()?;
    let use_closed = cfg.is_gaussian() && cfg.upper.is_none();
    let upper = cfg.upper.unwrap_or(cfg.length);
    let curve = if use_closed {
        DecayCurve::closed_form(cfg.k, &pot, &ts, exec())?
    } else {
        DecayCurve::quadrature(&wf, upper, &ts, exec())?
    };

    let mut meta = wf.metadata();
    meta.push("source", curve.source.name()).push_num("upper", upper);
    let mut table = Table::new(meta);
    table
        .column("t", curve.times.clone())
        .column("p_in", curve.p_in.clone())
        .column("lambda", curve.lambda.clone());
    if quadrature_column && use_closed {
        let q = exec().try_map(&ts, |&t| observables::survival_quadrature(t, &wf, upper))?;
        table.column("p_in_quadrature", q);
    }
    if let Some(window) = cfg.fit_window {
        let fit = observables::fit_exponential(&curve, window)?;
        table.column("p_fit", ts.iter().map(|&t| fit.a * (-fit.b * t).exp()).collect());
        let block = fit
            .to_string()
            .lines()
            .filter_map(|l| l.split_once('='))
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        table.trailer = Some(("fit".into(), block));
    }
    emit(cfg.out.as_deref(), &table.render(cfg.format)?)?;
    if let Some(data) = gnuplot_target(cfg)? {
        let mut gp = String::from("set datafile separator ','\nset datafile commentschars '#'\n");
        gp.push_str("set xlabel 't'\nset ylabel 'P_in'\n");
        let _ = write!(
            gp,
            "plot '{0}' skip 1 using 1:2 with lines title 'P_in'",
            file_name(data)
        );
        if cfg.fit_window.is_some() {
            let col = if quadrature_column && use_closed { 5 } else { 4 };
            let _ = write!(gp, ", '{}' skip 1 using 1:{col} with lines title 'fit'", file_name(data));
        }
        gp.push('\n');
        emit(Some(&script_path(data)), &gp)?;
    }
    Ok(())
}

/// λ(t); identical for every V0 since the normalization cancels.
pub fn lambda(cfg: &RunConfig) -> CliResult<()> {
    let ts = cfg
        .t_grid
        .as_ref()
        .map_or_else(|| time_grid(0.0, 10.0, 101, false), GridSpec::points);
    let pot = cfg.potential()?;
    let (meta, lam) = if cfg.is_gaussian() && cfg.upper.is_none() {
        let lam = exec().try_map(&ts, |&t| observables::decay_rate(t.abs(), cfg.k, &pot))?;
        (base_meta(cfg, None), lam)
    } else {
        let wf = cfg.field()?;
        let curve = DecayCurve::quadrature(&wf, cfg.upper.unwrap_or(cfg.length), &ts, exec())?;
        (base_meta(cfg, Some(&wf)), curve.lambda)
    };
    let mut table = Table::new(meta);
    table.column("t", ts).column("lambda", lam);
    emit(cfg.out.as_deref(), &table.render(cfg.format)?)?;
    if let Some(data) = gnuplot_target(cfg)? {
        let gp = format!(
            "set datafile separator ','\nset datafile commentschars '#'\nset xlabel 't'\nset ylabel 'lambda'\nplot '{}' skip 1 using 1:2 with lines title 'lambda'\n",
            file_name(data)
        );
        emit(Some(&script_path(data)), &gp)?;
    }
    Ok(())
}

/// Runs the invariant suite and writes a JSON report.
pub fn verify(cfg: &RunConfig) -> CliResult<()> {
    require_gaussian(cfg, "verify")?;
    let sc = SuiteConfig {
        potential: cfg.potential()?,
        k: cfg.k,
        tol: cfg.tol,
        exec: exec(),
    };
    let checks = verify::run_suite(&sc);
    let passed = checks.iter().all(|c| c.passed);
    let rows: Vec<Value> = checks
        .iter()
        .map(|c| {
            json!({
                "name": c.name,
                "passed": c.passed,
                "measured": number(c.measured),
                "threshold": number(c.threshold),
                "convergence_failure": c.convergence_failure,
                "note": c.note,
            })
        })
        .collect();
    let report = json!({
        "generated-by": format!("deltawall {}", env!("CARGO_PKG_VERSION")),
        "L": cfg.length,
        "V0": cfg.strength,
        "K": cfg.k,
        "passed": passed,
        "checks": rows,
    });
    let mut text = serde_json::to_string_pretty(&report).expect("serializable");
    text.push('\n');
    emit(cfg.out.as_deref(), &text)?;
    if passed {
        Ok(())
    } else {
        Err(CliError::Verify {
            convergence: checks.iter().any(|c| c.convergence_failure),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanParam {
    K,
    L,
    V0,
}

impl ScanParam {
    pub fn parse(s: &str) -> CliResult<Self> {
        match s {
            "K" => Ok(ScanParam::K),
            "L" => Ok(ScanParam::L),
            "V0" => Ok(ScanParam::V0),
            other => Err(CliError::Usage(format!("param: expected K|L|V0, got '{other}'"))),
        }
    }

    fn name(self) -> &'static str {
        match self {
            ScanParam::K => "K",
            ScanParam::L => "L",
            ScanParam::V0 => "V0",
        }
    }
}

pub fn parse_values(s: &str) -> CliResult<Vec<f64>> {
    let vals = s
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("values: not a number: '{v}'")))
        })
        .collect::<CliResult<Vec<f64>>>()?;
    if vals.is_empty() || vals.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(CliError::Usage("values: need positive numbers".into()));
    }
    Ok(vals)
}

/// One row per parameter value: P_in(0), its large-L limit, the peak of λ
/// and the late-time log-log slope over t ∈ [50, 1000].
pub fn scan(cfg: &RunConfig, param: ScanParam, values: &[f64]) -> CliResult<()> {
    require_gaussian(cfg, "scan")?;
    let late = time_grid(50.0, 1000.0, 40, true);
    let rows = exec().try_map(values, |&v| {
        let (mut l, mut v0, mut k) = (cfg.length, cfg.strength, cfg.k);
        match param {
            ScanParam::K => k = v,
            ScanParam::L => l = v,
            ScanParam::V0 => v0 = v,
        }
        let pot = PotentialConfig::new(l, v0)?;
        let p0 = observables::survival_closed_form(0.0, k, &pot)?;
        let limit = observables::survival_large_length_limit(k, v0);
        let (t_peak, peak) = observables::decay_rate_peak(k, &pot)?;
        let curve = DecayCurve::closed_form(k, &pot, &late, Execution::Sequential)?;
        let slope = observables::asymptotic_slope(&curve, 50.0)?;
        Ok([v, p0, limit, peak, t_peak, slope])
    })?;
    let mut meta = base_meta(cfg, None);
    meta.push("scan", param.name());
    let mut table = Table::new(meta);
    let names = [param.name(), "p_in0", "large_l_limit", "lambda_peak", "t_peak", "slope"];
    for (i, name) in names.iter().enumerate() {
        table.column(name, rows.iter().map(|r| r[i]).collect());
    }
    emit(cfg.out.as_deref(), &table.render(cfg.format)?)?;
    if let Some(data) = gnuplot_target(cfg)? {
        let gp = format!(
            "set datafile separator ','\nset datafile commentschars '#'\nset xlabel '{}'\nplot '{1}' skip 1 using 1:2 with linespoints title 'P_in(0)', '{1}' skip 1 using 1:4 with linespoints title 'lambda peak'\n",
            param.name(),
            file_name(data)
        );
        emit(Some(&script_path(data)), &gp)?;
    }
    Ok(())
}
