//! Survival probability inside the well, its logarithmic decay rate, and
//! the fits used to compare it with exponential decay.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;

use num_complex::Complex64;

use crate::eigenbasis::PotentialConfig;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::io::{fmt_num, Metadata};
use crate::propagator::{normalization_c1, WaveField};
use crate::quadrature::{self, Tolerance};
use crate::spectral::least_squares_slope;

/// `erf(z) − (2/√π)·z·e^{−z²}`, the fraction of the gaussian packet's
/// wall term inside the well. A power series is used for `z < 0.5`, where
/// the two terms cancel to `O(z³)`.
pub fn well_fraction(z: f64) -> f64 {
    if z.abs() < 0.5 {
        // (2/√π) Σ_{n≥1} (−1)^{n+1} 2n z^{2n+1} / (n! (2n+1))
        let z2 = z * z;
        let mut term = z; // z^{2n+1}/n! without the sign, n = 0
        let mut sum = 0.0;
        for n in 1..40 {
            term *= z2 / n as f64;
            let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
            let add = sign * term * (2 * n) as f64 / (2 * n + 1) as f64;
            sum += add;
            if add.abs() <= 1e-17 * sum.abs() {
                break;
            }
        }
        2.0 / PI.sqrt() * sum
    } else {
        libm::erf(z) - 2.0 / PI.sqrt() * z * (-z * z).exp()
    }
}

/// `ln g(z)` for [`well_fraction`]. For `z ≥ 0.5` it goes through the
/// complement `1 − g = erfc z + (2/√π)·z·e^{−z²}`, so the logarithm keeps
/// full relative precision in the deficit when `g` is close to 1.
pub fn log_well_fraction(z: f64) -> f64 {
    if z.abs() < 0.5 {
        well_fraction(z).ln()
    } else {
        let deficit = libm::erfc(z) + 2.0 / PI.sqrt() * z * (-z * z).exp();
        (-deficit).ln_1p()
    }
}

fn check_k(k: f64) -> Result<()> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::domain("K must be positive"));
    }
    Ok(())
}

/// Closed-form `P_in(t) = ∫₀^L |ψ|² dx` for φ(E) = e^{−K²E}:
///
/// ```text
/// C1²·[ π^{3/2}/(8K³)·erf(z) − πL/(4K²√(K⁴+t²))·e^{−z²} ],  z = KL/√(K⁴+t²)
/// ```
pub fn survival_closed_form(t: f64, k: f64, cfg: &PotentialConfig) -> Result<f64> {
    check_k(k)?;
    let c1 = normalization_c1(k, cfg)?;
    let z = k * cfg.length() / (k.powi(4) + t * t).sqrt();
    Ok(c1 * c1 * PI.powf(1.5) / (8.0 * k.powi(3)) * well_fraction(z))
}

/// `lim_{t→∞} t³·P_in(t) = C1²·π·L³/6`.
pub fn survival_tail_constant(k: f64, cfg: &PotentialConfig) -> Result<f64> {
    let c1 = normalization_c1(k, cfg)?;
    Ok(c1 * c1 * PI * cfg.length().powi(3) / 6.0)
}

/// `P_in(0)` in the limit `L → ∞`: `1/(1 + 4K²V0²)`.
pub fn survival_large_length_limit(k: f64, strength: f64) -> f64 {
    1.0 / (1.0 + 4.0 * k * k * strength * strength)
}

/// Decay rate `λ(t) = −d ln P_in/dt` for φ(E) = e^{−K²E}:
///
/// ```text
/// λ = 4 e^{−z²} z³ t / ((K⁴ + t²)(√π erf z − 2z e^{−z²}))
/// ```
///
/// Independent of V0: the normalization cancels in the logarithmic derivative.
pub fn decay_rate(t: f64, k: f64, cfg: &PotentialConfig) -> Result<f64> {
    check_k(k)?;
    let s2 = k.powi(4) + t * t;
    let z = k * cfg.length() / s2.sqrt();
    Ok(4.0 * (-z * z).exp() * z.powi(3) * t / (s2 * PI.sqrt() * well_fraction(z)))
}

/// Location and height of the maximum of λ(t).
pub fn decay_rate_peak(k: f64, cfg: &PotentialConfig) -> Result<(f64, f64)> {
    check_k(k)?;
    let f = |t: f64| decay_rate(t, k, cfg).unwrap_or(f64::NAN);
    // Coarse log scan, then golden-section refinement around the best node.
    let scale = (k * k).max(k * cfg.length());
    let nodes: Vec<f64> = (0..=400)
        .map(|i| scale * 10f64.powf(-3.0 + 6.0 * i as f64 / 400.0))
        .collect();
    let best = (1..nodes.len() - 1)
        .max_by(|&a, &b| f(nodes[a]).total_cmp(&f(nodes[b])))
        .unwrap_or(1);
    let (mut a, mut b) = (nodes[best - 1], nodes[best + 1]);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    for _ in 0..200 {
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
        if (b - a) < 1e-13 * b {
            break;
        }
    }
    let t = 0.5 * (a + b);
    Ok((t, f(t)))
}

/// `∫₀^upper |ψ(x, t)|² dx` by adaptive quadrature on `wf`'s evaluator.
/// `upper = +∞` integrates the whole half-line (a unitarity check).
pub fn survival_quadrature(t: f64, wf: &WaveField, upper: f64) -> Result<f64> {
    if !(upper > 0.0) {
        return Err(Error::domain("upper limit must be positive"));
    }
    let len = wf.config().length();
    let tol = wf.tolerance();
    let density = |x: f64| wf.psi(x, t).map(|v| v.norm_sqr());
    let finite_upper = upper.min(2.0 * len);
    let inner = integrate_density(&density, 0.0, finite_upper, len, tol)?;
    if upper <= 2.0 * len {
        return Ok(inner);
    }
    let chunk = match wf.gaussian_k() {
        Some(k) => (k.powi(4) + t * t).sqrt().max(k * k) / k,
        None => len,
    }
    .max(0.5);
    let mut total = inner;
    let mut x = finite_upper;
    let mut quiet = 0;
    while x < upper {
        let next = (x + chunk).min(upper);
        let part = integrate_density(&density, x, next, len, tol)?;
        total += part;
        x = next;
        if upper.is_infinite() {
            quiet = if part < 1e-2 * tol.abs { quiet + 1 } else { 0 };
            if quiet >= 3 {
                break;
            }
            if x > 1e7 * len {
                return Err(Error::Convergence {
                    achieved: part,
                    requested: 1e-2 * tol.abs,
                });
            }
        }
    }
    Ok(total)
}

/// Each density sample is itself a momentum integral; a discontinuous
/// initial density (square pulse at t = 0) would otherwise bisect toward
/// the jump for a very long time.
const DENSITY_MAX_SEGMENTS: usize = 2_000;

fn integrate_density<F>(density: &F, a: f64, b: f64, len: f64, tol: Tolerance) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if b <= a {
        return Ok(0.0);
    }
    let width = 0.25 * len;
    let mut breaks = Vec::new();
    if a < len && b > len {
        breaks.extend(quadrature::uniform_breakpoints(a, len, ((len - a) / width).ceil() as usize));
        let rest = quadrature::uniform_breakpoints(len, b, ((b - len) / width).ceil() as usize);
        breaks.extend_from_slice(&rest[1..]);
    } else {
        breaks = quadrature::uniform_breakpoints(a, b, ((b - a) / width).ceil() as usize);
    }
    let failure = std::sync::Mutex::new(None);
    let est = quadrature::integrate_panels(
        |x| {
            if failure.lock().unwrap().is_some() {
                return Complex64::new(0.0, 0.0);
            }
            match density(x) {
                Ok(v) => Complex64::new(v, 0.0),
                Err(e) => {
                    failure.lock().unwrap().get_or_insert(e);
                    Complex64::new(0.0, 0.0)
                }
            }
        },
        &breaks,
        tol,
        DENSITY_MAX_SEGMENTS,
    );
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    Ok(est?.value.re)
}

/// Where a [`DecayCurve`]'s samples come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveSource {
    ClosedForm,
    Quadrature,
}

impl CurveSource {
    pub fn name(self) -> &'static str {
        match self {
            CurveSource::ClosedForm => "closed_form",
            CurveSource::Quadrature => "quadrature",
        }
    }
}

/// Sampled survival probability and decay rate.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayCurve {
    pub times: Vec<f64>,
    pub p_in: Vec<f64>,
    pub lambda: Vec<f64>,
    pub source: CurveSource,
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.len() < 2 {
        return Err(Error::domain("time grid needs at least two samples"));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::domain("time grid must be strictly increasing"));
    }
    Ok(())
}

impl DecayCurve {
    /// Closed-form `P_in` and `λ` for the gaussian spectral function.
    pub fn closed_form(k: f64, cfg: &PotentialConfig, times: &[f64], exec: Execution) -> Result<Self> {
        check_times(times)?;
        let rows = exec.try_map(times, |&t| {
            Ok((survival_closed_form(t, k, cfg)?, decay_rate(t, k, cfg)?))
        })?;
        let (p_in, lambda) = rows.into_iter().unzip();
        Ok(Self {
            times: times.to_vec(),
            p_in,
            lambda,
            source: CurveSource::ClosedForm,
        })
    }

    /// `P_in` over `[0, upper]` by quadrature, `λ` by finite differences of
    /// `ln P_in` on the grid.
    pub fn quadrature(wf: &WaveField, upper: f64, times: &[f64], exec: Execution) -> Result<Self> {
        check_times(times)?;
        let p_in = exec.try_map(times, |&t| survival_quadrature(t, wf, upper))?;
        let lambda = log_derivative(times, &p_in);
        Ok(Self {
            times: times.to_vec(),
            p_in,
            lambda,
            source: CurveSource::Quadrature,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Largest relative mismatch between the stored λ and the midpoint
    /// difference `−Δ ln P_in / Δt` over consecutive samples.
    pub fn lambda_mismatch(&self) -> f64 {
        self.times
            .windows(2)
            .zip(self.p_in.windows(2).zip(self.lambda.windows(2)))
            .map(|(t, (p, l))| {
                let fd = -(p[1].ln() - p[0].ln()) / (t[1] - t[0]);
                let mid = 0.5 * (l[0] + l[1]);
                (fd - mid).abs() / mid.abs().max(f64::MIN_POSITIVE)
            })
            .fold(0.0, f64::max)
    }

    /// Finite-difference `dP/dt` at interior samples.
    pub fn derivative(&self) -> Vec<(f64, f64)> {
        (1..self.len().saturating_sub(1))
            .map(|i| {
                let (t0, t1, t2) = (self.times[i - 1], self.times[i], self.times[i + 1]);
                let (p0, p1, p2) = (self.p_in[i - 1], self.p_in[i], self.p_in[i + 1]);
                (t1, nonuniform_central(t0, t1, t2, p0, p1, p2))
            })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, out: &mut W, meta: &Metadata) -> Result<()> {
        let mut meta = meta.clone();
        meta.push("source", self.source.name());
        meta.write(out)?;
        writeln!(out, "t,p_in,lambda")?;
        for i in 0..self.len() {
            writeln!(
                out,
                "{},{},{}",
                fmt_num(self.times[i]),
                fmt_num(self.p_in[i]),
                fmt_num(self.lambda[i])
            )?;
        }
        Ok(())
    }
}

fn nonuniform_central(t0: f64, t1: f64, t2: f64, f0: f64, f1: f64, f2: f64) -> f64 {
    let (h0, h1) = (t1 - t0, t2 - t1);
    (-h1 / (h0 * (h0 + h1))) * f0 + ((h1 - h0) / (h0 * h1)) * f1 + (h0 / (h1 * (h0 + h1))) * f2
}

/// `−d ln f / dt` by second-order differences (one-sided at the ends).
fn log_derivative(times: &[f64], values: &[f64]) -> Vec<f64> {
    let logs: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let n = times.len();
    (0..n)
        .map(|i| {
            let d = if n == 2 {
                (logs[1] - logs[0]) / (times[1] - times[0])
            } else if i == 0 {
                let (h0, h1) = (times[1] - times[0], times[2] - times[1]);
                -(2.0 * h0 + h1) / (h0 * (h0 + h1)) * logs[0] + (h0 + h1) / (h0 * h1) * logs[1]
                    - h0 / (h1 * (h0 + h1)) * logs[2]
            } else if i == n - 1 {
                let (h0, h1) = (times[n - 2] - times[n - 3], times[n - 1] - times[n - 2]);
                h1 / (h0 * (h0 + h1)) * logs[n - 3] - (h0 + h1) / (h0 * h1) * logs[n - 2]
                    + (2.0 * h1 + h0) / (h1 * (h0 + h1)) * logs[n - 1]
            } else {
                nonuniform_central(
                    times[i - 1],
                    times[i],
                    times[i + 1],
                    logs[i - 1],
                    logs[i],
                    logs[i + 1],
                )
            };
            -d
        })
        .collect()
}

/// Least-squares slope of `ln P_in` against `ln t` over `t ≥ t_min`.
pub fn asymptotic_slope(curve: &DecayCurve, t_min: f64) -> Result<f64> {
    let pts: Vec<(f64, f64)> = curve
        .times
        .iter()
        .zip(&curve.p_in)
        .filter(|(&t, _)| t >= t_min && t > 0.0)
        .map(|(t, p)| (t.ln(), p.ln()))
        .collect();
    if pts.len() < 8 {
        return Err(Error::InsufficientData {
            needed: 8,
            got: pts.len(),
        });
    }
    Ok(least_squares_slope(&pts))
}

/// Result of fitting `a·e^{−bt}` with unit weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpFitResult {
    pub a: f64,
    pub b: f64,
    pub window: (f64, f64),
    pub chi2_per_dof: f64,
    pub n_points: usize,
}

impl fmt::Display for ExpFitResult {
    /// Flat `key=value` block.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "a={}", fmt_num(self.a))?;
        writeln!(f, "b={}", fmt_num(self.b))?;
        writeln!(f, "window={}:{}", fmt_num(self.window.0), fmt_num(self.window.1))?;
        writeln!(f, "chi2_per_dof={}", fmt_num(self.chi2_per_dof))?;
        write!(f, "n={}", self.n_points)
    }
}

const FIT_MAX_ITER: usize = 500;

/// Levenberg–Marquardt fit of `a·e^{−bt}` to the curve samples inside
/// `window`. χ²/dof is the residual sum of squares over `n − 2`.
pub fn fit_exponential(curve: &DecayCurve, window: (f64, f64)) -> Result<ExpFitResult> {
    let (lo, hi) = window;
    if !(lo < hi) {
        return Err(Error::domain("fit window must satisfy lo < hi"));
    }
    let (first, last) = (curve.times[0], *curve.times.last().unwrap());
    if lo < first || hi > last {
        return Err(Error::domain("fit window outside curve range"));
    }
    let (ts, ys): (Vec<f64>, Vec<f64>) = curve
        .times
        .iter()
        .zip(&curve.p_in)
        .filter(|(&t, _)| t >= lo && t <= hi)
        .map(|(&t, &p)| (t, p))
        .unzip();
    if ts.len() < 10 {
        return Err(Error::InsufficientData {
            needed: 10,
            got: ts.len(),
        });
    }
    let (a, b, rss) = levenberg_marquardt(&ts, &ys)?;
    Ok(ExpFitResult {
        a,
        b,
        window,
        chi2_per_dof: rss / (ts.len() - 2) as f64,
        n_points: ts.len(),
    })
}

fn residual_sum(ts: &[f64], ys: &[f64], a: f64, b: f64) -> f64 {
    ts.iter()
        .zip(ys)
        .map(|(&t, &y)| (y - a * (-b * t).exp()).powi(2))
        .sum()
}

fn levenberg_marquardt(ts: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    // Start from the log-linear regression when the data allow it.
    let (mut a, mut b) = if ys.iter().all(|&y| y > 0.0) {
        let pts: Vec<(f64, f64)> = ts.iter().zip(ys).map(|(&t, &y)| (t, y.ln())).collect();
        let slope = least_squares_slope(&pts);
        let n = pts.len() as f64;
        let icpt = pts.iter().map(|p| p.1 - slope * p.0).sum::<f64>() / n;
        (icpt.exp(), -slope)
    } else {
        (ys[0], 0.1)
    };
    let mut rss = residual_sum(ts, ys, a, b);
    let mut damping = 1e-3;
    for _ in 0..FIT_MAX_ITER {
        let (mut jaa, mut jab, mut jbb, mut ga, mut gb) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (&t, &y) in ts.iter().zip(ys) {
            let e = (-b * t).exp();
            let r = y - a * e;
            let da = e;
            let db = -a * t * e;
            jaa += da * da;
            jab += da * db;
            jbb += db * db;
            ga += da * r;
            gb += db * r;
        }
        let mut improved = false;
        for _ in 0..60 {
            let m11 = jaa * (1.0 + damping);
            let m22 = jbb * (1.0 + damping);
            let det = m11 * m22 - jab * jab;
            if det == 0.0 || !det.is_finite() {
                damping *= 10.0;
                continue;
            }
            let step_a = (m22 * ga - jab * gb) / det;
            let step_b = (m11 * gb - jab * ga) / det;
            let (na, nb) = (a + step_a, b + step_b);
            let nrss = residual_sum(ts, ys, na, nb);
            if nrss <= rss {
                let converged = (step_a.abs() <= 1e-15 * a.abs().max(1e-300))
                    && (step_b.abs() <= 1e-15 * b.abs().max(1e-300))
                    || rss - nrss <= 1e-16 * rss
                    || nrss == 0.0;
                a = na;
                b = nb;
                rss = nrss;
                damping = (damping * 0.1).max(1e-15);
                improved = true;
                if converged {
                    return Ok((a, b, rss));
                }
                break;
            }
            damping *= 10.0;
        }
        if !improved {
            // No downhill step at any damping: at a minimum to round-off.
            return Ok((a, b, rss));
        }
    }
    Err(Error::Fit {
        iterations: FIT_MAX_ITER,
        residual: rss,
    })
}

/// `P_in` integrated to `4L` for the gaussian spectral function, by
/// quadrature of the closed-form density.
pub fn modified_survival_curve(
    k: f64,
    cfg: &PotentialConfig,
    times: &[f64],
    exec: Execution,
) -> Result<DecayCurve> {
    let wf = WaveField::gaussian(*cfg, k)?;
    DecayCurve::quadrature(&wf, 4.0 * cfg.length(), times, exec)
}

/// Number of interior local minima of `dP/dt` with `t` in `(t_lo, t_hi]`.
pub fn step_features(curve: &DecayCurve, t_lo: f64, t_hi: f64) -> usize {
    let d = curve.derivative();
    (1..d.len().saturating_sub(1))
        .filter(|&i| d[i].0 > t_lo && d[i].0 <= t_hi)
        .filter(|&i| d[i].1 < d[i - 1].1 && d[i].1 < d[i + 1].1)
        .count()
}

/// Whether the running mean of `P_in` over a window of width `dt` never
/// increases. Assumes a uniform time grid.
pub fn smoothed_non_increasing(curve: &DecayCurve, dt: f64) -> bool {
    if curve.len() < 2 {
        return true;
    }
    let step = curve.times[1] - curve.times[0];
    let w = ((dt / step).round() as usize).max(1);
    if w > curve.len() {
        return true;
    }
    let means: Vec<f64> = curve
        .p_in
        .windows(w)
        .map(|s| s.iter().sum::<f64>() / w as f64)
        .collect();
    means.windows(2).all(|m| m[1] <= m[0] + 1e-15)
}

/// `n` points from `lo` to `hi`, linear or logarithmic.
pub fn time_grid(lo: f64, hi: f64, n: usize, log: bool) -> Vec<f64> {
    if n < 2 {
        return vec![lo];
    }
    (0..n)
        .map(|i| {
            let s = i as f64 / (n - 1) as f64;
            if i == n - 1 {
                hi
            } else if log {
                lo * (hi / lo).powf(s)
            } else {
                lo + (hi - lo) * s
            }
        })
        .collect()
}
