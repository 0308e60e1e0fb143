//! Spectral functions φ(E): the weights that superpose stationary states
//! into a square-integrable wave packet.
//!
//! Convention: eigenfunctions carry the normalization `c1`, spectral
//! functions never do.

use std::f64::consts::PI;
use std::io::{BufRead, Write};

use num_complex::Complex64;

use crate::eigenbasis::{self, momentum, PotentialConfig};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::quadrature::{self, Tolerance};

/// A monotone-cubic (Fritsch–Carlson) interpolated table of φ(E).
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    energies: Vec<f64>,
    values: Vec<Complex64>,
    slopes: Vec<Complex64>,
    decay_exponent: f64,
}

impl Table {
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Declared large-E power-law exponent of |φ|.
    pub fn decay_exponent(&self) -> f64 {
        self.decay_exponent
    }

    fn interpolate(&self, e: f64) -> Result<Complex64> {
        let (lo, hi) = (self.energies[0], *self.energies.last().unwrap());
        if !(e >= lo && e <= hi) {
            return Err(Error::Range { value: e, lo, hi });
        }
        let i = match self.energies.partition_point(|&x| x <= e) {
            0 => 0,
            n if n >= self.energies.len() => self.energies.len() - 2,
            n => n - 1,
        };
        let h = self.energies[i + 1] - self.energies[i];
        let s = (e - self.energies[i]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        Ok(self.values[i] * h00
            + self.slopes[i] * (h10 * h)
            + self.values[i + 1] * h01
            + self.slopes[i + 1] * (h11 * h))
    }
}

/// Fritsch–Carlson slopes for one real component.
fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i])).collect();
    if n == 2 {
        return vec![delta[0], delta[0]];
    }
    let mut m = vec![0.0; n];
    for i in 1..n - 1 {
        if delta[i - 1] * delta[i] > 0.0 {
            let h0 = x[i] - x[i - 1];
            let h1 = x[i + 1] - x[i];
            let w1 = 2.0 * h1 + h0;
            let w2 = h1 + 2.0 * h0;
            m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    let end = |h0: f64, h1: f64, d0: f64, d1: f64| {
        let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if d * d0 <= 0.0 {
            0.0
        } else if d0 * d1 <= 0.0 && d.abs() > 3.0 * d0.abs() {
            3.0 * d0
        } else {
            d
        }
    };
    m[0] = end(x[1] - x[0], x[2] - x[1], delta[0], delta[1]);
    m[n - 1] = end(
        x[n - 1] - x[n - 2],
        x[n - 2] - x[n - 3],
        delta[n - 2],
        delta[n - 3],
    );
    m
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpectralKind {
    /// φ(E) = e^{−K²E}
    GaussianInE { k: f64 },
    /// φ(E) = −i·[1 − cos((L/2)√(2E))] / (2E·√(πL)); a flat density pulse
    /// on (0, L/2) in the absence of the barrier.
    SquarePulse { length: f64 },
    Tabulated(Table),
}

/// An immutable spectral function together with its E → 0 limit.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFunction {
    kind: SpectralKind,
    value_at_zero: Complex64,
}

impl SpectralFunction {
    pub fn gaussian(k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::domain("K must be positive"));
        }
        Ok(Self {
            kind: SpectralKind::GaussianInE { k },
            value_at_zero: Complex64::new(1.0, 0.0),
        })
    }

    pub fn square_pulse(length: f64) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::domain("pulse length must be positive"));
        }
        // 1 − cos u ≈ u²/2 with u² = L²E/2
        let value_at_zero = Complex64::new(0.0, -length * length / (8.0 * (PI * length).sqrt()));
        Ok(Self {
            kind: SpectralKind::SquarePulse { length },
            value_at_zero,
        })
    }

    /// Tabulated φ on a strictly increasing grid of non-negative energies.
    /// The E → 0 value is the first sample.
    pub fn tabulated(energies: Vec<f64>, values: Vec<Complex64>, decay_exponent: f64) -> Result<Self> {
        if energies.len() < 2 || energies.len() != values.len() {
            return Err(Error::domain("table needs at least two (E, φ) samples"));
        }
        if energies[0] < 0.0 || energies.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain("table energies must be non-negative and strictly increasing"));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::domain("table values must be finite"));
        }
        let re: Vec<f64> = values.iter().map(|v| v.re).collect();
        let im: Vec<f64> = values.iter().map(|v| v.im).collect();
        let slopes = pchip_slopes(&energies, &re)
            .into_iter()
            .zip(pchip_slopes(&energies, &im))
            .map(|(a, b)| Complex64::new(a, b))
            .collect();
        let value_at_zero = values[0];
        Ok(Self {
            kind: SpectralKind::Tabulated(Table {
                energies,
                values,
                slopes,
                decay_exponent,
            }),
            value_at_zero,
        })
    }

    pub fn kind(&self) -> &SpectralKind {
        &self.kind
    }

    pub fn value_at_zero(&self) -> Complex64 {
        self.value_at_zero
    }

    /// Short label used in output metadata.
    pub fn label(&self) -> String {
        match &self.kind {
            SpectralKind::GaussianInE { k } => format!("gaussian(K={k})"),
            SpectralKind::SquarePulse { length } => format!("square(L={length})"),
            SpectralKind::Tabulated(t) => format!("table(n={})", t.energies.len()),
        }
    }

    /// φ(E) for `E ≥ 0`; `E = 0` returns the analytic limit.
    pub fn evaluate(&self, energy: f64) -> Result<Complex64> {
        if energy == 0.0 {
            return Ok(self.value_at_zero);
        }
        if !(energy > 0.0) {
            return Err(Error::domain("energy must be non-negative"));
        }
        match &self.kind {
            SpectralKind::GaussianInE { k } => Ok(Complex64::new((-k * k * energy).exp(), 0.0)),
            SpectralKind::SquarePulse { length } => {
                let u = 0.5 * length * momentum(energy);
                let s = sinc_real(0.5 * u);
                Ok(Complex64::new(0.0, -length * length * s * s / (8.0 * (PI * length).sqrt())))
            }
            SpectralKind::Tabulated(t) => t.interpolate(energy),
        }
    }

    /// Analytic continuation of φ to complex energy, where one exists.
    pub fn evaluate_complex(&self, energy: Complex64) -> Result<Complex64> {
        match &self.kind {
            SpectralKind::GaussianInE { k } => Ok((-k * k * energy).exp()),
            SpectralKind::SquarePulse { length } => {
                // sinc²(u/2) is even in u, so the branch of √(2E) is irrelevant.
                let u = 0.5 * length * (2.0 * energy).sqrt();
                let s = eigenbasis::sinc(0.5 * u);
                Ok(Complex64::new(0.0, -length * length / (8.0 * (PI * length).sqrt())) * s * s)
            }
            SpectralKind::Tabulated(_) => Err(Error::Unsupported(
                "tabulated spectral functions have no analytic continuation".into(),
            )),
        }
    }

    pub fn is_analytic(&self) -> bool {
        !matches!(self.kind, SpectralKind::Tabulated(_))
    }

    /// Largest energy at which φ is defined, if finite.
    pub fn support_end(&self) -> Option<f64> {
        match &self.kind {
            SpectralKind::Tabulated(t) => t.energies.last().copied(),
            _ => None,
        }
    }

    /// Upper bound of `∫_E^∞ |φ| dE'`, or `None` if |φ| is not integrable.
    pub(crate) fn tail_l1(&self, energy: f64) -> Option<f64> {
        match &self.kind {
            SpectralKind::GaussianInE { k } => Some((-k * k * energy).exp() / (k * k)),
            SpectralKind::SquarePulse { .. } => None,
            SpectralKind::Tabulated(t) => {
                if energy >= *t.energies.last().unwrap() {
                    Some(0.0)
                } else {
                    None
                }
            }
        }
    }

    /// Approximates `∫_P^∞ |φ(p²/2)|² p² dp`: exact for the gaussian,
    /// leading mean term for the square pulse, zero past a table's end.
    pub(crate) fn norm_tail(&self, p_cut: f64) -> f64 {
        match &self.kind {
            SpectralKind::GaussianInE { k } => {
                let a = k * k;
                p_cut * (-a * p_cut * p_cut).exp() / (2.0 * a)
                    + PI.sqrt() * libm::erfc(k * p_cut) / (4.0 * a * k)
            }
            // |φ|²p² = (1 − cos(Lp/2))²/(πL p²), whose mean is (3/2)/(πL p²).
            SpectralKind::SquarePulse { length } => 1.5 / (PI * length * p_cut),
            SpectralKind::Tabulated(_) => 0.0,
        }
    }

    /// Admissibility of φ: finite at E → 0 and |φ| decaying faster than
    /// `E^{-1/2}`.
    pub fn check_admissibility(&self) -> AdmissibilityReport {
        let finite_at_zero = self.value_at_zero.re.is_finite() && self.value_at_zero.im.is_finite();
        let decay_exponent = match &self.kind {
            SpectralKind::GaussianInE { .. } => f64::NEG_INFINITY,
            SpectralKind::Tabulated(t) => t.decay_exponent,
            SpectralKind::SquarePulse { .. } => envelope_exponent(|e| {
                self.evaluate(e).map(|v| v.norm()).unwrap_or(f64::NAN)
            }),
        };
        AdmissibilityReport {
            finite_at_zero,
            decay_exponent,
            admissible: finite_at_zero && decay_exponent < -0.5,
        }
    }

    /// Writes the table CSV format (`E,re_phi,im_phi`) sampled on `energies`.
    pub fn write_csv<W: Write>(&self, mut out: W, energies: &[f64]) -> Result<()> {
        let decay = self.check_admissibility().decay_exponent;
        writeln!(out, "# decay_exponent={}", crate::io::fmt_num(decay))?;
        writeln!(out, "E,re_phi,im_phi")?;
        for &e in energies {
            let v = self.evaluate(e)?;
            writeln!(
                out,
                "{},{},{}",
                crate::io::fmt_num(e),
                crate::io::fmt_num(v.re),
                crate::io::fmt_num(v.im)
            )?;
        }
        Ok(())
    }

    /// Reads a table written by [`Self::write_csv`] (or by hand).
    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut decay = None;
        let mut header_seen = false;
        let mut energies = Vec::new();
        let mut values = Vec::new();
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(v) = rest.trim().strip_prefix("decay_exponent=") {
                    decay = Some(parse_f64(v, lineno)?);
                }
                continue;
            }
            if !header_seen {
                let cols: Vec<&str> = line.split(',').map(str::trim).collect();
                if cols != ["E", "re_phi", "im_phi"] {
                    return Err(Error::Parse(format!(
                        "line {}: expected header E,re_phi,im_phi",
                        lineno + 1
                    )));
                }
                header_seen = true;
                continue;
            }
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols.len() != 3 {
                return Err(Error::Parse(format!("line {}: expected 3 columns", lineno + 1)));
            }
            energies.push(parse_f64(cols[0], lineno)?);
            values.push(Complex64::new(parse_f64(cols[1], lineno)?, parse_f64(cols[2], lineno)?));
        }
        let decay = decay.ok_or_else(|| Error::Parse("missing '# decay_exponent=' line".into()))?;
        Self::tabulated(energies, values, decay)
    }
}

fn parse_f64(s: &str, lineno: usize) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("line {}: bad number '{s}'", lineno + 1)))
}

fn sinc_real(u: f64) -> f64 {
    if u.abs() < 1e-4 {
        1.0 - u * u / 6.0
    } else {
        u.sin() / u
    }
}

/// Log-log slope of the envelope of |φ| over E ∈ [10², 10⁶], taken from
/// the maximum of |φ| in each of 40 logarithmic bins.
fn envelope_exponent<F: Fn(f64) -> f64>(abs_phi: F) -> f64 {
    const BINS: usize = 40;
    const SAMPLES: usize = 400;
    let (lo, hi) = (2.0f64, 6.0f64);
    let mut pts = Vec::with_capacity(BINS);
    for b in 0..BINS {
        let a = lo + (hi - lo) * b as f64 / BINS as f64;
        let c = lo + (hi - lo) * (b + 1) as f64 / BINS as f64;
        let (e0, e1) = (10f64.powf(a), 10f64.powf(c));
        let mut best = (0.0, e0);
        for s in 0..=SAMPLES {
            let e = e0 + (e1 - e0) * s as f64 / SAMPLES as f64;
            let v = abs_phi(e);
            if v > best.0 {
                best = (v, e);
            }
        }
        if best.0 <= 0.0 || !best.0.is_finite() {
            return f64::NEG_INFINITY;
        }
        pts.push((best.1.ln(), best.0.ln()));
    }
    least_squares_slope(&pts)
}

pub(crate) fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmissibilityReport {
    pub finite_at_zero: bool,
    /// Large-E power-law exponent of |φ|; `-inf` for faster-than-power decay.
    pub decay_exponent: f64,
    pub admissible: bool,
}

const NORM_P_MAX: f64 = 2000.0;

/// `∫₀^∞ w(E)|φ(E)|² p dE` with `p = √(2E)`, i.e. `‖ψ(·, 0)‖²` for the packet
/// built from `sf` with eigenfunction normalization `c1`.
///
/// The integral runs in momentum (`dE = p dp`); tails are either bounded
/// below the tolerance or added from [`SpectralFunction::norm_tail`].
pub fn normalization_integral(
    sf: &SpectralFunction,
    cfg: &PotentialConfig,
    c1: f64,
    tol: Tolerance,
) -> Result<f64> {
    if !sf.check_admissibility().admissible {
        return Err(Error::domain("normalization integral diverges"));
    }
    let c1sq = c1 * c1;
    let tail_scale = |p: f64| {
        let g = 1.0 + 3.0 * cfg.strength() / p;
        0.5 * PI * c1sq * g * g
    };
    let p_end = match sf.support_end() {
        Some(e) => momentum(e),
        None => {
            let mut p = 4.0;
            while p < NORM_P_MAX && tail_scale(p) * sf.norm_tail(p) > 1e-3 * tol.abs {
                p *= 2.0;
            }
            p.min(NORM_P_MAX)
        }
    };
    let width = (0.125 * PI / cfg.length()).min(0.25);
    let n = (p_end / width).ceil() as usize;
    let breaks = quadrature::uniform_breakpoints(0.0, p_end, n);
    let (body, _) = quadrature::integrate_real(
        |p| {
            let phi = sf.evaluate(0.5 * p * p).map(|v| v.norm_sqr()).unwrap_or(0.0);
            c1sq * eigenbasis::weight_per_c1sq(p, cfg) * phi * p * p
        },
        &breaks,
        tol,
    )?;
    let tail = if sf.support_end().is_some() {
        0.0
    } else {
        0.5 * PI * c1sq * sf.norm_tail(p_end)
    };
    Ok(body + tail)
}

/// Eigenfunction normalization `c1` that makes the packet built from `sf`
/// unit-normalized.
pub fn normalizing_c1(sf: &SpectralFunction, cfg: &PotentialConfig, tol: Tolerance) -> Result<f64> {
    Ok(normalization_integral(sf, cfg, 1.0, tol)?.powf(-0.5))
}

/// x at which the scan for a decayed initial state starts, in units of L.
const SCAN_START: f64 = 2.0;

/// End of the support of `psi0`: the first point beyond `2L` after which
/// `|psi0| < 1e-12` holds on 10 consecutive samples spaced `L/50` apart.
pub fn truncation_point<F>(psi0: &F, cfg: &PotentialConfig) -> Result<f64>
where
    F: Fn(f64) -> Complex64,
{
    let dx = cfg.length() / 50.0;
    let mut x = SCAN_START * cfg.length();
    let limit = 1e4 * cfg.length();
    let mut quiet = 0;
    while x < limit {
        if psi0(x).norm() < 1e-12 {
            quiet += 1;
            if quiet == 10 {
                return Ok(x);
            }
        } else {
            quiet = 0;
        }
        x += dx;
    }
    Err(Error::domain("initial state does not decay in x"))
}

/// Projects an initial state onto the eigenbasis:
/// `φ(E) = ∫₀^∞ Ψ_E(x) ψ₀(x) dx / (w(E)·p)`, evaluated at each grid energy.
pub fn reconstruct_spectral<F>(
    psi0: F,
    cfg: &PotentialConfig,
    c1: f64,
    energies: &[f64],
    tol: Tolerance,
    exec: Execution,
) -> Result<SpectralFunction>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    if energies.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::domain("energy grid must be strictly positive"));
    }
    let x_max = truncation_point(&psi0, cfg)?;
    let len = cfg.length();
    let values = exec.try_map(energies, |&e| {
        let co = eigenbasis::eigen_coeffs(e, cfg, c1)?;
        let p = co.momentum();
        let width = (0.25 * len).min(0.5 * PI / p);
        let mut breaks = quadrature::uniform_breakpoints(0.0, len, (len / width).ceil() as usize);
        let outer = quadrature::uniform_breakpoints(len, x_max, ((x_max - len) / width).ceil() as usize);
        breaks.extend_from_slice(&outer[1..]);
        let est = quadrature::integrate_panels(
            |x| psi0(x) * co.value(x),
            &breaks,
            tol,
            quadrature::DEFAULT_MAX_SEGMENTS,
        )?;
        Ok(est.value / (co.weight * p))
    })?;
    let decay = tail_exponent(energies, &values);
    SpectralFunction::tabulated(energies.to_vec(), values, decay)
}

/// Power-law exponent fitted over the last quarter of a table.
fn tail_exponent(energies: &[f64], values: &[Complex64]) -> f64 {
    let start = energies.len() * 3 / 4;
    let pts: Vec<(f64, f64)> = energies[start..]
        .iter()
        .zip(&values[start..])
        .filter(|(_, v)| v.norm() > 0.0)
        .map(|(e, v)| (e.ln(), v.norm().ln()))
        .collect();
    if pts.len() < 2 || pts.len() < energies.len() - start {
        return f64::NEG_INFINITY;
    }
    let slope = least_squares_slope(&pts);
    if slope.is_finite() {
        slope
    } else {
        f64::NEG_INFINITY
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_values() {
        let sf = SpectralFunction::gaussian(0.5).unwrap();
        assert_eq!(sf.evaluate(0.0).unwrap(), Complex64::new(1.0, 0.0));
        assert!((sf.evaluate(4.0).unwrap().re - (-1.0f64).exp()).abs() < 1e-16);
        assert!(SpectralFunction::gaussian(0.0).is_err());
        assert!(sf.evaluate(-1.0).is_err());
    }

    #[test]
    fn square_pulse_limit_matches_literal_formula() {
        let len = 3.0;
        let sf = SpectralFunction::square_pulse(len).unwrap();
        let literal = |e: f64| {
            let u = 0.5 * len * (2.0 * e).sqrt();
            -(1.0 - u.cos()) / (2.0 * e * (PI * len).sqrt())
        };
        let zero = sf.value_at_zero();
        assert_eq!(zero.re, 0.0);
        assert!((zero.im - (-len * len / (8.0 * (PI * len).sqrt()))).abs() < 1e-16);
        // Literal form at E = 1e-12 carries ~1e-4 relative cancellation error.
        assert!((literal(1e-12) - zero.im).abs() < 1e-4 * zero.im.abs());
        // Away from zero both forms agree tightly.
        for &e in &[0.01, 0.7, 3.0, 250.0] {
            assert!((sf.evaluate(e).unwrap().im - literal(e)).abs() < 1e-13);
        }
    }

    #[test]
    fn complex_continuation_matches_real_axis() {
        for sf in [
            SpectralFunction::gaussian(0.5).unwrap(),
            SpectralFunction::square_pulse(3.0).unwrap(),
        ] {
            for &e in &[1e-9, 0.3, 5.0] {
                let a = sf.evaluate(e).unwrap();
                let b = sf.evaluate_complex(Complex64::new(e, 0.0)).unwrap();
                assert!((a - b).norm() < 1e-14);
            }
        }
        let t = SpectralFunction::tabulated(vec![0.0, 1.0], vec![Complex64::new(1.0, 0.0); 2], -2.0)
            .unwrap();
        assert!(matches!(
            t.evaluate_complex(Complex64::new(0.5, 0.0)),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn admissibility_reports() {
        let g = SpectralFunction::gaussian(0.5).unwrap().check_admissibility();
        assert!(g.admissible && g.finite_at_zero);
        assert_eq!(g.decay_exponent, f64::NEG_INFINITY);

        let s = SpectralFunction::square_pulse(3.0).unwrap().check_admissibility();
        assert!(s.admissible);
        assert!((s.decay_exponent + 1.0).abs() < 0.02, "{}", s.decay_exponent);

        let grid: Vec<f64> = (1..50).map(|k| k as f64).collect();
        let vals = grid.iter().map(|e| Complex64::new(e.powf(-0.5), 0.0)).collect();
        let t = SpectralFunction::tabulated(grid, vals, -0.5).unwrap().check_admissibility();
        assert!(!t.admissible);
    }

    #[test]
    fn table_validation_and_range() {
        assert!(SpectralFunction::tabulated(vec![1.0], vec![Complex64::new(1.0, 0.0)], -2.0).is_err());
        assert!(SpectralFunction::tabulated(
            vec![1.0, 1.0],
            vec![Complex64::new(1.0, 0.0); 2],
            -2.0
        )
        .is_err());
        let t = SpectralFunction::tabulated(
            vec![0.5, 1.0, 2.0],
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.1), Complex64::new(0.2, 0.0)],
            -2.0,
        )
        .unwrap();
        assert!(matches!(t.evaluate(3.0), Err(Error::Range { .. })));
        assert!(matches!(t.evaluate(0.1), Err(Error::Range { .. })));
        assert_eq!(t.evaluate(1.0).unwrap(), Complex64::new(0.5, 0.1));
    }

    #[test]
    fn pchip_does_not_overshoot() {
        let e = vec![0.0, 1.0, 2.0, 3.0, 4.0];
        let v: Vec<Complex64> = [0.0, 0.0, 1.0, 1.0, 1.0]
            .iter()
            .map(|&r| Complex64::new(r, 0.0))
            .collect();
        let t = SpectralFunction::tabulated(e, v, -2.0).unwrap();
        for k in 0..=400 {
            let x = k as f64 * 0.01;
            let y = t.evaluate(x).unwrap().re;
            assert!((-1e-15..=1.0 + 1e-15).contains(&y), "x={x} y={y}");
        }
    }

    #[test]
    fn csv_round_trip() {
        let e: Vec<f64> = (0..20).map(|k| 0.25 * k as f64).collect();
        let sf = SpectralFunction::square_pulse(3.0).unwrap();
        let mut buf = Vec::new();
        sf.write_csv(&mut buf, &e).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# decay_exponent="));
        let back = SpectralFunction::read_csv(text.as_bytes()).unwrap();
        for &x in &e {
            assert_eq!(back.evaluate(x).unwrap(), sf.evaluate(x).unwrap());
        }
    }

    #[test]
    fn csv_rejects_missing_decay_line() {
        let text = "E,re_phi,im_phi\n0,1,0\n1,0.5,0\n";
        assert!(matches!(SpectralFunction::read_csv(text.as_bytes()), Err(Error::Parse(_))));
        let bad = "# decay_exponent=-2\nE,re,im\n";
        assert!(SpectralFunction::read_csv(bad.as_bytes()).is_err());
    }

    #[test]
    fn normalization_rejects_inadmissible() {
        let grid: Vec<f64> = (1..50).map(|k| k as f64).collect();
        let vals = grid.iter().map(|e| Complex64::new(e.powf(-0.5), 0.0)).collect();
        let sf = SpectralFunction::tabulated(grid, vals, -0.5).unwrap();
        let cfg = PotentialConfig::new(3.0, 1.0).unwrap();
        let err = normalization_integral(&sf, &cfg, 1.0, Tolerance::default()).unwrap_err();
        assert_eq!(err, Error::Domain("normalization integral diverges".into()));
    }

    #[test]
    fn reconstruct_rejects_nonpositive_grid() {
        let cfg = PotentialConfig::new(3.0, 1.0).unwrap();
        let r = reconstruct_spectral(
            |_| Complex64::new(0.0, 0.0),
            &cfg,
            1.0,
            &[0.0, 1.0],
            Tolerance::default(),
            Execution::Sequential,
        );
        assert!(r.is_err());
    }

    #[test]
    fn reconstruct_zero_state() {
        let cfg = PotentialConfig::new(3.0, 1.0).unwrap();
        let sf = reconstruct_spectral(
            |_| Complex64::new(0.0, 0.0),
            &cfg,
            1.0,
            &[0.5, 1.0, 2.0],
            Tolerance::default(),
            Execution::Sequential,
        )
        .unwrap();
        for &e in &[0.5, 1.0, 2.0] {
            assert_eq!(sf.evaluate(e).unwrap(), Complex64::new(0.0, 0.0));
        }
    }
}
