//! The time-dependent wavefunction
//!
//! ```text
//! ψ(x, t) = ∫₀^∞ φ(E) Ψ_E(x) e^{−iEt} dE
//! ```
//!
//! evaluated four ways: in closed form for φ(E) = e^{−K²E}, by adaptive
//! quadrature along the real energy axis, by rotating the energy contour
//! onto the negative imaginary axis (t > 0), and by its leading large-t form.

use std::f64::consts::{FRAC_PI_2, PI};
use std::io::Write;

use num_complex::Complex64;

use crate::eigenbasis::{self, PotentialConfig};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::io::{fmt_num, Metadata};
use crate::quadrature::{self, Tolerance};
use crate::spectral::{self, SpectralFunction, SpectralKind};

/// `M = e^{−i3π/4}·√(π/2) = −(√π/2)(1 + i)`, the large-t amplitude of
/// `ψ(x, t)/(c1·φ(0)·x·t^{−3/2})` inside the well.
pub const ASYMPTOTIC_AMPLITUDE: Complex64 =
    Complex64::new(-0.886_226_925_452_758, -0.886_226_925_452_758);

/// The complex spreading parameter `K² + it`. Its real part is `K² > 0`, so
/// principal-branch powers are continuous in `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexTimeFactor {
    value: Complex64,
}

impl ComplexTimeFactor {
    pub fn new(k: f64, t: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::domain("K must be positive"));
        }
        Ok(Self {
            value: Complex64::new(k * k, t),
        })
    }

    pub fn value(&self) -> Complex64 {
        self.value
    }

    /// `(K² + it)^{−3/2}` on the principal branch.
    pub fn pow_neg_three_halves(&self) -> Complex64 {
        self.value.powf(-1.5)
    }

    pub fn pow_neg_half(&self) -> Complex64 {
        self.value.powf(-0.5)
    }
}

/// `e^z − 1` without cancellation for small `|z|`.
fn exp_m1(z: Complex64) -> Complex64 {
    let (s, c) = z.im.sin_cos();
    let half = (0.5 * z.im).sin();
    Complex64::new(z.re.exp_m1() * c - 2.0 * half * half, z.re.exp() * s)
}

/// Closed-form `ψ(x, t)` for φ(E) = e^{−K²E}.
pub fn psi_closed_form(x: f64, t: f64, k: f64, cfg: &PotentialConfig, c1: f64) -> Result<Complex64> {
    let tau = ComplexTimeFactor::new(k, t)?;
    if x <= 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if x <= cfg.length() {
        Ok(c1 * wall_term(x, tau))
    } else {
        Ok(c1 * (wall_term(x, tau) + barrier_term(x, tau, cfg)))
    }
}

/// Both closed-form region formulas (inside, outside) evaluated at `x`
/// regardless of which region `x` lies in.
pub fn closed_form_branches(
    x: f64,
    t: f64,
    k: f64,
    cfg: &PotentialConfig,
    c1: f64,
) -> Result<(Complex64, Complex64)> {
    let tau = ComplexTimeFactor::new(k, t)?;
    let wall = wall_term(x, tau);
    Ok((c1 * wall, c1 * (wall + barrier_term(x, tau, cfg))))
}

/// `√(π/2)·x·τ^{−3/2}·e^{−x²/2τ}`
fn wall_term(x: f64, tau: ComplexTimeFactor) -> Complex64 {
    let z = tau.value();
    FRAC_PI_2.sqrt() * x * tau.pow_neg_three_halves() * (-(x * x) / (2.0 * z)).exp()
}

/// `V0·√(π/2)·τ^{−1/2}·(e^{−(x−2L)²/2τ} − e^{−x²/2τ})`, with the larger
/// exponential factored out: `−e^{−(x−2L)²/2τ}·expm1(−2L(x−L)/τ)`.
fn barrier_term(x: f64, tau: ComplexTimeFactor, cfg: &PotentialConfig) -> Complex64 {
    let z = tau.value();
    let len = cfg.length();
    let mirror = (-(x - 2.0 * len).powi(2) / (2.0 * z)).exp();
    let diff = -mirror * exp_m1(-2.0 * len * (x - len) / z);
    cfg.strength() * FRAC_PI_2.sqrt() * tau.pow_neg_half() * diff
}

/// Closed-form normalization `c1` for φ(E) = e^{−K²E}.
pub fn normalization_c1(k: f64, cfg: &PotentialConfig) -> Result<f64> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::domain("K must be positive"));
    }
    let len = cfg.length();
    let v = cfg.strength();
    let pi32 = PI.powf(1.5);
    let screen = (-(len * len) / (k * k)).exp();
    let bracket = pi32 / (8.0 * k.powi(3)) + screen * len * pi32 * v / (2.0 * k.powi(3))
        + pi32 * v * v / (2.0 * k)
        - screen * pi32 * v * v / (2.0 * k);
    Ok(bracket.powf(-0.5))
}

/// How [`WaveField::psi`] evaluates the wavefunction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Closed form; gaussian spectral functions only.
    ClosedForm,
    /// Real-axis energy quadrature.
    Quadrature,
    /// Rotated contour; analytic spectral functions and t > 0 only.
    Contour,
    /// Closed form when available, else contour where it is well
    /// conditioned, else quadrature.
    Auto,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::ClosedForm => "closed_form",
            Mode::Quadrature => "quadrature",
            Mode::Contour => "contour",
            Mode::Auto => "auto",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed_form" => Ok(Mode::ClosedForm),
            "quadrature" => Ok(Mode::Quadrature),
            "contour" => Ok(Mode::Contour),
            "auto" => Ok(Mode::Auto),
            other => Err(Error::Parse(format!("unknown mode '{other}'"))),
        }
    }
}

/// A normalized wave packet: potential, spectral function, eigenfunction
/// normalization `c1` and evaluation policy. Immutable once built.
#[derive(Debug, Clone)]
pub struct WaveField {
    cfg: PotentialConfig,
    sf: SpectralFunction,
    c1: f64,
    mode: Mode,
    tol: Tolerance,
    admissible: bool,
}

impl WaveField {
    /// Gaussian spectral function with closed-form evaluation and `c1` from
    /// the closed-form normalization.
    pub fn gaussian(cfg: PotentialConfig, k: f64) -> Result<Self> {
        Self::new(cfg, SpectralFunction::gaussian(k)?, Mode::ClosedForm, Tolerance::default())
    }

    /// Builds a normalized field; `c1` comes from the closed form for the
    /// gaussian and from the energy-space normalization integral otherwise.
    pub fn new(cfg: PotentialConfig, sf: SpectralFunction, mode: Mode, tol: Tolerance) -> Result<Self> {
        tol.validate()?;
        let c1 = match sf.kind() {
            SpectralKind::GaussianInE { k } => normalization_c1(*k, &cfg)?,
            _ => spectral::normalizing_c1(&sf, &cfg, tol)?,
        };
        Self::with_c1(cfg, sf, c1, mode, tol)
    }

    /// Builds a field with a caller-chosen `c1`.
    pub fn with_c1(
        cfg: PotentialConfig,
        sf: SpectralFunction,
        c1: f64,
        mode: Mode,
        tol: Tolerance,
    ) -> Result<Self> {
        tol.validate()?;
        if !(c1 > 0.0 && c1.is_finite()) {
            return Err(Error::domain("c1 must be positive"));
        }
        if mode == Mode::ClosedForm && !matches!(sf.kind(), SpectralKind::GaussianInE { .. }) {
            return Err(Error::Unsupported(
                "closed form exists only for the gaussian spectral function".into(),
            ));
        }
        let admissible = sf.check_admissibility().admissible;
        Ok(Self {
            cfg,
            sf,
            c1,
            mode,
            tol,
            admissible,
        })
    }

    pub fn config(&self) -> &PotentialConfig {
        &self.cfg
    }

    pub fn spectral(&self) -> &SpectralFunction {
        &self.sf
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn tolerance(&self) -> Tolerance {
        self.tol
    }

    /// Same field, different evaluation policy.
    pub fn with_mode(&self, mode: Mode) -> Result<Self> {
        Self::with_c1(self.cfg, self.sf.clone(), self.c1, mode, self.tol)
    }

    pub fn with_tolerance(&self, tol: Tolerance) -> Result<Self> {
        Self::with_c1(self.cfg, self.sf.clone(), self.c1, self.mode, tol)
    }

    /// `K` of a gaussian spectral function.
    pub fn gaussian_k(&self) -> Option<f64> {
        match self.sf.kind() {
            SpectralKind::GaussianInE { k } => Some(*k),
            _ => None,
        }
    }

    /// ψ(x, t) according to [`Self::mode`].
    pub fn psi(&self, x: f64, t: f64) -> Result<Complex64> {
        match self.mode {
            Mode::ClosedForm => self.closed_form(x, t),
            Mode::Quadrature => psi_quadrature(x, t, self),
            Mode::Contour => psi_contour(x, t, self),
            Mode::Auto => {
                if self.gaussian_k().is_some() {
                    self.closed_form(x, t)
                } else if self.contour_well_conditioned(x, t) {
                    psi_contour(x, t, self)
                } else {
                    psi_quadrature(x, t, self)
                }
            }
        }
    }

    fn closed_form(&self, x: f64, t: f64) -> Result<Complex64> {
        let k = self.gaussian_k().ok_or_else(|| {
            Error::Unsupported("closed form exists only for the gaussian spectral function".into())
        })?;
        psi_closed_form(x, t, k, &self.cfg, self.c1)
    }

    /// The rotated integrand peaks near `e^{(x+L)²/(4t)}`; beyond ~e^{10} of
    /// dynamic range the cancellation costs more digits than the real axis.
    fn contour_well_conditioned(&self, x: f64, t: f64) -> bool {
        self.sf.is_analytic() && t > 0.0 && (x + self.growth_extra()).powi(2) / (4.0 * t) < 10.0
    }

    fn growth_extra(&self) -> f64 {
        match self.sf.kind() {
            SpectralKind::SquarePulse { length } => 0.5 * length,
            _ => 0.0,
        }
    }

    /// ψ on the Cartesian product `xs × ts`, `t`-major.
    pub fn evaluate_grid(&self, xs: &[f64], ts: &[f64], exec: Execution) -> Result<Vec<FieldSample>> {
        let points: Vec<(f64, f64)> = ts
            .iter()
            .flat_map(|&t| xs.iter().map(move |&x| (x, t)))
            .collect();
        exec.try_map(&points, |&(x, t)| {
            Ok(FieldSample {
                x,
                t,
                psi: self.psi(x, t)?,
            })
        })
    }

    /// Metadata describing this field for CSV headers.
    pub fn metadata(&self) -> Metadata {
        let mut m = Metadata::new();
        m.push_num("L", self.cfg.length())
            .push_num("V0", self.cfg.strength());
        match self.gaussian_k() {
            Some(k) => m.push_num("K", k),
            None => m.push("sf", self.sf.label()),
        };
        m.push_num("c1", self.c1).push("mode", self.mode.name());
        m
    }
}

/// One evaluated point of ψ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub x: f64,
    pub t: f64,
    pub psi: Complex64,
}

impl FieldSample {
    pub fn density(&self) -> f64 {
        self.psi.norm_sqr()
    }
}

/// Writes samples as `x,t,re_psi,im_psi,density` under a metadata header.
pub fn write_field_csv<W: Write>(out: &mut W, meta: &Metadata, samples: &[FieldSample]) -> Result<()> {
    meta.write(out)?;
    writeln!(out, "x,t,re_psi,im_psi,density")?;
    for s in samples {
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt_num(s.x),
            fmt_num(s.t),
            fmt_num(s.psi.re),
            fmt_num(s.psi.im),
            fmt_num(s.density())
        )?;
    }
    Ok(())
}

const MAX_PANELS: usize = 2_000_000;
const TAPER_START: f64 = 64.0;
const TAPER_MAX: f64 = 8192.0;

/// Panel edges in momentum up to `p_end`: each panel spans at most π/4 of
/// the phase `Et` and at most a quarter period of the spatial oscillation.
fn momentum_panels(p_end: f64, x: f64, t: f64, len: f64) -> Result<Vec<f64>> {
    let dp_space = 0.5 * PI / (x + len);
    let de_time = if t == 0.0 { f64::INFINITY } else { 0.25 * PI / t.abs() };
    let mut edges = vec![0.0];
    let mut p = 0.0f64;
    while p < p_end {
        let next = (p + dp_space).min((p * p + 2.0 * de_time).sqrt());
        p = next.min(p_end);
        edges.push(p);
        if edges.len() > MAX_PANELS {
            return Err(Error::Unsupported(format!(
                "direct quadrature at t = {t} needs more than {MAX_PANELS} panels; use contour mode"
            )));
        }
    }
    Ok(edges)
}

/// ψ(x, t) by direct quadrature of the energy convolution, integrated in
/// momentum (`dE = p dp`).
///
/// When `∫|φ|` has a summable tail the integral stops at the energy where
/// the tail bound drops below a tenth of the absolute tolerance. Spectral
/// functions that are only conditionally integrable (|φ| ~ 1/E) are summed
/// with a smooth window over `[P, 2P]`, doubling `P` until two successive
/// windows (or their Richardson extrapolants) agree.
pub fn psi_quadrature(x: f64, t: f64, wf: &WaveField) -> Result<Complex64> {
    if !wf.admissible {
        return Err(Error::domain("spectral function is not admissible"));
    }
    if x <= 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let cfg = &wf.cfg;
    let sf = &wf.sf;
    let tol = wf.tol;
    let integrand = |p: f64| -> Complex64 {
        let e = 0.5 * p * p;
        let phi = sf.evaluate(e).unwrap_or_default();
        phi * eigenbasis::bracket(p, x, cfg) * Complex64::from_polar(p, -e * t)
    };

    let p_end = match sf.support_end() {
        Some(e_end) => Some(eigenbasis::momentum(e_end)),
        None => absolute_cutoff(sf, cfg, wf.c1, tol.abs),
    };
    if let Some(p_end) = p_end {
        let edges = momentum_panels(p_end, x, t, cfg.length())?;
        let est = quadrature::integrate_panels(
            integrand,
            &edges,
            scaled(tol, wf.c1),
            quadrature::DEFAULT_MAX_SEGMENTS.max(4 * edges.len()),
        )?;
        return Ok(wf.c1 * est.value);
    }

    let windowed = |cut: f64| -> Result<Complex64> {
        let edges = momentum_panels(2.0 * cut, x, t, cfg.length())?;
        let est = quadrature::integrate_panels(
            |p| integrand(p) * quadrature::smooth_taper(p / cut - 1.0),
            &edges,
            scaled(tol, wf.c1),
            quadrature::DEFAULT_MAX_SEGMENTS.max(4 * edges.len()),
        )?;
        Ok(est.value)
    };
    // A non-oscillating remainder (x at a multiple of the pulse edges) leaves
    // an error ∝ 1/P in each window; Richardson's 2S(2P) − S(P) removes it.
    let mut cut = TAPER_START.max(8.0 * (x + cfg.length()));
    let mut prev = windowed(cut)?;
    let mut prev_extrap: Option<Complex64> = None;
    loop {
        cut *= 2.0;
        let next = windowed(cut)?;
        let change = wf.c1 * (next - prev).norm();
        let target = tol.abs.max(tol.rel * wf.c1 * next.norm());
        if change <= target {
            return Ok(wf.c1 * next);
        }
        let extrap = 2.0 * next - prev;
        let mut achieved = change;
        if let Some(pe) = prev_extrap {
            let drift = wf.c1 * (extrap - pe).norm();
            if drift <= target {
                return Ok(wf.c1 * extrap);
            }
            achieved = achieved.min(drift);
        }
        if cut >= TAPER_MAX {
            return Err(Error::Convergence {
                achieved,
                requested: target,
            });
        }
        prev = next;
        prev_extrap = Some(extrap);
    }
}

fn scaled(tol: Tolerance, c1: f64) -> Tolerance {
    Tolerance::new(tol.abs / c1, tol.rel)
}

/// Momentum beyond which `c1·∫|φ||Ψ/c1| dE < abs/10`, if that tail is summable.
fn absolute_cutoff(sf: &SpectralFunction, cfg: &PotentialConfig, c1: f64, abs: f64) -> Option<f64> {
    let mut e = 1.0;
    for _ in 0..200 {
        let tail = sf.tail_l1(e)?;
        let p = eigenbasis::momentum(e);
        if c1 * eigenbasis::bracket_bound(p, cfg) * tail < 0.1 * abs {
            return Some(p);
        }
        e *= 1.25;
    }
    None
}

/// ψ(x, t) for t > 0 from the rotated contour `E = −iy`:
///
/// ```text
/// ψ(x, t) = −i·c1 ∫₀^∞ φ(−iy) Ψ̂(√(−2iy); x) e^{−yt} dy
/// ```
///
/// with `Ψ̂ = Ψ/c1` continued to complex momentum. Integrated in `u = √y`.
/// The upper limit is where the growth bound `e^{cu − tu²}` falls below
/// `e^{−50}`, with `c` the largest exponential growth rate of the integrand.
pub fn psi_contour(x: f64, t: f64, wf: &WaveField) -> Result<Complex64> {
    if !wf.sf.is_analytic() {
        return Err(Error::Unsupported(
            "contour rotation needs an analytic spectral function".into(),
        ));
    }
    if !(t > 0.0) {
        return Err(Error::domain("contour rotation requires t > 0"));
    }
    if x <= 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let cfg = &wf.cfg;
    let sf = &wf.sf;
    let rot = Complex64::from_polar(2f64.sqrt(), -0.25 * PI);
    let integrand = |u: f64| -> Complex64 {
        let y = u * u;
        let phi = sf.evaluate_complex(Complex64::new(0.0, -y)).unwrap_or_default();
        phi * eigenbasis::bracket_complex(rot * u, x, cfg) * (2.0 * u * (-y * t).exp())
    };
    let growth = x + cfg.length() + wf.growth_extra();
    let u_max = (growth + (growth * growth + 200.0 * t).sqrt()) / (2.0 * t);
    let width = (0.5 / t.sqrt()).min(0.5 / (growth + 1.0));
    let n = (u_max / width).ceil() as usize;
    let edges = quadrature::uniform_breakpoints(0.0, u_max, n);
    let est = quadrature::integrate_panels(
        integrand,
        &edges,
        scaled(wf.tol, wf.c1),
        quadrature::DEFAULT_MAX_SEGMENTS,
    )?;
    Ok(Complex64::new(0.0, -wf.c1) * est.value)
}

/// Leading large-t form inside the well: `c1·φ(0)·x·M·t^{−3/2}`.
pub fn asymptotic_psi(x: f64, t: f64, wf: &WaveField) -> Result<Complex64> {
    if !(t > 0.0) {
        return Err(Error::domain("asymptotic form requires t > 0"));
    }
    if x > wf.cfg.length() {
        return Err(Error::domain("asymptotic form holds inside the well"));
    }
    if x <= 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(wf.c1 * wf.sf.value_at_zero() * x * ASYMPTOTIC_AMPLITUDE * t.powf(-1.5))
}
