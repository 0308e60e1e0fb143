//! Stationary states of the wall + delta-barrier Hamiltonian.
//!
//! Units are fixed to ħ = m = 1. Energies are the canonical variable; the
//! momentum `p = √(2E)` is always recomputed from the energy.
//!
//! With the wall at `x = 0` and a barrier `V0·δ(x − L)`, the eigenfunction of
//! energy `E` is
//!
//! ```text
//! Ψ_E(x) = 0                                   x ≤ 0
//!        = c1·sin(px)                          0 ≤ x ≤ L
//!        = c2·sin(px) + c3·cos(px)             x ≥ L
//! ```
//!
//! where `c2`, `c3` follow from continuity at `L` and the derivative jump
//! `Ψ'(L⁺) − Ψ'(L⁻) = 2·V0·Ψ(L)`.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Wall plus delta barrier: barrier position `length` (L) and strength
/// `strength` (V0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialConfig {
    length: f64,
    strength: f64,
}

impl PotentialConfig {
    /// Both `length` and `strength` must be strictly positive and finite.
    pub fn new(length: f64, strength: f64) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::domain("L must be positive"));
        }
        if !(strength > 0.0 && strength.is_finite()) {
            return Err(Error::domain("V0 must be positive"));
        }
        Ok(Self { length, strength })
    }

    /// Wall only (`V0 = 0`), used for free-particle limit checks.
    pub fn without_barrier(length: f64) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::domain("L must be positive"));
        }
        Ok(Self {
            length,
            strength: 0.0,
        })
    }

    /// Accepts `V0 = 0` through [`Self::without_barrier`], anything else through
    /// [`Self::new`].
    pub fn with_optional_barrier(length: f64, strength: f64) -> Result<Self> {
        if strength == 0.0 {
            Self::without_barrier(length)
        } else {
            Self::new(length, strength)
        }
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn strength(&self) -> f64 {
        self.strength
    }
}

/// `√(2E)`.
pub fn momentum(energy: f64) -> f64 {
    (2.0 * energy).sqrt()
}

/// Boundary-matched coefficients of one stationary state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenCoeffs {
    pub energy: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    /// Orthogonality weight `w(E) = (π/2)(c2² + c3²)`.
    pub weight: f64,
    length: f64,
}

impl EigenCoeffs {
    pub fn momentum(&self) -> f64 {
        momentum(self.energy)
    }

    /// Region-I branch `c1·sin(px)`, evaluated for any `x`.
    pub fn inner_branch(&self, x: f64) -> f64 {
        self.c1 * (self.momentum() * x).sin()
    }

    /// Region-II branch `c2·sin(px) + c3·cos(px)`, evaluated for any `x`.
    pub fn outer_branch(&self, x: f64) -> f64 {
        let (s, c) = (self.momentum() * x).sin_cos();
        self.c2 * s + self.c3 * c
    }

    pub fn inner_slope(&self, x: f64) -> f64 {
        let p = self.momentum();
        self.c1 * p * (p * x).cos()
    }

    pub fn outer_slope(&self, x: f64) -> f64 {
        let p = self.momentum();
        let (s, c) = (p * x).sin_cos();
        p * (self.c2 * c - self.c3 * s)
    }

    /// Piecewise eigenfunction; zero for `x ≤ 0`.
    pub fn value(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else if x <= self.length {
            self.inner_branch(x)
        } else {
            self.outer_branch(x)
        }
    }
}

/// Coefficients `c2`, `c3` and weight `w(E)` for energy `E > 0`.
pub fn eigen_coeffs(energy: f64, cfg: &PotentialConfig, c1: f64) -> Result<EigenCoeffs> {
    if !(energy > 0.0) || !energy.is_finite() {
        return Err(Error::domain("momentum must be positive"));
    }
    let p = momentum(energy);
    let (s, c) = (p * cfg.length).sin_cos();
    let g = 2.0 * cfg.strength / p;
    let c2 = c1 * (1.0 + g * s * c);
    let c3 = -c1 * g * s * s;
    Ok(EigenCoeffs {
        energy,
        c1,
        c2,
        c3,
        weight: 0.5 * PI * (c2 * c2 + c3 * c3),
        length: cfg.length,
    })
}

/// The expanded (trigonometric) form of `w(E)`:
/// `|c1|²·π/(2p²)·[p² + 2V0² − 2V0²cos(2pL) + 2pV0·sin(2pL)]`.
pub fn weight_expanded(energy: f64, cfg: &PotentialConfig, c1: f64) -> Result<f64> {
    if !(energy > 0.0) {
        return Err(Error::domain("momentum must be positive"));
    }
    let p = momentum(energy);
    let v = cfg.strength;
    let s2 = (2.0 * p * cfg.length).sin();
    // 2V0² − 2V0²cos(2pL), written without the cancellation at small pL
    let versine = 2.0 * (p * cfg.length).sin().powi(2);
    Ok(c1 * c1 * PI / (2.0 * p * p) * (p * p + 2.0 * v * v * versine + 2.0 * p * v * s2))
}

/// Ψ_E(x) for the given potential and normalization.
pub fn eigenfunction(energy: f64, x: f64, cfg: &PotentialConfig, c1: f64) -> Result<f64> {
    if x <= 0.0 {
        // Region 0 is identically zero; still validate the energy.
        eigen_coeffs(energy, cfg, c1)?;
        return Ok(0.0);
    }
    Ok(eigen_coeffs(energy, cfg, c1)?.value(x))
}

/// Left and right slopes at the barrier. `jump` is right minus left, which
/// equals `2·V0·Ψ(L)` for a repulsive barrier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeJump {
    pub left_slope: f64,
    pub right_slope: f64,
    pub jump: f64,
}

/// Analytic slopes of both branches at `x = L`.
pub fn derivative_jump(energy: f64, cfg: &PotentialConfig, c1: f64) -> Result<SlopeJump> {
    let co = eigen_coeffs(energy, cfg, c1)?;
    let left_slope = co.inner_slope(cfg.length);
    let right_slope = co.outer_slope(cfg.length);
    Ok(SlopeJump {
        left_slope,
        right_slope,
        jump: right_slope - left_slope,
    })
}

/// `sin(qL)/q`, continuous at `q = 0`.
fn sin_over(q: f64, length: f64) -> f64 {
    let u = q * length;
    if u.abs() < 1e-4 {
        length * (1.0 - u * u / 6.0 + u.powi(4) / 120.0)
    } else {
        u.sin() / q
    }
}

/// `∫_L^∞ e^{−ε(x−L)} e^{iqx} dx = e^{iqL}/(ε − iq)`.
fn damped_tail(q: f64, length: f64, eps: f64) -> Complex64 {
    Complex64::from_polar(1.0, q * length) / Complex64::new(eps, -q)
}

/// Regularized inner product of two eigenfunctions: exact integral over
/// `[0, L]` plus the `e^{−ε(x−L)}`-damped integral over `[L, ∞)`, both in
/// closed form.
pub fn inner_product(
    energy_a: f64,
    energy_b: f64,
    cfg: &PotentialConfig,
    epsilon: f64,
    c1: f64,
) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(Error::domain("regularization epsilon must be positive"));
    }
    let a = eigen_coeffs(energy_a, cfg, c1)?;
    let b = eigen_coeffs(energy_b, cfg, c1)?;
    let (p, q) = (a.momentum(), b.momentum());
    let (diff, sum) = (p - q, p + q);
    let len = cfg.length;

    let inner = 0.5 * c1 * c1 * (sin_over(diff, len) - sin_over(sum, len));

    let jd = damped_tail(diff, len, epsilon);
    let js = damped_tail(sum, len, epsilon);
    // Product-to-sum: sin·sin, cos·cos, sin·cos, cos·sin.
    let ss = 0.5 * (jd.re - js.re);
    let cc = 0.5 * (jd.re + js.re);
    let sc = 0.5 * (js.im + jd.im);
    let cs = 0.5 * (js.im - jd.im);
    let outer = a.c2 * b.c2 * ss + a.c3 * b.c3 * cc + a.c2 * b.c3 * sc + a.c3 * b.c2 * cs;

    Ok(inner + outer)
}

/// `Ψ_E(x)/c1` for complex momentum `p`, using the form
/// `sin(px) + 2V0·L·sinc(pL)·sin(p(x − L))` outside the well, which is an
/// entire function of `p` (no `1/p` pole at the origin).
pub(crate) fn bracket_complex(p: Complex64, x: f64, cfg: &PotentialConfig) -> Complex64 {
    if x <= 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let inner = (p * x).sin();
    if x <= cfg.length {
        return inner;
    }
    let len = cfg.length;
    inner + 2.0 * cfg.strength * len * sinc(p * len) * (p * (x - len)).sin()
}

/// Real-momentum version of [`bracket_complex`].
pub(crate) fn bracket(p: f64, x: f64, cfg: &PotentialConfig) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let inner = (p * x).sin();
    if x <= cfg.length {
        return inner;
    }
    let len = cfg.length;
    inner + 2.0 * cfg.strength * sin_over(p, len) * (p * (x - len)).sin()
}

/// Upper bound of `|Ψ_E(x)/c1|` over `x`, for tail estimates.
pub(crate) fn bracket_bound(p: f64, cfg: &PotentialConfig) -> f64 {
    1.0 + 2.0 * cfg.strength * cfg.length.min(1.0 / p)
}

/// `w(E)/|c1|²` as a function of momentum, safe down to `p → 0`.
pub(crate) fn weight_per_c1sq(p: f64, cfg: &PotentialConfig) -> f64 {
    // c2 = 1 + V0·sin(2pL)/p, c3 = −2V0·sin²(pL)/p
    let len = cfg.length;
    let v = cfg.strength;
    let s = sin_over(p, len);
    let c2 = 1.0 + 2.0 * v * s * (p * len).cos();
    let c3 = -2.0 * v * s * (p * len).sin();
    0.5 * PI * (c2 * c2 + c3 * c3)
}

pub(crate) fn sinc(z: Complex64) -> Complex64 {
    if z.norm() < 1e-3 {
        let z2 = z * z;
        1.0 - z2 / 6.0 + z2 * z2 / 120.0 - z2 * z2 * z2 / 5040.0
    } else {
        z.sin() / z
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> PotentialConfig {
        PotentialConfig::new(3.0, 1.0).unwrap()
    }

    #[test]
    fn rejects_bad_potential() {
        assert!(PotentialConfig::new(0.0, 1.0).is_err());
        assert!(PotentialConfig::new(3.0, -1.0).is_err());
        assert!(PotentialConfig::new(3.0, 0.0).is_err());
        assert!(PotentialConfig::without_barrier(3.0).is_ok());
    }

    #[test]
    fn rejects_nonpositive_energy() {
        let err = eigen_coeffs(0.0, &cfg(), 1.0).unwrap_err();
        assert_eq!(err, Error::Domain("momentum must be positive".into()));
        assert!(eigen_coeffs(-1.0, &cfg(), 1.0).is_err());
        assert!(eigenfunction(0.0, -1.0, &cfg(), 1.0).is_err());
    }

    #[test]
    fn free_limit_coefficients() {
        let free = PotentialConfig::without_barrier(3.0).unwrap();
        let co = eigen_coeffs(0.7, &free, 1.0).unwrap();
        assert_eq!(co.c2, 1.0);
        assert_eq!(co.c3, 0.0);
        let j = derivative_jump(0.7, &free, 1.0).unwrap();
        assert!(j.jump.abs() < 1e-15);
    }

    #[test]
    fn node_of_sine_kills_barrier_terms() {
        // pL = π
        let len = 3.0;
        let p = PI / len;
        let e = 0.5 * p * p;
        let co = eigen_coeffs(e, &cfg(), 1.0).unwrap();
        assert!((co.c2 - 1.0).abs() < 1e-15);
        assert!(co.c3.abs() < 1e-15);
        let j = derivative_jump(e, &cfg(), 1.0).unwrap();
        assert!(j.jump.abs() < 1e-14);
    }

    #[test]
    fn quarter_wave_coefficients() {
        // pL = π/2: cos(pL) = 0, sin²(pL) = 1
        let p = 0.5 * PI / 3.0;
        let co = eigen_coeffs(0.5 * p * p, &cfg(), 1.0).unwrap();
        assert!((co.c2 - 1.0).abs() < 1e-14);
        assert!((co.c3 + 2.0 / p).abs() < 1e-14);
    }

    #[test]
    fn eigenfunction_regions() {
        assert_eq!(eigenfunction(0.5, 0.0, &cfg(), 1.0).unwrap(), 0.0);
        assert_eq!(eigenfunction(0.5, -1.0, &cfg(), 1.0).unwrap(), 0.0);
        let co = eigen_coeffs(0.5, &cfg(), 1.0).unwrap();
        assert_eq!(co.inner_branch(3.0), 3.0f64.sin());
        assert!((co.outer_branch(3.0) - 3.0f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn jump_matches_direct_substitution() {
        let j = derivative_jump(0.5, &cfg(), 1.0).unwrap();
        assert!((j.jump - 2.0 * 3.0f64.sin()).abs() < 1e-14);
    }

    #[test]
    fn complex_bracket_agrees_with_coefficients() {
        let c = cfg();
        for &e in &[0.01, 0.5, 2.3, 40.0] {
            let co = eigen_coeffs(e, &c, 1.0).unwrap();
            for &x in &[0.4, 2.9, 3.0, 3.7, 11.0] {
                let p = momentum(e);
                let z = bracket_complex(Complex64::new(p, 0.0), x, &c);
                assert!((z.re - co.value(x)).abs() < 1e-12, "e={e} x={x}");
                assert!(z.im.abs() < 1e-15);
                assert!((bracket(p, x, &c) - co.value(x)).abs() < 1e-12);
            }
            let w = weight_per_c1sq(momentum(e), &c);
            assert!((w - co.weight).abs() <= 1e-12 * w);
        }
    }

    #[test]
    fn inner_product_rejects_bad_epsilon() {
        assert!(inner_product(0.5, 2.0, &cfg(), 0.0, 1.0).is_err());
        assert!(inner_product(0.5, 2.0, &cfg(), -1e-3, 1.0).is_err());
    }

    #[test]
    fn inner_product_is_symmetric() {
        let a = inner_product(0.5, 2.0, &cfg(), 1e-3, 1.0).unwrap();
        let b = inner_product(2.0, 0.5, &cfg(), 1e-3, 1.0).unwrap();
        assert!((a - b).abs() <= 1e-15 * a.abs().max(1.0));
    }
}
