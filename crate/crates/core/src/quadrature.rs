//! Globally adaptive Gauss–Kronrod (G10/K21) quadrature for complex-valued
//! integrands over finite interval sets.
//!
//! The integrator accepts a list of breakpoints rather than a single
//! interval. Oscillatory integrands are seeded with panels that each span a
//! bounded amount of phase, and the adaptive loop then bisects whichever
//! panel currently carries the largest error estimate until the total
//! estimate drops below `max(abs, rel * |I|)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_2,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_73,
    0.054_755_896_574_352,
    0.075_039_674_810_919_95,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_85,
    0.134_709_217_311_473_33,
    0.142_775_938_577_060_08,
    0.147_739_104_901_338_49,
    0.149_445_554_002_916_9,
];

// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5, 7, 9.
const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_36,
    0.295_524_224_714_752_87,
];

/// Absolute and relative tolerances for an integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs > 0.0 && self.rel >= 0.0) || !self.abs.is_finite() {
            return Err(Error::domain("tolerances must be positive"));
        }
        Ok(())
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value)
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::new(1e-10, 1e-8)
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod21<F>(f: &F, a: f64, b: f64) -> Segment
where
    F: Fn(f64) -> Complex64,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = Complex64::new(0.0, 0.0);
    for j in 0..10 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += pair * WGK[j];
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).norm();
    // Floor at round-off level so that exact panels do not dominate the heap.
    let floor = 50.0 * f64::EPSILON * value.norm();
    Segment {
        a,
        b,
        value,
        error: error.max(floor),
    }
}

/// Integrates `f` over the union of consecutive intervals defined by
/// `breakpoints` (strictly increasing, at least two entries).
pub fn integrate_panels<F>(
    f: F,
    breakpoints: &[f64],
    tol: Tolerance,
    max_segments: usize,
) -> Result<Estimate>
where
    F: Fn(f64) -> Complex64,
{
    tol.validate()?;
    if breakpoints.len() < 2 {
        return Err(Error::domain("at least two breakpoints required"));
    }
    let mut heap = BinaryHeap::with_capacity(breakpoints.len() * 2);
    let mut total = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    let mut evaluations = 0;
    for w in breakpoints.windows(2) {
        if !(w[1] > w[0]) {
            if w[1] == w[0] {
                continue;
            }
            return Err(Error::domain("breakpoints must be increasing"));
        }
        let seg = kronrod21(&f, w[0], w[1]);
        evaluations += 21;
        total += seg.value;
        error += seg.error;
        heap.push(seg);
    }
    if heap.is_empty() {
        return Ok(Estimate {
            value: total,
            error: 0.0,
            evaluations,
        });
    }
    let limit = max_segments.max(heap.len());
    while error > tol.target(total.norm()) {
        if heap.len() >= limit {
            return Err(Error::Convergence {
                achieved: error,
                requested: tol.target(total.norm()),
            });
        }
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // Interval exhausted at machine precision.
            return Err(Error::Convergence {
                achieved: error,
                requested: tol.target(total.norm()),
            });
        }
        let left = kronrod21(&f, worst.a, mid);
        let right = kronrod21(&f, mid, worst.b);
        evaluations += 42;
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // Recompute the sums from scratch to drop accumulated cancellation.
    let (value, error) = heap.iter().fold((Complex64::new(0.0, 0.0), 0.0), |acc, s| {
        (acc.0 + s.value, acc.1 + s.error)
    });
    Ok(Estimate {
        value,
        error,
        evaluations,
    })
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<F>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate>
where
    F: Fn(f64) -> Complex64,
{
    integrate_panels(f, &[a, b], tol, DEFAULT_MAX_SEGMENTS)
}

/// Real-valued convenience wrapper around [`integrate_panels`].
pub fn integrate_real<F>(f: F, breakpoints: &[f64], tol: Tolerance) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    let est = integrate_panels(
        |x| Complex64::new(f(x), 0.0),
        breakpoints,
        tol,
        DEFAULT_MAX_SEGMENTS,
    )?;
    Ok((est.value.re, est.error))
}

pub const DEFAULT_MAX_SEGMENTS: usize = 200_000;

/// `n + 1` equally spaced breakpoints covering `[a, b]`.
pub fn uniform_breakpoints(a: f64, b: f64, n: usize) -> Vec<f64> {
    let n = n.max(1);
    let h = (b - a) / n as f64;
    let mut out: Vec<f64> = (0..n).map(|k| a + h * k as f64).collect();
    out.push(b);
    out
}

/// C-infinity step that is 1 for `s <= 0`, 0 for `s >= 1`, and smooth in
/// between. All derivatives vanish at both ends.
pub fn smooth_taper(s: f64) -> f64 {
    if s <= 0.0 {
        1.0
    } else if s >= 1.0 {
        0.0
    } else {
        let bump = |u: f64| if u > 0.0 { (-1.0 / u).exp() } else { 0.0 };
        let up = bump(1.0 - s);
        up / (up + bump(s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let est = integrate(|x| Complex64::new(x.powi(7), 0.0), 0.0, 2.0, Tolerance::default())
            .unwrap();
        assert!((est.value.re - 32.0).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_complex_integrand() {
        // ∫₀^{10} e^{i 5 x} dx = (e^{50 i} − 1) / (5 i)
        let est = integrate_panels(
            |x| Complex64::new(0.0, 5.0 * x).exp(),
            &uniform_breakpoints(0.0, 10.0, 20),
            Tolerance::new(1e-13, 0.0),
            10_000,
        )
        .unwrap();
        let exact = (Complex64::new(0.0, 50.0).exp() - 1.0) / Complex64::new(0.0, 5.0);
        assert!((est.value - exact).norm() < 1e-12);
    }

    #[test]
    fn sqrt_endpoint_singularity() {
        let (v, _) = integrate_real(|x| x.sqrt(), &[0.0, 1.0], Tolerance::new(1e-12, 0.0)).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-11);
    }

    #[test]
    fn segment_limit_reports_convergence_error() {
        let err = integrate_panels(
            |x| Complex64::new((1.0 / x).sin(), 0.0),
            &[1e-8, 1.0],
            Tolerance::new(1e-30, 0.0),
            50,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Convergence { .. }));
    }

    #[test]
    fn bad_tolerance_rejected() {
        assert!(integrate(|_| Complex64::new(1.0, 0.0), 0.0, 1.0, Tolerance::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn taper_is_monotone_and_bounded() {
        let mut prev = 1.0;
        for k in 0..=100 {
            let v = smooth_taper(k as f64 / 100.0);
            assert!((0.0..=1.0).contains(&v));
            assert!(v <= prev + 1e-15);
            prev = v;
        }
        assert_eq!(smooth_taper(-0.5), 1.0);
        assert_eq!(smooth_taper(1.5), 0.0);
        assert!((smooth_taper(0.5) - 0.5).abs() < 1e-15);
    }
}
