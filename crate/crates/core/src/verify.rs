//! The invariant suite: unitarity, agreement of the independent ψ
//! evaluators, boundary conditions, closed-form vs quadrature survival,
//! decay-rate consistency, the t⁻³ slope, the region-II centroid and the
//! two normalization routes. Each check records what it measured.

use std::f64::consts::PI;

use crate::eigenbasis::{self, PotentialConfig};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::observables::{self, DecayCurve};
use crate::propagator::{self, Mode, WaveField};
use crate::quadrature::{self, Tolerance};
use crate::spectral::{self, SpectralFunction};

/// Sample points shared by the oracle-equivalence checks.
pub const ORACLE_XS: [f64; 5] = [0.5, 1.5, 2.9, 3.1, 6.0];
pub const ORACLE_TS: [f64; 4] = [0.0, 0.3, 1.5, 5.0];
pub const UNITARITY_TS: [f64; 6] = [0.0, 0.5, 1.0, 2.0, 5.0, 20.0];

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// The measured deviation (or value) compared against `threshold`.
    pub measured: f64,
    pub threshold: f64,
    /// Set when the check could not be evaluated because an integral did
    /// not converge.
    pub convergence_failure: bool,
    pub note: Option<String>,
}

impl Check {
    fn at_most(name: &str, measured: f64, threshold: f64) -> Self {
        Self {
            name: name.to_string(),
            passed: measured <= threshold,
            measured,
            threshold,
            convergence_failure: false,
            note: None,
        }
    }

    fn from_result(name: &str, threshold: f64, r: Result<f64>) -> Self {
        match r {
            Ok(m) => Self::at_most(name, m, threshold),
            Err(e) => Self {
                name: name.to_string(),
                passed: false,
                measured: f64::NAN,
                threshold,
                convergence_failure: matches!(e, Error::Convergence { .. }),
                note: Some(e.to_string()),
            },
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub potential: PotentialConfig,
    pub k: f64,
    pub tol: Tolerance,
    pub exec: Execution,
}

impl SuiteConfig {
    pub fn defaults() -> Self {
        Self {
            potential: PotentialConfig::new(3.0, 1.0).expect("valid defaults"),
            k: 0.5,
            tol: Tolerance::default(),
            exec: Execution::default(),
        }
    }
}

/// Runs every check. A check whose computation fails is reported as failed
/// rather than aborting the suite.
pub fn run_suite(sc: &SuiteConfig) -> Vec<Check> {
    let cfg = sc.potential;
    let free = cfg.strength() == 0.0;
    let mut checks = Vec::new();

    let field = WaveField::gaussian(cfg, sc.k).and_then(|wf| wf.with_tolerance(sc.tol));
    let field = match field {
        Ok(f) => f,
        Err(e) => {
            checks.push(Check::from_result("construct_field", 0.0, Err(e)));
            return checks;
        }
    };

    checks.push(Check::from_result(
        "unitarity_max_deviation",
        1e-6,
        max_over(&UNITARITY_TS, sc.exec, |&t| {
            Ok((observables::survival_quadrature(t, &field, f64::INFINITY)? - 1.0).abs())
        }),
    ));

    let grid: Vec<(f64, f64)> = ORACLE_TS
        .iter()
        .flat_map(|&t| ORACLE_XS.iter().map(move |&x| (x, t)))
        .collect();
    let quad = field.with_mode(Mode::Quadrature);
    checks.push(Check::from_result(
        "closed_vs_quadrature_max_abs",
        1e-7,
        quad.and_then(|q| {
            max_over(&grid, sc.exec, |&(x, t)| {
                Ok((field.psi(x, t)? - propagator::psi_quadrature(x, t, &q)?).norm())
            })
        }),
    ));
    let late: Vec<(f64, f64)> = grid.iter().copied().filter(|&(_, t)| t >= 1.0).collect();
    checks.push(Check::from_result(
        "closed_vs_contour_max_abs",
        1e-7,
        max_over(&late, sc.exec, |&(x, t)| {
            Ok((field.psi(x, t)? - propagator::psi_contour(x, t, &field)?).norm())
        }),
    ));

    let len = cfg.length();
    checks.push(Check::from_result(
        "psi_continuity_at_barrier",
        1e-10,
        max_over(&[0.0, 0.3, 1.0, 5.0, 20.0], sc.exec, |&t| {
            let (a, b) = propagator::closed_form_branches(len, t, sc.k, &cfg, field.c1())?;
            Ok((a - b).norm())
        }),
    ));
    checks.push(Check::from_result(
        "psi_slope_jump_fd",
        1e-6,
        max_over(&[0.0, 0.3, 1.0, 5.0, 20.0], sc.exec, |&t| psi_jump_residual(&field, t)),
    ));
    checks.push(Check::from_result(
        "eigen_jump_fd",
        1e-6,
        max_over(&[0.05, 0.5, 1.3, 4.0, 9.0], sc.exec, |&e| eigen_jump_residual(e, &cfg)),
    ));
    checks.push(Check::from_result(
        "weight_two_forms_rel",
        1e-12,
        max_over(&log_grid(1e-6, 1e3, 37), sc.exec, |&e| {
            let a = eigenbasis::eigen_coeffs(e, &cfg, 1.0)?.weight;
            let b = eigenbasis::weight_expanded(e, &cfg, 1.0)?;
            Ok((a - b).abs() / a)
        }),
    ));

    checks.push(Check::from_result(
        "survival_closed_vs_quadrature",
        1e-7,
        max_over(&UNITARITY_TS, sc.exec, |&t| {
            let a = observables::survival_closed_form(t, sc.k, &cfg)?;
            let b = observables::survival_quadrature(t, &field, len)?;
            Ok((a - b).abs())
        }),
    ));
    checks.push(Check::from_result(
        "lambda_vs_log_derivative_rel",
        1e-5,
        max_over(&log_grid(0.1, 50.0, 25), sc.exec, |&t| lambda_residual(t, sc.k, &cfg)),
    ));
    checks.push(Check::from_result(
        "asymptotic_slope_deviation",
        0.05,
        DecayCurve::closed_form(sc.k, &cfg, &log_grid(50.0, 1000.0, 40), sc.exec)
            .and_then(|c| observables::asymptotic_slope(&c, 50.0))
            .map(|s| (s + 3.0).abs()),
    ));

    if free {
        checks.push(Check::from_result(
            "free_limit_c3_zero",
            0.0,
            max_over(&[0.1, 0.5, 2.0, 7.0], sc.exec, |&e| {
                Ok(eigenbasis::eigen_coeffs(e, &cfg, 1.0)?.c3.abs())
            }),
        ));
        checks.push(Check::from_result(
            "free_limit_c1_rel",
            1e-14,
            propagator::normalization_c1(sc.k, &cfg).map(|c1| {
                let want = (8.0 * sc.k.powi(3) / PI.powf(1.5)).sqrt();
                (c1 - want).abs() / want
            }),
        ));
    } else {
        checks.push(Check::from_result(
            "region2_centroid_deviation",
            1e-3,
            region_two_centroid(&field, 0.0).map(|c| (c - 2.0 * len).abs()),
        ));
    }

    checks.push(Check::from_result(
        "normalization_routes_rel",
        1e-8,
        SpectralFunction::gaussian(sc.k).and_then(|sf| {
            let energy = spectral::normalization_integral(&sf, &cfg, 1.0, sc.tol)?;
            let c1 = energy.powf(-0.5);
            Ok((c1 - field.c1()).abs() / field.c1())
        }),
    ));

    checks
}

fn max_over<T, F>(items: &[T], exec: Execution, f: F) -> Result<f64>
where
    T: Sync,
    F: Fn(&T) -> Result<f64> + Sync + Send,
{
    Ok(exec.try_map(items, f)?.into_iter().fold(0.0, f64::max))
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    observables::time_grid(lo, hi, n, true)
}

/// `|(ψ'(L⁺) − ψ'(L⁻)) − 2V0·ψ(L)|` with slopes from central differences
/// (h = 1e−6) of each closed-form branch.
pub fn psi_jump_residual(field: &WaveField, t: f64) -> Result<f64> {
    let k = field
        .gaussian_k()
        .ok_or_else(|| Error::Unsupported("needs a gaussian field".into()))?;
    let cfg = field.config();
    let len = cfg.length();
    let h = 1e-6;
    let (lp, rp) = propagator::closed_form_branches(len + h, t, k, cfg, field.c1())?;
    let (lm, rm) = propagator::closed_form_branches(len - h, t, k, cfg, field.c1())?;
    let (at, _) = propagator::closed_form_branches(len, t, k, cfg, field.c1())?;
    let left = (lp - lm) / (2.0 * h);
    let right = (rp - rm) / (2.0 * h);
    Ok((right - left - 2.0 * cfg.strength() * at).norm())
}

/// Finite-difference version of the eigenfunction jump condition.
pub fn eigen_jump_residual(energy: f64, cfg: &PotentialConfig) -> Result<f64> {
    let co = eigenbasis::eigen_coeffs(energy, cfg, 1.0)?;
    let len = cfg.length();
    let h = 1e-6;
    let left = (co.inner_branch(len + h) - co.inner_branch(len - h)) / (2.0 * h);
    let right = (co.outer_branch(len + h) - co.outer_branch(len - h)) / (2.0 * h);
    Ok((right - left - 2.0 * cfg.strength() * co.inner_branch(len)).abs())
}

/// `|λ(t) − (−d ln P_in/dt)| / λ(t)` with a central difference of step
/// `1e−5·max(1, t)`. The constant prefactor of `P_in` drops out of the
/// difference, so only `ln g(z(t))` is differenced.
pub fn lambda_residual(t: f64, k: f64, cfg: &PotentialConfig) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::domain("K must be positive"));
    }
    let h = 1e-5 * t.max(1.0);
    let z = |s: f64| k * cfg.length() / (k.powi(4) + s * s).sqrt();
    let up = observables::log_well_fraction(z(t + h));
    let down = observables::log_well_fraction(z(t - h));
    let fd = -(up - down) / (2.0 * h);
    let lam = observables::decay_rate(t, k, cfg)?;
    Ok((lam - fd).abs() / lam)
}

/// Density-weighted mean position over `x ≥ L`.
pub fn region_two_centroid(field: &WaveField, t: f64) -> Result<f64> {
    let len = field.config().length();
    let x_end = spectral::truncation_point(&|x| field.psi(x, t).unwrap_or_default(), field.config())?;
    let tol = Tolerance::new(1e-14, 1e-12);
    let n = ((x_end - len) / (0.1 * len)).ceil() as usize;
    let breaks = quadrature::uniform_breakpoints(len, x_end, n);
    let moment = |power: i32| {
        quadrature::integrate_real(
            |x| x.powi(power) * field.psi(x, t).map(|v| v.norm_sqr()).unwrap_or(f64::NAN),
            &breaks,
            tol,
        )
        .map(|r| r.0)
    };
    Ok(moment(1)? / moment(0)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failed_computation_is_reported_not_raised() {
        let c = Check::from_result(
            "x",
            1.0,
            Err(Error::Convergence {
                achieved: 1.0,
                requested: 0.0,
            }),
        );
        assert!(!c.passed && c.convergence_failure);
        assert!(c.note.unwrap().contains("no convergence"));
    }
}
