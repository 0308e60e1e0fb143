//! The ten acceptance criteria, one test each, at their stated tolerances.
//! Each test prints a single PASS/FAIL line with the measured values.

use std::time::{Duration, Instant};

use deltawall::eigenbasis::eigen_coeffs;
use deltawall::observables::{self, time_grid, DecayCurve};
use deltawall::propagator::{closed_form_branches, normalization_c1, psi_contour, psi_quadrature};
use deltawall::spectral::{self, normalization_integral};
use deltawall::verify::{self, ORACLE_TS, ORACLE_XS, UNITARITY_TS};
use deltawall::{Execution, Mode, PotentialConfig, SpectralFunction, Tolerance, WaveField};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn base() -> PotentialConfig {
    PotentialConfig::new(3.0, 1.0).unwrap()
}

fn field() -> WaveField {
    WaveField::gaussian(base(), 0.5).unwrap()
}

fn verdict(n: usize, name: &str, pass: bool, detail: String) {
    println!("criterion {n:>2} {name}: {} ({detail})", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {n} failed: {detail}");
}

#[test]
fn criterion_01_oracle_equivalence() {
    let start = Instant::now();
    let wf = field();
    let q = wf.with_mode(Mode::Quadrature).unwrap();
    let mut quad_dev: f64 = 0.0;
    let mut contour_dev: f64 = 0.0;
    for &t in &ORACLE_TS {
        for &x in &ORACLE_XS {
            let closed = wf.psi(x, t).unwrap();
            quad_dev = quad_dev.max((closed - psi_quadrature(x, t, &q).unwrap()).norm());
            if t >= 1.0 {
                contour_dev = contour_dev.max((closed - psi_contour(x, t, &wf).unwrap()).norm());
            }
        }
    }
    let elapsed = start.elapsed();
    verdict(
        1,
        "oracle equivalence",
        quad_dev <= 1e-7 && contour_dev <= 1e-7 && elapsed <= Duration::from_secs(60),
        format!("closed-quadrature {quad_dev:.2e}, closed-contour {contour_dev:.2e}, {elapsed:.2?}"),
    );
}

#[test]
fn criterion_02_unitarity() {
    let wf = field();
    let dev = UNITARITY_TS
        .iter()
        .map(|&t| (observables::survival_quadrature(t, &wf, f64::INFINITY).unwrap() - 1.0).abs())
        .fold(0.0, f64::max);
    verdict(2, "unitarity", dev <= 1e-6, format!("max |norm - 1| = {dev:.2e} over t in {UNITARITY_TS:?}"));
}

#[test]
fn criterion_03_large_length_survival() {
    let far = PotentialConfig::new(60.0, 1.0).unwrap();
    let p = |k: f64| observables::survival_closed_form(0.0, k, &far).unwrap();
    let (a, b, c) = (p(0.1), p(0.5), p(1.2));
    let analytic = observables::survival_large_length_limit(1.2, 1.0);
    let pass = (a - 0.9615).abs() <= 1e-3
        && (b - 0.5).abs() <= 1e-3
        && (c - 0.1479).abs() <= 1e-3
        && (c - analytic).abs() <= 1e-12;
    verdict(
        3,
        "P_in(0) large-L limits",
        pass,
        format!("K=0.1 {a:.5}, K=0.5 {b:.5}, K=1.2 {c:.5}"),
    );
}

#[test]
fn criterion_04_asymptotic_law() {
    let start = Instant::now();
    let ts = time_grid(50.0, 1000.0, 40, true);
    let ex = Execution::default();
    let gauss = DecayCurve::closed_form(0.5, &base(), &ts, ex).unwrap();
    let s_gauss = observables::asymptotic_slope(&gauss, 50.0).unwrap();
    let square = WaveField::new(
        base(),
        SpectralFunction::square_pulse(3.0).unwrap(),
        Mode::Auto,
        Tolerance::default(),
    )
    .unwrap();
    let sq = DecayCurve::quadrature(&square, 3.0, &ts, ex).unwrap();
    let s_square = observables::asymptotic_slope(&sq, 50.0).unwrap();
    let elapsed = start.elapsed();
    verdict(
        4,
        "asymptotic t^-3 law",
        (s_gauss + 3.0).abs() <= 0.05 && (s_square + 3.0).abs() <= 0.1 && elapsed <= Duration::from_secs(300),
        format!("gaussian slope {s_gauss:.4}, square-pulse slope {s_square:.4}, {elapsed:.2?}"),
    );
}

#[test]
fn criterion_05_decay_rate() {
    let cfg = base();
    let fd = time_grid(0.1, 50.0, 200, true)
        .into_iter()
        .map(|t| verify::lambda_residual(t, 0.5, &cfg).unwrap())
        .fold(0.0, f64::max);
    let seven = PotentialConfig::new(3.0, 7.0).unwrap();
    let identical = time_grid(0.0, 50.0, 101, false).into_iter().all(|t| {
        observables::decay_rate(t, 0.5, &cfg).unwrap() == observables::decay_rate(t, 0.5, &seven).unwrap()
    });
    let tl = 1e3 * observables::decay_rate(1e3, 0.5, &cfg).unwrap();
    verdict(
        5,
        "decay-rate consistency",
        fd <= 1e-5 && identical && (tl - 3.0).abs() <= 0.15,
        format!("max FD mismatch {fd:.2e}, V0-independent {identical}, t*lambda(1e3) = {tl:.5}"),
    );
}

#[test]
fn criterion_06_exponential_fit() {
    let ts = time_grid(2.0, 4.0, 21, false);
    let curve = DecayCurve::closed_form(0.5, &base(), &ts, Execution::default()).unwrap();
    let fit = observables::fit_exponential(&curve, (2.0, 4.0)).unwrap();
    verdict(
        6,
        "exponential fit on [2,4]",
        (1e-8..=1e-5).contains(&fit.chi2_per_dof) && fit.n_points == 21,
        format!("chi2/dof {:.3e}, a {:.5}, b {:.5}", fit.chi2_per_dof, fit.a, fit.b),
    );
}

#[test]
fn criterion_07_boundary_physics() {
    let cfg = base();
    let wf = field();
    let mut rng = StdRng::seed_from_u64(7);
    let mut cont: f64 = 0.0;
    let mut jump: f64 = 0.0;
    for _ in 0..10 {
        let e = 10f64.powf(rng.gen_range(-3.0..2.0));
        let co = eigen_coeffs(e, &cfg, 1.0).unwrap();
        cont = cont.max((co.inner_branch(3.0) - co.outer_branch(3.0)).abs());
        jump = jump.max(verify::eigen_jump_residual(e, &cfg).unwrap());
    }
    for _ in 0..10 {
        let t = rng.gen_range(0.0..20.0);
        let (a, b) = closed_form_branches(3.0, t, 0.5, &cfg, wf.c1()).unwrap();
        cont = cont.max((a - b).norm());
        jump = jump.max(verify::psi_jump_residual(&wf, t).unwrap());
    }
    verdict(
        7,
        "boundary physics",
        cont <= 1e-10 && jump <= 1e-6,
        format!("continuity {cont:.2e}, FD jump residual {jump:.2e}"),
    );
}

#[test]
fn criterion_08_spectral_round_trip() {
    let cfg = base();
    let wf = field();
    let es = time_grid(0.1, 10.0, 200, true);
    let sf = spectral::reconstruct_spectral(
        |x| wf.psi(x, 0.0).unwrap(),
        &cfg,
        wf.c1(),
        &es,
        Tolerance::new(1e-12, 1e-10),
        Execution::default(),
    )
    .unwrap();
    // grid nodes and the midpoints between them
    let probe = es.iter().copied().chain(es.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    let round = probe
        .map(|e| (sf.evaluate(e).unwrap() - (-0.25 * e).exp()).norm())
        .fold(0.0, f64::max);
    let n = normalization_integral(&SpectralFunction::gaussian(0.5).unwrap(), &cfg, 1.0, Tolerance::default())
        .unwrap();
    let c1 = normalization_c1(0.5, &cfg).unwrap();
    let rel = (n.powf(-0.5) - c1).abs() / c1;
    verdict(
        8,
        "spectral round trip",
        round <= 1e-6 && rel <= 1e-8,
        format!("max |phi - exp(-K^2 E)| {round:.2e}, C1 relative mismatch {rel:.2e}"),
    );
}

#[test]
fn criterion_09_region_two_centroid() {
    let devs: Vec<f64> = [0.25, 0.5, 1.0]
        .iter()
        .map(|&k| {
            let wf = WaveField::gaussian(base(), k).unwrap();
            (verify::region_two_centroid(&wf, 0.0).unwrap() - 6.0).abs()
        })
        .collect();
    verdict(
        9,
        "region-II centroid",
        devs.iter().all(|&d| d <= 1e-3),
        format!("|centroid - 2L| for K = 0.25, 0.5, 1.0: {:.2e} {:.2e} {:.2e}", devs[0], devs[1], devs[2]),
    );
}

#[test]
fn criterion_10_modified_survival() {
    let cfg = base();
    let ex = Execution::default();
    let early = observables::modified_survival_curve(0.5, &cfg, &time_grid(0.0, 20.0, 201, false), ex).unwrap();
    let late = observables::modified_survival_curve(0.5, &cfg, &time_grid(100.0, 1000.0, 30, true), ex).unwrap();
    let slope = observables::asymptotic_slope(&late, 100.0).unwrap();
    let steps = observables::step_features(&early, 0.0, 20.0);
    verdict(
        10,
        "modified survival P_in(4L)",
        early.p_in[0] > 0.99 && (slope + 3.0).abs() <= 0.1 && steps >= 2,
        format!("P(0) {:.6}, late slope {slope:.4}, step features {steps}", early.p_in[0]),
    );
}
