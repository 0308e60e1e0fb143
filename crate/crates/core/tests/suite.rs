use deltawall::verify::{run_suite, Check, SuiteConfig};
use deltawall::{PotentialConfig, Tolerance};

fn report(checks: &[Check]) {
    for c in checks {
        println!(
            "{:<34} {:<5} measured={:.3e} threshold={:.1e} {}",
            c.name,
            c.passed,
            c.measured,
            c.threshold,
            c.note.as_deref().unwrap_or("")
        );
    }
}

#[test]
fn default_suite_passes() {
    let checks = run_suite(&SuiteConfig::defaults());
    report(&checks);
    assert!(checks.iter().all(|c| c.passed));
    assert!(checks.iter().any(|c| c.name == "region2_centroid_deviation"));
}

#[test]
fn free_particle_suite_passes() {
    let sc = SuiteConfig {
        potential: PotentialConfig::without_barrier(3.0).unwrap(),
        ..SuiteConfig::defaults()
    };
    let checks = run_suite(&sc);
    report(&checks);
    assert!(checks.iter().all(|c| c.passed));
    assert!(checks.iter().any(|c| c.name == "free_limit_c3_zero"));
}

#[test]
fn impossible_tolerance_reports_convergence_failures() {
    let sc = SuiteConfig {
        tol: Tolerance::new(1e-30, 0.0),
        ..SuiteConfig::defaults()
    };
    let checks = run_suite(&sc);
    report(&checks);
    assert!(checks.iter().any(|c| c.convergence_failure));
    assert!(!checks.iter().all(|c| c.passed));
}
