use std::f64::consts::PI;

use approx::{assert_abs_diff_eq, assert_relative_eq};
use magband::assembly::{assemble_transverse, Grid};
use magband::bands::{bent_thresholds, field_monotonicity_check, suff_condition_check};
use magband::closedform::{bottom_parallel, degeneracy_enumerate, near_degenerate_pair, Theta};
use magband::eigensolve::{lowest_eigs, shooting_eig_1d};
use magband::geometry::{check_assumptions, CurveFamily, CurveProfile, LayerConfig, Status};
use magband::specfun::{dirichlet_eigenvalue, hermite_psi, kummer_1f1};

#[test]
fn exact_bottom_at_half_field() {
    assert_abs_diff_eq!(bottom_parallel(0.5, 1.0).unwrap(), 2.5, epsilon = 1e-8);
}

#[test]
fn kummer_at_zero_and_polynomial_case() {
    assert_abs_diff_eq!(kummer_1f1(0.3, 0.5, 0.0).unwrap(), 1.0, epsilon = 1e-15);
    // 1F1(-1; b; x) = 1 - x / b
    assert_relative_eq!(kummer_1f1(-1.0, 0.5, 2.0).unwrap(), 1.0 - 4.0, max_relative = 1e-12);
}

#[test]
fn hermite_ground_state_is_normalised_gaussian() {
    let b0: f64 = 2.0;
    let peak = hermite_psi(0, b0, 0.0).unwrap();
    assert_relative_eq!(peak, (b0 / PI).powf(0.25), max_relative = 1e-12);
}

#[test]
fn dirichlet_levels() {
    assert_relative_eq!(dirichlet_eigenvalue(1), PI * PI / 4.0, max_relative = 1e-15);
    assert_relative_eq!(dirichlet_eigenvalue(3), 9.0 * PI * PI / 4.0, max_relative = 1e-15);
}

#[test]
fn unit_ratio_coincidences_are_exact() {
    let report = degeneracy_enumerate(Theta::rational(1, 1).unwrap(), 10, 0.1).unwrap();
    assert_eq!(report.exact.len(), 10);
    assert!(report.exact.iter().all(|c| c.verify(1, 1)));
}

#[test]
fn sqrt_two_near_pair_within_bound() {
    let pair = near_degenerate_pair(2f64.sqrt(), 0.0953).unwrap();
    assert!(pair.gap <= pair.bound);
    assert!(pair.bound <= 2.0 / 21.0 + 1e-15);
}

#[test]
fn field_monotonicity_holds() {
    let v = field_monotonicity_check(1.0, 2.0, 1.0, 10).unwrap();
    assert!(v.holds);
}

#[test]
fn bent_threshold_exceeds_layer_width() {
    let t = bent_thresholds(0.5, 1.0, 1.0).unwrap();
    assert!(t.a0_star > 0.1, "a0* = {}", t.a0_star);
}

#[test]
fn fold_assumptions_and_condition() {
    let profile = CurveProfile::new(CurveFamily::Fold { delta: 0.3, width: 1.0 }).unwrap();
    let layer = LayerConfig::new(profile.clone(), 0.2, 1.0).unwrap();
    let report = check_assumptions(&layer);
    assert!(report.all_hold());
    assert_eq!(report.status("A4"), Some(Status::HoldsByConstruction));
    assert!(suff_condition_check(&profile, 1.0).fold.holds);
}

#[test]
fn transverse_fiber_matches_shooting() {
    let (b0, a, xi) = (1.0, 0.7, 0.3);
    let fd = lowest_eigs(&assemble_transverse(xi, b0, a, Grid::transverse(1200)).unwrap(), 3).unwrap();
    // -a^-2 d2/du2 + (xi - B0 a u)^2 on (-1, 1) is a^-2 (-d2/du2 + a^2 (xi - B0 a u)^2).
    let sh = shooting_eig_1d(|u: f64| (a * (xi - b0 * a * u)).powi(2), (-1.0, 1.0), 3).unwrap();
    for (f, s) in fd.iter().zip(&sh) {
        assert_relative_eq!(*f, s / (a * a), max_relative = 1e-5);
    }
}
