use magband::assembly::{assemble_effective, assemble_iwatsuka, EffectiveFiber, Grid};
use magband::bands::{band_scan, linspace};
use magband::closedform::{bottom_parallel, flat_spectrum};
use magband::eigensolve::{lowest_band_eigs, lowest_eigs};
use magband::geometry::{CurveFamily, CurveProfile};
use magband::iwatsuka::{IwatsukaSpec, Primitive, Profile};
use magband::linalg::SymBandMatrix;
use magband::specfun::dirichlet_approx;
use proptest::prelude::*;

fn laplacian_2d(n: usize, bw: usize) -> SymBandMatrix {
    let mut m = SymBandMatrix::zeros(n * bw, bw);
    for i in 0..n {
        for j in 0..bw {
            let k = i * bw + j;
            m.add(k, k, 4.0);
            if j + 1 < bw {
                m.add(k, k + 1, -1.0);
            }
            if i + 1 < n {
                m.add(k, k + bw, -1.0);
            }
        }
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn nonnegative_diagonal_raises_every_level(diag in prop::collection::vec(0.0f64..3.0, 96)) {
        let base = laplacian_2d(16, 6);
        let mut bumped = base.clone();
        for (k, d) in diag.iter().enumerate() {
            bumped.add(k, k, *d);
        }
        let lo = lowest_band_eigs(&base, 0.0, 4, false).unwrap().values;
        let hi = lowest_band_eigs(&bumped, 0.0, 4, false).unwrap().values;
        for (a, b) in lo.iter().zip(&hi) {
            prop_assert!(b >= &(a - 1e-10), "{a} -> {b}");
        }
    }

    #[test]
    fn larger_box_lowers_levels(xi in -2.0f64..2.0, extra in 1usize..40) {
        let profile = CurveProfile::new(CurveFamily::Line).unwrap();
        let n = 399;
        let l = 6.0;
        let h = 2.0 * l / (n + 1) as f64;
        let small = Grid::line(l, n).without_confinement_check();
        let big = Grid::line(l + extra as f64 * h, n + 2 * extra).without_confinement_check();
        let a = lowest_eigs(&assemble_effective(&profile, 1.0, xi, small).unwrap(), 3).unwrap();
        let b = lowest_eigs(&assemble_effective(&profile, 1.0, xi, big).unwrap(), 3).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!(y <= &(x + 1e-10), "{x} -> {y}");
        }
    }

    #[test]
    fn rational_approximation_guarantee(theta in 0.01f64..50.0, bound in 1u64..5000) {
        let r = dirichlet_approx(theta, bound).unwrap();
        prop_assert!(r.q >= 1 && r.q <= bound);
        prop_assert!((r.q as f64 * theta - r.p as f64).abs() <= 1.0 / (bound + 1) as f64 + 1e-12);
    }

    #[test]
    fn bottom_scaling_identity(b0 in 0.05f64..4.0, a in 0.3f64..2.0) {
        let lhs = bottom_parallel(b0, a).unwrap();
        let rhs = bottom_parallel(b0 * a * a, 1.0).unwrap() / (a * a);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs());
    }

    #[test]
    fn flat_spectrum_is_sorted_and_above_field(b0 in 0.1f64..5.0, a in 0.2f64..2.0) {
        let levels = flat_spectrum(b0, a, 4, 4).unwrap();
        prop_assert!(levels.windows(2).all(|w| w[0].value <= w[1].value));
        prop_assert!(levels.iter().all(|l| l.value > b0));
    }
}

#[test]
fn bands_vary_smoothly_in_momentum() {
    let spec = IwatsukaSpec::new(
        1.0,
        Profile(vec![Primitive::Step { value: -0.5, start: 0.0, end: 2.0 }]),
        Profile::zero(),
        -0.5,
        2.6,
    )
    .unwrap();
    let xi = linspace(-2.0, 2.0, 41);
    let dxi = xi[1] - xi[0];
    let grid = Grid::line(10.0, 1000).with_budget(7.0);
    let bands: Vec<Vec<f64>> = xi
        .iter()
        .map(|&x| lowest_eigs(&assemble_iwatsuka(&spec, x, grid).unwrap(), 3).unwrap())
        .collect();
    // Hellmann-Feynman: |d lambda / d xi| <= 2 sqrt(lambda) for this operator.
    for w in bands.windows(2) {
        for m in 0..3 {
            let slope = (w[1][m] - w[0][m]).abs() / dxi;
            assert!(slope <= 2.0 * w[0][m].max(w[1][m]).sqrt() + 1e-6, "branch {m}: slope {slope}");
        }
    }
}

#[test]
fn band_scan_matches_pointwise_solves() {
    let profile = CurveProfile::new(CurveFamily::Bump { amplitude: 0.4, center: 0.0, width: 1.5 }).unwrap();
    let grid = Grid::line(8.0, 300).with_budget(5.0);
    let op = EffectiveFiber::new(&profile, 1.0, grid).unwrap();
    let xi = linspace(-1.0, 1.0, 5);
    let bands = band_scan(&op, &xi, 2).unwrap();
    for (j, &x) in xi.iter().enumerate() {
        let direct = lowest_eigs(&assemble_effective(&profile, 1.0, x, grid).unwrap(), 2).unwrap();
        assert_eq!(bands.values[j], direct);
    }
}
