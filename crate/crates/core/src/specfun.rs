//! Special functions: Kummer's confluent hypergeometric function, Hermite
//! oscillator modes, Dirichlet interval modes, and best rational
//! approximations.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quad::{self, OdeTolerance};

const SERIES_MAX_TERMS: usize = 500;
const SERIES_MAX_X: f64 = 30.0;
const SERIES_MAX_ALPHA: f64 = 60.0;

/// Kummer's function `1F1(alpha; beta; x)`.
///
/// Power series with Neumaier summation for `|x| <= 30` and moderate
/// `|alpha|`; otherwise the Kummer equation is integrated from a small
/// starting point where the series is benign.
pub fn kummer_1f1(alpha: f64, beta: f64, x: f64) -> Result<f64> {
    if beta <= 0.0 && beta == beta.round() {
        return Err(Error::invalid(format!("1F1 pole: beta = {beta} is a non-positive integer")));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    if x < 0.0 {
        // Kummer's transformation avoids the alternating series
        return Ok(x.exp() * kummer_1f1(beta - alpha, beta, -x)?);
    }
    if x.abs() <= SERIES_MAX_X && alpha.abs() <= SERIES_MAX_ALPHA {
        return kummer_series(alpha, beta, x);
    }
    kummer_ode(alpha, beta, x)
}

fn kummer_series(alpha: f64, beta: f64, x: f64) -> Result<f64> {
    let mut sum = 1.0;
    let mut comp = 0.0;
    let mut term = 1.0;
    for k in 0..SERIES_MAX_TERMS {
        let kf = k as f64;
        term *= (alpha + kf) / (beta + kf) * x / (kf + 1.0);
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
        if term == 0.0 || (term.abs() < 1e-16 * (sum + comp).abs() && kf > x.abs()) {
            return Ok(sum + comp);
        }
    }
    Err(Error::Convergence {
        what: "1F1 power series",
        detail: format!("no convergence after {SERIES_MAX_TERMS} terms (alpha={alpha}, beta={beta}, x={x})"),
    })
}

fn kummer_ode(alpha: f64, beta: f64, x: f64) -> Result<f64> {
    // start where |alpha x0| is small so the series has no cancellation
    let x0 = x.signum() * (0.5 / (1.0 + alpha.abs())).min(x.abs() / 2.0);
    let y0 = kummer_series(alpha, beta, x0)?;
    let dy0 = alpha / beta * kummer_series(alpha + 1.0, beta + 1.0, x0)?;
    let rhs = |t: f64, y: &[f64; 2]| [y[1], (alpha * y[0] - (beta - t) * y[1]) / t];
    let tol = OdeTolerance {
        abs: 1e-300,
        rel: 1e-13,
        max_steps: 2_000_000,
    };
    let y = quad::dopri45(rhs, x0, x, [y0, dy0], tol)?;
    Ok(y[0])
}

/// Normalized Hermite function for the oscillator `-d^2 + B0^2 x^2`:
/// `psi_m(x) = (2^m m!)^{-1/2} (B0/pi)^{1/4} exp(-B0 x^2/2) H_m(sqrt(B0) x)`.
pub fn hermite_psi(m: usize, b0: f64, x: f64) -> Result<f64> {
    if m > 200 {
        return Err(Error::invalid(format!("Hermite index {m} exceeds the recurrence budget of 200")));
    }
    if !(b0 > 0.0) {
        return Err(Error::invalid("hermite_psi needs B0 > 0"));
    }
    let t = b0.sqrt() * x;
    let mut prev = (b0 / PI).powf(0.25) * (-0.5 * t * t).exp();
    if m == 0 {
        return Ok(prev);
    }
    let mut cur = 2f64.sqrt() * t * prev;
    for k in 1..m {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * t * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Transverse Dirichlet eigenvalue `E_n = (n pi / 2)^2` on `(-1, 1)`.
pub fn dirichlet_eigenvalue(n: usize) -> f64 {
    let k = n as f64 * PI / 2.0;
    k * k
}

/// Dirichlet mode on `(-1, 1)`: `(chi_n(u), E_n)` with `chi_n = cos(n pi u / 2)`
/// for odd `n` and `sin(n pi u / 2)` for even `n`.
pub fn dirichlet_mode(n: usize, u: f64) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::invalid("Dirichlet modes are indexed from n = 1"));
    }
    if !(-1.0..=1.0).contains(&u) {
        return Err(Error::invalid(format!("u = {u} outside [-1, 1]")));
    }
    let arg = n as f64 * PI * u / 2.0;
    let chi = if n % 2 == 1 { arg.cos() } else { arg.sin() };
    // exact zeros at the walls
    let chi = if u.abs() == 1.0 { 0.0 } else { chi };
    Ok((chi, dirichlet_eigenvalue(n)))
}

/// Rational `p/q` with `q <= bound` and `|q theta - p| <= 1/(bound + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RationalApprox {
    pub p: u64,
    pub q: u64,
    pub bound: u64,
    pub residual: f64,
}

/// Last continued-fraction convergent of `theta` with denominator `<= bound`.
pub fn dirichlet_approx(theta: f64, bound: u64) -> Result<RationalApprox> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::invalid(format!("theta = {theta} must be positive and finite")));
    }
    if bound == 0 {
        return Err(Error::invalid("denominator bound must be >= 1"));
    }
    let (mut p_prev, mut q_prev) = (1u64, 0u64);
    let mut a0 = theta.floor();
    let (mut p, mut q) = (a0 as u64, 1u64);
    let mut rest = theta - a0;
    for _ in 0..64 {
        if rest <= 0.0 {
            break;
        }
        let x = 1.0 / rest;
        a0 = x.floor();
        rest = x - a0;
        let a = a0 as u64;
        let q_next = match a.checked_mul(q).and_then(|v| v.checked_add(q_prev)) {
            Some(v) => v,
            None => break,
        };
        if q_next > bound {
            break;
        }
        let p_next = a * p + p_prev;
        (p_prev, q_prev, p, q) = (p, q, p_next, q_next);
    }
    let residual = (q as f64 * theta - p as f64).abs();
    let limit = 1.0 / (bound as f64 + 1.0);
    if residual <= limit {
        return Ok(RationalApprox { p, q, bound, residual });
    }
    // floating-point expansion drifted; fall back to direct search
    let best = (1..=bound)
        .map(|q| {
            let p = (q as f64 * theta).round();
            (p as u64, q, (q as f64 * theta - p).abs())
        })
        .min_by(|x, y| x.2.total_cmp(&y.2))
        .expect("bound >= 1");
    Ok(RationalApprox {
        p: best.0,
        q: best.1,
        bound,
        residual: best.2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kummer_trivial_values() {
        assert_eq!(kummer_1f1(0.3, 1.7, 0.0).unwrap(), 1.0);
        assert!((kummer_1f1(1.0, 1.0, 1.0).unwrap() - std::f64::consts::E).abs() < 1e-14);
        assert!(kummer_1f1(-1.0, 0.5, 0.5).unwrap().abs() < 1e-16);
        assert!(kummer_1f1(1.0, -2.0, 0.5).is_err());
    }

    #[test]
    fn kummer_terminating_polynomials() {
        let b = 0.5;
        for &x in &[-2.0, -0.3, 0.7, 4.0] {
            let p1 = 1.0 - x / b;
            let p2 = 1.0 - 2.0 * x / b + x * x / (b * (b + 1.0));
            let p3 = 1.0 - 3.0 * x / b + 3.0 * x * x / (b * (b + 1.0)) - x * x * x / (b * (b + 1.0) * (b + 2.0));
            for (k, p) in [(1.0, p1), (2.0, p2), (3.0, p3)] {
                let v = kummer_1f1(-k, b, x).unwrap();
                assert!((v - p).abs() < 1e-12 * (1.0 + p.abs()), "k={k} x={x}: {v} vs {p}");
            }
        }
    }

    #[test]
    #[allow(clippy::excessive_precision)]
    fn kummer_reference_values() {
        // 40-digit reference evaluations
        let refs = [
            (0.3, 0.5, -6.0, 0.23843282212124060522),
            (-2.7, 1.5, 10.0, -11.546836664026192555),
            (-2.7, 1.5, -6.0, 41.949187954455317898),
            (1.2, 2.5, 3.0, 5.749087187604970076),
            (-0.8, 0.5, -1.0, 2.5080560008787760995),
            (4.2, 1.5, -10.0, -0.00052422557352567403561),
            (-0.8, 0.5, 25.0, -375356745.73122556125),
        ];
        for (a, b, x, want) in refs {
            let got = kummer_1f1(a, b, x).unwrap();
            assert!((got - want).abs() <= 1e-11 * want.abs(), "a={a} b={b} x={x}: {got} vs {want}");
        }
    }

    #[test]
    fn kummer_ode_fallback_matches_series() {
        // large |alpha|: both routes must agree where the series is still usable
        let a = -70.3;
        for &x in &[0.01, 0.05, 0.2] {
            let series = kummer_series(a, 0.5, x).unwrap();
            let ode = kummer_ode(a, 0.5, x).unwrap();
            assert!((series - ode).abs() < 1e-8 * series.abs().max(1.0), "x={x}: {series} vs {ode}");
        }
    }

    #[test]
    fn hermite_values() {
        assert!((hermite_psi(0, 1.0, 0.0).unwrap() - PI.powf(-0.25)).abs() < 1e-15);
        assert_eq!(hermite_psi(1, 2.3, 0.0).unwrap(), 0.0);
        assert!(hermite_psi(201, 1.0, 0.0).is_err());
    }

    #[test]
    fn hermite_orthonormal() {
        let b0 = 1.7;
        for i in 0..=10 {
            for j in i..=10 {
                let ip = quad::integrate(
                    |x| hermite_psi(i, b0, x).unwrap() * hermite_psi(j, b0, x).unwrap(),
                    -15.0,
                    15.0,
                    1e-13,
                    1e-13,
                )
                .unwrap();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((ip - expect).abs() < 1e-8, "<{i},{j}> = {ip}");
            }
        }
    }

    #[test]
    fn dirichlet_modes() {
        let (_, e1) = dirichlet_mode(1, 0.0).unwrap();
        assert!((e1 - PI * PI / 4.0).abs() < 1e-15);
        assert_eq!(dirichlet_mode(1, 1.0).unwrap().0, 0.0);
        assert_eq!(dirichlet_mode(1, -1.0).unwrap().0, 0.0);
        let (_, e2) = dirichlet_mode(2, 0.3).unwrap();
        assert!((e2 - PI * PI).abs() < 1e-14);
        assert!((e2 - e1 - 0.75 * PI * PI).abs() < 1e-14);
        assert!(dirichlet_mode(0, 0.0).is_err());
        assert!(dirichlet_mode(1, 1.2).is_err());
    }

    #[test]
    fn dirichlet_approx_examples() {
        let r = dirichlet_approx(1.0, 5).unwrap();
        assert_eq!((r.p, r.q, r.residual), (1, 1, 0.0));
        let r = dirichlet_approx(2f64.sqrt(), 5).unwrap();
        assert_eq!((r.p, r.q), (7, 5));
        assert!((r.residual - 0.0710678).abs() < 1e-6);
        let r = dirichlet_approx(PI, 7).unwrap();
        assert_eq!((r.p, r.q), (22, 7));
        assert!((r.residual - 0.0088514).abs() < 1e-6);
        assert!(dirichlet_approx(-1.0, 3).is_err());
    }
}
