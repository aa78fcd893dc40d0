//! Closed-form results for flat layers: the perpendicular spectrum and its
//! degeneracies, and the bottom of the spectrum of the parallel layer.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::specfun::{dirichlet_approx, dirichlet_eigenvalue, kummer_1f1};

/// A level `B0 (2m + 1) + (n pi / 2a)^2` of the perpendicular flat layer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlatLevel {
    pub m: u32,
    pub n: u32,
    pub value: f64,
}

/// Levels with Landau index `0..=m_max` and transverse index `1..=n_max`,
/// ascending.
pub fn flat_spectrum(b0: f64, a: f64, m_max: u32, n_max: u32) -> Result<Vec<FlatLevel>> {
    if !(b0 > 0.0 && a > 0.0) {
        return Err(Error::invalid("flat spectrum needs B0 > 0 and a > 0"));
    }
    if n_max == 0 {
        return Err(Error::invalid("n_max must be at least 1"));
    }
    let mut levels: Vec<FlatLevel> = (0..=m_max)
        .flat_map(|m| {
            (1..=n_max).map(move |n| FlatLevel {
                m,
                n,
                value: b0 * f64::from(2 * m + 1) + dirichlet_eigenvalue(n as usize) / (a * a),
            })
        })
        .collect();
    levels.sort_by(|x, y| x.value.total_cmp(&y.value).then(x.m.cmp(&y.m)));
    Ok(levels)
}

/// Commensurability parameter `8 B0 a^2 / pi^2`.
pub fn theta(b0: f64, a: f64) -> f64 {
    8.0 * b0 * a * a / (PI * PI)
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// How the caller vouches for `theta`. Rationality cannot be read off a float.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Theta {
    Rational { p: u64, q: u64 },
    AssumeIrrational { value: f64 },
}

impl Theta {
    pub fn rational(p: u64, q: u64) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::invalid("theta = p/q needs p, q >= 1"));
        }
        let g = gcd(p, q);
        Ok(Theta::Rational { p: p / g, q: q / g })
    }

    pub fn value(&self) -> f64 {
        match *self {
            Theta::Rational { p, q } => p as f64 / q as f64,
            Theta::AssumeIrrational { value } => value,
        }
    }
}

/// `(m, n)` and `(mt, nt)` with `theta m + n^2 = theta mt + nt^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Coincidence {
    pub m: u64,
    pub n: u64,
    pub mt: u64,
    pub nt: u64,
}

impl Coincidence {
    /// Checks `p m + q n^2 = p mt + q nt^2` in integer arithmetic.
    pub fn verify(&self, p: u64, q: u64) -> bool {
        let (p, q) = (i128::from(p), i128::from(q));
        let sq = |x: u64| i128::from(x) * i128::from(x);
        p * i128::from(self.m) + q * sq(self.n) == p * i128::from(self.mt) + q * sq(self.nt)
    }
}

/// A pair of levels whose gap `|theta (m - mt) + n^2 - nt^2|` is below `bound`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NearPair {
    pub m: u64,
    pub n: u64,
    pub mt: u64,
    pub nt: u64,
    /// Denominator bound `N` of the rational approximation.
    pub denominator_bound: u64,
    pub p: u64,
    pub q: u64,
    /// Gap in units of `(pi / 2a)^2`.
    pub gap: f64,
    pub bound: f64,
}

impl NearPair {
    /// The same gap in energy units, `(pi / 2a)^2 * gap`.
    pub fn energy_gap(&self, a: f64) -> f64 {
        (PI / (2.0 * a)).powi(2) * self.gap
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegeneracyReport {
    pub theta: Theta,
    pub exact: Vec<Coincidence>,
    pub near: Vec<NearPair>,
}

/// For rational `theta = p/q`, `count` members of the family
/// `nt - n = p`, `m - mt = q (n + nt)`, each verified exactly. For assumed
/// irrational `theta`, a near-degenerate pair with gap below `eps`.
pub fn degeneracy_enumerate(theta: Theta, count: usize, eps: f64) -> Result<DegeneracyReport> {
    match theta {
        Theta::Rational { p, q } => {
            let g = gcd(p, q);
            let (p, q) = (p / g, q / g);
            let mut exact = Vec::with_capacity(count);
            for n in 1..=count as u64 {
                let nt = n + p;
                let c = Coincidence {
                    m: q.checked_mul(n + nt).ok_or_else(|| Error::invalid("family index overflows u64"))?,
                    n,
                    mt: 0,
                    nt,
                };
                if !c.verify(p, q) {
                    return Err(Error::Convergence {
                        what: "degeneracy verification",
                        detail: format!("{c:?} fails for theta = {p}/{q}"),
                    });
                }
                exact.push(c);
            }
            Ok(DegeneracyReport {
                theta: Theta::Rational { p, q },
                exact,
                near: Vec::new(),
            })
        }
        Theta::AssumeIrrational { value } => Ok(DegeneracyReport {
            theta,
            exact: Vec::new(),
            near: vec![near_degenerate_pair(value, eps)?],
        }),
    }
}

/// Builds two levels whose gap is at most `2/(N+1) < eps`, from a rational
/// approximation `p/q` of `theta` with `q <= N` and `p >= 3`.
pub fn near_degenerate_pair(theta: f64, eps: f64) -> Result<NearPair> {
    if !(theta > 0.0 && theta.is_finite()) || !(eps > 0.0 && eps < 1.0) {
        return Err(Error::invalid("near-degenerate pair needs theta > 0 and 0 < eps < 1"));
    }
    let mut big_n = (2.0 / eps).floor().max(1.0) as u64;
    while 2.0 / (big_n + 1) as f64 >= eps {
        big_n += 1;
    }
    loop {
        let approx = dirichlet_approx(theta, big_n)?;
        if approx.p >= 3 {
            return pair_from_approx(theta, big_n, approx.p, approx.q);
        }
        big_n = big_n.checked_mul(2).ok_or_else(|| Error::invalid("theta too small for a near pair"))?;
    }
}

/// Pair for a given approximation; `p >= 3`.
pub fn pair_from_approx(theta: f64, big_n: u64, p: u64, q: u64) -> Result<NearPair> {
    if p < 3 {
        return Err(Error::invalid("pair construction needs p >= 3"));
    }
    let (n, nt) = if p % 2 == 1 { ((p - 1) / 2, p.div_ceil(2)) } else { (p / 2 - 1, p / 2 + 1) };
    let d = nt - n;
    let (m, mt) = (q * d, 0);
    let gap = (theta * (m as f64 - mt as f64) + (n * n) as f64 - (nt * nt) as f64).abs();
    let bound = 2.0 / (big_n + 1) as f64;
    if gap > bound * (1.0 + 1e-12) {
        return Err(Error::Convergence {
            what: "near-degenerate pair",
            detail: format!("realized gap {gap} exceeds bound {bound}"),
        });
    }
    Ok(NearPair {
        m,
        n,
        mt,
        nt,
        denominator_bound: big_n,
        p,
        q,
        gap,
        bound,
    })
}

/// Smallest root `mu` of `1F1(-mu/(4B) + 1/4, 1/2, B) = 0` with `B = B0 a^2`,
/// scaled to `mu(B0, a) = a^{-2} mu(B0 a^2, 1)`.
pub fn bottom_parallel(b0: f64, a: f64) -> Result<f64> {
    if !(b0 > 0.0 && a > 0.0) {
        return Err(Error::invalid("spectral bottom needs B0 > 0 and a > 0"));
    }
    Ok(bottom_unit(b0 * a * a)? / (a * a))
}

fn bottom_unit(b: f64) -> Result<f64> {
    let f = |mu: f64| kummer_1f1(-mu / (4.0 * b) + 0.25, 0.5, b);
    let mut upper = dirichlet_eigenvalue(1) + b * b + b;
    for _ in 0..2 {
        let mut lo = b;
        let mut f_lo = f(lo)?;
        while lo < upper {
            let hi = lo + b.min(upper - lo).max(f64::EPSILON * upper);
            let f_hi = f(hi)?;
            if f_hi == 0.0 {
                return Ok(hi);
            }
            if f_lo.signum() != f_hi.signum() {
                return bisect(&f, lo, hi, f_lo);
            }
            lo = hi;
            f_lo = f_hi;
        }
        upper *= 2.0;
    }
    Err(Error::Bracketing {
        what: "spectral bottom",
        lo: b,
        hi: upper,
    })
}

fn bisect(f: &dyn Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64, mut f_lo: f64) -> Result<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == f_lo.signum() {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Weak-field expansion of `mu(B0, 1)` through `B0^4`.
pub fn weak_field_asymptote(b0: f64) -> f64 {
    let (pi2, pi4, pi6) = (PI * PI, PI.powi(4), PI.powi(6));
    let c2 = 1.0 / 3.0 - 2.0 / pi2;
    let c4 = 4.0 / (45.0 * pi2) - 20.0 / (3.0 * pi4) + 56.0 / pi6;
    pi2 / 4.0 + c2 * b0 * b0 + c4 * b0.powi(4)
}

/// Scale of the strong-field correction, `sqrt(2) pi^{-1/4} B0^{5/4} exp(-B0/2)`.
pub fn strong_field_correction(b0: f64) -> f64 {
    2f64.sqrt() * PI.powf(-0.25) * b0.powf(1.25) * (-0.5 * b0).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BottomAsymptotics {
    pub weak: f64,
    /// `B0` plus the strong-field correction scale.
    pub strong: f64,
    pub lower_bound: f64,
}

pub fn bottom_asymptotics(b0: f64) -> BottomAsymptotics {
    BottomAsymptotics {
        weak: weak_field_asymptote(b0),
        strong: b0 + strong_field_correction(b0),
        lower_bound: b0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BottomSample {
    #[serde(rename = "B0")]
    pub b0: f64,
    pub mu: f64,
    pub weak_asy: f64,
    pub strong_asy: f64,
    pub lower_bound: f64,
}

/// `mu(B0, 1)` with its asymptotes over a field grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BottomCurve {
    pub samples: Vec<BottomSample>,
}

impl BottomCurve {
    pub fn b0(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.b0).collect()
    }

    pub fn mu(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.mu).collect()
    }

    /// Samples violating the strict bound `mu > B0`.
    pub fn bound_violations(&self) -> Vec<BottomSample> {
        self.samples.iter().filter(|s| !(s.mu > s.b0)).copied().collect()
    }
}

pub fn bottom_curve(b0_grid: &[f64]) -> Result<BottomCurve> {
    if b0_grid.iter().any(|&b| !(b > 0.0 && b <= 30.0)) {
        return Err(Error::invalid("field grid must lie in (0, 30]"));
    }
    let samples = b0_grid
        .par_iter()
        .map(|&b0| {
            let mu = bottom_parallel(b0, 1.0)?;
            let asy = bottom_asymptotics(b0);
            Ok(BottomSample {
                b0,
                mu,
                weak_asy: asy.weak,
                strong_asy: asy.strong,
                lower_bound: asy.lower_bound,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BottomCurve { samples })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_levels() {
        let lv = flat_spectrum(1.0, 1.0, 5, 5).unwrap();
        assert!((lv[0].value - (1.0 + PI * PI / 4.0)).abs() < 1e-14);
        assert_eq!((lv[0].m, lv[0].n), (0, 1));
        assert!((lv[1].value - lv[0].value - 2.0).abs() < 1e-14);
        let b0 = PI * PI / 8.0;
        let lv = flat_spectrum(b0, 1.0, 5, 3).unwrap();
        let get = |m, n| lv.iter().find(|l| l.m == m && l.n == n).unwrap().value;
        assert!((get(3, 1) - get(0, 2)).abs() < 1e-12);
        assert!((theta(b0, 1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rational_families() {
        let r = degeneracy_enumerate(Theta::rational(1, 1).unwrap(), 3, 0.1).unwrap();
        assert_eq!(r.exact[0], Coincidence { m: 3, n: 1, mt: 0, nt: 2 });
        assert_eq!(r.exact[1], Coincidence { m: 5, n: 2, mt: 0, nt: 3 });
        let r = degeneracy_enumerate(Theta::rational(4, 2).unwrap(), 1, 0.1).unwrap();
        assert_eq!(r.theta, Theta::Rational { p: 2, q: 1 });
        assert_eq!(r.exact[0], Coincidence { m: 4, n: 1, mt: 0, nt: 3 });
        assert!(!Coincidence { m: 4, n: 1, mt: 0, nt: 2 }.verify(2, 1));
    }

    #[test]
    fn sqrt2_pairs() {
        let pair = near_degenerate_pair(2f64.sqrt(), 0.1).unwrap();
        assert_eq!(pair.denominator_bound, 20);
        assert!(pair.gap <= 2.0 / 21.0);
        let five = pair_from_approx(2f64.sqrt(), 5, 7, 5).unwrap();
        assert_eq!((five.n, five.nt, five.m), (3, 4, 5));
        assert!((five.gap - (5.0 * 2f64.sqrt() - 7.0)).abs() < 1e-14);
    }

    #[test]
    fn exact_bottom_case() {
        assert!((bottom_parallel(0.5, 1.0).unwrap() - 2.5).abs() < 1e-12);
        assert!((bottom_parallel(2.0, 0.5).unwrap() - 10.0).abs() < 1e-10);
    }

    #[test]
    fn bottom_reference_values() {
        // high-precision reference roots
        let refs = [
            (0.05, 2.467727820284453),
            (0.1, 2.468707891493843),
            (1.0, 2.596919664064113),
            (3.0, 3.556009216827126),
            (10.0, 10.00305603951442),
            (20.0, 20.00000040504271),
        ];
        for (b, mu) in refs {
            let got = bottom_parallel(b, 1.0).unwrap();
            assert!((got - mu).abs() < 1e-9 * mu, "B0 = {b}: {got} vs {mu}");
        }
    }

    #[test]
    fn asymptote_values() {
        assert!((weak_field_asymptote(0.1) - 2.46871).abs() < 1e-5);
        assert!((weak_field_asymptote(1e-8) - PI * PI / 4.0).abs() < 1e-14);
        assert!((strong_field_correction(20.0) - 2.0e-3).abs() < 1e-4);
    }
}
