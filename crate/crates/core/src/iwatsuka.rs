//! Extended Iwatsuka model: field `B(x) = B0 (1 + b(x))`, potential `W`,
//! fiber bands and the non-constancy certificate.

use serde::{Deserialize, Serialize};

use crate::assembly::{FiberOperator, Grid, IwatsukaFiber};
use crate::bands::{band_scan, BandStructure};
use crate::eigensolve::lowest_eigs;
use crate::error::{Error, Result};
use crate::geometry::{AssumptionEntry, Status};
use crate::quad::integrate;

/// One term of a profile. All terms vanish for `x < 0` except a `Step` or
/// `Bump` placed there on purpose (which validation then flags).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Primitive {
    /// `value` on `[start, end)`.
    Step { value: f64, start: f64, end: f64 },
    /// `amplitude * exp(1 - 1/(1 - t^2))`, `t = (x - center) / width`.
    Bump { amplitude: f64, center: f64, width: f64 },
    /// `amplitude * exp(-rate x)` for `x >= 0`.
    ExpDecay { amplitude: f64, rate: f64 },
    /// `amplitude * x^power * exp(-rate x)` for `x >= 0`.
    PolyExp { amplitude: f64, power: u32, rate: f64 },
}

fn bump_shape(t: f64) -> f64 {
    let p = 1.0 - t * t;
    if p <= 0.0 || 1.0 / p > 745.0 {
        0.0
    } else {
        (1.0 - 1.0 / p).exp()
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

impl Primitive {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Primitive::Step { value, start, end } => value.is_finite() && start.is_finite() && end > start,
            Primitive::Bump { amplitude, center, width } => amplitude.is_finite() && center.is_finite() && width > 0.0,
            Primitive::ExpDecay { amplitude, rate } => amplitude.is_finite() && rate > 0.0,
            Primitive::PolyExp { amplitude, rate, .. } => amplitude.is_finite() && rate > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("malformed profile term {self:?}")))
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match *self {
            Primitive::Step { value, start, end } => {
                if x >= start && x < end {
                    value
                } else {
                    0.0
                }
            }
            Primitive::Bump { amplitude, center, width } => amplitude * bump_shape((x - center) / width),
            Primitive::ExpDecay { amplitude, rate } => {
                if x >= 0.0 {
                    amplitude * (-rate * x).exp()
                } else {
                    0.0
                }
            }
            Primitive::PolyExp { amplitude, power, rate } => {
                if x >= 0.0 {
                    amplitude * x.powi(power as i32) * (-rate * x).exp()
                } else {
                    0.0
                }
            }
        }
    }

    /// `int_0^x` of the term.
    pub fn integral(&self, x: f64) -> Result<f64> {
        Ok(match *self {
            Primitive::Step { value, start, end } => {
                let clamp = |t: f64| t.clamp(start, end);
                value * (clamp(x) - clamp(0.0))
            }
            Primitive::Bump { amplitude, center, width } => {
                let (lo, hi) = (center - width, center + width);
                let (a, b) = (0.0f64.clamp(lo, hi), x.clamp(lo, hi));
                if a == b {
                    0.0
                } else {
                    amplitude * width * integrate(bump_shape, (a - center) / width, (b - center) / width, 1e-14, 1e-13)?
                }
            }
            Primitive::ExpDecay { amplitude, rate } => {
                let xp = x.max(0.0);
                amplitude * (-(-rate * xp).exp_m1()) / rate
            }
            Primitive::PolyExp { amplitude, power, rate } => {
                let xp = x.max(0.0);
                let kx = rate * xp;
                // lower incomplete gamma for integer order
                let mut term = 1.0;
                let mut partial = 1.0;
                for j in 1..=power {
                    term *= kx / f64::from(j);
                    partial += term;
                }
                let tail = (-kx).exp() * partial;
                amplitude * factorial(power) / rate.powi(power as i32 + 1) * (1.0 - tail)
            }
        })
    }

    /// `int_0^inf |term|`.
    fn total_variation(&self) -> Result<f64> {
        Ok(match *self {
            Primitive::Step { value, start, end } => value.abs() * (end.max(0.0) - start.max(0.0)).max(0.0),
            Primitive::Bump { amplitude, width, .. } => {
                amplitude.abs() * width * integrate(bump_shape, -1.0, 1.0, 1e-14, 1e-13)?
            }
            Primitive::ExpDecay { amplitude, rate } => amplitude.abs() / rate,
            Primitive::PolyExp { amplitude, power, rate } => {
                amplitude.abs() * factorial(power) / rate.powi(power as i32 + 1)
            }
        })
    }

    /// Left end of the support.
    fn left_edge(&self) -> f64 {
        match *self {
            Primitive::Step { start, .. } => start,
            Primitive::Bump { center, width, .. } => center - width,
            Primitive::ExpDecay { .. } | Primitive::PolyExp { .. } => 0.0,
        }
    }

    fn right_edge(&self) -> f64 {
        match *self {
            Primitive::Step { end, .. } => end,
            Primitive::Bump { center, width, .. } => center + width,
            Primitive::ExpDecay { .. } | Primitive::PolyExp { .. } => f64::INFINITY,
        }
    }

    fn is_zero(&self) -> bool {
        match *self {
            Primitive::Step { value, .. } => value == 0.0,
            Primitive::Bump { amplitude, .. }
            | Primitive::ExpDecay { amplitude, .. }
            | Primitive::PolyExp { amplitude, .. } => amplitude == 0.0,
        }
    }

    /// Jump discontinuities, as `(location, jump)`.
    fn jumps(&self) -> Vec<(f64, f64)> {
        match *self {
            Primitive::Step { value, start, end } if value != 0.0 => vec![(start, value), (end, -value)],
            Primitive::ExpDecay { amplitude, .. } if amplitude != 0.0 => vec![(0.0, amplitude)],
            Primitive::PolyExp { amplitude, power: 0, .. } if amplitude != 0.0 => vec![(0.0, amplitude)],
            _ => Vec::new(),
        }
    }
}

/// A sum of primitives; the empty sum is the zero profile.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Profile(pub Vec<Primitive>);

impl Profile {
    pub fn zero() -> Self {
        Profile(Vec::new())
    }

    pub fn value(&self, x: f64) -> f64 {
        self.0.iter().map(|p| p.value(x)).sum()
    }

    pub fn integral(&self, x: f64) -> Result<f64> {
        self.0.iter().map(|p| p.integral(x)).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Primitive::is_zero)
    }

    fn total_variation(&self) -> Result<f64> {
        self.0.iter().map(Primitive::total_variation).sum()
    }

    fn left_edge(&self) -> f64 {
        self.0.iter().filter(|p| !p.is_zero()).map(Primitive::left_edge).fold(f64::INFINITY, f64::min)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.0
            .iter()
            .flat_map(|p| [p.left_edge(), p.right_edge()])
            .filter(|x| x.is_finite())
            .collect()
    }

    fn net_jumps(&self) -> Vec<(f64, f64)> {
        let mut all: Vec<(f64, f64)> = self.0.iter().flat_map(Primitive::jumps).collect();
        all.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (x, j) in all {
            match merged.last_mut() {
                Some(last) if last.0 == x => last.1 += j,
                _ => merged.push((x, j)),
            }
        }
        merged.retain(|(_, j)| j.abs() > 1e-15);
        merged
    }
}

/// Field `B0 (1 + b)`, potential `W`, and the declared constants of the
/// linear lower bound `int_0^x b > alpha x` for `x >= x1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IwatsukaSpec {
    pub b0: f64,
    #[serde(default)]
    pub b: Profile,
    #[serde(default)]
    pub w: Profile,
    pub alpha: f64,
    pub x1: f64,
}

impl IwatsukaSpec {
    pub fn new(b0: f64, b: Profile, w: Profile, alpha: f64, x1: f64) -> Result<Self> {
        let spec = IwatsukaSpec { b0, b, w, alpha, x1 };
        spec.check_parameters()?;
        Ok(spec)
    }

    pub fn check_parameters(&self) -> Result<()> {
        if !(self.b0 > 0.0 && self.b0.is_finite()) {
            return Err(Error::invalid(format!("B0 = {} must be positive", self.b0)));
        }
        if !(self.alpha > -1.0 && self.alpha < 0.0) {
            return Err(Error::invalid(format!("alpha = {} outside (-1, 0)", self.alpha)));
        }
        if !(self.x1 >= 0.0 && self.x1.is_finite()) {
            return Err(Error::invalid(format!("x1 = {} must be >= 0", self.x1)));
        }
        for p in self.b.0.iter().chain(&self.w.0) {
            p.validate()?;
        }
        Ok(())
    }

    /// `r(x) = int_0^x b`.
    pub fn r(&self, x: f64) -> Result<f64> {
        self.b.integral(x)
    }

    pub fn potential(&self, x: f64) -> f64 {
        self.w.value(x)
    }

    /// `A_y(x) = B0 (x + r(x))` at each point.
    pub fn vector_potential_at(&self, x: &[f64]) -> Result<Vec<f64>> {
        x.iter().map(|&t| Ok(self.b0 * (t + self.r(t)?))).collect()
    }

    /// Half-length meeting the truncation rule for every momentum in
    /// `[xi_lo, xi_hi]` with eigenvalues up to `budget`.
    pub fn confining_half_length(&self, xi_lo: f64, xi_hi: f64, budget: f64) -> Result<f64> {
        let probe = IwatsukaFiber::new(self, Grid::line(1.0, 8))?;
        let mut l: f64 = 1.0;
        for xi in [xi_lo, xi_hi] {
            l = l.max(probe.suggest_half_length(xi, budget)?);
        }
        Ok(l)
    }
}

/// Outcome of checking the model assumptions on a spec.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldValidation {
    pub entries: Vec<AssumptionEntry>,
    /// `R = min_{[0, x1]} r`.
    pub r_min: f64,
    /// `(x, r(x))` on the validation grid.
    pub r_samples: Vec<(f64, f64)>,
    pub nontrivial: bool,
}

impl FieldValidation {
    pub fn status(&self, name: &str) -> Option<Status> {
        self.entries.iter().find(|e| e.name == name).map(|e| e.status)
    }

    /// Assumptions (i)-(iv) and the conditions on `W`, ignoring nontriviality.
    pub fn operator_valid(&self) -> bool {
        self.entries
            .iter()
            .filter(|e| e.name != "nontrivial")
            .all(|e| e.status != Status::Fails)
    }

    pub fn all_hold(&self) -> bool {
        self.entries.iter().all(|e| e.status != Status::Fails)
    }

    pub fn first_failure(&self) -> Option<&AssumptionEntry> {
        self.entries.iter().find(|e| e.status == Status::Fails)
    }
}

fn entry(name: &'static str, status: Status, witness: String) -> AssumptionEntry {
    AssumptionEntry { name, status, witness }
}

/// Samples used for the sign checks; enough past `x1` that the tail bound
/// `r(x) >= -int|b| > alpha x` takes over.
fn validation_grid(spec: &IwatsukaSpec) -> Result<Vec<f64>> {
    let tv = spec.b.total_variation()?;
    let reach = spec.x1.max(tv / spec.alpha.abs()) + 1.0;
    let end = reach.max(spec.b.breakpoints().into_iter().fold(0.0, f64::max) + 1.0);
    let n = 20_000;
    let mut xs: Vec<f64> = (0..=n).map(|i| end * i as f64 / n as f64).collect();
    xs.extend(spec.b.breakpoints().into_iter().filter(|&x| x >= 0.0 && x <= end));
    xs.extend(spec.w.breakpoints().into_iter().filter(|&x| x >= 0.0 && x <= end));
    xs.push(spec.x1);
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    Ok(xs)
}

/// Checks assumptions (i)-(iv), the conditions on `W`, and nontriviality
/// on a sampled grid, and computes `r` and `R`.
pub fn validate_field(spec: &IwatsukaSpec) -> Result<FieldValidation> {
    spec.check_parameters()?;
    let xs = validation_grid(spec)?;
    let r_samples: Vec<(f64, f64)> = xs.iter().map(|&x| Ok((x, spec.r(x)?))).collect::<Result<_>>()?;
    let mut entries = Vec::new();

    entries.push(entry(
        "(i) b locally square integrable",
        Status::HoldsByConstruction,
        "profile is a finite sum of bounded primitives".into(),
    ));

    let left = spec.b.left_edge();
    entries.push(if left >= 0.0 {
        entry("(ii) b = 0 on x < 0", Status::Holds, format!("support starts at {left}"))
    } else {
        entry(
            "(ii) b = 0 on x < 0",
            Status::Fails,
            format!("b({}) = {}", 0.5 * left.max(-1.0), spec.b.value(0.5 * left.max(-1.0))),
        )
    });

    let worst = r_samples.iter().copied().fold((0.0, f64::NEG_INFINITY), |acc, p| if p.1 > acc.1 { p } else { acc });
    entries.push(if worst.1 <= 1e-13 {
        entry("(iii) r <= 0 on x >= 0", Status::Holds, format!("max r = {:.3e} at x = {}", worst.1, worst.0))
    } else {
        entry("(iii) r <= 0 on x >= 0", Status::Fails, format!("r({}) = {:.6e} > 0", worst.0, worst.1))
    });

    let violation = r_samples
        .iter()
        .filter(|(x, _)| *x >= spec.x1)
        .map(|&(x, r)| (x, r - spec.alpha * x))
        .fold((spec.x1, f64::INFINITY), |acc, p| if p.1 < acc.1 { p } else { acc });
    entries.push(if violation.1 > 0.0 {
        entry(
            "(iv) r(x) > alpha x on x >= x1",
            Status::Holds,
            format!("min r - alpha x = {:.3e} at x = {}", violation.1, violation.0),
        )
    } else {
        entry(
            "(iv) r(x) > alpha x on x >= x1",
            Status::Fails,
            format!("r({0}) - alpha * {0} = {1:.6e} <= 0", violation.0, violation.1),
        )
    });

    let jumps = spec.w.net_jumps();
    entries.push(match jumps.first() {
        None => entry("W continuous", Status::Holds, "no jumps".into()),
        Some((x, j)) => entry("W continuous", Status::Fails, format!("jump {j} at x = {x}")),
    });
    let wleft = spec.w.left_edge();
    entries.push(if wleft >= 0.0 {
        entry("W = 0 on x < 0", Status::Holds, format!("support starts at {wleft}"))
    } else {
        entry("W = 0 on x < 0", Status::Fails, format!("support starts at {wleft}"))
    });
    let wmax = xs.iter().map(|&x| (x, spec.w.value(x))).fold((0.0, f64::NEG_INFINITY), |acc, p| if p.1 > acc.1 { p } else { acc });
    entries.push(if wmax.1 <= 0.0 {
        entry("W <= 0", Status::Holds, format!("max W = {:.3e}", wmax.1))
    } else {
        entry("W <= 0", Status::Fails, format!("W({}) = {:.6e} > 0", wmax.0, wmax.1))
    });

    let nontrivial = !spec.b.is_zero() || !spec.w.is_zero();
    entries.push(entry(
        "nontrivial",
        if nontrivial { Status::Holds } else { Status::Fails },
        if nontrivial { "b or W is nonzero".into() } else { "b = 0 and W = 0".into() },
    ));

    let r_min = r_samples
        .iter()
        .filter(|(x, _)| *x <= spec.x1)
        .map(|p| p.1)
        .fold(0.0, f64::min);
    Ok(FieldValidation {
        entries,
        r_min,
        r_samples,
        nontrivial,
    })
}

fn require_operator_valid(spec: &IwatsukaSpec) -> Result<FieldValidation> {
    let report = validate_field(spec)?;
    if !report.operator_valid() {
        let e = report.first_failure().expect("a failing entry exists");
        return Err(Error::AssumptionViolated {
            assumption: e.name,
            witness: e.witness.clone(),
        });
    }
    Ok(report)
}

/// Band functions of the Iwatsuka fiber over `xi`.
pub fn iwatsuka_bands(spec: &IwatsukaSpec, xi: &[f64], k: usize, grid: Grid) -> Result<BandStructure> {
    require_operator_valid(spec)?;
    let op = IwatsukaFiber::new(spec, grid)?;
    band_scan(&op, xi, k)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificateOptions {
    /// Required margin `B0 (2m + 1) - lambda[xi*]`.
    pub star_margin: f64,
    /// Allowed `|lambda[xi_large] - B0 (2m + 1)|`.
    pub large_band: f64,
    /// Grid spacing on the fiber line.
    pub spacing: f64,
    /// Gaps below this are treated as resolved to zero.
    pub gap_floor: f64,
}

impl Default for CertificateOptions {
    fn default() -> Self {
        CertificateOptions {
            star_margin: 1e-3,
            large_band: 1e-2,
            spacing: 5e-3,
            gap_floor: 1e-9,
        }
    }
}

/// Evidence that the band with Landau index `m` is not constant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonconstancyCertificate {
    /// Landau index; the band is sorted branch `m + 1`.
    pub m: usize,
    pub branch: usize,
    pub r_min: f64,
    pub xi_star: f64,
    pub lambda_star: f64,
    pub landau: f64,
    pub xi_large: f64,
    pub lambda_large: f64,
    pub lambda_double: f64,
    /// Distances to the unperturbed discrete level at `xi_large` and `2 xi_large`.
    pub gap_large: f64,
    pub gap_double: f64,
    pub star_margin: f64,
    pub max_perturbation: f64,
    pub grid: Grid,
    pub holds: bool,
    pub failures: Vec<String>,
}

/// Evaluates the band with Landau index `m` at `xi* = -B0 R / 2` and at
/// `xi_large` (default `xi* + 10 sqrt(B0 (2m + 1))`), then at `2 xi_large`.
pub fn nonconstancy_certificate(
    spec: &IwatsukaSpec,
    m: usize,
    xi_large: Option<f64>,
    opts: CertificateOptions,
) -> Result<NonconstancyCertificate> {
    let report = require_operator_valid(spec)?;
    let b0 = spec.b0;
    let landau = b0 * (2 * m + 1) as f64;
    let r_min = report.r_min;
    let xi_star = -0.5 * b0 * r_min;
    let xi_large = xi_large.unwrap_or(xi_star + 10.0 * landau.sqrt());
    if !(xi_large > xi_star) {
        return Err(Error::invalid(format!("xi_large = {xi_large} must exceed xi* = {xi_star}")));
    }
    let xi_double = 2.0 * xi_large;
    let branch = m + 1;
    let k = branch;
    let budget = b0 * (2 * k + 1) as f64;
    let half_length = spec.confining_half_length(xi_star.min(0.0), xi_double, budget)?;
    let n = ((2.0 * half_length / opts.spacing).ceil() as usize).max(64);
    let grid = Grid::line(half_length, n).with_budget(budget);

    let fiber = IwatsukaFiber::new(spec, grid)?;
    let null_spec = IwatsukaSpec {
        b: Profile::zero(),
        w: Profile::zero(),
        ..spec.clone()
    };
    let null_fiber = IwatsukaFiber::new(&null_spec, grid)?;
    let level = |f: &IwatsukaFiber, xi: f64| -> Result<f64> {
        let fm = f.matrix(xi).map_err(|e| e.at_xi(xi))?;
        Ok(lowest_eigs(&fm, k).map_err(|e| e.at_xi(xi))?[branch - 1])
    };
    let lambda_star = level(&fiber, xi_star)?;
    let lambda_large = level(&fiber, xi_large)?;
    let lambda_double = level(&fiber, xi_double)?;
    let gap_large = (lambda_large - level(&null_fiber, xi_large)?).abs();
    let gap_double = (lambda_double - level(&null_fiber, xi_double)?).abs();

    let mut max_perturbation = f64::NEG_INFINITY;
    for x in grid.s_nodes().into_iter().filter(|&x| x >= 0.0) {
        let r = spec.r(x)?;
        let term = b0 * r * (2.0 * xi_star + b0 * (2.0 * x + r)) + spec.potential(x);
        max_perturbation = max_perturbation.max(term);
    }

    let mut failures = Vec::new();
    if !report.nontrivial {
        failures.push("b and W both vanish".to_string());
    }
    let star_margin = landau - lambda_star;
    if star_margin <= opts.star_margin {
        failures.push(format!(
            "lambda_{branch}[{xi_star}] = {lambda_star:.8} is not below {landau} by {}",
            opts.star_margin
        ));
    }
    if (lambda_large - landau).abs() > opts.large_band {
        failures.push(format!("lambda_{branch}[{xi_large}] = {lambda_large:.8} is not within {} of {landau}", opts.large_band));
    }
    if gap_double > (0.5 * gap_large).max(opts.gap_floor) {
        failures.push(format!("gap does not halve: {gap_large:.3e} -> {gap_double:.3e}"));
    }
    if max_perturbation > 1e-12 * (1.0 + landau) {
        failures.push(format!("perturbation term positive: max {max_perturbation:.3e}"));
    }
    Ok(NonconstancyCertificate {
        m,
        branch,
        r_min,
        xi_star,
        lambda_star,
        landau,
        xi_large,
        lambda_large,
        lambda_double,
        gap_large,
        gap_double,
        star_margin,
        max_perturbation,
        grid,
        holds: failures.is_empty(),
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step_spec() -> IwatsukaSpec {
        IwatsukaSpec::new(
            1.0,
            Profile(vec![Primitive::Step {
                value: -0.5,
                start: 0.0,
                end: 2.0,
            }]),
            Profile::zero(),
            -0.4,
            2.6,
        )
        .unwrap()
    }

    #[test]
    fn step_profile_r_and_assumptions() {
        let spec = step_spec();
        assert!((spec.r(1.0).unwrap() + 0.5).abs() < 1e-15);
        assert!((spec.r(7.0).unwrap() + 1.0).abs() < 1e-15);
        assert_eq!(spec.r(-3.0).unwrap(), 0.0);
        let v = validate_field(&spec).unwrap();
        assert!(v.all_hold(), "{:?}", v.entries);
        assert!((v.r_min + 1.0).abs() < 1e-15);
    }

    #[test]
    fn boundary_x1_fails_strict_inequality() {
        let mut spec = step_spec();
        spec.x1 = 2.5;
        let v = validate_field(&spec).unwrap();
        assert_eq!(v.status("(iv) r(x) > alpha x on x >= x1"), Some(Status::Fails));
    }

    #[test]
    fn x1_zero_is_never_admissible() {
        let spec = IwatsukaSpec::new(1.0, Profile::zero(), Profile::zero(), -0.5, 0.0).unwrap();
        let v = validate_field(&spec).unwrap();
        assert_eq!(v.status("(iv) r(x) > alpha x on x >= x1"), Some(Status::Fails));
    }

    #[test]
    fn null_spec_is_trivial() {
        let spec = IwatsukaSpec::new(1.0, Profile::zero(), Profile::zero(), -0.5, 1.0).unwrap();
        let v = validate_field(&spec).unwrap();
        assert!(!v.nontrivial);
        assert!(v.operator_valid());
        assert_eq!(v.r_min, 0.0);
    }

    #[test]
    fn potential_only_spec() {
        let w = Profile(vec![Primitive::PolyExp {
            amplitude: -1.0,
            power: 2,
            rate: 1.0,
        }]);
        let spec = IwatsukaSpec::new(1.0, Profile::zero(), w, -0.5, 1.0).unwrap();
        let v = validate_field(&spec).unwrap();
        assert!(v.all_hold(), "{:?}", v.entries);
        assert_eq!(v.r_min, 0.0);
    }

    #[test]
    fn discontinuous_potential_rejected() {
        let w = Profile(vec![Primitive::ExpDecay { amplitude: -1.0, rate: 1.0 }]);
        let spec = IwatsukaSpec::new(1.0, Profile::zero(), w, -0.5, 0.0).unwrap();
        let v = validate_field(&spec).unwrap();
        assert_eq!(v.status("W continuous"), Some(Status::Fails));
        assert!(iwatsuka_bands(&spec, &[0.0], 1, Grid::line(10.0, 100)).is_err());
    }

    #[test]
    fn positive_flux_fails_iii() {
        let b = Profile(vec![Primitive::Bump {
            amplitude: 0.3,
            center: 2.0,
            width: 1.0,
        }]);
        let spec = IwatsukaSpec::new(1.0, b, Profile::zero(), -0.5, 0.0).unwrap();
        let v = validate_field(&spec).unwrap();
        assert_eq!(v.status("(iii) r <= 0 on x >= 0"), Some(Status::Fails));
    }

    #[test]
    fn closed_form_integrals_match_quadrature() {
        let terms = [
            Primitive::ExpDecay { amplitude: -0.7, rate: 1.3 },
            Primitive::PolyExp {
                amplitude: -0.4,
                power: 3,
                rate: 0.8,
            },
            Primitive::Bump {
                amplitude: -0.2,
                center: 1.5,
                width: 0.7,
            },
        ];
        for p in terms {
            for x in [0.3, 1.7, 6.0] {
                let q = integrate(|t| p.value(t), 0.0, x, 1e-14, 1e-13).unwrap();
                assert!((p.integral(x).unwrap() - q).abs() < 1e-11, "{p:?} at {x}");
            }
        }
    }
}
