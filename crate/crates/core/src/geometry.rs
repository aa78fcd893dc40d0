//! Generating curves of translation-invariant layers.
//!
//! A curve is described by its turning angle `phi(s)`: the unit-speed
//! tangent is `(cos phi, sin phi)` and the signed curvature is
//! `kappa = phi'`. Every family blends smoothly between two constant tail
//! angles, so outside a finite support interval the curve is a straight
//! half-line.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::quad;

/// `tanh` saturates to exactly 1.0 in double precision beyond this argument.
const TANH_SATURATION: f64 = 20.0;
const QUAD_TOL: f64 = 1e-13;

fn default_width() -> f64 {
    1.0
}

/// Parametrized curve families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum CurveFamily {
    /// Straight line at constant angle `gamma` to the x axis.
    Tilted { gamma: f64 },
    /// `phi = pi/2 - (pi/2 - delta) tanh(s / width)`; both ends run off to `x = +inf`.
    Fold {
        delta: f64,
        #[serde(default = "default_width")]
        width: f64,
    },
    /// Tails with `x' = alpha_minus` (s -> -inf) and `x' = alpha_plus` (s -> +inf),
    /// joined by a tanh blend centred at `center`.
    Bent {
        alpha_plus: f64,
        alpha_minus: f64,
        #[serde(default)]
        center: f64,
        #[serde(default = "default_width")]
        blend_width: f64,
    },
    /// Compactly supported smooth bump in the angle: `phi = A exp(1 - 1/(1 - t^2))`,
    /// `t = (s - center) / width`.
    Bump {
        amplitude: f64,
        center: f64,
        width: f64,
    },
    /// The identity `x(s) = s`.
    Line,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveProfile {
    family: CurveFamily,
    phi_minus: f64,
    phi_plus: f64,
    /// `None` when `phi` is constant on the whole line.
    support: Option<(f64, f64)>,
    /// Antiderivative of the tangent from the support's left end to its right end.
    chord: (f64, f64),
    /// `F(0)`, where `F(s) = int_{lo}^{s} (cos phi, sin phi)`.
    origin_offset: (f64, f64),
}

impl CurveProfile {
    /// Builds a profile, validating the family's parameter ranges.
    pub fn new(family: CurveFamily) -> Result<Self> {
        let (phi_minus, phi_plus, support) = match family {
            CurveFamily::Tilted { gamma } => {
                if !(gamma > -FRAC_PI_2 && gamma <= FRAC_PI_2) {
                    return Err(Error::invalid(format!("tilt angle {gamma} outside (-pi/2, pi/2]")));
                }
                (gamma, gamma, None)
            }
            CurveFamily::Line => (0.0, 0.0, None),
            CurveFamily::Fold { delta, width } => {
                if !(delta > 0.0 && delta < FRAC_PI_2) {
                    return Err(Error::invalid(format!("fold angle {delta} outside (0, pi/2)")));
                }
                check_width(width)?;
                let r = TANH_SATURATION * width;
                (PI - delta, delta, Some((-r, r)))
            }
            CurveFamily::Bent {
                alpha_plus,
                alpha_minus,
                center,
                blend_width,
            } => {
                for (name, a) in [("alpha_plus", alpha_plus), ("alpha_minus", alpha_minus)] {
                    if !(a > 0.0 && a <= 1.0) {
                        return Err(Error::invalid(format!("{name} = {a} outside (0, 1]")));
                    }
                }
                check_width(blend_width)?;
                if !center.is_finite() {
                    return Err(Error::invalid("bend center must be finite"));
                }
                let r = TANH_SATURATION * blend_width;
                (alpha_minus.acos(), alpha_plus.acos(), Some((center - r, center + r)))
            }
            CurveFamily::Bump {
                amplitude,
                center,
                width,
            } => {
                if !(amplitude.abs() <= FRAC_PI_2) {
                    return Err(Error::invalid(format!("bump amplitude {amplitude} outside [-pi/2, pi/2]")));
                }
                check_width(width)?;
                if !center.is_finite() {
                    return Err(Error::invalid("bump center must be finite"));
                }
                (0.0, 0.0, Some((center - width, center + width)))
            }
        };
        let mut profile = CurveProfile {
            family,
            phi_minus,
            phi_plus,
            support,
            chord: (0.0, 0.0),
            origin_offset: (0.0, 0.0),
        };
        if let Some((lo, hi)) = support {
            profile.chord = profile.integrate_tangent(lo, hi)?;
            profile.origin_offset = profile.antiderivative(0.0)?;
        }
        Ok(profile)
    }

    /// Bent profile for the asymptotically-flat regime, which needs distinct slopes.
    pub fn bent_regime(alpha_plus: f64, alpha_minus: f64, center: f64, blend_width: f64) -> Result<Self> {
        if alpha_plus == alpha_minus {
            return Err(Error::invalid("bent regime requires alpha_plus != alpha_minus"));
        }
        Self::new(CurveFamily::Bent {
            alpha_plus,
            alpha_minus,
            center,
            blend_width,
        })
    }

    pub fn family(&self) -> CurveFamily {
        self.family
    }

    /// `(phi(-inf), phi(+inf))`.
    pub fn tails(&self) -> (f64, f64) {
        (self.phi_minus, self.phi_plus)
    }

    /// `(x'(-inf), x'(+inf))`.
    pub fn xdot_tails(&self) -> (f64, f64) {
        (self.phi_minus.cos(), self.phi_plus.cos())
    }

    pub fn support(&self) -> Option<(f64, f64)> {
        self.support
    }

    /// `phi` and its first three derivatives at `s`.
    pub fn angle_jet(&self, s: f64) -> Jet {
        if let Some((lo, hi)) = self.support {
            if s <= lo {
                return Jet::constant(self.phi_minus);
            }
            if s >= hi {
                return Jet::constant(self.phi_plus);
            }
        }
        let v = Jet::variable(s);
        match self.family {
            CurveFamily::Tilted { gamma } => Jet::constant(gamma),
            CurveFamily::Line => Jet::constant(0.0),
            CurveFamily::Fold { delta, width } => {
                let t = (v * (1.0 / width)).tanh();
                t * (-(FRAC_PI_2 - delta)) + FRAC_PI_2
            }
            CurveFamily::Bent { center, blend_width, .. } => {
                let t = ((v + (-center)) * (1.0 / blend_width)).tanh();
                (t + 1.0) * (0.5 * (self.phi_plus - self.phi_minus)) + self.phi_minus
            }
            CurveFamily::Bump {
                amplitude,
                center,
                width,
            } => {
                let t = (v + (-center)) * (1.0 / width);
                let p = -(t * t) + 1.0;
                if p.value() <= 1.0 / 745.0 {
                    // exp(1 - 1/p) underflows; the bump and all derivatives vanish
                    return Jet::constant(0.0);
                }
                (-p.recip() + 1.0).exp() * amplitude
            }
        }
    }

    pub fn angle(&self, s: f64) -> f64 {
        self.angle_jet(s).value()
    }

    /// `(kappa, kappa', kappa'')` at `s`, from exact derivatives of the angle.
    pub fn curvature(&self, s: f64) -> (f64, f64, f64) {
        let j = self.angle_jet(s);
        (j.d(1), j.d(2), j.d(3))
    }

    /// Unit tangent `(x'(s), z'(s))`.
    pub fn tangent(&self, s: f64) -> (f64, f64) {
        let phi = self.angle(s);
        (phi.cos(), phi.sin())
    }

    fn integrate_tangent(&self, a: f64, b: f64) -> Result<(f64, f64)> {
        let x = quad::integrate(|t| self.angle(t).cos(), a, b, QUAD_TOL, QUAD_TOL)?;
        let z = quad::integrate(|t| self.angle(t).sin(), a, b, QUAD_TOL, QUAD_TOL)?;
        Ok((x, z))
    }

    /// `F(s) = int_{lo}^{s} (cos phi, sin phi)` for profiles with finite support.
    fn antiderivative(&self, s: f64) -> Result<(f64, f64)> {
        let (lo, hi) = self.support.expect("finite support");
        if s <= lo {
            let d = s - lo;
            return Ok((d * self.phi_minus.cos(), d * self.phi_minus.sin()));
        }
        if s >= hi {
            let d = s - hi;
            return Ok((self.chord.0 + d * self.phi_plus.cos(), self.chord.1 + d * self.phi_plus.sin()));
        }
        self.integrate_tangent(lo, s)
    }

    /// Curve point `(x(s), z(s))` with the base point `(x(0), z(0)) = (0, 0)`.
    pub fn curve_point(&self, s: f64) -> Result<(f64, f64)> {
        match self.support {
            None => Ok((s * self.phi_plus.cos(), s * self.phi_plus.sin())),
            Some(_) => {
                let f = self.antiderivative(s)?;
                Ok((f.0 - self.origin_offset.0, f.1 - self.origin_offset.1))
            }
        }
    }

    /// Curve points for many arc-length values, integrating cumulatively
    /// between consecutive (sorted) samples.
    pub fn curve_points(&self, s: &[f64]) -> Result<Vec<(f64, f64)>> {
        let Some((lo, hi)) = self.support else {
            return s.iter().map(|&t| self.curve_point(t)).collect();
        };
        let mut order: Vec<usize> = (0..s.len()).collect();
        order.sort_by(|&i, &j| s[i].total_cmp(&s[j]));
        let mut out = vec![(0.0, 0.0); s.len()];
        let mut prev_clamped = lo;
        let mut acc = (0.0, 0.0);
        for idx in order {
            let t = s[idx];
            let clamped = t.clamp(lo, hi);
            if clamped > prev_clamped {
                let d = self.integrate_tangent(prev_clamped, clamped)?;
                acc.0 += d.0;
                acc.1 += d.1;
                prev_clamped = clamped;
            }
            let tail = t - clamped;
            let phi = if t < lo { self.phi_minus } else { self.phi_plus };
            out[idx] = (
                acc.0 + tail * phi.cos() - self.origin_offset.0,
                acc.1 + tail * phi.sin() - self.origin_offset.1,
            );
        }
        Ok(out)
    }

    /// Dense sample points covering the support (or a unit window for
    /// constant-angle profiles).
    pub fn sample_points(&self, count: usize) -> Vec<f64> {
        let (lo, hi) = self.support.unwrap_or((-1.0, 1.0));
        let n = count.max(2);
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }

    /// Sampled estimate of `||kappa||_inf`.
    pub fn kappa_sup(&self) -> f64 {
        self.sample_points(20_001)
            .into_iter()
            .map(|s| self.curvature(s).0.abs())
            .fold(0.0, f64::max)
    }

    pub fn slope_stats(&self) -> SlopeStats {
        let (xm, xp) = self.xdot_tails();
        let mut xdot_min = xm.min(xp);
        let mut xdot_max = xm.max(xp);
        let mut ksq_max: f64 = 0.0;
        for s in self.sample_points(20_001) {
            let xd = self.angle(s).cos();
            xdot_min = xdot_min.min(xd);
            xdot_max = xdot_max.max(xd);
            ksq_max = ksq_max.max(self.curvature(s).0.powi(2));
        }
        SlopeStats {
            xdot_lower_plus: xp,
            xdot_upper_plus: xp,
            xdot_lower_minus: xm,
            xdot_upper_minus: xm,
            kappa_sq_lower_plus: 0.0,
            kappa_sq_upper_plus: 0.0,
            kappa_sq_lower_minus: 0.0,
            kappa_sq_upper_minus: 0.0,
            xdot_min,
            xdot_max,
            kappa_sq_max: ksq_max,
        }
    }
}

fn check_width(w: f64) -> Result<()> {
    if w > 0.0 && w.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("width {w} must be positive and finite")))
    }
}

/// Limiting lower/upper values of `x'` and `kappa^2` at both ends, plus
/// sampled interior extrema.
///
/// Every family has constant tails, so the limits equal the tail values and
/// `kappa^2` vanishes at both ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeStats {
    pub xdot_lower_plus: f64,
    pub xdot_upper_plus: f64,
    pub xdot_lower_minus: f64,
    pub xdot_upper_minus: f64,
    pub kappa_sq_lower_plus: f64,
    pub kappa_sq_upper_plus: f64,
    pub kappa_sq_lower_minus: f64,
    pub kappa_sq_upper_minus: f64,
    pub xdot_min: f64,
    pub xdot_max: f64,
    pub kappa_sq_max: f64,
}

/// A layer of half-width `a` over a curve, in the field `b0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerConfig {
    pub profile: CurveProfile,
    pub a: f64,
    pub b0: f64,
}

impl LayerConfig {
    pub fn new(profile: CurveProfile, a: f64, b0: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::invalid(format!("half-width a = {a} must be positive")));
        }
        if !(b0 > 0.0 && b0.is_finite()) {
            return Err(Error::invalid(format!("field B0 = {b0} must be positive")));
        }
        Ok(LayerConfig { profile, a, b0 })
    }

    /// Checks `a ||kappa||_inf < 1`, the condition keeping `f_a` positive.
    pub fn validate(&self) -> Result<()> {
        let k = self.profile.kappa_sup();
        if self.a * k >= 1.0 {
            return Err(Error::AssumptionViolated {
                assumption: "A1",
                witness: format!("a ||kappa|| = {:.6} >= 1", self.a * k),
            });
        }
        Ok(())
    }

    /// Metric factor `f_a(s, u) = 1 - a u kappa(s)`.
    pub fn metric_factor(&self, s: f64, u: f64) -> f64 {
        1.0 - self.a * u * self.profile.curvature(s).0
    }

    /// `A2(s, u) = B0 (x(s) - a u z'(s))`.
    pub fn vector_potential(&self, s: f64, u: f64) -> Result<f64> {
        check_u(u)?;
        let (x, _) = self.profile.curve_point(s)?;
        Ok(self.b0 * (x - self.a * u * self.profile.angle(s).sin()))
    }

    /// Curvature-induced potential of the straightened layer.
    pub fn curvature_potential(&self, s: f64, u: f64) -> Result<f64> {
        check_u(u)?;
        let (k, k1, k2) = self.profile.curvature(s);
        let f = 1.0 - self.a * u * k;
        if f <= 0.0 {
            return Err(Error::AssumptionViolated {
                assumption: "A1",
                witness: format!("f_a({s}, {u}) = {f} <= 0"),
            });
        }
        Ok(curvature_potential_value(self.a, u, k, k1, k2))
    }
}

/// `V = -k^2/(4f^2) - a u k''/(2f^3) - 5 a^2 u^2 k'^2/(4 f^4)` with `f = 1 - a u k`.
pub(crate) fn curvature_potential_value(a: f64, u: f64, k: f64, k1: f64, k2: f64) -> f64 {
    let f = 1.0 - a * u * k;
    let f2 = f * f;
    -k * k / (4.0 * f2) - a * u * k2 / (2.0 * f2 * f) - 5.0 * a * a * u * u * k1 * k1 / (4.0 * f2 * f2)
}

fn check_u(u: f64) -> Result<()> {
    if u > -1.0 && u < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("transverse coordinate u = {u} outside (-1, 1)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Holds,
    Fails,
    HoldsByConstruction,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionEntry {
    pub name: &'static str,
    pub status: Status,
    pub witness: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionReport {
    pub kappa_sup: f64,
    pub v_minus_sup: f64,
    pub xdot_tails: (f64, f64),
    pub entries: Vec<AssumptionEntry>,
}

impl AssumptionReport {
    pub fn status(&self, name: &str) -> Option<Status> {
        self.entries.iter().find(|e| e.name == name).map(|e| e.status)
    }

    pub fn all_hold(&self) -> bool {
        self.entries.iter().all(|e| e.status != Status::Fails)
    }
}

/// Reports on the standing assumptions A0 through A4 for a layer.
///
/// Suprema are sampled estimates. Self-intersection is tested by pairwise
/// distances between points more than `4a` apart in arc length.
pub fn check_assumptions(layer: &LayerConfig) -> AssumptionReport {
    let profile = &layer.profile;
    let a = layer.a;
    let kappa_sup = profile.kappa_sup();
    let mut entries = Vec::new();

    entries.push(AssumptionEntry {
        name: "A0",
        status: if kappa_sup.is_finite() { Status::Holds } else { Status::Fails },
        witness: format!("||kappa||_inf ~ {kappa_sup:.6e}"),
    });

    let width_ok = a * kappa_sup < 1.0;
    let intersection = if profile.support().is_none() {
        None
    } else {
        find_self_intersection(profile, a)
    };
    let a1_status = if !width_ok || intersection.is_some() {
        Status::Fails
    } else if profile.support().is_none() {
        Status::HoldsByConstruction
    } else {
        Status::Holds
    };
    let mut a1_witness = if kappa_sup > 0.0 {
        format!("a = {a}, 1/||kappa|| = {:.6}", 1.0 / kappa_sup)
    } else {
        format!("a = {a}, kappa = 0")
    };
    if let Some((s1, s2, d)) = intersection {
        a1_witness.push_str(&format!("; |L(s={s1:.3}) - L(s={s2:.3})| = {d:.4} <= 2a"));
    }
    entries.push(AssumptionEntry {
        name: "A1",
        status: a1_status,
        witness: a1_witness,
    });

    let mut v_minus_sup: f64 = 0.0;
    let mut v_ok = true;
    if width_ok {
        for s in profile.sample_points(4001) {
            let (k, k1, k2) = profile.curvature(s);
            for j in 0..=40 {
                let u = -1.0 + 2.0 * j as f64 / 40.0;
                let v = curvature_potential_value(a, u, k, k1, k2);
                if !v.is_finite() {
                    v_ok = false;
                }
                v_minus_sup = v_minus_sup.max((-v).max(0.0));
            }
        }
    } else {
        v_ok = false;
        v_minus_sup = f64::INFINITY;
    }
    entries.push(AssumptionEntry {
        name: "A2",
        status: if v_ok { Status::Holds } else { Status::Fails },
        witness: "implied by A3 (bounded negative part of V)".into(),
    });
    entries.push(AssumptionEntry {
        name: "A3",
        status: if v_ok { Status::Holds } else { Status::Fails },
        witness: format!("||V_-||_inf ~ {v_minus_sup:.6e}"),
    });

    let (mut k1_sup, mut k2_sup) = (0.0f64, 0.0f64);
    for s in profile.sample_points(20_001) {
        let (_, k1, k2) = profile.curvature(s);
        k1_sup = k1_sup.max(k1.abs());
        k2_sup = k2_sup.max(k2.abs());
    }
    entries.push(AssumptionEntry {
        name: "A4",
        status: Status::HoldsByConstruction,
        witness: format!("smooth blend; ||kappa'|| ~ {k1_sup:.4e}, ||kappa''|| ~ {k2_sup:.4e}"),
    });

    AssumptionReport {
        kappa_sup,
        v_minus_sup,
        xdot_tails: profile.xdot_tails(),
        entries,
    }
}

fn find_self_intersection(profile: &CurveProfile, a: f64) -> Option<(f64, f64, f64)> {
    let (lo, hi) = profile.support()?;
    let margin = 4.0 * a + 10.0;
    let h = (a / 4.0).min(0.05);
    let n = (((hi - lo + 2.0 * margin) / h).ceil() as usize).min(20_000);
    let s: Vec<f64> = (0..=n)
        .map(|i| lo - margin + (hi - lo + 2.0 * margin) * i as f64 / n as f64)
        .collect();
    let pts = profile.curve_points(&s).ok()?;
    for i in 0..s.len() {
        for j in (i + 1)..s.len() {
            if s[j] - s[i] <= 4.0 * a {
                continue;
            }
            let d = ((pts[i].0 - pts[j].0).powi(2) + (pts[i].1 - pts[j].1).powi(2)).sqrt();
            if d <= 2.0 * a {
                return Some((s[i], s[j], d));
            }
        }
    }
    None
}
