//! Band-structure scans over the momentum and the studies built on them.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::assembly::{EffectiveFiber, FiberKind, FiberOperator, FullFiber, Grid, HalfPlaneFiber};
use crate::eigensolve::{lowest_eigs, RESIDUAL_TOL};
use crate::error::{Error, Result};
use crate::geometry::{CurveProfile, LayerConfig};
use crate::output::{format_value, CsvTable};
use crate::specfun::dirichlet_eigenvalue;

/// `count` equally spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect(),
    }
}

/// Band functions `lambda_m[xi_j]` for `m = 1..=k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandStructure {
    pub xi: Vec<f64>,
    /// `values[j][m - 1] = lambda_m[xi_j]`, ascending in `m`.
    pub values: Vec<Vec<f64>>,
    pub kind: FiberKind,
    pub grid: Grid,
    pub provenance: String,
}

impl BandStructure {
    pub fn k(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    /// Branch `m` (1-based) across the scan.
    pub fn branch(&self, m: usize) -> Vec<f64> {
        self.values.iter().map(|col| col[m - 1]).collect()
    }

    pub fn is_sorted(&self) -> bool {
        self.values.iter().all(|c| c.windows(2).all(|w| w[0] <= w[1]))
    }

    pub fn to_table(&self) -> CsvTable {
        let mut header = vec!["xi".to_string()];
        header.extend((1..=self.k()).map(|m| format!("lambda_{m}")));
        let rows = self
            .xi
            .iter()
            .zip(&self.values)
            .map(|(x, col)| std::iter::once(*x).chain(col.iter().copied()).map(format_value).collect())
            .collect();
        CsvTable {
            comments: vec![
                format!("kind: {:?}", self.kind),
                format!("provenance: {}", self.provenance),
                format!(
                    "grid: L={} N_s={} N_u={} h_s={} h_u={}",
                    self.grid.half_length,
                    self.grid.n_s,
                    self.grid.n_u,
                    self.grid.h_s(),
                    self.grid.h_u()
                ),
                format!("residual tolerance: {RESIDUAL_TOL}"),
            ],
            header,
            rows,
        }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        self.to_table().write(out)
    }
}

fn check_increasing(xi: &[f64]) -> Result<()> {
    if xi.is_empty() || xi.windows(2).any(|w| !(w[1] > w[0])) || xi.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("momentum samples must be finite and strictly increasing"));
    }
    Ok(())
}

/// Lowest `k` eigenvalues of the fiber at every momentum. Samples are solved
/// in parallel; each solve is deterministic, so the result does not depend
/// on the worker count.
pub fn band_scan(op: &dyn FiberOperator, xi: &[f64], k: usize) -> Result<BandStructure> {
    check_increasing(xi)?;
    let values = xi
        .par_iter()
        .map(|&x| {
            let fm = op.matrix(x).map_err(|e| e.at_xi(x))?;
            lowest_eigs(&fm, k).map_err(|e| e.at_xi(x))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BandStructure {
        xi: xi.to_vec(),
        values,
        kind: op.kind(),
        grid: *op.grid(),
        provenance: op.describe(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlatVerdict {
    pub branch: usize,
    pub flat: bool,
    pub amplitude: f64,
    /// `amplitude / (1 + |mean|)`.
    pub relative: f64,
    pub mean: f64,
}

pub const DEFAULT_FLAT_TOL: f64 = 1e-6;

/// Flags branch `m` flat when `(max - min) / (1 + |mean|) < tol_rel` over the
/// scanned window.
pub fn flat_band_detect(bands: &BandStructure, tol_rel: f64) -> Result<Vec<FlatVerdict>> {
    if bands.xi.len() < 5 {
        return Err(Error::invalid("flat-band detection needs at least 5 momentum samples"));
    }
    Ok((1..=bands.k())
        .map(|m| {
            let b = bands.branch(m);
            let max = b.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let min = b.iter().copied().fold(f64::INFINITY, f64::min);
            let mean = b.iter().sum::<f64>() / b.len() as f64;
            let amplitude = max - min;
            let relative = amplitude / (1.0 + mean.abs());
            FlatVerdict {
                branch: m,
                flat: relative < tol_rel,
                amplitude,
                relative,
                mean,
            }
        })
        .collect())
}

/// Lowest `k` eigenvalues of the straight-layer model at tilt `alpha`.
///
/// The template grid fixes `N_u` and the longitudinal spacing; the
/// half-length is enlarged when the truncation rule asks for it.
pub fn halfplane_levels(alpha: f64, b0: f64, a: f64, k: usize, template: Grid) -> Result<Vec<f64>> {
    let budget = b0 * (2 * k + 1) as f64;
    let probe = HalfPlaneFiber::new(alpha, b0, a, template.with_budget(budget))?;
    let needed = probe.suggest_half_length(0.0, budget)?;
    let mut grid = template.with_budget(budget);
    if needed > grid.half_length {
        let h = template.h_s();
        grid.half_length = needed;
        grid.n_s = ((2.0 * needed / h).ceil() as usize).saturating_sub(1).max(8);
    }
    let fm = HalfPlaneFiber::new(alpha, b0, a, grid)?.matrix(0.0)?;
    lowest_eigs(&fm, k)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoteMatch {
    pub sigma_plus: Vec<f64>,
    pub sigma_minus: Vec<f64>,
    /// `|lambda_m[xi_min] - sigma_m(alpha_plus)|`.
    pub residual_low: Vec<f64>,
    /// `|lambda_m[xi_max] - sigma_m(alpha_minus)|`.
    pub residual_high: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Compares the ends of a scan with the straight-layer levels:
/// `xi -> -inf` probes the `s -> +inf` tail (slope `alpha_plus`), `xi -> +inf`
/// the other one.
pub fn asymptote_match(
    bands: &BandStructure,
    alpha_plus: f64,
    alpha_minus: f64,
    b0: f64,
    a: f64,
    k: usize,
) -> Result<AsymptoteMatch> {
    if k > bands.k() || bands.xi.len() < 3 {
        return Err(Error::invalid("scan has too few branches or samples for asymptote matching"));
    }
    let mut template = bands.grid;
    template.enforce_confinement = true;
    let sigma_plus = halfplane_levels(alpha_plus, b0, a, k, template)?;
    let sigma_minus = halfplane_levels(alpha_minus, b0, a, k, template)?;
    let n = bands.xi.len();
    let col = |j: usize, m: usize| bands.values[j][m];
    let mut warnings = Vec::new();
    let mut residual_low = Vec::with_capacity(k);
    let mut residual_high = Vec::with_capacity(k);
    for m in 0..k {
        let lo = (col(0, m) - sigma_plus[m]).abs();
        let hi = (col(n - 1, m) - sigma_minus[m]).abs();
        if lo > (col(1, m) - sigma_plus[m]).abs() {
            warnings.push(format!("branch {}: residual grows toward xi_min; window may be too narrow", m + 1));
        }
        if hi > (col(n - 2, m) - sigma_minus[m]).abs() {
            warnings.push(format!("branch {}: residual grows toward xi_max; window may be too narrow", m + 1));
        }
        residual_low.push(lo);
        residual_high.push(hi);
    }
    Ok(AsymptoteMatch {
        sigma_plus,
        sigma_minus,
        residual_low,
        residual_high,
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BentThresholds {
    pub alpha_plus: f64,
    pub alpha_minus: f64,
    pub b0: f64,
    pub eps0: f64,
    pub eps_star: f64,
    pub a0_star: f64,
    /// Largest `a0` over a uniform sample of `(0, eps0)`.
    pub sampled_max: f64,
    /// `(am^2 - ap^2) / (2 sqrt(2 B0) sqrt(am + sqrt(ap^2 + 1/2)))`.
    pub intermediate_bound: f64,
    /// `(am^2 - ap^2) / (2 sqrt(2) sqrt(1 + sqrt(3/2)) sqrt(B0))`.
    pub closed_form_bound: f64,
}

/// `sqrt(alpha^2 + alpha sqrt(1 - alpha^2) eps)`.
pub fn g_alpha(alpha: f64, eps: f64) -> f64 {
    (alpha * alpha + alpha * (1.0 - alpha * alpha).max(0.0).sqrt() * eps).max(0.0).sqrt()
}

fn tilt_sum(ap: f64, am: f64) -> f64 {
    ap * (1.0 - ap * ap).max(0.0).sqrt() + am * (1.0 - am * am).max(0.0).sqrt()
}

/// Upper bound on the half-width below which `sigma_m(alpha_plus) < sigma_m(alpha_minus)`.
pub fn a0_of(ap: f64, am: f64, b0: f64, eps: f64) -> f64 {
    let num = g_alpha(am, -eps) - g_alpha(ap, eps);
    let den = 1.0 - ap * ap + tilt_sum(ap, am) / eps;
    (num.max(0.0) / den).sqrt() / b0.sqrt()
}

pub fn bent_thresholds(alpha_plus: f64, alpha_minus: f64, b0: f64) -> Result<BentThresholds> {
    let (ap, am) = (alpha_plus, alpha_minus);
    if !(ap > 0.0 && ap < am && am <= 1.0) {
        return Err(Error::invalid(format!(
            "thresholds need 0 < alpha_plus < alpha_minus <= 1 (got {ap}, {am})"
        )));
    }
    if !(b0 > 0.0) {
        return Err(Error::invalid("B0 must be positive"));
    }
    let diff = am * am - ap * ap;
    let eps0 = diff / tilt_sum(ap, am);
    let f = |e: f64| a0_of(ap, am, b0, e);
    let samples = 400;
    let (mut best_i, mut sampled_max) = (1, f64::NEG_INFINITY);
    for i in 1..samples {
        let v = f(eps0 * i as f64 / samples as f64);
        if v > sampled_max {
            sampled_max = v;
            best_i = i;
        }
    }
    // golden section around the best sample
    let (mut lo, mut hi) = (
        eps0 * (best_i - 1) as f64 / samples as f64,
        eps0 * (best_i + 1) as f64 / samples as f64,
    );
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let (mut c, mut d) = (hi - r * (hi - lo), lo + r * (hi - lo));
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > 1e-12 * eps0 {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - r * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + r * (hi - lo);
            fd = f(d);
        }
    }
    let eps_star = 0.5 * (lo + hi);
    let a0_star = f(eps_star).max(sampled_max);
    Ok(BentThresholds {
        alpha_plus: ap,
        alpha_minus: am,
        b0,
        eps0,
        eps_star,
        a0_star,
        sampled_max,
        intermediate_bound: diff / (2.0 * (2.0 * b0).sqrt() * (am + (ap * ap + 0.5).sqrt()).sqrt()),
        closed_form_bound: diff / (2.0 * 2f64.sqrt() * (1.0 + 1.5f64.sqrt()).sqrt() * b0.sqrt()),
    })
}

/// One label `(mt, nt)` of the level `B (2 mt + 1) + a^{-2} E_nt`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LevelLabel {
    pub mt: u32,
    pub nt: u32,
}

fn sorted_labels(b: f64, a: f64, window: u32) -> Vec<(f64, LevelLabel)> {
    let mut v: Vec<(f64, LevelLabel)> = (0..=window)
        .flat_map(|mt| {
            (1..=window).map(move |nt| {
                (
                    b * f64::from(2 * mt + 1) + dirichlet_eigenvalue(nt as usize) / (a * a),
                    LevelLabel { mt, nt },
                )
            })
        })
        .collect();
    v.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.mt.cmp(&y.1.mt)));
    v
}

/// Smallest level excluded by the enumeration window.
fn window_ceiling(b: f64, a: f64, window: u32) -> f64 {
    (b * f64::from(2 * (window + 1) + 1) + dirichlet_eigenvalue(1) / (a * a))
        .min(b + dirichlet_eigenvalue(window as usize + 1) / (a * a))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityRow {
    pub m: usize,
    pub lower: LevelLabel,
    pub upper: LevelLabel,
    pub difference: f64,
    /// `difference - (B~ - B)`, evaluated from the labels.
    pub excess: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityVerdict {
    pub b: f64,
    pub b_tilde: f64,
    pub a: f64,
    pub window: u32,
    pub rows: Vec<MonotonicityRow>,
    pub holds: bool,
}

/// Checks `sigma_m(1, B~) - sigma_m(1, B) >= B~ - B` for `m <= m_max` on the
/// perpendicular-layer levels.
///
/// The excess is computed from the level labels as
/// `2 (B~ mt' - B mt) + a^{-2} (E_nt' - E_nt)`, so equal transverse labels
/// cancel exactly and no tolerance is needed.
pub fn field_monotonicity_check(b: f64, b_tilde: f64, a: f64, m_max: usize) -> Result<MonotonicityVerdict> {
    if !(b > 0.0 && b_tilde > b && a > 0.0) || m_max == 0 {
        return Err(Error::invalid("monotonicity check needs 0 < B < B~, a > 0, m_max >= 1"));
    }
    let mut window = 40u32;
    loop {
        let lo = sorted_labels(b, a, window);
        let hi = sorted_labels(b_tilde, a, window);
        let fits = lo.len() >= m_max
            && lo[m_max - 1].0 < window_ceiling(b, a, window)
            && hi[m_max - 1].0 < window_ceiling(b_tilde, a, window);
        if !fits {
            window = window.checked_mul(2).filter(|w| *w <= 5000).ok_or_else(|| {
                Error::invalid("enumeration window cannot cover the requested levels")
            })?;
            continue;
        }
        let rows: Vec<MonotonicityRow> = (0..m_max)
            .map(|i| {
                let (vl, l) = lo[i];
                let (vu, u) = hi[i];
                let e_term = if u.nt == l.nt {
                    0.0
                } else {
                    (dirichlet_eigenvalue(u.nt as usize) - dirichlet_eigenvalue(l.nt as usize)) / (a * a)
                };
                let excess = 2.0 * (b_tilde * f64::from(u.mt) - b * f64::from(l.mt)) + e_term;
                MonotonicityRow {
                    m: i + 1,
                    lower: l,
                    upper: u,
                    difference: vu - vl,
                    excess,
                }
            })
            .collect();
        let holds = rows.iter().all(|r| r.excess >= 0.0);
        return Ok(MonotonicityVerdict {
            b,
            b_tilde,
            a,
            window,
            rows,
            holds,
        });
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThinLimitRow {
    pub a: f64,
    pub lambda_2d: f64,
    /// Discrete transverse baseline `E_1^h / a^2`.
    pub baseline: f64,
    pub nu: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThinLimitStudy {
    pub xi: f64,
    pub b0: f64,
    pub rows: Vec<ThinLimitRow>,
    /// Least-squares slope of `log delta` against `log a`; `None` when some
    /// gap vanishes.
    pub slope: Option<f64>,
    pub grid: Grid,
    pub refined: bool,
    pub warnings: Vec<String>,
}

fn thin_rows(profile: &CurveProfile, b0: f64, xi: f64, a_list: &[f64], grid: Grid) -> Result<Vec<ThinLimitRow>> {
    let nu = lowest_eigs(&EffectiveFiber::new(profile, b0, grid)?.matrix(xi)?, 1)?[0];
    a_list
        .par_iter()
        .map(|&a| {
            let layer = LayerConfig::new(profile.clone(), a, b0)?;
            let fm = FullFiber::new(&layer, grid)?.matrix(xi)?;
            let lambda_2d = lowest_eigs(&fm, 1)?[0];
            let baseline = grid.discrete_e1() / (a * a);
            Ok(ThinLimitRow {
                a,
                lambda_2d,
                baseline,
                nu,
                delta: (lambda_2d - baseline - nu).abs(),
            })
        })
        .collect()
}

fn loglog_slope(rows: &[ThinLimitRow]) -> Option<f64> {
    if rows.len() < 2 || rows.iter().any(|r| !(r.delta > 0.0)) {
        return None;
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.a.ln(), r.delta.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

/// Gap between the full fiber (minus its transverse baseline) and the
/// thin-layer effective fiber for each half-width, with the fitted order.
pub fn thin_limit_study(profile: &CurveProfile, b0: f64, xi: f64, a_list: &[f64], grid: Grid) -> Result<ThinLimitStudy> {
    if a_list.is_empty() || a_list.windows(2).any(|w| !(w[1] < w[0])) || a_list.iter().any(|&a| !(a > 0.0)) {
        return Err(Error::invalid("half-widths must be positive and strictly decreasing"));
    }
    let mut grid = grid;
    let mut rows = thin_rows(profile, b0, xi, a_list, grid)?;
    let monotone = |rows: &[ThinLimitRow]| rows.windows(2).all(|w| w[1].delta <= w[0].delta);
    let mut refined = false;
    let mut warnings = Vec::new();
    if !monotone(&rows) {
        grid.n_s = 2 * grid.n_s + 1;
        grid.n_u = 2 * grid.n_u + 1;
        rows = thin_rows(profile, b0, xi, a_list, grid)?;
        refined = true;
        if !monotone(&rows) {
            warnings.push("gap not monotone in a after refinement; discretization error may dominate".into());
        }
    }
    Ok(ThinLimitStudy {
        xi,
        b0,
        slope: loglog_slope(&rows),
        rows,
        grid,
        refined,
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionCheck {
    pub holds: bool,
    pub witness: String,
}

fn check(holds: bool, witness: String) -> ConditionCheck {
    ConditionCheck { holds, witness }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SufficientConditions {
    pub fold: ConditionCheck,
    pub bent: ConditionCheck,
    pub condition1: ConditionCheck,
    pub condition1_mirror: ConditionCheck,
    pub condition2: ConditionCheck,
}

impl SufficientConditions {
    pub fn any(&self) -> bool {
        [&self.fold, &self.bent, &self.condition1, &self.condition1_mirror, &self.condition2]
            .iter()
            .any(|c| c.holds)
    }
}

/// Evaluates the tail-based and structural sufficient conditions for
/// non-constant bands.
pub fn suff_condition_check(profile: &CurveProfile, b0: f64) -> SufficientConditions {
    let st = profile.slope_stats();
    let (xm, xp) = profile.xdot_tails();

    let fold = check(
        xp * xm < 0.0,
        format!("x' tails: {xm:.6} (s -> -inf), {xp:.6} (s -> +inf); x -> +-inf on both ends needs opposite signs"),
    );

    let bent_ok = xp > 0.0 && xp <= 1.0 && xm > 0.0 && xm <= 1.0 && xp != xm;
    let bent = check(
        bent_ok,
        format!("alpha_plus = {xp:.6}, alpha_minus = {xm:.6}; need both in (0, 1] and distinct"),
    );

    let cond1 = |lo_a: f64, up_b: f64, lo_other: f64, k2_lo_a: f64, k2_up_b: f64, tag: &str| {
        if !(lo_a > 0.0 && lo_other > 0.0) {
            return check(false, format!("{tag}: lower x' tails must be positive ({lo_a:.6}, {lo_other:.6})"));
        }
        if lo_a < up_b {
            return check(false, format!("{tag}: prerequisite fails, lower x' tail {lo_a:.6} < upper x' tail {up_b:.6}"));
        }
        let lhs = k2_lo_a - k2_up_b;
        let rhs = 4.0 * b0 * (lo_a - up_b);
        check(lhs < rhs, format!("{tag}: kappa^2 difference {lhs:.6} vs 4 B0 x' difference {rhs:.6}"))
    };
    let condition1 = cond1(
        st.xdot_lower_plus,
        st.xdot_upper_minus,
        st.xdot_lower_minus,
        st.kappa_sq_lower_plus,
        st.kappa_sq_upper_minus,
        "+",
    );
    let condition1_mirror = cond1(
        st.xdot_lower_minus,
        st.xdot_upper_plus,
        st.xdot_lower_plus,
        st.kappa_sq_lower_minus,
        st.kappa_sq_upper_plus,
        "-",
    );

    let condition2 = {
        let samples = profile.sample_points(4001);
        let left_flat = profile.tails().0 == 0.0
            && samples.iter().filter(|&&s| s <= 0.0).all(|&s| profile.angle(s) == 0.0);
        let neg_slope = samples.iter().find(|&&s| s > 0.0 && profile.tangent(s).0 < 0.0);
        let identity = profile.tails() == (0.0, 0.0) && samples.iter().all(|&s| profile.angle(s) == 0.0);
        if !left_flat {
            check(false, "x(s) = s fails somewhere on s <= 0".into())
        } else if let Some(s) = neg_slope {
            check(false, format!("x'({s:.4}) < 0"))
        } else if !(st.xdot_lower_plus > 0.0) {
            check(false, format!("lower x' tail at +inf is {:.6}", st.xdot_lower_plus))
        } else if identity {
            check(false, "x = Id".into())
        } else {
            check(true, "x(s) = s for s <= 0, x' >= 0, positive right tail, x != Id".into())
        }
    };

    SufficientConditions {
        fold,
        bent,
        condition1,
        condition1_mirror,
        condition2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::TransverseFiber;
    use crate::geometry::CurveFamily;

    #[test]
    fn thresholds_for_half_and_one() {
        let t = bent_thresholds(0.5, 1.0, 1.0).unwrap();
        assert!((t.eps0 - 3f64.sqrt()).abs() < 1e-14);
        assert!((t.closed_form_bound - 0.75 / (2.0 * 2f64.sqrt() * (1.0 + 1.5f64.sqrt()).sqrt())).abs() < 1e-15);
        assert!((t.closed_form_bound - 0.1778).abs() < 1e-4);
        assert!(t.eps_star > 0.0 && t.eps_star < t.eps0);
        assert!(t.closed_form_bound <= t.intermediate_bound);
        assert!(t.intermediate_bound <= t.a0_star + 1e-12);
        assert!(bent_thresholds(0.7, 0.7, 1.0).is_err());
    }

    #[test]
    fn threshold_inequality_on_samples() {
        for (ap, am) in [(0.2, 0.9), (0.5, 1.0), (0.8, 0.95)] {
            let t = bent_thresholds(ap, am, 1.0).unwrap();
            for i in 1..100 {
                let e = t.eps0 * i as f64 / 100.0;
                assert!(g_alpha(am, -e) > g_alpha(ap, e));
                assert!(a0_of(ap, am, 1.0, e) > 0.0);
            }
        }
    }

    #[test]
    fn monotonicity_examples() {
        let v = field_monotonicity_check(1.0, 2.0, 1.0, 1).unwrap();
        assert!(v.holds);
        assert_eq!(v.rows[0].excess, 0.0);
        for (b, bt, a) in [(0.5, 1.5, 1.0), (1.0, 1.1, 0.5)] {
            assert!(field_monotonicity_check(b, bt, a, 10).unwrap().holds);
        }
    }

    #[test]
    fn suff_conditions_examples() {
        let bump = CurveProfile::new(CurveFamily::Bump {
            amplitude: 0.5,
            center: 1.5,
            width: 1.5,
        })
        .unwrap();
        assert!(suff_condition_check(&bump, 1.0).condition2.holds);
        let flat = CurveProfile::new(CurveFamily::Tilted { gamma: 0.0 }).unwrap();
        let c = suff_condition_check(&flat, 1.0).condition2;
        assert!(!c.holds && c.witness.contains("Id"));
        let bent = CurveProfile::bent_regime(0.5, 1.0, 0.0, 1.0).unwrap();
        let r = suff_condition_check(&bent, 1.0);
        assert!(!r.condition1.holds && r.condition1.witness.contains("prerequisite"));
        assert!(r.bent.holds);
        let fold = CurveProfile::new(CurveFamily::Fold { delta: 0.5, width: 1.0 }).unwrap();
        assert!(suff_condition_check(&fold, 1.0).fold.holds);
    }

    #[test]
    fn transverse_bands_even_and_sorted() {
        let op = TransverseFiber::new(1.0, 1.0, Grid::transverse(200)).unwrap();
        let xi = linspace(-2.0, 2.0, 9);
        let bands = band_scan(&op, &xi, 3).unwrap();
        assert!(bands.is_sorted());
        for m in 1..=3 {
            let b = bands.branch(m);
            for j in 0..4 {
                assert!((b[j] - b[8 - j]).abs() < 1e-9);
            }
            assert!(b[5] < b[6] && b[6] < b[7]);
        }
        assert!(flat_band_detect(&bands, DEFAULT_FLAT_TOL).unwrap().iter().all(|v| !v.flat));
    }

    #[test]
    fn scan_rejects_unsorted_momenta() {
        let op = TransverseFiber::new(1.0, 1.0, Grid::transverse(40)).unwrap();
        assert!(band_scan(&op, &[0.0, 0.0], 1).is_err());
    }
}
