//! Finite-difference discretization of the fiber operators.
//!
//! Every operator is assembled as a real symmetric banded matrix with
//! Dirichlet conditions at the physical walls `u = +-1` and at the
//! truncation points `s = +-L`. Kinetic terms are built in the form
//! `D^T diag(c) D` with coefficients at cell midpoints, so the discrete
//! operator is symmetric and its kinetic part positive semidefinite.
//! Two-dimensional unknowns are ordered with `u` running fastest.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{curvature_potential_value, CurveProfile, LayerConfig};
use crate::iwatsuka::IwatsukaSpec;
use crate::linalg::SymBandMatrix;

/// Extra energy, above the requested budget, that the potential must reach
/// at the truncation points.
pub const CONFINEMENT_MARGIN: f64 = 10.0;

/// Tensor grid: `n_s` interior nodes on `[-L, L]`, `n_u` interior nodes on `(-1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub half_length: f64,
    pub n_s: usize,
    pub n_u: usize,
    /// Largest (longitudinal) eigenvalue the caller cares about; the edge
    /// potential must exceed it by [`CONFINEMENT_MARGIN`].
    #[serde(default)]
    pub energy_budget: f64,
    #[serde(default = "enforce_default")]
    pub enforce_confinement: bool,
}

fn enforce_default() -> bool {
    true
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            half_length: 12.0,
            n_s: 512,
            n_u: 64,
            energy_budget: 0.0,
            enforce_confinement: true,
        }
    }
}

impl Grid {
    pub fn new(half_length: f64, n_s: usize, n_u: usize) -> Self {
        Grid {
            half_length,
            n_s,
            n_u,
            ..Grid::default()
        }
    }

    /// One-dimensional longitudinal grid.
    pub fn line(half_length: f64, n_s: usize) -> Self {
        Grid::new(half_length, n_s, 8)
    }

    /// One-dimensional transverse grid.
    pub fn transverse(n_u: usize) -> Self {
        Grid::new(1.0, 8, n_u)
    }

    pub fn with_budget(mut self, budget: f64) -> Self {
        self.energy_budget = budget;
        self
    }

    pub fn without_confinement_check(mut self) -> Self {
        self.enforce_confinement = false;
        self
    }

    pub fn h_s(&self) -> f64 {
        2.0 * self.half_length / (self.n_s + 1) as f64
    }

    pub fn h_u(&self) -> f64 {
        2.0 / (self.n_u + 1) as f64
    }

    pub fn s_node(&self, i: usize) -> f64 {
        -self.half_length + (i + 1) as f64 * self.h_s()
    }

    /// Midpoint between node `m - 1` and node `m` (`m = 0..=n_s`).
    pub fn s_mid(&self, m: usize) -> f64 {
        -self.half_length + (m as f64 + 0.5) * self.h_s()
    }

    pub fn u_node(&self, j: usize) -> f64 {
        -1.0 + (j + 1) as f64 * self.h_u()
    }

    pub fn s_nodes(&self) -> Vec<f64> {
        (0..self.n_s).map(|i| self.s_node(i)).collect()
    }

    pub fn u_nodes(&self) -> Vec<f64> {
        (0..self.n_u).map(|j| self.u_node(j)).collect()
    }

    /// Lowest eigenvalue of the discrete Dirichlet Laplacian `-d^2/du^2` on
    /// this `u` grid; tends to `pi^2/4`.
    pub fn discrete_e1(&self) -> f64 {
        discrete_dirichlet_eigenvalue(self.n_u, 1)
    }

    fn validate_s(&self) -> Result<()> {
        if self.n_s < 8 || !(self.half_length > 0.0 && self.half_length.is_finite()) {
            return Err(Error::invalid(format!(
                "longitudinal grid needs N_s >= 8 and L > 0 (got N_s = {}, L = {})",
                self.n_s, self.half_length
            )));
        }
        Ok(())
    }

    fn validate_u(&self) -> Result<()> {
        if self.n_u < 8 {
            return Err(Error::invalid(format!("transverse grid needs N_u >= 8 (got {})", self.n_u)));
        }
        Ok(())
    }
}

/// `n`-th eigenvalue of the second-difference Dirichlet Laplacian with
/// `nodes` interior points on `(-1, 1)`.
pub fn discrete_dirichlet_eigenvalue(nodes: usize, n: usize) -> f64 {
    let h = 2.0 / (nodes + 1) as f64;
    let s = (n as f64 * PI * h / 4.0).sin();
    4.0 * s * s / (h * h)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FiberKind {
    Full2d,
    HalfPlane { alpha: f64 },
    Transverse,
    Effective,
    Iwatsuka,
}

/// A discretized fiber operator at fixed momentum.
#[derive(Debug, Clone)]
pub struct FiberMatrix {
    pub kind: FiberKind,
    pub xi: f64,
    pub matrix: SymBandMatrix,
    pub grid: Grid,
    /// Guaranteed lower bound on the spectrum of `matrix`.
    pub lower_bound: f64,
    pub provenance: String,
}

impl FiberMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn is_one_dimensional(&self) -> bool {
        self.matrix.bandwidth() == 1
    }
}

/// An operator family `xi -> H[xi]` with its xi-independent data precomputed.
pub trait FiberOperator: Sync {
    fn kind(&self) -> FiberKind;
    fn grid(&self) -> &Grid;
    fn matrix(&self, xi: f64) -> Result<FiberMatrix>;
    /// Confining potential at longitudinal position `s`, minimised over `u`.
    fn confining_potential(&self, xi: f64, s: f64) -> Result<f64>;
    fn describe(&self) -> String;

    /// Smaller of the confining potentials at the two truncation points.
    fn edge_potential(&self, xi: f64, l: f64) -> Result<f64> {
        Ok(self.confining_potential(xi, -l)?.min(self.confining_potential(xi, l)?))
    }

    /// Sampled minimum of the confining potential over `[-l, l]`.
    fn interior_minimum(&self, xi: f64, l: f64) -> Result<f64> {
        const SAMPLES: usize = 401;
        let mut best = f64::INFINITY;
        for i in 0..SAMPLES {
            let s = -l + 2.0 * l * i as f64 / (SAMPLES - 1) as f64;
            best = best.min(self.confining_potential(xi, s)?);
        }
        Ok(best)
    }

    /// Truncation rule: the edges sit above the budget and the well lies inside the box.
    fn confines(&self, xi: f64, l: f64, budget: f64) -> Result<bool> {
        let edge = self.edge_potential(xi, l)?;
        if edge < budget + CONFINEMENT_MARGIN {
            return Ok(false);
        }
        Ok(self.interior_minimum(xi, l)? <= edge - CONFINEMENT_MARGIN)
    }

    /// Refuses truncation lengths that do not confine the fiber.
    fn check_confinement(&self, xi: f64) -> Result<()> {
        let grid = self.grid();
        if !grid.enforce_confinement || self.confines(xi, grid.half_length, grid.energy_budget)? {
            return Ok(());
        }
        let suggested = self.suggest_half_length(xi, grid.energy_budget).unwrap_or(f64::INFINITY);
        Err(Error::Confinement {
            xi,
            half_length: grid.half_length,
            edge_potential: self.edge_potential(xi, grid.half_length)?,
            required: grid.energy_budget + CONFINEMENT_MARGIN,
            suggested,
        })
    }

    /// Smallest half-length (to 1e-3 relative) meeting the truncation rule.
    fn suggest_half_length(&self, xi: f64, budget: f64) -> Result<f64> {
        let mut hi = 1.0;
        while !self.confines(xi, hi, budget)? {
            hi *= 2.0;
            if hi > 1e5 {
                return Err(Error::invalid(format!(
                    "no truncation length confines the fiber at xi = {xi}; tails may be parallel to the field"
                )));
            }
        }
        let mut lo = 0.5 * hi;
        if hi == 1.0 {
            lo = 0.0;
        }
        while hi - lo > 1e-3 * hi {
            let mid = 0.5 * (lo + hi);
            if self.confines(xi, mid, budget)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }
}

/// `min_{|u| <= 1} (c - d u)^2`.
fn min_square_over_u(c: f64, d: f64) -> f64 {
    let excess = c.abs() - d.abs();
    if excess > 0.0 {
        excess * excess
    } else {
        0.0
    }
}

fn add_kinetic_1d(m: &mut SymBandMatrix, coeff: &[f64], stride: usize, offset: usize, n: usize) {
    // coeff[k] couples node k-1 and node k; k = 0 and k = n touch the walls
    for k in 0..=n {
        let c = coeff[k];
        if k > 0 {
            let i = offset + (k - 1) * stride;
            m.add(i, i, c);
        }
        if k < n {
            let i = offset + k * stride;
            m.add(i, i, c);
        }
        if k > 0 && k < n {
            m.add(offset + k * stride, offset + (k - 1) * stride, -c);
        }
    }
}

/// Tridiagonal `-d^2/dx^2 + q(x_i)` with Dirichlet ends.
pub fn schrodinger_1d(h: f64, potential: &[f64]) -> SymBandMatrix {
    let n = potential.len();
    let mut m = SymBandMatrix::zeros(n, 1);
    add_kinetic_1d(&mut m, &vec![1.0 / (h * h); n + 1], 1, 0, n);
    for (i, &q) in potential.iter().enumerate() {
        m.add(i, i, q);
    }
    m
}

/// The full fiber `H[xi] = -d_s f_a^{-2} d_s + (xi + A2)^2 - a^{-2} d_u^2 + V`.
#[derive(Debug, Clone)]
pub struct FullFiber {
    layer: LayerConfig,
    grid: Grid,
    x: Vec<f64>,
    sin_phi: Vec<f64>,
    /// `V(s_i, u_j)`, row-major in `(i, j)`.
    curvature_potential: Vec<f64>,
    /// `f_a^{-2}` at `(s_mid(m), u_j)`, row-major in `(m, j)`.
    metric_coeff: Vec<f64>,
}

impl FullFiber {
    pub fn new(layer: &LayerConfig, grid: Grid) -> Result<Self> {
        grid.validate_s()?;
        grid.validate_u()?;
        layer.validate()?;
        let s = grid.s_nodes();
        let u = grid.u_nodes();
        let pts = layer.profile.curve_points(&s)?;
        let x = pts.iter().map(|p| p.0).collect();
        let sin_phi = s.iter().map(|&t| layer.profile.angle(t).sin()).collect();
        let a = layer.a;
        let mut curvature_potential = Vec::with_capacity(grid.n_s * grid.n_u);
        for &t in &s {
            let (k, k1, k2) = layer.profile.curvature(t);
            for &uj in &u {
                curvature_potential.push(curvature_potential_value(a, uj, k, k1, k2));
            }
        }
        let mut metric_coeff = Vec::with_capacity((grid.n_s + 1) * grid.n_u);
        for m in 0..=grid.n_s {
            let k = layer.profile.curvature(grid.s_mid(m)).0;
            for &uj in &u {
                let f = 1.0 - a * uj * k;
                metric_coeff.push(1.0 / (f * f));
            }
        }
        Ok(FullFiber {
            layer: layer.clone(),
            grid,
            x,
            sin_phi,
            curvature_potential,
            metric_coeff,
        })
    }

    pub fn layer(&self) -> &LayerConfig {
        &self.layer
    }
}

impl FiberOperator for FullFiber {
    fn kind(&self) -> FiberKind {
        FiberKind::Full2d
    }

    fn grid(&self) -> &Grid {
        &self.grid
    }

    fn confining_potential(&self, xi: f64, s: f64) -> Result<f64> {
        let b0 = self.layer.b0;
        let (x, _) = self.layer.profile.curve_point(s)?;
        let d = b0 * self.layer.a * self.layer.profile.angle(s).sin();
        Ok(min_square_over_u(xi + b0 * x, d))
    }

    fn describe(&self) -> String {
        format!(
            "full2d {:?} a={} B0={}",
            self.layer.profile.family(),
            self.layer.a,
            self.layer.b0
        )
    }

    fn matrix(&self, xi: f64) -> Result<FiberMatrix> {
        self.check_confinement(xi)?;
        let g = &self.grid;
        let (ns, nu) = (g.n_s, g.n_u);
        let (a, b0) = (self.layer.a, self.layer.b0);
        let hs2 = g.h_s() * g.h_s();
        let cu = 1.0 / (a * a * g.h_u() * g.h_u());
        let u = g.u_nodes();
        let mut m = SymBandMatrix::zeros(ns * nu, nu);
        let mut coeff = vec![0.0; ns + 1];
        for j in 0..nu {
            for (k, c) in coeff.iter_mut().enumerate() {
                *c = self.metric_coeff[k * nu + j] / hs2;
            }
            add_kinetic_1d(&mut m, &coeff, nu, j, ns);
        }
        let cu_vec = vec![cu; nu + 1];
        let mut min_diag = f64::INFINITY;
        for i in 0..ns {
            add_kinetic_1d(&mut m, &cu_vec, 1, i * nu, nu);
            for (j, &uj) in u.iter().enumerate() {
                let p = xi + b0 * (self.x[i] - a * uj * self.sin_phi[i]);
                let q = p * p + self.curvature_potential[i * nu + j];
                min_diag = min_diag.min(q);
                m.add(i * nu + j, i * nu + j, q);
            }
        }
        let lower_bound = g.discrete_e1() / (a * a) + min_diag;
        Ok(FiberMatrix {
            kind: FiberKind::Full2d,
            xi,
            matrix: m,
            grid: *g,
            lower_bound,
            provenance: self.describe(),
        })
    }
}

/// Straight-layer model `H_alpha = -d_s^2 + B0^2 (alpha s - a u sqrt(1 - alpha^2))^2 - a^{-2} d_u^2`.
#[derive(Debug, Clone)]
pub struct HalfPlaneFiber {
    alpha: f64,
    b0: f64,
    a: f64,
    grid: Grid,
}

impl HalfPlaneFiber {
    pub fn new(alpha: f64, b0: f64, a: f64, grid: Grid) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::invalid(format!("alpha = {alpha} outside (0, 1]")));
        }
        if !(b0 > 0.0 && a > 0.0) {
            return Err(Error::invalid("half-plane model needs B0 > 0 and a > 0"));
        }
        grid.validate_s()?;
        grid.validate_u()?;
        Ok(HalfPlaneFiber { alpha, b0, a, grid })
    }

    fn tilt(&self) -> f64 {
        (1.0 - self.alpha * self.alpha).max(0.0).sqrt()
    }
}

impl FiberOperator for HalfPlaneFiber {
    fn kind(&self) -> FiberKind {
        FiberKind::HalfPlane { alpha: self.alpha }
    }

    fn grid(&self) -> &Grid {
        &self.grid
    }

    fn confining_potential(&self, _xi: f64, s: f64) -> Result<f64> {
        let d = self.b0 * self.a * self.tilt();
        Ok(min_square_over_u(self.b0 * self.alpha * s, d))
    }

    fn describe(&self) -> String {
        format!("halfplane alpha={} a={} B0={}", self.alpha, self.a, self.b0)
    }

    fn matrix(&self, xi: f64) -> Result<FiberMatrix> {
        self.check_confinement(xi)?;
        let g = &self.grid;
        let (ns, nu) = (g.n_s, g.n_u);
        let c = self.tilt();
        let mut m = SymBandMatrix::zeros(ns * nu, nu);
        let cs = vec![1.0 / (g.h_s() * g.h_s()); ns + 1];
        for j in 0..nu {
            add_kinetic_1d(&mut m, &cs, nu, j, ns);
        }
        let cu = vec![1.0 / (self.a * self.a * g.h_u() * g.h_u()); nu + 1];
        let u = g.u_nodes();
        for i in 0..ns {
            add_kinetic_1d(&mut m, &cu, 1, i * nu, nu);
            let s = g.s_node(i);
            for (j, &uj) in u.iter().enumerate() {
                let p = self.b0 * (self.alpha * s - self.a * uj * c);
                m.add(i * nu + j, i * nu + j, p * p);
            }
        }
        Ok(FiberMatrix {
            kind: self.kind(),
            xi,
            matrix: m,
            grid: *g,
            lower_bound: g.discrete_e1() / (self.a * self.a),
            provenance: self.describe(),
        })
    }
}

/// Parallel-layer transverse operator `T2[xi] = -a^{-2} d_u^2 + (xi - B0 a u)^2` on `(-1, 1)`.
#[derive(Debug, Clone)]
pub struct TransverseFiber {
    b0: f64,
    a: f64,
    grid: Grid,
}

impl TransverseFiber {
    /// `b0 = 0` is allowed here (free Dirichlet strip).
    pub fn new(b0: f64, a: f64, grid: Grid) -> Result<Self> {
        if !(b0 >= 0.0 && a > 0.0) {
            return Err(Error::invalid("transverse operator needs B0 >= 0 and a > 0"));
        }
        grid.validate_u()?;
        Ok(TransverseFiber { b0, a, grid })
    }
}

impl FiberOperator for TransverseFiber {
    fn kind(&self) -> FiberKind {
        FiberKind::Transverse
    }

    fn grid(&self) -> &Grid {
        &self.grid
    }

    fn confining_potential(&self, _xi: f64, _s: f64) -> Result<f64> {
        Ok(0.0)
    }

    fn edge_potential(&self, _xi: f64, _l: f64) -> Result<f64> {
        Ok(f64::INFINITY)
    }

    fn describe(&self) -> String {
        format!("transverse a={} B0={}", self.a, self.b0)
    }

    fn matrix(&self, xi: f64) -> Result<FiberMatrix> {
        let g = &self.grid;
        let nu = g.n_u;
        let mut m = SymBandMatrix::zeros(nu, 1);
        let cu = vec![1.0 / (self.a * self.a * g.h_u() * g.h_u()); nu + 1];
        add_kinetic_1d(&mut m, &cu, 1, 0, nu);
        let mut min_q = f64::INFINITY;
        for j in 0..nu {
            let p = xi - self.b0 * self.a * g.u_node(j);
            min_q = min_q.min(p * p);
            m.add(j, j, p * p);
        }
        Ok(FiberMatrix {
            kind: FiberKind::Transverse,
            xi,
            matrix: m,
            grid: *g,
            lower_bound: g.discrete_e1() / (self.a * self.a) + min_q,
            provenance: self.describe(),
        })
    }
}

/// Thin-layer effective fiber `h_eff[xi] = -d_s^2 + (xi + B0 x(s))^2 - kappa(s)^2 / 4`.
#[derive(Debug, Clone)]
pub struct EffectiveFiber {
    profile: CurveProfile,
    b0: f64,
    grid: Grid,
    x: Vec<f64>,
    kappa_sq: Vec<f64>,
}

impl EffectiveFiber {
    pub fn new(profile: &CurveProfile, b0: f64, grid: Grid) -> Result<Self> {
        if !(b0 > 0.0) {
            return Err(Error::invalid("effective fiber needs B0 > 0"));
        }
        grid.validate_s()?;
        let s = grid.s_nodes();
        let x = profile.curve_points(&s)?.into_iter().map(|p| p.0).collect();
        let kappa_sq = s.iter().map(|&t| profile.curvature(t).0.powi(2)).collect();
        Ok(EffectiveFiber {
            profile: profile.clone(),
            b0,
            grid,
            x,
            kappa_sq,
        })
    }

    /// Potential values `(xi + B0 x(s_i))^2 - kappa(s_i)^2/4` at the nodes.
    pub fn potential(&self, xi: f64) -> Vec<f64> {
        self.x
            .iter()
            .zip(&self.kappa_sq)
            .map(|(&x, &k2)| (xi + self.b0 * x).powi(2) - 0.25 * k2)
            .collect()
    }
}

impl FiberOperator for EffectiveFiber {
    fn kind(&self) -> FiberKind {
        FiberKind::Effective
    }

    fn grid(&self) -> &Grid {
        &self.grid
    }

    fn confining_potential(&self, xi: f64, s: f64) -> Result<f64> {
        let (x, _) = self.profile.curve_point(s)?;
        Ok((xi + self.b0 * x).powi(2))
    }

    fn describe(&self) -> String {
        format!("effective {:?} B0={}", self.profile.family(), self.b0)
    }

    fn matrix(&self, xi: f64) -> Result<FiberMatrix> {
        self.check_confinement(xi)?;
        let q = self.potential(xi);
        let min_q = q.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(FiberMatrix {
            kind: FiberKind::Effective,
            xi,
            matrix: schrodinger_1d(self.grid.h_s(), &q),
            grid: self.grid,
            lower_bound: min_q,
            provenance: self.describe(),
        })
    }
}

/// Iwatsuka fiber `h_Iw[xi] = -d_x^2 + (xi + A_y(x))^2 + W(x)` on `[-L, L]`.
#[derive(Debug, Clone)]
pub struct IwatsukaFiber {
    spec: IwatsukaSpec,
    grid: Grid,
    vector_potential: Vec<f64>,
    w: Vec<f64>,
}

impl IwatsukaFiber {
    pub fn new(spec: &IwatsukaSpec, grid: Grid) -> Result<Self> {
        grid.validate_s()?;
        let x = grid.s_nodes();
        let vector_potential = spec.vector_potential_at(&x)?;
        let w = x.iter().map(|&t| spec.potential(t)).collect();
        Ok(IwatsukaFiber {
            spec: spec.clone(),
            grid,
            vector_potential,
            w,
        })
    }

    pub fn potential(&self, xi: f64) -> Vec<f64> {
        self.vector_potential
            .iter()
            .zip(&self.w)
            .map(|(&ay, &w)| (xi + ay).powi(2) + w)
            .collect()
    }
}

impl FiberOperator for IwatsukaFiber {
    fn kind(&self) -> FiberKind {
        FiberKind::Iwatsuka
    }

    fn grid(&self) -> &Grid {
        &self.grid
    }

    fn confining_potential(&self, xi: f64, s: f64) -> Result<f64> {
        let ay = self.spec.vector_potential_at(&[s])?;
        Ok((xi + ay[0]).powi(2))
    }

    fn interior_minimum(&self, xi: f64, l: f64) -> Result<f64> {
        const SAMPLES: usize = 401;
        let xs: Vec<f64> = (0..SAMPLES)
            .map(|i| -l + 2.0 * l * i as f64 / (SAMPLES - 1) as f64)
            .collect();
        let ay = self.spec.vector_potential_at(&xs)?;
        Ok(ay.iter().map(|&v| (xi + v).powi(2)).fold(f64::INFINITY, f64::min))
    }

    fn describe(&self) -> String {
        format!("iwatsuka B0={}", self.spec.b0)
    }

    fn matrix(&self, xi: f64) -> Result<FiberMatrix> {
        self.check_confinement(xi)?;
        let q = self.potential(xi);
        let min_q = q.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(FiberMatrix {
            kind: FiberKind::Iwatsuka,
            xi,
            matrix: schrodinger_1d(self.grid.h_s(), &q),
            grid: self.grid,
            lower_bound: min_q,
            provenance: self.describe(),
        })
    }
}

pub fn assemble_fiber(layer: &LayerConfig, xi: f64, grid: Grid) -> Result<FiberMatrix> {
    FullFiber::new(layer, grid)?.matrix(xi)
}

pub fn assemble_halfplane(alpha: f64, b0: f64, a: f64, grid: Grid) -> Result<FiberMatrix> {
    HalfPlaneFiber::new(alpha, b0, a, grid)?.matrix(0.0)
}

pub fn assemble_transverse(xi: f64, b0: f64, a: f64, grid: Grid) -> Result<FiberMatrix> {
    TransverseFiber::new(b0, a, grid)?.matrix(xi)
}

pub fn assemble_effective(profile: &CurveProfile, b0: f64, xi: f64, grid: Grid) -> Result<FiberMatrix> {
    EffectiveFiber::new(profile, b0, grid)?.matrix(xi)
}

pub fn assemble_iwatsuka(spec: &IwatsukaSpec, xi: f64, grid: Grid) -> Result<FiberMatrix> {
    IwatsukaFiber::new(spec, grid)?.matrix(xi)
}
