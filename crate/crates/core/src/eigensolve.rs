//! Lowest eigenpairs of assembled fibers, and a shooting-method oracle for
//! one-dimensional Schrodinger operators.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::assembly::FiberMatrix;
use crate::error::{Error, Result};
use crate::linalg::{tridiagonal_eigvec, tridiagonal_lowest, BandCholesky, SymBandMatrix};
use crate::quad::{dopri45, OdeTolerance};

/// Residual target: `||M v - lambda v|| <= RESIDUAL_TOL * (1 + |lambda|)`.
pub const RESIDUAL_TOL: f64 = 1e-9;

const SEED: u64 = 0x006d_6167_6261_6e64;

#[derive(Debug, Clone)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    /// Unit-norm eigenvectors, present when requested.
    pub vectors: Option<Vec<Vec<f64>>>,
    pub residuals: Vec<f64>,
}

/// The `k` smallest eigenvalues of `m`, ascending.
pub fn lowest_eigs(m: &FiberMatrix, k: usize) -> Result<Vec<f64>> {
    Ok(lowest_eig_pairs(m, k, false)?.values)
}

pub fn lowest_eig_pairs(m: &FiberMatrix, k: usize, want_vectors: bool) -> Result<EigenPairs> {
    lowest_band_eigs(&m.matrix, m.lower_bound, k, want_vectors)
}

/// Works on a bare banded matrix; `lower_bound` must not exceed its smallest
/// eigenvalue (it is used as the shift of the inverse iteration).
pub fn lowest_band_eigs(m: &SymBandMatrix, lower_bound: f64, k: usize, want_vectors: bool) -> Result<EigenPairs> {
    let n = m.dim();
    if k == 0 || 4 * k > n {
        return Err(Error::invalid(format!("need 1 <= k <= dim/4 (k = {k}, dim = {n})")));
    }
    if let Some((diag, off)) = m.tridiagonal_parts() {
        return tridiagonal_pairs(m, &diag, &off, k, want_vectors);
    }
    let (sigma, chol) = shifted_factor(m, lower_bound)?;
    let start = lanczos(m, &chol, sigma, k)?;
    polish(m, &chol, sigma, k, start, want_vectors)
}

fn residual(m: &SymBandMatrix, lambda: f64, v: &[f64], work: &mut [f64]) -> f64 {
    m.matvec(v, work);
    work.iter().zip(v).map(|(mv, x)| (mv - lambda * x).powi(2)).sum::<f64>().sqrt()
}

fn tridiagonal_pairs(m: &SymBandMatrix, diag: &[f64], off: &[f64], k: usize, want_vectors: bool) -> Result<EigenPairs> {
    let values = tridiagonal_lowest(diag, off, k);
    let mut work = vec![0.0; diag.len()];
    let mut vectors = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    for &lambda in &values {
        let v = tridiagonal_eigvec(diag, off, lambda);
        residuals.push(residual(m, lambda, &v, &mut work));
        vectors.push(v);
    }
    check_residuals(&values, &residuals)?;
    Ok(EigenPairs {
        values,
        vectors: want_vectors.then_some(vectors),
        residuals,
    })
}

fn check_residuals(values: &[f64], residuals: &[f64]) -> Result<()> {
    let bad: Vec<String> = values
        .iter()
        .zip(residuals)
        .filter(|(l, r)| **r > RESIDUAL_TOL * (1.0 + l.abs()))
        .map(|(l, r)| format!("lambda = {l:.10} residual = {r:.3e}"))
        .collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::Convergence {
            what: "eigensolver",
            detail: bad.join("; "),
        })
    }
}

fn shifted_factor(m: &SymBandMatrix, lower_bound: f64) -> Result<(f64, BandCholesky)> {
    let mut sigma = lower_bound - 1e-3 * (1.0 + lower_bound.abs());
    if !sigma.is_finite() {
        sigma = m.gershgorin_lower() - 1.0;
    }
    for _ in 0..4 {
        if let Ok(chol) = m.cholesky_shifted(sigma) {
            return Ok((sigma, chol));
        }
        sigma = sigma.min(m.gershgorin_lower()) - 1.0 - sigma.abs();
    }
    Err(Error::Convergence {
        what: "shift selection",
        detail: format!("no positive definite shift found below {sigma}"),
    })
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn normalize(x: &mut [f64]) -> f64 {
    let norm = dot(x, x).sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
    norm
}

fn orthogonalize(x: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for q in basis {
            let c = dot(x, q);
            x.iter_mut().zip(q).for_each(|(v, qi)| *v -= c * qi);
        }
    }
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen::<f64>() - 0.5).collect()
}

/// Shift-invert Lanczos with full reorthogonalization. Returns Ritz vectors
/// for the `k` eigenvalues closest above `sigma`.
fn lanczos(m: &SymBandMatrix, chol: &BandCholesky, sigma: f64, k: usize) -> Result<Vec<Vec<f64>>> {
    let n = m.dim();
    let max_steps = n.min((6 * k + 60).max(80));
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut q = random_vector(&mut rng, n);
    normalize(&mut q);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(max_steps);
    let mut alpha = Vec::with_capacity(max_steps);
    let mut beta: Vec<f64> = Vec::with_capacity(max_steps);
    let wanted = (k + 2).min(max_steps);
    loop {
        let mut w = q.clone();
        chol.solve_in_place(&mut w);
        let a = dot(&w, &q);
        alpha.push(a);
        basis.push(q);
        orthogonalize(&mut w, &basis);
        let b = normalize(&mut w);
        let steps = basis.len();
        let check = steps >= wanted && (steps.is_multiple_of(10) || steps == max_steps || b < 1e-14);
        if check {
            let (theta, s) = tridiagonal_dense_eig(&alpha, &beta);
            let converged = (0..wanted.min(steps)).all(|i| {
                let last = s[(steps - 1, i)].abs();
                b * last <= 1e-12 * theta[i].abs()
            });
            if converged || steps == max_steps || b < 1e-14 {
                let count = wanted.min(steps);
                let mut ritz = Vec::with_capacity(count);
                for i in 0..count {
                    let mut v = vec![0.0; n];
                    for (j, qj) in basis.iter().enumerate() {
                        let c = s[(j, i)];
                        v.iter_mut().zip(qj).for_each(|(vi, x)| *vi += c * x);
                    }
                    ritz.push(v);
                }
                let _ = sigma;
                return Ok(ritz);
            }
        }
        if b < 1e-14 {
            // invariant subspace: restart with a fresh orthogonal direction
            let mut fresh = random_vector(&mut rng, n);
            orthogonalize(&mut fresh, &basis);
            normalize(&mut fresh);
            beta.push(0.0);
            q = fresh;
        } else {
            beta.push(b);
            q = w;
        }
    }
}

/// Eigen-decomposition of the Lanczos tridiagonal, eigenvalues descending
/// (largest values of the inverted operator first).
fn tridiagonal_dense_eig(alpha: &[f64], beta: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
    let m = alpha.len();
    let mut t = DMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m, m, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Block inverse iteration with Rayleigh-Ritz until every wanted pair meets
/// the residual target. Extra random columns guard against eigenvalues the
/// single-vector Lanczos run may have missed.
fn polish(
    m: &SymBandMatrix,
    chol: &BandCholesky,
    _sigma: f64,
    k: usize,
    start: Vec<Vec<f64>>,
    want_vectors: bool,
) -> Result<EigenPairs> {
    const MIN_SWEEPS: usize = 3;
    const MAX_SWEEPS: usize = 300;
    let n = m.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x9e37_79b9);
    let mut block = start;
    let extra = 4.min(n - k);
    while block.len() < k + extra {
        block.push(random_vector(&mut rng, n));
    }
    let width = block.len();
    let mut work = vec![0.0; n];
    let mut previous = vec![f64::NAN; k];
    for sweep in 0..MAX_SWEEPS {
        if sweep > 0 {
            for v in block.iter_mut() {
                chol.solve_in_place(v);
            }
        }
        let mut ortho: Vec<Vec<f64>> = Vec::with_capacity(width);
        for mut v in block.drain(..) {
            orthogonalize(&mut v, &ortho);
            if normalize(&mut v) > 0.0 {
                ortho.push(v);
            }
        }
        while ortho.len() < width {
            let mut v = random_vector(&mut rng, n);
            orthogonalize(&mut v, &ortho);
            normalize(&mut v);
            ortho.push(v);
        }
        let mv: Vec<Vec<f64>> = ortho
            .iter()
            .map(|v| {
                let mut y = vec![0.0; n];
                m.matvec(v, &mut y);
                y
            })
            .collect();
        let proj = DMatrix::from_fn(width, width, |i, j| 0.5 * (dot(&ortho[i], &mv[j]) + dot(&ortho[j], &mv[i])));
        let eig = SymmetricEigen::new(proj);
        let mut order: Vec<usize> = (0..width).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        block = order
            .iter()
            .map(|&c| {
                let mut v = vec![0.0; n];
                for (j, qj) in ortho.iter().enumerate() {
                    let s = eig.eigenvectors[(j, c)];
                    v.iter_mut().zip(qj).for_each(|(vi, x)| *vi += s * x);
                }
                v
            })
            .collect();
        let residuals: Vec<f64> = (0..k).map(|i| residual(m, values[i], &block[i], &mut work)).collect();
        let ok = (0..k).all(|i| residuals[i] <= RESIDUAL_TOL * (1.0 + values[i].abs()));
        let stable = (0..k).all(|i| (values[i] - previous[i]).abs() <= 1e-12 * (1.0 + values[i].abs()));
        if ok && (sweep + 1 >= MIN_SWEEPS || stable && sweep > 0) {
            block.truncate(k);
            return Ok(EigenPairs {
                values: values[..k].to_vec(),
                vectors: want_vectors.then_some(block),
                residuals,
            });
        }
        previous.copy_from_slice(&values[..k]);
        if sweep + 1 == MAX_SWEEPS {
            check_residuals(&values[..k], &residuals)?;
        }
    }
    unreachable!("loop returns or errors on its final sweep")
}

/// The `k` lowest Dirichlet eigenvalues of `-psi'' + q(x) psi` on `domain`
/// by Prufer-phase shooting and bisection (absolute tolerance 1e-10).
pub fn shooting_eig_1d<F>(q: F, domain: (f64, f64), k: usize) -> Result<Vec<f64>>
where
    F: Fn(f64) -> f64,
{
    let (a, b) = domain;
    if !(b > a) || k == 0 {
        return Err(Error::invalid("shooting needs a < b and k >= 1"));
    }
    let samples = 2001;
    let (mut qmin, mut qmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..samples {
        let v = q(a + (b - a) * i as f64 / (samples - 1) as f64);
        if !v.is_finite() {
            return Err(Error::invalid("potential is not finite on the domain"));
        }
        qmin = qmin.min(v);
        qmax = qmax.max(v);
    }
    let tol = OdeTolerance {
        abs: 1e-12,
        rel: 1e-12,
        max_steps: 2_000_000,
    };
    let phase = |lambda: f64| -> Result<f64> {
        let y = dopri45(
            |x, y: &[f64; 1]| {
                let (s, c) = y[0].sin_cos();
                [c * c + (lambda - q(x)) * s * s]
            },
            a,
            b,
            [0.0],
            tol,
        )?;
        Ok(y[0])
    };
    let mut values = Vec::with_capacity(k);
    let mut lo = qmin;
    for n in 1..=k {
        let target = n as f64 * std::f64::consts::PI;
        let mut hi = qmax + (target / (b - a)).powi(2) + 1.0;
        let mut widened = 0;
        while phase(hi)? < target {
            hi = hi + (hi - lo).abs() + 1.0;
            widened += 1;
            if widened > 60 {
                return Err(Error::Bracketing {
                    what: "shooting eigenvalue",
                    lo,
                    hi,
                });
            }
        }
        let mut left = lo;
        while hi - left > 1e-11 * (1.0 + hi.abs()).min(10.0) {
            let mid = 0.5 * (left + hi);
            if phase(mid)? >= target {
                hi = mid;
            } else {
                left = mid;
            }
        }
        let value = 0.5 * (left + hi);
        values.push(value);
        lo = value;
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{assemble_halfplane, assemble_transverse, schrodinger_1d, Grid};
    use std::f64::consts::PI;

    fn laplacian(n: usize) -> SymBandMatrix {
        let h = 2.0 / (n + 1) as f64;
        schrodinger_1d(h, &vec![0.0; n])
    }

    #[test]
    fn dirichlet_laplacian_levels() {
        let m = laplacian(2000);
        let ev = lowest_band_eigs(&m, 0.0, 4, false).unwrap().values;
        for (i, v) in ev.iter().enumerate() {
            let exact = ((i + 1) as f64 * PI / 2.0).powi(2);
            assert!((v - exact).abs() < 1e-4 * exact, "{v} vs {exact}");
        }
    }

    #[test]
    fn shift_moves_spectrum_exactly() {
        let fm = assemble_transverse(0.3, 1.0, 1.0, Grid::transverse(200)).unwrap();
        let base = lowest_eigs(&fm, 5).unwrap();
        let mut shifted = fm.clone();
        shifted.matrix.shift(2.5);
        shifted.lower_bound += 2.5;
        let moved = lowest_eigs(&shifted, 5).unwrap();
        for (x, y) in base.iter().zip(&moved) {
            assert!((y - x - 2.5).abs() < 1e-11);
        }
    }

    #[test]
    fn banded_matches_dense() {
        let fm = assemble_halfplane(0.6, 1.0, 0.5, Grid::new(6.0, 30, 10)).unwrap();
        let pairs = lowest_eig_pairs(&fm, 6, true).unwrap();
        let n = fm.dim();
        let dense = DMatrix::from_fn(n, n, |i, j| fm.matrix.get(i, j));
        let mut exact: Vec<f64> = SymmetricEigen::new(dense).eigenvalues.iter().copied().collect();
        exact.sort_by(f64::total_cmp);
        for (v, e) in pairs.values.iter().zip(&exact) {
            assert!((v - e).abs() < 1e-9 * (1.0 + e.abs()), "{v} vs {e}");
        }
        assert!(pairs.vectors.unwrap().iter().all(|v| (dot(v, v) - 1.0).abs() < 1e-10));
    }

    #[test]
    fn detects_degenerate_pairs() {
        // two uncoupled identical blocks: every eigenvalue is double
        let n = 60;
        let mut m = SymBandMatrix::zeros(2 * n, 2);
        for i in 0..n {
            for off in [0, n] {
                m.add(off + i, off + i, 2.0 + 0.01 * i as f64);
            }
        }
        let mut band = SymBandMatrix::zeros(2 * n, 2);
        for i in 0..2 * n {
            band.add(i, i, m.get(i, i));
            if i >= 2 {
                band.add(i, i - 2, -0.5);
            }
        }
        let ev = lowest_band_eigs(&band, band.gershgorin_lower(), 6, false).unwrap().values;
        let dense = DMatrix::from_fn(2 * n, 2 * n, |i, j| band.get(i, j));
        let mut exact: Vec<f64> = SymmetricEigen::new(dense).eigenvalues.iter().copied().collect();
        exact.sort_by(f64::total_cmp);
        for (v, e) in ev.iter().zip(&exact) {
            assert!((v - e).abs() < 1e-9, "{v} vs {e}");
        }
    }

    #[test]
    fn rejects_too_many_eigenvalues() {
        assert!(lowest_band_eigs(&laplacian(10), 0.0, 3, false).is_err());
    }

    #[test]
    fn shooting_free_and_harmonic() {
        let ev = shooting_eig_1d(|_| 0.0, (-1.0, 1.0), 3).unwrap();
        for (i, v) in ev.iter().enumerate() {
            assert!((v - ((i + 1) as f64 * PI / 2.0).powi(2)).abs() < 1e-8);
        }
        let ev = shooting_eig_1d(|x| 0.25 * x * x, (-1.0, 1.0), 1).unwrap();
        assert!((ev[0] - 2.5).abs() < 1e-8, "{}", ev[0]);
        let ev = shooting_eig_1d(|x| (1.7 + x).powi(2), (-10.0, 7.0), 3).unwrap();
        for (i, v) in ev.iter().enumerate() {
            assert!((v - (2 * i + 1) as f64).abs() < 1e-8, "{v}");
        }
    }
}
