//! Symmetric banded storage, banded Cholesky, and tridiagonal Sturm
//! sequences.

use crate::error::{Error, Result};

/// Real symmetric matrix stored by its lower band.
///
/// Entry `(i, i - d)` for `0 <= d <= bandwidth` lives at
/// `data[i * (bandwidth + 1) + d]`; entries that would fall before column 0
/// are kept as zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct SymBandMatrix {
    n: usize,
    bandwidth: usize,
    data: Vec<f64>,
}

impl SymBandMatrix {
    pub fn zeros(n: usize, bandwidth: usize) -> Self {
        SymBandMatrix {
            n,
            bandwidth,
            data: vec![0.0; n * (bandwidth + 1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        let d = r - c;
        (d <= self.bandwidth && r < self.n).then(|| r * (self.bandwidth + 1) + d)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |k| self.data[k])
    }

    /// Adds `v` to entries `(i, j)` and `(j, i)` (once on the diagonal).
    ///
    /// Panics when `(i, j)` lies outside the band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.slot(i, j).expect("entry outside the band");
        self.data[k] += v;
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.data[i * (self.bandwidth + 1)]).collect()
    }

    /// Adds `c` to every diagonal entry.
    pub fn shift(&mut self, c: f64) {
        for i in 0..self.n {
            self.data[i * (self.bandwidth + 1)] += c;
        }
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        let w = self.bandwidth + 1;
        y.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..self.n {
            let row = &self.data[i * w..(i + 1) * w];
            let mut acc = row[0] * x[i];
            for d in 1..=self.bandwidth.min(i) {
                let a = row[d];
                if a != 0.0 {
                    acc += a * x[i - d];
                    y[i - d] += a * x[i];
                }
            }
            y[i] += acc;
        }
    }

    /// Gershgorin lower bound on the spectrum.
    pub fn gershgorin_lower(&self) -> f64 {
        let mut radius = vec![0.0; self.n];
        let w = self.bandwidth + 1;
        for i in 0..self.n {
            for d in 1..=self.bandwidth.min(i) {
                let a = self.data[i * w + d].abs();
                radius[i] += a;
                radius[i - d] += a;
            }
        }
        (0..self.n)
            .map(|i| self.data[i * w] - radius[i])
            .fold(f64::INFINITY, f64::min)
    }

    /// Gershgorin upper bound on the spectrum.
    pub fn gershgorin_upper(&self) -> f64 {
        let mut radius = vec![0.0; self.n];
        let w = self.bandwidth + 1;
        for i in 0..self.n {
            for d in 1..=self.bandwidth.min(i) {
                let a = self.data[i * w + d].abs();
                radius[i] += a;
                radius[i - d] += a;
            }
        }
        (0..self.n)
            .map(|i| self.data[i * w] + radius[i])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Splits a tridiagonal matrix into `(diagonal, off-diagonal)`.
    pub fn tridiagonal_parts(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        if self.bandwidth != 1 {
            return None;
        }
        let diag = self.diagonal();
        let off = (1..self.n).map(|i| self.data[i * 2 + 1]).collect();
        Some((diag, off))
    }

    /// Cholesky factor `L` of `self - sigma I`, in the same banded layout.
    pub fn cholesky_shifted(&self, sigma: f64) -> Result<BandCholesky> {
        let n = self.n;
        let bw = self.bandwidth;
        let w = bw + 1;
        let mut l = self.data.clone();
        for i in 0..n {
            l[i * w] -= sigma;
        }
        for i in 0..n {
            let jmin = i.saturating_sub(bw);
            for j in jmin..=i {
                let kmin = jmin.max(j.saturating_sub(bw));
                let mut sum = l[i * w + (i - j)];
                for k in kmin..j {
                    sum -= l[i * w + (i - k)] * l[j * w + (j - k)];
                }
                if i == j {
                    if !(sum > 0.0) {
                        return Err(Error::Convergence {
                            what: "banded Cholesky",
                            detail: format!("non-positive pivot {sum:.3e} at row {i}; shift {sigma} is not below the spectrum"),
                        });
                    }
                    l[i * w] = sum.sqrt();
                } else {
                    l[i * w + (i - j)] = sum / l[j * w];
                }
            }
        }
        Ok(BandCholesky { n, bandwidth: bw, l })
    }
}

/// Lower-triangular banded Cholesky factor.
#[derive(Debug, Clone)]
pub struct BandCholesky {
    n: usize,
    bandwidth: usize,
    l: Vec<f64>,
}

impl BandCholesky {
    /// Solves `L L^T x = b` in place.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        let w = self.bandwidth + 1;
        for i in 0..self.n {
            let mut s = x[i];
            for d in 1..=self.bandwidth.min(i) {
                s -= self.l[i * w + d] * x[i - d];
            }
            x[i] = s / self.l[i * w];
        }
        for i in (0..self.n).rev() {
            x[i] /= self.l[i * w];
            let xi = x[i];
            for d in 1..=self.bandwidth.min(i) {
                x[i - d] -= self.l[i * w + d] * xi;
            }
        }
    }
}

/// Number of eigenvalues of the symmetric tridiagonal matrix strictly below `x`.
pub fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0;
    for i in 0..diag.len() {
        let b2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        d = diag[i] - x - if i == 0 { 0.0 } else { b2 / d };
        if d == 0.0 {
            d = -f64::EPSILON * (diag[i].abs() + x.abs() + f64::MIN_POSITIVE);
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// The `k` smallest eigenvalues of a symmetric tridiagonal matrix by Sturm
/// bisection, ascending.
pub fn tridiagonal_lowest(diag: &[f64], off: &[f64], k: usize) -> Vec<f64> {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 } + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    let mut out = Vec::with_capacity(k);
    let mut left = lo;
    for idx in 0..k.min(n) {
        let (mut a, mut b) = (left, hi);
        while b - a > 2.0 * f64::EPSILON * a.abs().max(b.abs()) + f64::MIN_POSITIVE {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if sturm_count(diag, off, mid) > idx {
                b = mid;
            } else {
                a = mid;
            }
        }
        let value = 0.5 * (a + b);
        out.push(value);
        left = a;
    }
    out
}

/// Eigenvector of a symmetric tridiagonal matrix for a computed eigenvalue,
/// by inverse iteration with partial pivoting.
pub fn tridiagonal_eigvec(diag: &[f64], off: &[f64], lambda: f64) -> Vec<f64> {
    let n = diag.len();
    let scale = diag.iter().map(|v| v.abs()).fold(0.0, f64::max) + off.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let shift = lambda + 1e-13 * scale.max(1.0);
    // start vector with all components nonzero
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7919) % 13) as f64).collect();
    for _ in 0..3 {
        x = solve_tridiagonal_pivoted(diag, off, shift, &x);
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        x.iter_mut().for_each(|v| *v /= norm);
    }
    x
}

fn solve_tridiagonal_pivoted(diag: &[f64], off: &[f64], shift: f64, rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    if n == 1 {
        let d = diag[0] - shift;
        return vec![rhs[0] / if d == 0.0 { f64::EPSILON } else { d }];
    }
    // rows hold (u0, u1, u2): diagonal and two super-diagonals after pivoting
    let mut u0 = vec![0.0; n];
    let mut u1 = vec![0.0; n];
    let mut u2 = vec![0.0; n];
    let mut b = rhs.to_vec();
    let mut cur_d = diag[0] - shift;
    let mut cur_u = off[0];
    for i in 0..n - 1 {
        let sub = off[i];
        let next_d = diag[i + 1] - shift;
        let next_u = if i + 2 < n { off[i + 1] } else { 0.0 };
        if cur_d.abs() >= sub.abs() {
            let piv = if cur_d == 0.0 { f64::EPSILON } else { cur_d };
            let m = sub / piv;
            u0[i] = piv;
            u1[i] = cur_u;
            u2[i] = 0.0;
            b[i + 1] -= m * b[i];
            cur_d = next_d - m * cur_u;
            cur_u = next_u;
        } else {
            let m = cur_d / sub;
            u0[i] = sub;
            u1[i] = next_d;
            u2[i] = next_u;
            b.swap(i, i + 1);
            b[i + 1] -= m * b[i];
            cur_d = cur_u - m * next_d;
            cur_u = -m * next_u;
        }
    }
    u0[n - 1] = if cur_d == 0.0 { f64::EPSILON } else { cur_d };
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = b[i];
        if i + 1 < n {
            s -= u1[i] * x[i + 1];
        }
        if i + 2 < n {
            s -= u2[i] * x[i + 2];
        }
        x[i] = s / u0[i];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn random_band(n: usize, bw: usize, seed: u64) -> SymBandMatrix {
        let mut m = SymBandMatrix::zeros(n, bw);
        let mut state = seed;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        for i in 0..n {
            for d in 0..=bw.min(i) {
                m.add(i, i - d, next());
            }
            m.add(i, i, 3.0 * bw as f64);
        }
        m
    }

    fn dense(m: &SymBandMatrix) -> DMatrix<f64> {
        DMatrix::from_fn(m.dim(), m.dim(), |i, j| m.get(i, j))
    }

    #[test]
    fn matvec_matches_dense() {
        let m = random_band(23, 4, 7);
        let d = dense(&m);
        let x: Vec<f64> = (0..23).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut y = vec![0.0; 23];
        m.matvec(&x, &mut y);
        let yd = &d * nalgebra::DVector::from_vec(x);
        for i in 0..23 {
            assert!((y[i] - yd[i]).abs() < 1e-12);
        }
        assert_eq!(d, d.transpose());
    }

    #[test]
    fn cholesky_solves() {
        let m = random_band(31, 5, 3);
        let chol = m.cholesky_shifted(0.5).unwrap();
        let b: Vec<f64> = (0..31).map(|i| 1.0 + i as f64).collect();
        let mut x = b.clone();
        chol.solve_in_place(&mut x);
        let mut shifted = m.clone();
        shifted.shift(-0.5);
        let mut r = vec![0.0; 31];
        shifted.matvec(&x, &mut r);
        for i in 0..31 {
            assert!((r[i] - b[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn cholesky_refuses_shift_above_spectrum() {
        let m = random_band(10, 2, 1);
        assert!(m.cholesky_shifted(m.gershgorin_upper() + 1.0).is_err());
    }

    #[test]
    fn sturm_bisection_matches_dense() {
        let m = random_band(40, 1, 11);
        let (d, o) = m.tridiagonal_parts().unwrap();
        let mut full = nalgebra::SymmetricEigen::new(dense(&m)).eigenvalues.as_slice().to_vec();
        full.sort_by(f64::total_cmp);
        let low = tridiagonal_lowest(&d, &o, 6);
        for i in 0..6 {
            assert!((low[i] - full[i]).abs() < 1e-12, "{} vs {}", low[i], full[i]);
        }
        let v = tridiagonal_eigvec(&d, &o, low[2]);
        let mut mv = vec![0.0; 40];
        m.matvec(&v, &mut mv);
        let res: f64 = mv.iter().zip(&v).map(|(a, b)| (a - low[2] * b).powi(2)).sum::<f64>().sqrt();
        assert!(res < 1e-10, "residual {res}");
    }
}
