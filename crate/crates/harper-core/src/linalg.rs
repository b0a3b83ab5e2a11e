//! Small dense linear algebra: a complex square matrix type and a symmetric
//! tridiagonal eigensolver (implicit-shift QL). Sized for lattice dimensions
//! in the tens, not for large-scale work.

use alloc::vec;
use alloc::vec::Vec;

pub use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    n: usize,
    a: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(n: usize) -> Self {
        CMat {
            n,
            a: vec![Complex64::ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = Complex64::ONE;
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.a[row * self.n + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, v: Complex64) {
        self.a[row * self.n + col] = v;
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut y = vec![Complex64::ZERO; n];
        for i in 0..n {
            let mut acc = Complex64::ZERO;
            for j in 0..n {
                acc += self.a[i * n + j] * x[j];
            }
            y[i] = acc;
        }
        y
    }

    pub fn mul_mat(&self, rhs: &CMat) -> CMat {
        let n = self.n;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.a[i * n + k];
                if aik == Complex64::ZERO {
                    continue;
                }
                for j in 0..n {
                    out.a[i * n + j] += aik * rhs.a[k * n + j];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> CMat {
        let n = self.n;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.a[j * n + i] = self.a[i * n + j].conj();
            }
        }
        out
    }

    /// Largest absolute element difference to another matrix.
    pub fn max_abs_diff(&self, rhs: &CMat) -> f64 {
        self.a
            .iter()
            .zip(rhs.a.iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    /// Max |(U^dagger U - I)_{ij}|.
    pub fn unitarity_error(&self) -> f64 {
        self.adjoint().mul_mat(self).max_abs_diff(&CMat::identity(self.n))
    }
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of a real symmetric
/// tridiagonal matrix given by its diagonal and subdiagonal.
///
/// Implicit-shift QL with eigenvector accumulation. `off.len()` must be
/// `diag.len() - 1`.
pub fn eigh_tridiagonal(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = diag.len();
    assert_eq!(off.len() + 1, n, "subdiagonal length must be n - 1");
    let mut d: Vec<f64> = diag.to_vec();
    // e[i] holds the subdiagonal element below row i; e[n-1] is scratch.
    let mut e: Vec<f64> = Vec::with_capacity(n);
    e.extend_from_slice(off);
    e.push(0.0);
    // vecs[j] is eigenvector column j, updated by the plane rotations.
    let mut vecs: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut col = vec![0.0; n];
            col[j] = 1.0;
            col
        })
        .collect();

    for l in 0..n {
        let mut iter = 0usize;
        loop {
            // Look for a negligible subdiagonal element to split at.
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::Contract {
                    what: "tridiagonal QL failed to converge",
                    measure: e[l].abs(),
                    tol: f64::EPSILON,
                });
            }
            // Form implicit shift.
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + copysign(r, g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    // Deflate and restart: rotation annihilated prematurely.
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                // Accumulate the rotation into columns i and i + 1.
                let (lo, hi) = vecs.split_at_mut(i + 1);
                let ci = &mut lo[i];
                let cj = &mut hi[0];
                for k in 0..n {
                    f = cj[k];
                    cj[k] = s * ci[k] + c * f;
                    ci[k] = c * ci[k] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    // Sort ascending, carrying eigenvector columns along.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).expect("finite eigenvalues"));
    let values: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let vectors: Vec<Vec<f64>> = order.iter().map(|&i| vecs[i].clone()).collect();
    Ok((values, vectors))
}

#[inline]
fn hypot(a: f64, b: f64) -> f64 {
    libm::hypot(a, b)
}

#[inline]
fn copysign(a: f64, b: f64) -> f64 {
    libm::copysign(a, b)
}
