//! Shared oracles for integration tests: a cyclic Jacobi eigensolver kept
//! independent of the crate's QL implementation, plus random matrix helpers.

#![allow(dead_code)]

use harper_core::linalg::{CMat, Complex64};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Eigenvalues (ascending) and eigenvectors (columns) of a dense real
/// symmetric matrix via cyclic Jacobi rotations.
pub fn jacobi_eigh(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[p][q] * m[p][q];
            }
        }
        if off < 1e-28 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[k][p];
                    let vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i][i].partial_cmp(&m[j][j]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| m[i][i]).collect();
    let vectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&j| (0..n).map(|k| v[k][j]).collect())
        .collect();
    (values, vectors)
}

/// Dense symmetric tridiagonal matrix from its off-diagonal couplings.
pub fn dense_from_couplings(couplings: &[f64]) -> Vec<Vec<f64>> {
    let n = couplings.len() + 1;
    let mut m = vec![vec![0.0; n]; n];
    for (k, &c) in couplings.iter().enumerate() {
        m[k][k + 1] = c;
        m[k + 1][k] = c;
    }
    m
}

/// Haar-ish random n x n unitary: complex Gaussian matrix orthonormalized by
/// modified Gram-Schmidt.
pub fn random_unitary(n: usize, seed: u64) -> CMat {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| Complex64::new(gauss(&mut rng), gauss(&mut rng)))
                .collect()
        })
        .collect();
    for j in 0..n {
        for i in 0..j {
            let proj: Complex64 = (0..n).map(|k| cols[i][k].conj() * cols[j][k]).sum();
            for k in 0..n {
                let d = proj * cols[i][k];
                cols[j][k] -= d;
            }
        }
        let norm: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in cols[j].iter_mut() {
            *z /= norm;
        }
    }
    let mut u = CMat::zeros(n);
    for (j, col) in cols.iter().enumerate() {
        for (i, &z) in col.iter().enumerate() {
            u.set(i, j, z);
        }
    }
    u
}

fn gauss<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller; good enough for test matrices.
    let u1: f64 = rng.random::<f64>().max(1e-12);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Random positive palindromic coupling set (length n_sites - 1, odd-center
/// mirror symmetric), for mirror-symmetry properties.
pub fn random_palindrome(n_sites: usize, seed: u64) -> Vec<f64> {
    assert!(n_sites >= 2 && n_sites % 2 == 0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = n_sites / 2 - 1;
    let head: Vec<f64> = (0..half).map(|_| rng.random_range(5.0..100.0)).collect();
    let center: f64 = rng.random_range(5.0..100.0);
    let mut all = head.clone();
    all.push(center);
    all.extend(head.iter().rev());
    all
}

/// Independent evaluation of the modulated coupling law, transcribed from
/// its definition rather than shared with the crate.
pub fn harper_coupling(kappa0: f64, b_bar: f64, phi: f64, lambda: f64, n: usize) -> f64 {
    kappa0 * (1.0 + lambda * (std::f64::consts::TAU * b_bar * n as f64 + phi).cos())
}
