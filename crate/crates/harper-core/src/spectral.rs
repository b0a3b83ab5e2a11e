//! Instantaneous eigensystems, band structure along z, spectral gaps, and
//! boundary-state localization diagnostics.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::eigh_tridiagonal;
use crate::model::{DeviceProfile, Hamiltonian};

/// Edge width used when flagging boundary states.
pub const BOUNDARY_EDGE_WIDTH: usize = 2;
/// A state whose combined weight on the two outer site pairs exceeds this is
/// flagged as a boundary state. Extended standing waves of a short uniform
/// chain reach 0.57 on that measure while the in-gap doublet sits near 0.9,
/// so the cut is placed between them.
pub const BOUNDARY_WEIGHT_THRESHOLD: f64 = 0.7;

/// Eigenvalues (ascending, 1/cm) and orthonormal real eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    values: Vec<f64>,
    vectors: Vec<Vec<f64>>,
}

impl EigenSystem {
    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn vector(&self, i: usize) -> &[f64] {
        &self.vectors[i]
    }
}

/// Full eigensystem of a tridiagonal lattice Hamiltonian.
///
/// For palindromic Hamiltonians, eigenvectors inside a (near-)degenerate
/// cluster are recombined into definite-parity vectors under site reversal,
/// and every eigenvector's sign is fixed so its largest-magnitude component
/// is positive. This makes the output deterministic and mirror-classifiable.
pub fn eigensystem(h: &Hamiltonian) -> Result<EigenSystem> {
    let n = h.n_sites();
    let diag = alloc::vec![0.0; n];
    let (values, mut vectors) = eigh_tridiagonal(&diag, h.off_diagonals())?;
    if is_palindromic(h.off_diagonals()) {
        mirror_clusters(h, &values, &mut vectors);
    }
    for v in &mut vectors {
        fix_sign(v);
    }
    Ok(EigenSystem { values, vectors })
}

fn is_palindromic(off: &[f64]) -> bool {
    let m = off.len();
    (0..m / 2).all(|k| off[k] == off[m - 1 - k])
}

fn fix_sign(v: &mut [f64]) {
    let mut best = 0usize;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

fn reversed(v: &[f64]) -> Vec<f64> {
    v.iter().rev().copied().collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn rayleigh(h: &Hamiltonian, v: &[f64]) -> f64 {
    let off = h.off_diagonals();
    let mut acc = 0.0;
    for (k, kappa) in off.iter().enumerate() {
        acc += 2.0 * kappa * v[k] * v[k + 1];
    }
    acc
}

/// Recombine eigenvectors within near-degenerate eigenvalue clusters into
/// vectors of definite parity under site reversal, re-paired with the cluster
/// eigenvalues by Rayleigh quotient. Clusters wider than machine degeneracy
/// are included so parity stays clean down to the mirror-test tolerance.
fn mirror_clusters(h: &Hamiltonian, values: &[f64], vectors: &mut [Vec<f64>]) {
    let n = values.len();
    let scale = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if scale == 0.0 {
        return;
    }
    let tol = 1e-7 * scale;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[end] - values[end - 1] < tol {
            end += 1;
        }
        if end - start > 1 {
            rebuild_cluster(h, &mut vectors[start..end]);
        }
        start = end;
    }
}

fn rebuild_cluster(h: &Hamiltonian, cluster: &mut [Vec<f64>]) {
    let size = cluster.len();
    // Symmetric parts first, then antisymmetric, orthonormalized greedily.
    let mut rebuilt: Vec<Vec<f64>> = Vec::with_capacity(size);
    for parity in [1.0, -1.0] {
        for v in cluster.iter() {
            if rebuilt.len() == size {
                break;
            }
            let r = reversed(v);
            let mut cand: Vec<f64> = v
                .iter()
                .zip(&r)
                .map(|(a, b)| 0.5 * (a + parity * b))
                .collect();
            for prev in &rebuilt {
                let c = dot(&cand, prev);
                for (x, p) in cand.iter_mut().zip(prev) {
                    *x -= c * p;
                }
            }
            let norm = libm::sqrt(dot(&cand, &cand));
            if norm > 1e-6 {
                for x in cand.iter_mut() {
                    *x /= norm;
                }
                rebuilt.push(cand);
            }
        }
    }
    if rebuilt.len() != size {
        // Parity decomposition degenerated; keep the solver's vectors.
        return;
    }
    // Pair rebuilt vectors with the ascending cluster eigenvalues.
    rebuilt.sort_by(|a, b| {
        rayleigh(h, a)
            .partial_cmp(&rayleigh(h, b))
            .expect("finite Rayleigh quotients")
    });
    for (slot, v) in cluster.iter_mut().zip(rebuilt) {
        *slot = v;
    }
}

/// Probability fraction on the `edge_width` outermost sites of one side,
/// taking the larger of the two sides. Uniform states score
/// edge_width / n_sites; a state pinned to one edge scores 1.
pub fn edge_localization(state: &[f64], edge_width: usize) -> Result<f64> {
    let probs: Vec<f64> = state.iter().map(|a| a * a).collect();
    edge_localization_of_probs(&probs, edge_width)
}

pub(crate) fn edge_localization_of_probs(probs: &[f64], edge_width: usize) -> Result<f64> {
    let n = probs.len();
    if n == 0 {
        return Err(Error::EmptyCollection {
            what: "state amplitudes",
        });
    }
    if edge_width < 1 || edge_width > n / 2 {
        return Err(Error::OutOfRange {
            param: "edge_width",
            value: edge_width as f64,
            lo: 1.0,
            hi: (n / 2) as f64,
        });
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-8 {
        return Err(Error::Contract {
            what: "state normalization",
            measure: (total - 1.0).abs(),
            tol: 1e-8,
        });
    }
    let left: f64 = probs[..edge_width].iter().sum();
    let right: f64 = probs[n - edge_width..].iter().sum();
    Ok(left.max(right))
}

pub(crate) fn edge_weight_two_sided(v: &[f64], width: usize) -> f64 {
    let n = v.len();
    let left: f64 = v[..width].iter().map(|a| a * a).sum();
    let right: f64 = v[n - width..].iter().map(|a| a * a).sum();
    left + right
}

/// Indices of flagged boundary states: positive eigenvalue with combined
/// two-edge weight above the threshold. Ascending; empty for gapless
/// lattices. The negative-eigenvalue partners are the chiral images of these
/// and are not listed separately.
pub fn boundary_candidates(es: &EigenSystem) -> Vec<usize> {
    (0..es.n())
        .filter(|&i| {
            es.values[i] > 0.0
                && edge_weight_two_sided(&es.vectors[i], BOUNDARY_EDGE_WIDTH)
                    > BOUNDARY_WEIGHT_THRESHOLD
        })
        .collect()
}

/// The boundary doublet of a device at z = 0: the eigensystem together with
/// the two flagged state indices. Errors when the count differs from two
/// (e.g. modulation too weak to open a gap).
pub fn identify_boundary(profile: &DeviceProfile) -> Result<(EigenSystem, [usize; 2])> {
    let es = eigensystem(&profile.hamiltonian_at(0.0)?)?;
    let c = boundary_candidates(&es);
    if c.len() == 2 {
        let pair = [c[0], c[1]];
        Ok((es, pair))
    } else {
        Err(Error::NoBoundaryState {
            found: c.len(),
            lambda: profile.schedule().lambda_at(0.0),
        })
    }
}

/// Minimum distance from any flagged boundary eigenvalue to the nearest bulk
/// eigenvalue; 0 when the boundary set is empty.
pub fn gap_at(es: &EigenSystem, boundary: &[usize]) -> f64 {
    if boundary.is_empty() {
        return 0.0;
    }
    let mut gap = f64::INFINITY;
    for &b in boundary {
        let lb = es.values[b];
        for (i, l) in es.values.iter().enumerate() {
            if !boundary.contains(&i) {
                gap = gap.min((lb - l).abs());
            }
        }
    }
    if gap.is_finite() {
        gap
    } else {
        0.0
    }
}

/// A low-confidence track assignment: the best eigenvector overlap for this
/// track fell below 0.5 at this sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackWarning {
    pub sample_index: usize,
    pub track: usize,
    pub overlap: f64,
}

/// Eigenvalue curves along z, stitched by eigenvector continuity.
///
/// Track t starts as the t-th ascending eigenvalue at z = 0 and then follows
/// its eigenvector, so tracks may cross in eigenvalue. `boundary_tracks`
/// lists the tracks flagged as boundary states at z = 0 (identification is
/// not repeated at later z, where the states may delocalize).
#[derive(Debug, Clone, PartialEq)]
pub struct BandTrace {
    z_samples: Vec<f64>,
    tracks: Vec<Vec<f64>>,
    vectors: Vec<Vec<Vec<f64>>>,
    boundary_tracks: Vec<usize>,
    warnings: Vec<TrackWarning>,
}

impl BandTrace {
    pub fn n_samples(&self) -> usize {
        self.z_samples.len()
    }

    pub fn n_tracks(&self) -> usize {
        self.tracks.len()
    }

    pub fn z_samples(&self) -> &[f64] {
        &self.z_samples
    }

    /// Eigenvalue curve of track `t`, one value per z sample.
    pub fn track(&self, t: usize) -> &[f64] {
        &self.tracks[t]
    }

    /// Tracked eigenvector of track `t` at sample `s`, sign-aligned with the
    /// previous sample.
    pub fn vector(&self, s: usize, t: usize) -> &[f64] {
        &self.vectors[s][t]
    }

    pub fn boundary_tracks(&self) -> &[usize] {
        &self.boundary_tracks
    }

    pub fn warnings(&self) -> &[TrackWarning] {
        &self.warnings
    }
}

/// Sweep the device over `n_samples` evenly spaced z positions and stitch
/// eigenvalue tracks by maximum eigenvector overlap (ties broken by
/// eigenvalue proximity). Assignments with best overlap below 0.5 are
/// recorded as warnings but still emitted.
pub fn band_trace(profile: &DeviceProfile, n_samples: usize) -> Result<BandTrace> {
    if n_samples < 2 {
        return Err(Error::OutOfRange {
            param: "n_samples",
            value: n_samples as f64,
            lo: 2.0,
            hi: f64::INFINITY,
        });
    }
    let n = profile.n_sites();
    let length = profile.length();
    let z_samples: Vec<f64> = (0..n_samples)
        .map(|i| length * i as f64 / (n_samples - 1) as f64)
        .collect();

    let es0 = eigensystem(&profile.hamiltonian_at(z_samples[0])?)?;
    let boundary_tracks = boundary_candidates(&es0);
    let mut tracks: Vec<Vec<f64>> = (0..n)
        .map(|t| {
            let mut curve = Vec::with_capacity(n_samples);
            curve.push(es0.values[t]);
            curve
        })
        .collect();
    let mut vectors: Vec<Vec<Vec<f64>>> = Vec::with_capacity(n_samples);
    vectors.push(es0.vectors.clone());
    let mut warnings = Vec::new();

    for (s, &z) in z_samples.iter().enumerate().skip(1) {
        let es = eigensystem(&profile.hamiltonian_at(z)?)?;
        let prev = &vectors[s - 1];
        let assignment = assign_tracks(prev, &tracks, &es);
        let mut snapshot: Vec<Vec<f64>> = Vec::with_capacity(n);
        for (t, &(j, flip, overlap)) in assignment.iter().enumerate() {
            tracks[t].push(es.values[j]);
            let mut v = es.vectors[j].clone();
            if flip {
                for x in v.iter_mut() {
                    *x = -*x;
                }
            }
            snapshot.push(v);
            if overlap < 0.5 {
                warnings.push(TrackWarning {
                    sample_index: s,
                    track: t,
                    overlap,
                });
            }
        }
        vectors.push(snapshot);
    }

    Ok(BandTrace {
        z_samples,
        tracks,
        vectors,
        boundary_tracks,
        warnings,
    })
}

/// Greedy global assignment of current eigenvectors to tracks: repeatedly
/// take the unassigned (track, eigenvector) pair of largest |overlap|,
/// breaking near-ties by eigenvalue proximity. Returns per-track
/// (eigen index, sign flip, overlap).
fn assign_tracks(
    prev: &[Vec<f64>],
    tracks: &[Vec<f64>],
    es: &EigenSystem,
) -> Vec<(usize, bool, f64)> {
    let n = prev.len();
    let mut raw = alloc::vec![0.0f64; n * n];
    for (t, pv) in prev.iter().enumerate() {
        for j in 0..n {
            raw[t * n + j] = dot(pv, &es.vectors[j]);
        }
    }
    let mut out = alloc::vec![(usize::MAX, false, 0.0f64); n];
    let mut track_done = alloc::vec![false; n];
    let mut eig_done = alloc::vec![false; n];
    for _ in 0..n {
        let mut best: Option<(usize, usize)> = None;
        for t in 0..n {
            if track_done[t] {
                continue;
            }
            let lam_prev = *tracks[t].last().expect("non-empty track");
            for j in 0..n {
                if eig_done[j] {
                    continue;
                }
                let ov = raw[t * n + j].abs();
                let better = match best {
                    None => true,
                    Some((bt, bj)) => {
                        let bov = raw[bt * n + bj].abs();
                        if (ov - bov).abs() > 1e-12 {
                            ov > bov
                        } else {
                            let bl = *tracks[bt].last().expect("non-empty track");
                            (lam_prev - es.values[j]).abs() < (bl - es.values[bj]).abs()
                        }
                    }
                };
                if better {
                    best = Some((t, j));
                }
            }
        }
        let (t, j) = best.expect("assignment exhausts all tracks");
        track_done[t] = true;
        eig_done[j] = true;
        out[t] = (j, raw[t * n + j] < 0.0, raw[t * n + j].abs());
    }
    out
}
