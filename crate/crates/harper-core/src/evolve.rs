//! z-integration of the single-excitation dynamics: transfer unitaries,
//! output distributions, fidelity, boundary-state injection, and
//! adiabaticity diagnostics.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{eigh_tridiagonal, CMat, Complex64};
use crate::model::{DeviceProfile, Hamiltonian};
use crate::spectral::{self, band_trace, TrackWarning};

/// Step-density constant for the default integrator resolution: the default
/// step count over a span is ceil(this * kappa_max * span).
pub const DEFAULT_STEPS_FACTOR: f64 = 40.0;
/// Default checkpoint count for adiabaticity diagnostics.
pub const DEFAULT_CHECKPOINTS: usize = 64;

/// Input facet side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Unit-norm complex amplitude vector over the lattice sites.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeState {
    amps: Vec<Complex64>,
}

impl ModeState {
    /// Wrap amplitudes that are already normalized (norm deviation over
    /// 1e-10 is rejected).
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::EmptyCollection {
                what: "mode amplitudes",
            });
        }
        let norm2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > 1e-10 {
            return Err(Error::Contract {
                what: "mode-state normalization",
                measure: (norm2 - 1.0).abs(),
                tol: 1e-10,
            });
        }
        Ok(ModeState { amps })
    }

    /// Normalize and wrap; rejects zero vectors.
    pub fn normalized(mut amps: Vec<Complex64>) -> Result<Self> {
        let norm2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if amps.is_empty() || norm2 == 0.0 {
            return Err(Error::EmptyCollection {
                what: "mode amplitudes",
            });
        }
        let inv = 1.0 / libm::sqrt(norm2);
        for a in amps.iter_mut() {
            *a *= inv;
        }
        Ok(ModeState { amps })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        ModeState::new(amps.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn n(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Site-reversed copy (mirror image).
    pub fn site_reversed(&self) -> ModeState {
        ModeState {
            amps: self.amps.iter().rev().copied().collect(),
        }
    }

    /// Inner product <self|other>.
    pub fn overlap(&self, other: &ModeState) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Probability fraction on the outermost `edge_width` sites of one side
    /// (larger side taken).
    pub fn edge_localization(&self, edge_width: usize) -> Result<f64> {
        spectral::edge_localization_of_probs(&self.probabilities(), edge_width)
    }
}

/// Solution operator of the lattice dynamics over [z0, z1].
#[derive(Debug, Clone, PartialEq)]
pub struct TransferUnitary {
    matrix: CMat,
    z_span: (f64, f64),
    step_count: usize,
}

impl TransferUnitary {
    /// Wrap an externally assembled matrix, verifying unitarity.
    pub fn from_matrix(matrix: CMat, z_span: (f64, f64), step_count: usize) -> Result<Self> {
        let u = TransferUnitary {
            matrix,
            z_span,
            step_count,
        };
        let err = u.unitarity_error();
        if err > 1e-10 {
            return Err(Error::Contract {
                what: "transfer unitarity",
                measure: err,
                tol: 1e-10,
            });
        }
        Ok(u)
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    pub fn z_span(&self) -> (f64, f64) {
        self.z_span
    }

    pub fn step_count(&self) -> usize {
        self.step_count
    }

    /// Element U[out, in].
    pub fn element(&self, out: usize, input: usize) -> Complex64 {
        self.matrix.get(out, input)
    }

    pub fn unitarity_error(&self) -> f64 {
        self.matrix.unitarity_error()
    }

    pub fn apply(&self, input: &ModeState) -> Result<ModeState> {
        ModeState::new(self.matrix.mul_vec(input.amplitudes()))
    }

    /// Composition: `self` applied after `earlier`.
    pub fn after(&self, earlier: &TransferUnitary) -> TransferUnitary {
        TransferUnitary {
            matrix: self.matrix.mul_mat(&earlier.matrix),
            z_span: (earlier.z_span.0, self.z_span.1),
            step_count: earlier.step_count + self.step_count,
        }
    }
}

/// Non-negative site probabilities summing to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputDistribution {
    probs: Vec<f64>,
}

impl OutputDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::EmptyCollection {
                what: "probabilities",
            });
        }
        for &p in &probs {
            if !(p >= 0.0) {
                return Err(Error::Contract {
                    what: "negative probability",
                    measure: p,
                    tol: 0.0,
                });
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-8 {
            return Err(Error::Contract {
                what: "distribution normalization",
                measure: (total - 1.0).abs(),
                tol: 1e-8,
            });
        }
        Ok(OutputDistribution { probs })
    }

    pub fn n(&self) -> usize {
        self.probs.len()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    /// Sum over a 0-based site subset.
    pub fn group_probability(&self, sites: &[usize]) -> f64 {
        sites.iter().map(|&s| self.probs[s]).sum()
    }
}

/// Default step count for a span: ceil(40 * kappa_max * span), at least 1.
/// kappa_max is the largest bond coupling over the whole device.
pub fn default_steps(profile: &DeviceProfile, z0: f64, z1: f64) -> usize {
    let kmax = profile.max_coupling(201);
    let steps = libm::ceil(DEFAULT_STEPS_FACTOR * kmax * (z1 - z0));
    if steps >= 1.0 {
        steps as usize
    } else {
        1
    }
}

/// exp(-i H dz) for a tridiagonal H, via eigendecomposition (exact per step).
fn step_unitary(h: &Hamiltonian, dz: f64) -> Result<CMat> {
    let n = h.n_sites();
    let diag = alloc::vec![0.0; n];
    let (vals, vecs) = eigh_tridiagonal(&diag, h.off_diagonals())?;
    let mut u = CMat::zeros(n);
    for k in 0..n {
        let angle = vals[k] * dz;
        let phase = Complex64::new(libm::cos(angle), -libm::sin(angle));
        let v = &vecs[k];
        for i in 0..n {
            if v[i] == 0.0 {
                continue;
            }
            let row = phase * v[i];
            for j in 0..n {
                u.set(i, j, u.get(i, j) + row * v[j]);
            }
        }
    }
    Ok(u)
}

/// Propagate through a caller-supplied Hamiltonian sampler: ordered product
/// of per-step exponentials with the Hamiltonian frozen at each step
/// midpoint (second-order commutator-free scheme). The sampler must return
/// the same site count at every z.
pub fn propagate_sampled<F>(
    mut hamiltonian_at: F,
    z0: f64,
    z1: f64,
    steps: usize,
) -> Result<TransferUnitary>
where
    F: FnMut(f64) -> Result<Hamiltonian>,
{
    if !z0.is_finite() || !z1.is_finite() || !(z0 < z1) {
        return Err(Error::OutOfRange {
            param: "z span (need z0 < z1)",
            value: z1 - z0,
            lo: f64::MIN_POSITIVE,
            hi: f64::INFINITY,
        });
    }
    if steps < 1 {
        return Err(Error::OutOfRange {
            param: "steps",
            value: steps as f64,
            lo: 1.0,
            hi: f64::INFINITY,
        });
    }
    let dz = (z1 - z0) / steps as f64;
    let mut u: Option<CMat> = None;
    for s in 0..steps {
        let zm = z0 + (s as f64 + 0.5) * dz;
        let h = hamiltonian_at(zm).map_err(|e| match e {
            Error::NonFinite { param, .. } => Error::NonFinite { param, z: zm },
            other => other,
        })?;
        let step = step_unitary(&h, dz)?;
        u = Some(match u {
            None => step,
            Some(acc) => step.mul_mat(&acc),
        });
    }
    let matrix = u.expect("steps >= 1");
    let result = TransferUnitary {
        matrix,
        z_span: (z0, z1),
        step_count: steps,
    };
    let err = result.unitarity_error();
    if err > 1e-10 {
        return Err(Error::Contract {
            what: "transfer unitarity",
            measure: err,
            tol: 1e-10,
        });
    }
    Ok(result)
}

/// Transfer unitary of a device segment [z0, z1] in `steps` midpoint steps.
pub fn propagate(
    profile: &DeviceProfile,
    z0: f64,
    z1: f64,
    steps: usize,
) -> Result<TransferUnitary> {
    let length = profile.length();
    if !(0.0..=length).contains(&z0) {
        return Err(Error::OutOfRange {
            param: "z0",
            value: z0,
            lo: 0.0,
            hi: length,
        });
    }
    if !(0.0..=length).contains(&z1) {
        return Err(Error::OutOfRange {
            param: "z1",
            value: z1,
            lo: 0.0,
            hi: length,
        });
    }
    propagate_sampled(|z| profile.hamiltonian_at(z), z0, z1, steps)
}

/// Site-resolved output probabilities |U . input|^2.
pub fn single_photon_output(u: &TransferUnitary, input: &ModeState) -> Result<OutputDistribution> {
    OutputDistribution::new(u.apply(input)?.probabilities())
}

/// Bhattacharyya overlap F = sum_i sqrt(p_i q_i); 1 iff equal, 0 for
/// disjoint supports, symmetric.
pub fn fidelity(a: &OutputDistribution, b: &OutputDistribution) -> Result<f64> {
    if a.n() != b.n() {
        return Err(Error::OutOfRange {
            param: "distribution length",
            value: b.n() as f64,
            lo: a.n() as f64,
            hi: a.n() as f64,
        });
    }
    let f: f64 = a
        .probabilities()
        .iter()
        .zip(b.probabilities())
        .map(|(p, q)| libm::sqrt(p * q))
        .sum();
    Ok(f.min(1.0))
}

/// The boundary state localized on the requested side at z = 0: the
/// symmetric/antisymmetric mid-gap doublet resolved into edge combinations,
/// picked by weight on the first two sites.
pub fn boundary_injection_state(profile: &DeviceProfile, side: Side) -> Result<ModeState> {
    let (es, [lo, hi]) = spectral::identify_boundary(profile)?;
    let inv = 1.0 / libm::sqrt(2.0);
    let a: Vec<Complex64> = es
        .vector(lo)
        .iter()
        .zip(es.vector(hi))
        .map(|(x, y)| Complex64::new((x + y) * inv, 0.0))
        .collect();
    let b: Vec<Complex64> = es
        .vector(lo)
        .iter()
        .zip(es.vector(hi))
        .map(|(x, y)| Complex64::new((x - y) * inv, 0.0))
        .collect();
    let weight_left = |v: &[Complex64]| v[0].norm_sqr() + v[1].norm_sqr();
    let (left, right) = if weight_left(&a) > weight_left(&b) {
        (a, b)
    } else {
        (b, a)
    };
    match side {
        Side::Left => ModeState::normalized(left),
        Side::Right => ModeState::normalized(right),
    }
}

/// Adiabaticity diagnostic result.
#[derive(Debug, Clone, PartialEq)]
pub struct LeakageReport {
    /// Max over checkpoints of the population outside the tracked
    /// two-dimensional boundary subspace.
    pub max_leakage: f64,
    /// Leakage at every checkpoint, index 0 at z = 0.
    pub per_checkpoint: Vec<f64>,
    /// Track-assignment warnings inherited from the band trace.
    pub warnings: Vec<TrackWarning>,
}

/// Propagate `input` through the device and measure, at each of
/// `n_checkpoints` + 1 evenly spaced positions, the population that has
/// leaked out of the instantaneous boundary doublet (tracked from z = 0 by
/// eigenvector continuity).
pub fn adiabaticity_leakage(
    profile: &DeviceProfile,
    input: &ModeState,
    n_checkpoints: usize,
) -> Result<LeakageReport> {
    if n_checkpoints < 1 {
        return Err(Error::OutOfRange {
            param: "n_checkpoints",
            value: n_checkpoints as f64,
            lo: 1.0,
            hi: f64::INFINITY,
        });
    }
    let trace = band_trace(profile, n_checkpoints + 1)?;
    let tracks = trace.boundary_tracks();
    if tracks.len() != 2 {
        return Err(Error::NoBoundaryState {
            found: tracks.len(),
            lambda: profile.schedule().lambda_at(0.0),
        });
    }
    let project = |s: usize, state: &[Complex64]| -> f64 {
        let mut inside = 0.0;
        for &t in tracks {
            let v = trace.vector(s, t);
            let mut amp = Complex64::ZERO;
            for (vi, si) in v.iter().zip(state) {
                amp += vi * si;
            }
            inside += amp.norm_sqr();
        }
        1.0 - inside
    };

    let mut state: Vec<Complex64> = input.amplitudes().to_vec();
    let mut per_checkpoint = Vec::with_capacity(n_checkpoints + 1);
    per_checkpoint.push(project(0, &state));
    if per_checkpoint[0] > 1e-6 {
        return Err(Error::Contract {
            what: "input outside the z = 0 boundary subspace",
            measure: per_checkpoint[0],
            tol: 1e-6,
        });
    }
    let zs = trace.z_samples().to_vec();
    let mut max_leakage = 0.0f64;
    for s in 1..zs.len() {
        let steps = default_steps(profile, zs[s - 1], zs[s]);
        let u = propagate(profile, zs[s - 1], zs[s], steps)?;
        state = u.matrix().mul_vec(&state);
        let leak = project(s, &state);
        per_checkpoint.push(leak);
        max_leakage = max_leakage.max(leak);
    }
    Ok(LeakageReport {
        max_leakage,
        per_checkpoint,
        warnings: trace.warnings().to_vec(),
    })
}

/// Propagate and record |psi|^2 at `n_samples` evenly spaced positions
/// (both ends included). Returns (z samples, per-sample probability rows).
pub fn intensity_map(
    profile: &DeviceProfile,
    input: &ModeState,
    n_samples: usize,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    if n_samples < 2 {
        return Err(Error::OutOfRange {
            param: "n_samples",
            value: n_samples as f64,
            lo: 2.0,
            hi: f64::INFINITY,
        });
    }
    let length = profile.length();
    let zs: Vec<f64> = (0..n_samples)
        .map(|i| length * i as f64 / (n_samples - 1) as f64)
        .collect();
    let mut state: Vec<Complex64> = input.amplitudes().to_vec();
    let mut rows = Vec::with_capacity(n_samples);
    rows.push(state.iter().map(|a| a.norm_sqr()).collect::<Vec<f64>>());
    for s in 1..n_samples {
        let steps = default_steps(profile, zs[s - 1], zs[s]);
        let u = propagate(profile, zs[s - 1], zs[s], steps)?;
        state = u.matrix().mul_vec(&state);
        rows.push(state.iter().map(|a| a.norm_sqr()).collect());
    }
    Ok((zs, rows))
}
