//! Two-photon interference through the device unitary: coincidence
//! probabilities with partial distinguishability, a brute-force Fock-space
//! oracle, HOM curves, visibility extraction, grouped reflectivity, and
//! Poissonian counting simulation.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_distr::Distribution;

use crate::error::{Error, Result};
use crate::evolve::{ModeState, TransferUnitary};
use crate::linalg::Complex64;

/// Collected output port groups, 0-based site indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PortGroups {
    left: Vec<usize>,
    right: Vec<usize>,
}

impl PortGroups {
    /// Groups must be non-empty, internally duplicate-free, and disjoint.
    pub fn new(left: Vec<usize>, right: Vec<usize>) -> Result<Self> {
        if left.is_empty() || right.is_empty() {
            return Err(Error::EmptyCollection {
                what: "collected port group",
            });
        }
        let duplicated = |g: &[usize]| {
            (0..g.len()).any(|a| (a + 1..g.len()).any(|b| g[a] == g[b]))
        };
        if duplicated(&left) || duplicated(&right) || left.iter().any(|s| right.contains(s)) {
            return Err(Error::Contract {
                what: "port groups must be disjoint and duplicate-free",
                measure: 0.0,
                tol: 0.0,
            });
        }
        Ok(PortGroups { left, right })
    }

    /// The outer port pairs {0, 1} and {n-2, n-1}.
    pub fn edge_defaults(n_sites: usize) -> PortGroups {
        PortGroups {
            left: alloc::vec![0, 1],
            right: alloc::vec![n_sites - 2, n_sites - 1],
        }
    }

    pub fn left(&self) -> &[usize] {
        &self.left
    }

    pub fn right(&self) -> &[usize] {
        &self.right
    }

    fn check_range(&self, n: usize) -> Result<()> {
        for &s in self.left.iter().chain(&self.right) {
            if s >= n {
                return Err(Error::OutOfRange {
                    param: "collected port index",
                    value: s as f64,
                    lo: 0.0,
                    hi: (n - 1) as f64,
                });
            }
        }
        Ok(())
    }
}

/// The two single-photon inputs: site-basis ports or arbitrary mode states.
/// States must be mutually orthogonal (the pairwise coincidence formula
/// assumes two distinct modes).
#[derive(Debug, Clone, PartialEq)]
pub enum TwoPhotonInput {
    Ports(usize, usize),
    States(ModeState, ModeState),
}

impl TwoPhotonInput {
    /// Output-side single-photon amplitude vectors (U applied to each input).
    fn resolve(&self, u: &TransferUnitary) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        let n = u.n();
        match self {
            TwoPhotonInput::Ports(i, j) => {
                if *i == *j {
                    return Err(Error::Contract {
                        what: "input ports must be distinct",
                        measure: *i as f64,
                        tol: 0.0,
                    });
                }
                for &p in [i, j] {
                    if p >= n {
                        return Err(Error::OutOfRange {
                            param: "input port",
                            value: p as f64,
                            lo: 0.0,
                            hi: (n - 1) as f64,
                        });
                    }
                }
                let col = |p: usize| (0..n).map(|k| u.element(k, p)).collect();
                Ok((col(*i), col(*j)))
            }
            TwoPhotonInput::States(a, b) => {
                if a.n() != n || b.n() != n {
                    return Err(Error::OutOfRange {
                        param: "input state length",
                        value: a.n() as f64,
                        lo: n as f64,
                        hi: n as f64,
                    });
                }
                let ov = a.overlap(b).norm();
                if ov > 1e-8 {
                    return Err(Error::Contract {
                        what: "input states must be orthogonal",
                        measure: ov,
                        tol: 1e-8,
                    });
                }
                Ok((
                    u.matrix().mul_vec(a.amplitudes()),
                    u.matrix().mul_vec(b.amplitudes()),
                ))
            }
        }
    }
}

fn check_overlap(x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfRange {
            param: "overlap x",
            value: x,
            lo: 0.0,
            hi: 1.0,
        });
    }
    Ok(())
}

/// Coincidence probability for one unordered output pair given the two
/// output-side amplitude vectors: permanent-squared for the
/// indistinguishable part, classical sum for the distinguishable part, and
/// the bosonic bunching weight on diagonal pairs.
fn pair_probability(u: &[Complex64], v: &[Complex64], k: usize, l: usize, x: f64) -> f64 {
    if k == l {
        let amp = (u[k] * v[k]).norm_sqr();
        x * 2.0 * amp + (1.0 - x) * amp
    } else {
        let quantum = (u[k] * v[l] + u[l] * v[k]).norm_sqr();
        let classical = (u[k] * v[l]).norm_sqr() + (u[l] * v[k]).norm_sqr();
        x * quantum + (1.0 - x) * classical
    }
}

/// Probability of detecting one photon in `out_ports.0` and one in
/// `out_ports.1` (distinct), for photons of mode overlap `x`.
pub fn two_photon_coincidence(
    u: &TransferUnitary,
    input: &TwoPhotonInput,
    out_ports: (usize, usize),
    x: f64,
) -> Result<f64> {
    check_overlap(x)?;
    let n = u.n();
    let (k, l) = out_ports;
    if k == l {
        return Err(Error::Contract {
            what: "output ports must be distinct",
            measure: k as f64,
            tol: 0.0,
        });
    }
    for p in [k, l] {
        if p >= n {
            return Err(Error::OutOfRange {
                param: "output port",
                value: p as f64,
                lo: 0.0,
                hi: (n - 1) as f64,
            });
        }
    }
    let (a, b) = input.resolve(u)?;
    Ok(pair_probability(&a, &b, k, l, x))
}

/// Exact bosonic output probabilities over all unordered output pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPhotonTable {
    n: usize,
    probs: Vec<f64>,
}

/// Index of unordered pair (k, l), k <= l, in the packed table.
pub fn pair_index(n: usize, k: usize, l: usize) -> usize {
    let (k, l) = if k <= l { (k, l) } else { (l, k) };
    debug_assert!(l < n);
    k * (2 * n - k + 1) / 2 + (l - k)
}

impl TwoPhotonTable {
    pub fn n_sites(&self) -> usize {
        self.n
    }

    pub fn pair(&self, k: usize, l: usize) -> f64 {
        self.probs[pair_index(self.n, k, l)]
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }
}

/// Full probability table from the pairwise coincidence formula (including
/// diagonal bunching terms).
pub fn two_photon_table(
    u: &TransferUnitary,
    input: &TwoPhotonInput,
    x: f64,
) -> Result<TwoPhotonTable> {
    check_overlap(x)?;
    let n = u.n();
    let (a, b) = input.resolve(u)?;
    let mut probs = Vec::with_capacity(n * (n + 1) / 2);
    for k in 0..n {
        for l in k..n {
            probs.push(pair_probability(&a, &b, k, l, x));
        }
    }
    Ok(TwoPhotonTable { n, probs })
}

/// Brute-force oracle for indistinguishable photons: builds the symmetric
/// two-excitation representation of U by explicit matrix algebra (Kronecker
/// square compressed through the symmetrizer isometry) and reads output
/// probabilities from the propagated Fock vector. Independent of the
/// pairwise permanent formula.
pub fn fock_oracle(u: &TransferUnitary, in_ports: (usize, usize)) -> Result<TwoPhotonTable> {
    let n = u.n();
    for p in [in_ports.0, in_ports.1] {
        if p >= n {
            return Err(Error::OutOfRange {
                param: "input port",
                value: p as f64,
                lo: 0.0,
                hi: (n - 1) as f64,
            });
        }
    }
    let n2 = n * n;
    let m = n * (n + 1) / 2;

    // Symmetrizer columns: S maps the packed pair basis into the full
    // two-mode product basis.
    let mut smat = alloc::vec![0.0f64; n2 * m];
    for k in 0..n {
        for l in k..n {
            let col = pair_index(n, k, l);
            if k == l {
                smat[(k * n + k) * m + col] = 1.0;
            } else {
                let r = libm::sqrt(0.5);
                smat[(k * n + l) * m + col] = r;
                smat[(l * n + k) * m + col] = r;
            }
        }
    }

    // Packed input Fock vector, embedded: s = S e_in.
    let mut packed = alloc::vec![Complex64::ZERO; m];
    packed[pair_index(n, in_ports.0, in_ports.1)] = Complex64::ONE;
    let mut embedded = alloc::vec![Complex64::ZERO; n2];
    for (row, e) in embedded.iter_mut().enumerate() {
        for (col, p) in packed.iter().enumerate() {
            *e += smat[row * m + col] * p;
        }
    }

    // y = (U kron U) s.
    let mut evolved = alloc::vec![Complex64::ZERO; n2];
    for p in 0..n {
        for q in 0..n {
            let mut acc = Complex64::ZERO;
            for r in 0..n {
                let upr = u.element(p, r);
                if upr == Complex64::ZERO {
                    continue;
                }
                for s in 0..n {
                    acc += upr * u.element(q, s) * embedded[r * n + s];
                }
            }
            evolved[p * n + q] = acc;
        }
    }

    // b = S^T y; probabilities are |b|^2 per unordered pair.
    let mut probs = alloc::vec![0.0f64; m];
    for (col, out) in probs.iter_mut().enumerate() {
        let mut acc = Complex64::ZERO;
        for row in 0..n2 {
            acc += smat[row * m + col] * evolved[row];
        }
        *out = acc.norm_sqr();
    }
    Ok(TwoPhotonTable { n, probs })
}

/// Coincidence probability summed over cross-detector pairs: one photon in
/// each collected group. Same-group pairs are excluded (single-detector
/// events carry no coincidence signal).
pub fn grouped_coincidence(
    u: &TransferUnitary,
    input: &TwoPhotonInput,
    groups: &PortGroups,
    x: f64,
) -> Result<f64> {
    check_overlap(x)?;
    groups.check_range(u.n())?;
    let (a, b) = input.resolve(u)?;
    let mut total = 0.0;
    for &k in groups.left() {
        for &l in groups.right() {
            total += pair_probability(&a, &b, k, l, x);
        }
    }
    Ok(total)
}

/// Single-photon reflectivity over the collected ports: the output
/// probability on the input-side group divided by the total collected
/// probability. The input side is inferred from where the input state sits.
pub fn grouped_reflectivity(
    u: &TransferUnitary,
    input: &ModeState,
    groups: &PortGroups,
) -> Result<f64> {
    groups.check_range(u.n())?;
    let in_probs = input.probabilities();
    let weight = |sites: &[usize]| sites.iter().map(|&s| in_probs[s]).sum::<f64>();
    let (w_left, w_right) = (weight(groups.left()), weight(groups.right()));
    if w_left == w_right {
        return Err(Error::Contract {
            what: "input side ambiguous over collected groups",
            measure: w_left,
            tol: 0.0,
        });
    }
    let out = u.apply(input)?.probabilities();
    let collect = |sites: &[usize]| sites.iter().map(|&s| out[s]).sum::<f64>();
    let (p_left, p_right) = (collect(groups.left()), collect(groups.right()));
    let denom = p_left + p_right;
    if denom == 0.0 {
        return Err(Error::EmptyCollection {
            what: "collected output probability",
        });
    }
    let same = if w_left > w_right { p_left } else { p_right };
    Ok(same / denom)
}

/// Gaussian mode-overlap model: x(tau) = x0 * exp(-tau^2 / (2 sigma^2)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistinguishabilityModel {
    overlap_at_zero: f64,
    coherence_width_ps: f64,
}

impl DistinguishabilityModel {
    pub fn new(overlap_at_zero: f64, coherence_width_ps: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&overlap_at_zero) {
            return Err(Error::OutOfRange {
                param: "overlap x0",
                value: overlap_at_zero,
                lo: 0.0,
                hi: 1.0,
            });
        }
        if !(coherence_width_ps > 0.0) || !coherence_width_ps.is_finite() {
            return Err(Error::OutOfRange {
                param: "coherence width sigma_tau",
                value: coherence_width_ps,
                lo: f64::MIN_POSITIVE,
                hi: f64::INFINITY,
            });
        }
        Ok(DistinguishabilityModel {
            overlap_at_zero,
            coherence_width_ps,
        })
    }

    pub fn overlap_at_zero(&self) -> f64 {
        self.overlap_at_zero
    }

    pub fn coherence_width_ps(&self) -> f64 {
        self.coherence_width_ps
    }

    pub fn overlap_at(&self, delay_ps: f64) -> f64 {
        let t = delay_ps / self.coherence_width_ps;
        self.overlap_at_zero * libm::exp(-0.5 * t * t)
    }

    /// Delays at least this far out count as asymptotic (distinguishable
    /// floor; overlap below 4e-6 of x0).
    pub fn asymptotic_delay_ps(&self) -> f64 {
        5.0 * self.coherence_width_ps
    }
}

impl Default for DistinguishabilityModel {
    fn default() -> Self {
        DistinguishabilityModel {
            overlap_at_zero: 1.0,
            coherence_width_ps: 1.0,
        }
    }
}

/// Coincidence-versus-delay curve, with optional Poisson-sampled counts.
#[derive(Debug, Clone, PartialEq)]
pub struct HomCurve {
    delays_ps: Vec<f64>,
    probabilities: Vec<f64>,
    asymptotic: Vec<bool>,
    counts: Option<Vec<u64>>,
    count_errors: Option<Vec<f64>>,
}

impl HomCurve {
    pub fn len(&self) -> usize {
        self.delays_ps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delays_ps.is_empty()
    }

    pub fn delays_ps(&self) -> &[f64] {
        &self.delays_ps
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// Per-sample flag: was this delay designated asymptotic (far outside
    /// the coherence width) when the curve was built?
    pub fn asymptotic(&self) -> &[bool] {
        &self.asymptotic
    }

    pub fn counts(&self) -> Option<&[u64]> {
        self.counts.as_deref()
    }

    pub fn count_errors(&self) -> Option<&[f64]> {
        self.count_errors.as_deref()
    }

    /// Attach sampled counts (same length as delays) with sqrt(c) Poisson
    /// error bars.
    pub fn with_counts(mut self, counts: Vec<u64>) -> Result<HomCurve> {
        if counts.len() != self.delays_ps.len() {
            return Err(Error::OutOfRange {
                param: "counts length",
                value: counts.len() as f64,
                lo: self.delays_ps.len() as f64,
                hi: self.delays_ps.len() as f64,
            });
        }
        self.count_errors = Some(counts.iter().map(|&c| libm::sqrt(c as f64)).collect());
        self.counts = Some(counts);
        Ok(self)
    }
}

/// Sweep the delay axis: coincidence at each delay with overlap x(tau).
/// The curve is linear in x, so the quantum and classical levels are
/// computed once and mixed per delay.
pub fn hom_curve(
    u: &TransferUnitary,
    input: &TwoPhotonInput,
    groups: &PortGroups,
    model: &DistinguishabilityModel,
    delays_ps: &[f64],
) -> Result<HomCurve> {
    if delays_ps.is_empty() {
        return Err(Error::EmptyCollection {
            what: "delay samples",
        });
    }
    for &d in delays_ps {
        if !d.is_finite() {
            return Err(Error::OutOfRange {
                param: "delay_ps",
                value: d,
                lo: f64::NEG_INFINITY,
                hi: f64::INFINITY,
            });
        }
    }
    let quantum = grouped_coincidence(u, input, groups, 1.0)?;
    let classical = grouped_coincidence(u, input, groups, 0.0)?;
    let far = model.asymptotic_delay_ps();
    let mut probabilities = Vec::with_capacity(delays_ps.len());
    let mut asymptotic = Vec::with_capacity(delays_ps.len());
    for &tau in delays_ps {
        let x = model.overlap_at(tau);
        probabilities.push(x * quantum + (1.0 - x) * classical);
        asymptotic.push(tau.abs() >= far);
    }
    Ok(HomCurve {
        delays_ps: delays_ps.to_vec(),
        probabilities,
        asymptotic,
        counts: None,
        count_errors: None,
    })
}

/// Visibility of a HOM curve and its provenance levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Visibility {
    /// V = (C_far - C_min) / C_far from the probability curve.
    pub value: f64,
    /// Poisson standard error on V, propagated from sampled counts when the
    /// curve carries them.
    pub sigma: Option<f64>,
    pub c_far: f64,
    pub c_min: f64,
}

/// Dip visibility: C_far is the mean over designated asymptotic samples,
/// C_min the curve minimum. With counts attached, the error bar comes from
/// the Poisson variance of the dip and floor counts (ratio form).
pub fn visibility(curve: &HomCurve) -> Result<Visibility> {
    let far_idx: Vec<usize> = (0..curve.len()).filter(|&i| curve.asymptotic()[i]).collect();
    if far_idx.is_empty() {
        return Err(Error::EmptyCollection {
            what: "asymptotic delay samples",
        });
    }
    let c_far: f64 =
        far_idx.iter().map(|&i| curve.probabilities()[i]).sum::<f64>() / far_idx.len() as f64;
    if c_far <= 0.0 {
        return Err(Error::Contract {
            what: "far-delay coincidence level must be positive",
            measure: c_far,
            tol: 0.0,
        });
    }
    let (min_idx, c_min) = curve
        .probabilities()
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(&b.1).expect("finite probabilities"))
        .expect("non-empty curve");
    let value = (c_far - c_min) / c_far;
    let sigma = curve.counts().map(|counts| {
        let far_total: f64 = far_idx.iter().map(|&i| counts[i] as f64).sum();
        let far_mean = far_total / far_idx.len() as f64;
        let dip = counts[min_idx] as f64;
        if far_mean <= 0.0 {
            return f64::INFINITY;
        }
        let ratio = dip / far_mean;
        ratio * libm::sqrt(1.0 / dip.max(1.0) + 1.0 / far_total.max(1.0))
    });
    Ok(Visibility {
        value,
        sigma,
        c_far,
        c_min,
    })
}

/// Ratio of two visibilities (device dip over reference dip).
pub fn relative_visibility(v_device: f64, v_reference: f64) -> Result<f64> {
    if !(v_reference > 0.0) {
        return Err(Error::OutOfRange {
            param: "reference visibility",
            value: v_reference,
            lo: f64::MIN_POSITIVE,
            hi: 1.0,
        });
    }
    Ok(v_device / v_reference)
}

/// Poisson counting simulation: independent draws with mean flux * P at
/// each delay, in delay order, from a seeded generator. Zero mean
/// short-circuits to zero counts.
pub fn sample_counts(probabilities: &[f64], flux: f64, seed: u64) -> Result<Vec<u64>> {
    if !(flux > 0.0) || !flux.is_finite() {
        return Err(Error::OutOfRange {
            param: "flux",
            value: flux,
            lo: f64::MIN_POSITIVE,
            hi: f64::INFINITY,
        });
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(probabilities.len());
    for &p in probabilities {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::OutOfRange {
                param: "probability",
                value: p,
                lo: 0.0,
                hi: 1.0,
            });
        }
        let mean = flux * p;
        if mean == 0.0 {
            out.push(0);
            continue;
        }
        let poisson = rand_distr::Poisson::new(mean).map_err(|_| Error::OutOfRange {
            param: "poisson mean",
            value: mean,
            lo: f64::MIN_POSITIVE,
            hi: f64::MAX,
        })?;
        let draw: f64 = poisson.sample(&mut rng);
        out.push(draw as u64);
    }
    Ok(out)
}
