//! Coupling schedule, device profiles, Hamiltonian assembly, and the
//! coupling/separation geometry law.
//!
//! Units: couplings in 1/cm, lengths in cm, separations in um, phases in
//! radians. All unit conversions live here.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Default nominal coupling rate for the built-in device presets (1/cm).
pub const DEFAULT_KAPPA0_PER_CM: f64 = 49.0;
/// Site count of the built-in device presets.
pub const DEFAULT_SITES: usize = 10;
/// Default modulation phase: puts the cosine minimum on bond 2, so the weak
/// second bond isolates the edge dimer on each side of the array.
pub const DEFAULT_PHI_RAD: f64 = core::f64::consts::FRAC_PI_3;
/// Modulation depth of the stationary preset.
pub const STATIONARY_LAMBDA: f64 = 0.6;
/// Waist modulation depth of the beamsplitter preset.
pub const BEAMSPLITTER_WAIST_LAMBDA: f64 = 0.1;

/// Modulation-depth profile over the device length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaProfile {
    /// Constant depth at all z.
    Constant(f64),
    /// Raised cosine: `end` at z = 0 and z = L, `mid` at z = L/2, zero slope
    /// at all three points.
    RaisedCosine { end: f64, mid: f64 },
}

impl LambdaProfile {
    fn validate(&self) -> Result<()> {
        let check = |name: &'static str, v: f64| {
            if !(0.0..1.0).contains(&v) {
                return Err(Error::OutOfRange {
                    param: name,
                    value: v,
                    lo: 0.0,
                    hi: 1.0,
                });
            }
            Ok(())
        };
        match *self {
            LambdaProfile::Constant(v) => check("lambda", v),
            LambdaProfile::RaisedCosine { end, mid } => {
                check("lambda end", end)?;
                check("lambda mid", mid)
            }
        }
    }

    /// Depth at position `z` of a device of length `length`.
    pub fn value(&self, z: f64, length: f64) -> f64 {
        match *self {
            LambdaProfile::Constant(v) => v,
            LambdaProfile::RaisedCosine { end, mid } => {
                let c = libm::cos(core::f64::consts::TAU * z / length);
                mid + (end - mid) * 0.5 * (1.0 + c)
            }
        }
    }
}

/// The modulated coupling law: kappa_n(z) = kappa0 * (1 + Lambda(z) * cos(2 pi b n + phi)).
///
/// `b` is the rational lattice periodicity num/den; the cosine argument is
/// reduced exactly in the rational part, so bonds n and n + den evaluate
/// bit-identically.
#[derive(Debug, Clone, PartialEq)]
pub struct HarperSchedule {
    kappa0: f64,
    b_num: u32,
    b_den: u32,
    lambda: LambdaProfile,
    phi: f64,
    length: f64,
}

impl HarperSchedule {
    pub fn new(
        kappa0: f64,
        b_num: u32,
        b_den: u32,
        lambda: LambdaProfile,
        phi: f64,
        length: f64,
    ) -> Result<Self> {
        if !(kappa0 > 0.0) || !kappa0.is_finite() {
            return Err(Error::OutOfRange {
                param: "kappa0",
                value: kappa0,
                lo: f64::MIN_POSITIVE,
                hi: f64::INFINITY,
            });
        }
        if b_den == 0 {
            return Err(Error::OutOfRange {
                param: "b_bar denominator",
                value: 0.0,
                lo: 1.0,
                hi: f64::INFINITY,
            });
        }
        if !phi.is_finite() {
            return Err(Error::NonFinite { param: "phi", z: 0.0 });
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::OutOfRange {
                param: "length",
                value: length,
                lo: f64::MIN_POSITIVE,
                hi: f64::INFINITY,
            });
        }
        lambda.validate()?;
        Ok(HarperSchedule {
            kappa0,
            b_num,
            b_den,
            lambda,
            phi,
            length,
        })
    }

    pub fn kappa0(&self) -> f64 {
        self.kappa0
    }

    pub fn b_bar(&self) -> (u32, u32) {
        (self.b_num, self.b_den)
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn lambda_profile(&self) -> LambdaProfile {
        self.lambda
    }

    pub fn lambda_at(&self, z: f64) -> f64 {
        self.lambda.value(z, self.length)
    }

    /// Phase profile; constant per device.
    pub fn phi_at(&self, _z: f64) -> f64 {
        self.phi
    }

    /// Coupling of bond `n` (1-based) at position `z`.
    pub fn coupling_at(&self, n: usize, z: f64) -> Result<f64> {
        if n == 0 {
            return Err(Error::OutOfRange {
                param: "bond index n",
                value: 0.0,
                lo: 1.0,
                hi: f64::INFINITY,
            });
        }
        if !(0.0..=self.length).contains(&z) {
            return Err(Error::OutOfRange {
                param: "z",
                value: z,
                lo: 0.0,
                hi: self.length,
            });
        }
        let frac = (self.b_num as u64 * n as u64) % self.b_den as u64;
        let angle = core::f64::consts::TAU * (frac as f64) / (self.b_den as f64) + self.phi;
        Ok(self.kappa0 * (1.0 + self.lambda_at(z) * libm::cos(angle)))
    }
}

/// Exponential coupling-versus-separation law kappa(d) = a * exp(-b * d).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryMap {
    a_per_cm: f64,
    b_per_um: f64,
}

impl GeometryMap {
    pub fn new(a_per_cm: f64, b_per_um: f64) -> Result<Self> {
        if !(a_per_cm > 0.0) || !a_per_cm.is_finite() {
            return Err(Error::OutOfRange {
                param: "geometry a",
                value: a_per_cm,
                lo: f64::MIN_POSITIVE,
                hi: f64::INFINITY,
            });
        }
        if !(b_per_um > 0.0) || !b_per_um.is_finite() {
            return Err(Error::OutOfRange {
                param: "geometry b",
                value: b_per_um,
                lo: f64::MIN_POSITIVE,
                hi: f64::INFINITY,
            });
        }
        Ok(GeometryMap { a_per_cm, b_per_um })
    }

    pub fn a_per_cm(&self) -> f64 {
        self.a_per_cm
    }

    pub fn b_per_um(&self) -> f64 {
        self.b_per_um
    }

    /// Separation (um) that realizes the requested coupling (1/cm).
    pub fn separation_for_coupling(&self, kappa: f64) -> Result<f64> {
        if !(kappa > 0.0 && kappa <= self.a_per_cm) {
            return Err(Error::OutOfRange {
                param: "kappa",
                value: kappa,
                lo: f64::MIN_POSITIVE,
                hi: self.a_per_cm,
            });
        }
        Ok(libm::log(self.a_per_cm / kappa) / self.b_per_um)
    }

    /// Coupling (1/cm) at separation `d` (um).
    pub fn coupling_for_separation(&self, d: f64) -> Result<f64> {
        if !(d >= 0.0) {
            return Err(Error::OutOfRange {
                param: "separation d",
                value: d,
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
        Ok(self.a_per_cm * libm::exp(-self.b_per_um * d))
    }
}

impl Default for GeometryMap {
    /// Measured constants of the exponential law: a = 115 1/cm, b = 0.36 1/um.
    fn default() -> Self {
        GeometryMap {
            a_per_cm: 115.0,
            b_per_um: 0.36,
        }
    }
}

/// Real symmetric tridiagonal single-excitation Hamiltonian with zero
/// diagonal; `off[k]` couples sites k and k + 1 (0-based), in 1/cm.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    off: Vec<f64>,
}

impl Hamiltonian {
    pub fn from_couplings(off: Vec<f64>) -> Result<Self> {
        for (k, v) in off.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    param: "coupling",
                    z: k as f64,
                });
            }
        }
        Ok(Hamiltonian { off })
    }

    pub fn n_sites(&self) -> usize {
        self.off.len() + 1
    }

    pub fn off_diagonals(&self) -> &[f64] {
        &self.off
    }

    pub fn element(&self, i: usize, j: usize) -> f64 {
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        if hi - lo == 1 {
            self.off[lo]
        } else {
            0.0
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.n_sites();
        let mut m = alloc::vec![alloc::vec![0.0; n]; n];
        for (k, v) in self.off.iter().enumerate() {
            m[k][k + 1] = *v;
            m[k + 1][k] = *v;
        }
        m
    }
}

/// Built-in device kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeviceKind {
    /// Constant modulation depth 0.6; boundary states stay pinned to the edges.
    Stationary,
    /// Depth dips 0.6 -> 0.1 -> 0.6 about L/2; boundary states delocalize,
    /// interfere through the center bond, and relocalize.
    Beamsplitter,
}

/// A concrete N-site device: palindromic bond vector
/// {kappa_1..kappa_{m/2}, c, mirrored}, with the center bond scaled
/// independently of the modulation law.
///
/// The center coupling parameter is the value at the waist z = L/2; along z it
/// follows the modulation of its bond slot, c(z) = c * (1 - Lambda(z)) / (1 - Lambda(L/2)),
/// so a constant-depth device has a constant center bond and a dipped-depth
/// device has its strongest center bond (smallest separation) at the waist.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceProfile {
    n_sites: usize,
    schedule: HarperSchedule,
    center: f64,
    waist_depth_factor: f64,
}

impl DeviceProfile {
    pub fn new(n_sites: usize, schedule: HarperSchedule, center_coupling: f64) -> Result<Self> {
        if n_sites < 4 || n_sites % 2 != 0 {
            return Err(Error::OutOfRange {
                param: "n_sites (even, >= 4)",
                value: n_sites as f64,
                lo: 4.0,
                hi: f64::INFINITY,
            });
        }
        if !(center_coupling > 0.0) || !center_coupling.is_finite() {
            return Err(Error::OutOfRange {
                param: "center coupling",
                value: center_coupling,
                lo: f64::MIN_POSITIVE,
                hi: f64::INFINITY,
            });
        }
        let waist_depth_factor = 1.0 - schedule.lambda_at(schedule.length() / 2.0);
        Ok(DeviceProfile {
            n_sites,
            schedule,
            center: center_coupling,
            waist_depth_factor,
        })
    }

    /// Built-in N = 10 preset with b = 2/3 and the standard depth profiles.
    pub fn preset(
        kind: DeviceKind,
        kappa0: f64,
        length: f64,
        phi: f64,
        center_coupling: f64,
    ) -> Result<Self> {
        let lambda = match kind {
            DeviceKind::Stationary => LambdaProfile::Constant(STATIONARY_LAMBDA),
            DeviceKind::Beamsplitter => LambdaProfile::RaisedCosine {
                end: STATIONARY_LAMBDA,
                mid: BEAMSPLITTER_WAIST_LAMBDA,
            },
        };
        let schedule = HarperSchedule::new(kappa0, 2, 3, lambda, phi, length)?;
        DeviceProfile::new(DEFAULT_SITES, schedule, center_coupling)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn length(&self) -> f64 {
        self.schedule.length()
    }

    pub fn schedule(&self) -> &HarperSchedule {
        &self.schedule
    }

    pub fn center_coupling(&self) -> f64 {
        self.center
    }

    /// Center-bond coupling at position z.
    pub fn center_at(&self, z: f64) -> f64 {
        self.center * (1.0 - self.schedule.lambda_at(z)) / self.waist_depth_factor
    }

    /// The N - 1 bond couplings at position z; palindromic by construction
    /// (mirrored entries are bit-identical copies).
    pub fn bonds_at(&self, z: f64) -> Result<Vec<f64>> {
        let m = self.n_sites - 1;
        let center = m / 2; // 0-based index of the center bond
        let mut bonds = alloc::vec![0.0; m];
        for k in 0..center {
            bonds[k] = self.schedule.coupling_at(k + 1, z)?;
        }
        bonds[center] = self.center_at(z);
        for k in center + 1..m {
            bonds[k] = bonds[m - 1 - k];
        }
        Ok(bonds)
    }

    pub fn hamiltonian_at(&self, z: f64) -> Result<Hamiltonian> {
        Hamiltonian::from_couplings(self.bonds_at(z)?)
    }

    /// Largest bond coupling over `samples` evenly spaced z positions;
    /// used to derive default integration step counts.
    pub fn max_coupling(&self, samples: usize) -> f64 {
        let samples = samples.max(2);
        let mut best = 0.0f64;
        for i in 0..samples {
            let z = self.length() * i as f64 / (samples - 1) as f64;
            if let Ok(bonds) = self.bonds_at(z) {
                for b in bonds {
                    best = best.max(b.abs());
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stationary() -> DeviceProfile {
        DeviceProfile::preset(
            DeviceKind::Stationary,
            DEFAULT_KAPPA0_PER_CM,
            0.1,
            DEFAULT_PHI_RAD,
            19.6,
        )
        .unwrap()
    }

    #[test]
    fn modulation_off_gives_uniform_lattice() {
        let s = HarperSchedule::new(2.5, 2, 3, LambdaProfile::Constant(0.0), 1.234, 1.0).unwrap();
        for n in 1..9 {
            assert_eq!(s.coupling_at(n, 0.5).unwrap(), 2.5);
        }
    }

    #[test]
    fn cosine_argument_multiple_of_two_pi() {
        // b = 2/3, n = 3: the rational part of the angle vanishes exactly.
        let s = HarperSchedule::new(1.0, 2, 3, LambdaProfile::Constant(0.6), 0.0, 1.0).unwrap();
        assert_eq!(s.coupling_at(3, 0.0).unwrap(), 1.6);
    }

    #[test]
    fn bond_period_is_exact() {
        let s = HarperSchedule::new(49.0, 2, 3, LambdaProfile::Constant(0.6), 0.7, 1.0).unwrap();
        for n in 1..6 {
            assert_eq!(
                s.coupling_at(n, 0.3).unwrap(),
                s.coupling_at(n + 3, 0.3).unwrap()
            );
        }
    }

    #[test]
    fn out_of_range_arguments_name_the_parameter() {
        let s = HarperSchedule::new(1.0, 2, 3, LambdaProfile::Constant(0.5), 0.0, 1.0).unwrap();
        match s.coupling_at(0, 0.5) {
            Err(Error::OutOfRange { param, .. }) => assert!(param.contains("bond")),
            other => panic!("expected domain error, got {other:?}"),
        }
        match s.coupling_at(1, 1.5) {
            Err(Error::OutOfRange { param, .. }) => assert_eq!(param, "z"),
            other => panic!("expected domain error, got {other:?}"),
        }
    }

    #[test]
    fn preset_bonds_are_palindromic_and_match_schedule() {
        let d = stationary();
        let bonds = d.bonds_at(0.05).unwrap();
        assert_eq!(bonds.len(), 9);
        for k in 0..9 {
            assert_eq!(bonds[k], bonds[8 - k]);
        }
        for k in 1..=4usize {
            assert_eq!(bonds[k - 1], d.schedule().coupling_at(k, 0.05).unwrap());
        }
        assert_eq!(bonds[4], 19.6 * (1.0 - 0.6) / (1.0 - 0.6));
    }

    #[test]
    fn beamsplitter_depth_endpoints() {
        let d = DeviceProfile::preset(
            DeviceKind::Beamsplitter,
            DEFAULT_KAPPA0_PER_CM,
            1.0,
            DEFAULT_PHI_RAD,
            7.8,
        )
        .unwrap();
        let s = d.schedule();
        assert!((s.lambda_at(0.0) - 0.6).abs() < 1e-15);
        assert!((s.lambda_at(0.5) - 0.1).abs() < 1e-15);
        assert!((s.lambda_at(1.0) - 0.6).abs() < 1e-15);
        // Center bond is strongest at the waist.
        assert!(d.center_at(0.5) > d.center_at(0.0));
        assert!((d.center_at(0.5) - 7.8).abs() < 1e-12);
    }

    #[test]
    fn two_and_three_site_hamiltonians() {
        let h2 = Hamiltonian::from_couplings(alloc::vec![1.0]).unwrap();
        assert_eq!(h2.element(0, 1), 1.0);
        assert_eq!(h2.element(0, 0), 0.0);
        let h3 = Hamiltonian::from_couplings(alloc::vec![2.0, 2.0]).unwrap();
        assert_eq!(h3.n_sites(), 3);
        assert_eq!(h3.element(0, 2), 0.0);
    }

    #[test]
    fn geometry_law_examples() {
        let g = GeometryMap::default();
        assert_eq!(g.separation_for_coupling(115.0).unwrap(), 0.0);
        assert_eq!(g.coupling_for_separation(0.0).unwrap(), 115.0);
        let d = g.separation_for_coupling(115.0 / core::f64::consts::E).unwrap();
        assert!((d - 1.0 / 0.36).abs() < 1e-12);
        assert!(g.separation_for_coupling(230.0).is_err());
        assert!(g.coupling_for_separation(100.0).unwrap() < 1e-10);
        assert!(g.coupling_for_separation(-1.0).is_err());
    }

    #[test]
    fn geometry_round_trip() {
        let g = GeometryMap::default();
        for i in 1..100 {
            let kappa = 115.0 * i as f64 / 100.0;
            let d = g.separation_for_coupling(kappa).unwrap();
            let back = g.coupling_for_separation(d).unwrap();
            assert!((back - kappa).abs() <= 1e-12 * kappa);
        }
    }
}
