//! Acceptance suite: one test per shipped guarantee, each printing a
//! [PASS]/[FAIL] line with the measured numbers before asserting.
//!
//! Criteria that concern the command-line surface drive the installed
//! binary; criteria about library quantities call the library directly.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use harper_core::design::{export_layout, layout_couplings};
use harper_core::evolve::{
    adiabaticity_leakage, boundary_injection_state, default_steps, propagate, OutputDistribution,
    Side,
};
use harper_core::linalg::{CMat, Complex64};
use harper_core::model::{
    DeviceKind, DeviceProfile, GeometryMap, HarperSchedule, LambdaProfile, DEFAULT_KAPPA0_PER_CM,
    DEFAULT_PHI_RAD,
};
use harper_core::spectral::{boundary_candidates, eigensystem, gap_at};
use harper_core::twophoton::{fock_oracle, two_photon_table, TwoPhotonInput};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const C_STAR: f64 = 7.809032653457138;

fn criterion(n: u32, description: &str, ok: bool, detail: &str) {
    let tag = if ok { "[PASS]" } else { "[FAIL]" };
    println!("{tag} criterion {n}: {description} ({detail})");
    assert!(ok, "criterion {n} failed: {detail}");
}

fn harper(args: &[&str]) -> std::process::Output {
    let out = Command::new(env!("CARGO_BIN_EXE_harper"))
        .args(args)
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "command {args:?} failed\nstderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn config_path(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("harper-acc-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn extract(report: &str, key: &str) -> f64 {
    report
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("missing {key} in report:\n{report}"))
        .trim()
        .parse()
        .unwrap()
}

fn read_probabilities(path: &Path) -> Vec<f64> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split('\t').nth(1).unwrap().parse().unwrap())
        .collect()
}

fn beamsplitter() -> DeviceProfile {
    DeviceProfile::preset(
        DeviceKind::Beamsplitter,
        DEFAULT_KAPPA0_PER_CM,
        1.0,
        DEFAULT_PHI_RAD,
        C_STAR,
    )
    .unwrap()
}

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
fn criterion_01_fifty_fifty_optimization() {
    let dir = temp_dir("c1");
    let start = Instant::now();
    harper(&[
        "optimize",
        "--config",
        &config_path("beamsplitter.toml"),
        "--out",
        dir.to_str().unwrap(),
    ]);
    let elapsed = start.elapsed().as_secs_f64();
    let report = std::fs::read_to_string(dir.join("optimize.txt")).unwrap();
    let r = extract(&report, "reflectivity");
    let ok = (r - 0.5).abs() <= 0.005 && elapsed <= 60.0;
    criterion(
        1,
        "center-coupling search lands a 50:50 split",
        ok,
        &format!("reflectivity {r:.6}, {elapsed:.1} s"),
    );
}

#[test]
fn criterion_02_hom_suppression() {
    let start = Instant::now();

    // Ideal-overlap run on a patched copy of the splitter config.
    let dir_ideal = temp_dir("c2-ideal");
    let cfg_ideal = dir_ideal.join("ideal.toml");
    let text = std::fs::read_to_string(config_path("beamsplitter.toml")).unwrap();
    assert!(text.contains("x0 = 0.945"));
    std::fs::write(&cfg_ideal, text.replace("x0 = 0.945", "x0 = 1.0")).unwrap();
    harper(&[
        "hom",
        "--config",
        cfg_ideal.to_str().unwrap(),
        "--out",
        dir_ideal.to_str().unwrap(),
    ]);
    let v_ideal = extract(
        &std::fs::read_to_string(dir_ideal.join("visibility.txt")).unwrap(),
        "visibility",
    );

    // Source-calibrated run straight off the shipped config.
    let dir_cal = temp_dir("c2-cal");
    harper(&[
        "hom",
        "--config",
        &config_path("beamsplitter.toml"),
        "--out",
        dir_cal.to_str().unwrap(),
    ]);
    let cal = std::fs::read_to_string(dir_cal.join("visibility.txt")).unwrap();
    let v_cal = extract(&cal, "visibility");
    let rel = extract(&cal, "relative_visibility_vs_x0");
    let elapsed = start.elapsed().as_secs_f64();

    let ok = v_ideal >= 0.999
        && (0.90..=0.95).contains(&v_cal)
        && (0.95..=1.02).contains(&rel)
        && elapsed <= 30.0;
    criterion(
        2,
        "interference dip vanishes at ideal overlap and tracks the source calibration",
        ok,
        &format!("V(1) {v_ideal:.6}, V(0.945) {v_cal:.6}, relative {rel:.6}, {elapsed:.1} s"),
    );
}

#[test]
fn criterion_03_boundary_confinement() {
    let dir = temp_dir("c3");
    let cfg = config_path("stationary.toml");
    for side in ["left", "right"] {
        harper(&["propagate", "--config", &cfg, "--out", dir.to_str().unwrap(), "--side", side]);
    }
    let left = read_probabilities(&dir.join("distribution_left.tsv"));
    let right = read_probabilities(&dir.join("distribution_right.tsv"));
    let n = left.len();
    let p_left: f64 = left[..2].iter().sum();
    let p_right: f64 = right[n - 2..].iter().sum();
    let asymmetry = (0..n)
        .map(|i| (left[i] - right[n - 1 - i]).abs())
        .fold(0.0, f64::max);
    // Regression pin from the first verified run of the stationary device.
    let pinned = 0.9027977485827077;
    let ok = p_left >= 0.90
        && p_right >= 0.90
        && (p_left - pinned).abs() <= 1e-9
        && asymmetry <= 1e-8;
    criterion(
        3,
        "stationary device keeps the injected state on the boundary pair",
        ok,
        &format!("left {p_left:.10}, right {p_right:.10}, asymmetry {asymmetry:.2e}"),
    );
}

#[test]
fn criterion_04_oracle_equivalence() {
    let start = Instant::now();
    let mut worst = 0.0_f64;
    let mut checked = 0_u32;
    for trial in 0..100u64 {
        let n = 2 + (trial as usize % 5);
        let u = random_transfer(n, trial);
        for a in 0..n {
            for b in (a + 1)..n {
                let fast = two_photon_table(&u, &TwoPhotonInput::Ports(a, b), 1.0).unwrap();
                let slow = fock_oracle(&u, (a, b)).unwrap();
                for (p, q) in fast.probabilities().iter().zip(slow.probabilities()) {
                    worst = worst.max((p - q).abs());
                }
                checked += 1;
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let ok = worst <= 1e-10 && elapsed <= 10.0;
    criterion(
        4,
        "pairwise coincidence formula matches the Fock-space oracle",
        ok,
        &format!("{checked} input pairs, worst deviation {worst:.2e}, {elapsed:.1} s"),
    );
}

#[test]
fn criterion_05_integrator_contract() {
    // Unitarity at the automatically chosen resolution on both shipped devices.
    let mut unitarity = 0.0_f64;
    for profile in [stationary(), beamsplitter()] {
        let length = profile.length();
        let steps = default_steps(&profile, 0.0, length);
        let u = propagate(&profile, 0.0, length, steps).unwrap();
        unitarity = unitarity.max(u.unitarity_error());
    }

    // Error halving rate on randomized smooth schedules: second order means
    // doubling the step count divides the error by about four.
    let mut rng = ChaCha8Rng::seed_from_u64(20_260_822);
    let mut ratios = Vec::new();
    for _ in 0..3 {
        let schedule = HarperSchedule::new(
            DEFAULT_KAPPA0_PER_CM,
            2,
            3,
            LambdaProfile::RaisedCosine {
                end: rng.random_range(0.4..0.7),
                mid: rng.random_range(0.05..0.2),
            },
            rng.random_range(0.0..core::f64::consts::TAU),
            1.0,
        )
        .unwrap();
        let profile = DeviceProfile::new(10, schedule, rng.random_range(5.0..20.0)).unwrap();
        let reference = propagate(&profile, 0.0, 1.0, 5120).unwrap();
        let err = |steps: usize| {
            propagate(&profile, 0.0, 1.0, steps)
                .unwrap()
                .matrix()
                .max_abs_diff(reference.matrix())
        };
        ratios.push(err(640) / err(1280));
    }
    let ok = unitarity <= 1e-10 && ratios.iter().all(|r| (3.5..=4.5).contains(r));
    criterion(
        5,
        "propagator stays unitary and converges at second order",
        ok,
        &format!("unitarity {unitarity:.2e}, halving ratios {ratios:.3?}"),
    );
}

#[test]
fn criterion_06_adiabaticity() {
    let slow = beamsplitter();
    let input = boundary_injection_state(&slow, Side::Left).unwrap();
    let leak_slow = adiabaticity_leakage(&slow, &input, 16).unwrap().max_leakage;

    let fast = DeviceProfile::preset(
        DeviceKind::Beamsplitter,
        DEFAULT_KAPPA0_PER_CM,
        0.01,
        DEFAULT_PHI_RAD,
        C_STAR,
    )
    .unwrap();
    let input = boundary_injection_state(&fast, Side::Left).unwrap();
    let leak_fast = adiabaticity_leakage(&fast, &input, 16).unwrap().max_leakage;

    let ok = leak_slow <= 0.01 && leak_fast > 0.10;
    criterion(
        6,
        "leakage diagnostic separates slow devices from hundredfold-compressed ones",
        ok,
        &format!("full length {leak_slow:.4}, compressed {leak_fast:.4}"),
    );
}

#[test]
fn criterion_07_geometry_round_trip() {
    let map = GeometryMap::new(115.0, 0.36).unwrap();
    let d_at_max = map.separation_for_coupling(115.0).unwrap();
    let kappa_at_zero = map.coupling_for_separation(0.0).unwrap();

    let profile = beamsplitter();
    let layout = export_layout(&profile, &map, 1.0 / 64.0, 0.0).unwrap();
    let derived = layout_couplings(&layout, &map).unwrap();
    let mut worst = 0.0_f64;
    for (s, bonds) in derived.iter().enumerate() {
        let z = layout.z_samples()[s];
        let expected = profile.bonds_at(z).unwrap();
        for (d, e) in bonds.iter().zip(&expected) {
            worst = worst.max((d - e).abs() / e.abs());
        }
    }
    let ok = worst <= 1e-9 && d_at_max == 0.0 && kappa_at_zero == 115.0;
    criterion(
        7,
        "exported positions reproduce the coupling profile and pin the map endpoints",
        ok,
        &format!("worst relative {worst:.2e}, d(115) = {d_at_max}, kappa(0) = {kappa_at_zero}"),
    );
}

#[test]
fn criterion_08_fidelity_function() {
    let p = OutputDistribution::new(vec![0.5, 0.3, 0.2]).unwrap();
    let f_self = harper_core::evolve::fidelity(&p, &p).unwrap();

    let a = OutputDistribution::new(vec![1.0, 0.0]).unwrap();
    let b = OutputDistribution::new(vec![0.0, 1.0]).unwrap();
    let f_disjoint = harper_core::evolve::fidelity(&a, &b).unwrap();

    let uniform = OutputDistribution::new(vec![0.1; 10]).unwrap();
    let mut point = vec![0.0; 10];
    point[4] = 1.0;
    let point = OutputDistribution::new(point).unwrap();
    let f_point = harper_core::evolve::fidelity(&uniform, &point).unwrap();
    let f_sym = harper_core::evolve::fidelity(&point, &uniform).unwrap();

    let ok = (f_self - 1.0).abs() <= 1e-12
        && f_disjoint == 0.0
        && (f_point - 0.1_f64.sqrt()).abs() <= 1e-12
        && (f_point - f_sym).abs() <= 1e-15;
    criterion(
        8,
        "overlap fidelity honors its closed-form anchors",
        ok,
        &format!("self {f_self}, disjoint {f_disjoint}, uniform-vs-point {f_point:.12}"),
    );
}

#[test]
fn criterion_09_spectral_structure() {
    let profile = stationary();
    let length = profile.length();
    let mut pairing = 0.0_f64;
    let mut trace = 0.0_f64;
    let mut doublet_ok = true;
    for s in 0..65 {
        let z = length * s as f64 / 64.0;
        let es = eigensystem(&profile.hamiltonian_at(z).unwrap()).unwrap();
        let vals = es.values();
        let n = vals.len();
        for i in 0..n / 2 {
            pairing = pairing.max((vals[i] + vals[n - 1 - i]).abs());
        }
        trace = trace.max(vals.iter().sum::<f64>().abs());
        doublet_ok &= boundary_candidates(&es) == [6, 7];
    }

    // Gap comparison at fixed kappa0: deep modulation versus shallow, center
    // bond following the coupling law itself (c = kappa0 * (1 - lambda)).
    let gap_of = |lam: f64| {
        let schedule = HarperSchedule::new(
            DEFAULT_KAPPA0_PER_CM,
            2,
            3,
            LambdaProfile::Constant(lam),
            DEFAULT_PHI_RAD,
            0.1,
        )
        .unwrap();
        let center = DEFAULT_KAPPA0_PER_CM * (1.0 - lam);
        let profile = DeviceProfile::new(10, schedule, center).unwrap();
        let es = eigensystem(&profile.hamiltonian_at(0.05).unwrap()).unwrap();
        gap_at(&es, &[6, 7])
    };
    let gap_deep = gap_of(0.6);
    let gap_shallow = gap_of(0.1);

    let ok = pairing <= 1e-8 && trace <= 1e-8 && doublet_ok && gap_deep > gap_shallow;
    criterion(
        9,
        "spectra pair across zero with a two-state mid-gap doublet at every sample",
        ok,
        &format!(
            "pairing {pairing:.2e}, trace {trace:.2e}, gaps {gap_deep:.3} > {gap_shallow:.3}"
        ),
    );
}

#[test]
fn criterion_10_determinism() {
    let runs: [&[&str]; 5] = [
        &["bands", "--config", "STATIONARY"],
        &["propagate", "--config", "STATIONARY", "--side", "left"],
        &["hom", "--config", "BEAMSPLITTER", "--seed", "11"],
        &["optimize", "--config", "BEAMSPLITTER"],
        &["layout", "--config", "BEAMSPLITTER"],
    ];
    let stationary_cfg = config_path("stationary.toml");
    let beamsplitter_cfg = config_path("beamsplitter.toml");
    let mut compared = 0;
    let mut identical = true;
    let mut first_diff = String::new();
    for (pass, dir) in [temp_dir("c10-a"), temp_dir("c10-b")].iter().enumerate() {
        let _ = pass;
        for args in runs {
            let resolved: Vec<&str> = args
                .iter()
                .map(|a| match *a {
                    "STATIONARY" => stationary_cfg.as_str(),
                    "BEAMSPLITTER" => beamsplitter_cfg.as_str(),
                    other => other,
                })
                .chain(["--out", dir.to_str().unwrap()])
                .collect();
            harper(&resolved);
        }
    }
    let dir_a = temp_dir("c10-a");
    let dir_b = temp_dir("c10-b");
    for entry in std::fs::read_dir(&dir_a).unwrap() {
        let name = entry.unwrap().file_name();
        let a = std::fs::read(dir_a.join(&name)).unwrap();
        let b = std::fs::read(dir_b.join(&name)).unwrap();
        if a != b && identical {
            identical = false;
            first_diff = name.to_string_lossy().into_owned();
        }
        compared += 1;
    }
    let ok = identical && compared >= 8;
    criterion(
        10,
        "reruns with the same config and seed write byte-identical files",
        ok,
        &if identical {
            format!("{compared} files compared")
        } else {
            format!("first differing file: {first_diff}")
        },
    );
}

/// Haar-like random transfer matrix: complex gaussians orthonormalized by
/// modified Gram-Schmidt.
fn random_transfer(n: usize, seed: u64) -> harper_core::evolve::TransferUnitary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let mut gauss = || {
        let u1: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
        let u2: f64 = rng.random_range(0.0..core::f64::consts::TAU);
        (-2.0 * u1.ln()).sqrt() * u2.cos()
    };
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|_| (0..n).map(|_| Complex64::new(gauss(), gauss())).collect())
        .collect();
    for j in 0..n {
        for i in 0..j {
            let proj: Complex64 = (0..n).map(|r| cols[i][r].conj() * cols[j][r]).sum();
            for r in 0..n {
                let correction = proj * cols[i][r];
                cols[j][r] -= correction;
            }
        }
        let norm: f64 = cols[j].iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        for v in &mut cols[j] {
            *v /= norm;
        }
    }
    let mut m = CMat::zeros(n);
    for (j, col) in cols.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            m.set(i, j, *v);
        }
    }
    harper_core::evolve::TransferUnitary::from_matrix(m, (0.0, 1.0), 1).unwrap()
}
