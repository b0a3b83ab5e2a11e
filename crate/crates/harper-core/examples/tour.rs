use harper_core::design::optimize_center_coupling;
use harper_core::evolve::{boundary_injection_state, propagate, Side};
use harper_core::model::{DeviceKind, DeviceProfile, DEFAULT_KAPPA0_PER_CM, DEFAULT_PHI_RAD};
use harper_core::spectral::{band_trace, eigensystem, gap_at, boundary_candidates};
use harper_core::twophoton::{grouped_reflectivity, PortGroups};

fn main() {
    let stationary = DeviceProfile::preset(DeviceKind::Stationary, DEFAULT_KAPPA0_PER_CM, 0.1, DEFAULT_PHI_RAD, 19.6).unwrap();
    let es = eigensystem(&stationary.hamiltonian_at(0.0).unwrap()).unwrap();
    let cand = boundary_candidates(&es);
    println!("stationary z=0: doublet at {:?}, eigenvalues {:.6} / {:.6}, gap {:.6}",
        cand, es.values()[cand[0]], es.values()[cand[1]], gap_at(&es, &cand));
    let trace = band_trace(&stationary, 33).unwrap();
    println!("band trace: {} tracks x {} samples, boundary tracks {:?}, warnings {}",
        trace.n_tracks(), trace.n_samples(), trace.boundary_tracks(), trace.warnings().len());
    let input = boundary_injection_state(&stationary, Side::Left).unwrap();
    let u = propagate(&stationary, 0.0, 0.1, 255).unwrap();
    let out = harper_core::evolve::single_photon_output(&u, &input).unwrap();
    let p = out.probabilities();
    println!("confinement after stationary device: P(sites 1-2) = {:.6}", p[0] + p[1]);
    let bs = DeviceProfile::preset(DeviceKind::Beamsplitter, DEFAULT_KAPPA0_PER_CM, 1.0, DEFAULT_PHI_RAD, 19.6).unwrap();
    let r = optimize_center_coupling(&bs, 0.5, 1e-9, None).unwrap();
    println!("optimized center coupling: c* = {:.12}, residual {:.2e}, {} evaluations", r.parameter, r.objective, r.iterations);
    let dev = DeviceProfile::preset(DeviceKind::Beamsplitter, DEFAULT_KAPPA0_PER_CM, 1.0, DEFAULT_PHI_RAD, r.parameter).unwrap();
    let u = propagate(&dev, 0.0, 1.0, 2548).unwrap();
    let inp = boundary_injection_state(&dev, Side::Left).unwrap();
    println!("reflectivity at c*: {:.9}", grouped_reflectivity(&u, &inp, &PortGroups::edge_defaults(10)).unwrap());
}
