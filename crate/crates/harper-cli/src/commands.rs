//! Subcommand implementations. Each writes its outputs into the run's
//! output directory and prints a one-line summary per artifact to stdout;
//! warnings go to stderr.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use harper_core::design::{export_layout, layout_couplings, optimize_center_coupling};
use harper_core::evolve::{
    boundary_injection_state, default_steps, intensity_map, propagate, single_photon_output, Side,
};
use harper_core::model::DeviceProfile;
use harper_core::spectral::band_trace;
use harper_core::twophoton::{
    grouped_reflectivity, hom_curve, relative_visibility, sample_counts, visibility,
    DistinguishabilityModel, HomCurve, PortGroups, TwoPhotonInput,
};
use harper_core::Error as CoreError;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::table::{sig12, write_atomic, Table};

pub struct RunContext {
    pub config: RunConfig,
    pub out_dir: PathBuf,
    pub seed_override: Option<u64>,
    pub steps_override: Option<usize>,
}

impl RunContext {
    fn out_path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }
}

fn emitted(path: &Path, what: &str) {
    println!("wrote {} ({what})", path.display());
}

/// Band structure along z: one row per sample with the eigenvalue of every
/// track plus the two boundary track numbers (1-based).
pub fn cmd_bands(ctx: &RunContext) -> CliResult<()> {
    let device = ctx.config.device()?;
    let section = ctx.config.bands_section();
    let trace = band_trace(&device, section.n_samples)?;
    for w in trace.warnings() {
        eprintln!(
            "warning: track {} continuity weak at sample {} (overlap {:.3})",
            w.track + 1,
            w.sample_index,
            w.overlap
        );
    }
    let boundary = trace.boundary_tracks();
    let mut text = String::new();
    text.push_str("z_cm");
    for t in 0..trace.n_tracks() {
        let _ = write!(text, "\tlam_{:02}", t + 1);
    }
    text.push_str("\tboundary_a\tboundary_b\n");
    for s in 0..trace.n_samples() {
        text.push_str(&sig12(trace.z_samples()[s]));
        for t in 0..trace.n_tracks() {
            let _ = write!(text, "\t{}", sig12(trace.track(t)[s]));
        }
        let _ = write!(text, "\t{}\t{}\n", boundary[0] + 1, boundary[1] + 1);
    }
    let path = ctx.out_path("bands.tsv");
    write_atomic(&path, &text)?;
    emitted(&path, "band trace");
    Ok(())
}

/// Inject the chosen boundary supermode, propagate the full device, and
/// write the site distribution (plus an optional per-z intensity map).
pub fn cmd_propagate(ctx: &RunContext, side: Side) -> CliResult<()> {
    let device = ctx.config.device()?;
    let section = ctx.config.propagate_section();
    let steps = ctx
        .steps_override
        .or(section.steps)
        .unwrap_or_else(|| default_steps(&device, 0.0, device.length()));
    let input = boundary_injection_state(&device, side)?;
    let unitary = propagate(&device, 0.0, device.length(), steps)?;
    let dist = single_photon_output(&unitary, &input)?;

    let tag = match side {
        Side::Left => "left",
        Side::Right => "right",
    };
    let mut text = String::from("site\tprobability\n");
    for (i, &p) in dist.probabilities().iter().enumerate() {
        let _ = write!(text, "{}\t{}\n", i + 1, sig12(p));
    }
    let path = ctx.out_path(&format!("distribution_{tag}.tsv"));
    write_atomic(&path, &text)?;
    emitted(&path, "output distribution");

    if section.map_samples > 0 {
        let (zs, rows) = intensity_map(&device, &input, section.map_samples)?;
        let mut text = String::from("z_cm");
        for i in 0..device.n_sites() {
            let _ = write!(text, "\tsite_{:02}", i + 1);
        }
        text.push('\n');
        for (z, row) in zs.iter().zip(&rows) {
            text.push_str(&sig12(*z));
            for &p in row {
                let _ = write!(text, "\t{}", sig12(p));
            }
            text.push('\n');
        }
        let path = ctx.out_path(&format!("map_{tag}.tsv"));
        write_atomic(&path, &text)?;
        emitted(&path, "intensity map");
    }
    Ok(())
}

/// Two-photon interference of the two boundary supermodes across the device:
/// writes the delay curve (with counts when flux and seed are set) and a
/// visibility report.
pub fn cmd_hom(ctx: &RunContext) -> CliResult<()> {
    let device = ctx.config.device()?;
    let section = ctx.config.hom_section();
    let steps = ctx
        .steps_override
        .unwrap_or_else(|| default_steps(&device, 0.0, device.length()));
    let unitary = propagate(&device, 0.0, device.length(), steps)?;
    let left = boundary_injection_state(&device, Side::Left)?;
    let right = boundary_injection_state(&device, Side::Right)?;
    let input = TwoPhotonInput::States(left, right);
    let groups = PortGroups::edge_defaults(device.n_sites());
    let model = DistinguishabilityModel::new(section.x0, section.sigma_tau_ps)?;

    let sigma = section.sigma_tau_ps;
    let half_steps = (section.delay_span_sigmas / section.delay_step_sigmas).round() as i64;
    let delays: Vec<f64> = (-half_steps..=half_steps)
        .map(|i| i as f64 * section.delay_step_sigmas * sigma)
        .collect();
    let mut curve = hom_curve(&unitary, &input, &groups, &model, &delays)?;

    let seed = ctx.seed_override.or(section.seed);
    if let (Some(flux), Some(seed)) = (section.flux, seed) {
        let counts = sample_counts(curve.probabilities(), flux, seed)?;
        curve = HomCurve::with_counts(curve, counts)?;
    }

    let mut text = String::from("delay_ps\tcoincidence");
    if curve.counts().is_some() {
        text.push_str("\tcounts\tpoisson_error");
    }
    text.push('\n');
    for i in 0..curve.len() {
        let _ = write!(
            text,
            "{}\t{}",
            sig12(curve.delays_ps()[i]),
            sig12(curve.probabilities()[i])
        );
        if let (Some(counts), Some(errors)) = (curve.counts(), curve.count_errors()) {
            let _ = write!(text, "\t{}\t{}", counts[i], sig12(errors[i]));
        }
        text.push('\n');
    }
    let curve_path = ctx.out_path("hom.tsv");
    write_atomic(&curve_path, &text)?;
    emitted(&curve_path, "coincidence curve");

    let vis = visibility(&curve)?;
    let mut report = String::new();
    let _ = write!(report, "visibility = {}\n", sig12(vis.value));
    match vis.sigma {
        Some(s) => {
            let _ = write!(report, "visibility_sigma = {}\n", sig12(s));
        }
        None => report.push_str("visibility_sigma = n/a (no counts sampled)\n"),
    }
    let _ = write!(report, "c_far = {}\n", sig12(vis.c_far));
    let _ = write!(report, "c_min = {}\n", sig12(vis.c_min));
    let _ = write!(
        report,
        "relative_visibility_vs_x0 = {}\n",
        sig12(relative_visibility(vis.value, section.x0)?)
    );
    let _ = write!(report, "x0 = {}\n", sig12(section.x0));
    let _ = write!(report, "sigma_tau_ps = {}\n", sig12(sigma));
    let report_path = ctx.out_path("visibility.txt");
    write_atomic(&report_path, &report)?;
    emitted(&report_path, "visibility report");
    println!("visibility {}", sig12(vis.value));
    Ok(())
}

/// Search the center coupling for the target splitting ratio; writes a
/// report and a complete re-usable device file carrying the optimized value.
pub fn cmd_optimize(ctx: &RunContext) -> CliResult<()> {
    let template = ctx.config.device()?;
    let section = ctx.config.optimize_section();
    let steps = ctx.steps_override.or(section.steps);
    let result = optimize_center_coupling(&template, section.target_r, section.tol, steps)
        .map_err(|e| match &e {
            CoreError::NoSignChange { sweep } => {
                let mut table = String::from("no sign change; sweep (c, r - target):\n");
                for (c, f) in sweep {
                    let _ = write!(table, "  {}\t{}\n", sig12(*c), sig12(*f));
                }
                CliError::Optimization(table)
            }
            CoreError::Contract { what, .. } if what.starts_with("root refinement") => {
                CliError::Optimization(e.to_string())
            }
            _ => CliError::from(e),
        })?;

    // Reflectivity at the optimum, recomputed for the report.
    let optimized = DeviceProfile::new(
        template.n_sites(),
        template.schedule().clone(),
        result.parameter,
    )?;
    let steps = steps.unwrap_or_else(|| default_steps(&optimized, 0.0, optimized.length()));
    let unitary = propagate(&optimized, 0.0, optimized.length(), steps)?;
    let input = boundary_injection_state(&optimized, Side::Left)?;
    let reflectivity = grouped_reflectivity(
        &unitary,
        &input,
        &PortGroups::edge_defaults(optimized.n_sites()),
    )?;

    let mut report = String::new();
    let _ = write!(report, "center_coupling_per_cm = {}\n", sig12(result.parameter));
    let _ = write!(report, "reflectivity = {}\n", sig12(reflectivity));
    let _ = write!(report, "objective_residual = {}\n", sig12(result.objective));
    let _ = write!(report, "iterations = {}\n", result.iterations);
    let _ = write!(
        report,
        "bracket = {} {}\n",
        sig12(result.bracket.0),
        sig12(result.bracket.1)
    );
    let report_path = ctx.out_path("optimize.txt");
    write_atomic(&report_path, &report)?;
    emitted(&report_path, "optimization report");

    let mut updated = ctx.config.clone();
    updated.center_coupling_per_cm = result.parameter;
    let device_text = toml::to_string(&updated)
        .map_err(|e| CliError::Numeric(format!("cannot serialize device file: {e}")))?;
    let device_path = ctx.out_path("device_optimized.toml");
    write_atomic(&device_path, &device_text)?;
    emitted(&device_path, "optimized device file");
    println!(
        "center coupling {} reflectivity {}",
        sig12(result.parameter),
        sig12(reflectivity)
    );
    Ok(())
}

/// Export the waveguide-separation layout plus a metadata sidecar.
pub fn cmd_layout(ctx: &RunContext) -> CliResult<()> {
    let device = ctx.config.device()?;
    let section = ctx.config.layout_section();
    let map = ctx.config.geometry_map()?;
    let pitch = section.pitch_cm.unwrap_or(device.length() / 64.0);
    let layout = export_layout(&device, &map, pitch, section.anchor_um)?;

    // Round-trip audit before anything is written.
    let back = layout_couplings(&layout, &map)?;
    for (s, &z) in layout.z_samples().iter().enumerate() {
        let bonds = device.bonds_at(z)?;
        for (k, (&kappa, &derived)) in bonds.iter().zip(&back[s]).enumerate() {
            if (derived - kappa).abs() > 1e-9 * kappa {
                return Err(CliError::Numeric(format!(
                    "layout round trip failed at z = {z}, bond {}: {derived} vs {kappa}",
                    k + 1
                )));
            }
        }
    }

    let mut text = String::from("z_cm");
    for i in 0..layout.n_waveguides() {
        let _ = write!(text, "\tx_{:02}_um", i + 1);
    }
    text.push('\n');
    for (s, &z) in layout.z_samples().iter().enumerate() {
        text.push_str(&sig12(z));
        for &x in layout.row(s) {
            let _ = write!(text, "\t{}", sig12(x));
        }
        text.push('\n');
    }
    let path = ctx.out_path("layout.tsv");
    write_atomic(&path, &text)?;
    emitted(&path, "waveguide layout");

    let schedule = device.schedule();
    let (num, den) = schedule.b_bar();
    let mut meta = String::new();
    let _ = write!(meta, "n_sites = {}\n", device.n_sites());
    let _ = write!(meta, "kappa0_per_cm = {}\n", sig12(schedule.kappa0()));
    let _ = write!(meta, "b_bar = {{ num = {num}, den = {den} }}\n");
    let _ = write!(meta, "phi_rad = {}\n", sig12(schedule.phi_at(0.0)));
    let _ = write!(meta, "length_cm = {}\n", sig12(device.length()));
    let _ = write!(
        meta,
        "center_coupling_per_cm = {}\n",
        sig12(device.center_coupling())
    );
    let _ = write!(meta, "pitch_cm = {}\n", sig12(pitch));
    let _ = write!(meta, "anchor_um = {}\n", sig12(section.anchor_um));
    let _ = write!(meta, "\n[geometry]\n");
    let _ = write!(meta, "a_per_cm = {}\n", sig12(map.a_per_cm()));
    let _ = write!(meta, "b_per_um = {}\n", sig12(map.b_per_um()));
    let meta_path = ctx.out_path("layout_meta.toml");
    write_atomic(&meta_path, &meta)?;
    emitted(&meta_path, "layout metadata");
    Ok(())
}

/// Overlap fidelity between the probability columns of two emitted
/// distribution files.
pub fn cmd_fidelity(
    out_dir: &Path,
    file_a: &Path,
    file_b: &Path,
) -> CliResult<()> {
    let dist_a = read_distribution(file_a)?;
    let dist_b = read_distribution(file_b)?;
    let f = harper_core::evolve::fidelity(&dist_a, &dist_b)?;
    let mut report = String::new();
    let _ = write!(report, "fidelity = {}\n", sig12(f));
    let _ = write!(report, "file_a = {}\n", file_a.display());
    let _ = write!(report, "file_b = {}\n", file_b.display());
    let path = out_dir.join("fidelity.txt");
    write_atomic(&path, &report)?;
    emitted(&path, "fidelity report");
    println!("fidelity {}", sig12(f));
    Ok(())
}

fn read_distribution(path: &Path) -> CliResult<harper_core::evolve::OutputDistribution> {
    let table = Table::read(path)?;
    let probs = table.column("probability", path)?;
    harper_core::evolve::OutputDistribution::new(probs).map_err(|e| {
        CliError::Numeric(format!("{}: {e}", path.display()))
    })
}
