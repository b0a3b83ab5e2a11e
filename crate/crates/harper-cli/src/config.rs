//! Run configuration: one flat TOML file fully describes a run. Unknown
//! keys are rejected everywhere so a typo cannot silently fall back to a
//! default.

use std::path::Path;

use serde::{Deserialize, Serialize};

use harper_core::model::{DeviceProfile, GeometryMap, HarperSchedule, LambdaProfile};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n_sites: usize,
    pub kappa0_per_cm: f64,
    pub b_bar: BBar,
    pub phi_rad: f64,
    pub length_cm: f64,
    pub lambda_profile: LambdaSection,
    pub center_coupling_per_cm: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometrySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bands: Option<BandsSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub propagate: Option<PropagateSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hom: Option<HomSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimize: Option<OptimizeSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<LayoutSection>,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BBar {
    pub num: u32,
    pub den: u32,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaSection {
    pub kind: LambdaKind,
    pub breakpoints: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaKind {
    Constant,
    RaisedCosine,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    pub a_per_cm: f64,
    pub b_per_um: f64,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BandsSection {
    pub n_samples: usize,
}

impl Default for BandsSection {
    fn default() -> Self {
        BandsSection { n_samples: 65 }
    }
}

#[derive(Debug, Clone, Copy, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PropagateSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    /// Number of z samples for the per-z intensity map; 0 disables the map.
    #[serde(default)]
    pub map_samples: usize,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct HomSection {
    pub x0: f64,
    #[serde(default = "default_sigma_tau")]
    pub sigma_tau_ps: f64,
    #[serde(default = "default_delay_span")]
    pub delay_span_sigmas: f64,
    #[serde(default = "default_delay_step")]
    pub delay_step_sigmas: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flux: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

fn default_sigma_tau() -> f64 {
    1.0
}
fn default_delay_span() -> f64 {
    6.0
}
fn default_delay_step() -> f64 {
    0.25
}

impl Default for HomSection {
    fn default() -> Self {
        HomSection {
            x0: 1.0,
            sigma_tau_ps: default_sigma_tau(),
            delay_span_sigmas: default_delay_span(),
            delay_step_sigmas: default_delay_step(),
            flux: None,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeSection {
    #[serde(default = "default_target_r")]
    pub target_r: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
}

fn default_target_r() -> f64 {
    0.5
}
fn default_tol() -> f64 {
    harper_core::design::DEFAULT_REFLECTIVITY_TOL
}

impl Default for OptimizeSection {
    fn default() -> Self {
        OptimizeSection {
            target_r: default_target_r(),
            tol: default_tol(),
            steps: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pitch_cm: Option<f64>,
    #[serde(default)]
    pub anchor_um: f64,
}

impl Default for LayoutSection {
    fn default() -> Self {
        LayoutSection {
            pitch_cm: None,
            anchor_um: 0.0,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read {}: {e}", path.display()))
        })?;
        let config: RunConfig = toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> CliResult<()> {
        match (self.lambda_profile.kind, self.lambda_profile.breakpoints.len()) {
            (LambdaKind::Constant, 1) | (LambdaKind::RaisedCosine, 2) => {}
            (LambdaKind::Constant, n) => {
                return Err(CliError::Config(format!(
                    "lambda_profile: kind \"constant\" takes exactly 1 breakpoint, got {n}"
                )));
            }
            (LambdaKind::RaisedCosine, n) => {
                return Err(CliError::Config(format!(
                    "lambda_profile: kind \"raised_cosine\" takes exactly 2 breakpoints \
                     (end, mid), got {n}"
                )));
            }
        }
        if let Some(h) = &self.hom {
            if !(h.x0 >= 0.0 && h.x0 <= 1.0) {
                return Err(CliError::Config(format!(
                    "hom.x0 must lie in [0, 1], got {}",
                    h.x0
                )));
            }
            if !(h.sigma_tau_ps > 0.0) {
                return Err(CliError::Config(format!(
                    "hom.sigma_tau_ps must be positive, got {}",
                    h.sigma_tau_ps
                )));
            }
            if !(h.delay_step_sigmas > 0.0) || !(h.delay_span_sigmas > 0.0) {
                return Err(CliError::Config(
                    "hom delay grid: span and step must be positive".into(),
                ));
            }
            if let Some(flux) = h.flux {
                if !(flux > 0.0) {
                    return Err(CliError::Config(format!(
                        "hom.flux must be positive, got {flux}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// The modulation envelope described by the config.
    pub fn lambda(&self) -> LambdaProfile {
        let b = &self.lambda_profile.breakpoints;
        match self.lambda_profile.kind {
            LambdaKind::Constant => LambdaProfile::Constant(b[0]),
            LambdaKind::RaisedCosine => LambdaProfile::RaisedCosine {
                end: b[0],
                mid: b[1],
            },
        }
    }

    /// Build the device, classifying any model-level rejection as a config
    /// problem (the values came straight from the file).
    pub fn device(&self) -> CliResult<DeviceProfile> {
        let schedule = HarperSchedule::new(
            self.kappa0_per_cm,
            self.b_bar.num,
            self.b_bar.den,
            self.lambda(),
            self.phi_rad,
            self.length_cm,
        )
        .map_err(|e| CliError::Config(e.to_string()))?;
        DeviceProfile::new(self.n_sites, schedule, self.center_coupling_per_cm)
            .map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn geometry_map(&self) -> CliResult<GeometryMap> {
        match &self.geometry {
            None => Ok(GeometryMap::default()),
            Some(g) => GeometryMap::new(g.a_per_cm, g.b_per_um)
                .map_err(|e| CliError::Config(e.to_string())),
        }
    }

    pub fn bands_section(&self) -> BandsSection {
        self.bands.unwrap_or_default()
    }

    pub fn propagate_section(&self) -> PropagateSection {
        self.propagate.unwrap_or_default()
    }

    pub fn hom_section(&self) -> HomSection {
        self.hom.unwrap_or_default()
    }

    pub fn optimize_section(&self) -> OptimizeSection {
        self.optimize.unwrap_or_default()
    }

    pub fn layout_section(&self) -> LayoutSection {
        self.layout.unwrap_or_default()
    }
}
