//! Experiment configuration files.
//!
//! A config is a TOML document with an `[experiment]` section and optional `[geometry]`
//! and `[sweep]` sections. Unknown keys are rejected.

use std::path::Path;
use std::str::FromStr;

use hybridisc::{BoundaryKind, Complex64, SchemeKind};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    TwoDiscError,
    ModesVsSeparation,
    NineDiscDipole,
    ExactEval,
    DecayDiagnostics,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::TwoDiscError => "two-disc-error",
            ExperimentKind::ModesVsSeparation => "modes-vs-separation",
            ExperimentKind::NineDiscDipole => "nine-disc-dipole",
            ExperimentKind::ExactEval => "exact-eval",
            ExperimentKind::DecayDiagnostics => "decay-diagnostics",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Layout {
    TwoDisc,
    NineDisc,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub kind: ExperimentKind,
    /// CSV file name, relative to the output directory.
    pub output: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometrySection {
    pub layout: Layout,
    /// Half the centre distance of the two-disc problem.
    pub d: f64,
    /// Disc radius of the two-disc problem.
    pub s: Option<f64>,
    /// Far field as `[re, im]`.
    pub u0: Option<[f64; 2]>,
    /// Far field as a unit vector at this angle in degrees.
    pub u0_angle_deg: Option<f64>,
    pub bc: String,
}

impl Default for GeometrySection {
    fn default() -> Self {
        Self {
            layout: Layout::TwoDisc,
            d: 1.0,
            s: None,
            u0: None,
            u0_angle_deg: None,
            bc: "flow".into(),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub schemes: Vec<String>,
    /// Truncation grid, or per-separation truncations for `nine-disc-dipole`.
    pub modes: Vec<usize>,
    /// Circle gaps, strictly decreasing.
    pub separations: Vec<f64>,
    pub target: Option<f64>,
    /// Disc radii for `decay-diagnostics`.
    pub radii: Vec<f64>,
    pub k_max: Option<usize>,
    pub j_max: Option<usize>,
    /// Evaluation points `[x, y]` for `exact-eval`.
    pub points: Vec<[f64; 2]>,
    /// Equispaced samples per circle for `exact-eval`.
    pub boundary_samples: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub geometry: GeometrySection,
    #[serde(default)]
    pub sweep: SweepSection,
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: Self = toml::from_str(text).map_err(|e| bad(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn far_field(&self) -> Result<Complex64, CliError> {
        match (self.geometry.u0, self.geometry.u0_angle_deg) {
            (Some(_), Some(_)) => Err(bad(
                "give either geometry.u0 or geometry.u0_angle_deg, not both",
            )),
            (Some([x, y]), None) => Ok(Complex64::new(x, y)),
            (None, Some(deg)) => Ok(Complex64::from_polar(1.0, deg.to_radians())),
            (None, None) => Ok(Complex64::new(1.0, 0.0)),
        }
    }

    pub fn bc_kind(&self) -> Result<BoundaryKind, CliError> {
        match self.geometry.bc.as_str() {
            "flow" => Ok(BoundaryKind::Flow),
            "electrostatic" => Ok(BoundaryKind::Electrostatic),
            other => Err(bad(format!(
                "geometry.bc must be flow or electrostatic, got {other}"
            ))),
        }
    }

    pub fn schemes(&self) -> Result<Vec<SchemeKind>, CliError> {
        if self.sweep.schemes.iter().any(|s| s == "all") {
            return Ok(SchemeKind::ALL.to_vec());
        }
        self.sweep
            .schemes
            .iter()
            .map(|s| SchemeKind::from_str(s).map_err(|e| bad(e.to_string())))
            .collect()
    }

    pub fn radius(&self) -> Result<f64, CliError> {
        self.geometry.s.ok_or_else(|| bad("geometry.s is required"))
    }

    pub fn target(&self) -> Result<f64, CliError> {
        self.sweep
            .target
            .ok_or_else(|| bad("sweep.target is required"))
    }

    fn require_modes(&self) -> Result<(), CliError> {
        let m = &self.sweep.modes;
        if m.is_empty() {
            return Err(bad("sweep.modes must be non-empty"));
        }
        if m.contains(&0) || m.windows(2).any(|w| w[1] <= w[0]) {
            return Err(bad("sweep.modes must be positive and strictly ascending"));
        }
        Ok(())
    }

    fn require_separations(&self) -> Result<(), CliError> {
        let s = &self.sweep.separations;
        if s.is_empty() {
            return Err(bad("sweep.separations must be non-empty"));
        }
        if s.iter().any(|&x| !(x > 0.0)) || s.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(bad(
                "sweep.separations must be positive and strictly decreasing",
            ));
        }
        Ok(())
    }

    fn require_two_disc_radius(&self) -> Result<(), CliError> {
        let s = self.radius()?;
        let d = self.geometry.d;
        if !(s > 0.0 && s < d) {
            return Err(bad(format!(
                "two-disc geometry needs 0 < s < d, got s = {s}, d = {d}"
            )));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.far_field()?;
        self.bc_kind()?;
        if !(self.geometry.d > 0.0) {
            return Err(bad("geometry.d must be positive"));
        }
        if let Some(t) = self.sweep.target {
            if !(t > 0.0) {
                return Err(bad("sweep.target must be positive"));
            }
        }
        if self.experiment.output.trim().is_empty() {
            return Err(bad("experiment.output must name a file"));
        }
        match self.experiment.kind {
            ExperimentKind::TwoDiscError => {
                self.require_two_disc_radius()?;
                self.require_modes()?;
                if self.schemes()?.is_empty() {
                    return Err(bad("sweep.schemes must be non-empty"));
                }
            }
            ExperimentKind::ModesVsSeparation => {
                self.require_modes()?;
                self.require_separations()?;
                self.target()?;
                if self.geometry.layout == Layout::NineDisc && self.sweep.modes.len() < 2 {
                    return Err(bad("nine-disc convergence needs at least two truncations"));
                }
                if self.geometry.layout == Layout::TwoDisc {
                    if let Some(&gap) = self.sweep.separations.first() {
                        if !(gap < 2.0 * self.geometry.d) {
                            return Err(bad("two-disc separations must be below 2 d"));
                        }
                    }
                }
            }
            ExperimentKind::NineDiscDipole => {
                self.require_separations()?;
                self.require_modes()?;
                let per_separation = self.sweep.modes.len() == self.sweep.separations.len();
                if self.sweep.target.is_none() && !per_separation {
                    return Err(bad(
                        "nine-disc-dipole needs one mode count per separation or a sweep.target",
                    ));
                }
            }
            ExperimentKind::ExactEval => {
                self.require_two_disc_radius()?;
                if self.sweep.points.is_empty() && self.sweep.boundary_samples.unwrap_or(0) == 0 {
                    return Err(bad(
                        "exact-eval needs sweep.points or sweep.boundary_samples",
                    ));
                }
            }
            ExperimentKind::DecayDiagnostics => {
                let r = &self.sweep.radii;
                if r.is_empty() || r.iter().any(|&s| !(s > 0.0 && s < self.geometry.d)) {
                    return Err(bad("sweep.radii must be non-empty with 0 < s < d"));
                }
            }
        }
        Ok(())
    }
}
