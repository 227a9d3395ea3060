//! Scenario files.
//!
//! TOML with all physical quantities in SI and the unit spelled out in the
//! key name (`radius_m`, `T_K`, `omega0_rad_s`, ...). See `print-defaults`
//! for a complete example.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use rotfric_core::materials::load_tabulated;
use rotfric_core::{DielectricModel, LorentzTerm, UnitSystem};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub units: UnitsConfig,
    pub body: BodyConfig,
    pub environment: EnvironmentConfig,
    pub sweep: SweepConfig,
    #[serde(default)]
    pub quadrature: QuadratureSection,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitsConfig {
    /// Frequency scale used internally; results in SI do not depend on it.
    pub omega_c_rad_s: f64,
}

impl Default for UnitsConfig {
    fn default() -> Self {
        Self {
            omega_c_rad_s: 1e13,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MaterialSpec {
    Drude {
        #[serde(rename = "sigma0_S_per_m")]
        sigma0_s_per_m: f64,
    },
    Lorentz {
        terms: Vec<LorentzSpec>,
    },
    /// Comma-separated `omega_rad_s, re_eps, im_eps` records.
    Tabulated {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LorentzSpec {
    pub strength_rad2_s2: f64,
    pub resonance_rad_s: f64,
    pub damping_rad_s: f64,
}

impl LorentzSpec {
    fn to_internal(self, u: &UnitSystem) -> LorentzTerm {
        let s = u.frequency_to_internal(1.0);
        LorentzTerm::new(
            self.strength_rad2_s2 * s * s,
            self.resonance_rad_s * s,
            self.damping_rad_s * s,
        )
    }
}

impl MaterialSpec {
    /// Build the dielectric model; relative table paths resolve against `base`.
    pub fn build(&self, units: &UnitSystem, base: &Path) -> Result<DielectricModel> {
        Ok(match self {
            MaterialSpec::Drude { sigma0_s_per_m } => {
                DielectricModel::drude(units.conductivity_to_internal(*sigma0_s_per_m))?
            }
            MaterialSpec::Lorentz { terms } => {
                DielectricModel::lorentz(terms.iter().map(|t| t.to_internal(units)).collect())?
            }
            MaterialSpec::Tabulated { path } => {
                let p = if path.is_absolute() {
                    path.clone()
                } else {
                    base.join(path)
                };
                load_tabulated(&p, units)?
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodyConfig {
    pub radius_m: f64,
    #[serde(rename = "T_K")]
    pub t_k: f64,
    #[serde(default)]
    pub omega0_rad_s: f64,
    pub material: MaterialSpec,
    /// Separate material for the axial (z) response.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axial_material: Option<MaterialSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometryKind {
    Vacuum,
    HalfSpace,
    IdealConductor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentConfig {
    pub geometry: GeometryKind,
    #[serde(rename = "T0_K")]
    pub t0_k: f64,
    /// Separation for sweeps that do not vary it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub material: Option<MaterialSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    /// Grid of separations in metres.
    Separation,
    /// Grid of angular frequencies in rad/s.
    Spectrum,
    /// Grid of rotation speeds `omega0` in rad/s.
    TorqueCurve,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Log,
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(default)]
    pub spacing: Spacing,
}

impl GridSpec {
    pub fn values(&self) -> Result<Vec<f64>> {
        let v = match (&self.values, self.start, self.stop, self.points) {
            (Some(v), None, None, None) => v.clone(),
            (None, Some(a), Some(b), Some(n)) => {
                if n < 1 {
                    bail!("sweep.grid.points must be >= 1");
                }
                if n == 1 {
                    vec![a]
                } else {
                    (0..n)
                        .map(|i| {
                            let f = i as f64 / (n - 1) as f64;
                            match self.spacing {
                                Spacing::Linear => a + (b - a) * f,
                                Spacing::Log => {
                                    if !(a > 0.0 && b > 0.0) {
                                        return f64::NAN;
                                    }
                                    (a.ln() + (b.ln() - a.ln()) * f).exp()
                                }
                            }
                        })
                        .collect()
                }
            }
            _ => bail!("sweep.grid: give either `values` or all of `start`, `stop`, `points`"),
        };
        if v.is_empty() {
            bail!("sweep.grid: grid is empty");
        }
        if v.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            bail!("sweep.grid: values must be positive and finite");
        }
        if v.windows(2).any(|w| w[1] <= w[0]) {
            bail!("sweep.grid: values must be strictly increasing");
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub kind: SweepKind,
    pub grid: GridSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSection {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_refinements: usize,
}

impl Default for QuadratureSection {
    fn default() -> Self {
        Self {
            rel_tol: 1e-6,
            abs_tol: 0.0,
            max_refinements: 2000,
        }
    }
}

impl QuadratureSection {
    pub fn to_core(&self) -> rotfric_core::QuadratureConfig {
        rotfric_core::QuadratureConfig {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_intervals: self.max_refinements,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub path: PathBuf,
    /// Significant digits in the CSV.
    pub precision: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            path: PathBuf::from("rotfric.csv"),
            precision: 9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BathModel {
    #[default]
    Lorentz,
    Zero,
}

/// Oracle verification scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default)]
    pub model: BathModel,
    /// In-plane body-frame susceptibility terms.
    #[serde(default)]
    pub terms: Vec<LorentzSpec>,
    /// Axial terms; the in-plane ones are reused when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axial_terms: Option<Vec<LorentzSpec>>,
    pub modes: usize,
    #[serde(rename = "T_K")]
    pub t_k: f64,
    #[serde(default)]
    pub omega0_rad_s: f64,
    #[serde(default)]
    pub m: i32,
    pub omega_rad_s: Vec<f64>,
    pub tolerance: f64,
    /// Negate the in-plane coupling of this mode (fault injection).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corrupt_mode: Option<usize>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        let nu0 = 1e13;
        Self {
            model: BathModel::Lorentz,
            terms: vec![LorentzSpec {
                strength_rad2_s2: nu0 * nu0,
                resonance_rad_s: nu0,
                damping_rad_s: 0.01 * nu0,
            }],
            axial_terms: None,
            modes: 4000,
            t_k: 50.0,
            omega0_rad_s: 0.0,
            m: 0,
            omega_rad_s: vec![0.2 * nu0, 0.5 * nu0, 2.0 * nu0, 3.0 * nu0],
            tolerance: 0.01,
            corrupt_mode: None,
        }
    }
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(text).context("config parse error")?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    /// sha256 of the canonical re-serialisation, so formatting and comments
    /// in the source file do not change it.
    pub fn hash(&self) -> Result<String> {
        Ok(hex::encode(Sha256::digest(self.to_toml()?.as_bytes())))
    }

    pub fn unit_system(&self) -> Result<UnitSystem> {
        UnitSystem::new(self.units.omega_c_rad_s).context("units.omega_c_rad_s")
    }

    /// Field-level validation; messages name the offending key.
    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64, name: &str| -> Result<()> {
            if !(v > 0.0 && v.is_finite()) {
                bail!("{name} must be positive (got {v})");
            }
            Ok(())
        };
        let nonneg = |v: f64, name: &str| -> Result<()> {
            if !(v >= 0.0 && v.is_finite()) {
                bail!("{name} must be >= 0 (got {v})");
            }
            Ok(())
        };
        pos(self.units.omega_c_rad_s, "units.omega_c_rad_s")?;
        pos(self.body.radius_m, "body.radius_m")?;
        nonneg(self.body.t_k, "body.T_K")?;
        if !self.body.omega0_rad_s.is_finite() {
            bail!("body.omega0_rad_s must be finite");
        }
        nonneg(self.environment.t0_k, "environment.T0_K")?;
        match self.environment.geometry {
            GeometryKind::Vacuum => {}
            GeometryKind::HalfSpace => {
                if self.environment.material.is_none() {
                    bail!("environment.material is required for geometry = \"half_space\"");
                }
            }
            GeometryKind::IdealConductor => {}
        }
        if let Some(z) = self.environment.z_m {
            pos(z, "environment.z_m")?;
        }
        if self.sweep.kind != SweepKind::Separation
            && self.environment.geometry != GeometryKind::Vacuum
            && self.environment.z_m.is_none()
        {
            bail!("environment.z_m is required for this sweep kind with a planar geometry");
        }
        if self.sweep.kind == SweepKind::Separation
            && self.environment.geometry == GeometryKind::Vacuum
        {
            bail!("sweep.kind = \"separation\" needs a planar environment.geometry");
        }
        self.sweep.grid.values().context("sweep.grid")?;
        let q = &self.quadrature;
        if !(q.rel_tol > 1e-12 && q.rel_tol < 1e-2) {
            bail!(
                "quadrature.rel_tol must lie in (1e-12, 1e-2) (got {})",
                q.rel_tol
            );
        }
        nonneg(q.abs_tol, "quadrature.abs_tol")?;
        if q.max_refinements < 1 {
            bail!("quadrature.max_refinements must be >= 1");
        }
        if !(1..=17).contains(&self.output.precision) {
            bail!("output.precision must be between 1 and 17");
        }
        if let Some(v) = &self.verify {
            v.validate()?;
        }
        Ok(())
    }
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.modes < 2 {
            bail!("verify.modes must be >= 2");
        }
        if !(self.t_k >= 0.0) {
            bail!("verify.T_K must be >= 0");
        }
        if self.omega_rad_s.is_empty() {
            bail!("verify.omega_rad_s must list at least one frequency");
        }
        if !(self.tolerance > 0.0) {
            bail!("verify.tolerance must be positive");
        }
        if self.model == BathModel::Lorentz && self.terms.is_empty() {
            bail!("verify.terms must not be empty for model = \"lorentz\"");
        }
        if let Some(i) = self.corrupt_mode {
            if i >= self.modes {
                bail!(
                    "verify.corrupt_mode = {i} is out of range for {} modes",
                    self.modes
                );
            }
        }
        Ok(())
    }

    pub fn terms_internal(&self, u: &UnitSystem) -> (Vec<LorentzTerm>, Vec<LorentzTerm>) {
        let xx: Vec<_> = self.terms.iter().map(|t| t.to_internal(u)).collect();
        let zz = self
            .axial_terms
            .as_ref()
            .map(|v| v.iter().map(|t| t.to_internal(u)).collect())
            .unwrap_or_else(|| xx.clone());
        (xx, zz)
    }
}

/// Default scenario: 10 nm gold sphere, 10 K body, 1 K ideal-conductor
/// surroundings, separations spanning omega z / c from ~0.2 to ~65 at the
/// dominant thermal frequency.
pub fn default_config() -> ScenarioConfig {
    ScenarioConfig {
        units: UnitsConfig::default(),
        body: BodyConfig {
            radius_m: 1e-8,
            t_k: 10.0,
            omega0_rad_s: 1e13,
            material: MaterialSpec::Drude {
                sigma0_s_per_m: 1.6e7,
            },
            axial_material: None,
        },
        environment: EnvironmentConfig {
            geometry: GeometryKind::IdealConductor,
            t0_k: 1.0,
            z_m: None,
            material: None,
        },
        sweep: SweepConfig {
            kind: SweepKind::Separation,
            grid: GridSpec {
                values: None,
                start: Some(1e-5),
                stop: Some(3e-3),
                points: Some(60),
                spacing: Spacing::Log,
            },
        },
        quadrature: QuadratureSection::default(),
        output: OutputConfig {
            path: PathBuf::from("gold_separation.csv"),
            precision: 9,
        },
        verify: Some(VerifyConfig::default()),
    }
}
