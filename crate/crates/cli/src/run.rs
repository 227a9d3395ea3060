//! Sweep execution and CSV emission.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use rayon::prelude::*;

use rotfric_core::greens::PlanarGeometry;
use rotfric_core::observables::{integrate_observables, spectral_densities, sweep_point};
use rotfric_core::{
    Environment, Polarizability, QuadratureConfig, SpinningBody, Totals, UnitSystem,
};

use crate::config::{GeometryKind, ScenarioConfig, SweepKind};

/// A configuration translated to internal units.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub units: UnitSystem,
    pub body: SpinningBody,
    pub env: Environment,
    pub kind: SweepKind,
    /// Sweep grid in SI.
    pub grid_si: Vec<f64>,
    pub quadrature: QuadratureConfig,
}

impl Scenario {
    pub fn build(cfg: &ScenarioConfig, base: &Path) -> Result<Self> {
        cfg.validate()?;
        let units = cfg.unit_system()?;
        let material = cfg
            .body
            .material
            .build(&units, base)
            .context("body.material")?;
        let radius = units.length_to_internal(cfg.body.radius_m);
        let pol = match &cfg.body.axial_material {
            Some(axial) => {
                let axial = axial.build(&units, base).context("body.axial_material")?;
                Polarizability::anisotropic(radius, material, axial)
            }
            None => Polarizability::new(radius, material),
        }
        .context("body")?;
        let body = SpinningBody::new(
            pol,
            units.temperature_to_internal(cfg.body.t_k),
            units.frequency_to_internal(cfg.body.omega0_rad_s),
        )
        .context("body")?;

        // Separation sweeps overwrite z per point; a placeholder keeps the
        // geometry valid until then.
        let z = cfg
            .environment
            .z_m
            .map(|z| units.length_to_internal(z))
            .unwrap_or(1.0);
        let geometry = match cfg.environment.geometry {
            GeometryKind::Vacuum => PlanarGeometry::Vacuum,
            GeometryKind::IdealConductor => PlanarGeometry::IdealConductor { z },
            GeometryKind::HalfSpace => {
                let spec = cfg
                    .environment
                    .material
                    .as_ref()
                    .context("environment.material is required")?;
                PlanarGeometry::HalfSpace {
                    material: spec.build(&units, base).context("environment.material")?,
                    z,
                }
            }
        };
        let env = Environment::new(
            geometry,
            units.temperature_to_internal(cfg.environment.t0_k),
        )
        .context("environment")?;
        let quadrature = cfg.quadrature.to_core();
        quadrature.validate().context("quadrature")?;
        Ok(Self {
            units,
            body,
            env,
            kind: cfg.sweep.kind,
            grid_si: cfg.sweep.grid.values()?,
            quadrature,
        })
    }
}

/// Tabulated sweep result; `values` rows align with `columns` minus the
/// trailing `error` column.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Row>,
    pub summary: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub values: Vec<f64>,
    pub error: Option<String>,
}

impl Table {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.error.is_some()).count()
    }

    pub fn all_failed(&self) -> bool {
        !self.rows.is_empty() && self.failures() == self.rows.len()
    }
}

fn failed_row(x: f64, width: usize, e: impl std::fmt::Display) -> Row {
    let mut values = vec![f64::NAN; width];
    values[0] = x;
    Row {
        values,
        error: Some(e.to_string()),
    }
}

/// Execute the sweep. Points are evaluated in parallel on the current rayon
/// pool and collected in grid order.
pub fn execute(s: &Scenario) -> Table {
    match s.kind {
        SweepKind::Separation => separation(s),
        SweepKind::TorqueCurve => torque_curve(s),
        SweepKind::Spectrum => spectrum(s),
    }
}

fn separation(s: &Scenario) -> Table {
    let u = &s.units;
    let columns = vec![
        "z_m",
        "P_halfspace_W",
        "P_vacuum_W",
        "M_Nm",
        "err_P_W",
        "err_M_Nm",
        "error",
    ];
    let width = columns.len() - 1;
    let vacuum_env = Environment {
        geometry: PlanarGeometry::Vacuum,
        t0: s.env.t0,
    };
    let vacuum = integrate_observables(&s.body, &vacuum_env, &s.quadrature);
    let rows: Vec<Row> = s
        .grid_si
        .par_iter()
        .map(|&z_m| {
            let vac = match &vacuum {
                Ok(v) => v,
                Err(e) => return failed_row(z_m, width, format!("vacuum reference: {e}")),
            };
            let p = sweep_point(&s.body, &s.env, u.length_to_internal(z_m), &s.quadrature);
            match p.result {
                Ok(t) => Row {
                    values: vec![
                        z_m,
                        u.power_to_si(t.power),
                        u.power_to_si(vac.power),
                        u.torque_to_si(t.torque),
                        u.power_to_si(t.power_error),
                        u.torque_to_si(t.torque_error),
                    ],
                    error: None,
                },
                Err(e) => failed_row(z_m, width, e),
            }
        })
        .collect();
    let summary = point_summary("z_m", &rows, |r| {
        (r.values[1], r.values[4], r.values[3], r.values[5])
    });
    Table {
        columns,
        rows,
        summary,
    }
}

fn torque_curve(s: &Scenario) -> Table {
    let u = &s.units;
    let columns = vec![
        "omega0_rad_s",
        "P_W",
        "M_Nm",
        "M_dipole_Nm",
        "M_field_Nm",
        "err_P_W",
        "err_M_Nm",
        "error",
    ];
    let width = columns.len() - 1;
    let rows: Vec<Row> = s
        .grid_si
        .par_iter()
        .map(|&w0| {
            let mut body = s.body.clone();
            body.omega0 = u.frequency_to_internal(w0);
            match integrate_observables(&body, &s.env, &s.quadrature) {
                Ok(t) => Row {
                    values: vec![
                        w0,
                        u.power_to_si(t.power),
                        u.torque_to_si(t.torque),
                        u.torque_to_si(t.torque_dipole),
                        u.torque_to_si(t.torque_field),
                        u.power_to_si(t.power_error),
                        u.torque_to_si(t.torque_error),
                    ],
                    error: None,
                },
                Err(e) => failed_row(w0, width, e),
            }
        })
        .collect();
    let summary = point_summary("omega0_rad_s", &rows, |r| {
        (r.values[1], r.values[5], r.values[2], r.values[6])
    });
    Table {
        columns,
        rows,
        summary,
    }
}

fn spectrum(s: &Scenario) -> Table {
    let u = &s.units;
    let columns = vec![
        "omega_rad_s",
        "dPdw_zz_Js",
        "dPdw_xx_minus_Js",
        "dPdw_xx_plus_Js",
        "dPdw_total_Js",
        "dPdw_vacuum_total_Js",
        "dMdw_plus_Nms",
        "dMdw_minus_Nms",
        "dMdw_total_Nms",
        "error",
    ];
    let width = columns.len() - 1;
    let inner = s.quadrature.tightened(0.1);
    let vacuum_env = Environment {
        geometry: PlanarGeometry::Vacuum,
        t0: s.env.t0,
    };
    let rows: Vec<Row> = s
        .grid_si
        .par_iter()
        .map(|&w_si| {
            let w = u.frequency_to_internal(w_si);
            let here = spectral_densities(&s.body, &s.env, w, &inner);
            let vac = spectral_densities(&s.body, &vacuum_env, w, &inner);
            match (here, vac) {
                (Ok(p), Ok(v)) => {
                    let dp = |x: f64| u.power_density_to_si(x);
                    let dm = |x: f64| u.torque_density_to_si(x);
                    Row {
                        values: vec![
                            w_si,
                            dp(p.power.zz),
                            dp(p.power.xx_minus),
                            dp(p.power.xx_plus),
                            dp(p.power.total()),
                            dp(v.power.total()),
                            dm(p.torque.plus),
                            dm(p.torque.minus),
                            dm(p.torque.total()),
                        ],
                        error: None,
                    }
                }
                (Err(e), _) | (_, Err(e)) => failed_row(w_si, width, e),
            }
        })
        .collect();
    let summary = match integrate_observables(&s.body, &s.env, &s.quadrature) {
        Ok(t) => totals_summary(u, &t, &rows),
        Err(e) => format!(
            "spectrum: {} points ({} failed); totals unavailable: {e}",
            rows.len(),
            failures(&rows)
        ),
    };
    Table {
        columns,
        rows,
        summary,
    }
}

fn failures(rows: &[Row]) -> usize {
    rows.iter().filter(|r| r.error.is_some()).count()
}

fn totals_summary(u: &UnitSystem, t: &Totals, rows: &[Row]) -> String {
    format!(
        "spectrum: {} points ({} failed); P = {:.6e} +/- {:.2e} W, M = {:.6e} +/- {:.2e} N m",
        rows.len(),
        failures(rows),
        u.power_to_si(t.power),
        u.power_to_si(t.power_error),
        u.torque_to_si(t.torque),
        u.torque_to_si(t.torque_error)
    )
}

/// Summary of the last successful point of a sweep.
fn point_summary(name: &str, rows: &[Row], pick: impl Fn(&Row) -> (f64, f64, f64, f64)) -> String {
    let head = format!("{} points ({} failed)", rows.len(), failures(rows));
    match rows.iter().rev().find(|r| r.error.is_none()) {
        Some(r) => {
            let (p, ep, m, em) = pick(r);
            format!(
                "{head}; at {name} = {:.6e}: P = {:.6e} +/- {:.2e} W, M = {:.6e} +/- {:.2e} N m",
                r.values[0], p, ep, m, em
            )
        }
        None => format!("{head}; no point converged"),
    }
}

/// Format with `digits` significant digits in scientific notation.
pub fn format_value(v: f64, digits: usize) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    format!("{:.*e}", digits.saturating_sub(1), v)
}

fn sanitize(msg: &str) -> String {
    let cleaned: String = msg
        .chars()
        .map(|c| if c == '\n' || c == '\r' { ' ' } else { c })
        .collect();
    format!("\"{}\"", cleaned.replace('"', "'"))
}

/// Render the CSV: `#` metadata lines, a header row, then one row per point.
pub fn render_csv(table: &Table, cfg: &ScenarioConfig, digits: usize) -> Result<String> {
    let mut out = String::new();
    writeln!(out, "# rotfric {}", env!("CARGO_PKG_VERSION"))?;
    writeln!(out, "# config_hash sha256:{}", cfg.hash()?)?;
    let kind = match cfg.sweep.kind {
        SweepKind::Separation => "separation",
        SweepKind::Spectrum => "spectrum",
        SweepKind::TorqueCurve => "torque_curve",
    };
    writeln!(out, "# sweep {kind}")?;
    writeln!(
        out,
        "# omega_c_rad_s {}",
        format_value(cfg.units.omega_c_rad_s, digits)
    )?;
    writeln!(out, "{}", table.columns.join(","))?;
    for r in &table.rows {
        let mut fields: Vec<String> = r.values.iter().map(|v| format_value(*v, digits)).collect();
        fields.push(r.error.as_deref().map(sanitize).unwrap_or_default());
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(out)
}
