//! Complex permittivity models and tabulated-data ingestion.
//!
//! Frequencies and conductivities are in internal units (see [`crate::units`]).

use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::units::UnitSystem;

/// One Lorentz term `strength / (resonance^2 - omega^2 - i damping omega)`.
///
/// `strength` carries units of frequency squared (a plasma frequency squared);
/// a zero resonance gives a free-carrier (Drude–Lorentz) term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzTerm {
    pub strength: f64,
    pub resonance: f64,
    pub damping: f64,
}

impl LorentzTerm {
    pub fn new(strength: f64, resonance: f64, damping: f64) -> Self {
        Self {
            strength,
            resonance,
            damping,
        }
    }

    /// Contribution at signed frequency; conjugate-symmetric by construction.
    pub fn response(&self, omega: f64) -> Complex64 {
        let den = Complex64::new(
            self.resonance * self.resonance - omega * omega,
            -self.damping * omega,
        );
        Complex64::new(self.strength, 0.0) / den
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DielectricModel {
    /// Low-frequency Drude metal `eps = 1 + i sigma0 / omega` (`sigma0` is the
    /// dc conductivity divided by eps0, in internal frequency units).
    Drude { sigma0: f64 },
    /// `eps = 1 + sum of Lorentz terms`.
    Lorentz(Vec<LorentzTerm>),
    /// Linear interpolation in frequency, no extrapolation.
    Tabulated(Vec<(f64, Complex64)>),
}

impl DielectricModel {
    pub fn drude(sigma0: f64) -> Result<Self> {
        let m = DielectricModel::Drude { sigma0 };
        m.validate()?;
        Ok(m)
    }

    pub fn lorentz(terms: Vec<LorentzTerm>) -> Result<Self> {
        let m = DielectricModel::Lorentz(terms);
        m.validate()?;
        Ok(m)
    }

    pub fn tabulated(points: Vec<(f64, Complex64)>) -> Result<Self> {
        let m = DielectricModel::Tabulated(points);
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DielectricModel::Drude { sigma0 } => {
                if !(*sigma0 > 0.0 && sigma0.is_finite()) {
                    return Err(Error::Domain(format!(
                        "Drude sigma0 = {sigma0} must be > 0"
                    )));
                }
            }
            DielectricModel::Lorentz(terms) => {
                for (k, t) in terms.iter().enumerate() {
                    if !(t.damping > 0.0) {
                        return Err(Error::Passivity(format!(
                            "Lorentz term {k} has damping {} <= 0",
                            t.damping
                        )));
                    }
                    if !(t.resonance >= 0.0) {
                        return Err(Error::Domain(format!(
                            "Lorentz term {k} has negative resonance {}",
                            t.resonance
                        )));
                    }
                    if !(t.strength >= 0.0) {
                        return Err(Error::Passivity(format!(
                            "Lorentz term {k} has negative strength {}",
                            t.strength
                        )));
                    }
                }
            }
            DielectricModel::Tabulated(points) => {
                if points.len() < 2 {
                    return Err(Error::Invalid(
                        "tabulated permittivity needs at least two points".into(),
                    ));
                }
                for (k, w) in points.windows(2).enumerate() {
                    if !(w[1].0 > w[0].0) {
                        return Err(Error::NonMonotone { line: k + 2 });
                    }
                }
                for (k, (omega, eps)) in points.iter().enumerate() {
                    if !(*omega > 0.0) {
                        return Err(Error::Domain(format!(
                            "tabulated frequency {omega} at row {} must be > 0",
                            k + 1
                        )));
                    }
                    if eps.im < 0.0 {
                        return Err(Error::Passivity(format!(
                            "Im eps = {} < 0 at omega = {omega}",
                            eps.im
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Permittivity at `omega > 0`.
    pub fn epsilon(&self, omega: f64) -> Result<Complex64> {
        if !(omega > 0.0) {
            return Err(Error::Domain(format!("omega = {omega} must be > 0")));
        }
        match self {
            DielectricModel::Drude { sigma0 } => Ok(Complex64::new(1.0, sigma0 / omega)),
            DielectricModel::Lorentz(terms) => Ok(terms
                .iter()
                .fold(Complex64::new(1.0, 0.0), |acc, t| acc + t.response(omega))),
            DielectricModel::Tabulated(points) => interpolate(points, omega),
        }
    }

    /// Permittivity at a signed frequency, extended by `eps(-w) = conj(eps(w))`.
    pub fn epsilon_signed(&self, omega: f64) -> Result<Complex64> {
        if omega < 0.0 {
            Ok(self.epsilon(-omega)?.conj())
        } else {
            self.epsilon(omega)
        }
    }

    /// Frequency interval on which the model is defined.
    pub fn valid_range(&self) -> (f64, f64) {
        match self {
            DielectricModel::Tabulated(points) => (points[0].0, points[points.len() - 1].0),
            _ => (0.0, f64::INFINITY),
        }
    }
}

fn interpolate(points: &[(f64, Complex64)], omega: f64) -> Result<Complex64> {
    let (lo, hi) = (points[0].0, points[points.len() - 1].0);
    if omega < lo || omega > hi {
        return Err(Error::OutOfRange {
            omega,
            min: lo,
            max: hi,
        });
    }
    let k = points.partition_point(|p| p.0 <= omega);
    if k == points.len() {
        return Ok(points[k - 1].1);
    }
    let (x0, y0) = points[k - 1];
    let (x1, y1) = points[k];
    let t = (omega - x0) / (x1 - x0);
    Ok(y0 + (y1 - y0) * t)
}

/// Parse a permittivity table: one `omega_rad_per_s, re_eps, im_eps` record
/// per line, `#` comments and blank lines ignored. Frequencies are converted
/// to internal units with `units`.
pub fn parse_tabulated(text: &str, units: &UnitSystem) -> Result<DielectricModel> {
    let mut points: Vec<(f64, Complex64)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 3 comma-separated fields, found {}", fields.len()),
            });
        }
        let mut vals = [0.0; 3];
        for (v, s) in vals.iter_mut().zip(&fields) {
            *v = s.parse::<f64>().map_err(|e| Error::Parse {
                line: line_no,
                message: format!("{s:?}: {e}"),
            })?;
        }
        if !(vals[0] > 0.0) {
            return Err(Error::Parse {
                line: line_no,
                message: format!("frequency {} must be > 0", vals[0]),
            });
        }
        let omega = units.frequency_to_internal(vals[0]);
        if let Some(&(prev, _)) = points.last() {
            if !(omega > prev) {
                return Err(Error::NonMonotone { line: line_no });
            }
        }
        if vals[2] < 0.0 {
            return Err(Error::Passivity(format!(
                "Im eps = {} < 0 at line {line_no}",
                vals[2]
            )));
        }
        points.push((omega, Complex64::new(vals[1], vals[2])));
    }
    if points.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "no data records".into(),
        });
    }
    if points.len() < 2 {
        return Err(Error::Parse {
            line: 0,
            message: "at least two data records are required".into(),
        });
    }
    Ok(DielectricModel::Tabulated(points))
}

pub fn load_tabulated(path: impl AsRef<Path>, units: &UnitSystem) -> Result<DielectricModel> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_tabulated(&text, units)
}
