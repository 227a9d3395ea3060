//! `verify` subcommand: rebuild the body response from a discrete bath and
//! cross-check the noise kernels.

use std::fmt::Write as _;

use anyhow::{Context, Result};
use num_complex::Complex64;

use rotfric_core::oracle::{default_bath, response_from_modes, verify_gamma, DiscreteBath};
use rotfric_core::response::lab_frame_chi;
use rotfric_core::{BodySusceptibility, SusceptibilityModel, UnitSystem};

use crate::config::{BathModel, VerifyConfig};

/// One failed or passed comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Finding {
    pub omega_rad_s: f64,
    pub component: String,
    pub rel_error: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOutcome {
    pub report: String,
    pub worst: Option<Finding>,
    pub passed: bool,
}

fn rel_err(a: Complex64, b: Complex64, floor: f64) -> f64 {
    let d = (a - b).norm();
    if d <= floor {
        0.0
    } else {
        d / a.norm().max(b.norm())
    }
}

pub fn build_bath(v: &VerifyConfig, units: &UnitSystem) -> Result<DiscreteBath> {
    v.validate()?;
    let (chi0, nu_peak) = match v.model {
        BathModel::Zero => (BodySusceptibility::zero(), 1.0),
        BathModel::Lorentz => {
            let (xx, zz) = v.terms_internal(units);
            let peak = xx
                .iter()
                .chain(zz.iter())
                .map(|t| t.resonance)
                .fold(0.0, f64::max);
            let chi = BodySusceptibility {
                xx: SusceptibilityModel::lorentz(xx).context("verify.terms")?,
                zz: SusceptibilityModel::lorentz(zz).context("verify.axial_terms")?,
            };
            (chi, if peak > 0.0 { peak } else { 1.0 })
        }
    };
    let mut bath = default_bath(
        &chi0,
        nu_peak,
        v.modes,
        v.m,
        units.frequency_to_internal(v.omega0_rad_s),
    )?;
    if let Some(i) = v.corrupt_mode {
        // -0.0 would still satisfy f >= 0, so use a strictly negative value
        bath.f_xx[i] = -bath.f_xx[i].abs().max(f64::MIN_POSITIVE);
    }
    Ok(bath)
}

pub fn run_verify(v: &VerifyConfig, units: &UnitSystem) -> Result<VerifyOutcome> {
    let bath = build_bath(v, units)?;
    let t = units.temperature_to_internal(v.t_k);
    let mut report = String::new();
    let mut findings = Vec::new();

    writeln!(
        report,
        "# reconstruction of the lab-frame response ({} modes)",
        bath.len()
    )?;
    for &w_si in &v.omega_rad_s {
        let w = units.frequency_to_internal(w_si);
        let exact = lab_frame_chi(&bath.chi0, w, bath.m, bath.omega0)?;
        let modes = response_from_modes(&bath, w);
        let scale = exact[0][0].norm() + exact[2][2].norm();
        for (name, i, j) in [("chi_xx", 0, 0), ("chi_xy", 0, 1), ("chi_zz", 2, 2)] {
            let e = rel_err(exact[i][j], modes[i][j], 1e-12 * scale);
            writeln!(
                report,
                "omega = {w_si:.6e} rad/s  {name:<8} rel_error = {e:.3e}"
            )?;
            findings.push(Finding {
                omega_rad_s: w_si,
                component: name.to_string(),
                rel_error: e,
                flagged: false,
            });
        }
    }

    writeln!(report, "# noise kernels")?;
    for &w_si in &v.omega_rad_s {
        let w = units.frequency_to_internal(w_si);
        let g = verify_gamma(&bath, t, w, v.m)?;
        write!(report, "{g}")?;
        for c in &g.checks {
            findings.push(Finding {
                omega_rad_s: w_si,
                component: c.component.to_string(),
                rel_error: c.rel_error,
                flagged: c.flagged,
            });
        }
    }

    let mut worst: Option<Finding> = None;
    for f in findings {
        let replace = match &worst {
            None => true,
            Some(b) => {
                (f.flagged && !b.flagged) || (f.flagged == b.flagged && f.rel_error > b.rel_error)
            }
        };
        if replace {
            worst = Some(f);
        }
    }
    let passed = worst
        .as_ref()
        .map(|w| !w.flagged && w.rel_error <= v.tolerance)
        .unwrap_or(true);
    Ok(VerifyOutcome {
        report,
        worst,
        passed,
    })
}
