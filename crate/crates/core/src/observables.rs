//! Radiated power and frictional torque of a small sphere spinning about the
//! z axis, together with their spectral densities.
//!
//! With `w± = w ± w0` and `B(x) = Im alpha_xx(x) [a_T(x) - a_T0(w)]`:
//!
//! ```text
//! dP/dw = (1 / 2 pi) w^3 { 2 Im alpha_zz(w) Im G_zz(w) [a_T(w) - a_T0(w)]
//!                          + [Im G_xx(w) + Im G_yy(w)] (B(w-) + B(w+)) }
//! dM/dw = (1 / 2 pi) w^2 [Im G_xx(w) + Im G_yy(w)] (B(w+) - B(w-))
//! ```
//!
//! in internal units (hbar = c = 1). Every density is evaluated in a form that
//! is exactly symmetric in floating point: at `T = T0, w0 = 0` the brackets
//! cancel to zero, and `w0 -> -w0` swaps the two in-plane channels so the
//! torque flips sign bit for bit.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::greens::{im_green, ImGreenDiag, PlanarGeometry};
use crate::quadrature::{integrate, uniform_breakpoints, Estimate, QuadratureConfig};
use crate::response::{im_times_thermal, thermal_difference, thermal_factor, Polarizability};

const WINDOW_FACTOR: f64 = 40.0;
const MAX_OCTAVES: usize = 60;
const MAX_OSC_PANELS: usize = 2048;
/// Inner Green integrals run this much tighter than the outer frequency integral.
const INNER_TIGHTENING: f64 = 0.1;

/// A small sphere at temperature `t` spinning at `omega0` about z.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinningBody {
    pub polarizability: Polarizability,
    pub t: f64,
    pub omega0: f64,
}

impl SpinningBody {
    pub fn new(polarizability: Polarizability, t: f64, omega0: f64) -> Result<Self> {
        let body = Self {
            polarizability,
            t,
            omega0,
        };
        body.validate()?;
        Ok(body)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t >= 0.0 && self.t.is_finite()) {
            return Err(Error::Domain(format!(
                "body temperature {} must be >= 0",
                self.t
            )));
        }
        if !self.omega0.is_finite() {
            return Err(Error::Domain("omega0 must be finite".into()));
        }
        self.polarizability.material.validate()
    }

    /// Rim speed `|w0| a` in units of c; the dipole model assumes it is small.
    pub fn rim_speed(&self) -> f64 {
        self.omega0.abs() * self.polarizability.radius
    }

    /// Message when the rim speed leaves the slow-rotation regime.
    pub fn regime_warning(&self) -> Option<String> {
        let v = self.rim_speed();
        (v > 0.01).then(|| format!("rim speed |omega0| a / c = {v:.3e} exceeds 0.01; slow-rotation dipole model is doubtful"))
    }
}

/// Planar surroundings held at temperature `t0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    pub geometry: PlanarGeometry,
    pub t0: f64,
}

impl Environment {
    pub fn new(geometry: PlanarGeometry, t0: f64) -> Result<Self> {
        let env = Self { geometry, t0 };
        env.validate()?;
        Ok(env)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t0 >= 0.0 && self.t0.is_finite()) {
            return Err(Error::Domain(format!(
                "environment temperature {} must be >= 0",
                self.t0
            )));
        }
        self.geometry.validate()
    }
}

/// Power spectral density split by channel.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PowerDensity {
    pub zz: f64,
    /// In-plane term driven at `w - w0`.
    pub xx_minus: f64,
    /// In-plane term driven at `w + w0`.
    pub xx_plus: f64,
}

impl PowerDensity {
    pub fn total(&self) -> f64 {
        self.zz + (self.xx_minus + self.xx_plus)
    }
}

/// Torque spectral density split by channel; both channels are signed so
/// that the total is their sum.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TorqueDensity {
    pub plus: f64,
    pub minus: f64,
}

impl TorqueDensity {
    pub fn total(&self) -> f64 {
        self.plus + self.minus
    }
}

/// Both densities at one frequency together with the Green tensor used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    pub omega: f64,
    pub power: PowerDensity,
    pub torque: TorqueDensity,
    pub green: ImGreenDiag,
}

/// `B(x) = Im alpha_xx(x) [a_T(x) - a_T0(omega)]`, with the finite limit at
/// `x = 0`.
fn shifted_bracket(p: &Polarizability, x: f64, t: f64, omega: f64, t0: f64) -> Result<f64> {
    if x == 0.0 {
        return im_times_thermal(|y| p.im_alpha_xx(y), 0.0, t);
    }
    Ok(p.im_alpha_xx(x)? * thermal_difference(x, t, omega, t0)?)
}

fn check_omega(omega: f64) -> Result<()> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::Domain(format!("omega = {omega} must be > 0")));
    }
    Ok(())
}

/// Densities at `omega` given the Green tensor there.
fn densities_with_green(
    body: &SpinningBody,
    t0: f64,
    omega: f64,
    g: &ImGreenDiag,
) -> Result<(PowerDensity, TorqueDensity)> {
    let p = &body.polarizability;
    let (t, w0) = (body.t, body.omega0);
    let pref = 1.0 / (2.0 * PI);
    let g_plane = g.im_gxx + g.im_gyy;
    let b_minus = shifted_bracket(p, omega - w0, t, omega, t0)?;
    let b_plus = shifted_bracket(p, omega + w0, t, omega, t0)?;
    let zz_bracket = thermal_difference(omega, t, omega, t0)?;
    let w2 = omega * omega;
    let w3 = w2 * omega;
    let power = PowerDensity {
        zz: pref * w3 * 2.0 * p.im_alpha_zz(omega)? * g.im_gzz * zz_bracket,
        xx_minus: pref * w3 * g_plane * b_minus,
        xx_plus: pref * w3 * g_plane * b_plus,
    };
    let torque = TorqueDensity {
        plus: pref * w2 * g_plane * b_plus,
        minus: -(pref * w2 * g_plane * b_minus),
    };
    Ok((power, torque))
}

/// Power and torque densities at one frequency.
pub fn spectral_densities(
    body: &SpinningBody,
    env: &Environment,
    omega: f64,
    cfg: &QuadratureConfig,
) -> Result<SpectralPoint> {
    check_omega(omega)?;
    let green = im_green(&env.geometry, omega, cfg)?;
    let (power, torque) = densities_with_green(body, env.t0, omega, &green)?;
    Ok(SpectralPoint {
        omega,
        power,
        torque,
        green,
    })
}

pub fn power_spectral_density(
    body: &SpinningBody,
    env: &Environment,
    omega: f64,
    cfg: &QuadratureConfig,
) -> Result<PowerDensity> {
    spectral_densities(body, env, omega, cfg).map(|s| s.power)
}

pub fn torque_spectral_density(
    body: &SpinningBody,
    env: &Environment,
    omega: f64,
    cfg: &QuadratureConfig,
) -> Result<TorqueDensity> {
    spectral_densities(body, env, omega, cfg).map(|s| s.torque)
}

/// Frequency-integrated observables with the channel decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Totals {
    pub power: f64,
    pub power_error: f64,
    pub torque: f64,
    pub torque_error: f64,
    pub power_zz: f64,
    pub power_xx_minus: f64,
    pub power_xx_plus: f64,
    pub torque_plus: f64,
    pub torque_minus: f64,
    /// Torque from the fluctuating dipole, `Im alpha(x) a_T(x)` terms only.
    pub torque_dipole: f64,
    /// Torque from the fluctuating field, `Im alpha(x) a_T0(omega)` terms.
    /// The two parts are individually sensitive to the frequency cutoff when
    /// zero-point terms do not cancel; only their sum is cutoff-independent.
    pub torque_field: f64,
    /// Upper end of the frequency window actually integrated.
    pub omega_max: f64,
}

const N_OUT: usize = 11;

/// Integrand vector: [P, M, P_zz, P_xx-, P_xx+, M+, M-, M_P, M_E, errP, errM].
fn outer_integrand(
    body: &SpinningBody,
    env: &Environment,
    omega: f64,
    inner: &QuadratureConfig,
) -> Result<[f64; N_OUT]> {
    if omega <= 0.0 {
        return Ok([0.0; N_OUT]);
    }
    let p = &body.polarizability;
    let (t, w0) = (body.t, body.omega0);
    let (wp, wm) = (omega + w0, omega - w0);
    let dip = |x: f64| im_times_thermal(|y| p.im_alpha_xx(y), x, t);
    let dipole_factor = dip(wp)? - dip(wm)?;
    let a0 = thermal_factor(omega, env.t0)?;
    let field_factor = (p.im_alpha_xx(wm)? - p.im_alpha_xx(wp)?) * a0;
    // Every density is a Green component times one of these factors; skip
    // the Green tensor when all of them vanish exactly (equilibrium at rest).
    if dipole_factor == 0.0
        && field_factor == 0.0
        && shifted_bracket(p, wm, t, omega, env.t0)? == 0.0
        && shifted_bracket(p, wp, t, omega, env.t0)? == 0.0
        && thermal_difference(omega, t, omega, env.t0)? == 0.0
    {
        return Ok([0.0; N_OUT]);
    }

    let g = im_green(&env.geometry, omega, inner)?;
    let (pd, td) = densities_with_green(body, env.t0, omega, &g)?;
    let pref = 1.0 / (2.0 * PI);
    let g_plane = g.im_gxx + g.im_gyy;
    let m_dipole = pref * omega * omega * g_plane * dipole_factor;
    let m_field = pref * omega * omega * g_plane * field_factor;

    // Propagate the inner Green error estimates to the densities.
    let err_plane = g.error[0] + g.error[1];
    let b_sum = (pd.xx_minus.abs() + pd.xx_plus.abs()) / g_plane.abs().max(f64::MIN_POSITIVE);
    let zz_coeff = pd.zz.abs() / g.im_gzz.abs().max(f64::MIN_POSITIVE);
    let err_p = zz_coeff * g.error[2] + b_sum * err_plane;
    let m_coeff = (td.plus.abs() + td.minus.abs()) / g_plane.abs().max(f64::MIN_POSITIVE);
    let err_m = m_coeff * err_plane;

    Ok([
        pd.total(),
        td.total(),
        pd.zz,
        pd.xx_minus,
        pd.xx_plus,
        td.plus,
        td.minus,
        m_dipole,
        m_field,
        err_p,
        err_m,
    ])
}

fn window_breakpoints(body: &SpinningBody, env: &Environment, lo: f64, hi: f64) -> Vec<f64> {
    let mut bps = vec![lo, hi];
    let w0 = body.omega0.abs();
    let tmax = body.t.max(env.t0);
    let mut interior = vec![w0];
    for k in [0.5, 1.0, 2.0, 5.0, 10.0, 20.0] {
        interior.push(k * tmax);
    }
    if let Some(z) = env.geometry.separation() {
        // the Green tensor oscillates like cos(2 omega z)
        let osc = uniform_breakpoints(lo, hi, PI / (2.0 * z), MAX_OSC_PANELS);
        interior.extend(osc);
    }
    for x in interior {
        if x > lo && x < hi {
            bps.push(x);
        }
    }
    bps.sort_by(|a, b| a.total_cmp(b));
    bps.dedup();
    bps
}

fn run_window(
    body: &SpinningBody,
    env: &Environment,
    lo: f64,
    hi: f64,
    cfg: &QuadratureConfig,
    inner: &QuadratureConfig,
    failure: &mut Option<Error>,
) -> Estimate<N_OUT> {
    let bps = window_breakpoints(body, env, lo, hi);
    let outer_cfg = QuadratureConfig {
        max_intervals: cfg.max_intervals.max(4 * bps.len()),
        ..*cfg
    };
    integrate(
        |w| match outer_integrand(body, env, w, inner) {
            Ok(v) => v,
            Err(e) => {
                if failure.is_none() {
                    *failure = Some(e);
                }
                [0.0; N_OUT]
            }
        },
        &bps,
        2,
        &outer_cfg,
    )
}

/// Integrate both observables over frequency.
///
/// At `T = T0 = 0` the integrand is supported on `(0, |w0|)` and that window
/// is used exactly. Otherwise the window `(0, |w0| + 40 max(T, T0))` is
/// extended by octaves until the last one adds less than a tenth of the
/// tolerance.
pub fn integrate_observables(
    body: &SpinningBody,
    env: &Environment,
    cfg: &QuadratureConfig,
) -> Result<Totals> {
    body.validate()?;
    env.validate()?;
    cfg.validate()?;
    let inner = cfg.tightened(INNER_TIGHTENING);
    let w0 = body.omega0.abs();
    let tmax = body.t.max(env.t0);
    let mut failure = None;

    let (mut est, omega_max) = if tmax == 0.0 {
        if w0 == 0.0 {
            return Ok(Totals::default());
        }
        (
            run_window(body, env, 0.0, w0, cfg, &inner, &mut failure),
            w0,
        )
    } else {
        let mut hi = w0 + WINDOW_FACTOR * tmax;
        let mut est = run_window(body, env, 0.0, hi, cfg, &inner, &mut failure);
        for _ in 0..MAX_OCTAVES {
            if failure.is_some() || !est.converged {
                break;
            }
            let tail = run_window(body, env, hi, 2.0 * hi, cfg, &inner, &mut failure);
            est = est.merge(&tail);
            hi *= 2.0;
            let small = (0..2)
                .all(|i| tail.l1[i] <= 0.1 * cfg.rel_tol * est.l1[i] || tail.l1[i] <= cfg.abs_tol);
            if small {
                break;
            }
        }
        (est, hi)
    };

    if let Some(e) = failure {
        return Err(e);
    }
    let power_error = est.error[0] + est.value[9].abs();
    let torque_error = est.error[1] + est.value[10].abs();
    if !est.converged {
        return Err(Error::NotConverged {
            partial: est.value[0],
            achieved: power_error,
        });
    }
    // symmetric forms make these exact; drop signed zeros from roundoff-free paths
    est.value.iter_mut().for_each(|v| *v += 0.0);
    Ok(Totals {
        power: est.value[0],
        power_error,
        torque: est.value[1],
        torque_error,
        power_zz: est.value[2],
        power_xx_minus: est.value[3],
        power_xx_plus: est.value[4],
        torque_plus: est.value[5],
        torque_minus: est.value[6],
        torque_dipole: est.value[7],
        torque_field: est.value[8],
        omega_max,
    })
}

/// Total radiated power and its error estimate.
pub fn radiated_power(
    body: &SpinningBody,
    env: &Environment,
    cfg: &QuadratureConfig,
) -> Result<(f64, f64)> {
    integrate_observables(body, env, cfg).map(|t| (t.power, t.power_error))
}

/// Torque total with its dipole/field split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorqueResult {
    pub total: f64,
    pub error: f64,
    pub dipole_part: f64,
    pub field_part: f64,
}

pub fn friction_torque(
    body: &SpinningBody,
    env: &Environment,
    cfg: &QuadratureConfig,
) -> Result<TorqueResult> {
    integrate_observables(body, env, cfg).map(|t| TorqueResult {
        total: t.torque,
        error: t.torque_error,
        dipole_part: t.torque_dipole,
        field_part: t.torque_field,
    })
}

/// One row of a separation sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub z: f64,
    pub result: Result<Totals>,
}

/// Evaluate the observables at separation `z` for the given environment.
pub fn sweep_point(
    body: &SpinningBody,
    env_template: &Environment,
    z: f64,
    cfg: &QuadratureConfig,
) -> SweepPoint {
    let env = Environment {
        geometry: env_template.geometry.with_separation(z),
        t0: env_template.t0,
    };
    SweepPoint {
        z,
        result: integrate_observables(body, &env, cfg),
    }
}

/// Sequential separation sweep; each point is independent, so callers may
/// evaluate [`sweep_point`] in parallel instead. Output order follows input.
pub fn separation_sweep(
    body: &SpinningBody,
    env_template: &Environment,
    z_values: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Vec<SweepPoint>> {
    check_grid(z_values, "z")?;
    Ok(z_values
        .iter()
        .map(|&z| sweep_point(body, env_template, z, cfg))
        .collect())
}

pub(crate) fn check_grid(values: &[f64], name: &str) -> Result<()> {
    if values.is_empty() {
        return Err(Error::Invalid(format!("{name} grid is empty")));
    }
    if values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::Invalid(format!(
            "{name} grid values must be positive"
        )));
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Invalid(format!(
            "{name} grid must be strictly increasing"
        )));
    }
    Ok(())
}

/// Spectral densities on a grid plus the integrated totals.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralResult {
    pub omega_grid: Vec<f64>,
    pub d_p_domega: Vec<PowerDensity>,
    pub d_m_domega: Vec<TorqueDensity>,
    pub total_power: f64,
    pub total_torque: f64,
    /// `(power, torque)` error estimates.
    pub error_estimates: (f64, f64),
}

pub fn spectrum(
    body: &SpinningBody,
    env: &Environment,
    omega_grid: &[f64],
    cfg: &QuadratureConfig,
) -> Result<SpectralResult> {
    check_grid(omega_grid, "omega")?;
    let inner = cfg.tightened(INNER_TIGHTENING);
    let mut d_p = Vec::with_capacity(omega_grid.len());
    let mut d_m = Vec::with_capacity(omega_grid.len());
    for &w in omega_grid {
        let s = spectral_densities(body, env, w, &inner)?;
        d_p.push(s.power);
        d_m.push(s.torque);
    }
    let totals = integrate_observables(body, env, cfg)?;
    Ok(SpectralResult {
        omega_grid: omega_grid.to_vec(),
        d_p_domega: d_p,
        d_m_domega: d_m,
        total_power: totals.power,
        total_torque: totals.torque,
        error_estimates: (totals.power_error, totals.torque_error),
    })
}
