//! Brute-force reference for the response and noise kernels.
//!
//! The continuum of bath oscillators is replaced by `N` discrete modes with
//! quadrature weights. Couplings follow from `f^2(nu) / nu = (2 / pi) Im chi0(nu)`,
//! the response is rebuilt as a sum of regularised mode propagators, and the
//! noise spectrum is assembled from the thermal second moments of each mode.
//! Rotation enters only through the time-periodic body-to-lab rotation of the
//! coupling, whose Fourier harmonics are obtained by sampling one period.
//!
//! This path shares no code with [`crate::response`] beyond the input
//! susceptibility, so agreement between the two is a genuine check.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::response::{gamma_kernels, thermal_factor, BodySusceptibility, Tensor3};

pub const DEFAULT_MODES: usize = 4000;
/// Relative linewidth replacing `i0+` in the mode propagators.
pub const DEFAULT_ETA: f64 = 1e-3;
/// Width of the smoothing kernel in units of the local mode spacing.
const SMOOTHING_SPACINGS: f64 = 2.5;
const ROTATION_SAMPLES: usize = 16;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Log-spaced nodes on `[nu_peak / 100, 100 nu_peak]` with trapezoid weights.
pub fn log_grid(nu_peak: f64, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(nu_peak > 0.0 && nu_peak.is_finite()) {
        return Err(Error::Invalid(format!("nu_peak = {nu_peak} must be > 0")));
    }
    if n < 2 {
        return Err(Error::Invalid("a bath needs at least two modes".into()));
    }
    let (lo, hi) = ((nu_peak / 100.0).ln(), (nu_peak * 100.0).ln());
    let nu: Vec<f64> = (0..n)
        .map(|i| (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp())
        .collect();
    Ok((nu.clone(), trapezoid_weights(&nu)))
}

fn trapezoid_weights(nu: &[f64]) -> Vec<f64> {
    let n = nu.len();
    (0..n)
        .map(|i| {
            let left = if i > 0 { nu[i] - nu[i - 1] } else { 0.0 };
            let right = if i + 1 < n { nu[i + 1] - nu[i] } else { 0.0 };
            0.5 * (left + right)
        })
        .collect()
}

/// Discrete set of body-frame bath modes.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteBath {
    pub nu_grid: Vec<f64>,
    pub weights: Vec<f64>,
    pub f_xx: Vec<f64>,
    pub f_zz: Vec<f64>,
    pub m: i32,
    pub omega0: f64,
    pub eta: f64,
    /// Susceptibility the couplings were derived from.
    pub chi0: BodySusceptibility,
}

impl DiscreteBath {
    pub fn len(&self) -> usize {
        self.nu_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nu_grid.is_empty()
    }

    /// Check the structural invariants; the first violation is reported.
    pub fn validate(&self) -> Result<()> {
        let n = self.nu_grid.len();
        if n < 2 {
            return Err(Error::Invalid("a bath needs at least two modes".into()));
        }
        if self.weights.len() != n || self.f_xx.len() != n || self.f_zz.len() != n {
            return Err(Error::Invalid("bath arrays have mismatched lengths".into()));
        }
        if self.nu_grid.iter().any(|v| !(*v > 0.0)) || self.nu_grid.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(Error::Invalid(
                "mode frequencies must be positive and increasing".into(),
            ));
        }
        if self.weights.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::Invalid("quadrature weights must be positive".into()));
        }
        if !(self.eta > 0.0) {
            return Err(Error::Invalid("eta must be positive".into()));
        }
        if let Some(i) = self.f_xx.iter().position(|f| !(*f >= 0.0)) {
            return Err(Error::Invalid(format!(
                "f_xx[{i}] = {} is negative",
                self.f_xx[i]
            )));
        }
        if let Some(i) = self.f_zz.iter().position(|f| !(*f >= 0.0)) {
            return Err(Error::Invalid(format!(
                "f_zz[{i}] = {} is negative",
                self.f_zz[i]
            )));
        }
        Ok(())
    }

    fn couplings(&self, axis: usize) -> &[f64] {
        if axis == 2 {
            &self.f_zz
        } else {
            &self.f_xx
        }
    }

    /// Body-frame response of one axis at signed frequency `y`, as the
    /// regularised mode sum `sum w f^2 / (nu^2 - y^2 - i eta nu sign(y))`.
    pub fn body_response(&self, axis: usize, y: f64) -> Complex64 {
        let f = self.couplings(axis);
        let sgn = if y > 0.0 {
            1.0
        } else if y < 0.0 {
            -1.0
        } else {
            0.0
        };
        let mut acc = ZERO;
        for ((&nu, &w), &fi) in self.nu_grid.iter().zip(&self.weights).zip(f) {
            let den = Complex64::new(nu * nu - y * y, -self.eta * nu * sgn);
            acc += w * fi * fi / den;
        }
        acc
    }

    /// Body-frame noise spectrum of one axis: each mode contributes
    /// `(1 / 2 nu) a_T(nu) pi [K(y - nu) + K(y + nu)]`, with `K` a normalised
    /// Gaussian a few mode spacings wide standing in for the delta function.
    #[allow(clippy::needless_range_loop)]
    pub fn body_noise(&self, axis: usize, y: f64, t: f64) -> Result<f64> {
        let f = self.couplings(axis);
        let n = self.len();
        let mut acc = 0.0;
        for i in 0..n {
            if f[i] == 0.0 {
                continue;
            }
            let nu = self.nu_grid[i];
            let spacing = if i == 0 {
                self.nu_grid[1] - self.nu_grid[0]
            } else if i + 1 == n {
                self.nu_grid[n - 1] - self.nu_grid[n - 2]
            } else {
                0.5 * (self.nu_grid[i + 1] - self.nu_grid[i - 1])
            };
            let sigma = SMOOTHING_SPACINGS * spacing;
            let kernel = |d: f64| -> f64 {
                let u = d / sigma;
                if u.abs() > 10.0 {
                    0.0
                } else {
                    (-0.5 * u * u).exp() / (sigma * (2.0 * PI).sqrt())
                }
            };
            let k = kernel(y - nu) + kernel(y + nu);
            if k == 0.0 {
                continue;
            }
            acc += self.weights[i] * f[i] * f[i] / (2.0 * nu) * thermal_factor(nu, t)? * PI * k;
        }
        Ok(acc)
    }
}

/// Mode couplings `f = sqrt((2 nu / pi) Im chi0(nu))` on the given grid.
pub fn couplings_from_chi(
    chi0: &BodySusceptibility,
    nu_grid: &[f64],
    weights: &[f64],
    m: i32,
    omega0: f64,
) -> Result<DiscreteBath> {
    if nu_grid.len() != weights.len() {
        return Err(Error::Invalid("grid and weights differ in length".into()));
    }
    let coupling = |im: f64, nu: f64| -> Result<f64> {
        if im < 0.0 {
            return Err(Error::Passivity(format!("Im chi0({nu}) = {im} < 0")));
        }
        Ok((2.0 * nu / PI * im).sqrt())
    };
    let mut f_xx = Vec::with_capacity(nu_grid.len());
    let mut f_zz = Vec::with_capacity(nu_grid.len());
    for &nu in nu_grid {
        f_xx.push(coupling(chi0.xx.im_chi(nu)?, nu)?);
        f_zz.push(coupling(chi0.zz.im_chi(nu)?, nu)?);
    }
    let bath = DiscreteBath {
        nu_grid: nu_grid.to_vec(),
        weights: weights.to_vec(),
        f_xx,
        f_zz,
        m,
        omega0,
        eta: DEFAULT_ETA,
        chi0: chi0.clone(),
    };
    bath.validate()?;
    Ok(bath)
}

/// Default bath: log grid around `nu_peak` with `n` modes.
pub fn default_bath(
    chi0: &BodySusceptibility,
    nu_peak: f64,
    n: usize,
    m: i32,
    omega0: f64,
) -> Result<DiscreteBath> {
    let (nu, w) = log_grid(nu_peak, n)?;
    couplings_from_chi(chi0, &nu, &w, m, omega0)
}

/// Fourier harmonics `c[s + 1][i][k]`, `s in {-1, 0, 1}`, of the
/// time-periodic rotation taking body axis `k` to lab axis `i`, sampled over
/// one period. The sense of rotation is the one for which the mode sums
/// reproduce the lab-frame response `chi_xy = (chi(w+) - chi(w-)) / 2i`.
fn rotation_harmonics() -> [[[Complex64; 3]; 3]; 3] {
    let mut c = [[[ZERO; 3]; 3]; 3];
    let m = ROTATION_SAMPLES;
    for j in 0..m {
        let theta = 2.0 * PI * j as f64 / m as f64;
        let (s, co) = theta.sin_cos();
        let r = [[co, s, 0.0], [-s, co, 0.0], [0.0, 0.0, 1.0]];
        for (si, harm) in [-1i32, 0, 1].into_iter().enumerate() {
            let phase = Complex64::from_polar(1.0 / m as f64, -(harm as f64) * theta);
            for i in 0..3 {
                for k in 0..3 {
                    c[si][i][k] += r[i][k] * phase;
                }
            }
        }
    }
    c
}

/// Lab-frame second-moment combination `sum_k sum_s c_ik^s conj(c_jk^s) h_k(s)`.
fn lab_combination<F>(mut h: F) -> Result<Tensor3>
where
    F: FnMut(usize, i32) -> Result<Complex64>,
{
    let c = rotation_harmonics();
    let mut per_axis = [[ZERO; 3]; 3];
    for k in 0..3 {
        for (si, s) in [-1i32, 0, 1].into_iter().enumerate() {
            let any = (0..3).any(|i| c[si][i][k].norm() > 1e-14);
            if any {
                per_axis[k][si] = h(k, s)?;
            }
        }
    }
    let mut out = [[ZERO; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = ZERO;
            for k in 0..3 {
                for si in 0..3 {
                    let w = c[si][i][k] * c[si][j][k].conj();
                    if w != ZERO {
                        acc += w * per_axis[k][si];
                    }
                }
            }
            out[i][j] = acc;
        }
    }
    Ok(out)
}

/// Lab-frame response tensor at signed `omega` from the discrete modes.
pub fn response_from_modes(bath: &DiscreteBath, omega: f64) -> Tensor3 {
    let shift = bath.m as f64 * bath.omega0;
    lab_combination(|k, s| Ok(bath.body_response(k, omega + s as f64 * bath.omega0 - shift)))
        .expect("mode sums are infallible")
}

/// One row of the comparison report.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentCheck {
    pub component: &'static str,
    pub analytic: Complex64,
    pub oracle: Complex64,
    pub rel_error: f64,
    /// Set when a bath invariant feeding this component is violated.
    pub flagged: bool,
}

/// Outcome of [`verify_gamma`].
#[derive(Debug, Clone, PartialEq)]
pub struct GammaReport {
    pub omega: f64,
    pub m: i32,
    pub t: f64,
    pub omega0: f64,
    pub checks: Vec<ComponentCheck>,
    pub invariant_violation: Option<String>,
}

impl GammaReport {
    /// Component with the largest deviation, flagged components first.
    pub fn worst(&self) -> Option<&ComponentCheck> {
        let mut best: Option<&ComponentCheck> = None;
        for c in &self.checks {
            let better = match best {
                None => true,
                Some(b) => {
                    (c.flagged && !b.flagged)
                        || (c.flagged == b.flagged && c.rel_error > b.rel_error)
                }
            };
            if better {
                best = Some(c);
            }
        }
        best
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.invariant_violation.is_none()
            && self.checks.iter().all(|c| !c.flagged && c.rel_error <= tol)
    }

    pub fn check(&self, component: &str) -> Option<&ComponentCheck> {
        self.checks.iter().find(|c| c.component == component)
    }
}

impl fmt::Display for GammaReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "# omega = {:e}, m = {}, T = {:e}, omega0 = {:e}",
            self.omega, self.m, self.t, self.omega0
        )?;
        if let Some(v) = &self.invariant_violation {
            writeln!(f, "# bath invariant violated: {v}")?;
        }
        writeln!(
            f,
            "{:<10} {:>34} {:>34} {:>12}",
            "component", "analytic", "oracle", "rel_error"
        )?;
        for c in &self.checks {
            let fmt_c = |z: Complex64| format!("{:+.9e}{:+.9e}i", z.re, z.im);
            writeln!(
                f,
                "{:<10} {:>34} {:>34} {:>12.3e}{}",
                c.component,
                fmt_c(c.analytic),
                fmt_c(c.oracle),
                c.rel_error,
                if c.flagged { "  FLAGGED" } else { "" }
            )?;
        }
        Ok(())
    }
}

fn relative_error(a: Complex64, b: Complex64, floor: f64) -> f64 {
    let diff = (a - b).norm();
    if diff == 0.0 {
        return 0.0;
    }
    let scale = a.norm().max(b.norm());
    if diff <= floor {
        return 0.0;
    }
    diff / scale
}

/// Compare the noise kernels `Gamma_ij(omega, m)` from the response module
/// against twice the lab-frame noise spectrum assembled from the bath modes.
pub fn verify_gamma(bath: &DiscreteBath, t: f64, omega: f64, m: i32) -> Result<GammaReport> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("temperature {t} must be >= 0")));
    }
    let w0 = bath.omega0;
    let analytic = gamma_kernels(&bath.chi0, omega, m, t, w0)?;
    let shift = m as f64 * w0;
    let spectrum = lab_combination(|k, s| {
        let y = omega + s as f64 * w0 - shift;
        // the bath spectrum is even in y; evaluate at |y|
        Ok(Complex64::new(bath.body_noise(k, y.abs(), t)?, 0.0))
    })?;

    let violation = bath.validate().err().map(|e| e.to_string());
    let zz_bad = bath.f_zz.iter().any(|f| !(*f >= 0.0));
    let xx_bad = bath.f_xx.iter().any(|f| !(*f >= 0.0));

    let scale = analytic.zz.norm() + analytic.xx.norm();
    let floor = 1e-12 * scale;
    let rows = [
        ("Gamma_zz", analytic.zz, 2.0 * spectrum[2][2], zz_bad),
        ("Gamma_xx", analytic.xx, 2.0 * spectrum[0][0], xx_bad),
        ("Gamma_yy", analytic.xx, 2.0 * spectrum[1][1], xx_bad),
        ("Gamma_xy", analytic.xy, 2.0 * spectrum[0][1], xx_bad),
        ("Gamma_xz", ZERO, 2.0 * spectrum[0][2], zz_bad || xx_bad),
    ];
    let checks = rows
        .into_iter()
        .map(|(name, a, o, bad)| ComponentCheck {
            component: name,
            analytic: a,
            oracle: o,
            rel_error: relative_error(a, o, floor),
            flagged: bad,
        })
        .collect();
    Ok(GammaReport {
        omega,
        m,
        t,
        omega0: w0,
        checks,
        invariant_violation: violation,
    })
}
