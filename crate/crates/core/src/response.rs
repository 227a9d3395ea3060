//! Body-frame susceptibilities, small-sphere polarizability, thermal factors,
//! body/lab frame transforms and the noise kernels `Gamma_ij`.
//!
//! Signed-frequency convention: every response is stored for `omega >= 0`
//! and extended by `chi(-omega) = conj(chi(omega))`, so imaginary parts are
//! odd in frequency. Products `Im chi(x) * a_T(x)` are then even, and their
//! finite value at `x = 0` is taken as a limit instead of through `a_T(0)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::materials::{DielectricModel, LorentzTerm};
use crate::quadrature::{integrate_semi_infinite, QuadratureConfig};

pub type Tensor3 = [[Complex64; 3]; 3];

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Mean Bose occupation `1 / (exp(x / T) - 1)` for `x > 0`; zero at `T = 0`.
pub fn occupation(x: f64, t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        1.0 / (x / t).exp_m1()
    }
}

/// `a_T(omega) = coth(omega / 2T)` in internal units, `sign(omega)` at `T = 0`.
pub fn thermal_factor(omega: f64, t: f64) -> Result<f64> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::Domain(format!("temperature {t} must be >= 0")));
    }
    if t == 0.0 {
        return Ok(if omega > 0.0 {
            1.0
        } else if omega < 0.0 {
            -1.0
        } else {
            0.0
        });
    }
    if omega == 0.0 {
        return Err(Error::SingularPoint);
    }
    let s = omega.signum();
    Ok(s * (1.0 + 2.0 * occupation(omega.abs(), t)))
}

/// `a_T(x) - a_T0(omega)` for `omega > 0`, written through occupations so the
/// difference keeps full precision where both factors approach one.
pub fn thermal_difference(x: f64, t: f64, omega: f64, t0: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(thermal_factor(0.0, t)? - thermal_factor(omega, t0)?);
    }
    let n0 = occupation(omega, t0);
    if x > 0.0 {
        Ok(2.0 * (occupation(x, t) - n0))
    } else {
        Ok(-2.0 - 2.0 * occupation(-x, t) - 2.0 * n0)
    }
}

/// `Im f(x) * a_T(x)` for an odd imaginary part `im`, using the finite limit
/// `2 T (d Im f / dx)(0)` at `x = 0`.
pub fn im_times_thermal<F>(im: F, x: f64, t: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if x != 0.0 {
        return Ok(im(x)? * thermal_factor(x, t)?);
    }
    if t <= 0.0 {
        return Ok(0.0);
    }
    // Im f(h)/h is even in h; Richardson removes the h^2 term.
    let h = 1e-4 * t;
    let s1 = im(h)? / h;
    let s2 = im(0.5 * h)? / (0.5 * h);
    Ok(2.0 * t * (4.0 * s2 - s1) / 3.0)
}

/// Small-sphere (Clausius–Mossotti) polarizability `a^3 (eps - 1) / (eps + 2)`.
pub fn mie_polarizability(radius: f64, eps: Complex64) -> Result<Complex64> {
    if !(radius > 0.0) {
        return Err(Error::Domain(format!("radius {radius} must be > 0")));
    }
    let den = eps + 2.0;
    if den == ZERO {
        return Err(Error::Pole);
    }
    Ok(radius.powi(3) * (eps - 1.0) / den)
}

/// A scalar response function of frequency.
#[derive(Debug, Clone, PartialEq)]
pub enum SusceptibilityModel {
    Zero,
    /// Value for `omega >= 0`; negative frequencies take the conjugate.
    Constant(Complex64),
    Lorentz(Vec<LorentzTerm>),
    /// `chi = eps - 1` of a dielectric model.
    Material(DielectricModel),
}

impl SusceptibilityModel {
    pub fn lorentz(terms: Vec<LorentzTerm>) -> Result<Self> {
        DielectricModel::lorentz(terms.clone())?;
        Ok(SusceptibilityModel::Lorentz(terms))
    }

    /// `chi(omega)` at signed frequency.
    pub fn chi(&self, omega: f64) -> Result<Complex64> {
        let w = omega.abs();
        let v = match self {
            SusceptibilityModel::Zero => ZERO,
            SusceptibilityModel::Constant(c) => *c,
            SusceptibilityModel::Lorentz(terms) => terms.iter().map(|t| t.response(w)).sum(),
            SusceptibilityModel::Material(m) => {
                if w == 0.0 {
                    return Err(Error::Domain(
                        "material susceptibility undefined at omega = 0".into(),
                    ));
                }
                m.epsilon(w)? - 1.0
            }
        };
        Ok(if omega < 0.0 { v.conj() } else { v })
    }

    /// Odd extension of `Im chi`; zero at the origin.
    pub fn im_chi(&self, omega: f64) -> Result<f64> {
        if omega == 0.0 {
            return Ok(0.0);
        }
        Ok(self.chi(omega)?.im)
    }

    pub fn im_times_thermal(&self, x: f64, t: f64) -> Result<f64> {
        im_times_thermal(|y| self.im_chi(y), x, t)
    }
}

/// Body-frame susceptibility, axially symmetric (`chi_xx = chi_yy`).
#[derive(Debug, Clone, PartialEq)]
pub struct BodySusceptibility {
    pub xx: SusceptibilityModel,
    pub zz: SusceptibilityModel,
}

impl BodySusceptibility {
    pub fn isotropic(model: SusceptibilityModel) -> Self {
        Self {
            xx: model.clone(),
            zz: model,
        }
    }

    pub fn zero() -> Self {
        Self::isotropic(SusceptibilityModel::Zero)
    }
}

/// Small-sphere polarizability built from a dielectric model, optionally with
/// separate in-plane and axial materials.
#[derive(Debug, Clone, PartialEq)]
pub struct Polarizability {
    pub radius: f64,
    pub material: DielectricModel,
    /// `(in-plane material, axial material)` overriding `material`.
    pub anisotropy: Option<(DielectricModel, DielectricModel)>,
}

impl Polarizability {
    pub fn new(radius: f64, material: DielectricModel) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Domain(format!("radius {radius} must be > 0")));
        }
        material.validate()?;
        Ok(Self {
            radius,
            material,
            anisotropy: None,
        })
    }

    pub fn anisotropic(
        radius: f64,
        in_plane: DielectricModel,
        axial: DielectricModel,
    ) -> Result<Self> {
        let mut p = Self::new(radius, in_plane.clone())?;
        axial.validate()?;
        p.anisotropy = Some((in_plane, axial));
        Ok(p)
    }

    fn material_xx(&self) -> &DielectricModel {
        self.anisotropy
            .as_ref()
            .map(|a| &a.0)
            .unwrap_or(&self.material)
    }

    fn material_zz(&self) -> &DielectricModel {
        self.anisotropy
            .as_ref()
            .map(|a| &a.1)
            .unwrap_or(&self.material)
    }

    pub fn alpha_xx(&self, omega: f64) -> Result<Complex64> {
        mie_polarizability(self.radius, self.material_xx().epsilon_signed(omega)?)
    }

    pub fn alpha_zz(&self, omega: f64) -> Result<Complex64> {
        mie_polarizability(self.radius, self.material_zz().epsilon_signed(omega)?)
    }

    /// Odd extension of `Im alpha_xx`.
    pub fn im_alpha_xx(&self, omega: f64) -> Result<f64> {
        if omega == 0.0 {
            return Ok(0.0);
        }
        Ok(self.alpha_xx(omega)?.im)
    }

    pub fn im_alpha_zz(&self, omega: f64) -> Result<f64> {
        if omega == 0.0 {
            return Ok(0.0);
        }
        Ok(self.alpha_zz(omega)?.im)
    }
}

/// Lab-frame response tensor of a body spinning at `omega0` about z, for
/// azimuthal index `m`.
pub fn lab_frame_chi(
    chi0: &BodySusceptibility,
    omega: f64,
    m: i32,
    omega0: f64,
) -> Result<Tensor3> {
    let shift = m as f64 * omega0;
    let zz = chi0.zz.chi(omega - shift)?;
    let plus = chi0.xx.chi(omega + omega0 - shift)?;
    let minus = chi0.xx.chi(omega - omega0 - shift)?;
    let xx = 0.5 * (plus + minus);
    let xy = (plus - minus) / (2.0 * I);
    Ok([[xx, xy, ZERO], [-xy, xx, ZERO], [ZERO, ZERO, zz]])
}

/// Nonzero entries of the noise-kernel tensor; `yy = xx`, `yx = -xy`, and all
/// entries coupling z to the plane vanish.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaKernels {
    pub zz: Complex64,
    pub xx: Complex64,
    pub xy: Complex64,
}

impl GammaKernels {
    pub fn tensor(&self) -> Tensor3 {
        [
            [self.xx, self.xy, ZERO],
            [-self.xy, self.xx, ZERO],
            [ZERO, ZERO, self.zz],
        ]
    }
}

pub fn gamma_kernels(
    chi0: &BodySusceptibility,
    omega: f64,
    m: i32,
    t: f64,
    omega0: f64,
) -> Result<GammaKernels> {
    let shift = m as f64 * omega0;
    let g_zz = chi0.zz.im_times_thermal(shift - omega, t)?;
    let g_plus = chi0.xx.im_times_thermal(shift - (omega + omega0), t)?;
    let g_minus = chi0.xx.im_times_thermal(shift - (omega - omega0), t)?;
    Ok(GammaKernels {
        zz: Complex64::new(2.0 * g_zz, 0.0),
        xx: Complex64::new(g_plus + g_minus, 0.0),
        xy: I * (g_minus - g_plus),
    })
}

/// Lab-frame dipole spectrum at `omega` from the body-frame in-plane
/// components sampled at `omega + omega0` (`plus`) and `omega - omega0`
/// (`minus`), and the axial component at `omega`.
pub fn dipole_frame_transform(
    plus: [Complex64; 2],
    minus: [Complex64; 2],
    z: Complex64,
) -> [Complex64; 3] {
    let x = 0.5 * (plus[0] + I * plus[1] + minus[0] - I * minus[1]);
    let y = 0.5 * (-I * plus[0] + plus[1] + I * minus[0] + minus[1]);
    [x, y, z]
}

/// Real part of a causal response at `omega > 0` from its (odd) imaginary
/// part via the Kramers–Kronig principal-value integral
/// `Re chi(w) = (2/pi) PV int_0^inf nu Im chi(nu) / (nu^2 - w^2) dnu`.
///
/// The pole is removed by subtracting `w Im chi(w)`, whose principal-value
/// integral vanishes.
pub fn re_chi_from_im<F>(
    im: F,
    omega: f64,
    scales: &[f64],
    cfg: &QuadratureConfig,
) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    if !(omega > 0.0) {
        return Err(Error::Domain(format!("omega = {omega} must be > 0")));
    }
    let g0 = omega * im(omega);
    let mut bps: Vec<f64> = scales.to_vec();
    bps.push(omega);
    let (v, e) = integrate_semi_infinite(
        |nu| {
            let d = nu * nu - omega * omega;
            if d == 0.0 {
                0.0
            } else {
                (nu * im(nu) - g0) / d
            }
        },
        0.0,
        &bps,
        cfg,
    )?;
    let k = 2.0 / std::f64::consts::PI;
    Ok((k * v, k * e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lorentz(s: f64, r: f64, g: f64) -> SusceptibilityModel {
        SusceptibilityModel::lorentz(vec![LorentzTerm::new(s, r, g)]).unwrap()
    }

    /// tanh via Lambert's continued fraction, independent of std's coth.
    fn coth_cf(x: f64) -> f64 {
        let mut acc = 0.0;
        for k in (1..60).rev() {
            acc = x * x / ((2 * k + 1) as f64 + acc);
        }
        let tanh = x / (1.0 + acc);
        1.0 / tanh
    }

    #[test]
    fn thermal_factor_zero_temperature_is_sign() {
        assert_eq!(thermal_factor(3.0, 0.0).unwrap(), 1.0);
        assert_eq!(thermal_factor(-3.0, 0.0).unwrap(), -1.0);
    }

    #[test]
    fn thermal_factor_coth_one() {
        let oracle = coth_cf(1.0);
        assert!((oracle - 1.313_035_285_499_331).abs() < 1e-14);
        let a = thermal_factor(2.0, 1.0).unwrap();
        assert!((a - oracle).abs() < 1e-13);
        assert!((a - 1.31304).abs() < 1e-5);
    }

    #[test]
    fn thermal_factor_singular_at_zero() {
        assert_eq!(thermal_factor(0.0, 1.0), Err(Error::SingularPoint));
        assert!(thermal_factor(1.0, -1.0).is_err());
    }

    #[test]
    fn thermal_difference_matches_direct() {
        for &(x, t, w, t0) in &[
            (0.5, 1.0, 0.3, 2.0),
            (-0.7, 0.4, 1.2, 0.1),
            (2.0, 0.0, 1.0, 0.0),
            (-1.0, 0.0, 1.0, 0.5),
        ] {
            let d = thermal_difference(x, t, w, t0).unwrap();
            let direct = thermal_factor(x, t).unwrap() - thermal_factor(w, t0).unwrap();
            assert!((d - direct).abs() < 1e-12, "{d} {direct}");
        }
        // far tail keeps precision
        let d = thermal_difference(60.0, 1.0, 60.0, 2.0).unwrap();
        let exact = 2.0 * (1.0 / (60.0f64).exp_m1() - 1.0 / (30.0f64).exp_m1());
        assert!((d / exact - 1.0).abs() < 1e-12);
    }

    #[test]
    fn product_limit_at_origin() {
        let m = lorentz(1.0, 1.0, 0.2);
        // Im chi ~ s g x / r^4 near 0, so the product tends to 2T * 0.2
        let t = 0.3;
        let lim = m.im_times_thermal(0.0, t).unwrap();
        assert!((lim - 2.0 * t * 0.2).abs() < 1e-9, "{lim}");
        let near = m.im_times_thermal(1e-7, t).unwrap();
        assert!((near - lim).abs() < 1e-8);
        assert_eq!(m.im_times_thermal(0.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn mie_limits() {
        assert_eq!(
            mie_polarizability(2.0, Complex64::new(1.0, 0.0)).unwrap(),
            ZERO
        );
        let big = mie_polarizability(2.0, Complex64::new(1e12, 1e12)).unwrap();
        assert!((big - Complex64::new(8.0, 0.0)).norm() < 1e-10);
        assert_eq!(
            mie_polarizability(1.0, Complex64::new(-2.0, 0.0)),
            Err(Error::Pole)
        );
        assert!(mie_polarizability(0.0, Complex64::new(2.0, 0.0)).is_err());
    }

    #[test]
    fn drude_low_frequency_im_alpha() {
        // |eps| >> 1: Im alpha ≈ 3 a^3 omega / sigma0
        let a = 1.5;
        let omega = 1.0;
        let sigma0 = 1e4 * omega;
        let p = Polarizability::new(a, DielectricModel::drude(sigma0).unwrap()).unwrap();
        let full = p.im_alpha_xx(omega).unwrap();
        let approx = 3.0 * a.powi(3) * omega / sigma0;
        assert!((full / approx - 1.0).abs() < 1e-3);
        assert_eq!(p.im_alpha_xx(-omega).unwrap(), -full);
        assert_eq!(p.im_alpha_zz(0.0).unwrap(), 0.0);
    }

    #[test]
    fn anisotropic_polarizability_uses_each_material() {
        let p = Polarizability::anisotropic(
            1.0,
            DielectricModel::drude(10.0).unwrap(),
            DielectricModel::drude(100.0).unwrap(),
        )
        .unwrap();
        assert!(p.im_alpha_xx(1.0).unwrap() > p.im_alpha_zz(1.0).unwrap());
    }

    #[test]
    fn lab_chi_static_body_is_diagonal() {
        let chi0 = BodySusceptibility {
            xx: lorentz(1.0, 1.0, 0.1),
            zz: lorentz(2.0, 1.5, 0.2),
        };
        let w = 0.7;
        let t = lab_frame_chi(&chi0, w, 0, 0.0).unwrap();
        assert_eq!(t[0][0], chi0.xx.chi(w).unwrap());
        assert_eq!(t[1][1], chi0.xx.chi(w).unwrap());
        assert_eq!(t[2][2], chi0.zz.chi(w).unwrap());
        assert_eq!(t[0][1], ZERO);
        assert_eq!(t[0][2], ZERO);
        assert_eq!(t[2][0], ZERO);
    }

    #[test]
    fn lab_chi_constant_response_has_no_xy() {
        let chi0 =
            BodySusceptibility::isotropic(SusceptibilityModel::Constant(Complex64::new(0.4, 0.0)));
        let t = lab_frame_chi(&chi0, 0.8, 2, 0.3).unwrap();
        assert_eq!(t[0][1], ZERO);
        assert_eq!(t[1][0], ZERO);
    }

    #[test]
    fn lab_chi_is_antisymmetric_in_plane() {
        let chi0 = BodySusceptibility::isotropic(lorentz(1.0, 1.0, 0.1));
        for &(w, m, w0) in &[(0.3, 0, 0.2), (-1.1, 1, 0.5), (2.0, -2, 0.05)] {
            let t = lab_frame_chi(&chi0, w, m, w0).unwrap();
            assert_eq!(t[0][1], -t[1][0]);
            assert_eq!(t[0][0], t[1][1]);
        }
    }

    #[test]
    fn lab_chi_peaks_split_by_rotation() {
        let nu0 = 1.0;
        let w0 = 0.2;
        let chi0 = BodySusceptibility::isotropic(lorentz(1.0, nu0, 0.01));
        let grid: Vec<f64> = (1..=40000).map(|k| k as f64 * 5e-5).collect();
        let vals: Vec<f64> = grid
            .iter()
            .map(|&w| lab_frame_chi(&chi0, w, 0, w0).unwrap()[0][0].im.abs())
            .collect();
        let local_max: Vec<f64> = (1..vals.len() - 1)
            .filter(|&k| vals[k] > vals[k - 1] && vals[k] >= vals[k + 1] && vals[k] > 1.0)
            .map(|k| grid[k])
            .collect();
        assert_eq!(local_max.len(), 2, "{local_max:?}");
        assert!((local_max[0] - (nu0 - w0)).abs() < 1e-3);
        assert!((local_max[1] - (nu0 + w0)).abs() < 1e-3);
    }

    #[test]
    fn gamma_static_limit() {
        let chi0 = BodySusceptibility::isotropic(lorentz(1.0, 1.0, 0.3));
        let t = 0.5;
        for w in [-1.3, -0.2, 0.4, 2.0] {
            let g = gamma_kernels(&chi0, w, 0, t, 0.0).unwrap();
            assert_eq!(g.xy, ZERO);
            let expect = 2.0 * chi0.xx.im_chi(-w).unwrap() * thermal_factor(-w, t).unwrap();
            assert!((g.xx.re - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn gamma_zero_coupling_vanishes() {
        let chi0 = BodySusceptibility::zero();
        let g = gamma_kernels(&chi0, 0.4, 1, 0.7, 0.3).unwrap();
        assert_eq!((g.zz, g.xx, g.xy), (ZERO, ZERO, ZERO));
        let t = lab_frame_chi(&chi0, 0.4, 1, 0.3).unwrap();
        assert!(t.iter().flatten().all(|c| *c == ZERO));
    }

    #[test]
    fn gamma_tensor_layout() {
        let chi0 = BodySusceptibility::isotropic(lorentz(1.0, 1.0, 0.3));
        let g = gamma_kernels(&chi0, 0.3, 1, 0.2, 0.4).unwrap();
        let t = g.tensor();
        assert_eq!(t[1][1], t[0][0]);
        assert_eq!(t[1][0], -t[0][1]);
        assert_eq!(t[0][2], ZERO);
        assert_eq!(t[2][1], ZERO);
    }

    #[test]
    fn frame_transform_identity_without_rotation() {
        let p = [Complex64::new(1.0, 2.0), Complex64::new(-0.5, 0.1)];
        let z = Complex64::new(3.0, -1.0);
        let out = dipole_frame_transform(p, p, z);
        assert!((out[0] - p[0]).norm() < 1e-15);
        assert!((out[1] - p[1]).norm() < 1e-15);
        assert_eq!(out[2], z);
    }

    #[test]
    fn frame_transform_co_rotating_component() {
        let plus = [Complex64::new(1.0, 0.0), -I];
        let out = dipole_frame_transform(plus, [ZERO; 2], ZERO);
        assert!((out[0] - 1.0).norm() < 1e-15);
        assert!((out[1] + I).norm() < 1e-15);
        assert_eq!(out[2], ZERO);
    }

    #[test]
    fn kramers_kronig_recovers_lorentz_real_part() {
        let m = lorentz(1.0, 1.0, 0.2);
        let cfg = QuadratureConfig {
            rel_tol: 1e-9,
            ..Default::default()
        };
        for w in [0.3, 0.9, 1.7, 4.0] {
            let (re, err) =
                re_chi_from_im(|x| m.im_chi(x).unwrap(), w, &[0.5, 1.0, 2.0], &cfg).unwrap();
            let exact = m.chi(w).unwrap().re;
            assert!(
                (re - exact).abs() < 1e-6 * exact.abs().max(1.0),
                "{w}: {re} {exact} {err}"
            );
        }
    }

    proptest! {
        #[test]
        fn thermal_factor_is_odd(w in 1e-6f64..50.0, t in 0.0f64..10.0) {
            prop_assert_eq!(thermal_factor(-w, t).unwrap(), -thermal_factor(w, t).unwrap());
        }

        #[test]
        fn gamma_zz_nonnegative(w in -5.0f64..5.0, m in -2i32..=2, t in 0.0f64..3.0, w0 in -2.0f64..2.0,
                                s in 0.01f64..3.0, r in 0.0f64..3.0, g in 0.01f64..1.0) {
            let chi0 = BodySusceptibility::isotropic(lorentz(s, r, g));
            let k = gamma_kernels(&chi0, w, m, t, w0).unwrap();
            prop_assert!(k.zz.re >= 0.0);
            prop_assert!(k.xx.re >= 0.0);
        }

        #[test]
        fn gamma_symmetries(w in -5.0f64..5.0, m in -2i32..=2, t in 0.0f64..3.0, w0 in -2.0f64..2.0,
                            s in 0.01f64..3.0, r in 0.0f64..3.0, g in 0.01f64..1.0) {
            let chi0 = BodySusceptibility::isotropic(lorentz(s, r, g));
            let k = gamma_kernels(&chi0, w, m, t, w0).unwrap();
            // (omega, m) -> (-omega, -m) exchanges the two shifted arguments up to sign
            let k1 = gamma_kernels(&chi0, -w, -m, t, w0).unwrap();
            prop_assert!((k.xx - k1.xx).norm() <= 1e-12 * k.xx.norm().max(1e-300));
            prop_assert!((k.zz - k1.zz).norm() <= 1e-12 * k.zz.norm().max(1e-300));
            // (omega0, m) -> (-omega0, -m) swaps the co- and counter-rotating terms
            let k2 = gamma_kernels(&chi0, w, -m, t, -w0).unwrap();
            prop_assert!((k.xx - k2.xx).norm() <= 1e-12 * k.xx.norm().max(1e-300));
            prop_assert!((k.xy + k2.xy).norm() <= 1e-12 * k.xy.norm().max(1e-300));
        }

        #[test]
        fn frame_transform_inverts(vals in proptest::collection::vec(-1.0f64..1.0, 10)) {
            let c = |k: usize| Complex64::new(vals[2 * k], vals[2 * k + 1]);
            let plus = [c(0), c(1)];
            let minus = [c(2), c(3)];
            let out = dipole_frame_transform(plus, minus, c(4));
            // The lab pair (P_x, P_y) determines the circular amplitudes
            // u = P'_x(w+) + i P'_y(w+) and v = P'_x(w-) - i P'_y(w-) through
            //   P_x = (u + v) / 2,  P_y = (-i u + i v) / 2.
            // Solve that 2x2 system by Cramer's rule.
            let (a11, a12, a21, a22) = (Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.0), -0.5 * I, 0.5 * I);
            let det = a11 * a22 - a12 * a21;
            let u = (out[0] * a22 - a12 * out[1]) / det;
            let v = (a11 * out[1] - a21 * out[0]) / det;
            prop_assert!((u - (plus[0] + I * plus[1])).norm() < 1e-12);
            prop_assert!((v - (minus[0] - I * minus[1])).norm() < 1e-12);
            prop_assert_eq!(out[2], c(4));
        }
    }
}
