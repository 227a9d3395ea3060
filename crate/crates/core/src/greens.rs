//! Imaginary part of the coincident-point dyadic Green tensor above a planar
//! interface.
//!
//! Normalisation: `[curl curl - k0^2] G = delta * I`, so that free space gives
//! `Im G_ii = k0 / (6 pi)` with `k0 = omega / c`. The particle sits at height
//! `z > 0` above a medium filling `z <= 0`.
//!
//! After the angular average of the in-plane wavevector, each component is a
//! single integral over `k_par`:
//!
//! ```text
//! Im G_xx = Im G_yy = Im (i / 8 pi k0^2) int dk_par (k_par / kz) [(k0^2 + kz^2) + (k0^2 r_s - kz^2 r_p) e^{2 i kz z}]
//! Im G_zz           = Im (i / 4 pi k0^2) int dk_par (k_par^3 / kz) [1 + r_p e^{2 i kz z}]
//! ```
//!
//! The propagating sector (`k_par < k0`) is integrated in `u = kz`, which
//! removes the `1/kz` endpoint singularity and makes the phase `2 u z`
//! uniform, so panels are laid at half periods of `cos(2 u z)`. The evanescent
//! sector (`kz = i q`) is integrated in `q`; there only the reflected terms
//! contribute, through `Im r_s` and `Im r_p`. The real contact term of `g_zz`
//! carries no imaginary part and is dropped.
//!
//! Branches: `kz >= 0` (propagating) or `kz = i q` with `q > 0` (decaying away
//! from the interface); the transmitted wavenumber `k1 = sqrt(eps k0^2 - k_par^2)`
//! takes `Im k1 >= 0`. With these choices `r_s = (kz - k1)/(kz + k1)` and
//! `r_p = (eps kz - k1)/(eps kz + k1)`, and `|r| <= 1` in the propagating
//! sector for any passive medium, which is checked at every node.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::materials::DielectricModel;
use crate::quadrature::{integrate, uniform_breakpoints, Estimate, QuadratureConfig};

const MAX_OSC_PANELS: usize = 4096;
const MAX_TAIL_DOUBLINGS: usize = 40;

/// Planar environment of the particle.
#[derive(Debug, Clone, PartialEq)]
pub enum PlanarGeometry {
    Vacuum,
    HalfSpace { material: DielectricModel, z: f64 },
    IdealConductor { z: f64 },
}

impl PlanarGeometry {
    pub fn validate(&self) -> Result<()> {
        match self {
            PlanarGeometry::Vacuum => Ok(()),
            PlanarGeometry::HalfSpace { material, z } => {
                check_separation(*z)?;
                material.validate()
            }
            PlanarGeometry::IdealConductor { z } => check_separation(*z),
        }
    }

    pub fn separation(&self) -> Option<f64> {
        match self {
            PlanarGeometry::Vacuum => None,
            PlanarGeometry::HalfSpace { z, .. } | PlanarGeometry::IdealConductor { z } => Some(*z),
        }
    }

    /// Same geometry moved to separation `z`; vacuum is unchanged.
    pub fn with_separation(&self, z: f64) -> Self {
        match self {
            PlanarGeometry::Vacuum => PlanarGeometry::Vacuum,
            PlanarGeometry::HalfSpace { material, .. } => PlanarGeometry::HalfSpace {
                material: material.clone(),
                z,
            },
            PlanarGeometry::IdealConductor { .. } => PlanarGeometry::IdealConductor { z },
        }
    }
}

fn check_separation(z: f64) -> Result<()> {
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::Domain(format!("separation z = {z} must be > 0")));
    }
    Ok(())
}

fn check_omega(omega: f64) -> Result<()> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::Domain(format!("omega = {omega} must be > 0")));
    }
    Ok(())
}

/// Diagonal of `Im G(r0, r0, omega)` with per-component quadrature errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImGreenDiag {
    pub im_gxx: f64,
    pub im_gyy: f64,
    pub im_gzz: f64,
    /// Error estimates for `(xx, yy, zz)`.
    pub error: [f64; 3],
}

impl ImGreenDiag {
    fn planar(xx: f64, zz: f64, err_xx: f64, err_zz: f64) -> Self {
        Self {
            im_gxx: xx,
            im_gyy: xx,
            im_gzz: zz,
            error: [err_xx, err_xx, err_zz],
        }
    }

    pub fn trace(&self) -> f64 {
        self.im_gxx + self.im_gyy + self.im_gzz
    }
}

/// Free-space value `k0 / (6 pi)` on every diagonal entry.
pub fn im_g_vacuum(omega: f64) -> Result<ImGreenDiag> {
    check_omega(omega)?;
    let g = omega / (6.0 * PI);
    Ok(ImGreenDiag::planar(g, g, 0.0, 0.0))
}

/// Direct (interface-free) terms integrated numerically over `k_par` in the
/// original variable, `1/kz` singularity included. Reproduces
/// [`im_g_vacuum`] and serves as a check on the normalisation.
pub fn direct_term_quadrature(omega: f64, cfg: &QuadratureConfig) -> Result<ImGreenDiag> {
    check_omega(omega)?;
    let k0 = omega;
    let est = integrate(
        |kp| {
            let kz2 = k0 * k0 - kp * kp;
            if kz2 <= 0.0 {
                return [0.0, 0.0];
            }
            let kz = kz2.sqrt();
            [
                kp / kz * (k0 * k0 + kz2) / (8.0 * PI * k0 * k0),
                kp * kp * kp / kz / (4.0 * PI * k0 * k0),
            ]
        },
        &[0.0, 0.5 * k0, 0.9 * k0, k0],
        2,
        &QuadratureConfig {
            max_intervals: cfg.max_intervals.max(400),
            ..*cfg
        },
    );
    finish(est).map(|(v, e)| ImGreenDiag::planar(v[0], v[1], e[0], e[1]))
}

/// Wavenumbers and Fresnel coefficients at one in-plane wavevector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reflection {
    /// `kz`, real in the propagating sector and `i q` in the evanescent one.
    pub kz: Complex64,
    pub k1: Complex64,
    pub rs: Complex64,
    pub rp: Complex64,
}

fn principal_upper(w: Complex64) -> Complex64 {
    let r = w.sqrt();
    if r.im < 0.0 || (r.im == 0.0 && r.re < 0.0) {
        -r
    } else {
        r
    }
}

/// Reflection data for `kz` given directly (`kz^2 = k0^2 - k_par^2`).
fn reflection_from_kz(k0: f64, eps: Complex64, kz: Complex64) -> Reflection {
    // eps k0^2 - k_par^2 = (eps - 1) k0^2 + kz^2, without cancellation
    let k1 = principal_upper((eps - 1.0) * k0 * k0 + kz * kz);
    let rs = (kz - k1) / (kz + k1);
    let rp = (eps * kz - k1) / (eps * kz + k1);
    Reflection { kz, k1, rs, rp }
}

/// Reflection data at in-plane wavevector `k_par`.
pub fn reflection(omega: f64, eps: Complex64, k_par: f64) -> Reflection {
    let k0 = omega;
    let kz2 = k0 * k0 - k_par * k_par;
    let kz = if kz2 >= 0.0 {
        Complex64::new(kz2.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-kz2).sqrt())
    };
    reflection_from_kz(k0, eps, kz)
}

/// Integrands of `G_xx` and `G_zz` in `k_par` (before taking `Im`), as a
/// function of `kz` (real, or `i q` on the evanescent side). For a non-ideal
/// medium `1 + r_s` and `1 + r_p` vanish like `kz` at the light line, so the
/// integrand stays finite there; it is evaluated in a cancellation-free form.
pub fn light_line_kernel(omega: f64, z: f64, eps: Complex64, kz: Complex64) -> [Complex64; 2] {
    let k0 = omega;
    let r = reflection_from_kz(k0, eps, kz);
    let k_par = (k0 * k0 - kz * kz).sqrt();
    let i = Complex64::new(0.0, 1.0);
    let half = i * kz * z;
    // e^{2 i kz z} - 1
    let phase_m1 = 2.0 * i * (-i * half).sin() * half.exp();
    let one_plus_rs = 2.0 * kz / (kz + r.k1);
    let one_plus_rp = 2.0 * eps * kz / (eps * kz + r.k1);
    let one_minus_rp = 2.0 * r.k1 / (eps * kz + r.k1);
    // (k0^2 + kz^2) + (k0^2 r_s - kz^2 r_p) e = k0^2 (1 + r_s e) + kz^2 (1 - r_p e)
    let s_term = one_plus_rs + r.rs * phase_m1;
    let p_term = one_minus_rp - r.rp * phase_m1;
    let xx = i / (8.0 * PI * k0 * k0) * k_par * (k0 * k0 * s_term / kz + kz * p_term);
    let zz =
        i / (4.0 * PI * k0 * k0) * k_par * k_par * k_par * (one_plus_rp + r.rp * phase_m1) / kz;
    [xx, zz]
}

fn finish<const N: usize>(est: Estimate<N>) -> Result<([f64; N], [f64; N])> {
    if est.converged {
        Ok((est.value, est.error))
    } else {
        Err(Error::NotConverged {
            partial: est.value[0],
            achieved: est.error[0],
        })
    }
}

fn oscillation_breakpoints(k0: f64, z: f64) -> Vec<f64> {
    uniform_breakpoints(0.0, k0, PI / (2.0 * z), MAX_OSC_PANELS)
}

fn widened(cfg: &QuadratureConfig, panels: usize) -> QuadratureConfig {
    QuadratureConfig {
        max_intervals: cfg.max_intervals.max(4 * panels),
        ..*cfg
    }
}

/// Lossy (or lossless) half-space of permittivity `material` below `z = 0`.
pub fn im_g_halfspace(
    omega: f64,
    z: f64,
    material: &DielectricModel,
    cfg: &QuadratureConfig,
) -> Result<ImGreenDiag> {
    check_omega(omega)?;
    check_separation(z)?;
    let eps = material.epsilon(omega)?;
    im_g_halfspace_eps(omega, z, eps, cfg)
}

/// As [`im_g_halfspace`] with the permittivity already evaluated at `omega`.
pub fn im_g_halfspace_eps(
    omega: f64,
    z: f64,
    eps: Complex64,
    cfg: &QuadratureConfig,
) -> Result<ImGreenDiag> {
    check_omega(omega)?;
    check_separation(z)?;
    if eps.im < 0.0 {
        return Err(Error::Passivity(format!("Im eps = {} < 0", eps.im)));
    }
    let k0 = omega;
    let pref_xx = 1.0 / (8.0 * PI * k0 * k0);
    let pref_zz = 1.0 / (4.0 * PI * k0 * k0);

    // Propagating sector, u = kz in (0, k0).
    let mut branch_error: Option<Error> = None;
    let bps = oscillation_breakpoints(k0, z);
    let prop = integrate(
        |u| {
            let r = reflection_from_kz(k0, eps, Complex64::new(u, 0.0));
            let (ms, mp) = (r.rs.norm(), r.rp.norm());
            if (ms > 1.0 + 1e-9 || mp > 1.0 + 1e-9) && branch_error.is_none() {
                branch_error = Some(Error::BranchCut {
                    magnitude: ms.max(mp),
                    k_par: (k0 * k0 - u * u).max(0.0).sqrt(),
                });
            }
            let phase = Complex64::from_polar(1.0, 2.0 * u * z);
            let xx = (k0 * k0 + u * u) + ((k0 * k0 * r.rs - u * u * r.rp) * phase).re;
            let zz = (k0 * k0 - u * u) * (1.0 + (r.rp * phase).re);
            [pref_xx * xx, pref_zz * zz]
        },
        &bps,
        2,
        &widened(cfg, bps.len()),
    );
    if let Some(e) = branch_error {
        return Err(e);
    }
    let (pv, pe) = finish(prop)?;

    // Evanescent sector, kz = i q.
    let evanescent = |q: f64| -> [f64; 2] {
        let r = reflection_from_kz(k0, eps, Complex64::new(0.0, q));
        let decay = (-2.0 * q * z).exp();
        [
            pref_xx * (k0 * k0 * r.rs.im + q * q * r.rp.im) * decay,
            pref_zz * (k0 * k0 + q * q) * r.rp.im * decay,
        ]
    };
    let (ev, ee) = integrate_decaying(evanescent, k0, z, cfg, [pv[0].abs(), pv[1].abs()])?;

    Ok(ImGreenDiag::planar(
        pv[0] + ev[0],
        pv[1] + ev[1],
        pe[0] + ee[0],
        pe[1] + ee[1],
    ))
}

/// Integrate an `exp(-2 q z)`-damped integrand over `q in (0, inf)`: initial
/// range `max(20/z, 10 k0)`, extended by doubling until the last extension
/// falls below a tenth of the tolerance.
fn integrate_decaying<F>(
    mut f: F,
    k0: f64,
    z: f64,
    cfg: &QuadratureConfig,
    scale: [f64; 2],
) -> Result<([f64; 2], [f64; 2])>
where
    F: FnMut(f64) -> [f64; 2],
{
    let q_max = (20.0 / z).max(10.0 * k0);
    let mut bps = vec![0.0, q_max];
    for s in [0.1 * k0, k0, 0.25 / z, 1.0 / z, 4.0 / z] {
        if s > 0.0 && s < q_max {
            bps.push(s);
        }
    }
    bps.sort_by(|a, b| a.total_cmp(b));
    bps.dedup();
    let head = integrate(&mut f, &bps, 2, &widened(cfg, bps.len()));
    let mut total = if head.converged {
        head
    } else {
        return Err(Error::NotConverged {
            partial: head.value[0],
            achieved: head.error[0],
        });
    };
    let mut lo = q_max;
    for _ in 0..MAX_TAIL_DOUBLINGS {
        let tail = integrate(&mut f, &[lo, 2.0 * lo], 2, cfg);
        total = total.merge(&tail);
        let small = (0..2).all(|i| {
            let ref_scale = (total.l1[i] + scale[i]).max(f64::MIN_POSITIVE);
            tail.l1[i] <= 0.1 * cfg.rel_tol * ref_scale
        });
        lo *= 2.0;
        if small {
            break;
        }
    }
    finish(total)
}

/// `(4/3 - C0(x) - C2(x), 2/3 + C0(x) - C2(x))` with `Cp(x) = int_0^1 t^p cos(x t) dt`.
fn conductor_brackets(x: f64) -> (f64, f64) {
    if x < 1.0 {
        // alternating series; the leading terms cancel analytically
        let (mut xx, mut zz) = (0.0, 4.0 / 3.0);
        let mut term = 1.0; // (-1)^n x^{2n} / (2n)!
        for n in 1..40 {
            let k = 2 * n;
            term *= -x * x / ((k - 1) * k) as f64;
            let (c0, c2) = (term / (k + 1) as f64, term / (k + 3) as f64);
            xx -= c0 + c2;
            zz += c0 - c2;
            if term.abs() < 1e-18 {
                break;
            }
        }
        return (xx, zz);
    }
    let (sn, cs) = x.sin_cos();
    let c0 = sn / x;
    let c2 = sn / x + 2.0 * cs / (x * x) - 2.0 * sn / (x * x * x);
    (4.0 / 3.0 - c0 - c2, 2.0 / 3.0 + c0 - c2)
}

/// Ideal conductor below `z = 0` (`r_s = -1`, `r_p = 1`); only the
/// propagating sector contributes, and the kernels
/// `(k0^2 + u^2)(1 - cos 2uz)` and `(k0^2 - u^2)(1 + cos 2uz)` are integrated
/// exactly.
pub fn im_g_conductor(omega: f64, z: f64, _cfg: &QuadratureConfig) -> Result<ImGreenDiag> {
    check_omega(omega)?;
    check_separation(z)?;
    let k0 = omega;
    let (bx, bz) = conductor_brackets(2.0 * k0 * z);
    let xx = k0 / (8.0 * PI) * bx;
    let zz = k0 / (4.0 * PI) * bz;
    Ok(ImGreenDiag::planar(
        xx,
        zz,
        8.0 * f64::EPSILON * xx,
        8.0 * f64::EPSILON * zz,
    ))
}

/// Same kernels as [`im_g_conductor`], integrated by adaptive quadrature on
/// half-period panels.
pub fn im_g_conductor_quadrature(
    omega: f64,
    z: f64,
    cfg: &QuadratureConfig,
) -> Result<ImGreenDiag> {
    check_omega(omega)?;
    check_separation(z)?;
    let k0 = omega;
    let pref_xx = 1.0 / (8.0 * PI * k0 * k0);
    let pref_zz = 1.0 / (4.0 * PI * k0 * k0);
    let bps = oscillation_breakpoints(k0, z);
    let est = integrate(
        |u| {
            // 1 - cos(2uz) and 1 + cos(2uz) without cancellation
            let (s, c) = (u * z).sin_cos();
            [
                pref_xx * (k0 * k0 + u * u) * 2.0 * s * s,
                pref_zz * (k0 * k0 - u * u) * 2.0 * c * c,
            ]
        },
        &bps,
        2,
        &widened(cfg, bps.len()),
    );
    let (v, e) = finish(est)?;
    Ok(ImGreenDiag::planar(v[0], v[1], e[0], e[1]))
}

/// Dispatch on the geometry.
pub fn im_green(
    geometry: &PlanarGeometry,
    omega: f64,
    cfg: &QuadratureConfig,
) -> Result<ImGreenDiag> {
    match geometry {
        PlanarGeometry::Vacuum => im_g_vacuum(omega),
        PlanarGeometry::HalfSpace { material, z } => im_g_halfspace(omega, *z, material, cfg),
        PlanarGeometry::IdealConductor { z } => im_g_conductor(omega, *z, cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(rel: f64) -> QuadratureConfig {
        QuadratureConfig {
            rel_tol: rel,
            ..Default::default()
        }
    }

    /// Closed-form integrals of the conductor kernels, used as an oracle.
    fn conductor_closed_form(k0: f64, z: f64) -> (f64, f64) {
        let s = 2.0 * z;
        let int_cos = |p: u32| -> f64 {
            // int_0^k0 u^p cos(s u) du for p = 0, 2
            let x = k0;
            match p {
                0 => (s * x).sin() / s,
                2 => {
                    x * x * (s * x).sin() / s + 2.0 * x * (s * x).cos() / (s * s)
                        - 2.0 * (s * x).sin() / (s * s * s)
                }
                _ => unreachable!(),
            }
        };
        let xx = ((k0 * k0 * k0 + k0 * k0 * k0 / 3.0) - (k0 * k0 * int_cos(0) + int_cos(2)))
            / (8.0 * PI * k0 * k0);
        let zz = ((k0 * k0 * k0 - k0 * k0 * k0 / 3.0) + (k0 * k0 * int_cos(0) - int_cos(2)))
            / (4.0 * PI * k0 * k0);
        (xx, zz)
    }

    #[test]
    fn vacuum_value_and_scaling() {
        let g = im_g_vacuum(1.0).unwrap();
        assert!((g.im_gxx - 0.053_051_647_697_298_45).abs() < 1e-15);
        assert_eq!(g.im_gxx, g.im_gyy);
        assert_eq!(g.im_gxx, g.im_gzz);
        let g2 = im_g_vacuum(2.0).unwrap();
        assert!((g2.im_gzz - 2.0 * g.im_gzz).abs() < 1e-15);
        assert_eq!(g.error, [0.0; 3]);
        assert!(im_g_vacuum(0.0).is_err());
    }

    #[test]
    fn direct_terms_integrate_to_vacuum() {
        for w in [0.01, 1.0, 30.0] {
            let d = direct_term_quadrature(w, &cfg(1e-8)).unwrap();
            let v = im_g_vacuum(w).unwrap();
            assert!((d.im_gxx / v.im_gxx - 1.0).abs() < 1e-3, "{w}: {d:?}");
            assert!((d.im_gzz / v.im_gzz - 1.0).abs() < 1e-3, "{w}: {d:?}");
        }
    }

    #[test]
    fn conductor_matches_closed_form() {
        for &(k0, z) in &[(1.0, 0.01), (1.0, 0.7), (2.0, 3.0), (0.5, 100.0)] {
            let g = im_g_conductor_quadrature(k0, z, &cfg(1e-10)).unwrap();
            let (xx, zz) = conductor_closed_form(k0, z);
            assert!(
                (g.im_gxx - xx).abs() <= 1e-9 * zz.abs().max(xx.abs()),
                "{k0} {z}: {} {xx}",
                g.im_gxx
            );
            assert!(
                (g.im_gzz - zz).abs() <= 1e-9 * zz.abs(),
                "{k0} {z}: {} {zz}",
                g.im_gzz
            );
        }
    }

    #[test]
    fn conductor_exact_and_quadrature_agree() {
        for &(k0, z) in &[
            (1.0, 1e-6),
            (1.0, 0.3),
            (1.0, 0.49),
            (1.0, 0.51),
            (3.0, 2.0),
            (7.0, 40.0),
        ] {
            let a = im_g_conductor(k0, z, &cfg(1e-10)).unwrap();
            let q = im_g_conductor_quadrature(k0, z, &cfg(1e-11)).unwrap();
            assert!(
                (a.im_gxx - q.im_gxx).abs() <= 1e-9 * a.im_gxx.max(1e-3 * a.im_gzz),
                "{k0} {z}: {a:?} {q:?}"
            );
            assert!(
                (a.im_gzz - q.im_gzz).abs() <= 1e-9 * a.im_gzz,
                "{k0} {z}: {a:?} {q:?}"
            );
        }
    }

    #[test]
    fn conductor_series_branch_is_continuous() {
        let (a, b) = conductor_brackets(1.0 - 1e-12);
        let (c, d) = conductor_brackets(1.0 + 1e-12);
        assert!((a - c).abs() < 1e-11 && (b - d).abs() < 1e-11);
        // leading small-x behaviour: xx bracket ~ x^2 (1/3 + 1/5) / 2
        let x = 1e-4;
        let (bx, bz) = conductor_brackets(x);
        assert!((bx / (x * x * (1.0 / 3.0 + 0.2) / 2.0) - 1.0).abs() < 1e-6);
        assert!((bz - 4.0 / 3.0).abs() < 1e-8);
    }

    #[test]
    fn conductor_near_surface_limits() {
        let v = im_g_vacuum(1.0).unwrap();
        let g = im_g_conductor(1.0, 1e-4, &cfg(1e-10)).unwrap();
        assert!((g.im_gzz / v.im_gzz - 2.0).abs() < 1e-6);
        assert!(g.im_gxx / v.im_gxx < 1e-6);
        assert!(g.im_gxx >= 0.0);
    }

    #[test]
    fn conductor_standing_wave() {
        // golden values from the closed form at k0 z = pi/2 and pi
        let a = im_g_conductor(1.0, PI / 2.0, &cfg(1e-10)).unwrap();
        let b = im_g_conductor(1.0, PI, &cfg(1e-10)).unwrap();
        let (axx, azz) = conductor_closed_form(1.0, PI / 2.0);
        let (bxx, bzz) = conductor_closed_form(1.0, PI);
        assert!((a.im_gxx - axx).abs() < 1e-10 && (b.im_gxx - bxx).abs() < 1e-10);
        assert!((a.im_gzz - azz).abs() < 1e-10 && (b.im_gzz - bzz).abs() < 1e-10);
        assert!((a.im_gxx - b.im_gxx).abs() > 1e-3 * a.im_gxx);
        assert!((a.im_gzz - b.im_gzz).abs() > 1e-3 * a.im_gzz);
    }

    #[test]
    fn conductor_far_field_tends_to_vacuum() {
        let v = im_g_vacuum(1.0).unwrap();
        let g = im_g_conductor(1.0, 200.0, &cfg(1e-9)).unwrap();
        for (c, vac) in [(g.im_gxx, v.im_gxx), (g.im_gzz, v.im_gzz)] {
            assert!((c / vac - 1.0).abs() < 0.01);
        }
    }

    #[test]
    fn unit_permittivity_is_vacuum() {
        let v = im_g_vacuum(1.3).unwrap();
        let g = im_g_halfspace_eps(1.3, 0.2, Complex64::new(1.0, 0.0), &cfg(1e-9)).unwrap();
        assert!((g.im_gxx / v.im_gxx - 1.0).abs() < 1e-8);
        assert!((g.im_gzz / v.im_gzz - 1.0).abs() < 1e-8);
    }

    #[test]
    fn lossy_halfspace_far_field() {
        let m = DielectricModel::lorentz(vec![crate::materials::LorentzTerm::new(2.0, 0.8, 0.5)])
            .unwrap();
        let w = 1.0;
        let v = im_g_vacuum(w).unwrap();
        for kz in [50.0, 57.3, 80.0] {
            let g = im_g_halfspace(w, kz / w, &m, &cfg(1e-8)).unwrap();
            assert!((g.im_gxx / v.im_gxx - 1.0).abs() < 0.01, "{kz}: {g:?}");
            assert!((g.im_gzz / v.im_gzz - 1.0).abs() < 0.01, "{kz}: {g:?}");
        }
    }

    #[test]
    fn near_ideal_metal_matches_conductor() {
        for &(w, z) in &[(1.0, 0.5), (0.3, 7.0), (2.0, 4.0)] {
            let eps = Complex64::new(1.0, 1e8);
            let h = im_g_halfspace_eps(w, z, eps, &cfg(1e-9)).unwrap();
            let c = im_g_conductor(w, z, &cfg(1e-9)).unwrap();
            assert!(
                (h.im_gxx / c.im_gxx - 1.0).abs() < 5e-3,
                "{w} {z}: {h:?} {c:?}"
            );
            assert!(
                (h.im_gzz / c.im_gzz - 1.0).abs() < 5e-3,
                "{w} {z}: {h:?} {c:?}"
            );
        }
    }

    #[test]
    fn sector_continuity_at_light_line() {
        let eps = Complex64::new(-3.0, 0.4);
        let w = 1.0;
        for z in [0.1, 1.0] {
            let below = light_line_kernel(w, z, eps, Complex64::new(1e-12, 0.0));
            let above = light_line_kernel(w, z, eps, Complex64::new(0.0, 1e-12));
            for k in 0..2 {
                let scale = below[k].norm().max(above[k].norm());
                assert!(scale.is_finite() && scale > 0.0);
                assert!(
                    (below[k] - above[k]).norm() <= 1e-9 * scale,
                    "{z} {k}: {:?} {:?}",
                    below[k],
                    above[k]
                );
            }
        }
    }

    #[test]
    fn light_line_kernel_matches_direct_form() {
        let eps = Complex64::new(2.5, 0.7);
        let (w, z) = (1.0, 0.6);
        for kz in [Complex64::new(0.4, 0.0), Complex64::new(0.0, 2.0)] {
            let stable = light_line_kernel(w, z, eps, kz);
            let r = reflection_from_kz(w, eps, kz);
            let kp = (w * w - kz * kz).sqrt();
            let e = (Complex64::new(0.0, 2.0) * kz * z).exp();
            let i = Complex64::new(0.0, 1.0);
            let xx = i / (8.0 * PI) * kp / kz * ((1.0 + kz * kz) + (r.rs - kz * kz * r.rp) * e);
            let zz = i / (4.0 * PI) * kp * kp * kp / kz * (1.0 + r.rp * e);
            assert!((stable[0] - xx).norm() < 1e-12 * xx.norm());
            assert!((stable[1] - zz).norm() < 1e-12 * zz.norm());
        }
    }

    #[test]
    fn propagating_reflection_is_bounded() {
        let eps = Complex64::new(-20.0, 1.5);
        for k in 0..100 {
            let r = reflection(1.0, eps, k as f64 / 100.0);
            assert!(r.rs.norm() <= 1.0 + 1e-12 && r.rp.norm() <= 1.0 + 1e-12);
            assert!(r.k1.im >= 0.0);
        }
    }

    #[test]
    fn halfspace_positive_near_surface() {
        let m = DielectricModel::drude(50.0).unwrap();
        for z in [0.01, 0.1, 1.0] {
            let g = im_g_halfspace(1.0, z, &m, &cfg(1e-7)).unwrap();
            assert!(g.im_gxx > 0.0 && g.im_gzz > 0.0);
            assert_eq!(g.im_gxx, g.im_gyy);
        }
    }

    #[test]
    fn tighter_tolerance_moves_less_than_error() {
        let m = DielectricModel::drude(50.0).unwrap();
        for z in [0.05, 0.8, 6.0] {
            let a = im_g_halfspace(1.0, z, &m, &cfg(1e-6)).unwrap();
            let b = im_g_halfspace(1.0, z, &m, &cfg(5e-7)).unwrap();
            assert!((a.im_gxx - b.im_gxx).abs() <= a.error[0].max(1e-300));
            assert!((a.im_gzz - b.im_gzz).abs() <= a.error[2].max(1e-300));
        }
    }

    #[test]
    fn geometry_validation() {
        assert!(PlanarGeometry::IdealConductor { z: 0.0 }
            .validate()
            .is_err());
        assert!(PlanarGeometry::Vacuum.validate().is_ok());
        assert!(im_g_conductor(1.0, -1.0, &cfg(1e-6)).is_err());
    }
}
