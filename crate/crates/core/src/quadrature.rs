//! Globally adaptive Gauss–Kronrod (10/21 point) integration of vector-valued
//! integrands.
//!
//! Every component is integrated on the same panel set. The first `drive`
//! components steer refinement: a run has converged once each of them has an
//! error estimate below `max(abs_tol, rel_tol * L1)`, where `L1` is the
//! integral of the component's absolute value. Measuring against the L1 norm
//! keeps the criterion meaningful for integrands that change sign.
//!
//! The per-panel error estimate is the raw Gauss/Kronrod difference, which
//! bounds the error of the embedded 10-point rule and therefore overstates the
//! error of the returned 21-point result.

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Tolerances and refinement budget for adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum number of panels held by one adaptive run.
    pub max_intervals: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-6,
            abs_tol: 0.0,
            max_intervals: 2000,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 1e-12 && self.rel_tol < 1e-2) {
            return Err(Error::Invalid(format!(
                "rel_tol = {} must lie in (1e-12, 1e-2)",
                self.rel_tol
            )));
        }
        if !(self.abs_tol >= 0.0) {
            return Err(Error::Invalid("abs_tol must be >= 0".into()));
        }
        if self.max_intervals < 1 {
            return Err(Error::Invalid("max_intervals must be >= 1".into()));
        }
        Ok(())
    }

    /// Same budget, relative tolerance scaled by `factor`.
    pub fn tightened(&self, factor: f64) -> Self {
        Self {
            rel_tol: (self.rel_tol * factor).max(1e-14),
            ..*self
        }
    }
}

/// Result of a vector-valued adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<const N: usize> {
    pub value: [f64; N],
    pub error: [f64; N],
    /// Integral of the absolute value of each component.
    pub l1: [f64; N],
    pub intervals: usize,
    pub converged: bool,
}

impl<const N: usize> Estimate<N> {
    fn zero() -> Self {
        Self {
            value: [0.0; N],
            error: [0.0; N],
            l1: [0.0; N],
            intervals: 0,
            converged: true,
        }
    }

    /// Componentwise sum of two estimates over adjacent ranges.
    pub fn merge(&self, other: &Self) -> Self {
        let mut out = *self;
        for i in 0..N {
            out.value[i] += other.value[i];
            out.error[i] += other.error[i];
            out.l1[i] += other.l1[i];
        }
        out.intervals += other.intervals;
        out.converged &= other.converged;
        out
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    error: [f64; N],
    l1: [f64; N],
}

fn gk21<const N: usize, F: FnMut(f64) -> [f64; N]>(f: &mut F, a: f64, b: f64) -> Panel<N> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = [0.0; N];
    let mut gauss = [0.0; N];
    let mut abs = [0.0; N];
    for i in 0..N {
        kron[i] = fc[i] * WGK[10];
        abs[i] = fc[i].abs() * WGK[10];
    }
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        for i in 0..N {
            kron[i] += WGK[j] * (f1[i] + f2[i]);
            abs[i] += WGK[j] * (f1[i].abs() + f2[i].abs());
            if j % 2 == 1 {
                gauss[i] += WG[j / 2] * (f1[i] + f2[i]);
            }
        }
    }
    let scale = half.abs();
    let mut value = [0.0; N];
    let mut error = [0.0; N];
    let mut l1 = [0.0; N];
    for i in 0..N {
        value[i] = kron[i] * half;
        l1[i] = abs[i] * scale;
        let floor = 50.0 * f64::EPSILON * l1[i];
        error[i] = ((kron[i] - gauss[i]) * half).abs().max(floor);
    }
    Panel {
        a,
        b,
        value,
        error,
        l1,
    }
}

/// Integrate `f` over the interval spanned by `breakpoints` (sorted, at least
/// two entries). Interior breakpoints seed the initial panels.
///
/// Non-convergence is reported through `Estimate::converged` rather than as an
/// error so callers can decide what to do with the partial result.
pub fn integrate<const N: usize, F>(
    mut f: F,
    breakpoints: &[f64],
    drive: usize,
    cfg: &QuadratureConfig,
) -> Estimate<N>
where
    F: FnMut(f64) -> [f64; N],
{
    let drive = drive.min(N);
    let mut panels: Vec<Panel<N>> = breakpoints
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| gk21(&mut f, w[0], w[1]))
        .collect();
    if panels.is_empty() {
        return Estimate::zero();
    }

    loop {
        let mut value = [0.0; N];
        let mut error = [0.0; N];
        let mut l1 = [0.0; N];
        for p in &panels {
            for i in 0..N {
                value[i] += p.value[i];
                error[i] += p.error[i];
                l1[i] += p.l1[i];
            }
        }
        let tol: Vec<f64> = (0..drive)
            .map(|i| cfg.abs_tol.max(cfg.rel_tol * l1[i]))
            .collect();
        let done = (0..drive).all(|i| error[i] <= tol[i]);
        let budget_spent = panels.len() >= cfg.max_intervals;
        if done || budget_spent {
            return Estimate {
                value,
                error,
                l1,
                intervals: panels.len(),
                converged: done,
            };
        }

        // Split the panel contributing most to the normalised error.
        let score = |p: &Panel<N>| -> f64 {
            (0..drive)
                .map(|i| {
                    if tol[i] > 0.0 {
                        p.error[i] / tol[i]
                    } else if p.error[i] > 0.0 {
                        f64::INFINITY
                    } else {
                        0.0
                    }
                })
                .sum()
        };
        let mut worst = None;
        let mut worst_score = -1.0;
        for (k, p) in panels.iter().enumerate() {
            let mid = 0.5 * (p.a + p.b);
            if mid <= p.a || mid >= p.b {
                continue;
            }
            let s = score(p);
            if s > worst_score {
                worst_score = s;
                worst = Some(k);
            }
        }
        let Some(k) = worst else {
            return Estimate {
                value,
                error,
                l1,
                intervals: panels.len(),
                converged: false,
            };
        };
        let p = panels.swap_remove(k);
        let mid = 0.5 * (p.a + p.b);
        panels.push(gk21(&mut f, p.a, mid));
        panels.push(gk21(&mut f, mid, p.b));
    }
}

/// Scalar convenience wrapper returning `(value, error)` or a
/// non-convergence error carrying the partial value.
pub fn integrate_scalar<F>(
    mut f: F,
    breakpoints: &[f64],
    cfg: &QuadratureConfig,
) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    let est = integrate(|x| [f(x)], breakpoints, 1, cfg);
    if est.converged {
        Ok((est.value[0], est.error[0]))
    } else {
        Err(Error::NotConverged {
            partial: est.value[0],
            achieved: est.error[0],
        })
    }
}

/// Integrate over `[a, inf)` through the map `x = a + t / (1 - t)`.
pub fn integrate_semi_infinite<F>(
    mut f: F,
    a: f64,
    interior: &[f64],
    cfg: &QuadratureConfig,
) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    let mut bps = vec![0.0];
    for &x in interior {
        if x > a {
            let s = x - a;
            bps.push(s / (1.0 + s));
        }
    }
    bps.push(1.0);
    bps.sort_by(|p, q| p.total_cmp(q));
    bps.dedup();
    integrate_scalar(
        |t| {
            if t >= 1.0 {
                return 0.0;
            }
            let om = 1.0 - t;
            f(a + t / om) / (om * om)
        },
        &bps,
        cfg,
    )
}

/// Evenly spaced breakpoints covering `[a, b]`, with at most `max_panels`
/// panels of width no smaller than `width`.
pub fn uniform_breakpoints(a: f64, b: f64, width: f64, max_panels: usize) -> Vec<f64> {
    let span = b - a;
    let n = if width > 0.0 && width.is_finite() {
        ((span / width).ceil() as usize).clamp(1, max_panels.max(1))
    } else {
        1
    };
    (0..=n)
        .map(|k| {
            if k == n {
                b
            } else {
                a + span * k as f64 / n as f64
            }
        })
        .collect()
}
