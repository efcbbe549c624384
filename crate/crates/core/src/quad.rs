//! Adaptive Gauss–Kronrod quadrature.
//!
//! A 7/15 point Gauss–Kronrod pair is applied per panel, and panels with the
//! largest error estimate are bisected until the global error target is met.
//! Integrals down to the origin are mapped to logarithmic coordinates so that
//! integrable power singularities at zero become exponentially decaying tails.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Kronrod abscissae on [0, 1]; odd indices are the Gauss nodes, the last one is zero.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// 7-point Gauss weights, matched to `XGK[1]`, `XGK[3]`, `XGK[5]`, `XGK[7]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Maximum number of panels held by one adaptive integration.
pub const DEFAULT_MAX_PANELS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

/// Neumaier compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// One Gauss–Kronrod 7/15 panel: returns (kronrod value, error estimate).
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut res_g = f_center * WG[3];
    let mut res_k = f_center * WGK[7];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let abs_half = half.abs();
    let value = res_k * half;
    res_abs *= abs_half;
    res_asc *= abs_half;

    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Adaptive integration of `f` over `[a, b]` to `max(abs_tol, rel_tol * |I|)`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<QuadResult> {
    integrate_with_limit(f, a, b, rel_tol, abs_tol, DEFAULT_MAX_PANELS)
}

pub fn integrate_with_limit<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_panels: usize,
) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            abs_error: 0.0,
            evaluations: 0,
        });
    }
    let (value, err) = gk15(&f, a, b);
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value, err });
    let mut total = value;
    let mut total_err = err;

    loop {
        if !total.is_finite() || !total_err.is_finite() {
            return Err(Error::Quadrature {
                lo: a,
                hi: b,
                estimate: total,
                achieved_error: total_err,
            });
        }
        if total_err <= abs_tol.max(rel_tol * total.abs()) {
            break;
        }
        if heap.len() >= max_panels {
            return Err(Error::Quadrature {
                lo: a,
                hi: b,
                estimate: total,
                achieved_error: total_err,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            // panel can no longer be split in floating point
            heap.push(worst);
            return Err(Error::Quadrature {
                lo: a,
                hi: b,
                estimate: total,
                achieved_error: total_err,
            });
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        evaluations += 30;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            err: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            err: e2,
        });
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.err;
    }

    let mut sum = CompensatedSum::new();
    let mut err_sum = 0.0;
    for p in heap.iter() {
        sum.add(p.value);
        err_sum += p.err;
    }
    Ok(QuadResult {
        value: sum.value(),
        abs_error: err_sum,
        evaluations,
    })
}

/// Smallest radius reached when integrating towards the origin.
const LOG_FLOOR: f64 = -690.0; // ln(1e-300)
const LOG_PANEL_WIDTH: f64 = 4.0;

/// Integral of `g` over `(0, r]` through the substitution `s = e^u`.
///
/// The half line in `u` is covered by panels of fixed width walking towards
/// `-inf`, stopping once a panel contributes less than `rel_tol` of the total.
/// `g` may have an integrable singularity at zero.
pub fn integrate_to_zero<F: Fn(f64) -> f64>(g: F, r: f64, rel_tol: f64) -> Result<QuadResult> {
    if r <= 0.0 {
        return Ok(QuadResult {
            value: 0.0,
            abs_error: 0.0,
            evaluations: 0,
        });
    }
    let h = |u: f64| {
        let s = u.exp();
        g(s) * s
    };
    let mut hi = r.ln();
    let mut total = CompensatedSum::new();
    let mut err = 0.0;
    let mut evaluations = 0;
    let mut small_panels = 0;
    loop {
        let lo = (hi - LOG_PANEL_WIDTH).max(LOG_FLOOR);
        let panel = integrate(&h, lo, hi, rel_tol * 0.1, 0.0)?;
        total.add(panel.value);
        err += panel.abs_error;
        evaluations += panel.evaluations;
        let running = total.value();
        if panel.value.abs() <= rel_tol * 1e-2 * running.abs() {
            small_panels += 1;
            if small_panels >= 2 {
                break;
            }
        } else {
            small_panels = 0;
        }
        if lo <= LOG_FLOOR {
            // remaining tail beyond 1e-300 is bounded by the last panel
            err += panel.value.abs();
            if panel.value.abs() > rel_tol * running.abs() {
                return Err(Error::Quadrature {
                    lo: 0.0,
                    hi: r,
                    estimate: running,
                    achieved_error: err,
                });
            }
            break;
        }
        hi = lo;
    }
    Ok(QuadResult {
        value: total.value(),
        abs_error: err,
        evaluations,
    })
}
