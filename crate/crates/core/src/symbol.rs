//! Characteristic exponent of the truncated isotropic Lévy measure
//! `ν(dh) = ℓ(|h|)/|h|^d 1_{|h|<1} dh`.
//!
//! In polar coordinates
//! `ψ(ξ) = σ_{d-1} ∫_0^1 (1 - ω_d(|ξ| s)) ℓ(s)/s ds`
//! where `ω_d(t)` is the spherical average of `cos(t ω_1)`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};
use crate::geometry::Dim;
use crate::quad::{self, CompensatedSum};
use crate::scale::{log_space, ScaleCalculus, RADIUS_FLOOR};

/// Bessel `J_0` of the first kind.
///
/// Power series below 8, a trapezoid rule on `(1/π)∫_0^π cos(t cos θ) dθ`
/// (spectrally accurate for this periodic integrand) up to 30, and the
/// Hankel expansion beyond.
pub fn bessel_j0(t: f64) -> f64 {
    let t = t.abs();
    if t < 8.0 {
        1.0 - j0_series_tail(t)
    } else if t < 30.0 {
        j0_trapezoid(t)
    } else {
        j0_hankel(t)
    }
}

/// `1 - J_0(t)` summed without the leading one, so small arguments keep
/// full relative precision.
fn j0_series_tail(t: f64) -> f64 {
    let q = 0.25 * t * t;
    let mut term = 1.0;
    let mut sum = 0.0;
    let mut k = 1.0;
    loop {
        term *= -q / (k * k);
        sum -= term;
        if term.abs() <= 1e-17 * sum.abs() || k > 60.0 {
            break;
        }
        k += 1.0;
    }
    sum
}

fn j0_trapezoid(t: f64) -> f64 {
    let n = t.ceil() as usize + 20;
    let h = PI / n as f64;
    let s: CompensatedSum = (0..n)
        .map(|j| (t * ((j as f64 + 0.5) * h).cos()).cos())
        .collect();
    s.value() / n as f64
}

fn j0_hankel(t: f64) -> f64 {
    // a_k = prod_{j=1..k} (2j-1)^2 / (k! 8^k)
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        a *= (2.0 * kf - 1.0).powi(2) / (8.0 * kf * t);
        if a >= last || a < 1e-17 {
            break;
        }
        last = a;
        match k % 4 {
            1 => q -= a,
            2 => p -= a,
            3 => q += a,
            _ => p += a,
        }
    }
    // cos(t - π/4) and sin(t - π/4) without subtracting π/4 from a large t
    let (s, c) = t.sin_cos();
    let cos_chi = FRAC_1_SQRT_2 * (c + s);
    let sin_chi = FRAC_1_SQRT_2 * (s - c);
    (2.0 / (PI * t)).sqrt() * (p * cos_chi - q * sin_chi)
}

/// Spherical average `ω_d(t)` of `cos(t ω_1)` over the unit sphere:
/// `cos t`, `J_0(t)`, `sin t / t`.
pub fn radial_average(d: Dim, t: f64) -> f64 {
    match d {
        Dim::One => t.cos(),
        Dim::Two => bessel_j0(t),
        Dim::Three => {
            if t == 0.0 {
                1.0
            } else {
                t.sin() / t
            }
        }
    }
}

/// `1 - ω_d(t)` evaluated without cancellation for small `t`.
pub fn one_minus_radial_average(d: Dim, t: f64) -> f64 {
    match d {
        Dim::One => {
            let h = (0.5 * t).sin();
            2.0 * h * h
        }
        Dim::Two => {
            if t.abs() < 8.0 {
                j0_series_tail(t.abs())
            } else {
                1.0 - bessel_j0(t)
            }
        }
        Dim::Three => {
            if t.abs() < 0.1 {
                let t2 = t * t;
                t2 / 6.0 * (1.0 - t2 / 20.0 * (1.0 - t2 / 42.0 * (1.0 - t2 / 72.0)))
            } else {
                1.0 - t.sin() / t
            }
        }
    }
}

pub const DEFAULT_PANELS_PER_PERIOD: usize = 2;
pub const DEFAULT_TAIL_TOL: f64 = 1e-10;

/// Evaluates ψ for one dimension and scale function.
#[derive(Debug, Clone)]
pub struct SymbolEvaluator {
    d: Dim,
    calc: ScaleCalculus,
    osc_panels_per_period: usize,
    tail_tol: f64,
}

/// One row of a comparability scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub xi: f64,
    pub psi: f64,
    /// `L(1/ξ)`
    pub l_inv_xi: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparabilityScan {
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub rows: Vec<ScanRow>,
}

impl ComparabilityScan {
    /// Empirical two-sided constant `c = max(max_ratio, 1/min_ratio)`.
    pub fn constant(&self) -> f64 {
        self.max_ratio.max(1.0 / self.min_ratio)
    }

    pub fn band_width(&self) -> f64 {
        self.max_ratio / self.min_ratio
    }
}

impl SymbolEvaluator {
    pub fn new(d: Dim, calc: ScaleCalculus) -> Self {
        SymbolEvaluator {
            d,
            calc,
            osc_panels_per_period: DEFAULT_PANELS_PER_PERIOD,
            tail_tol: DEFAULT_TAIL_TOL,
        }
    }

    pub fn with_resolution(mut self, panels_per_period: usize, tail_tol: f64) -> Result<Self> {
        if panels_per_period == 0 {
            return Err(Error::domain("osc_panels_per_period", 0.0, "[1, inf)"));
        }
        if !(tail_tol > 0.0 && tail_tol < 1.0) {
            return Err(Error::domain("tail_tol", tail_tol, "(0, 1)"));
        }
        self.osc_panels_per_period = panels_per_period;
        self.tail_tol = tail_tol;
        Ok(self)
    }

    pub fn dim(&self) -> Dim {
        self.d
    }

    pub fn calc(&self) -> &ScaleCalculus {
        &self.calc
    }

    /// ψ at `|ξ| = xi_norm`.
    ///
    /// The first panel reaches down to the origin in logarithmic coordinates;
    /// the remainder of `(0, 1)` is cut into panels aligned with the
    /// oscillation period `2π/|ξ|` and summed with compensation.
    pub fn psi(&self, xi_norm: f64) -> Result<f64> {
        if !(xi_norm >= 0.0) || xi_norm.is_infinite() {
            return Err(Error::domain("xi_norm", xi_norm, "[0, inf)"));
        }
        if xi_norm == 0.0 {
            return Ok(0.0);
        }
        let d = self.d;
        let ell = self.calc.ell();
        let integrand = |s: f64| one_minus_radial_average(d, xi_norm * s) * ell.value(s) / s;

        let width = 2.0 * PI / (xi_norm * self.osc_panels_per_period as f64);
        let first = width.min(1.0);
        let mut total = CompensatedSum::new();
        total.add(quad::integrate_to_zero(integrand, first, self.tail_tol)?.value);

        let panels = ((1.0 - first) / width).ceil() as usize;
        for k in 0..panels {
            let a = first + k as f64 * width;
            let b = (a + width).min(1.0);
            if b <= a {
                break;
            }
            total.add(quad::integrate(integrand, a, b, self.tail_tol, 0.0)?.value);
        }
        Ok(d.sphere_area() * total.value())
    }

    /// `ψ(ξ)/L(1/ξ)` on `points` log-spaced frequencies in `[xi_min, xi_max]`.
    pub fn comparability_scan(&self, xi_min: f64, xi_max: f64, points: usize) -> Result<ComparabilityScan> {
        if !(xi_min >= 5.0) {
            return Err(Error::domain("xi_min", xi_min, "[5, xi_max)"));
        }
        if !(xi_max > xi_min && xi_max <= 1.0 / RADIUS_FLOOR) {
            return Err(Error::domain("xi_max", xi_max, "(xi_min, 1e15]"));
        }
        if points < 2 {
            return Err(Error::domain("points", points as f64, "[2, inf)"));
        }
        let rows = log_space(xi_min, xi_max, points)
            .into_iter()
            .map(|xi| {
                let psi = self.psi(xi)?;
                let l_inv_xi = self.calc.big_l(1.0 / xi)?;
                Ok(ScanRow {
                    xi,
                    psi,
                    l_inv_xi,
                    ratio: psi / l_inv_xi,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let min_ratio = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
        let max_ratio = rows.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max);
        Ok(ComparabilityScan {
            min_ratio,
            max_ratio,
            rows,
        })
    }
}
