use crate::error::{Error, Result};
use crate::geometry::Dim;
use crate::quad::{self, QuadResult};

use super::family::{Family, ScaleFunction};

pub const DEFAULT_QUAD_REL_TOL: f64 = 1e-10;
pub const DEFAULT_INV_ABS_TOL: f64 = 1e-12;

/// Lower end of the bracket used when `L` has to be inverted numerically.
pub const RADIUS_FLOOR: f64 = 1e-15;

const MAX_INVERSION_STEPS: usize = 200;

/// ℓ together with evaluators for `L(r) = ∫_r^1 ℓ(s)/s ds`, its inverse, the
/// intrinsic dilation `φ_a` and the reference measure of annuli.
///
/// Immutable once built; every method is a pure function of its arguments.
#[derive(Debug, Clone)]
pub struct ScaleCalculus {
    ell: ScaleFunction,
    quad_rel_tol: f64,
    inv_abs_tol: f64,
}

fn check_open_unit(what: &'static str, s: f64) -> Result<()> {
    if s > 0.0 && s < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(what, s, "(0, 1)"))
    }
}

impl ScaleCalculus {
    pub fn new(ell: ScaleFunction) -> Self {
        ScaleCalculus {
            ell,
            quad_rel_tol: DEFAULT_QUAD_REL_TOL,
            inv_abs_tol: DEFAULT_INV_ABS_TOL,
        }
    }

    pub fn with_tolerances(mut self, quad_rel_tol: f64, inv_abs_tol: f64) -> Result<Self> {
        if !(quad_rel_tol > 0.0 && quad_rel_tol < 1.0) {
            return Err(Error::domain("quad_rel_tol", quad_rel_tol, "(0, 1)"));
        }
        if !(inv_abs_tol > 0.0 && inv_abs_tol < 1.0) {
            return Err(Error::domain("inv_abs_tol", inv_abs_tol, "(0, 1)"));
        }
        self.quad_rel_tol = quad_rel_tol;
        self.inv_abs_tol = inv_abs_tol;
        Ok(self)
    }

    pub fn ell(&self) -> &ScaleFunction {
        &self.ell
    }

    pub fn quad_rel_tol(&self) -> f64 {
        self.quad_rel_tol
    }

    pub fn inv_abs_tol(&self) -> f64 {
        self.inv_abs_tol
    }

    pub fn ell_eval(&self, s: f64) -> Result<f64> {
        check_open_unit("s", s)?;
        Ok(self.ell.value(s))
    }

    /// `L(r)`, from the exact antiderivative when the family has one.
    pub fn big_l(&self, r: f64) -> Result<f64> {
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::domain("r", r, "(0, 1]"));
        }
        if r == 1.0 {
            return Ok(0.0);
        }
        match self.closed_form_big_l(r) {
            Some(v) => Ok(v),
            None => Ok(self.big_l_quadrature(r)?.value),
        }
    }

    /// `L(r)` by adaptive quadrature of `ℓ(e^u)` over `u ∈ [ln r, 0]`,
    /// regardless of whether a closed form exists.
    pub fn big_l_quadrature(&self, r: f64) -> Result<QuadResult> {
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::domain("r", r, "(0, 1]"));
        }
        let ell = &self.ell;
        quad::integrate(|u: f64| ell.value(u.exp()), r.ln(), 0.0, self.quad_rel_tol, 0.0)
    }

    pub fn closed_form_big_l(&self, r: f64) -> Option<f64> {
        let minus_ln = -r.ln();
        match self.ell.family() {
            Family::Power => {
                let b = self.ell.beta();
                Some((b * minus_ln).exp_m1() / b)
            }
            Family::Log => Some(0.5 * minus_ln * (4f64.ln() + minus_ln)),
            Family::Const => Some(minus_ln),
            Family::InvLog2 => {
                let ln2 = std::f64::consts::LN_2;
                Some(minus_ln / (ln2 * (ln2 + minus_ln)))
            }
            _ => None,
        }
    }

    /// `lim_{r→0+} L(r)`; `None` when it is infinite.
    pub fn big_l_at_zero(&self) -> Option<f64> {
        self.ell.limit_at_zero()
    }

    fn closed_form_big_l_inv(&self, y: f64) -> Option<f64> {
        match self.ell.family() {
            Family::Power => {
                let b = self.ell.beta();
                Some((-(b * y).ln_1p() / b).exp())
            }
            Family::Const => Some((-y).exp()),
            Family::InvLog2 => {
                let ln2 = std::f64::consts::LN_2;
                Some((-(y * ln2 * ln2) / (1.0 - y * ln2)).exp())
            }
            _ => None,
        }
    }

    /// The unique radius `r ∈ (0, 1]` with `L(r) = y`.
    pub fn big_l_inv(&self, y: f64) -> Result<f64> {
        if !(y >= 0.0) || y.is_infinite() {
            return Err(Error::domain("y", y, "[0, L(0+))"));
        }
        if y == 0.0 {
            return Ok(1.0);
        }
        if let Some(limit) = self.big_l_at_zero() {
            if y >= limit {
                return Err(Error::Range(format!(
                    "L^-1({y}) undefined: L(0+) = {limit} is finite"
                )));
            }
        }
        if let Some(r) = self.closed_form_big_l_inv(y) {
            return Ok(r);
        }
        self.invert_numerically(y)
    }

    /// Bracketed Newton iteration on `u = ln r`, where `dL/du = -ℓ(e^u)`;
    /// falls back to bisection whenever a step leaves the bracket.
    fn invert_numerically(&self, y: f64) -> Result<f64> {
        let mut lo = RADIUS_FLOOR.ln();
        let mut hi = 0.0_f64;
        let at_floor = self.big_l(RADIUS_FLOOR)?;
        if y > at_floor {
            return Err(Error::Range(format!(
                "L^-1({y}) lies below the radius floor {RADIUS_FLOOR} (L there is {at_floor})"
            )));
        }
        // start from the pure-power guess r = (1 + alpha y)^(-1/alpha), or e^-y
        let alpha = self.ell.alpha();
        let guess = if alpha > 0.0 {
            -(alpha * y).ln_1p() / alpha
        } else {
            -y
        };
        let mut u = if guess > lo && guess < hi { guess } else { 0.5 * (lo + hi) };

        for _ in 0..MAX_INVERSION_STEPS {
            let r = u.exp();
            let g = self.big_l(r)? - y;
            if g == 0.0 {
                return Ok(r);
            }
            if g > 0.0 {
                lo = u;
            } else {
                hi = u;
            }
            let mut next = u + g / self.ell.value(r);
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            let moved = (next - u).abs();
            u = next;
            if moved <= self.inv_abs_tol || hi - lo <= self.inv_abs_tol {
                return Ok(u.exp());
            }
        }
        Ok(u.exp())
    }

    /// `φ_a(r) = L^{-1}(L(r)/a)`; clamped below by `r`.
    pub fn phi(&self, a: f64, r: f64) -> Result<f64> {
        if !(a >= 1.0) || a.is_infinite() {
            return Err(Error::domain("a", a, "[1, inf)"));
        }
        check_open_unit("r", r)?;
        let target = self.big_l(r)? / a;
        Ok(self.big_l_inv(target)?.max(r))
    }

    /// Reference measure of the annulus `B_rho2 \ B_rho1`.
    ///
    /// The radial density `ℓ(s)/(s L(s))` is `-(ln L)'`, so the mass is
    /// `σ_{d-1} ln(L(rho1)/L(rho2))`. Returns `+inf` when `rho2 = 1 > rho1`.
    pub fn mu_annulus(&self, rho1: f64, rho2: f64, d: Dim) -> Result<f64> {
        if !(rho1 > 0.0 && rho1 <= rho2 && rho2 <= 1.0) {
            return Err(Error::Domain {
                what: "annulus radii",
                value: rho1,
                domain: "0 < rho1 <= rho2 <= 1",
            });
        }
        if rho1 == rho2 {
            return Ok(0.0);
        }
        let outer = self.big_l(rho2)?;
        if outer == 0.0 {
            return Ok(f64::INFINITY);
        }
        let inner = self.big_l(rho1)?;
        Ok(d.sphere_area() * (inner / outer).ln())
    }

    /// Radii `r_k = L^{-1}(L(r/2) a^{k-1})` for `k = 1..=n`.
    ///
    /// Consecutive radii satisfy `r_{k-1} = φ_a(r_k)`.
    pub fn dyadic_radii(&self, r: f64, a: f64, n: usize) -> Result<Vec<f64>> {
        check_open_unit("r", r)?;
        if !(a > 1.0) || a.is_infinite() {
            return Err(Error::domain("a", a, "(1, inf)"));
        }
        if n == 0 {
            return Err(Error::domain("n", 0.0, "n >= 1"));
        }
        let base = self.big_l(r / 2.0)?;
        let mut radii = Vec::with_capacity(n);
        radii.push(r / 2.0);
        for k in 1..n {
            let level = base * a.powi(k as i32);
            if let Some(limit) = self.big_l_at_zero() {
                if level >= limit {
                    return Err(Error::Range(format!(
                        "dyadic radius r_{} needs L = {level}, beyond the finite limit L(0+) = {limit}",
                        k + 1
                    )));
                }
            }
            let rk = self.big_l_inv(level)?;
            if rk >= radii[k - 1] {
                return Err(Error::Range(format!(
                    "dyadic radius r_{} = {rk} is not below r_{} = {}",
                    k + 1,
                    k,
                    radii[k - 1]
                )));
            }
            radii.push(rk);
        }
        Ok(radii)
    }
}
