//! Regular-variation diagnostics: Karamata ratios and empirical Potter constants.

use crate::error::{Error, Result};
use crate::quad;

use super::calculus::ScaleCalculus;

impl ScaleCalculus {
    /// `∫_0^r s^ρ ℓ(s) ds / (r^{ρ+1} ℓ(r))`, which tends to `1/(ρ+1)` as `r → 0`
    /// for slowly varying ℓ.
    pub fn karamata_ratio(&self, rho: f64, r: f64) -> Result<f64> {
        if !(rho > -1.0) {
            return Err(Error::domain("rho", rho, "(-1, inf)"));
        }
        let ell_r = self.ell_eval(r)?;
        let ell = self.ell();
        let num = quad::integrate_to_zero(|s: f64| s.powf(rho) * ell.value(s), r, self.quad_rel_tol())?;
        Ok(num.value / (r.powf(rho + 1.0) * ell_r))
    }

    /// Smallest `C ≥ 1` with `ℓ(r)/ℓ(s) ≤ C max{(r/s)^{-α-δ}, (r/s)^{-α+δ}}`
    /// over the supplied pairs. Pairs outside `(0,1)²` are skipped.
    pub fn potter_check(&self, delta: f64, grid: &[(f64, f64)]) -> f64 {
        let alpha = self.ell().alpha();
        grid.iter()
            .filter(|(r, s)| *r > 0.0 && *r < 1.0 && *s > 0.0 && *s < 1.0)
            .map(|&(r, s)| {
                let ratio = self.ell().value(r) / self.ell().value(s);
                let q = r / s;
                ratio / q.powf(-alpha - delta).max(q.powf(-alpha + delta))
            })
            .fold(1.0, f64::max)
    }
}

/// All ordered pairs from `n` log-spaced radii in `[lo, hi]`.
pub fn log_grid_pairs(lo: f64, hi: f64, n: usize) -> Vec<(f64, f64)> {
    let pts = log_space(lo, hi, n);
    let mut pairs = Vec::with_capacity(n * n);
    for &r in &pts {
        for &s in &pts {
            pairs.push((r, s));
        }
    }
    pairs
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|i| {
                    if i == 0 {
                        lo
                    } else if i == n - 1 {
                        hi
                    } else {
                        (a + (b - a) * i as f64 / (n - 1) as f64).exp()
                    }
                })
                .collect()
        }
    }
}
