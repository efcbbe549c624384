use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::mc::estimators::simulate_paths;
use crate::mc::{Estimate, Sampling};
use crate::scale::ScaleCalculus;
use crate::sim::JumpProcessModel;

/// Bounded payoff evaluated at the exit position.
pub type Payoff = Arc<dyn Fn(&Point) -> f64 + Send + Sync>;

/// Pairs that must pass the noise gate before a slope is fitted.
pub const MIN_FIT_PAIRS: usize = 5;
pub const DEFAULT_BOOTSTRAP_RESAMPLES: usize = 2000;

/// Grid evaluation of `u(x) = E_x g(X_τ)`, τ the exit time of `B_r(center)`.
#[derive(Clone)]
pub struct HarmonicProbe {
    payoff: Payoff,
    sup_norm: f64,
    center: Point,
    r: f64,
    grid: Vec<Point>,
    values: Vec<Estimate>,
}

impl fmt::Debug for HarmonicProbe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HarmonicProbe")
            .field("sup_norm", &self.sup_norm)
            .field("center", &self.center)
            .field("r", &self.r)
            .field("grid", &self.grid)
            .field("values", &self.values)
            .finish_non_exhaustive()
    }
}

impl HarmonicProbe {
    /// The grid must lie in `B_{r/4}(center)`.
    pub fn new(payoff: Payoff, sup_norm: f64, center: Point, r: f64, grid: Vec<Point>) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::domain("r", r, "(0, 1)"));
        }
        if !(sup_norm >= 0.0 && sup_norm.is_finite()) {
            return Err(Error::domain("sup_norm", sup_norm, "[0, ∞)"));
        }
        if grid.is_empty() {
            return Err(Error::Range("probe grid is empty".into()));
        }
        if let Some(p) = grid.iter().find(|p| !(p.dist(&center) < r / 4.0)) {
            return Err(Error::domain("|grid point - center|", p.dist(&center), "[0, r/4)"));
        }
        Ok(HarmonicProbe { payoff, sup_norm, center, r, grid, values: Vec::new() })
    }

    /// Grid points `center + k·step·e₁` for `k = -n..=n`.
    pub fn axis_grid(center: Point, step: f64, n: usize) -> Vec<Point> {
        (-(n as i64)..=n as i64).map(|k| center + Point::on_axis(k as f64 * step)).collect()
    }

    pub fn center(&self) -> Point {
        self.center
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    pub fn grid(&self) -> &[Point] {
        &self.grid
    }

    /// Empty until filled by [`est_harmonic`].
    pub fn values(&self) -> &[Estimate] {
        &self.values
    }

    pub fn payoff(&self, z: &Point) -> f64 {
        (self.payoff)(z)
    }

    /// Same probe with the payoff multiplied by `c`.
    pub fn scaled(&self, c: f64) -> HarmonicProbe {
        let g = self.payoff.clone();
        HarmonicProbe {
            payoff: Arc::new(move |z| c * g(z)),
            sup_norm: c.abs() * self.sup_norm,
            center: self.center,
            r: self.r,
            grid: self.grid.clone(),
            values: Vec::new(),
        }
    }

    /// Largest minus smallest grid mean over points in `B_radius(center)`.
    pub fn oscillation(&self, radius: f64) -> Option<f64> {
        let means: Vec<f64> = self
            .grid
            .iter()
            .zip(&self.values)
            .filter(|(p, _)| p.dist(&self.center) < radius)
            .map(|(_, e)| e.mean())
            .collect();
        if means.is_empty() {
            return None;
        }
        let max = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = means.iter().copied().fold(f64::INFINITY, f64::min);
        Some(max - min)
    }
}

/// `g(z) = 1` when `(z - center)_1 ≥ 0`.
pub fn half_space_payoff(center: Point) -> Payoff {
    Arc::new(move |z: &Point| if z.first() - center.first() >= 0.0 { 1.0 } else { 0.0 })
}

/// `g(z) = 1` when `|z - center| ≥ s`.
pub fn far_payoff(center: Point, s: f64) -> Payoff {
    Arc::new(move |z: &Point| if z.dist(&center) >= s { 1.0 } else { 0.0 })
}

pub fn constant_payoff(c: f64) -> Payoff {
    Arc::new(move |_: &Point| c)
}

fn checked_payoff(probe_g: &Payoff, sup_norm: f64, z: &Point) -> Result<f64> {
    let v = probe_g(z);
    if !v.is_finite() || v.abs() > sup_norm * (1.0 + 1e-12) {
        return Err(Error::Range(format!("payoff {v} at exit point exceeds the declared sup norm {sup_norm}")));
    }
    Ok(v)
}

/// Fills one [`Estimate`] per grid point. Point `k` uses streams
/// `k·paths .. (k+1)·paths`.
pub fn est_harmonic(model: &JumpProcessModel, probe: &HarmonicProbe, sampling: Sampling) -> Result<HarmonicProbe> {
    let mut values = Vec::with_capacity(probe.grid.len());
    for (k, &x) in probe.grid.iter().enumerate() {
        let offset = k as u64 * sampling.paths;
        let records = simulate_paths(model, sampling.paths, sampling.seed, offset, |rng| {
            model.simulate_exit(x, probe.center, probe.r, rng)
        })?;
        let mut est = Estimate::new();
        for rec in &records {
            est.push(checked_payoff(&probe.payoff, probe.sup_norm, &rec.exit_position)?);
        }
        values.push(est);
    }
    Ok(HarmonicProbe { values, ..probe.clone() })
}

/// Outcome of [`fit_regularity_exponent`].
#[derive(Debug, Clone, PartialEq)]
pub struct RegularityFit {
    pub gamma_hat: f64,
    pub intercept: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub pairs_used: usize,
    pub pairs_total: usize,
}

impl RegularityFit {
    pub fn ci_excludes_zero(&self) -> bool {
        self.ci_low > 0.0 || self.ci_high < 0.0
    }
}

fn least_squares(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if !(sxx > 0.0) {
        return None;
    }
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Slope of `ln|u(x) - u(y)|` against `-ln L(|x - y|)` over grid pairs whose
/// difference exceeds three combined standard errors, with a percentile
/// bootstrap interval over pairs.
pub fn fit_regularity_exponent(
    probe: &HarmonicProbe,
    calc: &ScaleCalculus,
    resamples: usize,
    seed: u64,
) -> Result<RegularityFit> {
    if probe.values.len() != probe.grid.len() {
        return Err(Error::Range("probe has not been evaluated".into()));
    }
    let n = probe.grid.len();
    let mut data = Vec::new();
    let mut total = 0;
    for i in 0..n {
        for j in i + 1..n {
            let dist = probe.grid[i].dist(&probe.grid[j]);
            if dist == 0.0 {
                continue;
            }
            total += 1;
            let (ui, uj) = (&probe.values[i], &probe.values[j]);
            let diff = (ui.mean() - uj.mean()).abs();
            let noise = (ui.stderr().powi(2) + uj.stderr().powi(2)).sqrt();
            if diff > 3.0 * noise && diff > 0.0 {
                data.push((-calc.big_l(dist)?.ln(), diff.ln()));
            }
        }
    }
    if data.len() < MIN_FIT_PAIRS {
        return Err(Error::InsufficientSignal { passed: data.len(), required: MIN_FIT_PAIRS });
    }
    let (gamma_hat, intercept) =
        least_squares(&data).ok_or(Error::InsufficientSignal { passed: 1, required: 2 })?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut slopes = Vec::with_capacity(resamples);
    let mut sample = vec![(0.0, 0.0); data.len()];
    for _ in 0..resamples {
        for s in sample.iter_mut() {
            *s = data[rng.random_range(0..data.len())];
        }
        if let Some((slope, _)) = least_squares(&sample) {
            slopes.push(slope);
        }
    }
    let (ci_low, ci_high) = if slopes.is_empty() {
        (f64::NAN, f64::NAN)
    } else {
        slopes.sort_by(f64::total_cmp);
        let m = slopes.len();
        let lo = ((0.025 * m as f64).floor() as usize).min(m - 1);
        let hi = (((0.975 * m as f64).ceil() as usize).max(1) - 1).min(m - 1);
        (slopes[lo], slopes[hi])
    };
    Ok(RegularityFit { gamma_hat, intercept, ci_low, ci_high, pairs_used: data.len(), pairs_total: total })
}

/// Two estimates of `u(x)`: directly, and through the exit position of an
/// interior ball `B' ⊂ B_r` followed by a fresh estimate from there.
#[derive(Debug, Clone, PartialEq)]
pub struct MartingaleCheck {
    pub direct: Estimate,
    pub two_stage: Estimate,
}

const STAGE_SEED_STEP: u64 = 0x9e37_79b9_7f4a_7c15;

/// `inner_paths` fresh paths are spent at every first-stage exit point that
/// is still inside `B_r`.
pub fn martingale_mean_check(
    model: &JumpProcessModel,
    probe: &HarmonicProbe,
    x: Point,
    inner_center: Point,
    inner_r: f64,
    sampling: Sampling,
    inner_paths: u64,
) -> Result<MartingaleCheck> {
    if !(inner_r > 0.0 && inner_center.dist(&probe.center) + inner_r <= probe.r) {
        return Err(Error::domain("inner radius", inner_r, "(0, r - |inner_center - center|]"));
    }
    if inner_paths == 0 {
        return Err(Error::domain("inner_paths", 0.0, "[1, ∞)"));
    }
    let seed1 = sampling.seed.wrapping_add(STAGE_SEED_STEP);
    let seed2 = sampling.seed.wrapping_add(STAGE_SEED_STEP.wrapping_mul(2));

    let direct_records =
        simulate_paths(model, sampling.paths, sampling.seed, 0, |rng| model.simulate_exit(x, probe.center, probe.r, rng))?;
    let mut direct = Estimate::new();
    for rec in &direct_records {
        direct.push(checked_payoff(&probe.payoff, probe.sup_norm, &rec.exit_position)?);
    }

    let first = simulate_paths(model, sampling.paths, seed1, 0, |rng| model.simulate_exit(x, inner_center, inner_r, rng))?;
    let mut two_stage = Estimate::new();
    for (i, rec) in first.iter().enumerate() {
        let z = rec.exit_position;
        if z.dist(&probe.center) >= probe.r {
            two_stage.push(checked_payoff(&probe.payoff, probe.sup_norm, &z)?);
            continue;
        }
        let offset = i as u64 * inner_paths;
        let second =
            simulate_paths(model, inner_paths, seed2, offset, |rng| model.simulate_exit(z, probe.center, probe.r, rng))?;
        let mut inner = Estimate::new();
        for r2 in &second {
            inner.push(checked_payoff(&probe.payoff, probe.sup_norm, &r2.exit_position)?);
        }
        two_stage.push(inner.mean());
    }
    Ok(MartingaleCheck { direct, two_stage })
}
