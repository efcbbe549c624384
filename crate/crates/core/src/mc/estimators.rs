use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::mc::Estimate;
use crate::scale::ScaleCalculus;
use crate::sim::{path_rng, Annulus, ExitRecord, HalfAnnulus, JumpProcessModel, Region};

/// Smallest path count accepted by the estimators.
pub const MIN_PATHS: u64 = 100;

/// Path count and base seed of one Monte Carlo experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sampling {
    pub paths: u64,
    pub seed: u64,
}

impl Sampling {
    pub fn new(paths: u64, seed: u64) -> Result<Self> {
        if paths < MIN_PATHS {
            return Err(Error::domain("paths", paths as f64, "[100, ∞)"));
        }
        Ok(Sampling { paths, seed })
    }
}

/// Simulates `paths` independent records; path `i` draws from stream
/// `offset + i`. The first failing path, by index, determines the error.
pub(crate) fn simulate_paths<F>(
    model: &JumpProcessModel,
    paths: u64,
    seed: u64,
    offset: u64,
    run: F,
) -> Result<Vec<ExitRecord>>
where
    F: Fn(&mut ChaCha8Rng) -> Result<ExitRecord> + Sync,
{
    let cap = model.max_events();
    let results: Vec<Result<ExitRecord>> = (0..paths)
        .into_par_iter()
        .map(|i| {
            let index = offset + i;
            run(&mut path_rng(seed, index)).and_then(|rec| rec.into_complete(cap, index))
        })
        .collect();
    results.into_iter().collect()
}

/// Complete exit records from `B_r(center)` started at `x0`, in path order.
pub fn exit_sample(
    model: &JumpProcessModel,
    x0: Point,
    center: Point,
    r: f64,
    sampling: Sampling,
) -> Result<Vec<ExitRecord>> {
    simulate_paths(model, sampling.paths, sampling.seed, 0, |rng| model.simulate_exit(x0, center, r, rng))
}

pub fn tail_fraction(records: &[ExitRecord], t: f64) -> Estimate {
    records.iter().map(|rec| if rec.exit_time <= t { 1.0 } else { 0.0 }).collect()
}

pub fn mean_exit_time(records: &[ExitRecord]) -> Estimate {
    records.iter().map(|rec| rec.exit_time).collect()
}

pub fn far_fraction(records: &[ExitRecord], center: Point, s: f64) -> Estimate {
    records
        .iter()
        .map(|rec| if rec.exit_position.dist(&center) >= s { 1.0 } else { 0.0 })
        .collect()
}

/// `P(τ ≤ t)` for the exit time of `B_r(x0)` started at `x0`.
pub fn est_exit_tail(model: &JumpProcessModel, x0: Point, r: f64, t: f64, sampling: Sampling) -> Result<Estimate> {
    if !(t >= 0.0) {
        return Err(Error::domain("t", t, "[0, ∞]"));
    }
    Ok(tail_fraction(&exit_sample(model, x0, x0, r, sampling)?, t))
}

/// Mean exit time of `B_r(center)` started at `x0`.
pub fn est_exit_mean(
    model: &JumpProcessModel,
    x0: Point,
    center: Point,
    r: f64,
    sampling: Sampling,
) -> Result<Estimate> {
    Ok(mean_exit_time(&exit_sample(model, x0, center, r, sampling)?))
}

/// `P(X_τ ∉ B_s(center))` where τ is the exit time of `B_r(center)`; needs `2r < s < 1`.
pub fn est_far_exit(
    model: &JumpProcessModel,
    x0: Point,
    center: Point,
    r: f64,
    s: f64,
    sampling: Sampling,
) -> Result<Estimate> {
    if !(2.0 * r < s && s < 1.0) {
        return Err(Error::domain("s", s, "(2r, 1)"));
    }
    Ok(far_fraction(&exit_sample(model, x0, center, r, sampling)?, center, s))
}

/// The annulus `r ≤ |z - center| < φ_a(r)`.
pub fn make_annulus(calc: &ScaleCalculus, center: Point, r: f64, a: f64) -> Result<Annulus> {
    if !(r > 0.0 && r < 0.5) {
        return Err(Error::domain("r", r, "(0, 1/2)"));
    }
    if !(a > 1.0) {
        return Err(Error::domain("a", a, "(1, ∞)"));
    }
    Ok(Annulus { center, inner: r, outer: calc.phi(a, r)? })
}

/// The half of [`make_annulus`] with `(z - center)_1 ≥ 0`.
pub fn make_half_annulus(calc: &ScaleCalculus, center: Point, r: f64, a: f64) -> Result<HalfAnnulus> {
    Ok(HalfAnnulus { annulus: make_annulus(calc, center, r, a)? })
}

/// Probability of entering `target` before leaving `B_radius(center)`.
pub fn est_hit_probability<T: Region + ?Sized>(
    model: &JumpProcessModel,
    y: Point,
    target: &T,
    center: Point,
    radius: f64,
    sampling: Sampling,
) -> Result<Estimate> {
    let records = simulate_paths(model, sampling.paths, sampling.seed, 0, |rng| {
        model.simulate_hit_or_exit(y, target, center, radius, rng)
    })?;
    Ok(records.iter().map(|rec| if rec.hit() { 1.0 } else { 0.0 }).collect())
}

/// Probability of hitting the half annulus of `(r, a)` before leaving
/// `B_{φ_a(r)}(center)`, started at `y ∈ B_{r/2}(center)`.
pub fn est_hitting(
    model: &JumpProcessModel,
    y: Point,
    center: Point,
    r: f64,
    a: f64,
    sampling: Sampling,
) -> Result<Estimate> {
    let target = make_half_annulus(model.calc(), center, r, a)?;
    if !(y.dist(&center) < r / 2.0) {
        return Err(Error::domain("|y - center|", y.dist(&center), "[0, r/2)"));
    }
    est_hit_probability(model, y, &target, center, target.annulus.outer, sampling)
}

/// [`est_hitting`] against the full annulus.
pub fn est_hitting_full_annulus(
    model: &JumpProcessModel,
    y: Point,
    center: Point,
    r: f64,
    a: f64,
    sampling: Sampling,
) -> Result<Estimate> {
    let target = make_annulus(model.calc(), center, r, a)?;
    if !(y.dist(&center) < r / 2.0) {
        return Err(Error::domain("|y - center|", y.dist(&center), "[0, r/2)"));
    }
    est_hit_probability(model, y, &target, center, target.outer, sampling)
}
