use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::distr::Open01;
use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::geometry::{Dim, Point};
use crate::quad;
use crate::scale::ScaleCalculus;

use super::region::Region;

pub const DEFAULT_MAX_EVENTS: u64 = 10_000_000;

/// What happens to jumps smaller than the cutoff ε.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SmallJumpMode {
    /// Discard them: the process is exactly compound Poisson.
    #[default]
    Drop,
    /// Replace them by a Brownian motion with matching covariance.
    Gaussian,
}

impl fmt::Display for SmallJumpMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SmallJumpMode::Drop => "drop",
            SmallJumpMode::Gaussian => "gaussian",
        })
    }
}

impl FromStr for SmallJumpMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "drop" => Ok(SmallJumpMode::Drop),
            "gaussian" => Ok(SmallJumpMode::Gaussian),
            _ => Err(Error::config("mode", format!("unknown small-jump mode `{s}` (expected drop or gaussian)"))),
        }
    }
}

/// Outcome of one simulated excursion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExitRecord {
    pub exit_time: f64,
    pub exit_position: Point,
    pub pre_exit_position: Point,
    pub jump_count: u64,
    /// `Some(true)` when a hit-or-exit run entered the target first.
    pub hit_flag: Option<bool>,
    /// False when the event cap stopped the path early.
    pub complete: bool,
}

impl ExitRecord {
    pub fn into_complete(self, cap: u64, path_index: u64) -> Result<ExitRecord> {
        if self.complete {
            Ok(self)
        } else {
            Err(Error::EventCap { cap, path_index })
        }
    }

    pub fn hit(&self) -> bool {
        self.hit_flag == Some(true)
    }
}

/// One state change along a path, as seen by an observer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathEvent {
    pub t: f64,
    pub position: Point,
    /// Jump length; zero for a diffusion sub-step.
    pub radius: f64,
}

/// Symmetric pure-jump Lévy process with jump density `ℓ(|h|)/|h|^d` on
/// `ε < |h| < 1` and no jumps of length one or more.
#[derive(Debug, Clone)]
pub struct JumpProcessModel {
    d: Dim,
    calc: ScaleCalculus,
    eps: f64,
    mode: SmallJumpMode,
    max_events: u64,
    l_eps: f64,
    small_std: f64,
}

/// Per-coordinate standard deviation rate of the jumps below `eps`:
/// `sqrt(σ_{d-1}/d ∫_0^eps s ℓ(s) ds)`.
pub fn small_jump_std_at(calc: &ScaleCalculus, d: Dim, eps: f64) -> Result<f64> {
    if eps == 0.0 {
        return Ok(0.0);
    }
    let ell = calc.ell();
    let second_moment = quad::integrate_to_zero(|s: f64| s * ell.value(s), eps, calc.quad_rel_tol())?.value;
    Ok((d.sphere_area() / d.get() as f64 * second_moment).sqrt())
}

/// Uniformly distributed unit vector in R^d.
pub fn sample_direction<R: Rng + ?Sized>(d: Dim, rng: &mut R) -> Point {
    match d {
        Dim::One => Point::on_axis(if rng.random::<bool>() { 1.0 } else { -1.0 }),
        Dim::Two => {
            let theta = 2.0 * PI * rng.random::<f64>();
            let (s, c) = theta.sin_cos();
            Point([c, s, 0.0])
        }
        Dim::Three => {
            let z = 2.0 * rng.random::<f64>() - 1.0;
            let phi = 2.0 * PI * rng.random::<f64>();
            let rho = (1.0 - z * z).max(0.0).sqrt();
            let (s, c) = phi.sin_cos();
            Point([rho * c, rho * s, z])
        }
    }
}

impl JumpProcessModel {
    /// `eps = 0` is accepted only when `L(0+)` is finite.
    pub fn new(d: Dim, calc: ScaleCalculus, eps: f64, mode: SmallJumpMode) -> Result<Self> {
        if !(0.0..1.0).contains(&eps) {
            return Err(Error::domain("eps", eps, "[0, 1)"));
        }
        let l_eps = if eps == 0.0 {
            calc.big_l_at_zero().ok_or_else(|| {
                Error::Range("eps = 0 needs a finite jump measure, but L(0+) is infinite".into())
            })?
        } else {
            calc.big_l(eps)?
        };
        if !(l_eps > 0.0 && l_eps.is_finite()) {
            return Err(Error::Range(format!("jump rate is not positive and finite (L(eps) = {l_eps})")));
        }
        let small_std = match mode {
            SmallJumpMode::Drop => 0.0,
            SmallJumpMode::Gaussian => small_jump_std_at(&calc, d, eps)?,
        };
        Ok(JumpProcessModel {
            d,
            calc,
            eps,
            mode,
            max_events: DEFAULT_MAX_EVENTS,
            l_eps,
            small_std,
        })
    }

    pub fn with_max_events(mut self, max_events: u64) -> Self {
        self.max_events = max_events.max(1);
        self
    }

    pub fn dim(&self) -> Dim {
        self.d
    }

    pub fn calc(&self) -> &ScaleCalculus {
        &self.calc
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn mode(&self) -> SmallJumpMode {
        self.mode
    }

    pub fn max_events(&self) -> u64 {
        self.max_events
    }

    /// Total intensity `σ_{d-1} L(ε)` of the retained jumps.
    pub fn jump_rate(&self) -> f64 {
        self.d.sphere_area() * self.l_eps
    }

    /// Jump length from a uniform variate by inverting `F(t) = 1 - L(t)/L(ε)`.
    pub fn sample_jump_radius(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::domain("u", u, "(0, 1)"));
        }
        self.calc.big_l_inv((1.0 - u) * self.l_eps)
    }

    /// Zero in drop mode.
    pub fn small_jump_std(&self) -> f64 {
        self.small_std
    }

    /// Runs from `x0` until the first exit from `B_r(center)`.
    pub fn simulate_exit<R: Rng + ?Sized>(&self, x0: Point, center: Point, r: f64, rng: &mut R) -> Result<ExitRecord> {
        self.run(x0, center, r, None::<&super::region::EmptySet>, rng, &mut |_| {})
    }

    /// [`simulate_exit`](Self::simulate_exit) reporting every event to `observer`.
    pub fn simulate_exit_observed<R, O>(
        &self,
        x0: Point,
        center: Point,
        r: f64,
        rng: &mut R,
        observer: &mut O,
    ) -> Result<ExitRecord>
    where
        R: Rng + ?Sized,
        O: FnMut(&PathEvent),
    {
        self.run(x0, center, r, None::<&super::region::EmptySet>, rng, observer)
    }

    /// Runs until the path enters `target` or leaves `B_r(domain_center)`,
    /// whichever comes first. Membership in the target is tested before the
    /// exit condition at every event.
    pub fn simulate_hit_or_exit<R, T>(
        &self,
        x0: Point,
        target: &T,
        domain_center: Point,
        domain_r: f64,
        rng: &mut R,
    ) -> Result<ExitRecord>
    where
        R: Rng + ?Sized,
        T: Region + ?Sized,
    {
        self.run(x0, domain_center, domain_r, Some(target), rng, &mut |_| {})
    }

    /// [`simulate_hit_or_exit`](Self::simulate_hit_or_exit) reporting every event to `observer`.
    pub fn simulate_hit_or_exit_observed<R, T, O>(
        &self,
        x0: Point,
        target: &T,
        domain_center: Point,
        domain_r: f64,
        rng: &mut R,
        observer: &mut O,
    ) -> Result<ExitRecord>
    where
        R: Rng + ?Sized,
        T: Region + ?Sized,
        O: FnMut(&PathEvent),
    {
        self.run(x0, domain_center, domain_r, Some(target), rng, observer)
    }

    fn run<R, T, O>(
        &self,
        x0: Point,
        center: Point,
        r: f64,
        target: Option<&T>,
        rng: &mut R,
        observer: &mut O,
    ) -> Result<ExitRecord>
    where
        R: Rng + ?Sized,
        T: Region + ?Sized,
        O: FnMut(&PathEvent),
    {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::domain("r", r, "(0, 1)"));
        }
        if !(x0.dist(&center) < r) {
            return Err(Error::domain("|x0 - center|", x0.dist(&center), "[0, r)"));
        }
        let hit_flag = |hit: bool| target.map(|_| hit);
        if let Some(t) = target {
            if t.contains(&x0) {
                return Ok(ExitRecord {
                    exit_time: 0.0,
                    exit_position: x0,
                    pre_exit_position: x0,
                    jump_count: 0,
                    hit_flag: Some(true),
                    complete: true,
                });
            }
        }

        let rate = self.jump_rate();
        let var = self.small_std * self.small_std;
        let dt_floor = if var > 0.0 { (1e-3 * r).powi(2) / (4.0 * var) } else { 0.0 };

        let mut x = x0;
        let mut t = 0.0;
        let mut jumps = 0u64;
        let mut events = 0u64;

        // checks the current position; returns the finished record if the run ends here
        let settle = |x: Point, prev: Point, t: f64, jumps: u64| -> Option<ExitRecord> {
            let in_target = target.is_some_and(|tg| tg.contains(&x));
            if in_target || x.dist(&center) >= r {
                Some(ExitRecord {
                    exit_time: t,
                    exit_position: x,
                    pre_exit_position: prev,
                    jump_count: jumps,
                    hit_flag: hit_flag(in_target),
                    complete: true,
                })
            } else {
                None
            }
        };

        loop {
            if events >= self.max_events {
                return Ok(ExitRecord {
                    exit_time: t,
                    exit_position: x,
                    pre_exit_position: x,
                    jump_count: jumps,
                    hit_flag: None,
                    complete: false,
                });
            }
            let wait: f64 = rng.sample::<f64, _>(Exp1) / rate;

            if var > 0.0 {
                let mut remaining = wait;
                while remaining > 0.0 {
                    let gap = r - x.dist(&center);
                    let mut h = (gap * gap / (4.0 * var)).max(dt_floor);
                    if h >= remaining {
                        h = remaining;
                        remaining = 0.0;
                    } else {
                        remaining -= h;
                    }
                    let sd = (var * h).sqrt();
                    let prev = x;
                    for i in 0..self.d.get() {
                        x.0[i] += sd * rng.sample::<f64, _>(StandardNormal);
                    }
                    t += h;
                    events += 1;
                    observer(&PathEvent { t, position: x, radius: 0.0 });
                    if let Some(rec) = settle(x, prev, t, jumps) {
                        return Ok(rec);
                    }
                    if events >= self.max_events {
                        break;
                    }
                }
                if remaining > 0.0 {
                    continue;
                }
            } else {
                t += wait;
            }

            let u: f64 = rng.sample(Open01);
            let radius = self.calc.big_l_inv((1.0 - u) * self.l_eps)?;
            let dir = sample_direction(self.d, rng);
            let prev = x;
            x = x + dir * radius;
            jumps += 1;
            events += 1;
            observer(&PathEvent { t, position: x, radius });
            if let Some(rec) = settle(x, prev, t, jumps) {
                return Ok(rec);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scale::ScaleFunction;
    use crate::sim::path_rng;
    use crate::sim::region::{Ball, Complement, EmptySet};

    fn power1(eps: f64) -> JumpProcessModel {
        JumpProcessModel::new(
            Dim::One,
            ScaleCalculus::new(ScaleFunction::power(1.0).unwrap()),
            eps,
            SmallJumpMode::Drop,
        )
        .unwrap()
    }

    #[test]
    fn jump_rate_examples() {
        let m = JumpProcessModel::new(Dim::One, ScaleCalculus::new(ScaleFunction::constant()), 0.1, SmallJumpMode::Drop)
            .unwrap();
        assert!((m.jump_rate() - 2.0 * 10f64.ln()).abs() < 1e-14);
        let m6 = JumpProcessModel::new(Dim::One, ScaleCalculus::new(ScaleFunction::inv_log2()), 0.0, SmallJumpMode::Drop)
            .unwrap();
        assert!((m6.jump_rate() - 2.885_390_081_777_927).abs() < 1e-14);
        let near_one =
            JumpProcessModel::new(Dim::One, ScaleCalculus::new(ScaleFunction::constant()), 1.0 - 1e-9, SmallJumpMode::Drop)
                .unwrap();
        assert!(near_one.jump_rate() < 1e-8);
    }

    #[test]
    fn zero_cutoff_needs_finite_measure() {
        let r = JumpProcessModel::new(Dim::One, ScaleCalculus::new(ScaleFunction::constant()), 0.0, SmallJumpMode::Drop);
        assert!(matches!(r, Err(Error::Range(_))));
        assert!(JumpProcessModel::new(Dim::One, ScaleCalculus::new(ScaleFunction::constant()), 1.0, SmallJumpMode::Drop)
            .is_err());
    }

    #[test]
    fn radius_sampler_examples() {
        let m = JumpProcessModel::new(Dim::One, ScaleCalculus::new(ScaleFunction::constant()), 0.01, SmallJumpMode::Drop)
            .unwrap();
        assert!((m.sample_jump_radius(0.5).unwrap() - 0.1).abs() < 1e-14);
        assert!((m.sample_jump_radius(1e-12).unwrap() - 0.01).abs() < 1e-12);
        assert!((m.sample_jump_radius(1.0 - 1e-12).unwrap() - 1.0).abs() < 1e-10);
        assert!(m.sample_jump_radius(0.0).is_err());
        assert!(m.sample_jump_radius(1.0).is_err());
    }

    #[test]
    fn small_jump_std_examples() {
        assert_eq!(power1(0.1).small_jump_std(), 0.0);
        let c4 = JumpProcessModel::new(Dim::One, ScaleCalculus::new(ScaleFunction::constant()), 0.1, SmallJumpMode::Gaussian)
            .unwrap();
        assert!((c4.small_jump_std() - 0.1).abs() < 1e-12);
        let c2 = JumpProcessModel::new(
            Dim::One,
            ScaleCalculus::new(ScaleFunction::power(1.0).unwrap()),
            0.1,
            SmallJumpMode::Gaussian,
        )
        .unwrap();
        assert!((c2.small_jump_std() - 0.2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn exit_record_contract() {
        let m = power1(1e-3);
        let c = Point::on_axis(0.3);
        for i in 0..200 {
            let mut rng = path_rng(7, i);
            let rec = m.simulate_exit(c, c, 0.05, &mut rng).unwrap();
            assert!(rec.complete);
            assert!(rec.jump_count >= 1);
            assert!(rec.exit_position.dist(&c) >= 0.05);
            assert!(rec.pre_exit_position.dist(&c) < 0.05);
            assert!(rec.exit_time > 0.0);
            assert_eq!(rec.hit_flag, None);
        }
    }

    #[test]
    fn gaussian_mode_exits() {
        let m = JumpProcessModel::new(
            Dim::Two,
            ScaleCalculus::new(ScaleFunction::power(1.5).unwrap()),
            0.01,
            SmallJumpMode::Gaussian,
        )
        .unwrap();
        assert!(m.small_jump_std() > 0.0);
        for i in 0..50 {
            let mut rng = path_rng(3, i);
            let rec = m.simulate_exit(Point::ORIGIN, Point::ORIGIN, 0.1, &mut rng).unwrap();
            assert!(rec.complete);
            assert!(rec.exit_position.norm() >= 0.1);
            assert!(rec.pre_exit_position.norm() < 0.1);
        }
    }

    #[test]
    fn hit_or_exit_degenerate_targets() {
        let m = power1(1e-3);
        let domain = Ball { center: Point::ORIGIN, radius: 0.2 };
        for i in 0..100 {
            let exit = m.simulate_exit(Point::ORIGIN, Point::ORIGIN, 0.2, &mut path_rng(1, i)).unwrap();
            let all = m
                .simulate_hit_or_exit(Point::ORIGIN, &Complement(domain), Point::ORIGIN, 0.2, &mut path_rng(1, i))
                .unwrap();
            assert_eq!(all.hit_flag, Some(true));
            assert_eq!(all.exit_time, exit.exit_time);
            let none = m
                .simulate_hit_or_exit(Point::ORIGIN, &EmptySet, Point::ORIGIN, 0.2, &mut path_rng(1, i))
                .unwrap();
            assert_eq!(none.hit_flag, Some(false));
        }
    }

    #[test]
    fn starting_inside_target_hits_immediately() {
        let m = power1(1e-3);
        let rec = m
            .simulate_hit_or_exit(Point::ORIGIN, &|_: &Point| true, Point::ORIGIN, 0.2, &mut path_rng(0, 0))
            .unwrap();
        assert!(rec.hit());
        assert_eq!(rec.exit_time, 0.0);
        assert_eq!(rec.jump_count, 0);
    }

    #[test]
    fn event_cap_flags_incomplete() {
        let m = power1(1e-6).with_max_events(10);
        let rec = m.simulate_exit(Point::ORIGIN, Point::ORIGIN, 0.5, &mut path_rng(0, 0)).unwrap();
        assert!(!rec.complete);
        assert!(matches!(rec.into_complete(10, 4), Err(Error::EventCap { cap: 10, path_index: 4 })));
    }

    #[test]
    fn preconditions() {
        let m = power1(1e-3);
        let mut rng = path_rng(0, 0);
        assert!(m.simulate_exit(Point::on_axis(0.3), Point::ORIGIN, 0.2, &mut rng).is_err());
        assert!(m.simulate_exit(Point::ORIGIN, Point::ORIGIN, 1.0, &mut rng).is_err());
    }

    #[test]
    fn observer_sees_every_jump() {
        let m = power1(1e-2);
        let mut seen = Vec::new();
        let rec = m
            .simulate_exit_observed(Point::ORIGIN, Point::ORIGIN, 0.3, &mut path_rng(5, 2), &mut |e| seen.push(*e))
            .unwrap();
        assert_eq!(seen.len() as u64, rec.jump_count);
        assert_eq!(seen.last().unwrap().position, rec.exit_position);
        assert!(seen.windows(2).all(|w| w[0].t <= w[1].t));
    }
}
