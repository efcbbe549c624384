use std::f64::consts::{LN_2, PI};

use levyscale::scale::{ScaleCalculus, ScaleFunction};
use levyscale::sim::{
    path_rng, sample_direction, small_jump_std_at, Ball, Complement, EmptySet, JumpProcessModel, SmallJumpMode,
};
use levyscale::{Dim, Error, Point};
use rand::distr::Open01;
use rand::Rng;

fn model(d: Dim, ell: ScaleFunction, eps: f64) -> JumpProcessModel {
    JumpProcessModel::new(d, ScaleCalculus::new(ell), eps, SmallJumpMode::Drop).unwrap()
}

/// 5% critical value of chi-square with 7 degrees of freedom.
const CHI2_7_05: f64 = 14.067;

fn chi_square_uniform(angles: &[f64], bins: usize) -> f64 {
    let mut counts = vec![0usize; bins];
    for a in angles {
        let u = (a + PI) / (2.0 * PI);
        counts[((u * bins as f64) as usize).min(bins - 1)] += 1;
    }
    let expected = angles.len() as f64 / bins as f64;
    counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum()
}

fn ks_two_sample(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

#[test]
fn radius_law_in_three_dimensions() {
    let calc = ScaleCalculus::new(ScaleFunction::log());
    let m = model(Dim::Three, ScaleFunction::log(), 1e-3);
    let l_eps = calc.big_l(1e-3).unwrap();
    let mut rng = path_rng(3, 0);
    let n = 20_000;
    let mut radii: Vec<f64> = (0..n).map(|_| m.sample_jump_radius(rng.sample(Open01)).unwrap()).collect();
    radii.sort_by(f64::total_cmp);
    let ks = radii
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let f = 1.0 - calc.big_l(t).unwrap() / l_eps;
            (f - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - f).abs())
        })
        .fold(0.0, f64::max);
    assert!(ks < 0.015, "KS = {ks}");
    assert!(radii[0] > 1e-3 && radii[n - 1] < 1.0);
}

#[test]
fn directions_are_uniform() {
    let mut rng = path_rng(4, 0);
    let n = 10_000;
    let plus = (0..n).filter(|_| sample_direction(Dim::One, &mut rng).first() > 0.0).count() as f64 / n as f64;
    assert!((plus - 0.5).abs() < 4.0 * (0.25 / n as f64).sqrt(), "{plus}");

    let mut sum = Point::ORIGIN;
    for _ in 0..n {
        let v = sample_direction(Dim::Three, &mut rng);
        assert!((v.norm() - 1.0).abs() < 1e-12);
        sum = sum + v;
    }
    assert!((sum * (1.0 / n as f64)).norm() <= 0.02);

    let angles: Vec<f64> = (0..n)
        .map(|_| {
            let v = sample_direction(Dim::Two, &mut rng);
            v.0[1].atan2(v.0[0])
        })
        .collect();
    assert!(chi_square_uniform(&angles, 8) < CHI2_7_05);
}

#[test]
fn exit_angles_are_isotropic_in_two_dimensions() {
    let m = model(Dim::Two, ScaleFunction::power(1.0).unwrap(), 1e-2);
    let angles: Vec<f64> = (0..10_000)
        .map(|i| {
            let rec = m.simulate_exit(Point::ORIGIN, Point::ORIGIN, 0.1, &mut path_rng(5, i)).unwrap();
            rec.exit_position.0[1].atan2(rec.exit_position.0[0])
        })
        .collect();
    let chi2 = chi_square_uniform(&angles, 8);
    assert!(chi2 < CHI2_7_05, "chi2 = {chi2}");
}

#[test]
fn records_are_reproducible() {
    for mode in [SmallJumpMode::Drop, SmallJumpMode::Gaussian] {
        let m = JumpProcessModel::new(Dim::Two, ScaleCalculus::new(ScaleFunction::power(1.2).unwrap()), 1e-2, mode)
            .unwrap();
        let a = m.simulate_exit(Point::ORIGIN, Point::ORIGIN, 0.2, &mut path_rng(6, 17)).unwrap();
        let b = m.simulate_exit(Point::ORIGIN, Point::ORIGIN, 0.2, &mut path_rng(6, 17)).unwrap();
        assert_eq!(a, b);
        let c = m.simulate_exit(Point::ORIGIN, Point::ORIGIN, 0.2, &mut path_rng(6, 18)).unwrap();
        assert_ne!(a, c);
    }
}

#[test]
fn reflection_symmetry_in_one_dimension() {
    let m = model(Dim::One, ScaleFunction::power(1.0).unwrap(), 1e-3);
    let n = 4000;
    let x0 = Point::on_axis(0.03);
    let direct: Vec<f64> = (0..n)
        .map(|i| m.simulate_exit(x0, Point::ORIGIN, 0.1, &mut path_rng(7, i)).unwrap().exit_position.first())
        .collect();
    let mirrored: Vec<f64> = (0..n)
        .map(|i| {
            let rec = m.simulate_exit(x0.reflect_through(&Point::ORIGIN), Point::ORIGIN, 0.1, &mut path_rng(8, i));
            -rec.unwrap().exit_position.first()
        })
        .collect();
    let d = ks_two_sample(direct, mirrored);
    let critical = 1.358 * (2.0 / n as f64).sqrt();
    assert!(d < critical, "KS = {d}, critical {critical}");
}

#[test]
fn finite_measure_exit_needs_a_jump() {
    let m = model(Dim::One, ScaleFunction::inv_log2(), 0.0);
    assert!((m.jump_rate() - 2.0 / LN_2).abs() < 1e-12);
    let times: Vec<f64> = (0..4000)
        .map(|i| m.simulate_exit(Point::ORIGIN, Point::ORIGIN, 0.5, &mut path_rng(9, i)).unwrap().exit_time)
        .collect();
    let mean = times.iter().sum::<f64>() / times.len() as f64;
    let var = times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (times.len() - 1) as f64;
    let se = (var / times.len() as f64).sqrt();
    assert!(mean - 3.0 * se >= LN_2 / 2.0, "mean {mean} ± {se}");
    assert!(times.iter().all(|&t| t > 0.0));
}

#[test]
fn trivial_targets() {
    let m = model(Dim::Two, ScaleFunction::power(1.0).unwrap(), 1e-2);
    let domain = Ball { center: Point::ORIGIN, radius: 0.2 };
    for i in 0..200 {
        let exit = m.simulate_exit(Point::ORIGIN, Point::ORIGIN, 0.2, &mut path_rng(10, i)).unwrap();
        let hit = m
            .simulate_hit_or_exit(Point::ORIGIN, &Complement(domain), Point::ORIGIN, 0.2, &mut path_rng(10, i))
            .unwrap();
        assert_eq!(hit.hit_flag, Some(true));
        assert_eq!(hit.exit_time, exit.exit_time);
        let miss = m.simulate_hit_or_exit(Point::ORIGIN, &EmptySet, Point::ORIGIN, 0.2, &mut path_rng(10, i)).unwrap();
        assert_eq!(miss.hit_flag, Some(false));
    }
}

#[test]
fn event_cap_and_bad_inputs() {
    let m = model(Dim::One, ScaleFunction::power(1.0).unwrap(), 1e-4).with_max_events(3);
    let rec = m.simulate_exit(Point::ORIGIN, Point::ORIGIN, 0.5, &mut path_rng(11, 0)).unwrap();
    assert!(!rec.complete);
    assert!(matches!(rec.into_complete(3, 0), Err(Error::EventCap { cap: 3, path_index: 0 })));
    assert!(m.simulate_exit(Point::on_axis(0.6), Point::ORIGIN, 0.5, &mut path_rng(11, 0)).is_err());
    assert!(m.simulate_exit(Point::ORIGIN, Point::ORIGIN, 1.0, &mut path_rng(11, 0)).is_err());
    let log = ScaleCalculus::new(ScaleFunction::log());
    assert!(JumpProcessModel::new(Dim::One, log, 0.0, SmallJumpMode::Drop).is_err());
}

#[test]
fn small_jump_variance_formula() {
    // constant ℓ: σ/d ∫_0^ε s ds = ε² for d = 1
    let calc = ScaleCalculus::new(ScaleFunction::constant());
    let std = small_jump_std_at(&calc, Dim::One, 1e-2).unwrap();
    assert!((std - 1e-2).abs() < 1e-12);
    let m = JumpProcessModel::new(Dim::One, calc, 1e-2, SmallJumpMode::Gaussian).unwrap();
    assert!((m.small_jump_std() - 1e-2).abs() < 1e-12);
    let rec = m.simulate_exit(Point::ORIGIN, Point::ORIGIN, 0.3, &mut path_rng(12, 0)).unwrap();
    assert!(rec.complete && rec.exit_position.dist(&Point::ORIGIN) >= 0.3);
}
