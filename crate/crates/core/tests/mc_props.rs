use levyscale::mc::*;
use levyscale::quad::integrate;
use levyscale::scale::{ScaleCalculus, ScaleFunction};
use levyscale::sim::{JumpProcessModel, Region, SmallJumpMode};
use levyscale::{Dim, Error, Point};
use proptest::prelude::*;

/// Pilot-calibrated constants (family power β=1, d=1, ε=1e-3).
const C1_HAT: f64 = 3.0;
const C4_HAT: f64 = 1.0;

fn calc() -> ScaleCalculus {
    ScaleCalculus::new(ScaleFunction::power(1.0).unwrap())
}

fn model(eps: f64) -> JumpProcessModel {
    JumpProcessModel::new(Dim::One, calc(), eps, SmallJumpMode::Drop).unwrap()
}

fn sampling(paths: u64, seed: u64) -> Sampling {
    Sampling::new(paths, seed).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn merge_is_associative(xs in prop::collection::vec(-1e6f64..1e6, 0..40),
                            ys in prop::collection::vec(-1e-6f64..1e-6, 0..40),
                            zs in prop::collection::vec(-1e300f64..1e300, 0..10)) {
        let (a, b, c): (Estimate, Estimate, Estimate) =
            (xs.iter().copied().collect(), ys.iter().copied().collect(), zs.iter().map(|z| z * 1e-10).collect());
        prop_assert_eq!(a.merge(&b).merge(&c), a.merge(&b.merge(&c)));
        prop_assert_eq!(a.merge(&b), b.merge(&a));
    }

    #[test]
    fn ci_is_symmetric(xs in prop::collection::vec(-10f64..10.0, 2..60)) {
        let e: Estimate = xs.iter().copied().collect();
        let (lo, hi) = e.ci95();
        prop_assert!((hi - e.mean() - 1.96 * e.stderr()).abs() <= 1e-12 * (1.0 + e.mean().abs()));
        prop_assert!((e.mean() - lo - 1.96 * e.stderr()).abs() <= 1e-12 * (1.0 + e.mean().abs()));
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        prop_assert!((e.stderr() - (var / n).sqrt()).abs() <= 1e-9 * (1.0 + e.stderr()));
    }
}

#[test]
fn exit_tail_bound_and_range() {
    let m = model(1e-3);
    let c = calc();
    let r = 0.1;
    let t = 0.1 / c.big_l(r).unwrap();
    let e = est_exit_tail(&m, Point::ORIGIN, r, t, sampling(5000, 21)).unwrap();
    assert!((0.0..=1.0).contains(&e.mean()));
    assert!(e.mean() <= C1_HAT * t * c.big_l(r).unwrap(), "{}", e.mean());
    assert!(est_exit_tail(&m, Point::ORIGIN, r, -1.0, sampling(100, 0)).is_err());
}

#[test]
fn exit_means_increase_with_radius() {
    let m = model(1e-3);
    let means: Vec<f64> = [0.05, 0.1, 0.2, 0.4]
        .iter()
        .map(|&r| est_exit_mean(&m, Point::ORIGIN, Point::ORIGIN, r, sampling(2000, 22)).unwrap().mean())
        .collect();
    assert!(means.iter().all(|&x| x > 0.0));
    assert!(means.windows(2).all(|w| w[0] <= w[1]), "{means:?}");
}

#[test]
fn far_exit_bound_and_trend() {
    let m = model(1e-3);
    let c = calc();
    for (r, s) in [(0.02, 0.2), (0.02, 0.4), (0.05, 0.2), (0.05, 0.4)] {
        let e = est_far_exit(&m, Point::ORIGIN, Point::ORIGIN, r, s, sampling(5000, 23)).unwrap();
        assert!((0.0..=1.0).contains(&e.mean()));
        let bound = C4_HAT * c.big_l(s).unwrap() / c.big_l(r).unwrap();
        assert!(e.mean() <= bound, "({r}, {s}): {} > {bound}", e.mean());
    }
    let s = 0.4;
    let trend: Vec<Estimate> = [0.02, 0.05, 0.1]
        .iter()
        .map(|&r| est_far_exit(&m, Point::ORIGIN, Point::ORIGIN, r, s, sampling(5000, 24)).unwrap())
        .collect();
    for w in trend.windows(2) {
        let tol = 3.0 * (w[0].stderr().powi(2) + w[1].stderr().powi(2)).sqrt();
        assert!(w[0].mean() <= w[1].mean() + tol);
    }
    assert!(trend[0].mean() < trend[2].mean());
}

#[test]
fn half_annulus_shape_and_measure() {
    let c = calc();
    let (r, a) = (0.05, 4.0);
    let half = make_half_annulus(&c, Point::ORIGIN, r, a).unwrap();
    let phi = c.phi(a, r).unwrap();
    assert_eq!(half.annulus.outer, phi);
    assert!(half.contains(&Point::on_axis((r + phi) / 2.0)));
    assert!(half.contains(&Point::on_axis(r)));
    assert!(!half.contains(&Point::on_axis(phi)));
    assert!(!half.contains(&Point::on_axis(-(r + phi) / 2.0)));
    // in d = 1 the half annulus is one interval carrying ln a of the 2 ln a annulus mass
    let density = |s: f64| c.ell_eval(s).unwrap() / (c.big_l(s).unwrap() * s);
    let mass = integrate(density, r, phi, 1e-12, 0.0).unwrap().value;
    assert!((mass - 0.5 * Dim::One.sphere_area() * a.ln()).abs() < 1e-9);
}

#[test]
fn hitting_floor_and_target_monotonicity() {
    let m = model(1e-3);
    let s = sampling(4000, 25);
    let half = est_hitting(&m, Point::ORIGIN, Point::ORIGIN, 0.05, 2.0, s).unwrap();
    assert!(half.mean() >= 0.05 * 2f64.ln() / 2.0);
    let full = est_hitting_full_annulus(&m, Point::ORIGIN, Point::ORIGIN, 0.05, 2.0, s).unwrap();
    assert!(full.mean() >= half.mean());
    assert!(full.mean() <= 1.0);
}

fn axis_probe(payoff: Payoff, sup: f64, r: f64) -> HarmonicProbe {
    let grid = HarmonicProbe::axis_grid(Point::ORIGIN, r / 20.0, 4);
    HarmonicProbe::new(payoff, sup, Point::ORIGIN, r, grid).unwrap()
}

#[test]
fn harmonic_probe_basics() {
    let m = model(1e-3);
    let ones = est_harmonic(&m, &axis_probe(constant_payoff(1.0), 1.0, 0.2), sampling(200, 26)).unwrap();
    assert!(ones.values().iter().all(|v| v.mean() == 1.0 && v.stderr() == 0.0));
    assert!(matches!(
        fit_regularity_exponent(&ones, &calc(), 200, 1),
        Err(Error::InsufficientSignal { .. })
    ));

    let probe = axis_probe(half_space_payoff(Point::ORIGIN), 1.0, 0.2);
    let filled = est_harmonic(&m, &probe, sampling(4000, 27)).unwrap();
    assert!(filled.values().iter().all(|v| (0.0..=1.0).contains(&v.mean())));
    let centre = &filled.values()[4];
    assert_eq!(filled.grid()[4], Point::ORIGIN);
    assert!((centre.mean() - 0.5).abs() <= 3.0 * centre.stderr());
}

#[test]
fn regularity_fit_is_scale_invariant() {
    let m = model(1e-3);
    let probe = axis_probe(half_space_payoff(Point::ORIGIN), 1.0, 0.4);
    let s = sampling(6000, 28);
    let full = fit_regularity_exponent(&est_harmonic(&m, &probe, s).unwrap(), &calc(), 500, 3).unwrap();
    let half = fit_regularity_exponent(&est_harmonic(&m, &probe.scaled(0.5), s).unwrap(), &calc(), 500, 3).unwrap();
    assert!((full.gamma_hat - half.gamma_hat).abs() < 1e-12);
    assert_eq!(full.pairs_used, half.pairs_used);
    assert!(full.gamma_hat > 0.0);
    assert!(full.ci_low <= full.gamma_hat && full.gamma_hat <= full.ci_high);
}

#[test]
fn martingale_mean_matches_direct_estimate() {
    let m = model(1e-3);
    let probe = axis_probe(half_space_payoff(Point::ORIGIN), 1.0, 0.4);
    let x = Point::on_axis(0.05);
    let check = martingale_mean_check(&m, &probe, x, x, 0.15, sampling(400, 29), 200).unwrap();
    assert!(agree_within(&check.direct, &check.two_stage, 3.0), "{check:?}");
    assert!(martingale_mean_check(&m, &probe, x, x, 0.5, sampling(100, 29), 10).is_err());
}

#[test]
fn estimates_are_seed_deterministic() {
    let m = model(1e-3);
    let a = est_hitting(&m, Point::ORIGIN, Point::ORIGIN, 0.05, 4.0, sampling(500, 30)).unwrap();
    let b = est_hitting(&m, Point::ORIGIN, Point::ORIGIN, 0.05, 4.0, sampling(500, 30)).unwrap();
    assert_eq!(a, b);
}
