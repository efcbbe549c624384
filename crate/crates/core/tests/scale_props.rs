use levyscale::scale::{Family, ScaleCalculus, ScaleFunction};
use levyscale::{Dim, Error};
use proptest::prelude::*;

fn calc(family: usize, beta: f64) -> ScaleCalculus {
    let f = Family::BUILTIN[family];
    ScaleCalculus::new(ScaleFunction::builtin(f, f.uses_beta().then_some(beta)).unwrap())
}

fn log_radius(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.ln()..hi.ln()).prop_map(f64::exp)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn big_l_is_strictly_decreasing(fam in 0usize..6, beta in 0.1f64..1.9, r1 in log_radius(1e-8, 0.99), k in 1.001f64..10.0) {
        let c = calc(fam, beta);
        let r2 = (r1 * k).min(0.999);
        prop_assume!(r2 > r1 * 1.0001);
        prop_assert!(c.big_l(r1).unwrap() > c.big_l(r2).unwrap());
    }

    #[test]
    fn inverse_is_consistent(fam in 0usize..6, beta in 0.1f64..1.9, r in log_radius(1e-12, 0.999)) {
        let c = calc(fam, beta);
        let y = c.big_l(r).unwrap();
        let back = c.big_l(c.big_l_inv(y).unwrap()).unwrap();
        prop_assert!((back - y).abs() <= (1e-8 * y).max(1e-12), "y = {y}, back = {back}");
    }

    #[test]
    fn phi_is_ordered_and_composes(fam in 0usize..6, beta in 0.1f64..1.9, r in log_radius(1e-6, 0.9),
                                    a in 1.0f64..20.0, b in 1.0f64..20.0) {
        let c = calc(fam, beta);
        let pa = c.phi(a, r).unwrap();
        prop_assert!(pa >= r && pa < 1.0);
        let l_r = c.big_l(r).unwrap();
        let comp = c.phi(a, c.phi(b, r).unwrap()).unwrap();
        prop_assert!((c.big_l(comp).unwrap() * a * b - l_r).abs() <= 1e-6 * l_r);
    }

    #[test]
    fn mu_is_additive(fam in 0usize..6, beta in 0.1f64..1.9, r in log_radius(1e-6, 0.5),
                      k1 in 1.0f64..1.4, k2 in 1.0f64..1.4, d in 1usize..4) {
        let c = calc(fam, beta);
        let d = Dim::new(d).unwrap();
        let (r2, r3) = (r * k1, r * k1 * k2);
        let split = c.mu_annulus(r, r2, d).unwrap() + c.mu_annulus(r2, r3, d).unwrap();
        let whole = c.mu_annulus(r, r3, d).unwrap();
        prop_assert!((split - whole).abs() <= 1e-12 * whole.max(1e-300) + 1e-15);
    }
}

#[test]
fn slowly_varying_ratio_decreases() {
    for fam in [Family::Log, Family::Const, Family::InvLog] {
        let c = ScaleCalculus::new(ScaleFunction::builtin(fam, None).unwrap());
        let ratios: Vec<f64> =
            (2..=6).map(|k| 10f64.powi(-k)).map(|r| c.ell_eval(r).unwrap() / c.big_l(r).unwrap()).collect();
        assert!(ratios.windows(2).all(|w| w[1] < w[0]), "{fam}: {ratios:?}");
    }
}

#[test]
fn table_examples() {
    let c4 = ScaleCalculus::new(ScaleFunction::constant());
    assert!((c4.phi(2.0, 0.25).unwrap() - 0.5).abs() < 1e-12);
    let c2 = ScaleCalculus::new(ScaleFunction::power(1.0).unwrap());
    assert!((c2.big_l(0.1).unwrap() - 9.0).abs() < 1e-12);
}

#[test]
fn finite_measure_family_has_clean_range_errors() {
    let c = ScaleCalculus::new(ScaleFunction::inv_log2());
    let limit = c.big_l_at_zero().unwrap();
    assert!((limit - 1.0 / std::f64::consts::LN_2).abs() < 1e-15);
    assert!((c.big_l(1e-12).unwrap() - limit).abs() < 0.06);
    assert!(matches!(c.big_l_inv(limit), Err(Error::Range(_))));
    assert!(matches!(c.big_l_inv(2.0 * limit), Err(Error::Range(_))));
    // φ_a stays away from zero as r → 0
    assert!(c.phi(2.0, 1e-12).unwrap() > 0.1);
    assert!(c.dyadic_radii(0.4, 4.0, 6).is_err());
}

#[test]
fn domain_errors() {
    let c = ScaleCalculus::new(ScaleFunction::log());
    assert!(matches!(c.big_l(0.0), Err(Error::Domain { .. })));
    assert!(matches!(c.big_l(1.5), Err(Error::Domain { .. })));
    assert!(c.ell_eval(1.0).is_err());
    assert!(c.phi(0.5, 0.1).is_err());
    assert!(c.mu_annulus(0.3, 0.2, Dim::One).is_err());
    assert_eq!(c.big_l(1.0).unwrap(), 0.0);
}
