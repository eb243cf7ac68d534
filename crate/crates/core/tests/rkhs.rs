use bochner::rkhs::{
    factorization_check, inner_product_double, membership_scan, norm_double_integral, norm_spectral, reproducing_check,
    verify_isometry, RkhsElement,
};
use bochner::spectra::{catalog_entry, CATALOG_NAMES};
use bochner::testfn::TestFunction;
use num_complex::Complex;
use proptest::prelude::*;

fn phis() -> Vec<TestFunction<f64>> {
    vec![
        TestFunction::standard_gaussian(),
        TestFunction::indicator(0.0, 1.0),
        TestFunction::bspline(3, 1.0),
        TestFunction::bump(0.0, 1.0),
    ]
}

#[test]
fn isometry_on_every_continuous_pair() {
    for name in CATALOG_NAMES {
        let e = catalog_entry::<f64>(name).unwrap();
        for phi in phis() {
            match verify_isometry(&phi, &e, 1e-10) {
                Ok(r) => assert!(r.rel_err <= 1e-6, "{name} {phi:?}: {:e}", r.rel_err),
                Err(err) => assert!(!e.kernel.is_continuous(), "{name}: {err}"),
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn cauchy_schwarz(c1 in -2.0f64..2.0, w1 in 0.3f64..2.0, a in -1.0f64..1.0, len in 0.2f64..2.0) {
        let k = catalog_entry::<f64>("exp").unwrap().kernel;
        let x = RkhsElement::new(TestFunction::gaussian(c1, w1), k.clone());
        let y = RkhsElement::new(TestFunction::indicator(a, a + len), k);
        let ip = inner_product_double(&x, &y, 1e-11).unwrap();
        let nx = norm_double_integral(&x, 1e-11).unwrap();
        let ny = norm_double_integral(&y, 1e-11).unwrap();
        prop_assert!(ip.norm_sqr() <= nx * ny * (1.0 + 1e-8));
    }
}

#[test]
fn two_norm_formulas_agree() {
    for name in ["cos", "exp", "gaussian", "sinc"] {
        let e = catalog_entry::<f64>(name).unwrap();
        for phi in phis() {
            let x = RkhsElement::new(phi, e.kernel.clone());
            let a = norm_double_integral(&x, 1e-11).unwrap();
            let b = norm_spectral(&x, &e.measure, 1e-11).unwrap();
            assert!((a - b).abs() <= 2e-11 * a.max(1.0), "{name}: {a} vs {b}");
        }
    }
}

#[test]
fn translations_are_strongly_continuous() {
    let e = catalog_entry::<f64>("exp").unwrap();
    for phi in [TestFunction::standard_gaussian(), TestFunction::bump(0.0, 1.0)] {
        let x = RkhsElement::new(phi, e.kernel.clone());
        let d: Vec<f64> = (0..=10)
            .map(|k| {
                let t = 0.5f64.powi(k);
                norm_spectral(&x.translate(t).sub(&x).unwrap(), &e.measure, 1e-13).unwrap().sqrt()
            })
            .collect();
        assert!(d.windows(2).all(|w| w[1] < w[0]), "{d:?}");
        // linear rate for smooth φ: halving t halves the distance
        assert!((d[10] / d[9] - 0.5).abs() < 1e-2, "{d:?}");
    }
}

#[test]
fn reproducing_and_factorization() {
    let k = catalog_entry::<f64>("exp").unwrap().kernel;
    let r = reproducing_check(&k, 0.4, &TestFunction::standard_gaussian(), 1e-9).unwrap();
    assert!(r.diff < 1e-5, "{r:?}");
    let coarse = factorization_check(&k, 0.2, 1.1, 64, 1e-10).unwrap();
    let fine = factorization_check(&k, 0.2, 1.1, 1024, 1e-10).unwrap();
    assert!(fine.diff < coarse.diff && fine.diff < 1e-3, "{coarse:?} {fine:?}");
}

#[test]
fn membership_separates_bounded_from_unbounded() {
    let k = catalog_entry::<f64>("exp").unwrap().kernel;
    let radii = [1.0, 4.0, 16.0];
    // e^{-|x|} lies in its own space
    let inside = membership_scan(&k, |x: f64| Complex::new((-x.abs()).exp(), 0.0), &radii, 1e-12).unwrap();
    assert!(!inside.diverging, "{inside:?}");
    assert!(inside.estimates.iter().all(|&a| a <= 1.0 + 1e-8));
    let outside = membership_scan(&k, |x: f64| Complex::new(x * x, 0.0), &radii, 1e-12).unwrap();
    assert!(outside.diverging, "{outside:?}");
}
