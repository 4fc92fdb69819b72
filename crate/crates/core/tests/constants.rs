mod common;

use std::f64::consts::{PI, SQRT_2};

use common::*;
use nscert::constants::{
    assemble_bundle, beta_star, estimate_interp_constant, estimate_sobolev_constant, fill_missing, interp_ratio, k5,
    sobolev_ratio, PiecewiseLinearField, Provenance, SobolevConstantTable, SobolevValues, DEFAULT_SAFETY,
};
use nscert::spectral::SpectralField;
use rand::Rng;

#[test]
fn k4_unit_example() {
    let b = bundle_with(0.5, TWO_PI, 0.25, 2.0);
    assert!((b.k4 - 1.0).abs() < 1e-15);
    assert!((b.k4_closed_form - 1.0).abs() < 1e-15);
}

#[test]
fn k3_is_box_invariant_at_half() {
    let k3: Vec<f64> = [PI, TWO_PI, 4.0 * PI]
        .iter()
        .map(|&l| bundle_with(0.5, l, 0.1, 2.7).k3)
        .collect();
    assert!(rel(k3[0], k3[1]) < 1e-13 && rel(k3[1], k3[2]) < 1e-13);
}

#[test]
fn assembled_constants_match_closed_forms() {
    let mut r = rng(20);
    for _ in 0..20 {
        let alpha = r.gen_range(0.5..=1.0);
        let l = r.gen_range(0.3..20.0);
        let eps = r.gen_range(0.01..0.5);
        let b = bundle_with(alpha, l, eps, r.gen_range(1.0..30.0));
        assert!(rel(b.k3, b.k3_closed_form) < 1e-12);
        assert!(rel(b.k4, b.k4_closed_form) < 1e-12);
        assert!(rel(b.k2_assembled / b.k2_closed_form, TWO_PI.powi(-3)) < 1e-12);
        assert_eq!(b.k2, b.k2_closed_form.max(b.k2_assembled));
    }
}

#[test]
fn k2_and_k3_grow_with_the_box() {
    for alpha in [0.6, 0.75, 1.0] {
        let mut last = (0.0, 0.0);
        for l in [0.5, 1.0, 2.0, 4.0, 8.0] {
            let b = bundle_with(alpha, l, 0.1, 3.0);
            assert!(b.k2 > last.0 && b.k3 > last.1);
            last = (b.k2, b.k3);
        }
    }
}

#[test]
fn bundle_assembly_is_pure() {
    let a = bundle_with(0.8, 1.7, 0.2, 4.2);
    let b = bundle_with(0.8, 1.7, 0.2, 4.2);
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn bundle_rejects_bad_inputs() {
    let mut t = SobolevConstantTable::new();
    for beta in SobolevValues::betas(0.5) {
        t.record_estimate(beta, 2.0, 1.5).unwrap();
    }
    assert!(assemble_bundle(0.5, TWO_PI, 0.1, 0.1, &t).is_ok());
    assert!(assemble_bundle(0.4, TWO_PI, 0.1, 0.1, &t).is_err());
    assert!(assemble_bundle(0.5, TWO_PI, 0.0, 0.1, &t).is_err());
    assert!(assemble_bundle(0.5, TWO_PI, 0.1, -1.0, &t).is_err());
    assert!(assemble_bundle(0.75, TWO_PI, 0.1, 0.1, &t).is_err());
}

#[test]
fn table_effective_values_and_overrides() {
    let mut t = SobolevConstantTable::new();
    t.record_estimate(0.5, 4.0, 1.5).unwrap();
    assert_eq!(t.effective(0.5), Some(6.0));
    assert_eq!(t.get(0.5).unwrap().beta_star, 3.0);
    assert!(t.set_override(0.5, 3.0, Provenance::User).is_err());
    t.set_override(0.5, 5.0, Provenance::Literature).unwrap();
    assert_eq!(t.effective(0.5), Some(5.0));
    assert!(t.require(1.5).is_err());
    assert!(t.record_estimate(2.0, 1.0, 1.5).is_err());
    assert!(t.record_estimate(0.1, 1.0, 0.5).is_err());

    let back = SobolevConstantTable::from_json(&t.to_json().unwrap()).unwrap();
    assert_eq!(back, t);
    assert_eq!(beta_star(0.0), 2.0);
    assert_eq!(beta_star(1.0), 6.0);
}

#[test]
fn sobolev_estimate_at_zero_is_parseval() {
    let v = estimate_sobolev_constant(0.0, 50, 3).unwrap();
    assert!(rel(v, TWO_PI.powf(1.5)) < 1e-6);
}

#[test]
fn sobolev_ratio_is_homogeneous() {
    let mut r = rng(21);
    let f = random_solenoidal(&mut r, 1.0, 3);
    let a = sobolev_ratio(&f, 0.7, 3).unwrap();
    let b = sobolev_ratio(&f.scaled(-17.5), 0.7, 3).unwrap();
    assert!(rel(a, b) < 1e-13);
    assert!(sobolev_ratio(&SpectralField::zeros(1.0, 2).unwrap(), 0.7, 3).is_err());
}

#[test]
fn sobolev_estimator_is_monotone_and_reproducible() {
    let small = estimate_sobolev_constant(0.5, 100, 9).unwrap();
    let large = estimate_sobolev_constant(0.5, 600, 9).unwrap();
    assert!(large >= small);
    let again = estimate_sobolev_constant(0.5, 600, 9).unwrap();
    assert_eq!(large.to_bits(), again.to_bits());
    assert!(estimate_sobolev_constant(2.0, 10, 0).is_err());
}

#[test]
fn fill_missing_keeps_existing_entries() {
    let mut t = SobolevConstantTable::new();
    t.set_override(1.0, 50.0, Provenance::User).unwrap();
    fill_missing(&mut t, &SobolevValues::betas(0.5), 20, 0, DEFAULT_SAFETY).unwrap();
    assert_eq!(t.effective(1.0), Some(50.0));
    let e = t.get(0.0).unwrap();
    assert_eq!(e.provenance, Provenance::Estimated);
    assert_eq!(e.effective(), e.estimate * DEFAULT_SAFETY);
}

#[test]
fn k5_of_single_mode() {
    let z = c(0.0, 0.3);
    let u = single_mode(TWO_PI, 2, [1, 0, 0], [c(0.0, 0.0), z, c(0.0, 0.0)]);
    assert_eq!(k5(&SpectralField::zeros(TWO_PI, 2).unwrap(), 0.75).unwrap(), 0.0);
    for alpha in [0.5, 0.75, 1.0] {
        // u ⊗ u has a single yy entry z² at ±2k
        let norm = (2.0 * 2f64.powf(2.0 + 2.0 * alpha)).sqrt() * z.norm_sqr();
        assert!(rel(k5(&u, alpha).unwrap(), SQRT_2 * norm) < 1e-13);
        for side in [1.0, 9.0] {
            let d = u.dilate(side / TWO_PI).unwrap();
            let lam = (TWO_PI / side).powi(2);
            assert!(rel(k5(&d, alpha).unwrap(), SQRT_2 * lam.powf(alpha + 0.5) * norm) < 1e-13);
        }
    }
}

#[test]
fn interp_ratio_of_constant_single_mode() {
    let u = single_mode(TWO_PI, 2, [1, 0, 0], [c(0.0, 0.0), c(0.4, -0.1), c(0.0, 0.0)]);
    let f = PiecewiseLinearField::constant(u.clone(), 3.0);
    // p = 2: the mean of sin² is exactly ½
    assert!(rel(interp_ratio(&f, 0.5, 2).unwrap(), TWO_PI.powf(1.5)) < 1e-12);
    // p = 3: mean of |sin|³ is 4/(3π)
    let expected = SQRT_2 * TWO_PI * (4.0 / (3.0 * PI)).powf(1.0 / 3.0);
    assert!(rel(interp_ratio(&f, 1.0, 16).unwrap(), expected) < 1e-3);

    let scaled = PiecewiseLinearField::constant(u.scaled(9.0), 3.0);
    assert!(rel(interp_ratio(&scaled, 0.75, 3).unwrap(), interp_ratio(&PiecewiseLinearField::constant(u, 3.0), 0.75, 3).unwrap()) < 1e-13);
}

#[test]
fn interp_estimator_is_monotone_and_reproducible() {
    let a = estimate_interp_constant(0.75, 1.0, 50, 4).unwrap();
    let b = estimate_interp_constant(0.75, 1.0, 150, 4).unwrap();
    assert!(b >= a && a > 0.0);
    assert_eq!(b.to_bits(), estimate_interp_constant(0.75, 1.0, 150, 4).unwrap().to_bits());
}
