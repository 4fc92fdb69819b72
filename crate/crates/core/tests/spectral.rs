mod common;

use std::f64::consts::{PI, SQRT_2};

use common::*;
use nscert::spectral::{
    nonlinear_term, snapshot, tensor_product_coefficients, tensor_product_norm, BoxSpec, SpectralField,
};

#[test]
fn single_mode_norm_is_independent_of_order() {
    let u = single_mode(TWO_PI, 3, [1, 0, 0], [c(0.0, 0.0), c(0.3, -0.4), c(0.0, 0.0)]);
    for s in [-1.0, -0.5, 0.0, 0.25, 1.0, 2.5] {
        assert!((u.hs_norm(s) - SQRT_2 * 0.5).abs() < 1e-15);
    }
}

#[test]
fn zero_field_has_zero_norm() {
    let u = SpectralField::zeros(1.0, 4).unwrap();
    for s in [-1.0, 0.0, 1.0] {
        assert_eq!(u.hs_norm(s), 0.0);
    }
}

#[test]
fn two_mode_pairs_give_root_ten() {
    let mut u = SpectralField::zeros(TWO_PI, 3).unwrap();
    u.set_coefficient([1, 0, 0], [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
    u.set_coefficient([0, 2, 0], [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
    assert!((u.hs_norm(1.0) - 10f64.sqrt()).abs() < 1e-14);
}

#[test]
fn norm_ignores_zero_padding() {
    let mut r = rng(1);
    let u = random_field(&mut r, 3.0, 3);
    let padded = u.resized(7).unwrap();
    for s in [-0.5, 0.0, 0.75, 1.5] {
        assert_eq!(u.hs_norm(s).to_bits(), padded.hs_norm(s).to_bits());
    }
}

#[test]
fn inner_product_examples() {
    let mut r = rng(2);
    let a = random_field(&mut r, 2.0, 4);
    assert!(rel(a.hs_inner(&a, 0.7).unwrap(), a.hs_norm_sq(0.7)) < 1e-13);

    let x = single_mode(2.0, 3, [1, 0, 0], [c(0.0, 1.0), c(1.0, 0.0), c(0.0, 0.0)]);
    let y = single_mode(2.0, 3, [0, 1, 2], [c(1.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]);
    assert_eq!(x.hs_inner(&y, 1.0).unwrap(), 0.0);

    let other = SpectralField::zeros(3.0, 3).unwrap();
    assert!(x.hs_inner(&other, 0.0).is_err());
}

#[test]
fn duality_examples() {
    let mut r = rng(3);
    let a = random_field(&mut r, 2.0, 3);
    let b = random_field(&mut r, 2.0, 3);
    assert!(rel(a.duality_inner(&b, 0.0, 0.0).unwrap(), a.hs_inner(&b, 0.0).unwrap()) < 1e-14);

    let e = single_mode(2.0, 3, [2, 0, 0], [c(0.0, 0.0), c(0.5, 0.0), c(0.0, 0.0)]);
    // |k|^{-1}|k| = 1, so the pairing is 2 · 0.25
    assert!((e.duality_inner(&e, -1.0, 1.0).unwrap() - 0.5).abs() < 1e-15);
}

#[test]
fn stokes_power_is_identity_on_unit_modes() {
    let u = single_mode(TWO_PI, 2, [1, 0, 0], [c(0.0, 0.0), c(0.5, 0.1), c(0.0, 0.0)]);
    let v = u.stokes_power(1.0);
    assert!(v.coefficient([1, 0, 0]).iter().zip(u.coefficient([1, 0, 0])).all(|(a, b)| (a - b).norm() < 1e-15));
}

#[test]
fn stokes_power_composes() {
    let mut r = rng(4);
    let u = random_field(&mut r, 1.7, 4);
    let lhs = u.stokes_power(0.3).stokes_power(0.45);
    let rhs = u.stokes_power(0.75);
    assert!(lhs.try_sub(&rhs).unwrap().hs_norm(0.0) < 1e-13 * rhs.hs_norm(0.0));
}

#[test]
fn leray_examples() {
    let u = single_mode(TWO_PI, 2, [1, 0, 0], [c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
    let p = u.leray_project();
    let v = p.coefficient([1, 0, 0]);
    assert!(v[0].norm() < 1e-16 && (v[1] - c(1.0, 0.0)).norm() < 1e-16 && v[2].norm() < 1e-16);
    assert!(p.is_divergence_free());

    let grad = SpectralField::from_fn(TWO_PI, 3, |k| {
        let z = c(0.3 * k[0] as f64 - 0.1, 0.2);
        [z * k[0] as f64, z * k[1] as f64, z * k[2] as f64]
    })
    .unwrap();
    assert!(grad.leray_project().hs_norm(0.0) < 1e-14);

    let mut r = rng(5);
    let w = random_solenoidal(&mut r, 2.0, 3);
    let again = w.leray_project();
    assert!(again.try_sub(&w).unwrap().hs_norm(0.0) < 1e-15 * w.hs_norm(0.0));
}

#[test]
fn divergence_of_projection_vanishes() {
    let mut r = rng(6);
    let u = random_field(&mut r, 2.5, 4);
    assert!(u.divergence().hs_norm(0.0) > 0.1);
    assert!(u.leray_project().divergence().max_abs() < 1e-14);
}

#[test]
fn gradient_of_single_mode_lives_in_second_column() {
    let u = single_mode(TWO_PI, 2, [0, 1, 0], [c(0.4, 0.3), c(0.0, 0.0), c(0.0, 0.0)]);
    let g = u.gradient().coefficient([0, 1, 0]);
    for (i, row) in g.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if j == 1 && i == 0 {
                assert!((v.norm() - 0.5).abs() < 1e-15);
            } else {
                assert_eq!(v.norm(), 0.0);
            }
        }
    }
}

#[test]
fn sine_field_l2_norm() {
    for side in [1.0, TWO_PI, 5.0] {
        // sin(2πx/L) = (e^{iθ} - e^{-iθ}) / 2i
        let u = single_mode(side, 2, [1, 0, 0], [c(0.0, -0.5), c(0.0, 0.0), c(0.0, 0.0)]);
        let l2 = u.lp_norm(2.0, 2).unwrap();
        assert!(rel(l2 * l2, side.powi(3) / 2.0) < 1e-13);
    }
}

#[test]
fn gradient_lp_at_half_matches_identity() {
    let mut r = rng(7);
    let spec = BoxSpec::new(3.0, 1.0, 0.5).unwrap();
    assert_eq!(spec.gradient_exponent(), 2.0);
    let u = random_solenoidal(&mut r, 3.0, 4);
    let lhs = u.gradient_lp_norm(spec.gradient_exponent(), 2).unwrap();
    let rhs = 3f64.powf(1.5) * spec.lambda_unit().sqrt() * u.hs_norm(1.0);
    assert!(rel(lhs, rhs) < 1e-12);
}

#[test]
fn low_high_split() {
    let mut r = rng(8);
    let u = random_field(&mut r, 2.0, 4);
    assert_eq!(u.low_pass(4), u);
    assert_eq!(u.high_pass(5).hs_norm(0.0), 0.0);
    let lo = u.low_pass(2);
    let hi = u.high_pass(2);
    assert!(lo.try_add(&hi).unwrap().try_sub(&u).unwrap().hs_norm(0.0) == 0.0);
    for s in [-1.0, 0.0, 0.5, 2.0] {
        assert!(rel(lo.hs_norm_sq(s) + hi.hs_norm_sq(s), u.hs_norm_sq(s)) < 1e-14);
    }

    let e = single_mode(2.0, 3, [2, 0, 0], [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
    assert_eq!(e.low_pass(1).hs_norm(0.0), 0.0);
    assert_eq!(e.high_pass(1), e);
}

#[test]
fn dilation_keeps_coefficients_and_norms() {
    let mut r = rng(9);
    let u = random_solenoidal(&mut r, 2.0, 3);
    assert_eq!(u.dilate(1.0).unwrap(), u);
    let d = u.dilate(2.5).unwrap();
    assert_eq!(d.side(), 5.0);
    assert_eq!(d.modes(), u.modes());
    for s in [-0.5, 0.0, 1.0] {
        assert_eq!(d.hs_norm(s), u.hs_norm(s));
    }
    assert!(u.dilate(0.0).is_err());
    assert!(u.dilate(-1.0).is_err());
}

#[test]
fn gradient_lp_rescales_with_the_box() {
    let mut r = rng(10);
    let base = random_solenoidal(&mut r, TWO_PI, 3);
    for p in [2.0, 2.4, 3.0] {
        let on_2pi = base.gradient_lp_norm(p, 3).unwrap();
        for side in [PI, 3.0 * PI] {
            let b = base.dilate(side / TWO_PI).unwrap();
            let expected = (side / TWO_PI).powf(3.0 / p - 1.0) * on_2pi;
            assert!(rel(b.gradient_lp_norm(p, 3).unwrap(), expected) < 1e-12);
        }
    }
}

#[test]
fn nonlinear_term_on_single_modes() {
    let a = single_mode(TWO_PI, 2, [1, 0, 0], [c(0.0, 0.0), c(0.7, 0.2), c(0.0, 0.0)]);
    let b = single_mode(TWO_PI, 2, [0, 1, 0], [c(0.1, -0.3), c(0.0, 0.0), c(0.4, 0.0)]);
    let out = nonlinear_term(&a, &b, 4).unwrap();
    let oracle = direct_nonlinear(&a, &b, 4);
    let support = [[1, 1, 0], [1, -1, 0], [-1, 1, 0], [-1, -1, 0]];
    for (k, v) in oracle {
        let got = out.coefficient(k);
        for i in 0..3 {
            assert!((got[i] - v[i]).norm() < 1e-14);
        }
        if !support.contains(&k) {
            assert!(v.iter().all(|z| z.norm() == 0.0));
        }
    }
    assert!(out.hs_norm(0.0) > 0.1);
}

#[test]
fn nonlinear_term_matches_direct_convolution() {
    let mut r = rng(11);
    for m in 1..=3 {
        let a = random_field(&mut r, 1.3, m);
        let b = random_field(&mut r, 1.3, m);
        let out = nonlinear_term(&a, &b, 2 * m).unwrap();
        let oracle = direct_nonlinear(&a, &b, 2 * m);
        let scale = oracle.iter().flat_map(|(_, v)| v.iter().map(|z| z.norm())).fold(0.0, f64::max);
        for (k, v) in oracle {
            let got = out.coefficient(k);
            for i in 0..3 {
                assert!((got[i] - v[i]).norm() <= 1e-12 * scale, "m = {m}, k = {k:?}");
            }
        }
    }
}

#[test]
fn nonlinear_term_is_bilinear() {
    let mut r = rng(12);
    let a = random_field(&mut r, 2.0, 3);
    let b = random_field(&mut r, 2.0, 3);
    let lhs = nonlinear_term(&a, &b.scaled(2.5), 3).unwrap();
    let rhs = nonlinear_term(&a, &b, 3).unwrap().scaled(2.5);
    assert!(lhs.try_sub(&rhs).unwrap().hs_norm(0.0) < 1e-13 * rhs.hs_norm(0.0));
}

#[test]
fn nonlinear_term_rejects_bad_input() {
    let a = SpectralField::zeros(1.0, 2).unwrap();
    let b = SpectralField::zeros(2.0, 2).unwrap();
    assert!(nonlinear_term(&a, &b, 2).is_err());
    assert!(nonlinear_term(&a, &a, 0).is_err());
}

#[test]
fn transport_is_skew_symmetric() {
    let mut r = rng(13);
    for _ in 0..5 {
        let w = random_solenoidal(&mut r, 2.0, 4);
        let b = nonlinear_term(&w, &w, 4).unwrap();
        let scale = b.hs_norm(0.0) * w.hs_norm(0.0);
        assert!(b.hs_inner(&w, 0.0).unwrap().abs() < 1e-13 * scale);
    }
}

#[test]
fn tensor_product_single_mode() {
    let z = c(0.3, 0.4);
    let u = single_mode(TWO_PI, 2, [1, 0, 0], [c(0.0, 0.0), z, c(0.0, 0.0)]);
    let t = tensor_product_coefficients(&u);
    let yy = t.get([2, 0, 0])[4];
    assert!((yy - z * z).norm() < 1e-15);
    for s in [0.0, 1.5, 2.0] {
        // only ±2k survive once the mean block is dropped
        let expected = 2.0 * 2f64.powf(2.0 * s) * z.norm().powi(4);
        assert!(rel(tensor_product_norm(&u, s).powi(2), expected) < 1e-13);
    }
    assert_eq!(tensor_product_norm(&SpectralField::zeros(1.0, 2).unwrap(), 1.0), 0.0);
}

#[test]
fn tensor_product_matches_direct_convolution() {
    let mut r = rng(14);
    for m in 1..=3 {
        let u = random_field(&mut r, 1.0, m);
        for s in [0.5, 1.75] {
            assert!(rel(tensor_product_norm(&u, s).powi(2), direct_tensor_norm_sq(&u, s)) < 1e-12);
        }
    }
}

#[test]
fn snapshot_round_trips() {
    let mut r = rng(15);
    let u = random_solenoidal(&mut r, 2.0, 3);
    let bytes = snapshot::to_bytes(&u);
    assert_eq!(&bytes[..4], snapshot::MAGIC);
    let back = snapshot::read_binary(&bytes[..]).unwrap();
    assert_eq!(back, u);
    let text = snapshot::to_json(&u).unwrap();
    assert_eq!(snapshot::from_json(&text).unwrap().modes(), u.modes());
    assert!(snapshot::read_binary(&b"XXXX1234"[..]).is_err());
}
