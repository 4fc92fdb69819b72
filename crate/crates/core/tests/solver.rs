mod common;

use common::*;
use nscert::solver::{
    difference_trajectory, galerkin_residual, heat_evolve, integrate, ForcedMode, Forcing, RunStatus, SolverConfig,
    TrajectoryKind,
};
use nscert::spectral::{nonlinear_term, BoxSpec, SpectralField};

fn spec(alpha: f64) -> BoxSpec {
    BoxSpec::new(TWO_PI, 1.0, alpha).unwrap()
}

fn config(m: usize, dt: f64, t_end: f64) -> SolverConfig {
    let mut c = SolverConfig::new(m, dt, t_end);
    c.sample_every = Some(0.1);
    c
}

#[test]
fn heat_flow_examples() {
    let mut r = rng(30);
    let u = random_solenoidal(&mut r, TWO_PI, 3);
    assert_eq!(heat_evolve(&u, 0.0, 1.0).unwrap(), u);

    let e = single_mode(TWO_PI, 3, [1, 2, 0], [c(0.0, 0.0), c(0.0, 0.0), c(0.6, 0.2)]);
    let h = heat_evolve(&e, 0.3, 1.0).unwrap();
    let factor = (-5.0f64 * 0.3).exp();
    assert!((h.coefficient([1, 2, 0])[2] - c(0.6, 0.2) * factor).norm() < 1e-16);

    for s in [-0.5, 0.0, 1.0, 2.0] {
        let mut last = f64::INFINITY;
        for t in [0.0, 0.01, 0.1, 0.5, 2.0] {
            let n = heat_evolve(&u, t, 0.7).unwrap().hs_norm(s);
            assert!(n < last);
            last = n;
        }
    }
    assert!(heat_evolve(&u, -1.0, 1.0).is_err());
    assert!(heat_evolve(&u, 1.0, 0.0).is_err());
}

#[test]
fn zero_datum_stays_zero() {
    let u0 = SpectralField::zeros(TWO_PI, 4).unwrap();
    let traj = integrate(&u0, &Forcing::Zero, &config(4, 0.05, 0.5), &spec(0.5)).unwrap();
    assert!(traj.is_completed());
    assert_eq!(traj.samples.len(), 6);
    for s in &traj.samples {
        assert_eq!((s.x, s.y, s.u, s.h), (0.0, 0.0, 0.0, 0.0));
    }
    assert_eq!(traj.final_state.hs_norm(0.0), 0.0);
}

#[test]
fn forced_run_from_rest_completes() {
    let u0 = SpectralField::zeros(TWO_PI, 3).unwrap();
    let f = Forcing::Constant(single_mode(TWO_PI, 3, [0, 0, 1], [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]));
    let traj = integrate(&u0, &f, &config(3, 0.05, 0.5), &spec(0.75)).unwrap();
    assert!(traj.is_completed());
    assert!(traj.final_state.hs_norm(0.0) > 0.1);
    assert!(traj.samples.iter().all(|s| s.h > 0.0));
}

#[test]
fn linear_run_matches_heat_flow() {
    let mut r = rng(31);
    let u0 = random_solenoidal(&mut r, TWO_PI, 5);
    let mut cfg = config(5, 0.1, 1.0);
    cfg.linear_only = true;
    let traj = integrate(&u0, &Forcing::Zero, &cfg, &spec(0.5)).unwrap();
    let exact = heat_evolve(&u0, 1.0, 1.0).unwrap();
    let err = traj.final_state.try_sub(&exact).unwrap().hs_norm(0.0);
    assert!(err <= 1e-12 * exact.hs_norm(0.0));
}

#[test]
fn samples_land_on_the_cadence() {
    let mut r = rng(32);
    let u0 = random_solenoidal(&mut r, TWO_PI, 3).scaled(0.1);
    let mut cfg = config(3, 0.03, 0.45);
    cfg.store_snapshots = true;
    let traj = integrate(&u0, &Forcing::Zero, &cfg, &spec(0.75)).unwrap();
    let times = traj.times();
    let expected = [0.0, 0.1, 0.2, 0.3, 0.4, 0.45];
    assert_eq!(times.len(), expected.len());
    for (t, e) in times.iter().zip(expected) {
        assert!((t - e).abs() < 1e-12);
    }
    assert_eq!(traj.snapshots.len(), times.len());
    assert!(times.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn nonlinear_run_keeps_invariants() {
    let mut r = rng(33);
    let u0 = random_solenoidal(&mut r, TWO_PI, 4);
    let mut cfg = config(4, 0.02, 0.4);
    cfg.store_snapshots = true;
    let f = Forcing::Modes {
        side: TWO_PI,
        modes: vec![ForcedMode {
            k: [1, 1, 0],
            coefficients: vec![[c(0.3, 0.0), c(-0.3, 0.0), c(0.1, 0.0)], [c(0.0, 0.5), c(0.0, -0.5), c(0.0, 0.0)]],
        }],
    };
    let traj = integrate(&u0, &f, &cfg, &spec(0.75)).unwrap();
    assert!(traj.is_completed());
    for (_, u) in &traj.snapshots {
        assert!(u.max_divergence() <= 1e-12 * u.hs_norm(0.0));
    }
    for s in &traj.samples {
        assert!(s.x >= 0.0 && s.y >= 0.0 && s.u >= 0.0 && s.h >= 0.0);
        assert!(s.energy_residual.unwrap().abs() < 1e-12);
    }
}

#[test]
fn adaptive_stepping_agrees_with_fixed_steps() {
    let mut r = rng(34);
    let u0 = random_solenoidal(&mut r, TWO_PI, 4);
    let fixed = integrate(&u0, &Forcing::Zero, &config(4, 0.005, 0.3), &spec(0.5)).unwrap();
    let mut cfg = config(4, 0.1, 0.3);
    cfg.adapt = Some(1e-9);
    let adaptive = integrate(&u0, &Forcing::Zero, &cfg, &spec(0.5)).unwrap();
    let err = adaptive.final_state.try_sub(&fixed.final_state).unwrap().hs_norm(0.0);
    assert!(err < 1e-7 * fixed.final_state.hs_norm(0.0));
}

#[test]
fn blowup_threshold_stops_the_run() {
    let f = Forcing::Constant(single_mode(TWO_PI, 2, [1, 0, 0], [c(0.0, 0.0), c(5.0, 0.0), c(0.0, 0.0)]));
    let u0 = single_mode(TWO_PI, 2, [1, 0, 0], [c(0.0, 0.0), c(0.01, 0.0), c(0.0, 0.0)]);
    let mut cfg = config(2, 0.01, 1.0);
    cfg.blowup_threshold = Some(1.0);
    let traj = integrate(&u0, &f, &cfg, &spec(0.5)).unwrap();
    match traj.status {
        RunStatus::NormExceeded { threshold, t } => {
            assert_eq!(threshold, 1.0);
            assert!(t > 0.0 && t < 1.0);
            assert_eq!(traj.horizon(), t);
        }
        other => panic!("unexpected status {other:?}"),
    }
}

#[test]
fn invalid_configs_are_rejected() {
    let u0 = SpectralField::zeros(TWO_PI, 2).unwrap();
    let bad = [
        SolverConfig { k0: 3, ..SolverConfig::new(2, 0.1, 1.0) },
        SolverConfig::new(2, 0.0, 1.0),
        SolverConfig::new(2, 0.1, -1.0),
        SolverConfig { oversample: 1, ..SolverConfig::new(2, 0.1, 1.0) },
    ];
    for cfg in bad {
        assert!(integrate(&u0, &Forcing::Zero, &cfg, &spec(0.5)).is_err());
    }
    let other_box = BoxSpec::new(1.0, 1.0, 0.5).unwrap();
    assert!(integrate(&u0, &Forcing::Zero, &SolverConfig::new(2, 0.1, 1.0), &other_box).is_err());
}

#[test]
fn difference_trajectory_examples() {
    let mut r = rng(35);
    let u0 = random_solenoidal(&mut r, TWO_PI, 3).scaled(0.2);
    let v0 = u0.try_add(&random_solenoidal(&mut r, TWO_PI, 3).scaled(0.01)).unwrap();
    let mut cfg = config(3, 0.05, 0.3);
    cfg.store_snapshots = true;
    let u = integrate(&u0, &Forcing::Zero, &cfg, &spec(0.75)).unwrap();
    let v = integrate(&v0, &Forcing::Zero, &cfg, &spec(0.75)).unwrap();

    let same = difference_trajectory(&u, &u).unwrap();
    assert_eq!(same.kind, TrajectoryKind::Difference);
    assert!(same.samples.iter().all(|s| s.x == 0.0 && s.y == 0.0 && s.h == 0.0));

    let d = difference_trajectory(&u, &v).unwrap();
    let x0 = 0.5 * u0.try_sub(&v0).unwrap().hs_norm_sq(0.75);
    assert!(rel(d.samples[0].x, x0) < 1e-13);
    for (a, b) in d.samples.iter().zip(&u.samples) {
        assert_eq!(a.u, b.u);
    }

    let no_snap = integrate(&u0, &Forcing::Zero, &config(3, 0.05, 0.3), &spec(0.75)).unwrap();
    assert!(difference_trajectory(&no_snap, &v).is_err());
}

#[test]
fn galerkin_residual_examples() {
    let e = single_mode(TWO_PI, 4, [1, 0, 0], [c(1.0, 0.0), c(0.5, 0.0), c(0.0, 0.0)]);
    assert!(galerkin_residual(&e, 2).unwrap().hs_norm(0.0) < 1e-14);

    let tail = galerkin_residual(&e.resized(1).unwrap(), 1).unwrap();
    let b = nonlinear_term(&e, &e, 2).unwrap();
    let v = tail.coefficient([2, 0, 0]);
    let w = b.coefficient([2, 0, 0]);
    assert!(w.iter().any(|z| z.norm() > 0.1));
    for i in 0..3 {
        assert!((v[i] - w[i]).norm() < 1e-14);
    }
    assert!(rel(tail.hs_norm_sq(0.0), 2.0 * w.iter().map(|z| z.norm_sqr()).sum::<f64>()) < 1e-13);

    let mut r = rng(36);
    let low = random_field(&mut r, TWO_PI, 2).resized(4).unwrap();
    assert!(galerkin_residual(&low, 4).unwrap().hs_norm(0.0) < 1e-14 * low.hs_norm(1.0).powi(2));
    assert!(galerkin_residual(&low, 1).is_err());
}

#[test]
fn trajectory_csv_has_documented_columns() {
    let u0 = single_mode(TWO_PI, 2, [1, 0, 0], [c(0.0, 0.0), c(0.1, 0.0), c(0.0, 0.0)]);
    let traj = integrate(&u0, &Forcing::Zero, &config(2, 0.05, 0.2), &spec(0.5)).unwrap();
    let mut buf = Vec::new();
    traj.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "t,X,Y,U,H,energy_residual,norm_alpha,norm_alpha_plus_1"
    );
    assert_eq!(text.lines().count(), traj.samples.len() + 1);
}
