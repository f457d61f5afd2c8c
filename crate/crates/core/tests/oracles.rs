//! Independent oracles: brute-force membership, Riemann sums, integral
//! representations and polar quadrature.

use std::f64::consts::{PI, TAU};

use lrl_core::bessel::j1;
use lrl_core::counting::entry_spectrum;
use lrl_core::fourier::boundary_chi_hat;
use lrl_core::geometry::haar_motion;
use lrl_core::rng::{streams, substream};
use lrl_core::spectral::{spectral_mean_square, torus_mean_square_exact};
use lrl_core::{chi_hat, decay_envelope, BodyKind, RemainderProfile, RigidMotion, Rotation, StarBody};
use rand::Rng;

mod common;
use common::*;

#[test]
fn counts_match_membership_in_every_body_kind() {
    let bodies = sample_bodies();
    let mut checked = 0;
    for (i, body) in bodies.iter().enumerate() {
        for j in 0..3u64 {
            let motion = haar_motion(body.dim(), 11, (i as u64) * 10 + j).unwrap();
            let mut rng = substream(11, streams::TEST_POINTS, (i as u64) * 10 + j);
            let t = if body.dim() == 2 { 2.0 + 18.0 * rng.random::<f64>() } else { 1.0 + 7.0 * rng.random::<f64>() };
            let s = entry_spectrum(body, &motion, t).unwrap();
            assert_eq!(s.count_at(t).unwrap(), brute_force_count(body, &motion, t), "{body} {motion:?} T={t}");
            checked += 1;
        }
    }
    assert!(checked >= 20);
}

#[test]
fn integrals_match_riemann_sums() {
    for (body, seed) in [
        (StarBody::ball(2).unwrap(), 1),
        (StarBody::pnorm_ball(4, 2).unwrap(), 2),
        (StarBody::ellipsoid(&[1.0, 0.5, 0.8]).unwrap(), 3),
    ] {
        let motion = haar_motion(body.dim(), seed, 0).unwrap();
        let t = if body.dim() == 2 { 40.0 } else { 9.0 };
        let profile = RemainderProfile::new(entry_spectrum(&body, &motion, t).unwrap(), &body).unwrap();
        let r = riemann_integrals(&profile, &body, t, 1_000_000);
        let abs = profile.abs_integral(t).unwrap();
        let sq = profile.square_integral(t).unwrap();
        assert!((abs - r.abs).abs() <= r.abs_bound, "{body}: {abs} vs {} ± {}", r.abs, r.abs_bound);
        assert!((sq - r.square).abs() <= r.square_bound, "{body}: {sq} vs {} ± {}", r.square, r.square_bound);
    }
}

#[test]
fn bessel_matches_integral_representation() {
    for i in 0..50 {
        let z = 0.25 + 1.5 * i as f64;
        let want = j1_integral(z);
        assert!((j1(z) - want).abs() <= 2e-12, "z={z}: {} vs {want}", j1(z));
    }
}

#[test]
fn ball_transforms_match_radial_quadrature() {
    let disk = StarBody::ball(2).unwrap();
    let ball = StarBody::ball(3).unwrap();
    for r in [0.3, 1.7, 4.2, 11.0] {
        // χ̂ of the unit disk: 2π ∫_0^1 J_0(2πrρ) ρ dρ, with J_0 from its
        // own integral representation
        let disk_want = simpson(|rho| TAU * j0_integral(TAU * r * rho) * rho, 0.0, 1.0, 20_000);
        let got = chi_hat(&disk, &[r, 0.0]).unwrap().re;
        assert!((got - disk_want).abs() < 1e-11, "disk r={r}: {got} vs {disk_want}");
        let ball_want = simpson(
            |rho| {
                let a = TAU * r * rho;
                if a == 0.0 {
                    0.0
                } else {
                    4.0 * PI * rho * rho * a.sin() / a
                }
            },
            0.0,
            1.0,
            20_000,
        );
        let got = chi_hat(&ball, &[0.0, r, 0.0]).unwrap().re;
        assert!((got - ball_want).abs() < 1e-11, "ball r={r}: {got} vs {ball_want}");
    }
}

#[test]
fn volumes_match_polar_trapezoid() {
    for p in [2u32, 4, 6, 8] {
        let body = StarBody::pnorm_ball(p, 2).unwrap();
        let want = polar_area(|c, s| (c.powi(p as i32) + s.powi(p as i32)).powf(-1.0 / p as f64));
        assert!((body.volume() - want).abs() < 1e-11, "p={p}: {} vs {want}", body.volume());
    }
    assert!((StarBody::pnorm_ball(4, 2).unwrap().volume() - 3.708_149_354_602_744).abs() < 1e-11);
    let coeffs = [1.0, 0.5, 2.0, -0.3, 1.5];
    let poly = StarBody::polynomial(4, &coeffs).unwrap();
    let want = polar_area(|c, s| poly_value(&coeffs, c, s).powf(-0.25));
    assert!((poly.volume() - want).abs() < 1e-10);
}

#[test]
fn polynomial_and_pnorm_gauges_agree() {
    let poly = lrl_core::parse_body_spec("poly:4:1,0,0,0,1", 2).unwrap();
    let pball = StarBody::pnorm_ball(4, 2).unwrap();
    let mut rng = substream(5, streams::TEST_POINTS, 0);
    for _ in 0..100 {
        let y = [20.0 * rng.random::<f64>() - 10.0, 20.0 * rng.random::<f64>() - 10.0];
        let (a, b) = (poly.gauge(&y), pball.gauge(&y));
        assert!((a - b).abs() <= 1e-12 * b.max(1.0), "{y:?}: {a} vs {b}");
    }
    assert!((poly.volume() - pball.volume()).abs() < 1e-11);
}

#[test]
fn ellipse_boundary_route_matches_closed_form() {
    let e = StarBody::ellipsoid(&[1.3, 0.4]).unwrap();
    let mut rng = substream(8, streams::TEST_POINTS, 0);
    for _ in 0..20 {
        let xi = [60.0 * rng.random::<f64>() - 30.0, 60.0 * rng.random::<f64>() - 30.0];
        let a = boundary_chi_hat(&e, &xi).unwrap();
        let b = chi_hat(&e, &xi).unwrap();
        assert!((a - b).norm() <= 1e-9 * b.norm().max(1e-6), "{xi:?}");
    }
}

#[test]
fn occupancy_mean_square_below_first_entry() {
    let disk = StarBody::ball(2).unwrap();
    let t: f64 = 0.4;
    let p = PI * t * t;
    let want = p * (1.0 - p).powi(2) + (1.0 - p) * p * p;
    let est = torus_mean_square_exact(&disk, &Rotation::planar(0.3), t, 20_000, 9, streams::TORUS_SAMPLES).unwrap();
    assert!((est.estimate - want).abs() <= 4.0 * est.std_error, "{est:?} vs {want}");
}

#[test]
fn disjoint_seeds_agree() {
    let e = StarBody::ellipsoid(&[1.0, 0.7]).unwrap();
    let rot = Rotation::planar(1.1);
    let a = torus_mean_square_exact(&e, &rot, 15.0, 2000, 1, streams::TORUS_SAMPLES).unwrap();
    let b = torus_mean_square_exact(&e, &rot, 15.0, 2000, 2, streams::TORUS_SAMPLES).unwrap();
    let combined = a.std_error.hypot(b.std_error);
    assert!((a.estimate - b.estimate).abs() <= 4.0 * combined);
}

#[test]
fn spectral_sum_is_rotation_invariant_for_the_ball() {
    let disk = StarBody::ball(2).unwrap();
    let env = decay_envelope(&disk, 8, 10.0, 20.0, 4).unwrap();
    let a = spectral_mean_square(&disk, &Rotation::planar(0.4), 10.0, 20, &env).unwrap();
    let b = spectral_mean_square(&disk, &Rotation::planar(2.9), 10.0, 20, &env).unwrap();
    assert!((a.sum - b.sum).abs() <= 1e-10 * a.sum);
}

#[test]
fn polynomial_bodies_count_like_their_inequality() {
    let coeffs = vec![2.0, 0.0, 1.0, 0.0, 3.0];
    let body = StarBody::polynomial(4, &coeffs).unwrap();
    assert!(matches!(body.kind(), BodyKind::PolynomialSublevel { .. }));
    let motion = RigidMotion::new(Rotation::planar(0.77), &[0.31, 0.62]).unwrap();
    let s = entry_spectrum(&body, &motion, 25.5).unwrap();
    assert_eq!(s.count_at(25.5).unwrap(), brute_force_count(&body, &motion, 25.5));
}
