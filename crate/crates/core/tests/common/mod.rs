#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use lrl_core::{BodyKind, RemainderProfile, RigidMotion, Rotation, StarBody};

pub fn sample_bodies() -> Vec<StarBody> {
    vec![
        StarBody::ball(2).unwrap(),
        StarBody::ball(3).unwrap(),
        StarBody::ellipsoid(&[1.4, 0.6]).unwrap(),
        StarBody::ellipsoid(&[1.0, 0.5, 0.8]).unwrap(),
        StarBody::pnorm_ball(4, 2).unwrap(),
        StarBody::pnorm_ball(6, 3).unwrap(),
        StarBody::polynomial(4, &[1.0, 0.3, 1.0, 0.0, 2.0]).unwrap(),
        StarBody::polynomial(2, &[1.0, 0.5, 2.0]).unwrap(),
    ]
}

pub fn poly_value(coeffs: &[f64], x: f64, y: f64) -> f64 {
    let h = coeffs.len() - 1;
    coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| c * x.powi((h - i) as i32) * y.powi(i as i32))
        .sum()
}

fn quat_mul(a: [f64; 4], b: [f64; 4]) -> [f64; 4] {
    [
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
        a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
        a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
        a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
    ]
}

/// `θ⁻¹ v` computed from the rotation's parameters directly.
pub fn rotate_back(rotation: &Rotation, v: &[f64]) -> Vec<f64> {
    match *rotation {
        Rotation::Planar { angle } => {
            let (s, c) = angle.sin_cos();
            vec![c * v[0] + s * v[1], -s * v[0] + c * v[1]]
        }
        Rotation::Spatial { quaternion } => {
            let n = quaternion.iter().map(|q| q * q).sum::<f64>().sqrt();
            let q = quaternion.map(|v| v / n);
            let conj = [q[0], -q[1], -q[2], -q[3]];
            let r = quat_mul(quat_mul(conj, [0.0, v[0], v[1], v[2]]), q);
            vec![r[1], r[2], r[3]]
        }
    }
}

/// Membership `y ∈ t·D` by the body's defining inequality.
pub fn inside(body: &StarBody, y: &[f64], t: f64) -> bool {
    match body.kind() {
        BodyKind::Ball => y.iter().map(|v| v * v).sum::<f64>() <= t * t,
        BodyKind::Ellipsoid { axes } => y.iter().zip(axes).map(|(v, a)| (v / a).powi(2)).sum::<f64>() <= t * t,
        BodyKind::PNormBall { p } => y.iter().map(|v| v.powi(*p as i32)).sum::<f64>() <= t.powi(*p as i32),
        BodyKind::PolynomialSublevel { degree, coeffs } => poly_value(coeffs, y[0], y[1]) <= t.powi(*degree as i32),
    }
}

pub fn brute_force_count(body: &StarBody, motion: &RigidMotion, t: f64) -> u64 {
    let k = body.dim();
    let x = motion.translation();
    let reach = (t * body.circumradius()).ceil() as i64 + 1;
    let mut count = 0;
    let mut m = vec![0i64; k];
    let lo: Vec<i64> = x.iter().map(|v| v.floor() as i64 - reach).collect();
    let hi: Vec<i64> = x.iter().map(|v| v.ceil() as i64 + reach).collect();
    m.copy_from_slice(&lo);
    loop {
        let d: Vec<f64> = m.iter().zip(x).map(|(a, b)| *a as f64 - b).collect();
        if inside(body, &rotate_back(motion.rotation(), &d), t) {
            count += 1;
        }
        let mut i = 0;
        loop {
            if i == k {
                return count;
            }
            m[i] += 1;
            if m[i] <= hi[i] {
                break;
            }
            m[i] = lo[i];
            i += 1;
        }
    }
}

pub struct Riemann {
    pub abs: f64,
    pub square: f64,
    pub abs_bound: f64,
    pub square_bound: f64,
}

/// Midpoint sums of `|R|` and `R²` over `[1, T]`. On each cell the midpoint
/// rule errs by at most `h` times the variation there, so the totals are
/// within `h·TV` of the integrals; the variations are accumulated exactly
/// from the jumps and the monotone pieces between them.
pub fn riemann_integrals(profile: &RemainderProfile, body: &StarBody, t: f64, cells: usize) -> Riemann {
    let radii = profile.spectrum().radii();
    let v = body.volume();
    let k = body.dim() as i32;
    let h = (t - 1.0) / cells as f64;
    let rem = |n: usize, u: f64| n as f64 - v * u.powi(k);

    let mut idx = radii.partition_point(|r| *r <= 1.0);
    let (mut abs, mut square) = (0.0, 0.0);
    for i in 0..cells {
        let u = 1.0 + (i as f64 + 0.5) * h;
        while idx < radii.len() && radii[idx] <= u {
            idx += 1;
        }
        let r = rem(idx, u);
        abs += r.abs();
        square += r * r;
    }

    let (mut tv, mut tv_sq) = (0.0, 0.0);
    let mut n = radii.partition_point(|r| *r <= 1.0);
    let mut left = 1.0;
    loop {
        let right = if n < radii.len() && radii[n] <= t { radii[n] } else { t };
        let (a, b) = (rem(n, left), rem(n, right));
        tv += a - b;
        tv_sq += 2.0 * a.abs().max(b.abs()) * (a - b);
        if right >= t && !(n < radii.len() && radii[n] <= t) {
            break;
        }
        tv += 1.0;
        tv_sq += (2.0 * b + 1.0).abs();
        n += 1;
        left = right;
    }
    Riemann {
        abs: abs * h,
        square: square * h,
        abs_bound: h * tv + 1e-9 * abs * h,
        square_bound: h * tv_sq + 1e-9 * square * h,
    }
}

/// `J₁(z) = (1/2π)∫_0^{2π} cos(τ − z sin τ) dτ` by the trapezoid rule,
/// which converges geometrically for this periodic integrand.
pub fn j1_integral(z: f64) -> f64 {
    let n = 4096;
    (0..n)
        .map(|i| {
            let tau = TAU * i as f64 / n as f64;
            (tau - z * tau.sin()).cos()
        })
        .sum::<f64>()
        / n as f64
}

pub fn j0_integral(z: f64) -> f64 {
    let n = 1024;
    (0..n)
        .map(|i| (z * (TAU * i as f64 / n as f64).sin()).cos())
        .sum::<f64>()
        / n as f64
}

/// Composite Simpson rule on `n` (even) subintervals.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// `½∮ρ(φ)² dφ` by the trapezoid rule, for a radial function `ρ(cos, sin)`.
pub fn polar_area<F: Fn(f64, f64) -> f64>(rho: F) -> f64 {
    let n = 20_000;
    (0..n)
        .map(|i| {
            let (s, c) = (TAU * i as f64 / n as f64).sin_cos();
            rho(c, s).powi(2)
        })
        .sum::<f64>()
        * 0.5
        * TAU
        / n as f64
}

pub const UNIT_BALL_3: f64 = 4.0 * PI / 3.0;
