//! Star bodies given by their Minkowski gauge, and rigid motions of the torus.

use std::f64::consts::{PI, TAU};
use std::fmt;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;
use crate::rng::{self, streams};

/// Sphere-grid size used for positivity checks and circumradius search (k = 2).
pub const SPHERE_GRID: usize = 10_000;

const CIRCUMRADIUS_SAFETY: f64 = 1.0 + 1e-9;
const VOLUME_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BodyKind {
    Ball,
    /// Axis-aligned ellipsoid with semi-axes `axes`.
    Ellipsoid { axes: Vec<f64> },
    /// `Σ|y_i|^p ≤ 1` with even `p ≥ 2`.
    PNormBall { p: u32 },
    /// `P(x, y) ≤ 1` for a homogeneous polynomial of even degree; `coeffs[i]`
    /// multiplies `x^(degree − i) · y^i`.
    PolynomialSublevel { degree: u32, coeffs: Vec<f64> },
}

/// A compact body, star-shaped about the origin, in dimension 2 or 3.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarBody {
    kind: BodyKind,
    dim: usize,
    volume: f64,
    circumradius: f64,
    farthest: Vec<f64>,
    lemma_class: bool,
}

fn check_dim(k: usize) -> Result<()> {
    if k == 2 || k == 3 {
        Ok(())
    } else {
        Err(Error::InvalidBody(format!("dimension must be 2 or 3, got {k}")))
    }
}

impl StarBody {
    pub fn ball(k: usize) -> Result<Self> {
        check_dim(k)?;
        let volume = if k == 2 { PI } else { 4.0 * PI / 3.0 };
        let mut farthest = vec![0.0; k];
        farthest[0] = 1.0;
        Ok(StarBody {
            kind: BodyKind::Ball,
            dim: k,
            volume,
            circumradius: 1.0,
            farthest,
            lemma_class: true,
        })
    }

    pub fn ellipsoid(axes: &[f64]) -> Result<Self> {
        let k = axes.len();
        check_dim(k)?;
        if axes.iter().any(|a| !a.is_finite() || *a <= 0.0) {
            return Err(Error::InvalidBody(format!(
                "ellipsoid semi-axes must be positive and finite, got {axes:?}"
            )));
        }
        let ball = StarBody::ball(k)?;
        let volume = ball.volume * axes.iter().product::<f64>();
        let (imax, amax) = axes
            .iter()
            .enumerate()
            .fold((0, 0.0), |acc, (i, &a)| if a > acc.1 { (i, a) } else { acc });
        let mut farthest = vec![0.0; k];
        farthest[imax] = 1.0;
        Ok(StarBody {
            kind: BodyKind::Ellipsoid {
                axes: axes.to_vec(),
            },
            dim: k,
            volume,
            circumradius: amax,
            farthest,
            lemma_class: true,
        })
    }

    pub fn pnorm_ball(p: u32, k: usize) -> Result<Self> {
        check_dim(k)?;
        if p < 2 || p % 2 != 0 {
            return Err(Error::InvalidBody(format!(
                "p-norm exponent must be an even integer >= 2, got {p}"
            )));
        }
        let pf = p as f64;
        let kf = k as f64;
        let volume = (2.0 * libm::tgamma(1.0 + 1.0 / pf)).powi(k as i32) / libm::tgamma(1.0 + kf / pf);
        // max |y|_2 on the unit p-sphere is attained on the diagonal
        let circumradius = kf.powf(0.5 - 1.0 / pf);
        let farthest = vec![1.0 / kf.sqrt(); k];
        Ok(StarBody {
            kind: BodyKind::PNormBall { p },
            dim: k,
            volume,
            circumradius,
            farthest,
            lemma_class: true,
        })
    }

    /// Sublevel set `{P ≤ 1}` of a planar homogeneous polynomial.
    ///
    /// Positivity is checked on a grid of [`SPHERE_GRID`] directions. Bodies
    /// that are not convex are accepted but flagged as outside the class
    /// covered by the decay estimate.
    pub fn polynomial(degree: u32, coeffs: &[f64]) -> Result<Self> {
        if degree < 2 || degree % 2 != 0 {
            return Err(Error::InvalidBody(format!(
                "polynomial degree must be even and >= 2, got {degree}"
            )));
        }
        if coeffs.len() != degree as usize + 1 {
            return Err(Error::InvalidBody(format!(
                "degree {degree} polynomial needs {} coefficients, got {}",
                degree + 1,
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidBody("non-finite polynomial coefficient".into()));
        }
        for i in 0..SPHERE_GRID {
            let phi = TAU * i as f64 / SPHERE_GRID as f64;
            let v = eval_poly(degree, coeffs, phi.cos(), phi.sin());
            if !(v > 0.0) {
                return Err(Error::InvalidBody(format!(
                    "polynomial must be positive away from the origin; P = {v:e} at angle {phi:.6}"
                )));
            }
        }
        let mut body = StarBody {
            kind: BodyKind::PolynomialSublevel {
                degree,
                coeffs: coeffs.to_vec(),
            },
            dim: 2,
            volume: 0.0,
            circumradius: 0.0,
            farthest: vec![1.0, 0.0],
            lemma_class: true,
        };
        body.volume = polar_volume(&body)?;
        let (r, phi) = search_circumradius(&body);
        body.circumradius = r * CIRCUMRADIUS_SAFETY;
        body.farthest = vec![phi.cos(), phi.sin()];
        body.lemma_class = boundary_is_convex(&body);
        Ok(body)
    }

    pub fn kind(&self) -> &BodyKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// Upper bound on `|y|` over the body, tight to 1e-9 relative.
    pub fn circumradius(&self) -> f64 {
        self.circumradius
    }

    /// Unit direction in which the circumradius is attained.
    pub fn farthest_direction(&self) -> &[f64] {
        &self.farthest
    }

    /// False when the body falls outside the hypotheses of the decay estimate
    /// (currently: non-convex polynomial sublevel sets).
    pub fn in_lemma_class(&self) -> bool {
        self.lemma_class
    }

    /// Minkowski gauge. Assumes `y` is finite with `y.len() == self.dim()`.
    #[inline]
    pub fn gauge(&self, y: &[f64]) -> f64 {
        match &self.kind {
            BodyKind::Ball => y.iter().map(|v| v * v).sum::<f64>().sqrt(),
            BodyKind::Ellipsoid { axes } => y
                .iter()
                .zip(axes)
                .map(|(v, a)| (v / a) * (v / a))
                .sum::<f64>()
                .sqrt(),
            BodyKind::PNormBall { p } => {
                let m = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                if m == 0.0 {
                    return 0.0;
                }
                let s: f64 = y.iter().map(|v| (v / m).powi(*p as i32)).sum();
                m * s.powf(1.0 / *p as f64)
            }
            BodyKind::PolynomialSublevel { degree, coeffs } => {
                let r = y[0].hypot(y[1]);
                if r == 0.0 {
                    return 0.0;
                }
                let v = eval_poly(*degree, coeffs, y[0] / r, y[1] / r);
                r * v.powf(1.0 / *degree as f64)
            }
        }
    }

    pub fn gauge_checked(&self, y: &[f64]) -> Result<f64> {
        if y.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: y.len(),
            });
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(y.to_vec()));
        }
        Ok(self.gauge(y))
    }

    /// Gradient of the gauge at `y ≠ 0`, written into `out`.
    pub fn gauge_gradient(&self, y: &[f64], out: &mut [f64]) {
        let g = self.gauge(y);
        match &self.kind {
            BodyKind::Ball => {
                for (o, v) in out.iter_mut().zip(y) {
                    *o = v / g;
                }
            }
            BodyKind::Ellipsoid { axes } => {
                for ((o, v), a) in out.iter_mut().zip(y).zip(axes) {
                    *o = v / (a * a * g);
                }
            }
            BodyKind::PNormBall { p } => {
                let p = *p as i32;
                for (o, v) in out.iter_mut().zip(y) {
                    *o = v.signum() * (v.abs() / g).powi(p - 1);
                }
            }
            BodyKind::PolynomialSublevel { degree, coeffs } => {
                let h = *degree as f64;
                let (px, py) = eval_poly_gradient(*degree, coeffs, y[0], y[1]);
                let pv = g.powf(h);
                let scale = g / (h * pv);
                out[0] = px * scale;
                out[1] = py * scale;
            }
        }
    }

    /// Canonical text form, the inverse of [`crate::bodyspec::parse_body_spec`].
    pub fn spec_string(&self) -> String {
        fn join(v: &[f64]) -> String {
            v.iter().map(|a| format!("{a}")).collect::<Vec<_>>().join(",")
        }
        match &self.kind {
            BodyKind::Ball => "ball".to_string(),
            BodyKind::Ellipsoid { axes } => format!("ellipsoid:{}", join(axes)),
            BodyKind::PNormBall { p } => format!("pball:{p}"),
            BodyKind::PolynomialSublevel { degree, coeffs } => {
                format!("poly:{degree}:{}", join(coeffs))
            }
        }
    }

    /// Stable identifier including the dimension, e.g. `ball/k2`.
    pub fn id(&self) -> String {
        format!("{}/k{}", self.spec_string(), self.dim)
    }
}

impl fmt::Display for StarBody {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec_string())
    }
}

fn eval_poly(degree: u32, coeffs: &[f64], x: f64, y: f64) -> f64 {
    let h = degree as i32;
    coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(i, c)| c * x.powi(h - i as i32) * y.powi(i as i32))
        .sum()
}

fn eval_poly_gradient(degree: u32, coeffs: &[f64], x: f64, y: f64) -> (f64, f64) {
    let h = degree as i32;
    let mut gx = 0.0;
    let mut gy = 0.0;
    for (i, c) in coeffs.iter().enumerate() {
        let i = i as i32;
        if *c == 0.0 {
            continue;
        }
        if h - i > 0 {
            gx += c * (h - i) as f64 * x.powi(h - i - 1) * y.powi(i);
        }
        if i > 0 {
            gy += c * i as f64 * x.powi(h - i) * y.powi(i - 1);
        }
    }
    (gx, gy)
}

/// `vol = (1/2)∫_0^{2π} gauge(u(φ))^{-2} dφ` by composite Gauss–Legendre,
/// doubling the panel count until successive estimates agree to 1e-12.
fn polar_volume(body: &StarBody) -> Result<f64> {
    let (nodes, weights) = gauss_legendre(10);
    let integrand = |phi: f64| {
        let g = body.gauge(&[phi.cos(), phi.sin()]);
        0.5 / (g * g)
    };
    let composite = |panels: usize| {
        let h = TAU / panels as f64;
        let mut s = 0.0;
        for j in 0..panels {
            let mid = (j as f64 + 0.5) * h;
            for (x, w) in nodes.iter().zip(&weights) {
                s += w * integrand(mid + 0.5 * h * x);
            }
        }
        0.5 * h * s
    };
    let mut panels = 8;
    let mut prev = composite(panels);
    let mut diff = f64::INFINITY;
    while panels < (1 << 16) {
        panels *= 2;
        let next = composite(panels);
        diff = (next - prev).abs();
        prev = next;
        if diff <= VOLUME_TOLERANCE {
            return Ok(next);
        }
    }
    Err(Error::Quadrature {
        what: "volume",
        achieved: diff,
        wanted: VOLUME_TOLERANCE,
    })
}

/// Maximize `1/gauge(u)` over the unit circle: grid scan, then golden section.
fn search_circumradius(body: &StarBody) -> (f64, f64) {
    let radial = |phi: f64| 1.0 / body.gauge(&[phi.cos(), phi.sin()]);
    let step = TAU / SPHERE_GRID as f64;
    let (mut best_phi, mut best) = (0.0, radial(0.0));
    for i in 1..SPHERE_GRID {
        let phi = step * i as f64;
        let r = radial(phi);
        if r > best {
            best = r;
            best_phi = phi;
        }
    }
    let inv_golden = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (best_phi - step, best_phi + step);
    let mut c = b - inv_golden * (b - a);
    let mut d = a + inv_golden * (b - a);
    let (mut fc, mut fd) = (radial(c), radial(d));
    for _ in 0..100 {
        if (b - a).abs() < 1e-15 {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_golden * (b - a);
            fc = radial(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_golden * (b - a);
            fd = radial(d);
        }
    }
    let phi = 0.5 * (a + b);
    let r = radial(phi);
    if r >= best {
        (r, phi)
    } else {
        (best, best_phi)
    }
}

/// Convexity of a planar body via turning direction of a fine boundary polygon.
fn boundary_is_convex(body: &StarBody) -> bool {
    const N: usize = 4096;
    let pts: Vec<[f64; 2]> = (0..N)
        .map(|i| {
            let phi = TAU * i as f64 / N as f64;
            let (c, s) = (phi.cos(), phi.sin());
            let g = body.gauge(&[c, s]);
            [c / g, s / g]
        })
        .collect();
    (0..N).all(|i| {
        let a = pts[i];
        let b = pts[(i + 1) % N];
        let c = pts[(i + 2) % N];
        let cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
        cross >= -1e-12
    })
}

/// An element of SO(2) or SO(3).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Rotation {
    /// Counterclockwise angle in [0, 2π).
    Planar { angle: f64 },
    /// Unit quaternion `(w, x, y, z)`.
    Spatial { quaternion: [f64; 4] },
}

impl Rotation {
    pub fn identity(k: usize) -> Self {
        if k == 2 {
            Rotation::Planar { angle: 0.0 }
        } else {
            Rotation::Spatial {
                quaternion: [1.0, 0.0, 0.0, 0.0],
            }
        }
    }

    pub fn planar(angle: f64) -> Self {
        let mut a = angle.rem_euclid(TAU);
        if a >= TAU {
            a = 0.0;
        }
        Rotation::Planar { angle: a }
    }

    pub fn from_quaternion(q: [f64; 4]) -> Result<Self> {
        let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !n.is_finite() || n == 0.0 {
            return Err(Error::InvalidArgument(format!("quaternion {q:?} cannot be normalized")));
        }
        Ok(Rotation::Spatial {
            quaternion: [q[0] / n, q[1] / n, q[2] / n, q[3] / n],
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            Rotation::Planar { .. } => 2,
            Rotation::Spatial { .. } => 3,
        }
    }

    /// Rotation matrix; for k = 2 only the upper-left 2×2 block is used.
    pub fn matrix(&self) -> [[f64; 3]; 3] {
        match *self {
            Rotation::Planar { angle } => {
                let (s, c) = angle.sin_cos();
                [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]
            }
            Rotation::Spatial {
                quaternion: [w, x, y, z],
            } => [
                [
                    1.0 - 2.0 * (y * y + z * z),
                    2.0 * (x * y - w * z),
                    2.0 * (x * z + w * y),
                ],
                [
                    2.0 * (x * y + w * z),
                    1.0 - 2.0 * (x * x + z * z),
                    2.0 * (y * z - w * x),
                ],
                [
                    2.0 * (x * z - w * y),
                    2.0 * (y * z + w * x),
                    1.0 - 2.0 * (x * x + y * y),
                ],
            ],
        }
    }

    /// Applies θ⁻¹ = θᵀ to `v`.
    pub fn apply_inverse(&self, v: &[f64]) -> Vec<f64> {
        let m = self.matrix();
        let k = self.dim();
        (0..k).map(|j| (0..k).map(|i| m[i][j] * v[i]).sum()).collect()
    }
}

/// A point `(θ, x)` of the Euclidean group modulo integral translations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RigidMotion {
    rotation: Rotation,
    translation: Vec<f64>,
    #[serde(skip)]
    inverse: [[f64; 3]; 3],
}

fn reduce_mod_one(v: f64) -> f64 {
    let r = v.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

impl RigidMotion {
    pub fn new(rotation: Rotation, translation: &[f64]) -> Result<Self> {
        if translation.len() != rotation.dim() {
            return Err(Error::Dimension {
                expected: rotation.dim(),
                got: translation.len(),
            });
        }
        if translation.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(translation.to_vec()));
        }
        let m = rotation.matrix();
        let mut inverse = [[0.0; 3]; 3];
        for (i, row) in inverse.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = m[j][i];
            }
        }
        Ok(RigidMotion {
            rotation,
            translation: translation.iter().map(|&v| reduce_mod_one(v)).collect(),
            inverse,
        })
    }

    pub fn identity(k: usize) -> Self {
        RigidMotion::new(Rotation::identity(k), &vec![0.0; k]).expect("identity motion")
    }

    pub fn dim(&self) -> usize {
        self.rotation.dim()
    }

    pub fn rotation(&self) -> &Rotation {
        &self.rotation
    }

    pub fn translation(&self) -> &[f64] {
        &self.translation
    }

    pub fn with_translation(&self, translation: &[f64]) -> Result<Self> {
        RigidMotion::new(self.rotation, translation)
    }

    /// θ⁻¹(m − x) for an integer vector `m`.
    pub fn inverse_apply(&self, m: &[i64]) -> Vec<f64> {
        let k = self.dim();
        let d: Vec<f64> = (0..k).map(|i| m[i] as f64 - self.translation[i]).collect();
        let mut out = vec![0.0; k];
        self.inverse_apply_offset(&d, &mut out);
        out
    }

    /// θ⁻¹ applied to an already translated offset `d = m − x`.
    #[inline]
    pub fn inverse_apply_offset(&self, d: &[f64], out: &mut [f64]) {
        let a = &self.inverse;
        if d.len() == 2 {
            out[0] = a[0][0] * d[0] + a[0][1] * d[1];
            out[1] = a[1][0] * d[0] + a[1][1] * d[1];
        } else {
            for (i, o) in out.iter_mut().enumerate().take(3) {
                *o = a[i][0] * d[0] + a[i][1] * d[1] + a[i][2] * d[2];
            }
        }
    }

    /// Bit patterns of all parameters, for hashing and exact comparison.
    pub fn to_bits(&self) -> Vec<u64> {
        let mut bits = match self.rotation {
            Rotation::Planar { angle } => vec![angle.to_bits()],
            Rotation::Spatial { quaternion } => quaternion.iter().map(|v| v.to_bits()).collect(),
        };
        bits.extend(self.translation.iter().map(|v| v.to_bits()));
        bits
    }
}

/// Haar-uniform rotation and uniform torus translation.
pub fn haar_sample<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Result<RigidMotion> {
    check_dim(k)?;
    let rotation = if k == 2 {
        Rotation::planar(TAU * rng.random::<f64>())
    } else {
        loop {
            let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
            if q.iter().map(|v| v * v).sum::<f64>() > 1e-300 {
                break Rotation::from_quaternion(q)?;
            }
        }
    };
    let translation: Vec<f64> = (0..k).map(|_| rng.random::<f64>()).collect();
    RigidMotion::new(rotation, &translation)
}

/// The `index`-th motion of the counter-based motion stream for `seed`.
pub fn haar_motion(k: usize, seed: u64, index: u64) -> Result<RigidMotion> {
    haar_sample(k, &mut rng::substream(seed, streams::MOTIONS, index))
}
