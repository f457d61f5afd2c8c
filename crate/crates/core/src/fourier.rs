//! Fourier transform of the indicator of a body and its decay envelope.
//!
//! `χ̂(ξ) = ∫_D e^{−2πi⟨ξ,y⟩} dy`. Balls and ellipsoids use closed forms.
//! Other planar bodies go through the divergence theorem,
//!
//! ```text
//! χ̂(ξ) = −1/(2πi|ξ|²) ∮_{∂D} e^{−2πi⟨ξ,y⟩} ⟨ξ, n(y)⟩ ds(y),
//! ```
//!
//! with the boundary parametrized by angle as `y(φ) = u(φ)/gauge(u(φ))`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::bessel::j1;
use crate::error::{Error, Result};
use crate::geometry::{BodyKind, StarBody};
use crate::quadrature::adaptive_kronrod;
use crate::stats::{fit_line, Fit};

pub const BOUNDARY_REL_TOL: f64 = 1e-9;
pub const BOUNDARY_ABS_TOL: f64 = 1e-14;
const MAX_PANELS: usize = 2_000_000;
/// Largest phase change allowed across one initial panel.
const PANEL_PHASE: f64 = TAU;

pub fn chi_hat(body: &StarBody, xi: &[f64]) -> Result<Complex64> {
    if xi.len() != body.dim() {
        return Err(Error::Dimension {
            expected: body.dim(),
            got: xi.len(),
        });
    }
    if xi.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite(xi.to_vec()));
    }
    let r = norm(xi);
    if r == 0.0 {
        return Ok(Complex64::new(body.volume(), 0.0));
    }
    match body.kind() {
        BodyKind::Ball => Ok(Complex64::new(ball_transform(body.dim(), r), 0.0)),
        BodyKind::Ellipsoid { axes } => {
            let scaled: Vec<f64> = xi.iter().zip(axes).map(|(x, a)| x * a).collect();
            let det: f64 = axes.iter().product();
            Ok(Complex64::new(det * ball_transform(body.dim(), norm(&scaled)), 0.0))
        }
        _ if body.dim() == 2 => boundary_chi_hat(body, xi),
        _ => Err(Error::Unsupported(format!(
            "Fourier transform of {} in dimension 3",
            body.spec_string()
        ))),
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Transform of the unit ball at radius `r > 0`.
fn ball_transform(k: usize, r: f64) -> f64 {
    if r == 0.0 {
        return if k == 2 { PI } else { 4.0 * PI / 3.0 };
    }
    let z = TAU * r;
    if k == 2 {
        j1(z) / r
    } else {
        // J_{3/2}(2πr)/r^{3/2} = (sin z − z cos z)/(2π² r³)
        let num = if z < 0.1 {
            let z2 = z * z;
            z2 * z * (1.0 / 3.0 - z2 * (1.0 / 30.0 - z2 * (1.0 / 840.0 - z2 / 45360.0)))
        } else {
            z.sin() - z * z.cos()
        };
        num / (2.0 * PI * PI * r * r * r)
    }
}

/// Boundary-integral transform for any planar body, regardless of kind.
pub fn boundary_chi_hat(body: &StarBody, xi: &[f64]) -> Result<Complex64> {
    if body.dim() != 2 || xi.len() != 2 {
        return Err(Error::Unsupported(
            "boundary-integral transform is planar only".into(),
        ));
    }
    let r2 = xi[0] * xi[0] + xi[1] * xi[1];
    if r2 == 0.0 {
        return Ok(Complex64::new(body.volume(), 0.0));
    }
    let r = r2.sqrt();
    let boundary = |phi: f64| {
        let (s, c) = phi.sin_cos();
        let u = [c, s];
        let g = body.gauge(&u);
        let mut grad = [0.0; 2];
        body.gauge_gradient(&u, &mut grad);
        let rho = 1.0 / g;
        let drho = -(grad[1] * c - grad[0] * s) / (g * g);
        let y = [rho * c, rho * s];
        let dy = [drho * c - rho * s, drho * s + rho * c];
        (y, dy)
    };

    let max_speed = (0..512)
        .map(|i| {
            let (_, dy) = boundary(TAU * i as f64 / 512.0);
            dy[0].hypot(dy[1])
        })
        .fold(0.0, f64::max)
        * 1.05;
    // phase 2π⟨ξ, y(φ)⟩ moves at most 2π r·max|y'| per radian
    let panels = ((TAU * TAU * r * max_speed / PANEL_PHASE).ceil() as usize).max(8);
    let breaks: Vec<f64> = (0..=panels).map(|i| TAU * i as f64 / panels as f64).collect();

    let integrand = |phi: f64| {
        let (y, dy) = boundary(phi);
        let flux = xi[0] * dy[1] - xi[1] * dy[0];
        let phase = -TAU * (xi[0] * y[0] + xi[1] * y[1]);
        let (s, c) = phase.sin_cos();
        Complex64::new(flux * c, flux * s)
    };
    let scale = 1.0 / (TAU * r2);
    let (integral, err, converged) = adaptive_kronrod(
        &integrand,
        &breaks,
        BOUNDARY_REL_TOL,
        BOUNDARY_ABS_TOL / scale,
        MAX_PANELS,
        Complex64::new(0.0, 0.0),
    );
    if !converged {
        return Err(Error::Quadrature {
            what: "boundary transform",
            achieved: err * scale,
            wanted: (BOUNDARY_REL_TOL * integral.norm() * scale).max(BOUNDARY_ABS_TOL),
        });
    }
    // −1/(2πi|ξ|²) = i/(2π|ξ|²)
    Ok(Complex64::new(0.0, scale) * integral)
}

/// One evaluation `|χ̂(rφ)|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecaySample {
    /// Index into the envelope's direction grid.
    pub direction: usize,
    pub r: f64,
    pub magnitude: f64,
}

/// Per-direction decay envelope `ψ(φ) = max_r |χ̂(rφ)|·r^{(k+1)/2}`.
#[derive(Debug, Clone, Serialize)]
pub struct EnvelopeEstimate {
    pub dim: usize,
    /// Unit direction vectors.
    pub directions: Vec<Vec<f64>>,
    /// Planar angle (k = 2) or azimuth (k = 3) of each direction.
    pub angles: Vec<f64>,
    pub radii: Vec<f64>,
    pub psi: Vec<f64>,
    pub exponent: f64,
    pub samples: Vec<DecaySample>,
}

impl EnvelopeEstimate {
    pub fn r_range(&self) -> (f64, f64) {
        (self.radii[0], *self.radii.last().unwrap())
    }

    pub fn psi_max(&self) -> f64 {
        self.psi.iter().copied().fold(0.0, f64::max)
    }

    pub fn psi_min(&self) -> f64 {
        self.psi.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Least-squares slope of `log` of the upper envelope of `|χ̂(rφ)|`
    /// against `log r`, one per direction. For a ball this is `−(k+1)/2`.
    pub fn direction_exponents(&self) -> Vec<Option<Fit>> {
        let nr = self.radii.len();
        (0..self.directions.len())
            .map(|d| {
                let mags: Vec<f64> = (0..nr).map(|i| self.samples[d * nr + i].magnitude).collect();
                let mut env = vec![0.0; nr];
                let mut running = 0.0f64;
                for i in (0..nr).rev() {
                    running = running.max(mags[i]);
                    env[i] = running;
                }
                let pts: Vec<(f64, f64)> = self
                    .radii
                    .iter()
                    .zip(&env)
                    .filter(|(_, e)| **e > 0.0)
                    .map(|(r, e)| (r.ln(), e.ln()))
                    .collect();
                fit_line(&pts).ok()
            })
            .collect()
    }

    /// CSV with columns `phi,r,magnitude,magnitude_times_r_pow`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("phi,r,magnitude,magnitude_times_r_pow\n");
        for s in &self.samples {
            out.push_str(&format!(
                "{},{},{},{}\n",
                self.angles[s.direction],
                s.r,
                s.magnitude,
                s.magnitude * s.r.powf(self.exponent)
            ));
        }
        out
    }
}

/// Uniform angle grid (k = 2) or Fibonacci sphere grid (k = 3).
fn direction_grid(k: usize, n: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    if k == 2 {
        (0..n)
            .map(|j| {
                let phi = TAU * j as f64 / n as f64;
                (vec![phi.cos(), phi.sin()], phi)
            })
            .unzip()
    } else {
        let golden = PI * (3.0 - 5f64.sqrt());
        (0..n)
            .map(|j| {
                let z = 1.0 - (2.0 * j as f64 + 1.0) / n as f64;
                let rho = (1.0 - z * z).sqrt();
                let phi = (golden * j as f64).rem_euclid(TAU);
                (vec![rho * phi.cos(), rho * phi.sin(), z], phi)
            })
            .unzip()
    }
}

pub fn geometric_grid(start: f64, end: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![start];
    }
    let ratio = (end / start).ln() / (n - 1) as f64;
    (0..n)
        .map(|i| {
            if i == n - 1 {
                end
            } else {
                start * (ratio * i as f64).exp()
            }
        })
        .collect()
}

pub fn decay_envelope(
    body: &StarBody,
    n_directions: usize,
    r_min: f64,
    r_max: f64,
    n_radii: usize,
) -> Result<EnvelopeEstimate> {
    if n_directions == 0 || n_radii == 0 {
        return Err(Error::InvalidArgument("envelope grid must be non-empty".into()));
    }
    if !(r_min >= 1.0) || !(r_max >= r_min) {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= r_min <= r_max, got [{r_min}, {r_max}]"
        )));
    }
    let k = body.dim();
    let exponent = (k as f64 + 1.0) / 2.0;
    let (directions, angles) = direction_grid(k, n_directions);
    let radii = geometric_grid(r_min, r_max, n_radii);
    let cells: Vec<(usize, usize)> = (0..n_directions)
        .flat_map(|d| (0..n_radii).map(move |i| (d, i)))
        .collect();
    let samples: Vec<DecaySample> = cells
        .par_iter()
        .map(|&(d, i)| {
            let xi: Vec<f64> = directions[d].iter().map(|u| u * radii[i]).collect();
            chi_hat(body, &xi).map(|v| DecaySample {
                direction: d,
                r: radii[i],
                magnitude: v.norm(),
            })
        })
        .collect::<Result<_>>()?;
    let psi = (0..n_directions)
        .map(|d| {
            samples[d * n_radii..(d + 1) * n_radii]
                .iter()
                .map(|s| s.magnitude * s.r.powf(exponent))
                .fold(0.0, f64::max)
        })
        .collect();
    Ok(EnvelopeEstimate {
        dim: k,
        directions,
        angles,
        radii,
        psi,
        exponent,
        samples,
    })
}

/// Normalized discrete `L^p` norm `(mean ψ^p)^{1/p}`, in log space.
pub fn lp_norm(values: &[f64], p: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("empty direction grid".into()));
    }
    if !(p > 0.0) {
        return Err(Error::InvalidArgument(format!("p must be > 0, got {p}")));
    }
    let logs: Vec<f64> = values.iter().filter(|v| **v > 0.0).map(|v| p * v.ln()).collect();
    if logs.is_empty() {
        return Ok(0.0);
    }
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = logs.iter().map(|l| (l - top).exp()).sum();
    Ok(((top + sum.ln() - (values.len() as f64).ln()) / p).exp())
}

pub fn lp_report(estimate: &EnvelopeEstimate, p_list: &[f64]) -> Result<Vec<(f64, f64)>> {
    p_list
        .iter()
        .map(|&p| lp_norm(&estimate.psi, p).map(|n| (p, n)))
        .collect()
}
