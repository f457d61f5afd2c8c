//! Poisson-summation and Parseval checks on the torus.
//!
//! For fixed `(T, θ)` the count `N(T, θ, ·)` is a function on the torus
//! whose nonzero Fourier coefficients are `T^k χ̂(−Tθ⁻¹n)`. Its mean square
//! (minus the volume term) therefore equals `T^{2k} Σ' |χ̂(Tθ⁻¹n)|²`; this
//! module computes both sides independently.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::counting::{count_points, DEFAULT_CANDIDATE_CAP};
use crate::error::{Error, Result};
use crate::fourier::{chi_hat, decay_envelope, EnvelopeEstimate};
use crate::geometry::{RigidMotion, Rotation, StarBody};
use crate::rng::substream;
use crate::stats::mean_and_std_error;

/// Nonzero integer frequencies with `|n| ≤ n_max`, enumerated over the
/// max-norm cube and filtered by Euclidean norm.
pub fn frequency_shell(k: usize, n_max: u32) -> Vec<Vec<i64>> {
    let n = n_max as i64;
    let r2 = n * n;
    let mut out = Vec::new();
    if k == 2 {
        for a in -n..=n {
            for b in -n..=n {
                let q = a * a + b * b;
                if q > 0 && q <= r2 {
                    out.push(vec![a, b]);
                }
            }
        }
    } else {
        for a in -n..=n {
            for b in -n..=n {
                for c in -n..=n {
                    let q = a * a + b * b + c * c;
                    if q > 0 && q <= r2 {
                        out.push(vec![a, b, c]);
                    }
                }
            }
        }
    }
    out
}

fn is_positive_half(n: &[i64]) -> bool {
    n.iter().find(|&&v| v != 0).is_some_and(|&v| v > 0)
}

fn check_inputs(body: &StarBody, rotation: &Rotation, t: f64, n_max: u32) -> Result<()> {
    if body.dim() != rotation.dim() {
        return Err(Error::Dimension {
            expected: body.dim(),
            got: rotation.dim(),
        });
    }
    if !(t >= 1.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("T must be >= 1, got {t}")));
    }
    if n_max < 1 {
        return Err(Error::InvalidArgument("n_max must be >= 1".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralRemainder {
    pub value: Complex64,
    pub terms: usize,
}

/// `T^k Σ_{0<|n|≤n_max} χ̂(−Tθ⁻¹n) e^{2πi⟨n,x⟩}`.
///
/// For centrally symmetric bodies `χ̂(−ξ) = χ̂(ξ)`. The series converges to
/// `R(T, θ, ·)` in `L²` of the torus, so the pointwise value is descriptive.
pub fn truncated_spectral_remainder(
    body: &StarBody,
    motion: &RigidMotion,
    t: f64,
    n_max: u32,
) -> Result<SpectralRemainder> {
    check_inputs(body, motion.rotation(), t, n_max)?;
    let freqs = frequency_shell(body.dim(), n_max);
    let x = motion.translation();
    let terms: Vec<Complex64> = freqs
        .par_iter()
        .map(|n| {
            let nf: Vec<f64> = n.iter().map(|&v| v as f64).collect();
            let xi: Vec<f64> = motion
                .rotation()
                .apply_inverse(&nf)
                .iter()
                .map(|v| t * v)
                .collect();
            let c = chi_hat(body, &xi)?.conj();
            let phase = TAU * nf.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
            Ok(c * Complex64::from_polar(1.0, phase))
        })
        .collect::<Result<_>>()?;
    let sum: Complex64 = terms.iter().sum();
    Ok(SpectralRemainder {
        value: sum * t.powi(body.dim() as i32),
        terms: freqs.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanSquareEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub n_samples: usize,
}

/// Monte Carlo estimate of `∫_{T^k} |R(T, θ, x)|² dx` from exact counts at
/// uniformly drawn translations; draw `i` uses substream `(seed, stream, i)`.
pub fn torus_mean_square_exact(
    body: &StarBody,
    rotation: &Rotation,
    t: f64,
    n_samples: usize,
    seed: u64,
    stream: u64,
) -> Result<MeanSquareEstimate> {
    if body.dim() != rotation.dim() {
        return Err(Error::Dimension {
            expected: body.dim(),
            got: rotation.dim(),
        });
    }
    if n_samples < 100 {
        return Err(Error::InvalidArgument(format!(
            "need at least 100 samples, got {n_samples}"
        )));
    }
    let k = body.dim();
    let vol_t = body.volume() * t.powi(k as i32);
    let squares: Vec<f64> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, stream, i as u64);
            let x: Vec<f64> = (0..k).map(|_| rng.random::<f64>()).collect();
            let motion = RigidMotion::new(*rotation, &x)?;
            let n = count_points(body, &motion, t, DEFAULT_CANDIDATE_CAP)?;
            let r = n as f64 - vol_t;
            Ok(r * r)
        })
        .collect::<Result<_>>()?;
    let (estimate, std_error) = mean_and_std_error(&squares);
    Ok(MeanSquareEstimate {
        estimate,
        std_error,
        n_samples,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralMeanSquare {
    pub sum: f64,
    pub tail_bound: f64,
    pub psi_max: f64,
    pub terms: usize,
}

/// `Σ_{|n| > N} |n|^{−(k+1)} ≤ (1 + √k/(2N))^{k+1} · |S^{k−1}| / (N − √k/2)`,
/// by comparing each term with the integral over its unit cube.
pub fn lattice_tail_bound(k: usize, n_max: u32) -> f64 {
    let kf = k as f64;
    let n = n_max as f64;
    let half_diag = kf.sqrt() / 2.0;
    let sphere = if k == 2 { TAU } else { 4.0 * PI };
    (1.0 + half_diag / n).powi(k as i32 + 1) * sphere / (n - half_diag)
}

/// `T^{2k} Σ_{0<|n|≤n_max} |χ̂(Tθ⁻¹n)|²` plus a tail bound
/// `T^{k−1} ψ_max² Σ_{|n|>n_max} |n|^{−(k+1)}` from a measured envelope.
pub fn spectral_mean_square(
    body: &StarBody,
    rotation: &Rotation,
    t: f64,
    n_max: u32,
    envelope: &EnvelopeEstimate,
) -> Result<SpectralMeanSquare> {
    check_inputs(body, rotation, t, n_max)?;
    let k = body.dim();
    // |χ̂(−ξ)| = |χ̂(ξ)|: sum one half-space and double
    let half: Vec<Vec<i64>> = frequency_shell(k, n_max)
        .into_iter()
        .filter(|n| is_positive_half(n))
        .collect();
    let squares: Vec<f64> = half
        .par_iter()
        .map(|n| {
            let nf: Vec<f64> = n.iter().map(|&v| v as f64).collect();
            let xi: Vec<f64> = rotation.apply_inverse(&nf).iter().map(|v| t * v).collect();
            chi_hat(body, &xi).map(|c| c.norm_sqr())
        })
        .collect::<Result<_>>()?;
    let sum = 2.0 * squares.iter().sum::<f64>() * t.powi(2 * k as i32);
    let psi_max = envelope.psi_max();
    let tail_bound = t.powi(k as i32 - 1) * psi_max * psi_max * lattice_tail_bound(k, n_max);
    Ok(SpectralMeanSquare {
        sum,
        tail_bound,
        psi_max,
        terms: 2 * half.len(),
    })
}

/// Envelope grid used by [`parseval_check`] for its tail bound: 32
/// directions and 12 radii spanning `[T·n_max, 4·T·n_max]`.
pub const PARSEVAL_ENVELOPE: (usize, usize) = (32, 12);

/// Both sides of the torus Parseval identity for one `(body, θ, T)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParsevalCheck {
    pub t: f64,
    pub n_max: u32,
    pub monte_carlo: MeanSquareEstimate,
    pub spectral: SpectralMeanSquare,
    pub discrepancy: f64,
    /// `4·std_error + tail_bound`.
    pub allowance: f64,
    pub pass: bool,
}

impl ParsevalCheck {
    /// Rows with columns `T,method,value,error_bound,n_max,seed`.
    pub fn csv_rows(&self, seed: u64) -> String {
        format!(
            "{},monte_carlo,{},{},{},{}\n{},spectral_sum,{},{},{},{}\n",
            self.t,
            self.monte_carlo.estimate,
            self.monte_carlo.std_error,
            self.n_max,
            seed,
            self.t,
            self.spectral.sum,
            self.spectral.tail_bound,
            self.n_max,
            seed
        )
    }
}

pub const PARSEVAL_CSV_HEADER: &str = "T,method,value,error_bound,n_max,seed\n";

pub fn parseval_check(
    body: &StarBody,
    rotation: &Rotation,
    t: f64,
    n_max: u32,
    n_samples: usize,
    seed: u64,
    stream: u64,
) -> Result<ParsevalCheck> {
    check_inputs(body, rotation, t, n_max)?;
    let r0 = t * n_max as f64;
    let (dirs, radii) = PARSEVAL_ENVELOPE;
    let envelope = decay_envelope(body, dirs, r0, 4.0 * r0, radii)?;
    let spectral = spectral_mean_square(body, rotation, t, n_max, &envelope)?;
    let monte_carlo = torus_mean_square_exact(body, rotation, t, n_samples, seed, stream)?;
    let discrepancy = (monte_carlo.estimate - spectral.sum).abs();
    let allowance = 4.0 * monte_carlo.std_error + spectral.tail_bound;
    Ok(ParsevalCheck {
        t,
        n_max,
        monte_carlo,
        spectral,
        discrepancy,
        allowance,
        pass: discrepancy <= allowance,
    })
}
