//! Bessel function of the first kind, order one.

use std::f64::consts::{FRAC_PI_4, PI};

/// Below this |z| the power series is used, above it the Hankel expansion.
pub const SERIES_SWITCH: f64 = 12.0;

/// `J₁(z)` for real `z`.
pub fn j1(z: f64) -> f64 {
    if z < 0.0 {
        return -j1(-z);
    }
    if z < SERIES_SWITCH {
        j1_series(z)
    } else {
        j1_asymptotic(z)
    }
}

/// `Σ_m (−1)^m (z/2)^{2m+1} / (m!(m+1)!)`, summed until terms stop mattering.
fn j1_series(z: f64) -> f64 {
    let half = 0.5 * z;
    let q = -half * half;
    let mut term = half;
    let mut sum = term;
    for m in 1..80 {
        let mf = m as f64;
        term *= q / (mf * (mf + 1.0));
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

/// Hankel expansion `√(2/(πz)) (P cos χ − Q sin χ)` with `χ = z − 3π/4`,
/// truncated at the smallest term.
fn j1_asymptotic(z: f64) -> f64 {
    const MU: f64 = 4.0;
    let inv8z = 1.0 / (8.0 * z);
    let mut p = 1.0;
    let mut q = 0.0;
    // a_j / z^j with a_j = Π_{i=1..j} (μ − (2i−1)²) / (j! 8^j), signs folded in below
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for j in 1..60 {
        let odd = (2 * j - 1) as f64;
        term *= (MU - odd * odd) * inv8z / j as f64;
        let mag = term.abs();
        if mag >= last || mag < 1e-17 {
            break;
        }
        last = mag;
        // P takes even j with sign (−1)^{j/2}; Q takes odd j with sign (−1)^{(j−1)/2}
        match j % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
    }
    let chi = z - 3.0 * FRAC_PI_4;
    (2.0 / (PI * z)).sqrt() * (p * chi.cos() - q * chi.sin())
}
