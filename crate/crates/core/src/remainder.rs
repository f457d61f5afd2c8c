//! The remainder `R(t) = N(t) − V·t^k` and its exact integrals.
//!
//! Between consecutive entry radii `N` is constant, so `R` is a polynomial
//! in `t` on each piece. Integrals of `|R|`, `R²` and of `|R(s^{1/h})|` are
//! evaluated piece by piece in closed form and accumulated with compensated
//! summation over fixed index chunks, which keeps results independent of the
//! worker count.

use rayon::prelude::*;

use crate::counting::EntrySpectrum;
use crate::error::{Error, Result};
use crate::geometry::StarBody;
use crate::quadrature::gl4;

/// Chunk size (in entry radii) for the parallel reduction. Fixed so that
/// results do not depend on the thread pool.
const CHUNK: usize = 1 << 16;

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: KahanSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// `∫_a^b u^q du` for `0 < a ≤ b`, free of cancellation when `b ≈ a`.
fn power_integral(a: f64, b: f64, q: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    if q.fract() == 0.0 && q <= 8.0 {
        // (b^{q+1} − a^{q+1})/(q+1) = (b − a)·Σ_j a^j b^{q−j}/(q+1)
        let n = q as i32;
        let mut s = 0.0;
        for j in 0..=n {
            s += a.powi(j) * b.powi(n - j);
        }
        return (b - a) * s / (q + 1.0);
    }
    let e = q + 1.0;
    a.powf(e) * (e * ((b - a) / a).ln_1p()).exp_m1() / e
}

#[derive(Clone, Copy)]
enum Integrand {
    Abs,
    Square,
}

/// A piece `(a, b)` in the integration variable `u` on which
/// `R = count − V·u^q`.
#[inline]
fn piece_integral(kind: Integrand, a: f64, b: f64, count: f64, volume: f64, q: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let signed = |lo: f64, hi: f64| count * (hi - lo) - volume * power_integral(lo, hi, q);
    match kind {
        Integrand::Abs => {
            let root = if count > 0.0 {
                (count / volume).powf(1.0 / q)
            } else {
                0.0
            };
            if a < root && root < b {
                signed(a, root).abs() + signed(root, b).abs()
            } else {
                signed(a, b).abs()
            }
        }
        // degree 2q ≤ 6 is integrated exactly by the four-point rule
        Integrand::Square => gl4(
            |u| {
                let r = count - volume * u.powf(q);
                r * r
            },
            a,
            b,
        ),
    }
}

/// `R(t, θ, x)` for one motion, backed by its entry spectrum.
#[derive(Debug, Clone)]
pub struct RemainderProfile {
    spectrum: EntrySpectrum,
    volume: f64,
    dim: usize,
}

impl RemainderProfile {
    pub fn new(spectrum: EntrySpectrum, body: &StarBody) -> Result<Self> {
        if spectrum.dim() != body.dim() {
            return Err(Error::Dimension {
                expected: body.dim(),
                got: spectrum.dim(),
            });
        }
        Ok(RemainderProfile {
            volume: body.volume(),
            dim: body.dim(),
            spectrum,
        })
    }

    pub fn from_parts(spectrum: EntrySpectrum, volume: f64) -> Self {
        RemainderProfile {
            dim: spectrum.dim(),
            spectrum,
            volume,
        }
    }

    pub fn spectrum(&self) -> &EntrySpectrum {
        &self.spectrum
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn remainder_at(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::InvalidArgument(format!("t must be >= 0, got {t}")));
        }
        let n = self.spectrum.count_at(t)?;
        Ok(n as f64 - self.volume * t.powi(self.dim as i32))
    }

    fn check_upper(&self, t: f64) -> Result<()> {
        if !(t >= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "integration upper limit must be >= 1, got {t}"
            )));
        }
        if t > self.spectrum.t_max() {
            return Err(Error::Coverage {
                t,
                t_max: self.spectrum.t_max(),
            });
        }
        Ok(())
    }

    /// `∫_1^T |R(t)| dt`, exact up to rounding.
    pub fn abs_integral(&self, big_t: f64) -> Result<f64> {
        self.check_upper(big_t)?;
        Ok(self.integrate(big_t, 1, Integrand::Abs))
    }

    /// `∫_1^T R(t)² dt`.
    pub fn square_integral(&self, big_t: f64) -> Result<f64> {
        self.check_upper(big_t)?;
        Ok(self.integrate(big_t, 1, Integrand::Square))
    }

    /// `(1/T) ∫_1^T |R(t)| dt`.
    pub fn hardy_average(&self, big_t: f64) -> Result<f64> {
        Ok(self.abs_integral(big_t)? / big_t)
    }

    /// `∫_1^S |R(s^{1/h})| ds`, the remainder seen through dilation `s^{1/h}`.
    pub fn rescaled_abs_integral(&self, big_s: f64, h: u32) -> Result<f64> {
        if h < 2 || h % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "rescaling degree must be an even integer >= 2, got {h}"
            )));
        }
        if !(big_s >= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "integration upper limit must be >= 1, got {big_s}"
            )));
        }
        let t = big_s.powf(1.0 / h as f64);
        if t > self.spectrum.t_max() {
            return Err(Error::Coverage {
                t,
                t_max: self.spectrum.t_max(),
            });
        }
        Ok(self.integrate(big_s, h, Integrand::Abs))
    }

    /// `(1/S) ∫_1^S |R(s^{1/h})| ds`.
    pub fn rescaled_hardy_average(&self, big_s: f64, h: u32) -> Result<f64> {
        Ok(self.rescaled_abs_integral(big_s, h)? / big_s)
    }

    /// Integrates over `u ∈ [1, upper]` where the dilation is `t = u^{1/h}`
    /// (`h = 1` is the plain `t` variable).
    fn integrate(&self, upper: f64, h: u32, kind: Integrand) -> f64 {
        let radii = self.spectrum.radii();
        let q = self.dim as f64 / h as f64;
        let to_u = |t: f64| if h == 1 { t } else { t.powi(h as i32) };
        let t_hi = if h == 1 { upper } else { upper.powf(1.0 / h as f64) };
        let start = radii.partition_point(|&r| r <= 1.0);
        let end = radii.partition_point(|&r| r < t_hi).max(start);
        let volume = self.volume;

        let piece = |j: usize| {
            let a = if j == start { 1.0 } else { to_u(radii[j - 1]) };
            let b = to_u(radii[j]).min(upper);
            piece_integral(kind, a.min(b), b, j as f64, volume, q)
        };

        let first_chunk = start / CHUNK;
        let last_chunk = end.div_ceil(CHUNK).max(first_chunk + 1);
        let partials: Vec<KahanSum> = (first_chunk..last_chunk)
            .into_par_iter()
            .map(|c| {
                let lo = (c * CHUNK).max(start);
                let hi = ((c + 1) * CHUNK).min(end);
                let mut acc = KahanSum::default();
                for j in lo..hi {
                    acc.add(piece(j));
                }
                acc
            })
            .collect();
        let mut total = KahanSum::default();
        for p in partials {
            total.merge(p);
        }
        let a = if end == start { 1.0 } else { to_u(radii[end - 1]).min(upper) };
        total.add(piece_integral(kind, a, upper, end as f64, volume, q));
        total.value()
    }

    /// `sup_{1 ≤ t ≤ T} |R(t)|` for each `T` of an ascending grid.
    ///
    /// `R` decreases between jumps, so on every piece the supremum of `|R|`
    /// is attained at (or approached at) one of the two piece ends.
    pub fn running_max_abs(&self, grid: &[f64]) -> Result<Vec<f64>> {
        if grid.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidArgument("grid must be ascending".into()));
        }
        if let Some(&last) = grid.last() {
            self.check_upper(last)?;
        }
        if let Some(&first) = grid.first() {
            self.check_upper(first)?;
        }
        let radii = self.spectrum.radii();
        let k = self.dim as i32;
        let v = self.volume;
        let r_at = |n: usize, t: f64| n as f64 - v * t.powi(k);

        let mut out = Vec::with_capacity(grid.len());
        let mut j = radii.partition_point(|&r| r <= 1.0);
        let mut a = 1.0;
        let mut best = r_at(j, 1.0).abs();
        for &big_t in grid {
            // walk pieces (a, radii[j]) that end at or before big_t
            while j < radii.len() && radii[j] <= big_t {
                let b = radii[j];
                best = best.max(r_at(j, a).abs()).max(r_at(j, b).abs());
                // jump: all radii equal to b enter together
                let mut jn = j + 1;
                while jn < radii.len() && radii[jn] == b {
                    jn += 1;
                }
                j = jn;
                a = b;
                best = best.max(r_at(j, a).abs());
            }
            best = best.max(r_at(j, a).abs()).max(r_at(j, big_t).abs());
            out.push(best);
        }
        Ok(out)
    }
}
