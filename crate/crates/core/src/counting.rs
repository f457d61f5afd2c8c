//! Exact lattice-point counts through entry radii.
//!
//! A lattice point `m` lies in `tθ(D) + x` exactly when
//! `gauge(θ⁻¹(m − x)) ≤ t`, so one sorted list of these entry radii answers
//! `N(t)` for every `t` up to the enumeration cap.

use std::io::{Read, Write};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{RigidMotion, StarBody};

pub const DEFAULT_CANDIDATE_CAP: u64 = 200_000_000;

/// Relative inflation of the enumeration radius; membership itself is
/// decided by the gauge alone.
const ENUMERATION_SLACK: f64 = 1e-12;

pub const SPECTRUM_MAGIC: &[u8; 7] = b"LRSPEC1";

/// Sorted entry radii of all lattice points with radius `≤ t_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct EntrySpectrum {
    body_id: String,
    dim: usize,
    motion: RigidMotion,
    t_max: f64,
    radii: Vec<f64>,
}

impl EntrySpectrum {
    pub fn body_id(&self) -> &str {
        &self.body_id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn motion(&self) -> &RigidMotion {
        &self.motion
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn count_at_tmax(&self) -> u64 {
        self.radii.len() as u64
    }

    /// `N(t) = #{t_m ≤ t}`.
    pub fn count_at(&self, t: f64) -> Result<u64> {
        if !(t <= self.t_max) {
            return Err(Error::Coverage {
                t,
                t_max: self.t_max,
            });
        }
        Ok(self.radii.partition_point(|&r| r <= t) as u64)
    }

    /// Number of radii within `rel·t` of `t`; nonzero means the count at `t`
    /// depends on floating-point boundary decisions.
    pub fn near_ties(&self, t: f64, rel: f64) -> usize {
        let lo = self.radii.partition_point(|&r| r < t * (1.0 - rel));
        let hi = self.radii.partition_point(|&r| r <= t * (1.0 + rel));
        hi - lo
    }

    /// Writes the little-endian `LRSPEC1` dump: magic, `k: u32`,
    /// `t_max: f64`, `count: u64`, then `count` radii as `f64`.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(SPECTRUM_MAGIC)?;
        w.write_all(&(self.dim as u32).to_le_bytes())?;
        w.write_all(&self.t_max.to_le_bytes())?;
        w.write_all(&(self.radii.len() as u64).to_le_bytes())?;
        let mut buf = Vec::with_capacity(self.radii.len().min(1 << 20) * 8);
        for chunk in self.radii.chunks(1 << 20) {
            buf.clear();
            for r in chunk {
                buf.extend_from_slice(&r.to_le_bytes());
            }
            w.write_all(&buf)?;
        }
        Ok(())
    }

    /// Reads a dump written by [`write_to`](Self::write_to). The file does not
    /// carry the body or motion; the caller supplies them (cache keys tie a
    /// file to both).
    pub fn read_from<R: Read>(mut r: R, body_id: &str, motion: &RigidMotion) -> Result<Self> {
        let mut magic = [0u8; 7];
        r.read_exact(&mut magic)?;
        if &magic != SPECTRUM_MAGIC {
            return Err(Error::SpectrumFile("bad magic".into()));
        }
        let mut b4 = [0u8; 4];
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b4)?;
        let dim = u32::from_le_bytes(b4) as usize;
        if dim != motion.dim() {
            return Err(Error::SpectrumFile(format!(
                "file dimension {dim} does not match motion dimension {}",
                motion.dim()
            )));
        }
        r.read_exact(&mut b8)?;
        let t_max = f64::from_le_bytes(b8);
        r.read_exact(&mut b8)?;
        let count = u64::from_le_bytes(b8) as usize;
        let mut bytes = vec![0u8; count * 8];
        r.read_exact(&mut bytes)?;
        let radii: Vec<f64> = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        if radii.windows(2).any(|w| w[0] > w[1]) || radii.last().is_some_and(|&r| r > t_max) {
            return Err(Error::SpectrumFile("radii are not sorted within t_max".into()));
        }
        Ok(EntrySpectrum {
            body_id: body_id.to_string(),
            dim,
            motion: motion.clone(),
            t_max,
            radii,
        })
    }
}

struct Enumeration<'a> {
    body: &'a StarBody,
    motion: &'a RigidMotion,
    rho: f64,
}

impl<'a> Enumeration<'a> {
    fn new(body: &'a StarBody, motion: &'a RigidMotion, t: f64) -> Result<Self> {
        if body.dim() != motion.dim() {
            return Err(Error::Dimension {
                expected: body.dim(),
                got: motion.dim(),
            });
        }
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::InvalidArgument(format!("dilation must be finite and >= 0, got {t}")));
        }
        Ok(Enumeration {
            body,
            motion,
            rho: t * body.circumradius() * (1.0 + ENUMERATION_SLACK),
        })
    }

    fn range(&self, center: f64, half: f64) -> (i64, i64) {
        ((center - half).ceil() as i64, (center + half).floor() as i64)
    }

    /// Lattice points in the axis-aligned bounding box of the search ball.
    fn box_candidates(&self) -> u64 {
        let mut total: u128 = 1;
        for &c in self.motion.translation() {
            let (lo, hi) = self.range(c, self.rho);
            total = total.saturating_mul((hi - lo + 1).max(0) as u128);
        }
        total.min(u64::MAX as u128) as u64
    }

    fn check_budget(&self, cap: u64) -> Result<()> {
        let required = self.box_candidates();
        if required > cap {
            Err(Error::Budget { required, cap })
        } else {
            Ok(())
        }
    }

    fn slabs(&self) -> std::ops::RangeInclusive<i64> {
        let (lo, hi) = self.range(self.motion.translation()[0], self.rho);
        lo..=hi
    }

    /// Calls `visit` with the entry radius of every lattice point of slab
    /// `m1` inside the search ball `|m − x| ≤ rho`.
    #[inline]
    fn visit_slab<F: FnMut(f64)>(&self, m1: i64, mut visit: F) {
        let x = self.motion.translation();
        let d1 = m1 as f64 - x[0];
        let rem2 = self.rho * self.rho - d1 * d1;
        if rem2 < 0.0 {
            return;
        }
        let (lo2, hi2) = self.range(x[1], rem2.sqrt());
        if x.len() == 2 {
            let mut y = [0.0; 2];
            for m2 in lo2..=hi2 {
                self.motion
                    .inverse_apply_offset(&[d1, m2 as f64 - x[1]], &mut y);
                visit(self.body.gauge(&y));
            }
        } else {
            let mut y = [0.0; 3];
            for m2 in lo2..=hi2 {
                let d2 = m2 as f64 - x[1];
                let rem3 = rem2 - d2 * d2;
                if rem3 < 0.0 {
                    continue;
                }
                let (lo3, hi3) = self.range(x[2], rem3.sqrt());
                for m3 in lo3..=hi3 {
                    self.motion
                        .inverse_apply_offset(&[d1, d2, m3 as f64 - x[2]], &mut y);
                    visit(self.body.gauge(&y));
                }
            }
        }
    }
}

/// Entry spectrum with the default candidate cap.
pub fn entry_spectrum(body: &StarBody, motion: &RigidMotion, t_max: f64) -> Result<EntrySpectrum> {
    entry_spectrum_with_cap(body, motion, t_max, DEFAULT_CANDIDATE_CAP)
}

pub fn entry_spectrum_with_cap(
    body: &StarBody,
    motion: &RigidMotion,
    t_max: f64,
    cap: u64,
) -> Result<EntrySpectrum> {
    let en = Enumeration::new(body, motion, t_max)?;
    en.check_budget(cap)?;
    let slabs: Vec<Vec<f64>> = en
        .slabs()
        .into_par_iter()
        .map(|m1| {
            let mut out = Vec::new();
            en.visit_slab(m1, |g| {
                if g <= t_max {
                    out.push(g)
                }
            });
            out
        })
        .collect();
    let mut radii = Vec::with_capacity(slabs.iter().map(Vec::len).sum());
    for s in slabs {
        radii.extend_from_slice(&s);
    }
    radii.par_sort_unstable_by(f64::total_cmp);
    Ok(EntrySpectrum {
        body_id: body.id(),
        dim: body.dim(),
        motion: motion.clone(),
        t_max,
        radii,
    })
}

/// `N(t, θ, x)` by a direct membership scan at a single dilation, without
/// building or sorting a spectrum.
pub fn count_points(body: &StarBody, motion: &RigidMotion, t: f64, cap: u64) -> Result<u64> {
    let en = Enumeration::new(body, motion, t)?;
    en.check_budget(cap)?;
    Ok(en
        .slabs()
        .into_par_iter()
        .map(|m1| {
            let mut n = 0u64;
            en.visit_slab(m1, |g| n += (g <= t) as u64);
            n
        })
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{haar_motion, Rotation};

    #[test]
    fn unit_disk_spectrum() {
        let disk = StarBody::ball(2).unwrap();
        let s = entry_spectrum(&disk, &RigidMotion::identity(2), 1.0).unwrap();
        assert_eq!(s.radii(), &[0.0, 1.0, 1.0, 1.0, 1.0]);
        assert_eq!(s.count_at_tmax(), 5);
        assert_eq!(s.count_at(0.5).unwrap(), 1);
        assert_eq!(s.count_at(1.0).unwrap(), 5);
        let s2 = entry_spectrum(&disk, &RigidMotion::identity(2), 2.0).unwrap();
        assert_eq!(s2.count_at_tmax(), 13);
        assert_eq!(s2.count_at(1.5).unwrap(), 9);
    }

    #[test]
    fn count_beyond_coverage_is_an_error() {
        let disk = StarBody::ball(2).unwrap();
        let s = entry_spectrum(&disk, &RigidMotion::identity(2), 1.0).unwrap();
        assert!(matches!(s.count_at(1.0000001), Err(Error::Coverage { .. })));
    }

    #[test]
    fn budget_is_enforced() {
        let disk = StarBody::ball(2).unwrap();
        let err = entry_spectrum_with_cap(&disk, &RigidMotion::identity(2), 100.0, 1000).unwrap_err();
        match err {
            Error::Budget { required, cap } => {
                assert_eq!(cap, 1000);
                assert_eq!(required, 201 * 201);
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn direct_count_matches_spectrum() {
        let body = StarBody::pnorm_ball(4, 2).unwrap();
        let m = haar_motion(2, 1, 0).unwrap();
        let s = entry_spectrum(&body, &m, 40.0).unwrap();
        for t in [0.3, 2.0, 17.5, 39.9] {
            assert_eq!(
                count_points(&body, &m, t, DEFAULT_CANDIDATE_CAP).unwrap(),
                s.count_at(t).unwrap()
            );
        }
        let ball3 = StarBody::ball(3).unwrap();
        let m3 = haar_motion(3, 1, 0).unwrap();
        let s3 = entry_spectrum(&ball3, &m3, 12.0).unwrap();
        assert_eq!(
            count_points(&ball3, &m3, 12.0, DEFAULT_CANDIDATE_CAP).unwrap(),
            s3.count_at_tmax()
        );
    }

    #[test]
    fn spectrum_file_round_trip() {
        let body = StarBody::ellipsoid(&[1.0, 0.7, 1.3]).unwrap();
        let m = haar_motion(3, 9, 2).unwrap();
        let s = entry_spectrum(&body, &m, 6.0).unwrap();
        let mut bytes = Vec::new();
        s.write_to(&mut bytes).unwrap();
        assert_eq!(&bytes[..7], b"LRSPEC1");
        assert_eq!(bytes.len(), 7 + 4 + 8 + 8 + 8 * s.radii().len());
        let back = EntrySpectrum::read_from(&bytes[..], &body.id(), &m).unwrap();
        assert_eq!(back, s);
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(EntrySpectrum::read_from(&bad[..], &body.id(), &m).is_err());
        assert!(EntrySpectrum::read_from(&bytes[..bytes.len() - 3], &body.id(), &m).is_err());
    }

    #[test]
    fn near_ties_flags_boundary_points() {
        let disk = StarBody::ball(2).unwrap();
        let s = entry_spectrum(&disk, &RigidMotion::identity(2), 5.0).unwrap();
        // (±3,±4), (±4,±3), (±5,0), (0,±5)
        assert_eq!(s.near_ties(5.0, 1e-9), 12);
        let rotated = RigidMotion::new(Rotation::planar(0.1), &[0.0, 0.0]).unwrap();
        let sr = entry_spectrum(&disk, &rotated, 5.0).unwrap();
        assert_eq!(sr.count_at(4.9).unwrap(), s.count_at(4.9).unwrap());
    }
}
