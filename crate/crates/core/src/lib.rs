//! Lattice points in dilated, rotated and translated star bodies: exact
//! counts, remainder integrals, Fourier transforms of indicators and
//! growth-exponent experiments.

pub mod bessel;
pub mod bodyspec;
pub mod counting;
pub mod error;
pub mod experiments;
pub mod fourier;
pub mod geometry;
pub mod quadrature;
pub mod remainder;
pub mod rng;
pub mod spectral;
pub mod stats;

pub use bodyspec::parse_body_spec;
pub use counting::{count_points, entry_spectrum, entry_spectrum_with_cap, EntrySpectrum};
pub use error::{Error, Result};
pub use fourier::{chi_hat, decay_envelope, lp_norm, EnvelopeEstimate};
pub use geometry::{haar_motion, haar_sample, BodyKind, RigidMotion, Rotation, StarBody};
pub use remainder::RemainderProfile;
