//! On-disk spectrum cache keyed by body, motion, coverage and code version.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use lrl_core::counting::entry_spectrum_with_cap;
use lrl_core::experiments::SpectrumSource;
use lrl_core::{EntrySpectrum, Error, RigidMotion, StarBody};
use sha2::{Digest, Sha256};

pub struct CachedSource {
    dir: PathBuf,
}

impl CachedSource {
    pub fn new(dir: &Path) -> std::io::Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(CachedSource {
            dir: dir.to_path_buf(),
        })
    }

    pub fn key(body: &StarBody, motion: &RigidMotion, t_max: f64) -> String {
        let mut h = Sha256::new();
        h.update(body.spec_string().as_bytes());
        h.update((body.dim() as u64).to_le_bytes());
        for b in motion.to_bits() {
            h.update(b.to_le_bytes());
        }
        h.update(t_max.to_bits().to_le_bytes());
        h.update(crate::VERSION.as_bytes());
        format!("{:x}", h.finalize())
    }

    pub fn path_for(&self, body: &StarBody, motion: &RigidMotion, t_max: f64) -> PathBuf {
        self.dir.join(format!("{}.lrspec", Self::key(body, motion, t_max)))
    }
}

impl SpectrumSource for CachedSource {
    fn spectrum(
        &self,
        body: &StarBody,
        motion: &RigidMotion,
        t_max: f64,
        cap: u64,
    ) -> lrl_core::Result<EntrySpectrum> {
        let path = self.path_for(body, motion, t_max);
        if let Ok(f) = File::open(&path) {
            if let Ok(s) = EntrySpectrum::read_from(BufReader::new(f), &body.id(), motion) {
                if s.t_max() == t_max {
                    return Ok(s);
                }
            }
        }
        let spectrum = entry_spectrum_with_cap(body, motion, t_max, cap)?;
        let store = || -> std::io::Result<()> {
            let tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
            {
                let mut w = BufWriter::new(tmp.as_file());
                spectrum
                    .write_to(&mut w)
                    .map_err(|e| std::io::Error::other(e.to_string()))?;
                w.flush()?;
            }
            tmp.persist(&path).map_err(|e| e.error)?;
            Ok(())
        };
        store().map_err(|e| Error::SpectrumFile(format!("{}: {e}", path.display())))?;
        Ok(spectrum)
    }
}
