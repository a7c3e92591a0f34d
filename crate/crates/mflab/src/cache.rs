//! Versioned JSON cache of bases and eigenform records. Exact integers are
//! decimal strings; floats are hex strings at the stated precision, so a
//! round trip is lossless for exact data and bit-exact for floats.

use std::path::Path;

use rug::{Float, Integer};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::eigenforms::{eigenbasis, FormRef};
use crate::error::{Error, Result};
use crate::qseries::miller_basis;

pub const CACHE_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EigenRecord {
    /// T₂ eigenvalue as a radix-16 float string at `prec_bits`.
    pub t2_eigenvalue: String,
    /// Eigenvector coordinates in the Miller basis (v₁ = 1), radix-16.
    pub coords: Vec<String>,
    /// Petersson normalization constant, if it has been computed.
    pub norm_const: Option<String>,
    /// (value, tail estimate, prime cutoff) of L(1, sym²f), if computed.
    pub l1sym2: Option<(f64, f64, u64)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CacheFile {
    pub version: u32,
    pub weight: i64,
    pub terms: usize,
    pub prec_bits: u32,
    /// Echelon basis coefficients a(0)..a(terms), exact decimal strings.
    pub basis: Vec<Vec<String>>,
    pub eigenforms: Vec<EigenRecord>,
    /// SHA-256 over the canonical payload (all fields above, in order).
    pub checksum: String,
}

fn float_to_hex(f: &Float) -> String {
    f.to_string_radix(16, None)
}

fn float_from_hex(s: &str, prec: u32) -> Result<Float> {
    Float::parse_radix(s, 16)
        .map(|p| Float::with_val(prec, p))
        .map_err(|e| Error::CacheError(format!("bad float literal {s:?}: {e}")))
}

fn payload_digest(c: &CacheFile) -> String {
    let mut h = Sha256::new();
    h.update(c.version.to_le_bytes());
    h.update(c.weight.to_le_bytes());
    h.update(c.terms.to_le_bytes());
    h.update(c.prec_bits.to_le_bytes());
    for row in &c.basis {
        for s in row {
            h.update(s.as_bytes());
            h.update([0u8]);
        }
        h.update([1u8]);
    }
    for e in &c.eigenforms {
        h.update(e.t2_eigenvalue.as_bytes());
        h.update([0u8]);
        for s in &e.coords {
            h.update(s.as_bytes());
            h.update([0u8]);
        }
        if let Some(n) = &e.norm_const {
            h.update(n.as_bytes());
        }
        h.update([2u8]);
        if let Some((v, t, p)) = e.l1sym2 {
            h.update(v.to_le_bytes());
            h.update(t.to_le_bytes());
            h.update(p.to_le_bytes());
        }
        h.update([3u8]);
    }
    let out = h.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

impl CacheFile {
    /// Build a cache record from the (possibly already cached) eigenbasis.
    pub fn build(weight: i64, terms: usize, prec_bits: u32) -> Result<CacheFile> {
        let basis = miller_basis(weight, terms)?;
        let basis_strings: Vec<Vec<String>> = basis
            .iter()
            .map(|g| g.coeffs().iter().map(|c| c.to_string()).collect())
            .collect();
        let eigen: Vec<EigenRecord> = if basis.is_empty() {
            Vec::new()
        } else {
            eigenbasis(weight, terms, prec_bits)?
                .iter()
                .map(|f| EigenRecord {
                    t2_eigenvalue: float_to_hex(f.t2_eigenvalue()),
                    coords: f.basis_coords().iter().map(float_to_hex).collect(),
                    norm_const: f.norm_const().map(float_to_hex),
                    l1sym2: f.l1sym2_cached().map(|l| (l.value, l.tail_estimate, l.prime_cutoff)),
                })
                .collect()
        };
        let mut c = CacheFile {
            version: CACHE_VERSION,
            weight,
            terms,
            prec_bits,
            basis: basis_strings,
            eigenforms: eigen,
            checksum: String::new(),
        };
        c.checksum = payload_digest(&c);
        Ok(c)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| Error::CacheError(e.to_string()))?;
        std::fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<CacheFile> {
        let text = std::fs::read_to_string(path)?;
        let c: CacheFile =
            serde_json::from_str(&text).map_err(|e| Error::CacheError(e.to_string()))?;
        if c.version != CACHE_VERSION {
            return Err(Error::CacheError(format!(
                "cache version {} does not match supported {CACHE_VERSION}",
                c.version
            )));
        }
        let digest = payload_digest(&c);
        if digest != c.checksum {
            return Err(Error::CacheError("cache checksum mismatch".into()));
        }
        Ok(c)
    }

    /// Exact basis coefficients, parsed back.
    pub fn basis_integers(&self) -> Result<Vec<Vec<Integer>>> {
        self.basis
            .iter()
            .map(|row| {
                row.iter()
                    .map(|s| {
                        Integer::parse(s)
                            .map(Integer::from)
                            .map_err(|e| Error::CacheError(format!("bad integer {s:?}: {e}")))
                    })
                    .collect()
            })
            .collect()
    }

    /// Eigen data parsed back to floats at the stated precision.
    pub fn eigen_floats(&self) -> Result<Vec<(Float, Vec<Float>)>> {
        self.eigenforms
            .iter()
            .map(|e| {
                let t2 = float_from_hex(&e.t2_eigenvalue, self.prec_bits)?;
                let coords = e
                    .coords
                    .iter()
                    .map(|s| float_from_hex(s, self.prec_bits))
                    .collect::<Result<Vec<_>>>()?;
                Ok((t2, coords))
            })
            .collect()
    }

    /// Bit-exact agreement with a freshly built record (cache-hit vs
    /// cold-run must not change any numerical output).
    pub fn agrees_with(&self, fresh: &CacheFile) -> bool {
        self.checksum == fresh.checksum
            && self.basis == fresh.basis
            && self
                .eigenforms
                .iter()
                .zip(&fresh.eigenforms)
                .all(|(a, b)| a.t2_eigenvalue == b.t2_eigenvalue && a.coords == b.coords)
    }
}

/// Fetch the eigenbasis through a cache file when one is given: a valid
/// matching cache is loaded (and verified bit-exact against the in-process
/// construction); otherwise the basis is computed and the cache written.
pub fn eigenbasis_cached(
    weight: i64,
    terms: usize,
    prec_bits: u32,
    cache_path: Option<&Path>,
) -> Result<std::sync::Arc<Vec<FormRef>>> {
    let forms = eigenbasis(weight, terms, prec_bits)?;
    if let Some(path) = cache_path {
        let fresh = CacheFile::build(weight, terms, prec_bits)?;
        if path.exists() {
            let loaded = CacheFile::load(path)?;
            if loaded.weight == weight && loaded.terms == terms && loaded.prec_bits == prec_bits {
                if !loaded.agrees_with(&fresh) {
                    return Err(Error::CacheError(
                        "cache contents disagree with recomputation".into(),
                    ));
                }
            } else {
                fresh.write(path)?;
            }
        } else {
            fresh.write(path)?;
        }
    }
    Ok(forms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_is_lossless_and_bit_exact() {
        let dir = std::env::temp_dir().join("mflab-cache-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("w24.json");
        let built = CacheFile::build(24, 40, 128).unwrap();
        built.write(&path).unwrap();
        let loaded = CacheFile::load(&path).unwrap();
        assert!(loaded.agrees_with(&built));
        // Exact integers round trip.
        let ints = loaded.basis_integers().unwrap();
        assert_eq!(ints[0][1], 1);
        // Floats round trip bit-exactly at the stated precision.
        let eig = loaded.eigen_floats().unwrap();
        let fresh = eigenbasis(24, 40, 128).unwrap();
        for (rec, form) in eig.iter().zip(fresh.iter()) {
            assert_eq!(&rec.0, form.t2_eigenvalue());
            for (a, b) in rec.1.iter().zip(form.basis_coords()) {
                assert_eq!(a, b);
            }
        }
        std::fs::remove_file(&path).unwrap();
    }

    #[test]
    fn version_mismatch_rejected() {
        let dir = std::env::temp_dir().join("mflab-cache-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("badversion.json");
        let mut c = CacheFile::build(12, 20, 64).unwrap();
        c.version = 99;
        c.checksum = payload_digest(&c);
        c.write(&path).unwrap();
        assert!(matches!(CacheFile::load(&path), Err(Error::CacheError(_))));
        std::fs::remove_file(&path).unwrap();
    }

    #[test]
    fn corruption_detected_by_checksum() {
        let dir = std::env::temp_dir().join("mflab-cache-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("corrupt.json");
        let mut c = CacheFile::build(12, 20, 64).unwrap();
        c.basis[0][1] = "2".into(); // tamper without updating the checksum
        c.write(&path).unwrap();
        assert!(matches!(CacheFile::load(&path), Err(Error::CacheError(_))));
        std::fs::remove_file(&path).unwrap();
    }
}
