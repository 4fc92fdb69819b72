//! Field snapshot files.
//!
//! Binary layout, little-endian:
//!
//! | bytes | content |
//! |-------|---------|
//! | 4     | magic `NSCF` |
//! | 4     | version `u32` (currently 1) |
//! | 8     | side `L` as `f64` |
//! | 4     | truncation `m` as `u32` |
//! | 4     | flags `u32`, bit 0 = divergence-free |
//! | 48 each | `(re, im)` of the three components for every stored mode |
//!
//! Stored modes are the lexicographically positive half of the cube
//! `|k_i| <= m`, in lexicographic `(k1, k2, k3)` order; `((2m+1)^3 - 1) / 2`
//! records in total.
//!
//! The JSON alternative lists the nonzero stored modes explicitly and is
//! meant for small fields.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::{SpectralField, Vec3c};
use super::modes::{HalfSpace, ModeCube, Wave};
use crate::{Error, Result};

pub const MAGIC: &[u8; 4] = b"NSCF";
pub const VERSION: u32 = 1;
const FLAG_DIVFREE: u32 = 1;

pub fn write_binary<W: Write>(field: &SpectralField, mut w: W) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&field.side().to_le_bytes())?;
    w.write_all(&(field.truncation() as u32).to_le_bytes())?;
    let flags = if field.is_divergence_free() { FLAG_DIVFREE } else { 0 };
    w.write_all(&flags.to_le_bytes())?;
    for v in field.modes().as_slice() {
        for c in v {
            w.write_all(&c.re.to_le_bytes())?;
            w.write_all(&c.im.to_le_bytes())?;
        }
    }
    Ok(())
}

fn read_array<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)
        .map_err(|e| Error::Format(format!("truncated snapshot: {e}")))?;
    Ok(buf)
}

pub fn read_binary<R: Read>(mut r: R) -> Result<SpectralField> {
    let magic: [u8; 4] = read_array(&mut r)?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic, expected NSCF".into()));
    }
    let version = u32::from_le_bytes(read_array(&mut r)?);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported snapshot version {version}")));
    }
    let side = f64::from_le_bytes(read_array(&mut r)?);
    let m = u32::from_le_bytes(read_array(&mut r)?) as usize;
    let flags = u32::from_le_bytes(read_array(&mut r)?);
    if m == 0 {
        return Err(Error::Format("truncation must be at least 1".into()));
    }
    let cube = ModeCube::new(m);
    let mut data = Vec::with_capacity(cube.half_len());
    for _ in 0..cube.half_len() {
        let mut v: Vec3c = [Complex64::new(0.0, 0.0); 3];
        for c in v.iter_mut() {
            let re = f64::from_le_bytes(read_array(&mut r)?);
            let im = f64::from_le_bytes(read_array(&mut r)?);
            *c = Complex64::new(re, im);
        }
        data.push(v);
    }
    let mut extra = [0u8; 1];
    if r.read(&mut extra)? != 0 {
        return Err(Error::Format("trailing bytes after snapshot body".into()));
    }
    let field = SpectralField::zeros(side, m).map_err(|e| Error::Format(e.to_string()))?;
    let mut field = SpectralField::from_modes(
        field.side(),
        HalfSpace::from_vec(cube, data).expect("length checked"),
        false,
    );
    if flags & FLAG_DIVFREE != 0 {
        field
            .mark_divergence_free(1e-10)
            .map_err(|_| Error::Format("divergence-free flag set on a field with divergence".into()))?;
    }
    Ok(field)
}

#[derive(Serialize, Deserialize)]
struct JsonMode {
    k: Wave,
    u: [[f64; 2]; 3],
}

#[derive(Serialize, Deserialize)]
struct JsonSnapshot {
    format: String,
    version: u32,
    #[serde(rename = "L")]
    side: f64,
    m: usize,
    divergence_free: bool,
    modes: Vec<JsonMode>,
}

pub fn to_json(field: &SpectralField) -> Result<String> {
    let modes = field
        .modes()
        .iter()
        .filter(|(_, v)| v.iter().any(|c| c.norm_sqr() > 0.0))
        .map(|(k, v)| JsonMode {
            k,
            u: v.map(|c| [c.re, c.im]),
        })
        .collect();
    let doc = JsonSnapshot {
        format: "NSCF".into(),
        version: VERSION,
        side: field.side(),
        m: field.truncation(),
        divergence_free: field.is_divergence_free(),
        modes,
    };
    Ok(serde_json::to_string_pretty(&doc)?)
}

pub fn from_json(text: &str) -> Result<SpectralField> {
    let doc: JsonSnapshot = serde_json::from_str(text)?;
    if doc.format != "NSCF" || doc.version != VERSION {
        return Err(Error::Format(format!(
            "unsupported snapshot format {} v{}",
            doc.format, doc.version
        )));
    }
    let mut field = SpectralField::zeros(doc.side, doc.m)?;
    for mode in &doc.modes {
        field.set_coefficient(mode.k, mode.u.map(|[re, im]| Complex64::new(re, im)))?;
    }
    if doc.divergence_free {
        field.mark_divergence_free(1e-10)?;
    } else {
        field = SpectralField::from_modes(field.side(), field.modes().clone(), false);
    }
    Ok(field)
}

/// Reads either format, detected from the first byte.
pub fn load(path: impl AsRef<Path>) -> Result<SpectralField> {
    let bytes = std::fs::read(path)?;
    if bytes.starts_with(MAGIC) {
        read_binary(bytes.as_slice())
    } else {
        from_json(std::str::from_utf8(&bytes).map_err(|e| Error::Format(e.to_string()))?)
    }
}

pub fn to_bytes(field: &SpectralField) -> Vec<u8> {
    let mut out = Vec::with_capacity(24 + 48 * field.cube().half_len());
    write_binary(field, &mut out).expect("writing to a Vec cannot fail");
    out
}
