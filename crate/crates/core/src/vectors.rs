//! Cleartext vector files and the synthetic pair generator.
//!
//! File layout: header `n` u16, `w` u8, `m` u32, then the components as
//! little-endian u32. The generator derives a template from a seed and
//! perturbs a chosen number of components by exactly `d` each, so the pair
//! sits at a known squared distance `d^2 · count`.

use std::io::{Read, Write};
use std::path::Path;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};
use crate::matcher::BiometricVector;

/// Writes a vector file; `w` is recorded so readers can validate the
/// component width the vector was produced for.
pub fn write_vector(path: &Path, v: &BiometricVector, w: u16) -> Result<()> {
    let mut out = Vec::with_capacity(7 + v.len() * 4);
    out.extend_from_slice(&(v.len() as u16).to_le_bytes());
    out.push(w as u8);
    out.extend_from_slice(&v.modulus().to_le_bytes());
    for &c in v.components() {
        out.extend_from_slice(&c.to_le_bytes());
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(&out)?;
    Ok(())
}

/// Reads a vector file, returning the vector and its recorded width.
pub fn read_vector(path: &Path) -> Result<(BiometricVector, u16)> {
    let mut raw = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut raw)?;
    parse_vector(&raw)
}

pub fn parse_vector(raw: &[u8]) -> Result<(BiometricVector, u16)> {
    if raw.len() < 7 {
        return Err(Error::Malformed("vector file shorter than header".into()));
    }
    let n = u16::from_le_bytes([raw[0], raw[1]]) as usize;
    let w = raw[2] as u16;
    let modulus = u32::from_le_bytes(raw[3..7].try_into().unwrap());
    let body = &raw[7..];
    if body.len() != n * 4 {
        return Err(Error::Malformed(format!(
            "expected {} component bytes, found {}",
            n * 4,
            body.len()
        )));
    }
    let components = body
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok((BiometricVector::new(components, modulus)?, w))
}

/// Parameters for one synthetic template/sample pair.
#[derive(Debug, Clone, Copy)]
pub struct SyntheticSpec {
    pub n: usize,
    pub w: u16,
    pub seed: u64,
    /// Per-component shift applied to perturbed components.
    pub distance: u32,
    /// How many components receive the shift.
    pub perturbed: usize,
}

/// A generated pair together with its exact squared and Manhattan
/// distances.
#[derive(Debug, Clone)]
pub struct SyntheticPair {
    pub template: BiometricVector,
    pub sample: BiometricVector,
    pub squared_distance: u64,
    pub manhattan_distance: u64,
}

/// Deterministically generates a pair at squared distance
/// `distance^2 · perturbed`.
pub fn synthetic_pair(spec: &SyntheticSpec) -> Result<SyntheticPair> {
    if spec.w == 0 || spec.w > 16 {
        return Err(Error::BadWidth(spec.w));
    }
    let m = 1u32 << spec.w;
    if spec.distance >= m {
        return Err(Error::BadConfig(format!(
            "distance {} is not representable with modulus {m}",
            spec.distance
        )));
    }
    if spec.perturbed > spec.n {
        return Err(Error::BadConfig(format!(
            "cannot perturb {} of {} components",
            spec.perturbed, spec.n
        )));
    }
    let mut rng = StdRng::seed_from_u64(spec.seed);
    let template: Vec<u32> = (0..spec.n).map(|_| rng.gen_range(0..m)).collect();
    let mut sample = template.clone();
    let mut indices: Vec<usize> = (0..spec.n).collect();
    // Fisher-Yates so which components move is also seed-determined.
    for i in (1..indices.len()).rev() {
        indices.swap(i, rng.gen_range(0..=i));
    }
    for &i in indices.iter().take(spec.perturbed) {
        sample[i] = if template[i] + spec.distance < m {
            template[i] + spec.distance
        } else {
            template[i] - spec.distance
        };
    }
    let d = spec.distance as u64;
    Ok(SyntheticPair {
        template: BiometricVector::new(template, m)?,
        sample: BiometricVector::new(sample, m)?,
        squared_distance: d * d * spec.perturbed as u64,
        manhattan_distance: d * spec.perturbed as u64,
    })
}
