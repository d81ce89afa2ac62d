//! Weight files: `manifest.json` listing parameter tensors in execution
//! order, plus a raw blob of little-endian f32 values.

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::heads::{Extractor, ExtractorSpec, InputAffine};
use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const BLOB_FILE: &str = "weights.bin";
pub const DTYPE_F32LE: &str = "f32le";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorEntry {
    pub name: String,
    pub shape: Vec<usize>,
    pub dtype: String,
    pub byte_offset: u64,
    pub byte_length: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightManifest {
    /// Blob path relative to the manifest.
    #[serde(default = "default_blob")]
    pub blob: String,
    pub tensors: Vec<TensorEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_affine: Option<InputAffine>,
}

fn default_blob() -> String {
    BLOB_FILE.to_string()
}

/// He-style init: weights are standard normal draws from
/// `ChaCha8Rng::seed_from_u64(seed)` scaled by `sqrt(2 / fan_in)`, taken
/// tensor by tensor in manifest order; biases are zero.
pub fn init_weights(spec: &ExtractorSpec, seed: u64) -> Extractor {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = spec
        .param_slots()
        .iter()
        .map(|slot| {
            if slot.is_bias() {
                return vec![0.0; slot.len()];
            }
            let scale = (2.0 / slot.fan_in as f64).sqrt();
            (0..slot.len())
                .map(|_| {
                    let z: f64 = rng.sample(StandardNormal);
                    (z * scale) as f32
                })
                .collect()
        })
        .collect();
    Extractor::from_params(spec.clone(), params, None).expect("slots define the parameter shapes")
}

/// Manifest and blob bytes for an extractor, tensors packed back to back.
pub fn encode_weights(extractor: &Extractor) -> (WeightManifest, Vec<u8>) {
    let mut blob = Vec::new();
    let mut tensors = Vec::new();
    for (slot, values) in extractor.spec().param_slots().into_iter().zip(extractor.params()) {
        let byte_offset = blob.len() as u64;
        for v in values {
            blob.extend_from_slice(&v.to_le_bytes());
        }
        tensors.push(TensorEntry {
            name: slot.name,
            shape: slot.shape,
            dtype: DTYPE_F32LE.into(),
            byte_offset,
            byte_length: blob.len() as u64 - byte_offset,
        });
    }
    let manifest = WeightManifest { blob: default_blob(), tensors, input_affine: extractor.input_affine().copied() };
    (manifest, blob)
}

/// Writes `manifest.json` and `weights.bin` into `dir`; returns the manifest path.
pub fn save_weights(extractor: &Extractor, dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let (manifest, blob) = encode_weights(extractor);
    let blob_path = dir.join(&manifest.blob);
    fs::write(&blob_path, blob).map_err(|e| Error::io(&blob_path, e))?;
    let path = dir.join(MANIFEST_FILE);
    let json = serde_json::to_string_pretty(&manifest)?;
    fs::write(&path, json).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

pub fn load_weights(spec: &ExtractorSpec, manifest_path: &Path) -> Result<Extractor> {
    let text = fs::read_to_string(manifest_path).map_err(|e| Error::io(manifest_path, e))?;
    let manifest: WeightManifest = serde_json::from_str(&text)?;
    let blob_path = manifest_path.parent().unwrap_or(Path::new(".")).join(&manifest.blob);
    let blob = fs::read(&blob_path).map_err(|e| Error::io(&blob_path, e))?;
    decode_weights(spec, &manifest, &blob)
}

pub fn decode_weights(spec: &ExtractorSpec, manifest: &WeightManifest, blob: &[u8]) -> Result<Extractor> {
    let slots = spec.param_slots();
    if manifest.tensors.len() != slots.len() {
        return Err(Error::ShapeMismatchInManifest(format!(
            "spec expects {} tensors, manifest lists {}",
            slots.len(),
            manifest.tensors.len()
        )));
    }
    for (slot, entry) in slots.iter().zip(&manifest.tensors) {
        if entry.shape != slot.shape {
            return Err(Error::ShapeMismatchInManifest(format!(
                "{} has shape {:?}, spec expects {:?} for {}",
                entry.name, entry.shape, slot.shape, slot.name
            )));
        }
        if entry.dtype != DTYPE_F32LE {
            return Err(Error::CorruptBlob(format!("{}: unsupported dtype {}", entry.name, entry.dtype)));
        }
        if entry.byte_length != 4 * slot.len() as u64 {
            return Err(Error::CorruptBlob(format!(
                "{}: byte_length {} but shape needs {}",
                entry.name,
                entry.byte_length,
                4 * slot.len()
            )));
        }
        if entry.byte_offset.checked_add(entry.byte_length).is_none_or(|end| end > blob.len() as u64) {
            return Err(Error::CorruptBlob(format!(
                "{}: bytes {}..+{} exceed blob of {} bytes",
                entry.name,
                entry.byte_offset,
                entry.byte_length,
                blob.len()
            )));
        }
    }
    let mut ranges: Vec<(u64, u64)> = manifest
        .tensors
        .iter()
        .filter(|t| t.byte_length > 0)
        .map(|t| (t.byte_offset, t.byte_offset + t.byte_length))
        .collect();
    ranges.sort_unstable();
    if ranges.windows(2).any(|w| w[1].0 < w[0].1) {
        return Err(Error::CorruptBlob("tensor byte ranges overlap".into()));
    }
    let mut params = Vec::with_capacity(slots.len());
    for entry in &manifest.tensors {
        let start = entry.byte_offset as usize;
        let bytes = &blob[start..start + entry.byte_length as usize];
        let values: Vec<f32> = bytes.chunks_exact(4).map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]])).collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::CorruptBlob(format!("{}: non-finite value", entry.name)));
        }
        params.push(values);
    }
    Extractor::from_params(spec.clone(), params, manifest.input_affine)
}
