//! Versioned binary container for fitted artifacts (encoders, reducers,
//! classifiers).
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic    8 bytes  "NIDSMDL\0"
//! version  u16
//! kind     u8
//! header   u32 length + UTF-8 JSON
//! blobs    u32 count, then per blob: u64 length + length × f64
//! ```
//!
//! The JSON header is the serde form of the artifact, except that long float
//! arrays (weights, projection matrices, training points) are moved into the
//! blob section and replaced by `{"$blob": index}`. Floats in blobs are raw
//! IEEE-754 bits, so round trips are exact.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Number, Value};
use thiserror::Error;

pub const MAGIC: &[u8; 8] = b"NIDSMDL\0";
pub const VERSION: u16 = 1;

/// Arrays shorter than this stay inline in the JSON header.
const BLOB_MIN_LEN: usize = 64;
const BLOB_KEY: &str = "$blob";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArtifactKind {
    Encoder = 1,
    Reducer = 2,
    Classifier = 3,
}

impl ArtifactKind {
    fn from_u8(v: u8) -> Option<Self> {
        match v {
            1 => Some(Self::Encoder),
            2 => Some(Self::Reducer),
            3 => Some(Self::Classifier),
            _ => None,
        }
    }
}

#[derive(Debug, Error)]
pub enum ContainerError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("not a model container (bad magic)")]
    BadMagic,
    #[error("unsupported container version {0}")]
    UnsupportedVersion(u16),
    #[error("unknown artifact kind {0}")]
    UnknownKind(u8),
    #[error("expected a {expected:?} artifact, found {found:?}")]
    KindMismatch {
        expected: ArtifactKind,
        found: ArtifactKind,
    },
    #[error("header: {0}")]
    Json(#[from] serde_json::Error),
    #[error("corrupt container: {0}")]
    Corrupt(String),
}

pub fn write_artifact<T: Serialize, W: Write>(
    mut w: W,
    kind: ArtifactKind,
    value: &T,
) -> Result<(), ContainerError> {
    let mut header = serde_json::to_value(value)?;
    let mut blobs = Vec::new();
    extract_blobs(&mut header, &mut blobs);
    let header = serde_json::to_vec(&header)?;

    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&[kind as u8])?;
    w.write_all(&(header.len() as u32).to_le_bytes())?;
    w.write_all(&header)?;
    w.write_all(&(blobs.len() as u32).to_le_bytes())?;
    for blob in &blobs {
        w.write_all(&(blob.len() as u64).to_le_bytes())?;
        for v in blob {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_artifact<T: DeserializeOwned, R: Read>(
    mut r: R,
    kind: ArtifactKind,
) -> Result<T, ContainerError> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(ContainerError::BadMagic);
    }
    let version = u16::from_le_bytes(read_array(&mut r)?);
    if version != VERSION {
        return Err(ContainerError::UnsupportedVersion(version));
    }
    let [k] = read_array::<1, _>(&mut r)?;
    let found = ArtifactKind::from_u8(k).ok_or(ContainerError::UnknownKind(k))?;
    if found != kind {
        return Err(ContainerError::KindMismatch { expected: kind, found });
    }
    let header_len = u32::from_le_bytes(read_array(&mut r)?) as usize;
    let mut header = vec![0u8; header_len];
    r.read_exact(&mut header)?;
    let mut header: Value = serde_json::from_slice(&header)?;

    let n_blobs = u32::from_le_bytes(read_array(&mut r)?) as usize;
    let mut blobs = Vec::with_capacity(n_blobs);
    for _ in 0..n_blobs {
        let len = u64::from_le_bytes(read_array(&mut r)?) as usize;
        let mut bytes = vec![0u8; len * 8];
        r.read_exact(&mut bytes)?;
        let blob: Vec<f64> = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        blobs.push(Some(blob));
    }
    restore_blobs(&mut header, &mut blobs)?;
    Ok(serde_json::from_value(header)?)
}

pub fn save_artifact<T: Serialize>(
    path: &Path,
    kind: ArtifactKind,
    value: &T,
) -> Result<(), ContainerError> {
    write_artifact(BufWriter::new(File::create(path)?), kind, value)
}

pub fn load_artifact<T: DeserializeOwned>(path: &Path, kind: ArtifactKind) -> Result<T, ContainerError> {
    read_artifact(BufReader::new(File::open(path)?), kind)
}

fn read_array<const N: usize, R: Read>(r: &mut R) -> std::io::Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)?;
    Ok(buf)
}

fn extract_blobs(v: &mut Value, blobs: &mut Vec<Vec<f64>>) {
    match v {
        Value::Array(items) => {
            if items.len() >= BLOB_MIN_LEN && items.iter().all(|x| matches!(x, Value::Number(n) if n.is_f64())) {
                let data = items.iter().map(|x| x.as_f64().unwrap()).collect();
                let mut m = Map::new();
                m.insert(BLOB_KEY.into(), Value::from(blobs.len()));
                blobs.push(data);
                *v = Value::Object(m);
            } else {
                items.iter_mut().for_each(|x| extract_blobs(x, blobs));
            }
        }
        Value::Object(m) => m.values_mut().for_each(|x| extract_blobs(x, blobs)),
        _ => {}
    }
}

fn restore_blobs(v: &mut Value, blobs: &mut [Option<Vec<f64>>]) -> Result<(), ContainerError> {
    match v {
        Value::Object(m) if m.len() == 1 && m.contains_key(BLOB_KEY) => {
            let idx = m[BLOB_KEY]
                .as_u64()
                .ok_or_else(|| ContainerError::Corrupt("blob index is not an integer".into()))?
                as usize;
            let data = blobs
                .get_mut(idx)
                .and_then(Option::take)
                .ok_or_else(|| ContainerError::Corrupt(format!("blob {idx} missing or reused")))?;
            let items = data
                .into_iter()
                .map(|x| {
                    Number::from_f64(x)
                        .map(Value::Number)
                        .ok_or_else(|| ContainerError::Corrupt("non-finite value in blob".into()))
                })
                .collect::<Result<Vec<_>, _>>()?;
            *v = Value::Array(items);
        }
        Value::Object(m) => {
            for x in m.values_mut() {
                restore_blobs(x, blobs)?;
            }
        }
        Value::Array(items) => {
            for x in items {
                restore_blobs(x, blobs)?;
            }
        }
        _ => {}
    }
    Ok(())
}
