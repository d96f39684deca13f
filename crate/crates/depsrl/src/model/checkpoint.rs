//! Versioned binary model container: a magic tag, a JSON header carrying
//! the configuration and vocabulary, then the raw parameter tensors in
//! little-endian order. Loading verifies format, version, scalar width and
//! the full tensor manifest before touching any weights.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::params::HasParams;
use super::vocab::Vocabulary;
use super::{DbaConfig, EncoderConfig, JointParser};
use crate::error::ModelError;
use crate::scalar::Scalar;

const MAGIC: &[u8; 4] = b"DSRL";
const VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct TensorInfo {
    name: String,
    rows: usize,
    cols: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    scalar: String,
    encoder: EncoderConfig,
    dba: DbaConfig,
    vocab: Vocabulary,
    tensors: Vec<TensorInfo>,
}

fn scalar_tag<F: Scalar>() -> &'static str {
    if std::mem::size_of::<F>() == 4 {
        "f32"
    } else {
        "f64"
    }
}

pub fn save_checkpoint<F: Scalar>(
    parser: &mut JointParser<F>,
    path: impl AsRef<Path>,
) -> Result<(), ModelError> {
    let encoder = parser.encoder_config.clone();
    let dba = parser.dba_config.clone();
    let vocab = parser.vocab.clone();
    let params = parser.params_mut();
    let tensors = params
        .iter()
        .map(|p| TensorInfo {
            name: p.name.clone(),
            rows: p.value.nrows(),
            cols: p.value.ncols(),
        })
        .collect();
    let header = Header {
        format: "depsrl-checkpoint".into(),
        version: VERSION,
        scalar: scalar_tag::<F>().into(),
        encoder,
        dba,
        vocab,
        tensors,
    };
    let header_bytes = serde_json::to_vec(&header)
        .map_err(|e| ModelError::Checkpoint(format!("header serialization: {e}")))?;
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(header_bytes.len() as u64).to_le_bytes())?;
    w.write_all(&header_bytes)?;
    for p in params {
        for &v in p.value.iter() {
            w.write_all(&v.to_f64().to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn load_checkpoint<F: Scalar>(path: impl AsRef<Path>) -> Result<JointParser<F>, ModelError> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(ModelError::Checkpoint(
            "not a model checkpoint (bad magic)".into(),
        ));
    }
    let mut word = [0u8; 4];
    r.read_exact(&mut word)?;
    let version = u32::from_le_bytes(word);
    if version != VERSION {
        return Err(ModelError::Checkpoint(format!(
            "unsupported checkpoint version {version} (expected {VERSION})"
        )));
    }
    let mut len_bytes = [0u8; 8];
    r.read_exact(&mut len_bytes)?;
    let header_len = u64::from_le_bytes(len_bytes) as usize;
    let mut header_bytes = vec![0u8; header_len];
    r.read_exact(&mut header_bytes)?;
    let header: Header = serde_json::from_slice(&header_bytes)
        .map_err(|e| ModelError::Checkpoint(format!("corrupt header: {e}")))?;
    if header.format != "depsrl-checkpoint" {
        return Err(ModelError::Checkpoint(format!(
            "unexpected format tag `{}`",
            header.format
        )));
    }
    if header.scalar != scalar_tag::<F>() {
        return Err(ModelError::Checkpoint(format!(
            "checkpoint stores {} parameters but {} was requested",
            header.scalar,
            scalar_tag::<F>()
        )));
    }
    let mut vocab = header.vocab;
    vocab.rebuild_indices();
    let mut parser = JointParser::<F>::new(header.encoder, header.dba, vocab)?;
    let params = parser.params_mut();
    if params.len() != header.tensors.len() {
        return Err(ModelError::Checkpoint(format!(
            "tensor count mismatch: file has {}, model has {}",
            header.tensors.len(),
            params.len()
        )));
    }
    for (p, info) in params.into_iter().zip(&header.tensors) {
        if p.name != info.name || p.value.nrows() != info.rows || p.value.ncols() != info.cols {
            return Err(ModelError::Checkpoint(format!(
                "tensor mismatch: file has {} [{}x{}], model expects {} [{}x{}]",
                info.name,
                info.rows,
                info.cols,
                p.name,
                p.value.nrows(),
                p.value.ncols()
            )));
        }
        let mut buf = [0u8; 8];
        for v in p.value.iter_mut() {
            r.read_exact(&mut buf)?;
            *v = F::from_real(f64::from_le_bytes(buf));
        }
    }
    Ok(parser)
}
