//! Big-endian IDX container used by the MNIST distribution.

use crate::{Error, Result};

const IMAGES_MAGIC: u32 = 2051;
const LABELS_MAGIC: u32 = 2049;

#[derive(Debug, Clone, PartialEq)]
pub enum IdxData {
    /// Pixels scaled from `[0, 255]` to `[0, 1]`, one row-major vector per image.
    Images {
        rows: usize,
        cols: usize,
        pixels: Vec<Vec<f64>>,
    },
    Labels(Vec<u8>),
}

fn read_u32(bytes: &[u8], offset: usize) -> Result<u32> {
    bytes
        .get(offset..offset + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or_else(|| Error::Parse {
            offset,
            message: format!("header truncated ({} bytes)", bytes.len()),
        })
}

pub fn parse_idx(bytes: &[u8]) -> Result<IdxData> {
    let magic = read_u32(bytes, 0)?;
    let count = read_u32(bytes, 4)? as usize;
    let (header, item) = match magic {
        IMAGES_MAGIC => {
            let rows = read_u32(bytes, 8)? as usize;
            let cols = read_u32(bytes, 12)? as usize;
            (16, rows * cols)
        }
        LABELS_MAGIC => (8, 1),
        other => {
            return Err(Error::Parse {
                offset: 0,
                message: format!("unknown magic number {other}"),
            })
        }
    };
    let need = count
        .checked_mul(item)
        .and_then(|n| n.checked_add(header))
        .ok_or_else(|| Error::Parse {
            offset: 4,
            message: "item count overflows".into(),
        })?;
    if bytes.len() < need {
        return Err(Error::Parse {
            offset: bytes.len(),
            message: format!("payload truncated: expected {need} bytes, found {}", bytes.len()),
        });
    }
    let body = &bytes[header..need];
    Ok(match magic {
        IMAGES_MAGIC => IdxData::Images {
            rows: read_u32(bytes, 8)? as usize,
            cols: read_u32(bytes, 12)? as usize,
            pixels: body
                .chunks_exact(item.max(1))
                .take(count)
                .map(|img| img.iter().map(|&p| f64::from(p) / 255.0).collect())
                .collect(),
        },
        _ => IdxData::Labels(body.to_vec()),
    })
}

/// Serializes images given as raw bytes (`rows * cols` per image).
pub fn encode_idx_images(rows: usize, cols: usize, images: &[Vec<u8>]) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + images.len() * rows * cols);
    for v in [IMAGES_MAGIC, images.len() as u32, rows as u32, cols as u32] {
        out.extend_from_slice(&v.to_be_bytes());
    }
    for img in images {
        assert_eq!(img.len(), rows * cols);
        out.extend_from_slice(img);
    }
    out
}

pub fn encode_idx_labels(labels: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + labels.len());
    out.extend_from_slice(&LABELS_MAGIC.to_be_bytes());
    out.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    out.extend_from_slice(labels);
    out
}
