//! `TFP1` binary snapshots: 16-byte header (magic, u32 nx, u32 ny, u32
//! reserved, all little-endian) followed by `nx * ny` little-endian f64
//! samples in row-major order.

use std::path::Path;

use super::ScalarField2D;
use crate::{Error, Result};

const MAGIC: &[u8; 4] = b"TFP1";
const HEADER_LEN: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<f64>,
}

pub fn encode_snapshot(field: &ScalarField2D) -> Vec<u8> {
    let g = field.grid();
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * g.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(g.nx as u32).to_le_bytes());
    out.extend_from_slice(&(g.ny as u32).to_le_bytes());
    out.extend_from_slice(&0u32.to_le_bytes());
    for v in field.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_snapshot(bytes: &[u8]) -> Result<Snapshot> {
    if bytes.len() < HEADER_LEN || &bytes[..4] != MAGIC {
        return Err(Error::Format("missing TFP1 header".into()));
    }
    let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap()) as usize;
    let (nx, ny) = (word(4), word(8));
    let body = &bytes[HEADER_LEN..];
    if body.len() != 8 * nx * ny {
        return Err(Error::Format(format!(
            "expected {} payload bytes for {nx}x{ny}, found {}",
            8 * nx * ny,
            body.len()
        )));
    }
    let values = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(Snapshot { nx, ny, values })
}

pub fn write_snapshot(field: &ScalarField2D, path: &Path) -> Result<()> {
    std::fs::write(path, encode_snapshot(field)).map_err(|source| Error::Io {
        context: format!("writing snapshot {}", path.display()),
        source,
    })
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        context: format!("reading snapshot {}", path.display()),
        source,
    })?;
    decode_snapshot(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::GridDescriptor;

    #[test]
    fn header_layout() {
        let g = GridDescriptor::new(4, 6, 1.0, 1.0).unwrap();
        let f = ScalarField2D::from_fn(g, |x, y| x - 2.0 * y);
        let bytes = encode_snapshot(&f);
        assert_eq!(&bytes[..4], b"TFP1");
        assert_eq!(&bytes[4..8], &4u32.to_le_bytes());
        assert_eq!(&bytes[8..12], &6u32.to_le_bytes());
        assert_eq!(&bytes[12..16], &[0, 0, 0, 0]);
        assert_eq!(bytes.len(), 16 + 8 * 24);
        let back = decode_snapshot(&bytes).unwrap();
        assert_eq!(back.values, f.values());
        assert_eq!((back.nx, back.ny), (4, 6));
    }

    #[test]
    fn rejects_truncated_payload() {
        let g = GridDescriptor::new(4, 4, 1.0, 1.0).unwrap();
        let mut bytes = encode_snapshot(&ScalarField2D::constant(g, 1.0));
        bytes.pop();
        assert!(decode_snapshot(&bytes).is_err());
        assert!(decode_snapshot(b"XXXX").is_err());
    }
}
