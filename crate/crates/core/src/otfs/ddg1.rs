use std::io::{Read, Write};

use super::DdGrid;
use crate::error::{Error, Result};
use crate::scalar::C;

/// Four-byte magic opening a DD grid file.
pub const DDG1_MAGIC: &[u8; 4] = b"DDG1";

/// Writes a 16-byte header (magic, `K`, `M`, reserved zero; little-endian
/// `u32`) followed by row-major `(re, im)` pairs as little-endian `f64`.
pub fn write_ddg1<W: Write>(grid: &DdGrid<f64>, mut w: W) -> Result<()> {
    let io = |e: std::io::Error| Error::Format(e.to_string());
    let dim = |n: usize| u32::try_from(n).map_err(|_| Error::Format(format!("dimension {n} exceeds u32")));
    w.write_all(DDG1_MAGIC).map_err(io)?;
    w.write_all(&dim(grid.delay_bins())?.to_le_bytes()).map_err(io)?;
    w.write_all(&dim(grid.doppler_bins())?.to_le_bytes()).map_err(io)?;
    w.write_all(&0u32.to_le_bytes()).map_err(io)?;
    for v in grid.as_slice() {
        w.write_all(&v.re.to_le_bytes()).map_err(io)?;
        w.write_all(&v.im.to_le_bytes()).map_err(io)?;
    }
    Ok(())
}

pub fn read_ddg1<R: Read>(mut r: R) -> Result<DdGrid<f64>> {
    let mut header = [0u8; 16];
    r.read_exact(&mut header)
        .map_err(|e| Error::Format(format!("header: {e}")))?;
    if &header[..4] != DDG1_MAGIC {
        return Err(Error::Format("bad magic, expected DDG1".into()));
    }
    let word = |i: usize| u32::from_le_bytes(header[i..i + 4].try_into().expect("4 bytes")) as usize;
    let (k, m) = (word(4), word(8));
    let n = k
        .checked_mul(m)
        .ok_or_else(|| Error::Format("grid size overflows".into()))?;
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)
        .map_err(|e| Error::Format(e.to_string()))?;
    if bytes.len() != n * 16 {
        return Err(Error::Format(format!(
            "expected {} payload bytes for {k}x{m}, found {}",
            n * 16,
            bytes.len()
        )));
    }
    let f = |c: &[u8]| f64::from_le_bytes(c.try_into().expect("8 bytes"));
    let data = bytes.chunks_exact(16).map(|c| C::new(f(&c[..8]), f(&c[8..]))).collect();
    DdGrid::new(k, m, data)
}
