//! Binary field container.
//!
//! All integers and floats are little-endian:
//!
//! | bytes        | content                                   |
//! |--------------|-------------------------------------------|
//! | 4            | magic `GSPF`                              |
//! | 4            | format version, `u32` = 1                 |
//! | 4            | number of axes `D`, `u32`                 |
//! | 4            | boundary, `u32`: 0 periodic, 1 strict     |
//! | 8 D          | extents, `u64` each                       |
//! | 8 D          | grid constants, `f64` each                |
//! | 8 prod(dims) | samples, `f64`, row-major, last axis fastest |

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::{Boundary, GridField};

pub const MAGIC: &[u8; 4] = b"GSPF";
pub const VERSION: u32 = 1;

pub fn encode_field(field: &GridField) -> Vec<u8> {
    let ndim = field.ndim();
    let mut out = Vec::with_capacity(16 + 16 * ndim + 8 * field.data().len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(ndim as u32).to_le_bytes());
    let boundary: u32 = match field.boundary() {
        Boundary::Periodic => 0,
        Boundary::Strict => 1,
    };
    out.extend_from_slice(&boundary.to_le_bytes());
    for &d in field.dims() {
        out.extend_from_slice(&(d as u64).to_le_bytes());
    }
    for &h in field.h() {
        out.extend_from_slice(&h.to_le_bytes());
    }
    for &v in field.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take<const N: usize>(&mut self, what: &str) -> Result<[u8; N]> {
        if self.bytes.len() < N {
            return Err(Error::Format(format!("truncated while reading {what}")));
        }
        let (head, rest) = self.bytes.split_at(N);
        self.bytes = rest;
        Ok(head.try_into().expect("length checked"))
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        self.take::<4>(what).map(u32::from_le_bytes)
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        self.take::<8>(what).map(u64::from_le_bytes)
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        self.take::<8>(what).map(f64::from_le_bytes)
    }
}

pub fn decode_field(bytes: &[u8]) -> Result<GridField> {
    let mut r = Reader { bytes };
    if &r.take::<4>("magic")? != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let version = r.u32("version")?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let ndim = r.u32("axis count")? as usize;
    let boundary = match r.u32("boundary")? {
        0 => Boundary::Periodic,
        1 => Boundary::Strict,
        other => return Err(Error::Format(format!("unknown boundary code {other}"))),
    };
    let dims = (0..ndim)
        .map(|_| {
            let d = r.u64("extent")?;
            usize::try_from(d).map_err(|_| Error::Format(format!("extent {d} too large")))
        })
        .collect::<Result<Vec<_>>>()?;
    let h = (0..ndim).map(|_| r.f64("grid constant")).collect::<Result<Vec<_>>>()?;
    let total = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| Error::Format("sample count overflows".into()))?;
    if r.bytes.len() != total.saturating_mul(8) {
        return Err(Error::Format(format!(
            "expected {total} samples, found {} bytes",
            r.bytes.len()
        )));
    }
    let data = r
        .bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    GridField::new(dims, h, data, boundary)
}

pub fn write_field(path: impl AsRef<Path>, field: &GridField) -> Result<()> {
    fs::write(path, encode_field(field))?;
    Ok(())
}

pub fn read_field(path: impl AsRef<Path>) -> Result<GridField> {
    decode_field(&fs::read(path)?)
}
