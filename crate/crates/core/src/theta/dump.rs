use std::io::{Read, Write};

use super::CoeffTable;
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"THET";
const VERSION: u16 = 1;
/// Stored for values that do not fit (or are undefined); recompute with
/// `theta_single`.
pub const DUMP_SENTINEL: i32 = 0x7FFF_FFFF;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DumpHeader {
    pub version: u16,
    pub label: u8,
    pub start: u64,
    pub count: u64,
}

pub fn write_dump<W: Write>(mut w: W, label: u8, table: &CoeffTable) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&[label])?;
    w.write_all(&table.start.to_le_bytes())?;
    w.write_all(&(table.values.len() as u64).to_le_bytes())?;
    let mut buf = Vec::with_capacity(table.values.len() * 4);
    for &v in &table.values {
        let x = match i32::try_from(v) {
            Ok(x) if x != DUMP_SENTINEL => x,
            _ => DUMP_SENTINEL,
        };
        buf.extend_from_slice(&x.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_dump<R: Read>(mut r: R) -> Result<(DumpHeader, CoeffTable)> {
    let mut head = [0u8; 23];
    r.read_exact(&mut head)?;
    if &head[..4] != MAGIC {
        return Err(Error::Format("missing THET magic".into()));
    }
    let version = u16::from_le_bytes([head[4], head[5]]);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported dump version {version}")));
    }
    let header = DumpHeader {
        version,
        label: head[6],
        start: u64::from_le_bytes(head[7..15].try_into().unwrap()),
        count: u64::from_le_bytes(head[15..23].try_into().unwrap()),
    };
    let mut body = Vec::new();
    r.read_to_end(&mut body)?;
    if body.len() as u64 != header.count * 4 {
        return Err(Error::Format(format!(
            "expected {} coefficient bytes, found {}",
            header.count * 4,
            body.len()
        )));
    }
    let values = body
        .chunks_exact(4)
        .map(|c| match i32::from_le_bytes(c.try_into().unwrap()) {
            DUMP_SENTINEL => CoeffTable::UNDEFINED,
            x => x as i64,
        })
        .collect();
    Ok((
        header,
        CoeffTable {
            start: header.start,
            values,
        },
    ))
}
