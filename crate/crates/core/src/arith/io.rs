//! `MLTB` table files.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! offset  size  field
//! 0       4     magic "MLTB"
//! 4       1     version (0x01)
//! 5       1     function id (0 = μ, 1 = λ, 2 = μ²)
//! 6       8     start (u64)
//! 14      8     length (u64)
//! 22      len   values, one signed byte each
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{ArithFn, ArithmeticTable};
use crate::{Error, Result};

pub const TABLE_MAGIC: [u8; 4] = *b"MLTB";
pub const TABLE_VERSION: u8 = 0x01;

pub fn write_table<W: Write>(mut w: W, table: &ArithmeticTable) -> Result<()> {
    w.write_all(&TABLE_MAGIC)?;
    w.write_all(&[TABLE_VERSION, table.function().id()])?;
    w.write_all(&table.start().to_le_bytes())?;
    w.write_all(&(table.len() as u64).to_le_bytes())?;
    let bytes: Vec<u8> = table.values().iter().map(|&v| v as u8).collect();
    w.write_all(&bytes)?;
    w.flush()?;
    Ok(())
}

pub fn read_table<R: Read>(mut r: R) -> Result<ArithmeticTable> {
    let mut header = [0u8; 22];
    r.read_exact(&mut header)
        .map_err(|e| Error::Format(format!("truncated header: {e}")))?;
    if header[..4] != TABLE_MAGIC {
        return Err(Error::Format(format!("bad magic {:?}", &header[..4])));
    }
    if header[4] != TABLE_VERSION {
        return Err(Error::Format(format!("unsupported version {}", header[4])));
    }
    let function = ArithFn::from_id(header[5])
        .ok_or_else(|| Error::Format(format!("unknown function id {}", header[5])))?;
    let start = u64::from_le_bytes(header[6..14].try_into().unwrap());
    let length = u64::from_le_bytes(header[14..22].try_into().unwrap());
    let len = usize::try_from(length)
        .map_err(|_| Error::Format(format!("length {length} does not fit in memory")))?;

    let mut bytes = Vec::new();
    r.by_ref().take(length).read_to_end(&mut bytes)?;
    if bytes.len() != len {
        return Err(Error::Format(format!(
            "expected {length} values, found {}",
            bytes.len()
        )));
    }
    let mut probe = [0u8; 1];
    if r.read(&mut probe)? != 0 {
        return Err(Error::Format("trailing bytes after values".into()));
    }
    let values = bytes.into_iter().map(|b| b as i8).collect();
    ArithmeticTable::new(function, start, values).map_err(|e| Error::Format(e.to_string()))
}

pub fn save_table(path: impl AsRef<Path>, table: &ArithmeticTable) -> Result<()> {
    write_table(BufWriter::new(File::create(path)?), table)
}

pub fn load_table(path: impl AsRef<Path>) -> Result<ArithmeticTable> {
    read_table(BufReader::new(File::open(path)?))
}
