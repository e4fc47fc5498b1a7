//! File formats for dictionaries and signals.
//!
//! Binary dictionary layout (all little-endian):
//!
//! ```text
//! offset  size  field
//! 0       4     magic "SPCD"
//! 4       4     version (u32, currently 1)
//! 8       4     N rows (u32)
//! 12      4     M columns (u32)
//! 16      8·N·M entries as f64, row-major
//! ```
//!
//! CSV dictionaries have one matrix row per line and no header. Signals are
//! plain text: numbers separated by commas, whitespace or newlines.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::Dictionary;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"SPCD";
pub const FORMAT_VERSION: u32 = 1;
const HEADER_LEN: usize = 16;

pub fn write_dictionary_binary<W: Write>(dict: &Dictionary, mut w: W) -> Result<()> {
    let to_u32 = |v: usize| {
        u32::try_from(v).map_err(|_| Error::InvalidArgument(format!("dimension {v} exceeds u32")))
    };
    w.write_all(MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    w.write_all(&to_u32(dict.n())?.to_le_bytes())?;
    w.write_all(&to_u32(dict.m())?.to_le_bytes())?;
    for v in dict.as_row_major() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_dictionary_binary<R: Read>(mut r: R) -> Result<Dictionary> {
    let mut header = [0u8; HEADER_LEN];
    r.read_exact(&mut header)
        .map_err(|_| Error::Format("dictionary file shorter than its header".into()))?;
    if &header[0..4] != MAGIC {
        return Err(Error::Format("missing SPCD magic".into()));
    }
    let field = |i: usize| u32::from_le_bytes(header[i..i + 4].try_into().expect("4-byte slice"));
    let version = field(4);
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported dictionary version {version}")));
    }
    let (n, m) = (field(8) as usize, field(12) as usize);
    let count = n
        .checked_mul(m)
        .ok_or_else(|| Error::Format(format!("dimensions {n}x{m} overflow")))?;

    let mut payload = Vec::new();
    r.read_to_end(&mut payload)?;
    if payload.len() != count * 8 {
        return Err(Error::Format(format!(
            "expected {} bytes of entries for {n}x{m}, found {}",
            count * 8,
            payload.len()
        )));
    }
    let data = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    Dictionary::from_row_major(n, m, data).map_err(|e| Error::Format(e.to_string()))
}

pub fn read_dictionary_csv<R: Read>(r: R) -> Result<Dictionary> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(r);
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Format(format!("CSV row {}: {e}", i + 1)))?;
        let row = record
            .iter()
            .map(|field| {
                field
                    .parse::<f64>()
                    .map_err(|_| Error::Format(format!("CSV row {}: bad number {field:?}", i + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Format("empty dictionary CSV".into()));
    }
    Dictionary::from_rows(&rows).map_err(|e| Error::Format(e.to_string()))
}

pub fn write_dictionary_csv<W: Write>(dict: &Dictionary, w: W) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    for i in 0..dict.n() {
        writer
            .write_record(dict.row(i).iter().map(|v| v.to_string()))
            .map_err(|e| Error::Format(e.to_string()))?;
    }
    writer.flush()?;
    Ok(())
}

/// Loads a dictionary, choosing CSV for `.csv` files and the binary format
/// otherwise.
pub fn load_dictionary(path: &Path) -> Result<Dictionary> {
    let file = BufReader::new(File::open(path)?);
    if is_csv(path) {
        read_dictionary_csv(file)
    } else {
        read_dictionary_binary(file)
    }
}

pub fn save_dictionary(dict: &Dictionary, path: &Path) -> Result<()> {
    let file = BufWriter::new(File::create(path)?);
    if is_csv(path) {
        write_dictionary_csv(dict, file)
    } else {
        write_dictionary_binary(dict, file)
    }
}

fn is_csv(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

pub fn parse_signal(text: &str) -> Result<Vec<f64>> {
    text.lines()
        .map(|line| line.split('#').next().unwrap_or(""))
        .flat_map(|line| line.split(|c: char| c == ',' || c.is_whitespace()))
        .filter(|tok| !tok.is_empty())
        .map(|tok| {
            tok.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Format(format!("bad signal value {tok:?}")))
        })
        .collect()
}

/// One value per line, shortest round-trip formatting.
pub fn format_signal(x: &[f64]) -> String {
    let mut out = String::with_capacity(x.len() * 20);
    for v in x {
        out.push_str(&v.to_string());
        out.push('\n');
    }
    out
}

pub fn load_signal(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)?;
    let x = parse_signal(&text)?;
    if x.is_empty() {
        return Err(Error::Format(format!("{} contains no samples", path.display())));
    }
    Ok(x)
}
