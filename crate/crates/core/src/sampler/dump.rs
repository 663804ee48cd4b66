//! Sample dumps.
//!
//! Binary layout: the 8 bytes `TAUSAMP1`, a little-endian `u32` header
//! length, the JSON header, then the draws as little-endian `f64`.
//! CSV layout: one `# ` comment line carrying the same JSON header, a
//! `tau` column title, then one draw per line.
//! JSON layout: `{"header": {...}, "samples": [...]}`.

use std::io::{BufRead, Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const BINARY_MAGIC: &[u8; 8] = b"TAUSAMP1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleFormat {
    Csv,
    Json,
    Bin,
}

impl FromStr for SampleFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(SampleFormat::Csv),
            "json" => Ok(SampleFormat::Json),
            "bin" | "binary" => Ok(SampleFormat::Bin),
            other => Err(Error::InvalidArgument(format!("unknown format '{other}'"))),
        }
    }
}

/// Provenance of a dump: enough to regenerate it bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleHeader {
    pub schema_version: u32,
    pub alpha: f64,
    pub rho: f64,
    pub form: String,
    pub seed: u64,
    pub n: u64,
    pub level: f64,
    pub block_size: u64,
}

pub fn write_binary<W: Write>(mut w: W, header: &SampleHeader, values: &[f64]) -> Result<()> {
    let json = serde_json::to_vec(header).expect("header serializes");
    w.write_all(BINARY_MAGIC)?;
    w.write_all(&(json.len() as u32).to_le_bytes())?;
    w.write_all(&json)?;
    for v in values {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(w.flush()?)
}

pub fn read_binary<R: Read>(mut r: R) -> Result<(SampleHeader, Vec<f64>)> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != BINARY_MAGIC {
        return Err(Error::InvalidArgument("not a sample dump (bad magic)".into()));
    }
    let mut len = [0u8; 4];
    r.read_exact(&mut len)?;
    let mut json = vec![0u8; u32::from_le_bytes(len) as usize];
    r.read_exact(&mut json)?;
    let header: SampleHeader =
        serde_json::from_slice(&json).map_err(|e| Error::InvalidArgument(format!("header: {e}")))?;
    let mut rest = Vec::new();
    r.read_to_end(&mut rest)?;
    if rest.len() % 8 != 0 {
        return Err(Error::InvalidArgument("truncated sample payload".into()));
    }
    let values = rest
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    Ok((header, values))
}

pub fn write_csv<W: Write>(mut w: W, header: &SampleHeader, values: &[f64]) -> Result<()> {
    let json = serde_json::to_string(header).expect("header serializes");
    writeln!(w, "# {json}")?;
    writeln!(w, "tau")?;
    for v in values {
        writeln!(w, "{v:e}")?;
    }
    Ok(w.flush()?)
}

#[derive(Serialize, Deserialize)]
struct JsonDump {
    header: SampleHeader,
    samples: Vec<f64>,
}

pub fn write_json<W: Write>(mut w: W, header: &SampleHeader, values: &[f64]) -> Result<()> {
    let dump = JsonDump {
        header: header.clone(),
        samples: values.to_vec(),
    };
    serde_json::to_writer(&mut w, &dump).map_err(|e| Error::InvalidArgument(format!("json: {e}")))?;
    writeln!(w)?;
    Ok(w.flush()?)
}

pub fn read_json<R: Read>(r: R) -> Result<(SampleHeader, Vec<f64>)> {
    let dump: JsonDump = serde_json::from_reader(r).map_err(|e| Error::InvalidArgument(format!("json: {e}")))?;
    Ok((dump.header, dump.samples))
}

/// Parses a CSV dump written by [`write_csv`].
pub fn read_csv<R: BufRead>(r: R) -> Result<(SampleHeader, Vec<f64>)> {
    let mut lines = r.lines();
    let first = lines
        .next()
        .ok_or_else(|| Error::InvalidArgument("empty file".into()))??;
    let json = first
        .strip_prefix("# ")
        .ok_or_else(|| Error::InvalidArgument("missing header line".into()))?;
    let header: SampleHeader =
        serde_json::from_str(json).map_err(|e| Error::InvalidArgument(format!("header: {e}")))?;
    let mut values = Vec::new();
    for line in lines.skip(1) {
        let line = line?;
        values.push(
            line.trim()
                .parse()
                .map_err(|e| Error::InvalidArgument(format!("value '{line}': {e}")))?,
        );
    }
    Ok((header, values))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header() -> SampleHeader {
        SampleHeader {
            schema_version: 1,
            alpha: 1.5,
            rho: 0.4,
            form: "rk".into(),
            seed: 7,
            n: 3,
            level: 1.0,
            block_size: 16384,
        }
    }

    #[test]
    fn binary_round_trip() {
        let vals = [0.25, 1e-300, 7.5e12];
        let mut buf = Vec::new();
        write_binary(&mut buf, &header(), &vals).unwrap();
        assert_eq!(&buf[..8], BINARY_MAGIC);
        let (h, v) = read_binary(buf.as_slice()).unwrap();
        assert_eq!(h, header());
        assert_eq!(v, vals);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let vals = [0.1 + 0.2, std::f64::consts::PI, 1e-17];
        let mut buf = Vec::new();
        write_csv(&mut buf, &header(), &vals).unwrap();
        let (h, v) = read_csv(buf.as_slice()).unwrap();
        assert_eq!(h, header());
        assert_eq!(v, vals);
    }

    #[test]
    fn json_round_trip_is_exact() {
        let vals = [0.1 + 0.2, 2.5e-310, 1e300];
        let mut buf = Vec::new();
        write_json(&mut buf, &header(), &vals).unwrap();
        let (h, v) = read_json(buf.as_slice()).unwrap();
        assert_eq!(h, header());
        assert_eq!(v, vals);
    }

    #[test]
    fn bad_magic() {
        assert!(read_binary(&b"NOTADUMP\0\0\0\0"[..]).is_err());
    }
}
