//! Grid function files: a plain-text descriptor plus a data file.
//!
//! The descriptor is one `key: value` pair per line:
//!
//! ```text
//! format: binary
//! space: physical
//! dims: 64 32
//! extents: 8 4
//! data: sample.bin
//! ```
//!
//! `binary` data is interleaved little-endian `f64` (re, im) pairs in flat
//! grid order; `csv` data has a `re,im` header and one sample per line.
//! Floats are written in shortest round-trip form, so both formats are
//! bit-exact.

use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use super::grid::{Grid, GridFunction, Space};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataFormat {
    Binary,
    Csv,
}

impl DataFormat {
    fn as_str(self) -> &'static str {
        match self {
            DataFormat::Binary => "binary",
            DataFormat::Csv => "csv",
        }
    }

    fn extension(self) -> &'static str {
        match self {
            DataFormat::Binary => "bin",
            DataFormat::Csv => "csv",
        }
    }
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

/// Descriptor text for `f` pointing at `data_file`.
pub fn descriptor_text(f: &GridFunction, format: DataFormat, data_file: &str) -> String {
    format!(
        "format: {}\nspace: {}\ndims: {}\nextents: {}\ndata: {}\n",
        format.as_str(),
        f.space().as_str(),
        join(f.dims()),
        join(f.extents()),
        data_file
    )
}

/// Writes `<base>.desc` and `<base>.bin` / `<base>.csv`; returns the
/// descriptor path.
pub fn write_grid_function(base: &Path, f: &GridFunction, format: DataFormat) -> Result<PathBuf> {
    let data_path = base.with_extension(format.extension());
    let desc_path = base.with_extension("desc");
    let data_name = data_path
        .file_name()
        .and_then(|s| s.to_str())
        .ok_or_else(|| Error::Io(format!("bad output path {}", base.display())))?
        .to_string();
    match format {
        DataFormat::Binary => {
            let mut bytes = Vec::with_capacity(16 * f.len());
            for v in f.values() {
                bytes.extend_from_slice(&v.re.to_le_bytes());
                bytes.extend_from_slice(&v.im.to_le_bytes());
            }
            fs::write(&data_path, bytes)?;
        }
        DataFormat::Csv => {
            let mut s = String::from("re,im\n");
            for v in f.values() {
                s.push_str(&format!("{:?},{:?}\n", v.re, v.im));
            }
            fs::write(&data_path, s)?;
        }
    }
    fs::write(&desc_path, descriptor_text(f, format, &data_name))?;
    Ok(desc_path)
}

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// Parsed descriptor fields.
#[derive(Debug, Clone, PartialEq)]
pub struct Descriptor {
    pub format: DataFormat,
    pub space: Space,
    pub grid: Grid,
    pub data: String,
}

pub fn parse_descriptor(text: &str) -> Result<Descriptor> {
    let mut kv = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once(':')
            .ok_or_else(|| parse_err(format!("line {}: expected `key: value`", lineno + 1)))?;
        if kv.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
            return Err(parse_err(format!("duplicate key `{}`", k.trim())));
        }
    }
    let get = |k: &str| kv.get(k).ok_or_else(|| parse_err(format!("missing key `{k}`")));
    let format = match get("format")?.as_str() {
        "binary" => DataFormat::Binary,
        "csv" => DataFormat::Csv,
        other => return Err(parse_err(format!("unknown format `{other}`"))),
    };
    let space = match get("space")?.as_str() {
        "physical" => Space::Physical,
        "frequency" => Space::Frequency,
        other => return Err(parse_err(format!("unknown space `{other}`"))),
    };
    let dims = get("dims")?
        .split_whitespace()
        .map(|s| s.parse::<usize>().map_err(|e| parse_err(format!("dims: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    let extents = get("extents")?
        .split_whitespace()
        .map(|s| s.parse::<f64>().map_err(|e| parse_err(format!("extents: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    let grid = Grid::new(dims, extents).map_err(|e| parse_err(format!("grid: {e}")))?;
    Ok(Descriptor {
        format,
        space,
        grid,
        data: get("data")?.clone(),
    })
}

/// Reads a grid function from its descriptor path.
pub fn read_grid_function(desc_path: &Path) -> Result<GridFunction> {
    let desc = parse_descriptor(&fs::read_to_string(desc_path)?)?;
    let data_path = desc_path
        .parent()
        .unwrap_or_else(|| Path::new("."))
        .join(&desc.data);
    let n = desc.grid.len();
    let values = match desc.format {
        DataFormat::Binary => {
            let bytes = fs::read(&data_path)?;
            if bytes.len() != 16 * n {
                return Err(parse_err(format!(
                    "data file has {} bytes, expected {}",
                    bytes.len(),
                    16 * n
                )));
            }
            bytes
                .chunks_exact(16)
                .map(|c| {
                    let re = f64::from_le_bytes(c[..8].try_into().unwrap());
                    let im = f64::from_le_bytes(c[8..].try_into().unwrap());
                    Complex64::new(re, im)
                })
                .collect()
        }
        DataFormat::Csv => {
            let text = fs::read_to_string(&data_path)?;
            let mut lines = text.lines();
            if lines.next().map(str::trim) != Some("re,im") {
                return Err(parse_err("csv data must start with `re,im`"));
            }
            let vals = lines
                .filter(|l| !l.trim().is_empty())
                .map(|l| {
                    let (re, im) = l
                        .split_once(',')
                        .ok_or_else(|| parse_err(format!("bad csv row `{l}`")))?;
                    let re = re.trim().parse::<f64>().map_err(|e| parse_err(e.to_string()))?;
                    let im = im.trim().parse::<f64>().map_err(|e| parse_err(e.to_string()))?;
                    Ok(Complex64::new(re, im))
                })
                .collect::<Result<Vec<_>>>()?;
            if vals.len() != n {
                return Err(parse_err(format!("csv has {} rows, expected {n}", vals.len())));
            }
            vals
        }
    };
    GridFunction::new(desc.grid, desc.space, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptor_errors() {
        assert!(parse_descriptor("format: binary\nspace: physical\ndims: 4 4\nextents: 1\ndata: x").is_err());
        assert!(parse_descriptor("format: binary\nspace: sideways\ndims: 4\nextents: 1\ndata: x").is_err());
        assert!(parse_descriptor("format: binary\nspace: physical\ndims: 4\nextents: 1").is_err());
        assert!(parse_descriptor("garbage").is_err());
        let d = parse_descriptor("format: csv\nspace: frequency\ndims: 4 6\nextents: 1 2.5\ndata: x.csv\n").unwrap();
        assert_eq!(d.grid.dims(), &[4, 6]);
        assert_eq!(d.space, Space::Frequency);
    }
}
