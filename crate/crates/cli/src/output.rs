//! Deterministic file emission: CSV tables, PGM heatmaps and the manifest.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

/// Writes `bytes` to a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(tmp.path(), e))?;
    tmp.as_file().sync_all().map_err(|e| CliError::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

/// Shortest decimal string that parses back to the same `f64`.
pub fn format_number(v: f64) -> String {
    format!("{v:?}")
}

/// A cell of a CSV table.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format_number(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

/// Column-labelled table; headers carry units in brackets.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width must match the header");
        self.rows.push(row);
    }

    /// RFC 4180: CRLF records, quoting only where required.
    pub fn to_csv(&self) -> CliResult<Vec<u8>> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .quote_style(csv::QuoteStyle::Necessary)
            .from_writer(Vec::new());
        let err = |e: csv::Error| CliError::Output(e.to_string());
        w.write_record(&self.header).map_err(err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).map_err(err)?;
        }
        w.into_inner().map_err(|e| CliError::Output(e.to_string()))
    }
}

/// Dense row-major 2-D table with optional masked cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2Table {
    pub width: usize,
    pub height: usize,
    pub values: Vec<Option<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatmapScale {
    pub min: f64,
    pub max: f64,
    pub masked: usize,
}

/// Mid-scale pixel value used when every unmasked cell is equal.
pub const FLAT_LEVEL: u16 = 32768;

/// Renders the table as a 16-bit binary PGM (P5, big-endian samples).
///
/// Values map linearly from `[min, max]` onto `[0, 65535]`; masked cells take
/// the minimum level.
pub fn render_heatmap(table: &Grid2Table) -> CliResult<(Vec<u8>, HeatmapScale)> {
    if table.width == 0 || table.height == 0 || table.values.is_empty() {
        return Err(CliError::Output("heatmap table is empty".into()));
    }
    if table.values.len() != table.width * table.height {
        return Err(CliError::Output(format!(
            "heatmap holds {} cells, expected {}x{}",
            table.values.len(),
            table.width,
            table.height
        )));
    }
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut masked = 0;
    for v in &table.values {
        match v {
            Some(v) if v.is_finite() => {
                min = min.min(*v);
                max = max.max(*v);
            }
            Some(v) => return Err(CliError::Output(format!("heatmap value {v} is not finite"))),
            None => masked += 1,
        }
    }
    if masked == table.values.len() {
        return Err(CliError::Output("heatmap has no unmasked cells".into()));
    }
    let mut out = format!("P5\n{} {}\n65535\n", table.width, table.height).into_bytes();
    out.reserve(2 * table.values.len());
    let span = max - min;
    for v in &table.values {
        let level = match v {
            None => 0,
            Some(_) if span == 0.0 => FLAT_LEVEL,
            Some(v) => ((v - min) / span * 65535.0).round() as u16,
        };
        out.extend_from_slice(&level.to_be_bytes());
    }
    Ok((out, HeatmapScale { min, max, masked }))
}

/// Writes `<path>` and the sidecar `<stem>.scale.json`. Returns both paths.
pub fn emit_heatmap(table: &Grid2Table, path: &Path) -> CliResult<(PathBuf, PathBuf)> {
    let (bytes, scale) = render_heatmap(table)?;
    write_atomic(path, &bytes)?;
    let sidecar = path.with_extension("scale.json");
    write_atomic(&sidecar, &to_json(&scale)?)?;
    Ok((path.to_path_buf(), sidecar))
}

pub(crate) fn to_json<T: Serialize>(v: &T) -> CliResult<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(v).map_err(|e| CliError::Output(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub name: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub scenario: String,
    pub seed: u64,
    pub parameters: serde_json::Value,
    #[serde(default)]
    pub results: serde_json::Map<String, serde_json::Value>,
    #[serde(default)]
    pub warnings: Vec<String>,
    pub files: Vec<FileEntry>,
}

pub const MANIFEST_NAME: &str = "manifest.json";

/// Re-hashes every file listed in `dir/manifest.json`; returns the names
/// that are missing or whose contents differ.
pub fn verify_manifest(dir: &Path) -> CliResult<Vec<String>> {
    let path = dir.join(MANIFEST_NAME);
    let text = fs::read(&path).map_err(|e| CliError::io(&path, e))?;
    let manifest: Manifest = serde_json::from_slice(&text).map_err(|e| CliError::Output(e.to_string()))?;
    let mut bad = Vec::new();
    for f in &manifest.files {
        match fs::read(dir.join(&f.name)) {
            Ok(bytes) if sha256_hex(&bytes) == f.sha256 && bytes.len() as u64 == f.bytes => {}
            _ => bad.push(f.name.clone()),
        }
    }
    Ok(bad)
}
