//! Deterministic artifact writing: every float is printed with 17
//! significant digits, and the manifest records each file's SHA-256.

use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use sha2::{Digest, Sha256};

/// Pretty JSON whose floats are written as `{:.16e}`.
struct FixedFloat<'a>(PrettyFormatter<'a>);

impl Formatter for FixedFloat<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        write!(w, "{}", float(v))
    }
    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, v as f64)
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedFloat(PrettyFormatter::new()));
    value
        .serialize(&mut ser)
        .expect("serializing plain data into memory cannot fail");
    out.push(b'\n');
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// A numeric table emitted either as CSV or as `{columns, rows}` JSON.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(u64),
    Float(f64),
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory csv");
        for row in &self.rows {
            w.write_record(row.iter().map(|c| match *c {
                Cell::Int(i) => i.to_string(),
                Cell::Float(f) => float(f),
            }))
            .expect("in-memory csv");
        }
        w.into_inner().expect("in-memory csv")
    }

    /// File name with the extension matching `format`, and its bytes.
    pub fn render(&self, stem: &str, format: Format) -> Artifact {
        match format {
            Format::Csv => Artifact::new(format!("{stem}.csv"), self.to_csv()),
            Format::Json => Artifact::new(format!("{stem}.json"), to_json(self)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn new(name: impl Into<String>, bytes: Vec<u8>) -> Self {
        Artifact {
            name: name.into(),
            bytes,
        }
    }

    pub fn json<T: Serialize>(name: impl Into<String>, value: &T) -> Self {
        Artifact::new(name, to_json(value))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Serialize)]
struct ManifestEntry<'a> {
    file: &'a str,
    bytes: usize,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    files: Vec<ManifestEntry<'a>>,
}

/// Writes the artifacts followed by `manifest.json` listing all of them.
pub fn write_all(dir: &Path, artifacts: &[Artifact]) -> io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut entries: Vec<ManifestEntry<'_>> = artifacts
        .iter()
        .map(|a| ManifestEntry {
            file: &a.name,
            bytes: a.bytes.len(),
            sha256: sha256_hex(&a.bytes),
        })
        .collect();
    entries.sort_by(|a, b| a.file.cmp(b.file));
    for a in artifacts {
        std::fs::write(dir.join(&a.name), &a.bytes)?;
    }
    std::fs::write(dir.join("manifest.json"), to_json(&Manifest { files: entries }))
}
