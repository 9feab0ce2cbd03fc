//! Scan and label files.
//!
//! Binary scans are headerless runs of 16-byte records, each four
//! little-endian `f32` values `x y z reflectivity` (the KITTI velodyne
//! layout). Label sidecars hold one byte per point (`0` lost, `1` scattered,
//! `2` original). The text format has one `x y z r` line per point.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::augment::{Label, PointRecord};
use crate::error::{Error, Result};

pub const RECORD_BYTES: usize = 16;
/// Extension of label sidecar files.
pub const LABEL_EXTENSION: &str = "label";

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScanBuffer {
    pub points: Vec<PointRecord>,
}

impl ScanBuffer {
    pub fn new(points: Vec<PointRecord>) -> Self {
        ScanBuffer { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn from_bytes(bytes: &[u8], path: &Path) -> Result<Self> {
        if !bytes.len().is_multiple_of(RECORD_BYTES) {
            return Err(Error::Format {
                path: path.to_owned(),
                len: bytes.len() as u64,
                record: RECORD_BYTES,
            });
        }
        let mut points = Vec::with_capacity(bytes.len() / RECORD_BYTES);
        for (index, rec) in bytes.chunks_exact(RECORD_BYTES).enumerate() {
            let f = |i: usize| f32::from_le_bytes(rec[4 * i..4 * i + 4].try_into().unwrap());
            let p = PointRecord::new(f(0), f(1), f(2), f(3));
            if ![p.x, p.y, p.z, p.reflectivity].iter().all(|v| v.is_finite()) {
                return Err(Error::Data {
                    path: path.to_owned(),
                    index,
                    reason: "non-finite value".into(),
                });
            }
            points.push(p);
        }
        Ok(ScanBuffer { points })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.points.len() * RECORD_BYTES);
        for p in &self.points {
            for v in [p.x, p.y, p.z, p.reflectivity] {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    /// First point whose reflectivity lies outside [0, 1].
    pub fn check_reflectivity(&self, path: &Path) -> Result<()> {
        match self
            .points
            .iter()
            .position(|p| !(0.0..=1.0).contains(&p.reflectivity))
        {
            None => Ok(()),
            Some(index) => Err(Error::Data {
                path: path.to_owned(),
                index,
                reason: format!(
                    "reflectivity {} outside [0, 1]",
                    self.points[index].reflectivity
                ),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LabelBuffer {
    pub labels: Vec<Label>,
}

impl LabelBuffer {
    pub fn to_bytes(&self) -> Vec<u8> {
        self.labels.iter().map(|&l| l as u8).collect()
    }
}

impl FromIterator<Label> for LabelBuffer {
    fn from_iter<I: IntoIterator<Item = Label>>(iter: I) -> Self {
        LabelBuffer {
            labels: iter.into_iter().collect(),
        }
    }
}

pub fn read_scan(path: impl AsRef<Path>) -> Result<ScanBuffer> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    ScanBuffer::from_bytes(&bytes, path)
}

pub fn write_scan(scan: &ScanBuffer, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, scan.to_bytes()).map_err(|e| Error::io(path, e))
}

pub fn write_labels(labels: &LabelBuffer, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, labels.to_bytes()).map_err(|e| Error::io(path, e))
}

pub fn read_labels(path: impl AsRef<Path>) -> Result<LabelBuffer> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    bytes
        .iter()
        .enumerate()
        .map(|(index, &b)| {
            Label::from_u8(b).ok_or_else(|| Error::Data {
                path: path.to_owned(),
                index,
                reason: format!("invalid label byte {b}"),
            })
        })
        .collect::<Result<Vec<_>>>()
        .map(|labels| LabelBuffer { labels })
}

pub fn read_scan_text(path: impl AsRef<Path>) -> Result<ScanBuffer> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut points = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let index = points.len();
        let bad = |reason: String| Error::Data {
            path: path.to_owned(),
            index,
            reason,
        };
        let vals: Vec<f32> = line
            .split_whitespace()
            .map(|t| t.parse::<f32>().map_err(|e| bad(format!("{t:?}: {e}"))))
            .collect::<Result<_>>()?;
        if vals.len() != 4 {
            return Err(bad(format!("expected 4 values, found {}", vals.len())));
        }
        if !vals.iter().all(|v| v.is_finite()) {
            return Err(bad("non-finite value".into()));
        }
        points.push(PointRecord::new(vals[0], vals[1], vals[2], vals[3]));
    }
    Ok(ScanBuffer { points })
}

pub fn write_scan_text(scan: &ScanBuffer, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for p in &scan.points {
        // `{}` on f32 prints the shortest string that parses back exactly.
        writeln!(w, "{} {} {} {}", p.x, p.y, p.z, p.reflectivity).map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
