//! Score CSV and threshold files.
//!
//! Score table: optional `# ` comment lines, then the header
//! `frame_id,label,score_rec,score_energy` and one row per frame with
//! floats in 9-significant-digit scientific notation. Threshold file: one
//! line `kind,quantile,tau`.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::{ScoreKind, ScoreRecord, Threshold};
use crate::error::{Error, Result};
use crate::io::{create_file, open_file};
use crate::radar::SceneLabel;

pub const SCORE_HEADER: &str = "frame_id,label,score_rec,score_energy";

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    /// Comment lines without the leading `# `.
    pub comments: Vec<String>,
    pub records: Vec<ScoreRecord>,
}

fn sci(v: f64) -> String {
    format!("{v:.8e}")
}

pub fn write_scores<W: Write>(
    records: &[ScoreRecord],
    comments: &[String],
    mut w: W,
) -> std::io::Result<()> {
    for c in comments {
        writeln!(w, "# {c}")?;
    }
    writeln!(w, "{SCORE_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{}",
            r.frame_id,
            r.label,
            sci(r.s_rec),
            sci(r.s_energy)
        )?;
    }
    w.flush()
}

fn parse_f64(field: &str, line: usize) -> Result<f64> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::Format(format!("line {line}: bad number {field:?}")))
}

pub fn read_scores<R: Read>(r: R) -> Result<ScoreTable> {
    let mut comments = Vec::new();
    let mut records = Vec::new();
    let mut header_seen = false;
    for (i, line) in BufReader::new(r).lines().enumerate() {
        let line = line.map_err(|e| Error::Format(format!("score table unreadable: {e}")))?;
        let n = i + 1;
        if let Some(c) = line.strip_prefix('#') {
            comments.push(c.trim_start().to_string());
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        if !header_seen {
            if line.trim() != SCORE_HEADER {
                return Err(Error::Format(format!(
                    "line {n}: expected header {SCORE_HEADER:?}"
                )));
            }
            header_seen = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let [id, label, rec, energy] = fields[..] else {
            return Err(Error::Format(format!(
                "line {n}: expected 4 fields, got {}",
                fields.len()
            )));
        };
        records.push(ScoreRecord {
            frame_id: id
                .trim()
                .parse()
                .map_err(|_| Error::Format(format!("line {n}: bad frame id {id:?}")))?,
            label: label.trim().parse::<SceneLabel>()?,
            s_rec: parse_f64(rec, n)?,
            s_energy: parse_f64(energy, n)?,
        });
    }
    if !header_seen {
        return Err(Error::Format("score table has no header".into()));
    }
    Ok(ScoreTable { comments, records })
}

pub fn save_scores(records: &[ScoreRecord], comments: &[String], path: &Path) -> Result<()> {
    write_scores(records, comments, create_file(path)?).map_err(|e| Error::io(path, e))
}

pub fn load_scores(path: &Path) -> Result<ScoreTable> {
    read_scores(open_file(path)?)
}

pub fn write_threshold<W: Write>(t: &Threshold, mut w: W) -> std::io::Result<()> {
    writeln!(w, "{},{},{}", t.kind, t.quantile, sci(t.value))?;
    w.flush()
}

pub fn read_threshold<R: Read>(mut r: R) -> Result<Threshold> {
    let mut s = String::new();
    r.read_to_string(&mut s)
        .map_err(|e| Error::Format(format!("threshold file unreadable: {e}")))?;
    let mut lines = s.lines().filter(|l| !l.trim().is_empty());
    let line = lines
        .next()
        .ok_or_else(|| Error::Format("threshold file is empty".into()))?;
    if lines.next().is_some() {
        return Err(Error::Format(
            "threshold file must hold a single line".into(),
        ));
    }
    let fields: Vec<&str> = line.split(',').collect();
    let [kind, q, tau] = fields[..] else {
        return Err(Error::Format(format!(
            "threshold line needs kind,quantile,tau: {line:?}"
        )));
    };
    let quantile = parse_f64(q, 1)?;
    if !(quantile > 0.0 && quantile < 1.0) {
        return Err(Error::Format(format!(
            "threshold quantile {quantile} outside (0, 1)"
        )));
    }
    Ok(Threshold {
        kind: kind.trim().parse::<ScoreKind>()?,
        quantile,
        value: parse_f64(tau, 1)?,
    })
}

pub fn save_threshold(t: &Threshold, path: &Path) -> Result<()> {
    write_threshold(t, create_file(path)?).map_err(|e| Error::io(path, e))
}

pub fn load_threshold(path: &Path) -> Result<Threshold> {
    read_threshold(open_file(path)?)
}
