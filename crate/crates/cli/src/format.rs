//! JSONL and CSV encodings of census rows.

use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use hypercensus::CurveRow;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Jsonl,
    Csv,
}

impl Format {
    /// `.csv` files are CSV; otherwise a leading `{` means JSONL.
    pub fn detect(path: &Path, text: &str) -> Format {
        let is_csv_ext = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
        if is_csv_ext || !text.trim_start().starts_with('{') && !text.trim().is_empty() {
            Format::Csv
        } else {
            Format::Jsonl
        }
    }
}

/// CSV shape of a row: lists are space separated, absent fields are empty.
#[derive(Debug, Serialize, Deserialize)]
struct FlatRow {
    genus: u32,
    n: u32,
    q: u64,
    field_poly: u32,
    v: String,
    u: String,
    counts: String,
    weil: String,
    two_rank: String,
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

fn split<T: std::str::FromStr>(s: &str, what: &str, line: usize) -> Result<Vec<T>, CliError> {
    s.split_whitespace()
        .map(|x| {
            x.parse()
                .map_err(|_| CliError::Input(format!("line {line}: bad {what} entry {x:?}")))
        })
        .collect()
}

fn optional<T: std::str::FromStr>(
    s: &str,
    what: &str,
    line: usize,
) -> Result<Option<Vec<T>>, CliError> {
    if s.trim().is_empty() {
        Ok(None)
    } else {
        split(s, what, line).map(Some)
    }
}

impl From<&CurveRow> for FlatRow {
    fn from(r: &CurveRow) -> FlatRow {
        FlatRow {
            genus: r.genus,
            n: r.n,
            q: r.q,
            field_poly: r.field_poly,
            v: join(&r.v),
            u: join(&r.u),
            counts: r.counts.as_deref().map(join).unwrap_or_default(),
            weil: r.weil.as_deref().map(join).unwrap_or_default(),
            two_rank: r.two_rank.map(|x| x.to_string()).unwrap_or_default(),
        }
    }
}

impl FlatRow {
    fn into_row(self, line: usize) -> Result<CurveRow, CliError> {
        let two_rank = match self.two_rank.trim() {
            "" => None,
            s => Some(
                s.parse()
                    .map_err(|_| CliError::Input(format!("line {line}: bad two_rank {s:?}")))?,
            ),
        };
        Ok(CurveRow {
            genus: self.genus,
            n: self.n,
            q: self.q,
            field_poly: self.field_poly,
            v: split(&self.v, "v", line)?,
            u: split(&self.u, "u", line)?,
            counts: optional(&self.counts, "counts", line)?,
            weil: optional(&self.weil, "weil", line)?,
            two_rank,
        })
    }
}

pub fn write_rows(rows: &[CurveRow], format: Format, out: &mut dyn Write) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::io("<output>", e);
    match format {
        Format::Jsonl => {
            for r in rows {
                let line = serde_json::to_string(r).map_err(|e| CliError::Input(e.to_string()))?;
                writeln!(out, "{line}").map_err(io)?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            for r in rows {
                w.serialize(FlatRow::from(r)).map_err(csv_error)?;
            }
            w.flush().map_err(io)?;
        }
    }
    Ok(())
}

fn csv_error(e: csv::Error) -> CliError {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(e) => CliError::io("<output>", e),
            _ => unreachable!(),
        }
    } else {
        CliError::Input(e.to_string())
    }
}

pub fn read_rows(text: &str, format: Format) -> Result<Vec<CurveRow>, CliError> {
    match format {
        Format::Jsonl => text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                serde_json::from_str(l).map_err(|e| CliError::Input(format!("line {}: {e}", i + 1)))
            })
            .collect(),
        Format::Csv => {
            let mut r = csv::Reader::from_reader(text.as_bytes());
            r.deserialize::<FlatRow>()
                .enumerate()
                .map(|(i, row)| {
                    let line = i + 2;
                    row.map_err(|e| CliError::Input(format!("line {line}: {e}")))?
                        .into_row(line)
                })
                .collect()
        }
    }
}
