use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use super::Dataset;
use crate::error::{Error, Result};

/// Cell separator of a delimited text file.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Delimiter {
    #[default]
    Comma,
    /// Any run of spaces or tabs.
    Whitespace,
}

impl FromStr for Delimiter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "," | "comma" => Ok(Delimiter::Comma),
            "whitespace" | "space" | "tab" | " " | "\t" => Ok(Delimiter::Whitespace),
            other => Err(Error::InvalidConfig(format!("unknown delimiter {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LoadOptions {
    /// The last column holds a class label rather than a coordinate.
    pub has_labels: bool,
    pub delimiter: Delimiter,
    /// Skip the first line.
    pub header: bool,
}

pub fn load_csv(path: impl AsRef<Path>, options: LoadOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::open(path).map_err(io_err)?;
    parse_csv(BufReader::new(file), options).map_err(|e| match e {
        Error::Io { source, .. } => io_err(source),
        other => other,
    })
}

/// Parses delimited text, one point per line. Blank lines are skipped; row
/// and column numbers in errors are 1-based.
pub fn parse_csv<R: BufRead>(reader: R, options: LoadOptions) -> Result<Dataset> {
    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut width: Option<usize> = None;
    let mut n = 0;

    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| Error::Io {
            path: "<input>".into(),
            source,
        })?;
        let row = idx + 1;
        if options.header && idx == 0 {
            continue;
        }
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = match options.delimiter {
            Delimiter::Comma => line.split(',').map(str::trim).collect(),
            Delimiter::Whitespace => line.split_whitespace().collect(),
        };
        match width {
            None => width = Some(cells.len()),
            Some(w) if w != cells.len() => {
                return Err(Error::RaggedRow {
                    row,
                    expected: w,
                    found: cells.len(),
                })
            }
            Some(_) => {}
        }
        let features = if options.has_labels {
            let (label, rest) = cells.split_last().expect("split yields at least one cell");
            labels.push((*label).to_string());
            rest
        } else {
            &cells[..]
        };
        if features.is_empty() {
            return Err(Error::InvalidDataset(format!(
                "row {row} has no coordinate columns"
            )));
        }
        for (c, cell) in features.iter().enumerate() {
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => values.push(v),
                _ => {
                    return Err(Error::Parse {
                        row,
                        column: c + 1,
                        cell: (*cell).to_string(),
                    })
                }
            }
        }
        n += 1;
    }

    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    let dim = values.len() / n;
    let labels = options.has_labels.then_some(labels);
    Dataset::from_flat(values, n, dim, labels)
}

/// Writes one comma-separated row per point, with the label last when present.
/// Values use the shortest representation that parses back exactly.
pub fn write_csv<W: Write>(data: &Dataset, mut out: W) -> io::Result<()> {
    for (i, p) in data.points().enumerate() {
        let mut first = true;
        for v in p {
            if !first {
                out.write_all(b",")?;
            }
            first = false;
            write!(out, "{v}")?;
        }
        if let Some(labels) = data.labels() {
            write!(out, ",{}", labels[i])?;
        }
        out.write_all(b"\n")?;
    }
    out.flush()
}
