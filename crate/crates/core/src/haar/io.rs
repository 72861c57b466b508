//! Text form of a [`HaarDecomposition`]:
//!
//! ```text
//! hwt-decomposition 1
//! rows	8
//! cols	4
//! orientation	canonical
//! columns	<tab-separated column ids>
//! row_ids	<tab-separated row ids>        (optional)
//! detail	1	<m reals>
//! ...
//! detail	n-1	<m reals>
//! smooth	<m reals>
//! dendrogram
//! <dendrogram text form>
//! ```
//!
//! Reals carry 17 significant digits, so parsing reproduces every bit.

use super::{HaarDecomposition, Orientation};
use crate::error::{Error, Result};
use crate::hierarchy::io::fmt_real;
use crate::hierarchy::Dendrogram;

const MAGIC: &str = "hwt-decomposition";

impl HaarDecomposition {
    pub fn to_text(&self) -> String {
        let mut out = format!("{MAGIC} 1\n");
        out.push_str(&format!("rows\t{}\n", self.dendrogram.n()));
        out.push_str(&format!("cols\t{}\n", self.cols));
        out.push_str(&format!("orientation\t{}\n", self.orientation.name()));
        out.push_str(&format!("columns\t{}\n", self.col_ids.join("\t")));
        if let Some(ids) = &self.row_ids {
            out.push_str(&format!("row_ids\t{}\n", ids.join("\t")));
        }
        let reals = |v: &[f64]| v.iter().map(|&x| fmt_real(x)).collect::<Vec<_>>().join("\t");
        for k in 0..self.dendrogram.merges().len() {
            out.push_str(&format!("detail\t{}\t{}\n", k + 1, reals(self.detail(k))));
        }
        out.push_str(&format!("smooth\t{}\n", reals(&self.final_smooth)));
        out.push_str("dendrogram\n");
        out.push_str(&self.dendrogram.to_text());
        out
    }

    pub fn from_text(text: &str) -> Result<HaarDecomposition> {
        let lines: Vec<&str> = text.lines().collect();
        let mut idx = 0;
        let mut take = |what: &str| -> Result<(usize, &str)> {
            while idx < lines.len() && lines[idx].trim().is_empty() {
                idx += 1;
            }
            let i = idx;
            idx += 1;
            lines
                .get(i)
                .map(|l| (i + 1, l.trim_end_matches('\r')))
                .ok_or_else(|| Error::parse(i + 1, None, format!("missing {what}")))
        };

        let (line, magic) = take("format line")?;
        if magic.split_whitespace().collect::<Vec<_>>() != [MAGIC, "1"] {
            return Err(Error::parse(line, Some(1), format!("expected \"{MAGIC} 1\"")));
        }
        let rows = parse_usize(take("rows")?, "rows")?;
        let cols = parse_usize(take("cols")?, "cols")?;
        if rows < 2 || cols == 0 {
            return Err(Error::invalid(format!("bad decomposition shape {rows}x{cols}")));
        }
        let (line, o) = take("orientation")?;
        let orientation = match value(line, o, "orientation")? {
            "canonical" => Orientation::Canonical,
            "as_recorded" => Orientation::AsRecorded,
            other => {
                return Err(Error::parse(line, Some(2), format!("unknown orientation {other:?}")))
            }
        };
        let (line, c) = take("columns")?;
        let col_ids = labels(line, c, "columns", cols)?;

        let (mut line, mut next) = take("detail rows")?;
        let mut row_ids = None;
        if next.starts_with("row_ids") {
            row_ids = Some(labels(line, next, "row_ids", rows)?);
            (line, next) = take("detail rows")?;
        }

        let mut details = Vec::with_capacity((rows - 1) * cols);
        for k in 0..rows - 1 {
            if k > 0 {
                (line, next) = take("detail row")?;
            }
            let fields: Vec<&str> = next.split_whitespace().collect();
            if fields.first() != Some(&"detail") {
                return Err(Error::parse(line, Some(1), format!("expected detail row {}", k + 1)));
            }
            if fields.get(1).and_then(|s| s.parse::<usize>().ok()) != Some(k + 1) {
                return Err(Error::parse(line, Some(2), format!("expected detail index {}", k + 1)));
            }
            details.extend(reals(line, &fields[2..], cols, 3)?);
        }
        let (line, s) = take("smooth")?;
        let fields: Vec<&str> = s.split_whitespace().collect();
        if fields.first() != Some(&"smooth") {
            return Err(Error::parse(line, Some(1), "expected smooth row"));
        }
        let final_smooth = reals(line, &fields[1..], cols, 2)?;
        let (line, marker) = take("dendrogram")?;
        if marker.trim() != "dendrogram" {
            return Err(Error::parse(line, Some(1), "expected dendrogram section"));
        }
        let tree_text = lines[line..].join("\n");
        let dendrogram = Dendrogram::from_text(&tree_text).map_err(|e| match e {
            Error::Parse { location, message } => Error::Parse {
                location: crate::error::Location {
                    line: location.line + line,
                    field: location.field,
                },
                message,
            },
            other => other,
        })?;
        if dendrogram.n() != rows {
            return Err(Error::invalid(format!(
                "embedded tree has {} terminals, decomposition has {rows} rows",
                dendrogram.n()
            )));
        }
        HaarDecomposition::from_parts(dendrogram, orientation, details, final_smooth)?
            .with_labels(col_ids, row_ids)
    }
}

fn value<'a>(line: usize, text: &'a str, key: &str) -> Result<&'a str> {
    let mut it = text.split_whitespace();
    if it.next() != Some(key) {
        return Err(Error::parse(line, Some(1), format!("expected key {key:?}")));
    }
    it.next()
        .ok_or_else(|| Error::parse(line, Some(2), format!("missing value for {key:?}")))
}

fn parse_usize((line, text): (usize, &str), key: &str) -> Result<usize> {
    value(line, text, key)?
        .parse()
        .map_err(|_| Error::parse(line, Some(2), format!("{key} is not an integer")))
}

fn labels(line: usize, text: &str, key: &str, count: usize) -> Result<Vec<String>> {
    let mut it = text.split('\t');
    if it.next().map(str::trim) != Some(key) {
        return Err(Error::parse(line, Some(1), format!("expected key {key:?}")));
    }
    let ids: Vec<String> = it.map(str::to_owned).collect();
    if ids.len() != count {
        return Err(Error::parse(
            line,
            None,
            format!("expected {count} {key}, found {}", ids.len()),
        ));
    }
    Ok(ids)
}

fn reals(line: usize, fields: &[&str], count: usize, first_field: usize) -> Result<Vec<f64>> {
    if fields.len() != count {
        return Err(Error::parse(
            line,
            None,
            format!("expected {count} values, found {}", fields.len()),
        ));
    }
    fields
        .iter()
        .enumerate()
        .map(|(j, f)| {
            f.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::parse(line, Some(first_field + j), format!("bad number {f:?}")))
        })
        .collect()
}
