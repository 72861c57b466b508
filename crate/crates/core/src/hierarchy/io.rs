//! Text form of a dendrogram.
//!
//! ```text
//! hwt-dendrogram 1
//! n	3
//! criterion	ward
//! seq	left	right	level
//! 1	1	2	5.0000000000000000e-1
//! 2	q1	3	1.5000000000000000e0
//! ```
//!
//! Fields are tab-separated (any whitespace is accepted on input); `#` starts
//! a comment line. Extra trailing columns are allowed after `level` and are
//! handed to the caller (the condensed-hierarchy format uses them).

use super::{Criterion, Dendrogram, MergeStep, Node};
use crate::error::{Error, Result};

const MAGIC: &str = "hwt-dendrogram";
const VERSION: &str = "1";
const BASE_COLUMNS: [&str; 4] = ["seq", "left", "right", "level"];

/// Real formatted with 17 significant digits.
pub(crate) fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

/// Parsed dendrogram plus any extra columns, by name, with one cell per merge.
pub(crate) struct Table {
    pub dendrogram: Dendrogram,
    pub extra_columns: Vec<String>,
    /// `extra_cells[k][c]` is merge `k`'s value in extra column `c`, with the
    /// 1-based line it came from.
    pub extra_cells: Vec<Vec<(usize, String)>>,
}

pub(crate) fn write_table(d: &Dendrogram, extra_columns: &[&str], extra: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&format!("{MAGIC} {VERSION}\n"));
    out.push_str(&format!("n\t{}\n", d.n));
    out.push_str(&format!("criterion\t{}\n", d.criterion));
    let header: Vec<&str> = BASE_COLUMNS.iter().chain(extra_columns).copied().collect();
    out.push_str(&header.join("\t"));
    out.push('\n');
    for (k, m) in d.merges.iter().enumerate() {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}",
            k + 1,
            m.left,
            m.right,
            fmt_real(m.level)
        ));
        if let Some(cells) = extra.get(k) {
            for c in cells {
                out.push('\t');
                out.push_str(c);
            }
        }
        out.push('\n');
    }
    out
}

pub(crate) fn parse_table(text: &str) -> Result<Table> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let mut next = |what: &str| {
        lines
            .next()
            .ok_or_else(|| Error::parse(text.lines().count() + 1, None, format!("missing {what}")))
    };

    let (line, magic) = next("format line")?;
    let fields: Vec<&str> = magic.split_whitespace().collect();
    if fields.first() != Some(&MAGIC) {
        return Err(Error::parse(line, Some(1), format!("expected {MAGIC:?}")));
    }
    if fields.get(1) != Some(&VERSION) {
        return Err(Error::parse(line, Some(2), "unsupported format version"));
    }

    let (line, n_line) = next("terminal count")?;
    let n: usize = keyed(line, n_line, "n")?
        .parse()
        .map_err(|_| Error::parse(line, Some(2), "terminal count is not an integer"))?;
    if n < 2 {
        return Err(Error::invalid(format!(
            "dendrogram needs at least 2 terminals, got {n}"
        )));
    }

    let (line, c_line) = next("criterion")?;
    let criterion: Criterion = keyed(line, c_line, "criterion")?
        .parse()
        .map_err(|e: Error| Error::parse(line, Some(2), e.to_string()))?;

    let (line, header) = next("column header")?;
    let columns: Vec<&str> = header.split_whitespace().collect();
    if columns.len() < BASE_COLUMNS.len() || columns[..4] != BASE_COLUMNS {
        return Err(Error::parse(
            line,
            None,
            format!("column header must start with {}", BASE_COLUMNS.join(" ")),
        ));
    }
    let extra_columns: Vec<String> = columns[4..].iter().map(|s| s.to_string()).collect();

    let mut merges = Vec::with_capacity(n - 1);
    let mut extra_cells = Vec::with_capacity(n - 1);
    for (line, row) in lines {
        let fields: Vec<&str> = row.split_whitespace().collect();
        if fields.len() != columns.len() {
            return Err(Error::parse(
                line,
                None,
                format!("expected {} fields, found {}", columns.len(), fields.len()),
            ));
        }
        let seq: usize = fields[0]
            .parse()
            .map_err(|_| Error::parse(line, Some(1), "seq is not an integer"))?;
        if seq != merges.len() + 1 {
            return Err(Error::parse(
                line,
                Some(1),
                format!("expected seq {}, found {seq}", merges.len() + 1),
            ));
        }
        let node = |f: usize| -> Result<Node> {
            fields[f].parse().map_err(|e: String| Error::parse(line, Some(f + 1), e))
        };
        let level: f64 = fields[3]
            .parse()
            .map_err(|_| Error::parse(line, Some(4), "level is not a number"))?;
        merges.push(MergeStep {
            left: node(1)?,
            right: node(2)?,
            level,
        });
        extra_cells.push(fields[4..].iter().map(|s| (line, s.to_string())).collect());
    }

    let dendrogram = Dendrogram::new(n, criterion, merges)?;
    Ok(Table {
        dendrogram,
        extra_columns,
        extra_cells,
    })
}

fn keyed<'a>(line: usize, text: &'a str, key: &str) -> Result<&'a str> {
    let mut it = text.split_whitespace();
    if it.next() != Some(key) {
        return Err(Error::parse(line, Some(1), format!("expected key {key:?}")));
    }
    let value = it
        .next()
        .ok_or_else(|| Error::parse(line, Some(2), format!("missing value for {key:?}")))?;
    if it.next().is_some() {
        return Err(Error::parse(line, Some(3), "unexpected trailing field"));
    }
    Ok(value)
}

impl Dendrogram {
    /// Serialises to the tab-separated text form (levels with 17 significant digits).
    pub fn to_text(&self) -> String {
        write_table(self, &[], &[])
    }

    /// Parses the text form. Extra columns after `level` are ignored.
    pub fn from_text(text: &str) -> Result<Dendrogram> {
        parse_table(text).map(|t| t.dendrogram)
    }
}
