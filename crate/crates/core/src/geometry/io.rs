//! Polytope input formats.
//!
//! Text: a header `3 <n>` followed by three rows of `n` integers; column `i`
//! is vertex `i`. JSON: `{"id": "...", "vertices": [[x, y, z], ...]}`, and a
//! batch file is a JSON array of such objects.

use serde::{Deserialize, Serialize};

use super::polytope::Point3;
use crate::error::ParseError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolytopeRecord {
    pub id: String,
    pub vertices: Vec<Point3>,
}

fn text_err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Text {
        line,
        message: message.into(),
    }
}

pub fn parse_text(input: &str) -> Result<Vec<Point3>, ParseError> {
    let mut lines = input
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines.next().ok_or_else(|| text_err(1, "empty input"))?;
    let head: Vec<&str> = header.split_whitespace().collect();
    if head.len() != 2 {
        return Err(text_err(hline, "expected header `3 <n>`"));
    }
    if head[0] != "3" {
        return Err(text_err(hline, format!("expected dimension 3, found `{}`", head[0])));
    }
    let n: usize = head[1]
        .parse()
        .map_err(|_| text_err(hline, format!("invalid vertex count `{}`", head[1])))?;
    let mut rows: Vec<Vec<i64>> = Vec::with_capacity(3);
    let mut last = hline;
    for _ in 0..3 {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| text_err(last + 1, "expected 3 coordinate rows"))?;
        last = ln;
        let row = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<i64>()
                    .map_err(|_| text_err(ln, format!("invalid integer `{tok}`")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if row.len() != n {
            return Err(text_err(ln, format!("expected {n} entries, found {}", row.len())));
        }
        rows.push(row);
    }
    if let Some((ln, _)) = lines.next() {
        return Err(text_err(ln, "unexpected trailing content"));
    }
    Ok((0..n).map(|i| [rows[0][i], rows[1][i], rows[2][i]]).collect())
}

pub fn format_text(vertices: &[Point3]) -> String {
    let mut out = format!("3 {}\n", vertices.len());
    for k in 0..3 {
        let row: Vec<String> = vertices.iter().map(|v| v[k].to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_json(input: &str) -> Result<PolytopeRecord, ParseError> {
    serde_json::from_str(input).map_err(|e| ParseError::Json(e.to_string()))
}

pub fn parse_batch(input: &str) -> Result<Vec<PolytopeRecord>, ParseError> {
    serde_json::from_str(input).map_err(|e| ParseError::Json(e.to_string()))
}
