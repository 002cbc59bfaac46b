//! Plain-text graph format.
//!
//! ```text
//! # comment
//! n m l
//! u v w        (m lines, 0-based ids)
//! label        (n lines, label of node i)
//! ```

use std::fmt::Write as _;

use crate::error::{parse_err, Result};
use crate::graph::{Graph, LabelAssignment};

/// Non-empty, non-comment lines with their 1-based line numbers.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub(crate) fn parse_field<T: std::str::FromStr>(
    line: usize,
    tok: Option<&str>,
    what: &str,
) -> Result<T> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| parse_err(line, format!("bad {what} `{tok}`")))
}

pub fn read_graph(text: &str) -> Result<(Graph, LabelAssignment)> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| parse_err(0, "empty input"))?;
    let mut it = header.split_whitespace();
    let n: usize = parse_field(hl, it.next(), "n")?;
    let m: usize = parse_field(hl, it.next(), "m")?;
    let l: usize = parse_field(hl, it.next(), "l")?;
    if it.next().is_some() {
        return Err(parse_err(hl, "trailing tokens in header"));
    }

    let mut g = Graph::new(n);
    for _ in 0..m {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| parse_err(hl, "missing edge lines"))?;
        let mut it = line.split_whitespace();
        let u: usize = parse_field(ln, it.next(), "u")?;
        let v: usize = parse_field(ln, it.next(), "v")?;
        let w: f64 = parse_field(ln, it.next(), "w")?;
        g.add_edge(u, v, w)
            .map_err(|e| parse_err(ln, e.to_string()))?;
    }

    let mut label_of = Vec::with_capacity(n);
    for _ in 0..n {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| parse_err(hl, "missing label lines"))?;
        let lab: usize = parse_field(ln, Some(line), "label")?;
        if lab >= l {
            return Err(parse_err(ln, format!("label {lab} >= l = {l}")));
        }
        label_of.push(lab);
    }
    if let Some((ln, _)) = lines.next() {
        return Err(parse_err(ln, "unexpected trailing content"));
    }
    let labels = LabelAssignment::new(label_of, l)?;
    Ok((g, labels))
}

pub fn write_graph(g: &Graph, labels: &LabelAssignment) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{} {} {}",
        g.node_count(),
        g.edge_count(),
        labels.label_count()
    )
    .unwrap();
    for e in g.edges() {
        writeln!(out, "{} {} {}", e.u, e.v, e.w).unwrap();
    }
    for &l in labels.labels() {
        writeln!(out, "{l}").unwrap();
    }
    out
}

/// Parses an inline comma-separated label list such as `0,1,1,2`.
pub fn parse_inline_labels(spec: &str, label_count: Option<usize>) -> Result<LabelAssignment> {
    let label_of = spec
        .split(',')
        .map(|t| parse_field::<usize>(1, Some(t.trim()), "label"))
        .collect::<Result<Vec<_>>>()?;
    let l = label_count.unwrap_or_else(|| label_of.iter().max().map_or(1, |m| m + 1));
    LabelAssignment::new(label_of, l)
}
