//! Plain-text inputs: graph, measured values and update streams.
//!
//! Blank lines and lines starting with `#` are skipped everywhere.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::graphstore::{DynamicGraph, NodeId};
use crate::session::UpdateRecord;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Non-comment lines with their 1-based numbers.
fn content_lines(r: impl BufRead) -> impl Iterator<Item = Result<(usize, String)>> {
    r.lines().enumerate().filter_map(|(i, line)| match line {
        Ok(l) => {
            let t = l.trim();
            if t.is_empty() || t.starts_with('#') {
                None
            } else {
                Some(Ok((i + 1, t.to_string())))
            }
        }
        Err(e) => Some(Err(e.into())),
    })
}

fn field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| parse_err(line, format!("bad {what} `{tok}`")))
}

fn no_more<'a>(mut toks: impl Iterator<Item = &'a str>, line: usize) -> Result<()> {
    match toks.next() {
        Some(t) => Err(parse_err(line, format!("unexpected `{t}`"))),
        None => Ok(()),
    }
}

/// Header `n m`, then one `u v` edge per line over ids `1..=n`.
/// Returns the graph and the embedding width.
pub fn read_graph(r: impl BufRead) -> Result<(DynamicGraph, usize)> {
    let mut lines = content_lines(r);
    let (hline, header) = lines
        .next()
        .transpose()?
        .ok_or_else(|| parse_err(1, "missing header `n m`"))?;
    let mut toks = header.split_whitespace();
    let n: usize = field(toks.next(), hline, "node count")?;
    let m: usize = field(toks.next(), hline, "embedding width")?;
    no_more(toks, hline)?;
    if m == 0 {
        return Err(parse_err(hline, "embedding width must be positive"));
    }
    let mut g = DynamicGraph::with_nodes(n);
    for item in lines {
        let (ln, text) = item?;
        let mut toks = text.split_whitespace();
        let u: NodeId = field(toks.next(), ln, "node id")?;
        let v: NodeId = field(toks.next(), ln, "node id")?;
        no_more(toks, ln)?;
        g.add_edge(u, v).map_err(|e| parse_err(ln, e.to_string()))?;
    }
    Ok((g, m))
}

/// Writes a graph whose ids are exactly `1..=n` in order.
pub fn write_graph(g: &DynamicGraph, m: usize, mut w: impl Write) -> Result<()> {
    if g.node_ids().zip(1..).any(|(id, want)| id != want) {
        return Err(Error::InvalidArgument(
            "graph files need ids 1..=n in order".into(),
        ));
    }
    writeln!(w, "{} {}", g.len(), m)?;
    for (u, v) in g.edges() {
        writeln!(w, "{u} {v}")?;
    }
    Ok(())
}

/// One real per line.
pub fn read_values(r: impl BufRead) -> Result<Vec<f64>> {
    content_lines(r)
        .map(|item| {
            let (ln, text) = item?;
            let x: f64 = field(Some(text.as_str()), ln, "value")?;
            if x.is_finite() {
                Ok(x)
            } else {
                Err(parse_err(ln, "value is not finite"))
            }
        })
        .collect()
}

pub fn write_values(values: &[f64], mut w: impl Write) -> Result<()> {
    for x in values {
        writeln!(w, "{}", fmt_real(*x))?;
    }
    Ok(())
}

/// `+e u v`, `-e u v`, `+n id value [neighbours...]`, `-n id`.
pub fn parse_update(text: &str, line: usize) -> Result<UpdateRecord> {
    let mut toks = text.split_whitespace();
    let op = toks.next().unwrap_or_default();
    let rec = match op {
        "+e" | "-e" => {
            let u = field(toks.next(), line, "node id")?;
            let v = field(toks.next(), line, "node id")?;
            no_more(toks, line)?;
            if op == "+e" {
                UpdateRecord::EdgeInsert { u, v }
            } else {
                UpdateRecord::EdgeDelete { u, v }
            }
        }
        "+n" => {
            let id = field(toks.next(), line, "node id")?;
            let value: f64 = field(toks.next(), line, "measured value")?;
            if !value.is_finite() {
                return Err(parse_err(line, "measured value is not finite"));
            }
            let neighbors = toks
                .map(|t| field(Some(t), line, "neighbour id"))
                .collect::<Result<_>>()?;
            UpdateRecord::NodeInsert {
                id,
                value,
                neighbors,
            }
        }
        "-n" => {
            let id = field(toks.next(), line, "node id")?;
            no_more(toks, line)?;
            UpdateRecord::NodeDelete { id }
        }
        other => return Err(parse_err(line, format!("unknown record `{other}`"))),
    };
    Ok(rec)
}

pub fn format_update(rec: &UpdateRecord) -> String {
    match rec {
        UpdateRecord::EdgeInsert { u, v } => format!("+e {u} {v}"),
        UpdateRecord::EdgeDelete { u, v } => format!("-e {u} {v}"),
        UpdateRecord::NodeInsert {
            id,
            value,
            neighbors,
        } => {
            let mut s = format!("+n {id} {}", fmt_real(*value));
            for n in neighbors {
                s.push_str(&format!(" {n}"));
            }
            s
        }
        UpdateRecord::NodeDelete { id } => format!("-n {id}"),
    }
}

pub fn read_updates(r: impl BufRead) -> Result<Vec<UpdateRecord>> {
    content_lines(r)
        .map(|item| {
            let (ln, text) = item?;
            parse_update(&text, ln)
        })
        .collect()
}

pub fn write_updates(records: &[UpdateRecord], mut w: impl Write) -> Result<()> {
    for rec in records {
        writeln!(w, "{}", format_update(rec))?;
    }
    Ok(())
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_round_trip() {
        let text = "# comment\n4 2\n1 2\n\n2 3\n";
        let (g, m) = read_graph(text.as_bytes()).unwrap();
        assert_eq!((g.len(), m, g.edge_count()), (4, 2, 2));
        let mut out = Vec::new();
        write_graph(&g, m, &mut out).unwrap();
        let (h, _) = read_graph(out.as_slice()).unwrap();
        assert_eq!(g, h);
    }

    #[test]
    fn graph_errors_carry_line_numbers() {
        let cases = [
            ("", 1),
            ("3\n", 1),
            ("3 2\n1 2\n1 x\n", 3),
            ("3 2\n1 2\n2 1\n", 3),
            ("3 2\n1 9\n", 2),
            ("3 2\n1 2 3\n", 2),
            ("3 0\n", 1),
        ];
        for (text, line) in cases {
            match read_graph(text.as_bytes()) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn values_and_updates() {
        assert_eq!(read_values("1.5\n-2\n".as_bytes()).unwrap(), vec![1.5, -2.0]);
        assert!(matches!(
            read_values("1\nnan\n".as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
        let text = "+e 1 2\n-e 2 3\n+n 9 0.25 1 2\n+n 10 -1\n-n 9\n";
        let recs = read_updates(text.as_bytes()).unwrap();
        assert_eq!(recs.len(), 5);
        assert_eq!(
            recs[2],
            UpdateRecord::NodeInsert {
                id: 9,
                value: 0.25,
                neighbors: vec![1, 2]
            }
        );
        let mut out = Vec::new();
        write_updates(&recs, &mut out).unwrap();
        assert_eq!(read_updates(out.as_slice()).unwrap(), recs);
        assert!(read_updates("*e 1 2\n".as_bytes()).is_err());
        assert!(read_updates("-n\n".as_bytes()).is_err());
    }

    #[test]
    fn reals_round_trip() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 6.02e23] {
            assert_eq!(fmt_real(x).parse::<f64>().unwrap(), x);
        }
    }
}
