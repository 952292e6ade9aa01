//! Plain-text problem files.
//!
//! ```text
//! diag n | dense n | rank1 n sigma
//! <n diagonal entries | n rows of n entries | n entries of v>
//! b
//! <n entries>
//! c <value>            (optional)
//! ```
//!
//! Numbers are whitespace separated and may wrap across lines. Blank lines
//! are ignored.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::operator::LinearOperator;
use crate::problem::QuadraticProblem;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    Diag,
    Dense,
    Rank1 { sigma: f64 },
}

fn perr(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn number(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| perr(line, format!("expected a finite number, found `{tok}`")))
}

pub fn parse_problem(text: &str) -> Result<QuadraticProblem> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .peekable();

    let (hline, header) = lines.next().ok_or_else(|| perr(1, "empty problem file"))?;
    let head: Vec<&str> = header.split_whitespace().collect();
    let n_of = |tok: Option<&&str>| -> Result<usize> {
        tok.and_then(|t| t.parse::<usize>().ok())
            .filter(|&n| n > 0)
            .ok_or_else(|| perr(hline, "header needs a positive integer dimension"))
    };
    let (kind, n) = match head.first().copied() {
        Some("diag") if head.len() == 2 => (Kind::Diag, n_of(head.get(1))?),
        Some("dense") if head.len() == 2 => (Kind::Dense, n_of(head.get(1))?),
        Some("rank1") if head.len() == 3 => {
            let n = n_of(head.get(1))?;
            (Kind::Rank1 { sigma: number(head[2], hline)? }, n)
        }
        _ => {
            return Err(perr(
                hline,
                format!("malformed header `{header}`; expected `diag n`, `dense n` or `rank1 n sigma`"),
            ))
        }
    };

    let expected = if kind == Kind::Dense { n * n } else { n };
    let mut entries = Vec::with_capacity(expected);
    let mut last_line = hline;
    loop {
        match lines.next() {
            None => return Err(perr(last_line, "missing `b` section")),
            Some((ln, "b")) => {
                if entries.len() != expected {
                    return Err(perr(
                        ln,
                        format!("operator section has {} entries, expected {expected}", entries.len()),
                    ));
                }
                last_line = ln;
                break;
            }
            Some((ln, l)) => {
                for tok in l.split_whitespace() {
                    entries.push(number(tok, ln)?);
                }
                last_line = ln;
            }
        }
    }

    let mut b = Vec::with_capacity(n);
    let mut c = 0.0;
    while let Some((ln, l)) = lines.next() {
        let mut toks = l.split_whitespace();
        if l.starts_with('c') {
            toks.next();
            let v = toks.next().ok_or_else(|| perr(ln, "`c` line needs a value"))?;
            c = number(v, ln)?;
            if toks.next().is_some() {
                return Err(perr(ln, "`c` line takes a single value"));
            }
            if let Some((extra, _)) = lines.next() {
                return Err(perr(extra, "unexpected content after `c`"));
            }
            last_line = ln;
            break;
        }
        for tok in toks {
            b.push(number(tok, ln)?);
        }
        last_line = ln;
    }
    if b.len() != n {
        return Err(perr(
            last_line,
            format!("`b` section has {} entries, expected {n}", b.len()),
        ));
    }

    let op = match kind {
        Kind::Diag => LinearOperator::diagonal(entries),
        Kind::Dense => LinearOperator::dense(n, entries),
        Kind::Rank1 { sigma } => LinearOperator::rank_one(entries, sigma),
    }
    .map_err(|e| perr(hline, e.to_string()))?;
    QuadraticProblem::new(op, b, c)
}

pub fn load_problem(path: impl AsRef<Path>) -> Result<QuadraticProblem> {
    let text = std::fs::read_to_string(path)?;
    parse_problem(&text)
}

fn push_row(out: &mut String, xs: &[f64]) {
    let row: Vec<String> = xs.iter().map(|v| v.to_string()).collect();
    out.push_str(&row.join(" "));
    out.push('\n');
}

/// Writes the text format. Values use the shortest round-trip decimal form.
pub fn format_problem(p: &QuadraticProblem) -> String {
    let n = p.dim();
    let mut out = String::new();
    match p.operator() {
        LinearOperator::Diagonal(d) => {
            let _ = writeln!(out, "diag {n}");
            push_row(&mut out, d);
        }
        LinearOperator::Dense(m) => {
            let _ = writeln!(out, "dense {n}");
            for row in m.entries().chunks(n) {
                push_row(&mut out, row);
            }
        }
        LinearOperator::RankOnePlusScaledIdentity { v, sigma } => {
            let _ = writeln!(out, "rank1 {n} {sigma}");
            push_row(&mut out, v);
        }
    }
    out.push_str("b\n");
    push_row(&mut out, p.b());
    if p.c() != 0.0 {
        let _ = writeln!(out, "c {}", p.c());
    }
    out
}

pub fn save_problem(p: &QuadraticProblem, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format_problem(p))?;
    Ok(())
}
