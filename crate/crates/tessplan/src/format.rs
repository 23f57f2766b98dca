//! Line-oriented fabric and design files.
//!
//! Fabric:
//! ```text
//! rows 8
//! columns CCBCCDCC
//! reserved 3 0 5 2
//! frames 36 30 28
//! ```
//! Design:
//! ```text
//! module fir 25 0 5
//! connect fir dec 64
//! weights 0.5 0.5
//! ```
//! `#` starts a comment.

use std::fmt::Write as _;

use tessplan_core::{
    ConnectionSpec, Design, Fabric, FrameWeights, ModuleSpec, Rect, ResourceKind, ResourceVector, Weights,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{0}")]
    Invalid(#[from] tessplan_core::Error),
}

struct Line<'a> {
    number: usize,
    tokens: Vec<(usize, &'a str)>,
}

impl<'a> Line<'a> {
    fn error(&self, token: usize, message: impl Into<String>) -> ParseError {
        let column = self.tokens.get(token).map_or(1, |t| t.0);
        ParseError::Syntax { line: self.number, column, message: message.into() }
    }

    fn expect_len(&self, n: usize) -> Result<(), ParseError> {
        if self.tokens.len() < n {
            let col = self.tokens.last().map_or(1, |(c, t)| c + t.len());
            return Err(ParseError::Syntax {
                line: self.number,
                column: col,
                message: format!("`{}` expects {} arguments", self.tokens[0].1, n - 1),
            });
        }
        if self.tokens.len() > n {
            return Err(self.error(n, "unexpected trailing token"));
        }
        Ok(())
    }

    fn parse<T: std::str::FromStr>(&self, token: usize, what: &str) -> Result<T, ParseError> {
        let text = self.tokens[token].1;
        text.parse().map_err(|_| self.error(token, format!("invalid {what} `{text}`")))
    }
}

fn lines(text: &str) -> impl Iterator<Item = Line<'_>> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let mut tokens = Vec::new();
        let mut start = None;
        for (pos, ch) in body.char_indices().chain(std::iter::once((body.len(), ' '))) {
            match (ch.is_whitespace(), start) {
                (false, None) => start = Some(pos),
                (true, Some(s)) => {
                    tokens.push((s + 1, &body[s..pos]));
                    start = None;
                }
                _ => {}
            }
        }
        (!tokens.is_empty()).then_some(Line { number: i + 1, tokens })
    })
}

pub fn parse_fabric(text: &str) -> Result<Fabric, ParseError> {
    let mut rows = None;
    let mut columns: Option<(Vec<ResourceKind>, usize)> = None;
    let mut reserved = Vec::new();
    let mut frames = None;
    for line in lines(text) {
        match line.tokens[0].1 {
            "rows" => {
                line.expect_len(2)?;
                if rows.is_some() {
                    return Err(line.error(0, "duplicate `rows`"));
                }
                rows = Some(line.parse::<u32>(1, "row count")?);
            }
            "columns" => {
                line.expect_len(2)?;
                let (col0, s) = line.tokens[1];
                let mut kinds = Vec::with_capacity(s.len());
                for (i, ch) in s.chars().enumerate() {
                    let kind = ResourceKind::from_code(ch).ok_or_else(|| ParseError::Syntax {
                        line: line.number,
                        column: col0 + i,
                        message: format!("unknown column kind `{ch}`"),
                    })?;
                    kinds.push(kind);
                }
                match &columns {
                    Some((prev, _)) if *prev != kinds => {
                        return Err(line.error(1, "non-uniform column kinds: every `columns` line must be identical"));
                    }
                    Some(_) => {}
                    None => columns = Some((kinds, line.number)),
                }
            }
            "reserved" => {
                line.expect_len(5)?;
                let v: Vec<u32> = (1..5).map(|i| line.parse(i, "coordinate")).collect::<Result<_, _>>()?;
                if v[0] > v[2] || v[1] > v[3] {
                    return Err(line.error(1, "reserved rect corners out of order"));
                }
                reserved.push(Rect::new(v[0], v[1], v[2], v[3]));
            }
            "frames" => {
                line.expect_len(4)?;
                if frames.is_some() {
                    return Err(line.error(0, "duplicate `frames`"));
                }
                frames = Some(FrameWeights {
                    clb: line.parse(1, "frame count")?,
                    bram: line.parse(2, "frame count")?,
                    dsp: line.parse(3, "frame count")?,
                });
            }
            other => return Err(line.error(0, format!("unknown directive `{other}`"))),
        }
    }
    let missing = |what: &str| ParseError::Syntax {
        line: text.lines().count().max(1),
        column: 1,
        message: format!("missing `{what}`"),
    };
    let rows = rows.ok_or_else(|| missing("rows"))?;
    let (columns, _) = columns.ok_or_else(|| missing("columns"))?;
    Ok(Fabric::new(rows, columns, &reserved, frames.unwrap_or_default())?)
}

pub fn write_fabric(fabric: &Fabric) -> String {
    let mut out = String::new();
    writeln!(out, "rows {}", fabric.rows()).unwrap();
    let cols: String = fabric.columns().iter().map(|k| k.code()).collect();
    writeln!(out, "columns {cols}").unwrap();
    for r in fabric.reserved_rects() {
        writeln!(out, "reserved {} {} {} {}", r.row0, r.col0, r.row1, r.col1).unwrap();
    }
    let f = fabric.frames();
    if f != FrameWeights::default() {
        writeln!(out, "frames {} {} {}", f.clb, f.bram, f.dsp).unwrap();
    }
    out
}

pub fn parse_design(text: &str) -> Result<Design, ParseError> {
    let mut modules = Vec::new();
    let mut links = Vec::new();
    let mut weights = None;
    for line in lines(text) {
        match line.tokens[0].1 {
            "module" => {
                line.expect_len(5)?;
                let req = ResourceVector::new(
                    line.parse(2, "CLB count")?,
                    line.parse(3, "BRAM count")?,
                    line.parse(4, "DSP count")?,
                );
                modules.push(ModuleSpec::new(line.tokens[1].1, req));
            }
            "connect" => {
                line.expect_len(4)?;
                links.push(ConnectionSpec::new(line.tokens[1].1, line.tokens[2].1, line.parse(3, "signal count")?));
            }
            "weights" => {
                line.expect_len(3)?;
                if weights.is_some() {
                    return Err(line.error(0, "duplicate `weights`"));
                }
                let w = Weights::new(line.parse(1, "weight")?, line.parse(2, "weight")?)
                    .map_err(|e| line.error(1, e.to_string()))?;
                weights = Some(w);
            }
            other => return Err(line.error(0, format!("unknown directive `{other}`"))),
        }
    }
    Ok(Design::new(modules, &links, weights.unwrap_or_default())?)
}

pub fn write_design(design: &Design) -> String {
    let mut out = String::new();
    for m in design.modules() {
        writeln!(out, "module {} {} {} {}", m.id, m.req.clb, m.req.bram, m.req.dsp).unwrap();
    }
    for c in design.connections() {
        writeln!(out, "connect {} {} {}", design.module(c.a).id, design.module(c.b).id, c.signals).unwrap();
    }
    let w = design.weights();
    writeln!(out, "weights {:?} {:?}", w.alpha, w.beta).unwrap();
    out
}
