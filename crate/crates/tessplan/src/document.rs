//! Floorplan output document.
//!
//! ```text
//! module video_decoder 0 12 7 21 216
//! summary total_wastage_frames=306 total_wirelength=1184 backtrack_count=0
//! ```
//! `runtime_ms=<n>` may follow on the summary line.

use std::fmt::Write as _;

use tessplan_core::{Design, Fabric, Floorplan, Rect};

use crate::format::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlacedModule {
    pub id: String,
    pub rect: Rect,
    pub wastage_frames: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FloorplanDocument {
    pub modules: Vec<PlacedModule>,
    pub total_wastage_frames: u64,
    pub total_wirelength: u64,
    pub backtrack_count: u64,
    pub runtime_ms: Option<u64>,
}

impl FloorplanDocument {
    /// Modules in design order.
    pub fn from_floorplan(floorplan: &Floorplan, design: &Design, fabric: &Fabric) -> Self {
        let modules = design
            .modules()
            .iter()
            .enumerate()
            .map(|(m, spec)| PlacedModule {
                id: spec.id.clone(),
                rect: floorplan.rects[m],
                wastage_frames: floorplan.module_wastage(m, design, fabric),
            })
            .collect();
        FloorplanDocument {
            modules,
            total_wastage_frames: floorplan.total_wastage_frames,
            total_wirelength: floorplan.total_wirelength(),
            backtrack_count: floorplan.backtracks,
            runtime_ms: None,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for m in &self.modules {
            let r = m.rect;
            writeln!(out, "module {} {} {} {} {} {}", m.id, r.row0, r.col0, r.row1, r.col1, m.wastage_frames).unwrap();
        }
        write!(
            out,
            "summary total_wastage_frames={} total_wirelength={} backtrack_count={}",
            self.total_wastage_frames, self.total_wirelength, self.backtrack_count
        )
        .unwrap();
        if let Some(ms) = self.runtime_ms {
            write!(out, " runtime_ms={ms}").unwrap();
        }
        out.push('\n');
        out
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let err = |line: usize, message: String| ParseError::Syntax { line, column: 1, message };
        let mut modules = Vec::new();
        let mut summary = None;
        for (i, raw) in text.lines().enumerate() {
            let n = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            match tokens[0] {
                "module" if summary.is_none() => {
                    if tokens.len() != 7 {
                        return Err(err(n, "`module` expects id, four coordinates and wastage".into()));
                    }
                    let num = |t: &str| t.parse::<u64>().map_err(|_| err(n, format!("invalid number `{t}`")));
                    let c: Vec<u64> = tokens[2..].iter().map(|t| num(t)).collect::<Result<_, _>>()?;
                    let coord = |v: u64| u32::try_from(v).map_err(|_| err(n, format!("coordinate {v} out of range")));
                    modules.push(PlacedModule {
                        id: tokens[1].to_string(),
                        rect: Rect::new(coord(c[0])?, coord(c[1])?, coord(c[2])?, coord(c[3])?),
                        wastage_frames: c[4],
                    });
                }
                "summary" if summary.is_none() => {
                    let mut fields = [None; 4];
                    for t in &tokens[1..] {
                        let (key, value) =
                            t.split_once('=').ok_or_else(|| err(n, format!("expected key=value, got `{t}`")))?;
                        let v: u64 = value.parse().map_err(|_| err(n, format!("invalid number `{value}`")))?;
                        let slot = match key {
                            "total_wastage_frames" => 0,
                            "total_wirelength" => 1,
                            "backtrack_count" => 2,
                            "runtime_ms" => 3,
                            _ => return Err(err(n, format!("unknown summary field `{key}`"))),
                        };
                        fields[slot] = Some(v);
                    }
                    let need = |i: usize, k: &str| fields[i].ok_or_else(|| err(n, format!("summary lacks `{k}`")));
                    summary = Some((
                        need(0, "total_wastage_frames")?,
                        need(1, "total_wirelength")?,
                        need(2, "backtrack_count")?,
                        fields[3],
                    ));
                }
                other => return Err(err(n, format!("unexpected record `{other}`"))),
            }
        }
        let (w, l, b, r) = summary.ok_or_else(|| err(text.lines().count().max(1), "missing summary record".into()))?;
        Ok(FloorplanDocument {
            modules,
            total_wastage_frames: w,
            total_wirelength: l,
            backtrack_count: b,
            runtime_ms: r,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let doc = FloorplanDocument {
            modules: vec![
                PlacedModule { id: "a".into(), rect: Rect::new(0, 1, 2, 3), wastage_frames: 72 },
                PlacedModule { id: "b".into(), rect: Rect::new(4, 4, 4, 4), wastage_frames: 0 },
            ],
            total_wastage_frames: 72,
            total_wirelength: 320,
            backtrack_count: 1,
            runtime_ms: None,
        };
        let text = doc.to_text();
        assert_eq!(FloorplanDocument::parse(&text).unwrap(), doc);
        let timed = FloorplanDocument { runtime_ms: Some(12), ..doc };
        assert_eq!(FloorplanDocument::parse(&timed.to_text()).unwrap(), timed);
    }

    #[test]
    fn malformed() {
        assert!(FloorplanDocument::parse("module a 0 0 0\n").is_err());
        assert!(FloorplanDocument::parse("module a 0 0 0 0 0\n").is_err());
        assert!(FloorplanDocument::parse("summary total_wastage_frames=1 total_wirelength=2\n").is_err());
        assert!(FloorplanDocument::parse(
            "summary total_wastage_frames=1 total_wirelength=2 backtrack_count=0\nmodule a 0 0 0 0 0\n"
        )
        .is_err());
    }
}
