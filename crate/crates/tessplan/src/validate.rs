//! Post-hoc floorplan checks that rely only on the output document, the
//! fabric and the module requirements. Resources are counted tile by tile.

use std::collections::HashMap;
use std::fmt;

use tessplan_core::{AspectBounds, Design, Fabric, Rect, ResourceKind};

use crate::document::FloorplanDocument;

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    OutOfBounds { id: String, rect: Rect },
    Reserved { id: String, row: u32, col: u32 },
    Overlap { a: String, b: String },
    Undercovered { id: String, kind: ResourceKind, have: u32, need: u32 },
    AspectRatio { id: String, ratio: f64 },
    Missing { id: String },
    Unknown { id: String },
    Duplicate { id: String },
    WastageMismatch { id: String, reported: u64, actual: u64 },
    TotalWastageMismatch { reported: u64, actual: u64 },
    TotalWirelengthMismatch { reported: u64, actual: u64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::OutOfBounds { id, rect } => write!(f, "{id}: rect {rect} leaves the device"),
            Violation::Reserved { id, row, col } => write!(f, "{id}: covers reserved tile ({row},{col})"),
            Violation::Overlap { a, b } => write!(f, "{a} overlaps {b}"),
            Violation::Undercovered { id, kind, have, need } => write!(f, "{id}: {have} {kind} tiles, needs {need}"),
            Violation::AspectRatio { id, ratio } => write!(f, "{id}: aspect ratio {ratio:.3} out of bounds"),
            Violation::Missing { id } => write!(f, "{id}: not placed"),
            Violation::Unknown { id } => write!(f, "{id}: not in the design"),
            Violation::Duplicate { id } => write!(f, "{id}: placed twice"),
            Violation::WastageMismatch { id, reported, actual } => {
                write!(f, "{id}: reported wastage {reported}, actual {actual}")
            }
            Violation::TotalWastageMismatch { reported, actual } => {
                write!(f, "total wastage reported {reported}, actual {actual}")
            }
            Violation::TotalWirelengthMismatch { reported, actual } => {
                write!(f, "total wirelength reported {reported}, actual {actual}")
            }
        }
    }
}

fn within(fabric: &Fabric, r: &Rect) -> bool {
    r.row0 <= r.row1 && r.col0 <= r.col1 && r.row1 < fabric.rows() && r.col1 < fabric.cols()
}

fn disjoint(a: &Rect, b: &Rect) -> bool {
    a.col1 < b.col0 || b.col1 < a.col0 || a.row1 < b.row0 || b.row1 < a.row0
}

/// Every violation found; an empty list means the floorplan is valid.
pub fn validate(
    doc: &FloorplanDocument,
    fabric: &Fabric,
    design: &Design,
    aspect: Option<AspectBounds>,
) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut seen: HashMap<&str, usize> = HashMap::new();
    let mut total_wastage = 0u64;
    let mut centers2: HashMap<&str, (u64, u64)> = HashMap::new();
    let frames = fabric.frames();

    for (i, m) in doc.modules.iter().enumerate() {
        if seen.insert(m.id.as_str(), i).is_some() {
            out.push(Violation::Duplicate { id: m.id.clone() });
            continue;
        }
        let Some(spec) = design.index_of(&m.id).map(|k| design.module(k)) else {
            out.push(Violation::Unknown { id: m.id.clone() });
            continue;
        };
        let r = m.rect;
        if !within(fabric, &r) {
            out.push(Violation::OutOfBounds { id: m.id.clone(), rect: r });
            continue;
        }
        let mut count = [0u32; 3];
        for row in r.row0..=r.row1 {
            for col in r.col0..=r.col1 {
                if fabric.is_reserved(row, col) {
                    out.push(Violation::Reserved { id: m.id.clone(), row, col });
                }
                count[match fabric.column_kind(col) {
                    ResourceKind::Clb => 0,
                    ResourceKind::Bram => 1,
                    ResourceKind::Dsp => 2,
                }] += 1;
            }
        }
        let need = [spec.req.clb, spec.req.bram, spec.req.dsp];
        let mut wastage = 0u64;
        for (k, kind) in ResourceKind::ALL.into_iter().enumerate() {
            if count[k] < need[k] {
                out.push(Violation::Undercovered { id: m.id.clone(), kind, have: count[k], need: need[k] });
            }
            let per = [frames.clb, frames.bram, frames.dsp][k] as u64;
            wastage += count[k].saturating_sub(need[k]) as u64 * per;
        }
        if m.wastage_frames != wastage {
            out.push(Violation::WastageMismatch { id: m.id.clone(), reported: m.wastage_frames, actual: wastage });
        }
        total_wastage += wastage;
        if let Some(a) = aspect {
            let ratio = r.width() as f64 / r.height() as f64;
            if ratio < a.min || ratio > a.max {
                out.push(Violation::AspectRatio { id: m.id.clone(), ratio });
            }
        }
        centers2.insert(m.id.as_str(), ((r.col0 + r.col1 + 1) as u64, (r.row0 + r.row1 + 1) as u64));
    }

    for (i, a) in doc.modules.iter().enumerate() {
        for b in &doc.modules[i + 1..] {
            if within(fabric, &a.rect) && within(fabric, &b.rect) && !disjoint(&a.rect, &b.rect) {
                out.push(Violation::Overlap { a: a.id.clone(), b: b.id.clone() });
            }
        }
    }
    for spec in design.modules() {
        if !seen.contains_key(spec.id.as_str()) {
            out.push(Violation::Missing { id: spec.id.clone() });
        }
    }
    if total_wastage != doc.total_wastage_frames {
        out.push(Violation::TotalWastageMismatch { reported: doc.total_wastage_frames, actual: total_wastage });
    }
    if out.is_empty() {
        let mut wl2 = 0u64;
        for c in design.connections() {
            let (pa, pb) = (centers2[design.module(c.a).id.as_str()], centers2[design.module(c.b).id.as_str()]);
            wl2 += c.signals as u64 * (pa.0.abs_diff(pb.0) + pa.1.abs_diff(pb.1));
        }
        let actual = wl2.div_ceil(2);
        if actual != doc.total_wirelength {
            out.push(Violation::TotalWirelengthMismatch { reported: doc.total_wirelength, actual });
        }
    }
    out
}
