//! ASCII and SVG pictures of a fabric with placed modules. Row 0 is drawn at
//! the bottom.

use std::fmt::Write as _;

use tessplan_core::{Fabric, ResourceKind};

use crate::document::PlacedModule;

const TILE: u32 = 16;

fn owner(modules: &[PlacedModule], row: u32, col: u32) -> Option<&PlacedModule> {
    modules.iter().find(|m| {
        let r = m.rect;
        r.row0 <= row && row <= r.row1 && r.col0 <= col && col <= r.col1
    })
}

/// One character per tile: `.` CLB, `b` BRAM, `d` DSP, `#` reserved, and the
/// upper-cased first letter of the module id inside placed rects.
pub fn render_ascii(fabric: &Fabric, modules: &[PlacedModule]) -> String {
    let mut out = String::new();
    for row in (0..fabric.rows()).rev() {
        for col in 0..fabric.cols() {
            let ch = match owner(modules, row, col) {
                Some(m) => m.id.chars().next().map_or('?', |c| c.to_ascii_uppercase()),
                None if fabric.is_reserved(row, col) => '#',
                None => match fabric.column_kind(col) {
                    ResourceKind::Clb => '.',
                    ResourceKind::Bram => 'b',
                    ResourceKind::Dsp => 'd',
                },
            };
            out.push(ch);
        }
        out.push('\n');
    }
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

pub fn render_svg(fabric: &Fabric, modules: &[PlacedModule]) -> String {
    let (w, h) = (fabric.cols() * TILE, fabric.rows() * TILE);
    let mut out = String::new();
    writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#)
        .unwrap();
    out.push_str(concat!(
        r#"<defs><pattern id="hatch" width="4" height="4" patternUnits="userSpaceOnUse">"#,
        r##"<path d="M0,4 L4,0" stroke="#555" stroke-width="1"/></pattern></defs>"##,
        "\n"
    ));
    for row in 0..fabric.rows() {
        let y = (fabric.rows() - 1 - row) * TILE;
        for col in 0..fabric.cols() {
            let (class, fill) = match fabric.column_kind(col) {
                ResourceKind::Clb => ("clb", "#d9e6f2"),
                ResourceKind::Bram => ("bram", "#f2d9a6"),
                ResourceKind::Dsp => ("dsp", "#c9e8c0"),
            };
            let fill = if fabric.is_reserved(row, col) { "url(#hatch)" } else { fill };
            writeln!(
                out,
                r##"<rect class="tile {class}" x="{}" y="{y}" width="{TILE}" height="{TILE}" fill="{fill}" stroke="#ffffff"/>"##,
                col * TILE
            )
            .unwrap();
        }
    }
    for m in modules {
        let r = m.rect;
        let (x, y) = (r.col0 * TILE, (fabric.rows() - 1 - r.row1) * TILE);
        let (rw, rh) = (r.width() * TILE, r.height() * TILE);
        let id = escape(&m.id);
        writeln!(out, r##"<rect class="module" x="{x}" y="{y}" width="{rw}" height="{rh}" fill="none" stroke="#b22222" stroke-width="2"/>"##).unwrap();
        writeln!(out, r#"<text x="{}" y="{}" font-size="10" text-anchor="middle">{id}</text>"#, x + rw / 2, y + rh / 2)
            .unwrap();
    }
    out.push_str("</svg>\n");
    out
}
