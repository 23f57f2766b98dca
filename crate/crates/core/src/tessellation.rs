//! Placement-candidate generation by columnar kernel tessellation.
//!
//! A kernel starts as a single primary-resource tile (optionally paired with
//! the nearest secondary column), is merged with its row neighbours when one
//! tile column cannot hold the primary requirement, grows upward until the
//! primary requirement is met, and then grows sideways (and upward) towards
//! the columns of the remaining resource kinds.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::design::{classify_modules, Design, PriorityClass};
use crate::error::{Error, Result};
use crate::fabric::{Fabric, Point, Rect, ResourceKind, ResourceVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Kernel {
    pub rect: Rect,
    pub resources: ResourceVector,
}

impl Kernel {
    fn at(fabric: &Fabric, rect: Rect) -> Kernel {
        Kernel { rect, resources: fabric.resources_unchecked(&rect) }
    }
}

/// Inclusive width/height bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AspectBounds {
    pub min: f64,
    pub max: f64,
}

impl Default for AspectBounds {
    fn default() -> Self {
        AspectBounds { min: 0.2, max: 0.7 }
    }
}

impl AspectBounds {
    pub fn new(min: f64, max: f64) -> Result<Self> {
        if min.is_finite() && max.is_finite() && 0.0 < min && min <= max {
            Ok(AspectBounds { min, max })
        } else {
            Err(Error::InvalidAspectBounds)
        }
    }

    pub fn admits(&self, rect: &Rect) -> bool {
        let ar = rect.aspect_ratio();
        self.min <= ar && ar <= self.max
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlacementCandidate {
    pub module: usize,
    pub rect: Rect,
    pub resources: ResourceVector,
    pub wastage_frames: u64,
    pub center: Point,
}

/// Kernels of one clock-region row, left to right, one per primary column.
pub fn base_kernels_for_row(fabric: &Fabric, row: u32, class: &PriorityClass) -> Vec<Kernel> {
    let cols = fabric.cols();
    let mut out = Vec::new();
    for col in 0..cols {
        if fabric.column_kind(col) != class.primary {
            continue;
        }
        let mut span = (col, col);
        if let Some(secondary) = class.secondary {
            if let Some(near) = nearest_column(fabric, col, secondary) {
                span = (col.min(near), col.max(near));
            }
        }
        let rect = Rect::new(row, span.0, row, span.1);
        if fabric.avoids_reserved(&rect) {
            out.push(Kernel::at(fabric, rect));
        }
    }
    out
}

// Equidistant candidates resolve to the left.
fn nearest_column(fabric: &Fabric, from: u32, kind: ResourceKind) -> Option<u32> {
    let cols = fabric.cols();
    for d in 0..cols {
        if d <= from && fabric.column_kind(from - d) == kind {
            return Some(from - d);
        }
        if from + d < cols && fabric.column_kind(from + d) == kind {
            return Some(from + d);
        }
    }
    None
}

/// Row-level merging. When no single kernel holds `needed` primary tiles,
/// every start kernel is merged with its right neighbours one at a time
/// (absorbing everything in between) until the span holds enough primary
/// tiles. The input kernels come first in the result, followed by the spans.
pub fn merge_row_kernels(fabric: &Fabric, kernels: &[Kernel], primary: ResourceKind, needed: u32) -> Vec<Kernel> {
    let mut out = kernels.to_vec();
    if kernels.iter().any(|k| k.resources.get(primary) >= needed) {
        return out;
    }
    for i in 0..kernels.len() {
        let mut rect = kernels[i].rect;
        for k in &kernels[i + 1..] {
            rect.col0 = rect.col0.min(k.rect.col0);
            rect.col1 = rect.col1.max(k.rect.col1);
            if !fabric.avoids_reserved(&rect) {
                // every wider span contains the same reserved tile
                break;
            }
            let merged = Kernel::at(fabric, rect);
            out.push(merged);
            if merged.resources.get(primary) >= needed {
                break;
            }
        }
    }
    out
}

/// Grows `kernel` upward one clock region at a time until it holds `needed`
/// primary tiles. `None` when the device top or a reserved tile is hit first.
pub fn expand_vertical(fabric: &Fabric, kernel: Kernel, primary: ResourceKind, needed: u32) -> Option<Kernel> {
    let mut k = kernel;
    while k.resources.get(primary) < needed {
        if k.rect.row1 + 1 >= fabric.rows() {
            return None;
        }
        let mut rect = k.rect;
        rect.row1 += 1;
        if !fabric.avoids_reserved(&rect) {
            return None;
        }
        k = Kernel::at(fabric, rect);
    }
    Some(k)
}

/// Bidirectional sideways growth towards `target` columns.
///
/// At the current height the number `N` of full-height `target` columns still
/// missing is computed and every split `l + r = N` is emitted (left
/// extension first grows from 0 to N). The kernel then grows upward by one
/// clock region and the enumeration repeats, until it cannot grow upward.
/// Extensions that would absorb another `primary` column or a reserved tile
/// are dropped. A kernel that already holds enough `target` tiles is emitted
/// as is.
pub fn expand_horizontal(
    fabric: &Fabric,
    kernel: Kernel,
    req: &ResourceVector,
    primary: ResourceKind,
    target: ResourceKind,
) -> Vec<Kernel> {
    let need = req.get(target);
    let mut out = Vec::new();
    let mut base = kernel;
    loop {
        let have = base.resources.get(target);
        if have >= need {
            out.push(base);
        } else {
            let n = (need - have).div_ceil(base.rect.height());
            let lefts = side_bounds(fabric, &base.rect, primary, target, n, Side::Left);
            let rights = side_bounds(fabric, &base.rect, primary, target, n, Side::Right);
            for l in 0..=n as usize {
                let r = n as usize - l;
                if let (Some(&col0), Some(&col1)) = (lefts.get(l), rights.get(r)) {
                    let rect = Rect::new(base.rect.row0, col0, base.rect.row1, col1);
                    out.push(Kernel::at(fabric, rect));
                }
            }
        }

        if base.rect.row1 + 1 >= fabric.rows() {
            break;
        }
        let mut up = base.rect;
        up.row1 += 1;
        if !fabric.avoids_reserved(&up) {
            break;
        }
        base = Kernel::at(fabric, up);
    }
    out
}

#[derive(Clone, Copy)]
enum Side {
    Left,
    Right,
}

// bounds[l] = outer column after taking l target columns on `side`.
fn side_bounds(
    fabric: &Fabric,
    rect: &Rect,
    primary: ResourceKind,
    target: ResourceKind,
    n: u32,
    side: Side,
) -> Vec<u32> {
    let mut bounds = Vec::with_capacity(n as usize + 1);
    bounds.push(match side {
        Side::Left => rect.col0,
        Side::Right => rect.col1,
    });
    let mut col = bounds[0];
    let mut taken = 0;
    while taken < n {
        col = match side {
            Side::Left if col == 0 => break,
            Side::Left => col - 1,
            Side::Right if col + 1 >= fabric.cols() => break,
            Side::Right => col + 1,
        };
        let kind = fabric.column_kind(col);
        if kind == primary {
            break;
        }
        let strip = Rect::new(rect.row0, col, rect.row1, col);
        if fabric.reserved_count(&strip) > 0 {
            break;
        }
        if kind == target {
            taken += 1;
            bounds.push(col);
        }
    }
    bounds
}

/// Candidates of one module in generation order, duplicates removed.
pub fn module_candidates(
    fabric: &Fabric,
    module: usize,
    req: &ResourceVector,
    class: &PriorityClass,
    aspect: Option<AspectBounds>,
) -> Vec<PlacementCandidate> {
    let primary = class.primary;
    let needed = req.get(primary);

    let mut kernels = Vec::new();
    for row in 0..fabric.rows() {
        let base = base_kernels_for_row(fabric, row, class);
        kernels.extend(merge_row_kernels(fabric, &base, primary, needed));
    }
    kernels.sort_by_key(|k| (k.rect.area(), k.rect.row0, k.rect.col0));

    let targets: Vec<ResourceKind> = [class.secondary, class.tertiary].into_iter().flatten().collect();
    let mut expanded: Vec<BTreeSet<Rect>> = (0..=targets.len()).map(|_| BTreeSet::new()).collect();
    let mut accepted = BTreeSet::new();
    let mut out = Vec::new();

    for k in kernels {
        let Some(grown) = expand_vertical(fabric, k, primary, needed) else {
            continue;
        };
        if !expanded[0].insert(grown.rect) {
            continue;
        }
        let mut stage = alloc::vec![grown];
        for (depth, &target) in targets.iter().enumerate() {
            let mut next = Vec::new();
            for k in stage {
                for e in expand_horizontal(fabric, k, req, primary, target) {
                    if expanded[depth + 1].insert(e.rect) {
                        next.push(e);
                    }
                }
            }
            stage = next;
        }
        for k in stage {
            let Some(surplus) = k.resources.checked_sub(req) else {
                continue;
            };
            if !fabric.avoids_reserved(&k.rect) || aspect.is_some_and(|a| !a.admits(&k.rect)) {
                continue;
            }
            if accepted.insert(k.rect) {
                out.push(PlacementCandidate {
                    module,
                    rect: k.rect,
                    resources: k.resources,
                    wastage_frames: fabric.frames_of(&surplus),
                    center: k.rect.center(),
                });
            }
        }
    }
    out
}

/// Candidate lists for every module, indexed like [`Design::modules`].
/// Modules are processed list by list (S1 to S4); each list is independent of
/// other modules' choices.
pub fn generate_placements(
    fabric: &Fabric,
    design: &Design,
    aspect: Option<AspectBounds>,
) -> Result<Vec<Vec<PlacementCandidate>>> {
    let mut out = alloc::vec![Vec::new(); design.len()];
    for (tag, m) in classify_modules(design).iter() {
        let spec = design.module(m);
        let cands = module_candidates(fabric, m, &spec.req, &tag.class(), aspect);
        if cands.is_empty() {
            return Err(Error::InfeasibleModule(spec.id.clone()));
        }
        out[m] = cands;
    }
    Ok(out)
}
