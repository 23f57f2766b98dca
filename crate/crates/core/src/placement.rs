//! Candidate scoring, module ordering and the backtracking placer.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::budget::Deadline;
use crate::design::{Design, Weights};
use crate::error::{Error, Result};
use crate::fabric::{Fabric, Point, Rect};
use crate::tessellation::PlacementCandidate;

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredCandidate {
    pub candidate: PlacementCandidate,
    pub wastage_norm: f64,
    pub anchor_dist_norm: f64,
    pub objective: f64,
}

fn candidate_order(a: &ScoredCandidate, b: &ScoredCandidate) -> Ordering {
    let (ra, rb) = (&a.candidate.rect, &b.candidate.rect);
    a.objective
        .total_cmp(&b.objective)
        .then(a.candidate.wastage_frames.cmp(&b.candidate.wastage_frames))
        .then(ra.row0.cmp(&rb.row0))
        .then(ra.col0.cmp(&rb.col0))
        .then(ra.row1.cmp(&rb.row1))
        .then(ra.col1.cmp(&rb.col1))
}

/// Scores one module's candidates against its anchor and sorts them best
/// first. Wastage and Manhattan distance are divided by their maxima over the
/// list (a zero maximum gives zero).
pub fn normalize_candidates(
    candidates: &[PlacementCandidate],
    anchor: Point,
    weights: Weights,
) -> Result<Vec<ScoredCandidate>> {
    if candidates.is_empty() {
        return Err(Error::NoCandidates);
    }
    let max_waste = candidates.iter().map(|c| c.wastage_frames).max().unwrap_or(0);
    let max_dist = candidates.iter().map(|c| c.center.manhattan2(&anchor)).max().unwrap_or(0);
    let norm = |v: u64, max: u64| if max == 0 { 0.0 } else { v as f64 / max as f64 };
    let mut scored: Vec<ScoredCandidate> = candidates
        .iter()
        .map(|c| {
            let wastage_norm = norm(c.wastage_frames, max_waste);
            let anchor_dist_norm = norm(c.center.manhattan2(&anchor), max_dist);
            ScoredCandidate {
                candidate: *c,
                wastage_norm,
                anchor_dist_norm,
                objective: weights.alpha * wastage_norm + weights.beta * anchor_dist_norm,
            }
        })
        .collect();
    scored.sort_by(candidate_order);
    Ok(scored)
}

/// Module indices by required frames, largest first, ties by id.
pub fn order_modules(design: &Design, fabric: &Fabric) -> Vec<usize> {
    let mut order: Vec<usize> = (0..design.len()).collect();
    order.sort_by(|&a, &b| {
        let (ma, mb) = (design.module(a), design.module(b));
        fabric.frames_of(&mb.req).cmp(&fabric.frames_of(&ma.req)).then_with(|| ma.id.cmp(&mb.id))
    });
    order
}

#[derive(Debug, Clone, PartialEq)]
pub struct Placement {
    /// Chosen rect per module index.
    pub rects: Vec<Rect>,
    /// Position of the chosen candidate in each module's scored list.
    pub choice: Vec<usize>,
    pub backtracks: u64,
}

struct Search {
    // `None` marks candidates that leave the device or touch reserved tiles
    lists: Vec<Vec<Option<Rect>>>,
    placed: Vec<Rect>,
}

impl Search {
    fn first_free(&self, depth: usize, from: usize) -> Option<usize> {
        (from..self.lists[depth].len())
            .find(|&i| self.lists[depth][i].is_some_and(|r| self.placed.iter().all(|p| !p.intersects(&r))))
    }
}

/// Depth-first trial and error over `order`: each module takes its candidates
/// in list order, skipping those that overlap an earlier pick or reserved
/// tiles, and the first complete assignment wins. After every pick each
/// remaining module must still have a free candidate, otherwise the pick is
/// abandoned right away; this never changes which assignment is found first.
pub fn trial_and_error_place(
    fabric: &Fabric,
    design: &Design,
    order: &[usize],
    scored: &[Vec<ScoredCandidate>],
    deadline: &Deadline<'_>,
) -> Result<Placement> {
    let n = order.len();
    if n == 0 {
        return Ok(Placement { rects: Vec::new(), choice: Vec::new(), backtracks: 0 });
    }
    let lists = order
        .iter()
        .map(|&m| {
            scored[m]
                .iter()
                .map(|s| Some(s.candidate.rect).filter(|r| fabric.in_bounds(r) && fabric.avoids_reserved(r)))
                .collect()
        })
        .collect();
    let mut search = Search { lists, placed: Vec::with_capacity(n) };

    // support[d][k]: no candidate of depth k before this index is free once depths < d are placed
    let mut support = vec![vec![0usize; n]; n + 1];
    let mut cursor = vec![0usize; n];
    let mut backtracks = 0u64;
    let mut deepest = 0usize;
    let mut blocked = 0usize;
    let mut depth = 0usize;

    loop {
        if deadline.expired() {
            return Err(Error::Timeout { depth: deepest });
        }
        deepest = deepest.max(depth);
        let mut picked = None;
        let mut from = cursor[depth].max(support[depth][depth]);
        while let Some(j) = search.first_free(depth, from) {
            from = j + 1;
            let rect = search.lists[depth][j].expect("free candidate");
            search.placed.push(rect);
            let mut viable = true;
            for k in depth + 1..n {
                match search.first_free(k, support[depth][k]) {
                    Some(x) => support[depth + 1][k] = x,
                    None => {
                        blocked = blocked.max(k);
                        viable = false;
                        break;
                    }
                }
            }
            if viable {
                picked = Some(j);
                break;
            }
            search.placed.pop();
        }
        match picked {
            Some(j) => {
                cursor[depth] = j + 1;
                if depth + 1 == n {
                    let mut rects = vec![Rect::new(0, 0, 0, 0); design.len()];
                    let mut choice = vec![0; design.len()];
                    for (d, &m) in order.iter().enumerate() {
                        rects[m] = search.placed[d];
                        choice[m] = cursor[d] - 1;
                    }
                    return Ok(Placement { rects, choice, backtracks });
                }
                depth += 1;
                cursor[depth] = 0;
            }
            None => {
                blocked = blocked.max(depth);
                if depth == 0 {
                    return Err(Error::InfeasibleFloorplan { deepest: design.module(order[blocked]).id.clone() });
                }
                backtracks += 1;
                depth -= 1;
                search.placed.pop();
            }
        }
    }
}

/// Frames inside each module's rect beyond its requirement, summed.
pub fn floorplan_wastage(rects: &[Rect], design: &Design, fabric: &Fabric) -> Result<u64> {
    let mut total = 0;
    for (m, rect) in rects.iter().enumerate() {
        let have = fabric.resources_in_rect(rect)?;
        total += fabric.frames_of(&have.saturating_sub(&design.module(m).req));
    }
    Ok(total)
}

/// Signal-weighted Manhattan distance between rect centers, in half-tile
/// units (twice the tile-unit value, so always an integer).
pub fn floorplan_wirelength2(rects: &[Rect], design: &Design) -> u64 {
    design.connections().iter().map(|c| c.signals as u64 * rects[c.a].center().manhattan2(&rects[c.b].center())).sum()
}

/// Tile-unit wirelength rounded half up.
pub fn floorplan_wirelength(rects: &[Rect], design: &Design) -> u64 {
    floorplan_wirelength2(rects, design).div_ceil(2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Floorplan {
    /// Rect per module index.
    pub rects: Vec<Rect>,
    pub total_wastage_frames: u64,
    /// Doubled wirelength so that half-tile centers stay exact.
    pub total_wirelength2: u64,
    pub backtracks: u64,
}

impl Floorplan {
    pub fn from_rects(rects: Vec<Rect>, design: &Design, fabric: &Fabric, backtracks: u64) -> Result<Self> {
        Ok(Floorplan {
            total_wastage_frames: floorplan_wastage(&rects, design, fabric)?,
            total_wirelength2: floorplan_wirelength2(&rects, design),
            rects,
            backtracks,
        })
    }

    pub fn total_wirelength(&self) -> u64 {
        self.total_wirelength2.div_ceil(2)
    }

    pub fn module_wastage(&self, module: usize, design: &Design, fabric: &Fabric) -> u64 {
        let have = fabric.resources_unchecked(&self.rects[module]);
        fabric.frames_of(&have.saturating_sub(&design.module(module).req))
    }
}
