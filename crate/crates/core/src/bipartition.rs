//! Recursive pseudo-bipartitioning that estimates an anchor point per module.
//!
//! Each partition is halved along one axis. Modules whose candidates fit
//! mostly on one side become binary variables of a quadratic model whose
//! objective counts extent-weighted signal crossings of the cut (including
//! links to modules outside the partition) and whose constraints keep each
//! half within its resources. Assigned modules take the center of their half
//! as anchor and the recursion continues in both halves.

use alloc::vec;
use alloc::vec::Vec;

use crate::bqp::{solve_bqp, BqpModel, SolverConfig};
use crate::budget::Stopwatch;
use crate::design::Design;
use crate::error::{Error, Result};
use crate::fabric::{Fabric, Point, Rect, ResourceKind, ResourceVector};
use crate::tessellation::PlacementCandidate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    /// Cuts along a column boundary; resolves anchor x.
    Vertical,
    /// Cuts along a row boundary; resolves anchor y.
    Horizontal,
}

impl Axis {
    fn extent(self, rect: &Rect) -> u32 {
        match self {
            Axis::Vertical => rect.width(),
            Axis::Horizontal => rect.height(),
        }
    }

    fn coord2(self, p: &Point) -> u32 {
        match self {
            Axis::Vertical => p.x2,
            Axis::Horizontal => p.y2,
        }
    }

    fn set_coord2(self, p: &mut Point, v: u32) {
        match self {
            Axis::Vertical => p.x2 = v,
            Axis::Horizontal => p.y2 = v,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub rect: Rect,
    pub members: Vec<usize>,
    /// Candidate indices (into the module's full list) still eligible, parallel to `members`.
    pub eligible: Vec<Vec<usize>>,
    pub available: ResourceVector,
}

impl Partition {
    pub fn new(fabric: &Fabric, rect: Rect) -> Result<Self> {
        Ok(Partition {
            rect,
            members: Vec::new(),
            eligible: Vec::new(),
            available: fabric.free_resources_in_rect(&rect)?,
        })
    }

    pub fn center(&self) -> Point {
        self.rect.center()
    }
}

/// Halves `parent` (floor of the span goes to child 0, left or bottom). The
/// children start empty with their free tiles as `available`.
pub fn split_partition(fabric: &Fabric, parent: &Partition, axis: Axis) -> Result<(Partition, Partition)> {
    let r = parent.rect;
    let (a, b) = match axis {
        Axis::Vertical => {
            if r.width() < 2 {
                return Err(Error::Unsplittable(r));
            }
            let mid = r.col0 + r.width() / 2;
            (Rect::new(r.row0, r.col0, r.row1, mid - 1), Rect::new(r.row0, mid, r.row1, r.col1))
        }
        Axis::Horizontal => {
            if r.height() < 2 {
                return Err(Error::Unsplittable(r));
            }
            let mid = r.row0 + r.height() / 2;
            (Rect::new(r.row0, r.col0, mid - 1, r.col1), Rect::new(mid, r.col0, r.row1, r.col1))
        }
    };
    Ok((Partition::new(fabric, a)?, Partition::new(fabric, b)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Zero,
    One,
    Neither,
}

/// Child holding at least `threshold` of the candidate's tiles.
pub fn placement_side(rect: &Rect, child0: &Partition, child1: &Partition, threshold: f64) -> Side {
    let area = rect.area() as f64;
    if rect.overlap_area(&child0.rect) as f64 >= threshold * area {
        Side::Zero
    } else if rect.overlap_area(&child1.rect) as f64 >= threshold * area {
        Side::One
    } else {
        Side::Neither
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SideData {
    pub module: usize,
    pub placements0: Vec<usize>,
    pub placements1: Vec<usize>,
    /// Mean extent across the cut of each side's candidates, `None` if the side is empty.
    pub w0: Option<f64>,
    pub w1: Option<f64>,
    /// Componentwise minimum resources over each side's candidates.
    pub occ0: Option<ResourceVector>,
    pub occ1: Option<ResourceVector>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Eligibility {
    Both,
    OnlyZero,
    OnlyOne,
    ParentOnly,
}

impl SideData {
    pub fn eligibility(&self) -> Eligibility {
        match (self.placements0.is_empty(), self.placements1.is_empty()) {
            (false, false) => Eligibility::Both,
            (false, true) => Eligibility::OnlyZero,
            (true, false) => Eligibility::OnlyOne,
            (true, true) => Eligibility::ParentOnly,
        }
    }
}

pub fn side_data(
    module: usize,
    candidates: &[PlacementCandidate],
    eligible: &[usize],
    child0: &Partition,
    child1: &Partition,
    axis: Axis,
    threshold: f64,
) -> SideData {
    let mut sides = (Vec::new(), Vec::new());
    for &i in eligible {
        match placement_side(&candidates[i].rect, child0, child1, threshold) {
            Side::Zero => sides.0.push(i),
            Side::One => sides.1.push(i),
            Side::Neither => {}
        }
    }
    let mean = |idx: &[usize]| {
        (!idx.is_empty())
            .then(|| idx.iter().map(|&i| axis.extent(&candidates[i].rect) as f64).sum::<f64>() / idx.len() as f64)
    };
    let least = |idx: &[usize]| idx.iter().map(|&i| candidates[i].resources).reduce(|a, b| a.component_min(&b));
    SideData {
        module,
        w0: mean(&sides.0),
        w1: mean(&sides.1),
        occ0: least(&sides.0),
        occ1: least(&sides.1),
        placements0: sides.0,
        placements1: sides.1,
    }
}

/// Extent-weighted crossing cost of one link between members `i` and `j`.
/// Zero whenever both sit on the same side.
pub fn pair_cut_cost(n: f64, m_i: bool, m_j: bool, w_i0: f64, w_i1: f64, w_j0: f64, w_j1: f64) -> f64 {
    let (mi, mj) = (m_i as u8 as f64, m_j as u8 as f64);
    n * (mi * (w_i1 + w_j0) + mj * (w_i0 + w_j1) - mi * mj * (w_i0 + w_j0 + w_i1 + w_j1))
}

/// Crossing cost of a link from member `i` to a module outside the
/// partition whose side is already known.
pub fn external_cut_cost(n: f64, m_i: bool, w_i0: f64, w_i1: f64, external_side: bool, w_e: f64) -> f64 {
    let mi = m_i as u8 as f64;
    if external_side {
        n * (1.0 - mi) * (w_i0 + w_e)
    } else {
        n * mi * (w_i1 + w_e)
    }
}

/// A model plus the bookkeeping needed to read its solution back.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionModel {
    pub model: BqpModel,
    /// `side_data` index of each model variable.
    pub variables: Vec<usize>,
    /// `side_data` index and side of every member pinned to one child.
    pub fixed: Vec<(usize, bool)>,
}

impl PartitionModel {
    /// Side of every non-parent-only entry of `side_data`, given a model solution.
    pub fn sides(&self, solution: &[bool], len: usize) -> Vec<Option<bool>> {
        let mut out = vec![None; len];
        for (&s, &v) in self.variables.iter().zip(solution) {
            out[s] = Some(v);
        }
        for &(s, v) in &self.fixed {
            out[s] = Some(v);
        }
        out
    }
}

#[derive(Clone, Copy)]
enum Term {
    Free(usize),
    Fixed(bool),
}

/// Builds the cut model for one split.
///
/// `is_member[m]` marks modules whose link terms are internal; links from a
/// member to any other module use that module's current anchor relative to
/// `cut2` (half-tile units, ties on side 0) and its extent from `extents`.
/// Parent-only members count as outside. `available` holds the child
/// capacities after deductions.
pub fn build_bqp(
    design: &Design,
    side_data: &[SideData],
    anchors: &[Point],
    extents: &[f64],
    axis: Axis,
    cut2: u32,
    available: (ResourceVector, ResourceVector),
) -> Result<PartitionModel> {
    let mut slot = vec![None; design.len()];
    let mut variables = Vec::new();
    let mut fixed = Vec::new();
    for (s, d) in side_data.iter().enumerate() {
        let term = match d.eligibility() {
            Eligibility::Both => {
                variables.push(s);
                Term::Free(variables.len() - 1)
            }
            Eligibility::OnlyZero => {
                fixed.push((s, false));
                Term::Fixed(false)
            }
            Eligibility::OnlyOne => {
                fixed.push((s, true));
                Term::Fixed(true)
            }
            Eligibility::ParentOnly => continue,
        };
        slot[d.module] = Some((s, term));
    }

    let (mut cap0, mut cap1) = available;
    for &(s, side) in &fixed {
        let d = &side_data[s];
        let (cap, occ) = if side { (&mut cap1, d.occ1) } else { (&mut cap0, d.occ0) };
        let occ = occ.expect("pinned side has candidates");
        *cap = cap.checked_sub(&occ).ok_or(Error::BqpInfeasible)?;
    }

    let mut model = BqpModel::new(variables.len(), cap0, cap1);
    for (k, &s) in variables.iter().enumerate() {
        let d = &side_data[s];
        model.set_occupancy(k, d.occ0.unwrap(), d.occ1.unwrap());
    }

    let ext = |s: usize| (side_data[s].w0.unwrap_or(0.0), side_data[s].w1.unwrap_or(0.0));
    for c in design.connections() {
        let n = c.signals as f64;
        match (&slot[c.a], &slot[c.b]) {
            (Some((si, ti)), Some((sj, tj))) => {
                let (wi0, wi1) = ext(*si);
                let (wj0, wj1) = ext(*sj);
                // n·(W1·m_i + W2·m_j − (W1+W2)·m_i·m_j)
                let w1 = n * (wi1 + wj0);
                let w2 = n * (wi0 + wj1);
                match (ti, tj) {
                    (Term::Free(i), Term::Free(j)) => {
                        model.add_linear(*i, w1);
                        model.add_linear(*j, w2);
                        model.add_quadratic(*i, *j, -(w1 + w2));
                    }
                    (Term::Free(i), Term::Fixed(v)) => {
                        let v = *v as u8 as f64;
                        model.add_linear(*i, w1 - v * (w1 + w2));
                        model.add_constant(w2 * v);
                    }
                    (Term::Fixed(u), Term::Free(j)) => {
                        let u = *u as u8 as f64;
                        model.add_linear(*j, w2 - u * (w1 + w2));
                        model.add_constant(w1 * u);
                    }
                    (Term::Fixed(u), Term::Fixed(v)) => {
                        model.add_constant(pair_cut_cost(n, *u, *v, wi0, wi1, wj0, wj1));
                    }
                }
            }
            (Some((s, t)), None) | (None, Some((s, t))) => {
                let other = if slot[c.a].is_some() { c.b } else { c.a };
                let external_side = axis.coord2(&anchors[other]) > cut2;
                let (w0, w1) = ext(*s);
                let we = extents[other];
                match t {
                    Term::Free(k) => {
                        // side 0: n·m·(w1+we); side 1: n·(1−m)·(w0+we)
                        if external_side {
                            model.add_constant(n * (w0 + we));
                            model.add_linear(*k, -n * (w0 + we));
                        } else {
                            model.add_linear(*k, n * (w1 + we));
                        }
                    }
                    Term::Fixed(v) => model.add_constant(external_cut_cost(n, *v, w0, w1, external_side, we)),
                }
            }
            (None, None) => {}
        }
    }
    Ok(PartitionModel { model, variables, fixed })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BipartitionConfig {
    /// Minimum fraction of a candidate's tiles inside a child for it to count there.
    pub threshold: f64,
    pub solver: SolverConfig,
}

impl Default for BipartitionConfig {
    fn default() -> Self {
        BipartitionConfig { threshold: 0.75, solver: SolverConfig::default() }
    }
}

/// One solved (or failed) partition model.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveRecord {
    pub axis: Axis,
    pub rect: Rect,
    pub variables: usize,
    pub objective: Option<f64>,
    pub work: u64,
    pub proven_optimal: bool,
    pub elapsed_micros: u64,
}

struct Recursion<'a> {
    fabric: &'a Fabric,
    design: &'a Design,
    candidates: &'a [Vec<PlacementCandidate>],
    axis: Axis,
    config: BipartitionConfig,
    extents: Vec<f64>,
    linked: Vec<bool>,
    clock: &'a dyn Stopwatch,
    log: Vec<SolveRecord>,
}

impl Recursion<'_> {
    fn cut2(&self, child1: &Partition) -> u32 {
        match self.axis {
            Axis::Vertical => 2 * child1.rect.col0,
            Axis::Horizontal => 2 * child1.rect.row0,
        }
    }

    // Updates to apply on top of `anchors`, in order.
    fn descend(&mut self, node: Partition, anchors: &[Point], root: bool) -> Result<Vec<(usize, u32)>> {
        let worth_splitting = node.members.len() >= 2 || node.members.iter().any(|&m| self.linked[m]);
        if node.members.is_empty() || !worth_splitting || self.axis.extent(&node.rect) < 2 {
            return Ok(Vec::new());
        }
        let (mut child0, mut child1) = split_partition(self.fabric, &node, self.axis)?;

        let data: Vec<SideData> = node
            .members
            .iter()
            .zip(&node.eligible)
            .map(|(&m, el)| side_data(m, &self.candidates[m], el, &child0, &child1, self.axis, self.config.threshold))
            .collect();

        // inherited deficit plus parent-only requirements, shared by tile area
        let free = self.fabric.free_resources_in_rect(&node.rect)?;
        let mut deduction = free.saturating_sub(&node.available);
        for d in data.iter().filter(|d| d.eligibility() == Eligibility::ParentOnly) {
            deduction += self.design.module(d.module).req;
        }
        let (a0, a1) = (child0.rect.area() as u64, child1.rect.area() as u64);
        let mut ded0 = ResourceVector::ZERO;
        for k in ResourceKind::ALL {
            *ded0.get_mut(k) = (deduction.get(k) as u64 * a0 / (a0 + a1)) as u32;
        }
        let ded1 = deduction.saturating_sub(&ded0);
        child0.available = child0.available.saturating_sub(&ded0);
        child1.available = child1.available.saturating_sub(&ded1);

        let mut updates = Vec::new();
        let center = self.axis.coord2(&node.center());
        for d in data.iter().filter(|d| d.eligibility() == Eligibility::ParentOnly) {
            updates.push((d.module, center));
        }
        if data.iter().all(|d| d.eligibility() == Eligibility::ParentOnly) {
            return Ok(updates);
        }

        let cut2 = self.cut2(&child1);
        let start = self.clock.elapsed_micros();
        let built = build_bqp(
            self.design,
            &data,
            anchors,
            &self.extents,
            self.axis,
            cut2,
            (child0.available, child1.available),
        );
        let solved = built.and_then(|b| solve_bqp(&b.model, &self.config.solver).map(|s| (b, s)));
        let elapsed = self.clock.elapsed_micros().saturating_sub(start);

        let (built, solution) = match solved {
            Ok(ok) => ok,
            Err(_) => {
                self.log.push(SolveRecord {
                    axis: self.axis,
                    rect: node.rect,
                    variables: data.iter().filter(|d| d.eligibility() == Eligibility::Both).count(),
                    objective: None,
                    work: 0,
                    proven_optimal: false,
                    elapsed_micros: elapsed,
                });
                if root {
                    return Err(Error::RootInfeasible);
                }
                // members stay at this partition's center
                return Ok(updates);
            }
        };
        self.log.push(SolveRecord {
            axis: self.axis,
            rect: node.rect,
            variables: built.variables.len(),
            objective: Some(solution.objective),
            work: solution.work,
            proven_optimal: solution.proven_optimal,
            elapsed_micros: elapsed,
        });

        let c0 = self.axis.coord2(&child0.center());
        let c1 = self.axis.coord2(&child1.center());
        for (d, side) in data.into_iter().zip(built.sides(&solution.assignment, node.members.len())) {
            let Some(side) = side else { continue };
            let (child, coord, eligible) =
                if side { (&mut child1, c1, d.placements1) } else { (&mut child0, c0, d.placements0) };
            child.members.push(d.module);
            child.eligible.push(eligible);
            updates.push((d.module, coord));
        }

        let mut snapshot = anchors.to_vec();
        for &(m, v) in &updates {
            self.axis.set_coord2(&mut snapshot[m], v);
        }
        let below0 = self.descend(child0, &snapshot, false)?;
        let below1 = self.descend(child1, &snapshot, false)?;
        updates.extend(below0);
        updates.extend(below1);
        Ok(updates)
    }
}

/// Anchors from one recursive pass along `axis`, plus the per-solve log. Only
/// the coordinate resolved by `axis` moves away from the device center.
pub fn recursive_bipartition(
    fabric: &Fabric,
    design: &Design,
    candidates: &[Vec<PlacementCandidate>],
    axis: Axis,
    config: &BipartitionConfig,
    clock: &dyn Stopwatch,
) -> Result<(Vec<Point>, Vec<SolveRecord>)> {
    let full = fabric.full_rect();
    let mut root = Partition::new(fabric, full)?;
    root.members = (0..design.len()).collect();
    root.eligible = candidates.iter().map(|c| (0..c.len()).collect()).collect();

    let extents = candidates
        .iter()
        .map(|c| {
            if c.is_empty() {
                0.0
            } else {
                c.iter().map(|p| axis.extent(&p.rect) as f64).sum::<f64>() / c.len() as f64
            }
        })
        .collect();
    let mut linked = vec![false; design.len()];
    for c in design.connections() {
        linked[c.a] = true;
        linked[c.b] = true;
    }

    let mut rec =
        Recursion { fabric, design, candidates, axis, config: *config, extents, linked, clock, log: Vec::new() };
    let mut anchors = vec![full.center(); design.len()];
    let updates = rec.descend(root, &anchors, true)?;
    for (m, v) in updates {
        axis.set_coord2(&mut anchors[m], v);
    }
    Ok((anchors, rec.log))
}

/// Runs the vertical and the horizontal pass independently from the root and
/// combines x from the first with y from the second.
pub fn anchor_points(
    fabric: &Fabric,
    design: &Design,
    candidates: &[Vec<PlacementCandidate>],
    config: &BipartitionConfig,
    clock: &dyn Stopwatch,
) -> Result<(Vec<Point>, Vec<SolveRecord>)> {
    let (xs, mut log) = recursive_bipartition(fabric, design, candidates, Axis::Vertical, config, clock)?;
    let (ys, log_h) = recursive_bipartition(fabric, design, candidates, Axis::Horizontal, config, clock)?;
    log.extend(log_h);
    let anchors = xs.iter().zip(&ys).map(|(x, y)| Point { x2: x.x2, y2: y.y2 }).collect();
    Ok((anchors, log))
}
