//! End-to-end floorplanning run.

use alloc::vec::Vec;

use crate::bipartition::{anchor_points, BipartitionConfig, SolveRecord};
use crate::budget::{Deadline, Stopwatch};
use crate::design::Design;
use crate::error::Result;
use crate::fabric::{Fabric, Point};
use crate::placement::{normalize_candidates, order_modules, trial_and_error_place, Floorplan, ScoredCandidate};
use crate::tessellation::{generate_placements, AspectBounds};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig {
    /// `None` disables the aspect-ratio filter.
    pub aspect: Option<AspectBounds>,
    pub bipartition: BipartitionConfig,
    /// Placement budget; `None` for no limit.
    pub time_budget_micros: Option<u64>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            aspect: Some(AspectBounds::default()),
            bipartition: BipartitionConfig::default(),
            time_budget_micros: Some(60_000_000),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub floorplan: Floorplan,
    pub anchors: Vec<Point>,
    pub candidate_counts: Vec<usize>,
    pub order: Vec<usize>,
    pub solve_log: Vec<SolveRecord>,
}

/// Candidates, anchors, scoring, ordering and placement, in that order. The
/// design's weights drive the scoring.
pub fn run_pipeline(
    fabric: &Fabric,
    design: &Design,
    config: &PipelineConfig,
    clock: &dyn Stopwatch,
) -> Result<Outcome> {
    let candidates = generate_placements(fabric, design, config.aspect)?;
    let (anchors, solve_log) = anchor_points(fabric, design, &candidates, &config.bipartition, clock)?;
    let scored = candidates
        .iter()
        .zip(&anchors)
        .map(|(c, &a)| normalize_candidates(c, a, design.weights()))
        .collect::<Result<Vec<Vec<ScoredCandidate>>>>()?;
    let order = order_modules(design, fabric);
    let deadline = Deadline::new(clock, config.time_budget_micros);
    let placement = trial_and_error_place(fabric, design, &order, &scored, &deadline)?;
    Ok(Outcome {
        floorplan: Floorplan::from_rects(placement.rects, design, fabric, placement.backtracks)?,
        anchors,
        candidate_counts: candidates.iter().map(Vec::len).collect(),
        order,
        solve_log,
    })
}
