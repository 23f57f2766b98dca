//! Resource-aware floorplanning of partially reconfigurable regions on
//! column-based heterogeneous FPGAs.
//!
//! The device is a grid of tiles (one column wide, one clock region high).
//! For every module the planner enumerates rectangular placement candidates,
//! estimates an anchor point by recursive bipartitioning of the device, scores
//! the candidates by wastage and anchor distance and finally picks one
//! non-overlapping candidate per module by backtracking.

#![no_std]

extern crate alloc;

pub mod bipartition;
pub mod bqp;
pub mod budget;
pub mod design;
pub mod error;
pub mod fabric;
pub mod pipeline;
pub mod placement;
pub mod tessellation;

pub use budget::{Deadline, NoClock, Stopwatch};
pub use design::{Connection, ConnectionSpec, Design, ModuleSpec, Occupancy, Weights};
pub use error::{Error, Result};
pub use fabric::{Fabric, FrameWeights, Point, Rect, ResourceKind, ResourceVector, TileCapacity};
pub use pipeline::{run_pipeline, Outcome, PipelineConfig};
pub use placement::Floorplan;
pub use tessellation::{AspectBounds, PlacementCandidate};
