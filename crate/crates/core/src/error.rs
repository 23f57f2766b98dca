use alloc::string::String;

use crate::fabric::{Rect, ResourceKind};

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid fabric: {0}")]
    InvalidFabric(&'static str),

    #[error("rect {0} is outside the fabric")]
    RectOutOfBounds(Rect),

    #[error("duplicate module id `{0}`")]
    DuplicateModule(String),

    #[error("connection references unknown module `{0}`")]
    UnknownModule(String),

    #[error("module `{0}` has an all-zero requirement")]
    ZeroRequirement(String),

    #[error("connection {0} has a non-positive signal count")]
    NonPositiveSignals(String),

    #[error("module `{0}` is connected to itself")]
    SelfConnection(String),

    #[error("invalid weights: alpha and beta must be non-negative with a positive sum")]
    InvalidWeights,

    #[error("random design needs at least two modules")]
    TooFewModules,

    #[error("occupancy fraction for {0} must be in (0, 1]")]
    InvalidOccupancy(ResourceKind),

    #[error("infeasible occupancy: {kind} target of {target} tiles cannot be split over {modules} modules")]
    InfeasibleOccupancy { kind: ResourceKind, target: u32, modules: usize },

    #[error("invalid aspect-ratio bounds")]
    InvalidAspectBounds,

    #[error("candidate list is empty")]
    NoCandidates,

    #[error("module `{0}` has no feasible placement")]
    InfeasibleModule(String),

    #[error("partition {0} is too thin to split")]
    Unsplittable(Rect),

    #[error("partitioning model is infeasible")]
    BqpInfeasible,

    #[error("solver budget exhausted before any feasible assignment was found")]
    BqpBudgetExhausted,

    #[error("root partition is infeasible")]
    RootInfeasible,

    #[error("no feasible floorplan (deepest module reached: `{deepest}`)")]
    InfeasibleFloorplan { deepest: String },

    #[error("placement timed out after reaching depth {depth}")]
    Timeout { depth: usize },
}
