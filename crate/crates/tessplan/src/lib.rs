//! File formats, rendering, validation and the command-line flow around
//! [`tessplan_core`].

pub mod document;
pub mod format;
pub mod render;
pub mod run;
pub mod validate;

pub use document::{FloorplanDocument, PlacedModule};
pub use format::{parse_design, parse_fabric, write_design, write_fabric, ParseError};
pub use run::{run_floorplan, RenderFormat, RunConfig, RunReport, Status};
pub use validate::{validate, Violation};
