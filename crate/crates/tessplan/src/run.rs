//! Subcommand implementations shared by the binary and the test suites.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context as _;
use serde::Serialize;
use tessplan_core::bipartition::{Axis, SolveRecord};
use tessplan_core::design::generate_random_design;
use tessplan_core::{run_pipeline, AspectBounds, Design, Error, Fabric, Occupancy, PipelineConfig, Stopwatch, Weights};

use crate::document::FloorplanDocument;
use crate::format::{parse_design, parse_fabric, write_design};
use crate::render::{render_ascii, render_svg};

pub struct WallClock(Instant);

impl WallClock {
    pub fn start() -> Self {
        WallClock(Instant::now())
    }
}

impl Stopwatch for WallClock {
    fn elapsed_micros(&self) -> u64 {
        self.0.elapsed().as_micros() as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    ParseError,
    InfeasibleModule,
    InfeasibleFloorplan,
    Timeout,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::ParseError => 1,
            Status::InfeasibleModule => 2,
            Status::InfeasibleFloorplan => 3,
            Status::Timeout => 4,
        }
    }

    fn of(error: &Error) -> Status {
        match error {
            Error::InfeasibleModule(_) => Status::InfeasibleModule,
            Error::Timeout { .. } => Status::Timeout,
            Error::InfeasibleFloorplan { .. }
            | Error::RootInfeasible
            | Error::BqpInfeasible
            | Error::BqpBudgetExhausted => Status::InfeasibleFloorplan,
            _ => Status::ParseError,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Ok => "OK",
            Status::ParseError => "PARSE_ERROR",
            Status::InfeasibleModule => "INFEASIBLE_MODULE",
            Status::InfeasibleFloorplan => "INFEASIBLE_FLOORPLAN",
            Status::Timeout => "TIMEOUT",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RenderFormat {
    #[default]
    None,
    Svg,
    Ascii,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub fabric_path: PathBuf,
    pub design_path: PathBuf,
    /// Override the design file's weights when set.
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub aspect: Option<AspectBounds>,
    pub seed: u64,
    pub time_budget_secs: f64,
    pub output_path: Option<PathBuf>,
    pub render_format: RenderFormat,
    pub render_path: Option<PathBuf>,
    pub solve_log_path: Option<PathBuf>,
    pub include_runtime: bool,
}

impl RunConfig {
    pub fn new(fabric_path: impl Into<PathBuf>, design_path: impl Into<PathBuf>) -> Self {
        RunConfig {
            fabric_path: fabric_path.into(),
            design_path: design_path.into(),
            alpha: None,
            beta: None,
            aspect: Some(AspectBounds::default()),
            seed: 0,
            time_budget_secs: 60.0,
            output_path: None,
            render_format: RenderFormat::None,
            render_path: None,
            solve_log_path: None,
            include_runtime: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub status: Status,
    pub document: Option<FloorplanDocument>,
    pub wastage: u64,
    pub wirelength: u64,
    pub runtime_ms: u64,
    /// Diagnostic for failures.
    pub message: Option<String>,
}

impl RunReport {
    pub fn summary_line(&self) -> String {
        format!(
            "{} wastage={} wirelength={} runtime_ms={}",
            self.status, self.wastage, self.wirelength, self.runtime_ms
        )
    }
}

#[derive(Serialize)]
struct SolveLogLine {
    axis: &'static str,
    row0: u32,
    col0: u32,
    row1: u32,
    col1: u32,
    variables: usize,
    objective: Option<f64>,
    work: u64,
    proven_optimal: bool,
    solve_us: u64,
}

pub fn solve_log_jsonl(records: &[SolveRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let line = SolveLogLine {
            axis: match r.axis {
                Axis::Vertical => "vertical",
                Axis::Horizontal => "horizontal",
            },
            row0: r.rect.row0,
            col0: r.rect.col0,
            row1: r.rect.row1,
            col1: r.rect.col1,
            variables: r.variables,
            objective: r.objective,
            work: r.work,
            proven_optimal: r.proven_optimal,
            solve_us: r.elapsed_micros,
        };
        out.push_str(&serde_json::to_string(&line).expect("plain struct"));
        out.push('\n');
    }
    out
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn load_fabric(path: &Path) -> anyhow::Result<Fabric> {
    parse_fabric(&read(path)?).with_context(|| path.display().to_string())
}

pub fn load_design(path: &Path) -> anyhow::Result<Design> {
    parse_design(&read(path)?).with_context(|| path.display().to_string())
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

/// Runs the whole flow for `config`. Output files are written only on success
/// (the solve log is written whenever the partitioning stage completes).
pub fn run_floorplan(config: &RunConfig) -> RunReport {
    let clock = WallClock::start();
    let fail = |status: Status, message: String, clock: &WallClock| RunReport {
        status,
        document: None,
        wastage: 0,
        wirelength: 0,
        runtime_ms: clock.elapsed_micros() / 1000,
        message: Some(message),
    };
    let inputs = (|| {
        let fabric = load_fabric(&config.fabric_path)?;
        let mut design = load_design(&config.design_path)?;
        if config.alpha.is_some() || config.beta.is_some() {
            let w = design.weights();
            design =
                design.with_weights(Weights::new(config.alpha.unwrap_or(w.alpha), config.beta.unwrap_or(w.beta))?)?;
        }
        anyhow::Ok((fabric, design))
    })();
    let (fabric, design) = match inputs {
        Ok(v) => v,
        Err(e) => return fail(Status::ParseError, format!("{e:#}"), &clock),
    };

    let budget =
        if config.time_budget_secs.is_finite() { Some((config.time_budget_secs.max(0.0) * 1e6) as u64) } else { None };
    let pipeline = PipelineConfig { aspect: config.aspect, time_budget_micros: budget, ..PipelineConfig::default() };
    let outcome = match run_pipeline(&fabric, &design, &pipeline, &clock) {
        Ok(o) => o,
        Err(e) => return fail(Status::of(&e), e.to_string(), &clock),
    };

    let mut doc = FloorplanDocument::from_floorplan(&outcome.floorplan, &design, &fabric);
    let runtime_ms = clock.elapsed_micros() / 1000;
    if config.include_runtime {
        doc.runtime_ms = Some(runtime_ms);
    }
    let files = (|| {
        if let Some(p) = &config.output_path {
            write(p, &doc.to_text())?;
        }
        if let Some(p) = &config.solve_log_path {
            write(p, &solve_log_jsonl(&outcome.solve_log))?;
        }
        let picture = match config.render_format {
            RenderFormat::None => None,
            RenderFormat::Svg => Some(render_svg(&fabric, &doc.modules)),
            RenderFormat::Ascii => Some(render_ascii(&fabric, &doc.modules)),
        };
        if let (Some(p), Some(pic)) = (&config.render_path, &picture) {
            write(p, pic)?;
        }
        anyhow::Ok(picture)
    })();
    if let Err(e) = files {
        return fail(Status::ParseError, format!("{e:#}"), &clock);
    }
    RunReport {
        status: Status::Ok,
        wastage: doc.total_wastage_frames,
        wirelength: doc.total_wirelength,
        document: Some(doc),
        runtime_ms,
        message: None,
    }
}

/// Seeded random design for `fabric`, as design-file text.
pub fn generate_design_text(n: usize, fabric: &Fabric, occupancy: Occupancy, seed: u64) -> Result<String, Error> {
    generate_random_design(n, fabric, occupancy, seed).map(|d| write_design(&d))
}
