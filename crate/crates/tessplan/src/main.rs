use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tessplan::run::{
    generate_design_text, load_design, load_fabric, run_floorplan, RenderFormat, RunConfig, Status, WallClock,
};
use tessplan::{validate, FloorplanDocument};
use tessplan_core::{AspectBounds, Occupancy, Stopwatch};

#[derive(Parser)]
#[command(version, about = "Floorplanner for partially reconfigurable FPGA regions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Render {
    None,
    Svg,
    Ascii,
}

#[derive(Subcommand)]
enum Command {
    /// Place every module of a design on a fabric.
    Floorplan {
        #[arg(long)]
        fabric: PathBuf,
        #[arg(long)]
        design: PathBuf,
        /// Wastage weight (defaults to the design file's value).
        #[arg(long)]
        alpha: Option<f64>,
        /// Anchor-distance weight (defaults to the design file's value).
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long, default_value_t = 0.2)]
        ar_min: f64,
        #[arg(long, default_value_t = 0.7)]
        ar_max: f64,
        /// Disable the aspect-ratio filter.
        #[arg(long)]
        no_ar: bool,
        /// Accepted for symmetry with `generate`; floorplanning is deterministic.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Placement search budget in seconds.
        #[arg(long, default_value_t = 60.0)]
        time_budget: f64,
        /// Floorplan document path (printed to stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Render::None)]
        render: Render,
        /// Where to write the rendering (stdout when absent).
        #[arg(long)]
        render_out: Option<PathBuf>,
        /// Add runtime_ms to the document's summary record.
        #[arg(long)]
        timing: bool,
        /// Write one JSON line per partition solve.
        #[arg(long)]
        solve_log: Option<PathBuf>,
    },
    /// Write a seeded pseudo-random design for a fabric.
    Generate {
        #[arg(long)]
        fabric: PathBuf,
        /// Number of modules.
        #[arg(short = 'n', long)]
        modules: usize,
        /// Fraction of free CLB tiles to occupy.
        #[arg(long)]
        clb: f64,
        #[arg(long)]
        bram: f64,
        #[arg(long)]
        dsp: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a floorplan document against its fabric and design.
    Validate {
        #[arg(long)]
        fabric: PathBuf,
        #[arg(long)]
        design: PathBuf,
        #[arg(long)]
        floorplan: PathBuf,
        /// Also require every rect's aspect ratio within the bounds.
        #[arg(long)]
        check_ar: bool,
        #[arg(long, default_value_t = 0.2)]
        ar_min: f64,
        #[arg(long, default_value_t = 0.7)]
        ar_max: f64,
    },
}

fn summary(status: impl std::fmt::Display, wastage: u64, wirelength: u64, clock: &WallClock) {
    println!("{status} wastage={wastage} wirelength={wirelength} runtime_ms={}", clock.elapsed_micros() / 1000);
}

fn aspect(min: f64, max: f64) -> Result<AspectBounds, String> {
    AspectBounds::new(min, max).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let clock = WallClock::start();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            summary(Status::ParseError, 0, 0, &clock);
            return ExitCode::from(Status::ParseError.exit_code() as u8);
        }
    };
    let code = match cli.command {
        Command::Floorplan {
            fabric,
            design,
            alpha,
            beta,
            ar_min,
            ar_max,
            no_ar,
            seed,
            time_budget,
            out,
            render,
            render_out,
            timing,
            solve_log,
        } => {
            let bounds = if no_ar {
                None
            } else {
                match aspect(ar_min, ar_max) {
                    Ok(a) => Some(a),
                    Err(e) => {
                        eprintln!("error: {e}");
                        summary(Status::ParseError, 0, 0, &clock);
                        return ExitCode::from(1);
                    }
                }
            };
            let config = RunConfig {
                alpha,
                beta,
                aspect: bounds,
                seed,
                time_budget_secs: time_budget,
                output_path: out.clone(),
                render_format: match render {
                    Render::None => RenderFormat::None,
                    Render::Svg => RenderFormat::Svg,
                    Render::Ascii => RenderFormat::Ascii,
                },
                render_path: render_out.clone(),
                solve_log_path: solve_log,
                include_runtime: timing,
                ..RunConfig::new(fabric, design)
            };
            let report = run_floorplan(&config);
            if let Some(msg) = &report.message {
                eprintln!("error: {msg}");
            }
            if let Some(doc) = &report.document {
                if out.is_none() {
                    print!("{}", doc.to_text());
                }
                if render_out.is_none() && !matches!(render, Render::None) {
                    let fabric = load_fabric(&config.fabric_path).expect("loaded once already");
                    print!(
                        "{}",
                        match render {
                            Render::Svg => tessplan::render::render_svg(&fabric, &doc.modules),
                            _ => tessplan::render::render_ascii(&fabric, &doc.modules),
                        }
                    );
                }
            }
            println!("{}", report.summary_line());
            report.status.exit_code()
        }
        Command::Generate { fabric, modules, clb, bram, dsp, seed, out } => {
            let result = load_fabric(&fabric).and_then(|f| {
                let text = generate_design_text(modules, &f, Occupancy::new(clb, bram, dsp), seed)?;
                match &out {
                    Some(p) => {
                        std::fs::write(p, &text).map_err(|e| anyhow::anyhow!("cannot write {}: {e}", p.display()))?
                    }
                    None => print!("{text}"),
                }
                Ok(())
            });
            match result {
                Ok(()) => {
                    summary(Status::Ok, 0, 0, &clock);
                    0
                }
                Err(e) => {
                    eprintln!("error: {e:#}");
                    summary(Status::ParseError, 0, 0, &clock);
                    1
                }
            }
        }
        Command::Validate { fabric, design, floorplan, check_ar, ar_min, ar_max } => {
            let loaded = (|| {
                let f = load_fabric(&fabric)?;
                let d = load_design(&design)?;
                let text = std::fs::read_to_string(&floorplan)
                    .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", floorplan.display()))?;
                let doc = FloorplanDocument::parse(&text)?;
                let bounds = if check_ar { Some(aspect(ar_min, ar_max).map_err(anyhow::Error::msg)?) } else { None };
                anyhow::Ok((f, d, doc, bounds))
            })();
            match loaded {
                Ok((f, d, doc, bounds)) => {
                    let violations = validate(&doc, &f, &d, bounds);
                    for v in &violations {
                        eprintln!("violation: {v}");
                    }
                    let status = if violations.is_empty() { "OK" } else { "INVALID" };
                    summary(status, doc.total_wastage_frames, doc.total_wirelength, &clock);
                    if violations.is_empty() {
                        0
                    } else {
                        Status::InfeasibleFloorplan.exit_code()
                    }
                }
                Err(e) => {
                    eprintln!("error: {e:#}");
                    summary(Status::ParseError, 0, 0, &clock);
                    1
                }
            }
        }
    };
    ExitCode::from(code as u8)
}
