use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tessplan::format::parse_design;
use tessplan::FloorplanDocument;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn tessplan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tessplan")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Last stdout line, checked against the summary grammar.
fn summary(o: &Output) -> (String, u64, u64) {
    let text = stdout(o);
    let line = text.lines().last().expect("no stdout");
    let parts: Vec<&str> = line.split(' ').collect();
    assert_eq!(parts.len(), 4, "bad summary `{line}`");
    let field = |i: usize, key: &str| -> u64 {
        parts[i].strip_prefix(key).and_then(|v| v.strip_prefix('=')).unwrap().parse().unwrap()
    };
    field(3, "runtime_ms");
    (parts[0].to_string(), field(1, "wastage"), field(2, "wirelength"))
}

fn body(o: &Output) -> String {
    let text = stdout(o);
    let cut = text.trim_end_matches('\n').rfind('\n').map_or(0, |i| i + 1);
    text[..cut].to_string()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn sdr(extra: &[&str]) -> Output {
    let fabric = fixture("fx70t.fabric");
    let design = fixture("sdr.design");
    let mut args = vec!["floorplan", "--fabric", fabric.to_str().unwrap(), "--design", design.to_str().unwrap()];
    args.extend_from_slice(extra);
    tessplan(&args)
}

#[test]
fn sdr_without_ar_succeeds() {
    let o = sdr(&["--no-ar", "--alpha", "1", "--beta", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let (status, wastage, _) = summary(&o);
    assert_eq!(status, "OK");
    let doc = FloorplanDocument::parse(&body(&o)).unwrap();
    assert_eq!(doc.modules.len(), 5);
    assert_eq!(doc.total_wastage_frames, wastage);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = sdr(&["--no-ar"]);
    let b = sdr(&["--no-ar"]);
    assert_eq!(body(&a), body(&b));
    assert_eq!(summary(&a), summary(&b));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let small = write(dir.path(), "small.fabric", "rows 1\ncolumns CC\n");
    let fx = fixture("fx70t.fabric");
    let fx = fx.to_str().unwrap();

    let dsp = write(dir.path(), "dsp.design", "module heavy 1 0 40\n");
    let o = tessplan(&["floorplan", "--fabric", fx, "--design", &dsp, "--no-ar"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(summary(&o).0, "INFEASIBLE_MODULE");

    let two = write(dir.path(), "two.design", "module a 2 0 0\nmodule b 2 0 0\n");
    let o = tessplan(&["floorplan", "--fabric", &small, "--design", &two, "--no-ar"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(summary(&o).0, "INFEASIBLE_FLOORPLAN");

    let o = sdr(&["--no-ar", "--time-budget", "0"]);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(summary(&o).0, "TIMEOUT");

    let bad = write(dir.path(), "bad.design", "module a one 0 0\n");
    let o = tessplan(&["floorplan", "--fabric", fx, "--design", &bad]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(summary(&o).0, "PARSE_ERROR");
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));

    let o = tessplan(&["floorplan", "--fabric", "/nonexistent", "--design", &bad]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(summary(&o).0, "PARSE_ERROR");

    let o = tessplan(&["floorplan", "--bogus"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(summary(&o).0, "PARSE_ERROR");
}

#[test]
fn generate_is_seeded() {
    let fx = fixture("fx70t.fabric");
    let fx = fx.to_str().unwrap();
    let args = ["generate", "--fabric", fx, "-n", "50", "--clb", "0.5", "--bram", "0.5", "--dsp", "0.5", "--seed", "9"];
    let a = tessplan(&args);
    let b = tessplan(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(body(&a), body(&b));
    let design = parse_design(&body(&a)).unwrap();
    assert_eq!(design.len(), 50);

    let mut other = args;
    other[11] = "10";
    assert_ne!(body(&tessplan(&other)), body(&a));

    let mut one = args;
    one[4] = "1";
    let o = tessplan(&one);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(summary(&o).0, "PARSE_ERROR");

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.design");
    let mut to_file = args.to_vec();
    to_file.extend(["--out", out.to_str().unwrap()]);
    let o = tessplan(&to_file);
    assert_eq!(summary(&o).0, "OK");
    assert_eq!(std::fs::read_to_string(&out).unwrap(), body(&a));
}

#[test]
fn svg_render_is_well_formed() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("plan.svg");
    let doc = dir.path().join("plan.txt");
    let o = sdr(&["--no-ar", "--render", "svg", "--render-out", svg.to_str().unwrap(), "--out", doc.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 1);
    let text = std::fs::read_to_string(&svg).unwrap();
    let xml = roxmltree::Document::parse(&text).unwrap();
    assert_eq!(xml.root_element().tag_name().name(), "svg");
    let tiles =
        xml.descendants().filter(|n| n.attribute("class").is_some_and(|c| c.split(' ').next() == Some("tile"))).count();
    assert_eq!(tiles, 8 * 45);
    let labels: Vec<&str> = xml.descendants().filter(|n| n.has_tag_name("text")).filter_map(|n| n.text()).collect();
    for id in ["matched_filter", "carrier_recovery", "demodulator", "decoder", "video_decoder"] {
        assert!(labels.contains(&id), "missing label {id}");
    }
}

#[test]
fn ascii_render_matches_fabric() {
    let o = sdr(&["--no-ar", "--render", "ascii", "--out", "/dev/null"]);
    assert_eq!(o.status.code(), Some(0));
    let text = body(&o);
    let grid: Vec<&str> = text.lines().collect();
    assert_eq!(grid.len(), 8);
    assert!(grid.iter().all(|l| l.chars().count() == 45));
    for initial in ['M', 'C', 'D', 'V'] {
        assert!(text.contains(initial));
    }
}

#[test]
fn validate_accepts_own_output_and_rejects_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("plan.txt");
    let o = sdr(&["--no-ar", "--out", plan.to_str().unwrap(), "--timing"]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&plan).unwrap();
    assert!(text.contains("runtime_ms="));
    let fx = fixture("fx70t.fabric");
    let sd = fixture("sdr.design");
    let check = |p: &str| {
        tessplan(&["validate", "--fabric", fx.to_str().unwrap(), "--design", sd.to_str().unwrap(), "--floorplan", p])
    };
    let o = check(plan.to_str().unwrap());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(summary(&o).0, "OK");

    let mut doc = FloorplanDocument::parse(&text).unwrap();
    doc.modules[1].rect = doc.modules[0].rect;
    let broken = write(dir.path(), "broken.txt", &doc.to_text());
    let o = check(&broken);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(summary(&o).0, "INVALID");
    assert!(String::from_utf8_lossy(&o.stderr).contains("violation"));
}

#[test]
fn solve_log_is_json_lines() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("solves.jsonl");
    let o = sdr(&["--no-ar", "--out", "/dev/null", "--solve-log", log.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&log).unwrap();
    assert!(text.lines().count() >= 2);
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v.is_object());
    }
}
