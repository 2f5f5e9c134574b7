use std::fmt::Write;
use std::time::Duration;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use weylh1::classify::record::TypeRecord;
use weylh1::classify::{Mode, RunOutput};

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Format {
    Json,
    Tsv,
    Md,
}

#[derive(Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub degree: u8,
    pub mode: Mode,
    pub seed: u64,
    pub runtime_secs: f64,
}

impl Provenance {
    pub fn new(seed: u64, mode: Mode, degree: u8, runtime: Duration) -> Provenance {
        Provenance {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            degree,
            mode,
            seed,
            runtime_secs: (runtime.as_secs_f64() * 1000.0).round() / 1000.0,
        }
    }
}

#[derive(Serialize, Deserialize)]
pub struct ResultFile {
    pub provenance: Provenance,
    #[serde(flatten)]
    pub output: RunOutput,
}

const COLUMNS: [&str; 8] = ["type", "group", "order", "orbits", "stabilizers", "minimal", "conic", "fibers"];

fn row(r: &TypeRecord) -> [String; 8] {
    let fibers = match &r.fiber_partition {
        Some(p) => p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("+"),
        None => "-".into(),
    };
    [
        r.type_id.clone().unwrap_or_else(|| "-".into()),
        r.group_name.clone(),
        r.group_order.to_string(),
        r.orbit_label(),
        r.stabilizer_label(),
        r.minimal.to_string(),
        r.conic_bundle.to_string(),
        fibers,
    ]
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Full => "full",
        Mode::Verify => "verify",
    }
}

/// Summary lines shared by the text formats.
fn summary(f: &ResultFile) -> Vec<String> {
    let p = &f.provenance;
    let o = &f.output;
    let minimal: Vec<&TypeRecord> = o.minimal().collect();
    let conic = minimal.iter().filter(|r| r.conic_bundle).count();
    let mut lines = vec![
        format!("{} {} degree={} mode={} seed={} runtime={:.3}s", p.tool, p.version, p.degree, mode_name(p.mode), p.seed, p.runtime_secs),
        format!(
            "classes={} minimal={} minimal_conic_bundle={} minimal_other={} complete={} best_effort={} oversize={}",
            o.records.len(),
            minimal.len(),
            conic,
            minimal.len() - conic,
            o.complete,
            o.best_effort,
            o.oversize.len()
        ),
    ];
    for s in &o.searches {
        let targets = s.order_targets.as_ref().map(|t| format!(" orders={t:?}")).unwrap_or_default();
        lines.push(format!(
            "search ambient={} order={}{targets} classes={} complete={} unexplored={}",
            s.ambient, s.ambient_order, s.classes, s.complete, s.unexplored
        ));
    }
    let counts = o.type_counts();
    if counts.values().any(|&c| c > 1) {
        let multi: Vec<String> = counts.iter().filter(|(_, &c)| c > 1).map(|(t, c)| format!("{t} x{c}")).collect();
        lines.push(format!("types realized by several classes: {}", multi.join(", ")));
    }
    if let Some(edges) = &o.edges {
        let e: Vec<String> = edges.iter().map(|(a, b)| format!("{a} -> {b}")).collect();
        lines.push(format!("specializations: {}", e.join("; ")));
    }
    if let Some(d) = &o.diff {
        if d.is_empty() {
            lines.push("diff: empty".into());
        } else {
            lines.push(format!("diff: {} lines", d.lines.len()));
            lines.extend(d.lines.iter().map(|l| format!("  {l}")));
        }
        if !d.unreached.is_empty() {
            lines.push(format!("not reached: {}", d.unreached.join(", ")));
        }
    }
    lines
}

pub fn render(f: &ResultFile, format: Format) -> serde_json::Result<String> {
    let mut s = String::new();
    match format {
        Format::Json => s = serde_json::to_string_pretty(f)? + "\n",
        Format::Tsv => {
            for l in summary(f) {
                writeln!(s, "# {l}").unwrap();
            }
            writeln!(s, "{}", COLUMNS.join("\t")).unwrap();
            for r in &f.output.records {
                writeln!(s, "{}", row(r).join("\t")).unwrap();
            }
        }
        Format::Md => {
            for l in summary(f) {
                writeln!(s, "    {l}").unwrap();
            }
            writeln!(s).unwrap();
            writeln!(s, "| {} |", COLUMNS.join(" | ")).unwrap();
            writeln!(s, "|{}", "---|".repeat(COLUMNS.len())).unwrap();
            for r in &f.output.records {
                writeln!(s, "| {} |", row(r).join(" | ")).unwrap();
            }
        }
    }
    Ok(s)
}
