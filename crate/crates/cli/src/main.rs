mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use weylh1::classify::golden::GoldenFile;
use weylh1::classify::{enumerate_types, Mode, RunOptions};
use weylh1::cohomology::{AdmissibilityMethod, Cohomology};
use weylh1::weyl::{GroupFile, WeylGroup};

use report::{Format, Provenance, ResultFile};

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_DIFF: u8 = 2;
const EXIT_PARTIAL: u8 = 3;

#[derive(Parser)]
#[command(name = "weylh1", version, about = "Classify Galois actions on del Pezzo surfaces with vanishing H1")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate admissible subgroup classes
    Enumerate(RunArgs),
    /// Locate the reference types and diff every field
    Verify(RunArgs),
    /// Print H1 and the admissibility verdict of a group file
    H1 {
        group_file: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CliMode {
    Full,
    Verify,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
    degree: u8,
    #[arg(long, value_enum)]
    mode: Option<CliMode>,
    /// wall-clock budget
    #[arg(long, default_value_t = 3600, value_parser = clap::value_parser!(u64).range(1..))]
    budget_secs: u64,
    /// stop when this many classes wait to be extended
    #[arg(long)]
    frontier_cap: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    workers: u64,
    #[arg(long, value_enum, default_value_t = Format::Tsv)]
    format: Format,
    /// result file (JSON); the report goes to stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// reference records; defaults to d<degree>.json in the data directory
    #[arg(long)]
    golden: Option<PathBuf>,
    /// exit 0 on an incomplete run that is consistent with the reference
    #[arg(long)]
    allow_partial: bool,
}

fn data_dir() -> PathBuf {
    match std::env::var_os("WEYLH1_DATA_DIR") {
        Some(d) => PathBuf::from(d),
        None => Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data"),
    }
}

/// Usage problems map to exit code 1 through this type.
struct Usage(anyhow::Error);

fn load_golden(args: &RunArgs, required: bool) -> Result<Option<GoldenFile>, Usage> {
    let path = match &args.golden {
        Some(p) => p.clone(),
        None => {
            let p = data_dir().join(format!("d{}.json", args.degree));
            if !required && !p.exists() {
                return Ok(None);
            }
            p
        }
    };
    let g = GoldenFile::load(&path).with_context(|| format!("reading {}", path.display())).map_err(Usage)?;
    if g.degree != args.degree {
        return Err(Usage(anyhow::anyhow!("{} holds degree {} records, not degree {}", path.display(), g.degree, args.degree)));
    }
    Ok(Some(g))
}

fn run(args: RunArgs, mode: Mode) -> anyhow::Result<u8> {
    let golden = match load_golden(&args, mode == Mode::Verify) {
        Ok(g) => g,
        Err(Usage(e)) => {
            eprintln!("error: {e:#}");
            return Ok(EXIT_USAGE);
        }
    };
    let opts = RunOptions {
        mode,
        budget: Some(Duration::from_secs(args.budget_secs)),
        frontier_cap: args.frontier_cap,
        seed: args.seed,
        workers: args.workers as usize,
        golden,
    };
    let start = Instant::now();
    let output = enumerate_types(args.degree, &opts)?;
    let file = ResultFile {
        provenance: Provenance::new(args.seed, mode, args.degree, start.elapsed()),
        output,
    };
    if let Some(path) = &args.out {
        std::fs::write(path, serde_json::to_string_pretty(&file)? + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    print!("{}", report::render(&file, args.format)?);
    let out = &file.output;
    let failed = out.diff.as_ref().is_some_and(|d| !d.is_empty());
    if failed {
        return Ok(EXIT_DIFF);
    }
    if !out.complete && !args.allow_partial {
        return Ok(EXIT_PARTIAL);
    }
    Ok(EXIT_OK)
}

fn h1(path: &Path) -> anyhow::Result<u8> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file: GroupFile = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let weyl = WeylGroup::for_degree(file.degree)?;
    let gens = file.perms()?;
    for g in &gens {
        weyl.check_member(g)?;
    }
    let coh = Cohomology::new(&weyl);
    let h = coh.h1(&gens)?;
    let verdict = coh.is_admissible(&gens, AdmissibilityMethod::SylowReduction)?;
    let order = weyl.group().closure(&gens)?.order();
    println!("degree {} group of order {order}", file.degree);
    println!("{h}");
    if verdict.admissible {
        println!("admissible: every subgroup has H1 = 0");
    } else {
        let w = verdict.witness.unwrap_or_default();
        let wh = verdict.witness_h1.map(|h| h.to_string()).unwrap_or_default();
        let imgs: Vec<String> = w.iter().map(|p| format!("{:?}", p.images())).collect();
        println!("inadmissible: subgroup generated by {} has {wh}", imgs.join(", "));
    }
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Enumerate(args) => {
            let mode = match args.mode {
                Some(CliMode::Verify) => Mode::Verify,
                _ => Mode::Full,
            };
            run(args, mode)
        }
        Command::Verify(args) => run(args, Mode::Verify),
        Command::H1 { group_file } => h1(&group_file),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
