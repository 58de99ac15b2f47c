use clap::{Args, Parser, Subcommand, ValueEnum};
use hproof::engine::{check_theorem, Config, LeafObligation};
use hproof::export::{
    prepared, prove_leaf, write_embeddings, write_report, Format, ObligationReport, ReportOptions,
};
use hproof::meta::Obligation;
use hproof::prover::{Budget, ProverOutcome};
use hproof::surface::parse_theorem;
use rayon::prelude::*;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_INTERNAL: u8 = 4;

#[derive(Parser)]
#[command(name = "hproof", version, about = "Check hierarchical proofs and prove their leaf obligations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check proof files, generate leaf obligations and prove them.
    Check(CheckArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Text,
}

#[derive(Args)]
struct CheckArgs {
    /// Input files, one theorem each.
    #[arg(required = true)]
    files: Vec<PathBuf>,

    /// Prove every selected leaf (default).
    #[arg(long, group = "mode")]
    prove: bool,
    /// Check meaningfulness only; leaves are not sent to the prover.
    #[arg(long, group = "mode")]
    check_only: bool,
    /// List leaf obligations without proving them.
    #[arg(long, group = "mode")]
    list: bool,
    /// Print the meta-level embedding of each leaf, one per line.
    #[arg(long, group = "mode")]
    embeddings: bool,

    /// Time limit per leaf, in milliseconds.
    #[arg(long, default_value_t = 5000)]
    timeout_ms: u64,
    /// Maximum universal instantiations per branch.
    #[arg(long, default_value_t = 12)]
    depth: u32,
    /// Maximum instantiations of one universal formula per branch.
    #[arg(long, default_value_t = 4)]
    reuse: u32,
    /// Worker threads for proving (0 = one per core).
    #[arg(long, default_value_t = 0)]
    jobs: usize,

    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write leaf embeddings to this file.
    #[arg(long, value_name = "PATH")]
    emit_embeddings: Option<PathBuf>,
    /// Write the tableau trace of every proved leaf into this directory.
    #[arg(long, value_name = "DIR")]
    emit_traces: Option<PathBuf>,
    /// Make proof-local definitions usable right after DEFINE.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    local_defs_usable: bool,
    /// Prove only leaves at or under this step path, e.g. `<1>1.<2>2`.
    #[arg(long, value_name = "PATH-PREFIX")]
    only: Option<String>,
    /// Show filtered obligations before definition expansion.
    #[arg(long)]
    show_unexpanded: bool,
    /// Record per-leaf wall-clock times (makes output run-dependent).
    #[arg(long)]
    timings: bool,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Prove,
    CheckOnly,
    List,
    Embeddings,
}

impl CheckArgs {
    fn mode(&self) -> Mode {
        if self.check_only {
            Mode::CheckOnly
        } else if self.list {
            Mode::List
        } else if self.embeddings {
            Mode::Embeddings
        } else {
            Mode::Prove
        }
    }

    fn selected(&self, leaf: &LeafObligation) -> bool {
        match &self.only {
            None => true,
            Some(p) => {
                let path = leaf.origin.display_path();
                path == p || path.strip_prefix(p.as_str()).is_some_and(|r| r.starts_with('.'))
            }
        }
    }
}

/// One input file after checking.
struct Unit {
    stem: String,
    report: ObligationReport,
    leaves: Vec<LeafObligation>,
}

fn main() -> ExitCode {
    let Cli { command: Command::Check(args) } = Cli::parse();
    match run(&args) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("hproof: {msg}");
            ExitCode::from(EXIT_INTERNAL)
        }
    }
}

fn run(args: &CheckArgs) -> Result<u8, String> {
    let budget = Budget::new(args.depth, args.timeout_ms, args.reuse)?;
    let config = Config {
        local_defs_usable: args.local_defs_usable,
    };
    let opts = ReportOptions {
        show_unexpanded: args.show_unexpanded,
        timings: args.timings,
    };
    let mode = args.mode();

    let mut code = 0u8;
    let mut units = Vec::new();
    for path in &args.files {
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("hproof: {}: {e}", path.display());
                code = EXIT_INTERNAL;
                continue;
            }
        };
        let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let unit = match parse_theorem(&text) {
            Ok(th) => {
                let result = check_theorem(&th, &config);
                let name = th.name.clone().unwrap_or_else(|| stem.clone());
                Unit {
                    stem,
                    report: ObligationReport::from_check(&name, &result, &opts),
                    leaves: if result.is_meaningful() { result.leaves() } else { Vec::new() },
                }
            }
            Err(e) => Unit {
                report: ObligationReport::parse_failure(&stem, &e),
                stem,
                leaves: Vec::new(),
            },
        };
        units.push(unit);
    }

    if mode == Mode::Prove {
        prove_all(args, &budget, &opts, &mut units)?;
    }

    for u in &units {
        code = code.max(u.report.status.exit_code() as u8);
    }

    if let Some(p) = &args.emit_embeddings {
        write_file(p, &embeddings(&units)?)?;
    }
    let out = match mode {
        Mode::Embeddings => embeddings(&units)?,
        Mode::List => listing(&units),
        Mode::Prove | Mode::CheckOnly => render(&units, args.format)?,
    };
    match &args.out {
        Some(p) => write_file(p, &out)?,
        None => print!("{out}"),
    }
    Ok(code)
}

fn prove_all(args: &CheckArgs, budget: &Budget, opts: &ReportOptions, units: &mut [Unit]) -> Result<(), String> {
    let jobs: Vec<(usize, usize)> = units
        .iter()
        .enumerate()
        .flat_map(|(u, unit)| {
            unit.leaves
                .iter()
                .enumerate()
                .filter(|(_, l)| !l.omitted && args.selected(l))
                .map(move |(i, _)| (u, i))
        })
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(|e| e.to_string())?;
    let shared: &[Unit] = units;
    let results: Vec<_> = pool.install(|| {
        jobs.par_iter()
            .map(|&(u, i)| prove_leaf(&shared[u].leaves[i], budget))
            .collect()
    });
    if let Some(dir) = &args.emit_traces {
        fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    }
    for (&(u, i), (outcome, dt)) in jobs.iter().zip(results) {
        if let (Some(dir), ProverOutcome::Proved { trace, .. }) = (&args.emit_traces, &outcome) {
            let id = units[u].report.leaves[i].id;
            write_file(&dir.join(format!("{}-{id}.trace", units[u].stem)), &trace.to_string())?;
        }
        units[u].report.leaves[i].record(&outcome, dt, opts);
    }
    for unit in units.iter_mut() {
        unit.report.update_status();
    }
    Ok(())
}

fn render(units: &[Unit], format: OutputFormat) -> Result<String, String> {
    match (format, units) {
        (OutputFormat::Json, [one]) => Ok(write_report(&one.report, Format::Json)),
        (OutputFormat::Json, _) => {
            let all: Vec<&ObligationReport> = units.iter().map(|u| &u.report).collect();
            let mut s = serde_json::to_string_pretty(&all).map_err(|e| e.to_string())?;
            s.push('\n');
            Ok(s)
        }
        (OutputFormat::Text, _) => Ok(units.iter().map(|u| write_report(&u.report, Format::Text)).collect()),
    }
}

fn listing(units: &[Unit]) -> String {
    let mut s = String::new();
    for u in units {
        let _ = writeln!(s, "{}: {}", u.report.theorem, u.report.status.name());
        for e in &u.report.errors {
            let _ = writeln!(s, "error: {}: {}", e.path, e.message);
        }
        for l in &u.report.leaves {
            let omitted = if l.omitted { " (omitted)" } else { "" };
            let _ = writeln!(s, "[{}] {} {}{omitted}", l.id, l.path, l.kind);
            let _ = writeln!(s, "    {}", l.filtered);
        }
    }
    s
}

fn embeddings(units: &[Unit]) -> Result<String, String> {
    let prepared: Vec<Obligation> = units
        .iter()
        .flat_map(|u| u.leaves.iter())
        .map(|l| prepared(&l.obligation))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    write_embeddings(&prepared).map_err(|e| e.to_string())
}

fn write_file(path: &Path, contents: &str) -> Result<(), String> {
    fs::write(path, contents).map_err(|e| format!("{}: {e}", path.display()))
}
