use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use curvelink::curve::BezoutPair;
use curvelink::fixture::{parse_fixture, FixtureDocument};
use curvelink::invariant::{Verdict, ZariskiOptions};
use curvelink::pipeline::{self, CompareInput, PipelineError, PipelineOptions};

const EXIT_USAGE: u8 = 1;
const EXIT_INTERNAL: u8 = 2;
const EXIT_DISTINGUISHED: u8 = 3;

#[derive(Parser)]
#[command(name = "curvelink", version, about = "Linking invariant of plane curves from combinatorics and braid words")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Do not require the completed combinatorics to satisfy Bezout.
    #[arg(long, global = true)]
    no_bezout: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    JsonLines,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the linking set of one cycle.
    Invariant {
        file: PathBuf,
        #[arg(long)]
        cycle: String,
        /// Components to delete first, comma separated.
        #[arg(long, value_delimiter = ',')]
        delete: Vec<String>,
    },
    /// Run the pair test on two cycles.
    Compare {
        file_a: PathBuf,
        file_b: PathBuf,
        #[arg(long)]
        cycle: String,
        /// Cycle name in the second file, when it differs.
        #[arg(long)]
        cycle_b: Option<String>,
        #[arg(long, value_delimiter = ',')]
        delete_a: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        delete_b: Vec<String>,
        /// Never compare against conjugate linking sets.
        #[arg(long)]
        oriented_only: bool,
        /// Let isomorphisms move the internal support.
        #[arg(long)]
        full_automorphisms: bool,
    },
    /// Check the schema, Bezout and every cycle declaration.
    Validate { file: PathBuf },
    /// Compute every cycle in a file.
    Report {
        file: PathBuf,
        #[arg(long, value_delimiter = ',')]
        delete: Vec<String>,
    },
}

enum Failure {
    Usage(String),
    Internal(String),
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        if e.is_internal() {
            Failure::Internal(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

fn load(path: &Path) -> Result<FixtureDocument, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    parse_fixture(&text).map_err(|e| Failure::Usage(format!("{}:{e}", path.display())))
}

fn emit_json<T: Serialize>(value: &T) -> Result<(), Failure> {
    let line = serde_json::to_string(value).map_err(|e| Failure::Internal(e.to_string()))?;
    println!("{line}");
    Ok(())
}

#[derive(Serialize)]
struct ValidateReport {
    curve: String,
    components: usize,
    declared_points: usize,
    added_nodes: usize,
    incidence_edges: usize,
    bezout: Vec<BezoutPair>,
    bezout_ok: bool,
    cycles: Vec<(String, Option<String>)>,
}

fn validate(doc: &FixtureDocument, format: Format) -> Result<bool, Failure> {
    let curve = doc.curve().map_err(|e| Failure::Usage(e.to_string()))?;
    let bezout = curve.bezout_pairs();
    let bezout_ok = bezout.iter().all(|p| p.declared == p.expected);
    let cycles: Vec<(String, Option<String>)> =
        doc.cycles.iter().map(|c| (c.name.clone(), curvelink::curve::supports(c, &curve).err().map(|e| e.to_string()))).collect();
    let ok = bezout_ok && cycles.iter().all(|c| c.1.is_none());
    let report = ValidateReport {
        curve: doc.name.clone(),
        components: curve.components().len(),
        declared_points: doc.points.len(),
        added_nodes: curve.points().len() - doc.points.len(),
        incidence_edges: curve.incidence_graph().edges().len(),
        bezout,
        bezout_ok,
        cycles,
    };
    match format {
        Format::JsonLines => emit_json(&report)?,
        Format::Text => {
            println!("curve: {}", report.curve);
            println!(
                "  {} components, {} declared points, {} ordinary nodes added, {} incidence edges",
                report.components, report.declared_points, report.added_nodes, report.incidence_edges
            );
            for p in report.bezout.iter().filter(|p| p.declared != p.expected) {
                println!("  Bezout fails for {} and {}: {} != {}", p.a, p.b, p.declared, p.expected);
            }
            println!("  Bezout: {}", if report.bezout_ok { "ok" } else { "FAILED" });
            for (name, err) in &report.cycles {
                match err {
                    None => println!("  cycle {name}: ok"),
                    Some(e) => println!("  cycle {name}: {e}"),
                }
            }
        }
    }
    Ok(ok)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let popts = PipelineOptions { skip_bezout: cli.no_bezout };
    match cli.command {
        Command::Invariant { file, cycle, delete } => {
            let doc = load(&file)?;
            let report = pipeline::compute(&doc, &cycle, &delete, &popts)?.report;
            match cli.format {
                Format::Text => print!("{}", pipeline::render_text(&report)),
                Format::JsonLines => emit_json(&report)?,
            }
            Ok(0)
        }
        Command::Report { file, delete } => {
            let doc = load(&file)?;
            for (i, c) in doc.cycles.iter().enumerate() {
                let report = pipeline::compute(&doc, &c.name, &delete, &popts)?.report;
                match cli.format {
                    Format::Text => {
                        if i > 0 {
                            println!();
                        }
                        print!("{}", pipeline::render_text(&report));
                    }
                    Format::JsonLines => emit_json(&report)?,
                }
            }
            Ok(0)
        }
        Command::Compare { file_a, file_b, cycle, cycle_b, delete_a, delete_b, oriented_only, full_automorphisms } => {
            let doc_a = load(&file_a)?;
            let doc_b = load(&file_b)?;
            let cycle_b = cycle_b.unwrap_or_else(|| cycle.clone());
            let report = pipeline::compare(
                CompareInput { doc: &doc_a, cycle: &cycle, deleted: &delete_a },
                CompareInput { doc: &doc_b, cycle: &cycle_b, deleted: &delete_b },
                ZariskiOptions { oriented_only, full_automorphisms },
                &popts,
            )?;
            match cli.format {
                Format::Text => print!("{}", pipeline::render_compare_text(&report)),
                Format::JsonLines => emit_json(&report)?,
            }
            Ok(if report.verdict == Verdict::Distinguished { EXIT_DISTINGUISHED } else { 0 })
        }
        Command::Validate { file } => {
            let doc = load(&file)?;
            Ok(if validate(&doc, cli.format)? { 0 } else { EXIT_USAGE })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("internal error: {m}");
            ExitCode::from(EXIT_INTERNAL)
        }
    }
}
