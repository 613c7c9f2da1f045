//! The `semflow` command line: validate ontologies, build raw flow graphs
//! from traces, enrich them, and compare diagrams.
//!
//! Exit codes: 0 success, 1 semantic failure (diagnostics, strict-mode
//! enrichment errors, non-isomorphic inputs), 2 I/O or parse errors.

use std::ffi::OsString;
use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use semflow::annotation::{load_lenient, load_ontology, LoadError, Ontology, Severity};
use semflow::batch::{self, Exec};
use semflow::diagram::{
    from_json_str, is_isomorphic, labeled_isomorphic, to_dot, to_json_string, WiringDiagram,
};
use semflow::enrich::{EnrichError, Strictness};
use semflow::trace::{build_raw_graph, parse_trace_str};
use serde_json::json;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_IO: i32 = 2;

pub const ONTOLOGY_ENV: &str = "SEMFLOW_ONTOLOGY_PATH";

#[derive(Debug, Parser)]
#[command(name = "semflow", version, about = "Raw and semantic flow graphs from execution traces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Json,
    Dot,
}

#[derive(Debug, Args)]
struct OntologyArgs {
    /// Ontology file or directory; repeatable. Defaults to the entries of
    /// SEMFLOW_ONTOLOGY_PATH.
    #[arg(long = "ontology", value_name = "PATH")]
    paths: Vec<PathBuf>,
    /// Treat functoriality warnings and enrichment mismatches as failures.
    #[arg(long)]
    strict: bool,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output file, or directory when several inputs are given. Standard
    /// output when omitted.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Load and check ontology files.
    Validate {
        #[command(flatten)]
        ontology: OntologyArgs,
    },
    /// Build raw flow graphs from traces.
    Raw {
        #[arg(required = true, value_name = "TRACE")]
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Enrich traces or raw diagrams into semantic flow graphs.
    Enrich {
        #[arg(required = true, value_name = "INPUT")]
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        ontology: OntologyArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exit 0 when two diagrams are isomorphic, 1 otherwise.
    Iso {
        a: PathBuf,
        b: PathBuf,
        /// Compare only labeled boxes and the paths between them.
        #[arg(long)]
        labeled_only: bool,
    },
}

/// A failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn io(message: impl Display) -> Self {
        Failure {
            code: EXIT_IO,
            message: message.to_string(),
        }
    }

    fn semantic(message: impl Display) -> Self {
        Failure {
            code: EXIT_FAIL,
            message: message.to_string(),
        }
    }
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::Io { .. } | LoadError::Parse { .. } => Failure::io(e),
            other => Failure::semantic(other),
        }
    }
}

fn ontology_paths(args: &OntologyArgs) -> Result<Vec<PathBuf>, Failure> {
    if !args.paths.is_empty() {
        return Ok(args.paths.clone());
    }
    match std::env::var_os(ONTOLOGY_ENV) {
        Some(v) if !v.is_empty() => Ok(std::env::split_paths(&v).collect()),
        _ => Err(Failure::io(format!("no ontology given: pass --ontology or set {ONTOLOGY_ENV}"))),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

fn read_diagram(path: &Path) -> Result<WiringDiagram, Failure> {
    from_json_str(&read(path)?).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

fn read_trace_graph(path: &Path) -> Result<WiringDiagram, Failure> {
    let events = parse_trace_str(&read(path)?).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
    build_raw_graph(&events).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

/// Diagram files end in `.json`; anything else is read as a trace.
fn read_input(path: &Path) -> Result<WiringDiagram, Failure> {
    if path.extension().is_some_and(|e| e == "json") {
        read_diagram(path)
    } else {
        read_trace_graph(path)
    }
}

fn render(d: &WiringDiagram, format: Format) -> String {
    match format {
        Format::Json => to_json_string(d),
        Format::Dot => to_dot(d),
    }
}

/// Write one rendered diagram per input: to stdout, to `--out`, or into the
/// `--out` directory as `<stem>.<ext>`.
fn emit(inputs: &[PathBuf], rendered: &[String], out: &OutputArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let ext = match out.format {
        Format::Json => "json",
        Format::Dot => "dot",
    };
    match (&out.out, rendered) {
        (None, [one]) => stdout.write_all(one.as_bytes()).map_err(Failure::io),
        (None, _) => Err(Failure::io("several inputs need --out <DIR>")),
        (Some(path), [one]) if !path.is_dir() => {
            fs::write(path, one).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
        }
        (Some(dir), all) => {
            fs::create_dir_all(dir).map_err(|e| Failure::io(format!("{}: {e}", dir.display())))?;
            for (input, text) in inputs.iter().zip(all) {
                let stem = input.file_stem().unwrap_or(input.as_os_str());
                let path = dir.join(stem).with_extension(ext);
                fs::write(&path, text).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
            }
            Ok(())
        }
    }
}

fn load(args: &OntologyArgs, stderr: &mut dyn Write) -> Result<Ontology, Failure> {
    let paths = ontology_paths(args)?;
    if args.strict {
        return Ok(load_ontology(&paths)?);
    }
    let (o, diagnostics) = load_lenient(&paths)?;
    for d in diagnostics.iter().filter(|d| d.severity > Severity::Info) {
        let _ = writeln!(stderr, "{}", serde_json::to_string(d).expect("diagnostics serialize"));
    }
    Ok(o)
}

fn cmd_validate(args: &OntologyArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let paths = ontology_paths(args)?;
    let (_, mut diagnostics) = load_lenient(&paths)?;
    diagnostics.sort_by(|a, b| (&a.subject, &a.class, &a.location).cmp(&(&b.subject, &b.class, &b.location)));
    diagnostics.dedup();
    for d in &diagnostics {
        writeln!(stdout, "{}", serde_json::to_string(d).expect("diagnostics serialize")).map_err(Failure::io)?;
    }
    let threshold = if args.strict { Severity::Warning } else { Severity::Error };
    Ok(if diagnostics.iter().any(|d| d.severity >= threshold) {
        EXIT_FAIL
    } else {
        EXIT_OK
    })
}

fn read_all(inputs: &[PathBuf], reader: fn(&Path) -> Result<WiringDiagram, Failure>) -> Result<Vec<WiringDiagram>, Failure> {
    let results = batch::map(Exec::default(), inputs, |p| reader(p));
    results.into_iter().collect()
}

fn cmd_raw(inputs: &[PathBuf], out: &OutputArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let diagrams = read_all(inputs, read_trace_graph)?;
    let rendered = batch::map(Exec::default(), &diagrams, |d| render(d, out.format));
    emit(inputs, &rendered, out, stdout)?;
    Ok(EXIT_OK)
}

fn cmd_enrich(
    inputs: &[PathBuf],
    ontology: &OntologyArgs,
    out: &OutputArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, Failure> {
    let o = load(ontology, stderr)?;
    let raws = read_all(inputs, read_input)?;
    let mode = if ontology.strict {
        Strictness::Strict
    } else {
        Strictness::Lenient
    };
    let mut semantic = Vec::new();
    for (input, result) in inputs.iter().zip(batch::enrich_all(&raws, &o, mode)) {
        match result {
            Ok((d, report)) => {
                let line = json!({ "input": input.display().to_string(), "report": report });
                writeln!(stderr, "{line}").map_err(Failure::io)?;
                semantic.push(d);
            }
            Err(e @ EnrichError::Diagram(_)) => return Err(Failure::io(format!("{}: {e}", input.display()))),
            Err(e) => return Err(Failure::semantic(format!("{}: {e}", input.display()))),
        }
    }
    let rendered = batch::map(Exec::default(), &semantic, |d| render(d, out.format));
    emit(inputs, &rendered, out, stdout)?;
    Ok(EXIT_OK)
}

fn cmd_iso(a: &Path, b: &Path, labeled_only: bool) -> Result<i32, Failure> {
    let (a, b) = (read_diagram(a)?, read_diagram(b)?);
    let same = if labeled_only {
        labeled_isomorphic(&a, &b)
    } else {
        is_isomorphic(&a, &b)
    };
    Ok(if same { EXIT_OK } else { EXIT_FAIL })
}

/// Run with explicit streams; returns the exit code.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_IO } else { EXIT_OK };
            let _ = write!(stderr, "{}", e.render());
            return code;
        }
    };
    let result = match &cli.command {
        Command::Validate { ontology } => cmd_validate(ontology, stdout),
        Command::Raw { inputs, output } => cmd_raw(inputs, output, stdout),
        Command::Enrich {
            inputs,
            ontology,
            output,
        } => cmd_enrich(inputs, ontology, output, stdout, stderr),
        Command::Iso { a, b, labeled_only } => cmd_iso(a, b, *labeled_only),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "semflow: {}", f.message);
            f.code
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
