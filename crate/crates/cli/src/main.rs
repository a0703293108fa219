//! `ome-rdf`: microscopy image metadata to RDF.

mod commands;
mod config;
mod error;
mod fetch;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ome_rdf::rdf::RdfFormat;

use crate::commands::ReportFormat;
use crate::config::Config;
pub use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "ome-rdf", version, about = "Convert OME-XML microscopy metadata into RDF")]
#[command(after_help = "Exit codes: 0 ok, 1 violations or rejected records, 2 usage error, 3 I/O or parse failure.\n\
    Settings may also come from a key = value file given by --config or the OME_RDF_CONFIG \
    environment variable; flags win.")]
struct Cli {
    /// key = value settings file
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the core ontology (18 classes) as RDF
    SchemaExport(SchemaExport),
    /// Translate an XSD schema into candidate ontology terms
    TranslateXsd(TranslateXsd),
    /// Convert one OME-XML file, with an optional annotation sidecar
    Convert(Convert),
    /// Check an instance graph against the ontology
    Validate(Validate),
    /// Convert a directory tree into sharded RDF
    Ingest(Ingest),
    /// Check that external links in graphs resolve
    LinkCheck(LinkCheck),
    /// Print the statistics of an ingest run
    Stats(Stats),
}

#[derive(Debug, Args)]
struct Output {
    /// Output file (standard output when absent)
    #[arg(long, short = 'o', value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SchemaExport {
    /// turtle or ntriples (default: from the output extension, else turtle)
    #[arg(long)]
    format: Option<RdfFormat>,
    /// Namespace for ontology terms
    #[arg(long, value_name = "IRI")]
    namespace: Option<String>,
    #[command(flatten)]
    out: Output,
}

#[derive(Debug, Args)]
struct TranslateXsd {
    /// Schema to translate (default: the bundled OME subset)
    xsd: Option<PathBuf>,
    #[arg(long)]
    format: Option<RdfFormat>,
    #[arg(long, value_name = "IRI")]
    namespace: Option<String>,
    /// Write skipped constructs here, one `path<TAB>reason` line each
    #[arg(long, value_name = "FILE")]
    warnings: Option<PathBuf>,
    #[command(flatten)]
    out: Output,
}

#[derive(Debug, Args)]
struct Convert {
    /// OME-XML instance document
    ome: PathBuf,
    /// Annotation sidecar (TSV)
    #[arg(long, value_name = "FILE")]
    sidecar: Option<PathBuf>,
    #[arg(long)]
    format: Option<RdfFormat>,
    /// Ontology namespace
    #[arg(long, value_name = "IRI")]
    namespace: Option<String>,
    /// Base IRI for minted instance nodes
    #[arg(long, value_name = "IRI")]
    instance_base: Option<String>,
    /// Link registry file (prefix, base IRI, id pattern)
    #[arg(long, value_name = "FILE")]
    registry: Option<PathBuf>,
    /// Leave out images that fail to convert instead of stopping
    #[arg(long)]
    skip_errors: bool,
    #[command(flatten)]
    out: Output,
}

#[derive(Debug, Args)]
struct Validate {
    /// Graph to check (.nt or .ttl)
    graph: PathBuf,
    /// Report format: tsv or text
    #[arg(long)]
    format: Option<ReportFormat>,
    /// Syntax of the input when its extension is not .nt or .ttl
    #[arg(long, value_name = "FORMAT")]
    input_format: Option<RdfFormat>,
    /// Ontology graph to check against (default: the core ontology)
    #[arg(long, value_name = "FILE")]
    ontology: Option<PathBuf>,
    #[arg(long, value_name = "IRI")]
    namespace: Option<String>,
    #[arg(long, value_name = "IRI")]
    instance_base: Option<String>,
    #[command(flatten)]
    out: Output,
}

#[derive(Debug, Args)]
struct Ingest {
    /// Directory scanned for *.ome.xml files and their *.ann.tsv sidecars
    input: PathBuf,
    /// Output directory for shards, stats.tsv and errors.tsv
    #[arg(long, short = 'o', value_name = "DIR")]
    output: Option<PathBuf>,
    #[arg(long)]
    format: Option<RdfFormat>,
    /// Images per shard (default 1000)
    #[arg(long, value_name = "N")]
    shard_size: Option<usize>,
    /// Worker threads (default: logical CPUs)
    #[arg(long, value_name = "N")]
    parallelism: Option<usize>,
    #[arg(long)]
    skip_errors: bool,
    #[arg(long, value_name = "IRI")]
    namespace: Option<String>,
    #[arg(long, value_name = "IRI")]
    instance_base: Option<String>,
    #[arg(long, value_name = "FILE")]
    registry: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct LinkCheck {
    /// Graphs whose registry-resolved links are checked
    #[arg(required = true)]
    graphs: Vec<PathBuf>,
    #[arg(long, value_name = "FILE")]
    registry: Option<PathBuf>,
    /// Report links as notChecked without touching the network
    #[arg(long)]
    offline: bool,
    /// Concurrent requests (default 8)
    #[arg(long, value_name = "N")]
    parallelism: Option<usize>,
    /// Per-request timeout in seconds (default 5)
    #[arg(long, value_name = "SECS")]
    timeout_secs: Option<u64>,
    #[command(flatten)]
    out: Output,
}

#[derive(Debug, Args)]
struct Stats {
    /// An ingest output directory or its stats.tsv
    path: PathBuf,
    #[command(flatten)]
    out: Output,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = Config::load(cli.config.as_deref())?;
    match cli.command {
        Command::SchemaExport(a) => commands::schema_export(&cfg, a),
        Command::TranslateXsd(a) => commands::translate_xsd(&cfg, a),
        Command::Convert(a) => commands::convert(&cfg, a),
        Command::Validate(a) => commands::validate(&cfg, a),
        Command::Ingest(a) => commands::ingest(&cfg, a),
        Command::LinkCheck(a) => commands::link_check(&cfg, a),
        Command::Stats(a) => commands::stats(a),
    }
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors and 0 for --help / --version
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ome-rdf: {e}");
            e.exit_code()
        }
    }
}
