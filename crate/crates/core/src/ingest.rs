//! Batch conversion of OME-XML + sidecar directories into sharded RDF.
//!
//! Files are parsed and mapped on a bounded worker pool, then consumed in
//! sorted path order, so deduplication and shard assignment depend only on
//! the input and never on thread scheduling.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use sha2::{Digest, Sha256};
use thiserror::Error;
use walkdir::WalkDir;

use crate::mapper::{MapError, Mapper};
use crate::ome::{join_annotations, parse_ome_document, parse_sidecar, JoinError, OmeError, SidecarError};
use crate::rdf::{self, ntriples, Graph, RdfFormat};

pub const OME_SUFFIX: &str = ".ome.xml";
pub const SIDECAR_SUFFIX: &str = ".ann.tsv";

/// Files handed to the worker pool at a time.
const CHUNK: usize = 256;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("input directory {0} does not exist")]
    DirNotFound(PathBuf),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{file} {image_id}: {code}: {message}")]
    Record {
        file: String,
        image_id: String,
        code: &'static str,
        message: String,
    },
}

impl IngestError {
    /// True when input could not be read or parsed, as opposed to records
    /// that parsed but failed to map and to bad settings.
    pub fn is_input_failure(&self) -> bool {
        match self {
            IngestError::DirNotFound(_) | IngestError::Io { .. } => true,
            IngestError::InvalidConfig(_) => false,
            IngestError::Record { code, .. } => !MAP_CODES.contains(code),
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> IngestError + '_ {
    move |source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestConfig {
    pub input_dir: PathBuf,
    pub output_dir: PathBuf,
    /// Records per shard.
    pub shard_size: usize,
    pub parallelism: usize,
    pub skip_errors: bool,
    pub format: RdfFormat,
}

impl IngestConfig {
    pub fn new(input_dir: impl Into<PathBuf>, output_dir: impl Into<PathBuf>) -> Self {
        IngestConfig {
            input_dir: input_dir.into(),
            output_dir: output_dir.into(),
            shard_size: 1000,
            parallelism: std::thread::available_parallelism().map_or(1, usize::from),
            skip_errors: false,
            format: RdfFormat::NTriples,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IngestStats {
    pub files_scanned: u64,
    pub images_converted: u64,
    pub images_skipped: u64,
    pub duplicates_dropped: u64,
    pub triples_emitted: u64,
    pub external_links_emitted: u64,
    pub wall_time_ms: u64,
}

impl IngestStats {
    pub fn fields(&self) -> [(&'static str, u64); 7] {
        [
            ("filesScanned", self.files_scanned),
            ("imagesConverted", self.images_converted),
            ("imagesSkipped", self.images_skipped),
            ("duplicatesDropped", self.duplicates_dropped),
            ("triplesEmitted", self.triples_emitted),
            ("externalLinksEmitted", self.external_links_emitted),
            ("wallTimeMs", self.wall_time_ms),
        ]
    }

    pub fn images_encountered(&self) -> u64 {
        self.images_converted + self.images_skipped + self.duplicates_dropped
    }

    /// The `stats.tsv` body.
    pub fn to_tsv(&self) -> String {
        self.fields().iter().map(|(k, v)| format!("{k}\t{v}\n")).collect()
    }

    pub fn from_tsv(text: &str) -> Option<IngestStats> {
        let mut s = IngestStats::default();
        for line in text.lines() {
            let (key, value) = line.split_once('\t')?;
            let v: u64 = value.parse().ok()?;
            match key {
                "filesScanned" => s.files_scanned = v,
                "imagesConverted" => s.images_converted = v,
                "imagesSkipped" => s.images_skipped = v,
                "duplicatesDropped" => s.duplicates_dropped = v,
                "triplesEmitted" => s.triples_emitted = v,
                "externalLinksEmitted" => s.external_links_emitted = v,
                "wallTimeMs" => s.wall_time_ms = v,
                _ => return None,
            }
        }
        Some(s)
    }
}

/// `key: value` lines in fixed order.
pub fn stats_report(stats: &IngestStats) -> String {
    stats.fields().iter().map(|(k, v)| format!("{k}: {v}\n")).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct InputPair {
    pub ome: PathBuf,
    pub sidecar: Option<PathBuf>,
}

/// Every `*.ome.xml` below `dir`, with its same-stem `*.ann.tsv` when one
/// exists, sorted by path.
pub fn scan_inputs(dir: &Path) -> Result<Vec<InputPair>, IngestError> {
    if !dir.is_dir() {
        return Err(IngestError::DirNotFound(dir.to_path_buf()));
    }
    let mut pairs = Vec::new();
    for entry in WalkDir::new(dir) {
        let entry = entry.map_err(|e| {
            let path = e.path().unwrap_or(dir).to_path_buf();
            IngestError::Io {
                path,
                source: e.into_io_error().unwrap_or_else(|| io::Error::other("directory loop")),
            }
        })?;
        let name = entry.file_name().to_string_lossy();
        if !entry.file_type().is_file() || !name.ends_with(OME_SUFFIX) {
            continue;
        }
        let stem = &name[..name.len() - OME_SUFFIX.len()];
        let sidecar = entry.path().with_file_name(format!("{stem}{SIDECAR_SUFFIX}"));
        pairs.push(InputPair {
            ome: entry.path().to_path_buf(),
            sidecar: sidecar.is_file().then_some(sidecar),
        });
    }
    pairs.sort();
    Ok(pairs)
}

fn ome_code(e: &OmeError) -> &'static str {
    match e {
        OmeError::MalformedXml(_) => "MalformedXml",
        OmeError::DanglingReference(_) => "DanglingReference",
        OmeError::MissingRequiredField(_) => "MissingRequiredField",
        OmeError::InvalidDimension(_) => "InvalidDimension",
        OmeError::DuplicateId(_) => "DuplicateId",
        OmeError::InvalidTimestamp { .. } => "InvalidTimestamp",
    }
}

fn sidecar_code(e: &SidecarError) -> &'static str {
    match e {
        SidecarError::MissingHeader => "MissingHeader",
        SidecarError::UnknownColumn(_) => "UnknownColumn",
        SidecarError::BadHeader => "BadHeader",
        SidecarError::WrongFieldCount { .. } => "WrongFieldCount",
        SidecarError::BadValue { .. } => "BadValue",
        SidecarError::DuplicateImageId(_) => "DuplicateImageId",
    }
}

const MAP_CODES: [&str; 6] = [
    "BadInstanceBase",
    "EmptyLocalId",
    "UnresolvableStrain",
    "UnknownClassInRegistry",
    "UnknownPropertyInRegistry",
    "MismatchedAnnotation",
];

fn map_code(e: &MapError) -> &'static str {
    match e {
        MapError::BadInstanceBase(_) => "BadInstanceBase",
        MapError::EmptyLocalId => "EmptyLocalId",
        MapError::UnresolvableStrain { .. } => "UnresolvableStrain",
        MapError::UnknownClassInRegistry(_) => "UnknownClassInRegistry",
        MapError::UnknownPropertyInRegistry(_) => "UnknownPropertyInRegistry",
        MapError::MismatchedAnnotation { .. } => "MismatchedAnnotation",
    }
}

/// A mapped image ready for dedup and sharding.
struct Converted {
    graph: Graph,
    digest: [u8; 32],
    links: u64,
}

struct Failure {
    image_id: String,
    code: &'static str,
    message: String,
}

type Outcome = Result<Converted, Failure>;

fn read(path: &Path) -> Result<String, IngestError> {
    fs::read_to_string(path).map_err(io_err(path))
}

/// Parses and maps one file. I/O problems abort the run; content problems
/// become per-image failures (or one file-level failure with an empty image
/// id when the OME document itself is unusable).
fn process(pair: &InputPair, mapper: &Mapper) -> Result<Vec<Outcome>, IngestError> {
    let xml = read(&pair.ome)?;
    let sidecar = pair.sidecar.as_deref().map(read).transpose()?;

    let doc = match parse_ome_document(&xml) {
        Ok(doc) => doc,
        Err(e) => {
            return Ok(vec![Err(Failure {
                image_id: String::new(),
                code: ome_code(&e),
                message: e.to_string(),
            })])
        }
    };
    let whole_file = |code: &'static str, message: String| {
        doc.images
            .iter()
            .map(|img| {
                Err(Failure {
                    image_id: img.id.clone(),
                    code,
                    message: message.clone(),
                })
            })
            .collect::<Vec<Outcome>>()
    };
    let annotations = match sidecar.as_deref().map(parse_sidecar).transpose() {
        Ok(anns) => anns.unwrap_or_default(),
        Err(e) => return Ok(whole_file(sidecar_code(&e), e.to_string())),
    };
    let records = match join_annotations(&doc, annotations) {
        Ok(r) => r,
        Err(e @ JoinError::OrphanAnnotation(_)) => return Ok(whole_file("OrphanAnnotation", e.to_string())),
    };

    Ok(records
        .iter()
        .map(|record| {
            mapper
                .map(record)
                .map(|mapped| {
                    let canonical = ntriples::serialize(&mapped.graph);
                    Converted {
                        digest: Sha256::digest(canonical.as_bytes()).into(),
                        links: mapped.external_links.len() as u64,
                        graph: mapped.graph,
                    }
                })
                .map_err(|e| Failure {
                    image_id: record.image.id.clone(),
                    code: map_code(&e),
                    message: e.to_string(),
                })
        })
        .collect())
}

pub fn shard_name(index: usize, format: RdfFormat) -> String {
    format!("shard-{index:05}.{}", format.extension())
}

fn is_shard_name(name: &str) -> bool {
    let Some(rest) = name.strip_prefix("shard-") else {
        return false;
    };
    let Some((digits, ext)) = rest.split_once('.') else {
        return false;
    };
    digits.len() == 5 && digits.bytes().all(|b| b.is_ascii_digit()) && matches!(ext, "nt" | "ttl")
}

struct ShardWriter<'c> {
    config: &'c IngestConfig,
    current: Graph,
    records: usize,
    next_index: usize,
    triples: u64,
}

impl ShardWriter<'_> {
    fn push(&mut self, graph: &Graph) -> Result<(), IngestError> {
        self.current.extend_from(graph);
        self.records += 1;
        if self.records == self.config.shard_size {
            self.flush()?;
        }
        Ok(())
    }

    fn flush(&mut self) -> Result<(), IngestError> {
        if self.records == 0 {
            return Ok(());
        }
        let path = self.config.output_dir.join(shard_name(self.next_index, self.config.format));
        fs::write(&path, rdf::serialize(&self.current, self.config.format)).map_err(io_err(&path))?;
        self.triples += self.current.len() as u64;
        self.current = Graph::new();
        self.records = 0;
        self.next_index += 1;
        Ok(())
    }
}

fn relative(path: &Path, root: &Path) -> String {
    path.strip_prefix(root)
        .unwrap_or(path)
        .components()
        .map(|c| c.as_os_str().to_string_lossy())
        .collect::<Vec<_>>()
        .join("/")
}

/// Converts `config.input_dir` into shards, `stats.tsv` and `errors.tsv`
/// under `config.output_dir`. Stale shard files from earlier runs are
/// removed first.
pub fn ingest(config: &IngestConfig, mapper: &Mapper) -> Result<IngestStats, IngestError> {
    let started = Instant::now();
    if config.shard_size == 0 {
        return Err(IngestError::InvalidConfig("shard size must be at least 1".into()));
    }
    if config.parallelism == 0 {
        return Err(IngestError::InvalidConfig("parallelism must be at least 1".into()));
    }
    let pairs = scan_inputs(&config.input_dir)?;
    let out = &config.output_dir;
    fs::create_dir_all(out).map_err(io_err(out))?;
    for entry in fs::read_dir(out).map_err(io_err(out))? {
        let path = entry.map_err(io_err(out))?.path();
        if path.file_name().is_some_and(|n| is_shard_name(&n.to_string_lossy())) {
            fs::remove_file(&path).map_err(io_err(&path))?;
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallelism)
        .build()
        .map_err(|e| IngestError::InvalidConfig(e.to_string()))?;

    let mut stats = IngestStats {
        files_scanned: pairs.len() as u64,
        ..IngestStats::default()
    };
    let mut seen: HashSet<[u8; 32]> = HashSet::new();
    let mut errors = String::new();
    let mut shards = ShardWriter {
        config,
        current: Graph::new(),
        records: 0,
        next_index: 0,
        triples: 0,
    };

    for chunk in pairs.chunks(CHUNK) {
        let results: Vec<Result<Vec<Outcome>, IngestError>> =
            pool.install(|| chunk.par_iter().map(|p| process(p, mapper)).collect());
        for (pair, result) in chunk.iter().zip(results) {
            let file = relative(&pair.ome, &config.input_dir);
            for outcome in result? {
                match outcome {
                    Ok(c) => {
                        if seen.insert(c.digest) {
                            stats.images_converted += 1;
                            stats.external_links_emitted += c.links;
                            shards.push(&c.graph)?;
                        } else {
                            stats.duplicates_dropped += 1;
                        }
                    }
                    Err(f) => {
                        if !config.skip_errors {
                            return Err(IngestError::Record {
                                file,
                                image_id: f.image_id,
                                code: f.code,
                                message: f.message,
                            });
                        }
                        if !f.image_id.is_empty() {
                            stats.images_skipped += 1;
                        }
                        let _ = writeln!(errors, "{file}\t{}\t{}", f.image_id, f.code);
                    }
                }
            }
        }
    }
    shards.flush()?;
    stats.triples_emitted = shards.triples;
    stats.wall_time_ms = u64::try_from(started.elapsed().as_millis()).unwrap_or(u64::MAX);

    let errors_path = out.join("errors.tsv");
    fs::write(&errors_path, errors).map_err(io_err(&errors_path))?;
    let stats_path = out.join("stats.tsv");
    fs::write(&stats_path, stats.to_tsv()).map_err(io_err(&stats_path))?;
    Ok(stats)
}
