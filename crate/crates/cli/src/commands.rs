use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use ome_rdf::ingest::{self as batch, stats_report, IngestConfig, IngestStats};
use ome_rdf::links::{check_links, CheckOptions, LinkRegistry, LinkStatus};
use ome_rdf::mapper::{map_all, Mapper, MintingPolicy, DEFAULT_INSTANCE_BASE};
use ome_rdf::ome::{join_annotations, parse_ome_document, parse_sidecar};
use ome_rdf::ontology::{
    build_core_ontology_in, registry_from_graph, registry_to_graph, OntologyRegistry, DEFAULT_NAMESPACE,
};
use ome_rdf::rdf::{self, Graph, Iri, RdfFormat, Subject, Term};
use ome_rdf::translator::{translate, warnings_report, OME_SUBSET_XSD};
use ome_rdf::validator::{validate_with, ValidatorOptions};

use crate::config::Config;
use crate::fetch::HttpFetcher;
use crate::{CliError, Convert, Ingest, LinkCheck, SchemaExport, Stats, TranslateXsd, Validate};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Tsv,
    Text,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "tsv" => Ok(ReportFormat::Tsv),
            "text" | "txt" => Ok(ReportFormat::Text),
            other => Err(format!("unknown report format {other:?} (expected tsv or text)")),
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), CliError> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|e| CliError::Input(format!("standard output: {e}")))
        }
    }
}

fn iri_setting(cfg: &Config, flag: Option<String>, key: &str, default: &str) -> Result<Iri, CliError> {
    let raw = cfg.pick(flag, key)?.unwrap_or_else(|| default.to_string());
    Iri::new(raw).map_err(|e| CliError::Usage(format!("--{key}: {e}")))
}

fn ontology(cfg: &Config, namespace: Option<String>) -> Result<OntologyRegistry, CliError> {
    Ok(build_core_ontology_in(iri_setting(cfg, namespace, "namespace", DEFAULT_NAMESPACE)?))
}

fn policy(cfg: &Config, instance_base: Option<String>) -> Result<MintingPolicy, CliError> {
    let base = iri_setting(cfg, instance_base, "instance-base", DEFAULT_INSTANCE_BASE)?;
    MintingPolicy::new(base).map_err(|e| CliError::Usage(format!("--instance-base: {e}")))
}

fn link_registry(cfg: &Config, flag: Option<PathBuf>) -> Result<LinkRegistry, CliError> {
    match cfg.pick(flag, "registry")? {
        Some(path) => LinkRegistry::parse(&read(&path)?).map_err(|e| CliError::parse(&path, e)),
        None => Ok(LinkRegistry::builtin()),
    }
}

/// `--format`, else the output file's extension, else the config file,
/// else Turtle.
fn output_format(cfg: &Config, flag: Option<RdfFormat>, output: Option<&Path>) -> Result<RdfFormat, CliError> {
    if let Some(f) = flag.or_else(|| output.and_then(RdfFormat::from_path)) {
        return Ok(f);
    }
    Ok(cfg.pick(None, "format")?.unwrap_or(RdfFormat::Turtle))
}

fn read_graph(path: &Path, hint: Option<RdfFormat>) -> Result<Graph, CliError> {
    let format = hint.or_else(|| RdfFormat::from_path(path)).ok_or_else(|| {
        CliError::Usage(format!(
            "{}: cannot tell the syntax from the extension; use .nt or .ttl or pass --input-format",
            path.display()
        ))
    })?;
    rdf::parse(&read(path)?, format).map_err(|e| CliError::parse(path, e))
}

pub fn schema_export(cfg: &Config, a: SchemaExport) -> Result<(), CliError> {
    let output = a.out.output.as_deref();
    let format = output_format(cfg, a.format, output)?;
    let g = registry_to_graph(&ontology(cfg, a.namespace)?);
    emit(output, &rdf::serialize(&g, format))
}

pub fn translate_xsd(cfg: &Config, a: TranslateXsd) -> Result<(), CliError> {
    let output = a.out.output.as_deref();
    let format = output_format(cfg, a.format, output)?;
    let (text, source) = match &a.xsd {
        Some(path) => (read(path)?, path.clone()),
        None => (OME_SUBSET_XSD.to_string(), PathBuf::from("<bundled OME subset>")),
    };
    let ns = iri_setting(cfg, a.namespace, "namespace", DEFAULT_NAMESPACE)?;
    let t = translate(&text, ns).map_err(|e| CliError::parse(&source, e))?;
    if let Some(path) = &a.warnings {
        fs::write(path, warnings_report(&t.model.warnings)).map_err(|e| CliError::io(path, e))?;
    }
    eprintln!(
        "{}: {} classes, {} properties, {} constructs skipped",
        source.display(),
        t.registry.class_count(),
        t.registry.property_count(),
        t.model.warnings.len()
    );
    emit(output, &rdf::serialize(&registry_to_graph(&t.registry), format))
}

pub fn convert(cfg: &Config, a: Convert) -> Result<(), CliError> {
    let output = a.out.output.as_deref();
    let format = output_format(cfg, a.format, output)?;
    let skip_errors = cfg.switch(a.skip_errors, "skip-errors")?;
    let mapper = Mapper::new(&ontology(cfg, a.namespace)?, policy(cfg, a.instance_base)?, link_registry(cfg, a.registry)?)
        .map_err(|e| CliError::Usage(e.to_string()))?;

    let doc = parse_ome_document(&read(&a.ome)?).map_err(|e| CliError::parse(&a.ome, e))?;
    let annotations = match &a.sidecar {
        Some(path) => parse_sidecar(&read(path)?).map_err(|e| CliError::parse(path, e))?,
        None => Vec::new(),
    };
    let records = join_annotations(&doc, annotations)
        .map_err(|e| CliError::parse(a.sidecar.as_deref().unwrap_or(&a.ome), e))?;

    let out = map_all(&records, &mapper, skip_errors).map_err(|e| CliError::Violations(e.to_string()))?;
    for skipped in &out.skipped {
        eprintln!("skipped {skipped}");
    }
    emit(output, &rdf::serialize(&out.graph, format))
}

pub fn validate(cfg: &Config, a: Validate) -> Result<(), CliError> {
    let g = read_graph(&a.graph, a.input_format)?;
    let registry = match &a.ontology {
        Some(path) => registry_from_graph(&read_graph(path, None)?).map_err(|e| CliError::parse(path, e))?,
        None => ontology(cfg, a.namespace)?,
    };
    let options = ValidatorOptions {
        instance_bases: vec![policy(cfg, a.instance_base)?.instance_base().clone()],
    };
    let report = validate_with(&g, &registry, &options);
    let text = match cfg.pick(a.format, "report-format")?.unwrap_or(ReportFormat::Tsv) {
        ReportFormat::Tsv => report.to_tsv(),
        ReportFormat::Text => report.to_text(),
    };
    emit(a.out.output.as_deref(), &text)?;
    if report.passed {
        Ok(())
    } else {
        Err(CliError::Violations(format!(
            "{}: {} violations in {} triples",
            a.graph.display(),
            report.violations.len(),
            report.checked_triples
        )))
    }
}

pub fn ingest(cfg: &Config, a: Ingest) -> Result<(), CliError> {
    let output = a.output.ok_or_else(|| CliError::Usage("ingest needs --output <DIR>".into()))?;
    let mut config = IngestConfig::new(&a.input, &output);
    config.format = cfg.pick(a.format, "format")?.unwrap_or(config.format);
    config.shard_size = cfg.pick(a.shard_size, "shard-size")?.unwrap_or(config.shard_size);
    config.parallelism = cfg.pick(a.parallelism, "parallelism")?.unwrap_or(config.parallelism);
    config.skip_errors = cfg.switch(a.skip_errors, "skip-errors")?;
    let mapper = Mapper::new(&ontology(cfg, a.namespace)?, policy(cfg, a.instance_base)?, link_registry(cfg, a.registry)?)
        .map_err(|e| CliError::Usage(e.to_string()))?;

    let stats = batch::ingest(&config, &mapper).map_err(|e| match e {
        batch::IngestError::InvalidConfig(_) => CliError::Usage(e.to_string()),
        _ if e.is_input_failure() => CliError::Input(e.to_string()),
        _ => CliError::Violations(e.to_string()),
    })?;
    emit(None, &stats_report(&stats))?;
    if stats.images_skipped > 0 {
        eprintln!(
            "{} images skipped; see {}",
            stats.images_skipped,
            output.join("errors.tsv").display()
        );
    }
    Ok(())
}

/// IRIs in `g` that sit under a registered base.
fn registry_links(g: &Graph, registry: &LinkRegistry) -> BTreeSet<Iri> {
    let bases: Vec<String> = registry
        .prefixes()
        .filter_map(|p| registry.get(p))
        .map(|e| format!("{}/", e.base.as_str()))
        .collect();
    let linked = |iri: &Iri| bases.iter().any(|b| iri.as_str().starts_with(b.as_str()));
    let mut out = BTreeSet::new();
    for t in g.iter() {
        if let Subject::Iri(s) = &t.subject {
            if linked(s) {
                out.insert(s.clone());
            }
        }
        if let Term::Iri(o) = &t.object {
            if linked(o) {
                out.insert(o.clone());
            }
        }
    }
    out
}

pub fn link_check(cfg: &Config, a: LinkCheck) -> Result<(), CliError> {
    let registry = link_registry(cfg, a.registry)?;
    let mut iris = BTreeSet::new();
    for path in &a.graphs {
        iris.extend(registry_links(&read_graph(path, None)?, &registry));
    }
    let defaults = CheckOptions::default();
    let options = CheckOptions {
        offline: cfg.switch(a.offline, "offline")?,
        parallelism: cfg.pick(a.parallelism, "parallelism")?.unwrap_or(defaults.parallelism),
        timeout: cfg
            .pick(a.timeout_secs, "timeout-secs")?
            .map_or(defaults.timeout, Duration::from_secs),
    };
    if options.parallelism == 0 {
        return Err(CliError::Usage("--parallelism must be at least 1".into()));
    }
    let iris: Vec<Iri> = iris.into_iter().collect();
    let results = check_links(&iris, &HttpFetcher, options);

    let mut report = String::new();
    for r in &results {
        let code = r.http_status.map(|c| c.to_string()).unwrap_or_default();
        let _ = writeln!(report, "{}\t{}\t{code}", r.iri.as_str(), r.status.as_str());
    }
    emit(a.out.output.as_deref(), &report)?;
    let dead = results.iter().filter(|r| r.status == LinkStatus::Unreachable).count();
    if dead > 0 {
        return Err(CliError::Violations(format!("{dead} of {} links unreachable", results.len())));
    }
    Ok(())
}

pub fn stats(a: Stats) -> Result<(), CliError> {
    let path = if a.path.is_dir() { a.path.join("stats.tsv") } else { a.path };
    let stats = IngestStats::from_tsv(&read(&path)?)
        .ok_or_else(|| CliError::parse(&path, "not a stats.tsv file"))?;
    emit(a.out.output.as_deref(), &stats_report(&stats))
}
