//! CURIE resolution against partner databases and an optional liveness
//! check behind an injected fetcher.
//!
//! Registry files hold one `prefix<TAB>baseIri<TAB>idPattern` line per
//! entry. Patterns are matched against the whole local id.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use indexmap::IndexMap;
use regex::Regex;
use thiserror::Error;

use crate::rdf::{Iri, TermError};

/// The registry shipped with the crate.
pub const DEFAULT_REGISTRY: &str = include_str!("../data/links.tsv");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinkError {
    #[error("unknown prefix {0:?}")]
    UnknownPrefix(String),
    #[error("{0:?} is not of the form prefix:localId")]
    MalformedCurie(String),
    #[error("local id {local:?} does not match {pattern:?} for prefix {prefix:?}")]
    IdPatternMismatch {
        prefix: String,
        local: String,
        pattern: String,
    },
    #[error(transparent)]
    InvalidIri(#[from] TermError),
    #[error("registry line {line}: {reason}")]
    BadRegistryLine { line: usize, reason: String },
}

#[derive(Debug, Clone)]
pub struct LinkEntry {
    pub base: Iri,
    pattern_source: String,
    pattern: Regex,
}

impl LinkEntry {
    pub fn new(base: Iri, pattern: &str) -> Result<Self, regex::Error> {
        Ok(LinkEntry {
            base,
            pattern: Regex::new(&format!("^(?:{pattern})$"))?,
            pattern_source: pattern.to_string(),
        })
    }

    pub fn pattern(&self) -> &str {
        &self.pattern_source
    }

    pub fn matches(&self, local: &str) -> bool {
        self.pattern.is_match(local)
    }
}

pub fn is_registry_prefix(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

#[derive(Debug, Clone, Default)]
pub struct LinkRegistry {
    entries: IndexMap<String, LinkEntry>,
}

impl LinkRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// The built-in registry.
    pub fn builtin() -> Self {
        Self::parse(DEFAULT_REGISTRY).expect("bundled registry is valid")
    }

    pub fn parse(text: &str) -> Result<Self, LinkError> {
        let mut reg = LinkRegistry::new();
        let body = text.strip_suffix('\n').unwrap_or(text);
        if body.is_empty() {
            return Ok(reg);
        }
        for (i, line) in body.split('\n').enumerate() {
            let bad = |reason: String| LinkError::BadRegistryLine { line: i + 1, reason };
            let fields: Vec<&str> = line.split('\t').collect();
            let [prefix, base, pattern] = fields[..] else {
                return Err(bad(format!("expected 3 tab-separated fields, found {}", fields.len())));
            };
            let base = Iri::new(base).map_err(|e| bad(e.to_string()))?;
            let entry = LinkEntry::new(base, pattern).map_err(|e| bad(e.to_string()))?;
            reg.insert(prefix, entry).map_err(|e| bad(e.to_string()))?;
        }
        Ok(reg)
    }

    /// Adds an entry; prefixes must be new and match `[a-z][a-z0-9_]*`.
    pub fn insert(&mut self, prefix: &str, entry: LinkEntry) -> Result<(), LinkError> {
        if !is_registry_prefix(prefix) {
            return Err(LinkError::MalformedCurie(format!("{prefix}:")));
        }
        if self.entries.contains_key(prefix) {
            return Err(LinkError::BadRegistryLine {
                line: self.entries.len() + 1,
                reason: format!("prefix {prefix:?} registered twice"),
            });
        }
        self.entries.insert(prefix.to_string(), entry);
        Ok(())
    }

    pub fn to_text(&self) -> String {
        self.entries
            .iter()
            .map(|(p, e)| format!("{p}\t{}\t{}\n", e.base.as_str(), e.pattern()))
            .collect()
    }

    pub fn get(&self, prefix: &str) -> Option<&LinkEntry> {
        self.entries.get(prefix)
    }

    pub fn prefixes(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `prefix:localId` -> `baseIri/localId`.
    pub fn resolve(&self, curie: &str) -> Result<Iri, LinkError> {
        let (prefix, local) = curie
            .split_once(':')
            .filter(|(p, l)| is_registry_prefix(p) && !l.is_empty())
            .ok_or_else(|| LinkError::MalformedCurie(curie.to_string()))?;
        let entry = self
            .entries
            .get(prefix)
            .ok_or_else(|| LinkError::UnknownPrefix(prefix.to_string()))?;
        if !entry.matches(local) {
            return Err(LinkError::IdPatternMismatch {
                prefix: prefix.to_string(),
                local: local.to_string(),
                pattern: entry.pattern().to_string(),
            });
        }
        Ok(Iri::new(format!("{}/{local}", entry.base.as_str()))?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FetchError {
    #[error("timed out")]
    Timeout,
    #[error("{0}")]
    Network(String),
}

/// Issues a single request and reports the HTTP status.
pub trait Fetcher: Sync {
    fn fetch(&self, iri: &Iri, timeout: Duration) -> Result<u16, FetchError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LinkStatus {
    Ok,
    Unreachable,
    NotChecked,
}

impl LinkStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            LinkStatus::Ok => "ok",
            LinkStatus::Unreachable => "unreachable",
            LinkStatus::NotChecked => "notChecked",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkCheckResult {
    pub iri: Iri,
    pub status: LinkStatus,
    pub http_status: Option<u16>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    pub offline: bool,
    pub parallelism: usize,
    pub timeout: Duration,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            offline: false,
            parallelism: 8,
            timeout: Duration::from_secs(5),
        }
    }
}

fn check_one(iri: &Iri, fetcher: &dyn Fetcher, timeout: Duration) -> LinkCheckResult {
    let (status, http_status) = match fetcher.fetch(iri, timeout) {
        Ok(code @ 200..=399) => (LinkStatus::Ok, Some(code)),
        Ok(code) => (LinkStatus::Unreachable, Some(code)),
        Err(_) => (LinkStatus::Unreachable, None),
    };
    LinkCheckResult {
        iri: iri.clone(),
        status,
        http_status,
    }
}

/// One result per input, in input order. At most `parallelism` requests
/// are in flight; fetch failures become [`LinkStatus::Unreachable`].
pub fn check_links(iris: &[Iri], fetcher: &dyn Fetcher, options: CheckOptions) -> Vec<LinkCheckResult> {
    if options.offline {
        return iris
            .iter()
            .map(|iri| LinkCheckResult {
                iri: iri.clone(),
                status: LinkStatus::NotChecked,
                http_status: None,
            })
            .collect();
    }
    let workers = options.parallelism.max(1).min(iris.len());
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<LinkCheckResult>>> = iris.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(iri) = iris.get(i) else { break };
                let result = check_one(iri, fetcher, options.timeout);
                *slots[i].lock().expect("slot lock") = Some(result);
            });
        }
    });
    slots
        .into_iter()
        .map(|s| s.into_inner().expect("slot lock").expect("every slot filled"))
        .collect()
}
