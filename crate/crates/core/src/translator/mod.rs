//! XML schema to ontology translation.
//!
//! Each complex type becomes a class. An element whose type is another
//! complex type becomes an object property `has<Element>`; attributes and
//! simple-typed elements become datatype properties named in lower camel
//! case.

mod xsd;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::ontology::{OntologyClass, OntologyError, OntologyRegistry, Origin, PropertyDef, PropertyRange};
use crate::rdf::vocab;
use crate::rdf::Iri;

pub use xsd::{parse_xsd_subset, AttributeDecl, ComplexType, ElementDecl, XsdError, XsdModel, XsdWarning};

/// The bundled OME-subset schema.
pub const OME_SUBSET_XSD: &str = include_str!("../../data/ome-subset.xsd");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConceptKind {
    Class,
    ObjectProperty,
    DatatypeProperty,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CandidateConcept {
    pub kind: ConceptKind,
    pub name: String,
    pub domain_name: Option<String>,
    pub source_path: String,
    /// Class for object properties, XSD datatype local name for datatype
    /// properties.
    pub range_name: Option<String>,
    /// Extension base of a class candidate.
    pub parent_name: Option<String>,
    pub min_count: u32,
    pub max_count: Option<u32>,
}

impl CandidateConcept {
    fn same_definition(&self, other: &CandidateConcept) -> bool {
        (self.kind, &self.range_name, &self.parent_name, self.min_count, self.max_count)
            == (other.kind, &other.range_name, &other.parent_name, other.min_count, other.max_count)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error(transparent)]
    Xsd(#[from] XsdError),
    #[error("{0:?} is requested as both a class and a property")]
    NameCollision(String),
    #[error("{0:?} has conflicting definitions")]
    ConflictingDefinition(String),
    #[error(transparent)]
    Ontology(#[from] OntologyError),
}

/// `AcquisitionDate` -> `acquisitionDate`, `ID` -> `id`, `ROIRef` -> `roiRef`.
pub fn lower_camel(name: &str) -> String {
    let chars: Vec<char> = name.chars().collect();
    let run = chars.iter().take_while(|c| c.is_uppercase()).count();
    let lowered = match run {
        0 => 0,
        1 => 1,
        _ if chars.get(run).is_some_and(|c| c.is_lowercase()) => run - 1,
        _ => run,
    };
    let mut out = String::with_capacity(name.len());
    for (i, c) in chars.into_iter().enumerate() {
        if i < lowered {
            out.extend(c.to_lowercase());
        } else {
            out.push(c);
        }
    }
    out
}

fn upper_first(name: &str) -> String {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// Class and property candidates for `model`, sorted by kind, name, domain
/// and source path.
pub fn extract_concepts(model: &XsdModel) -> Vec<CandidateConcept> {
    let complex: BTreeSet<&str> = model.complex_types.iter().map(|t| t.name.as_str()).collect();
    let mut out = Vec::new();
    for ty in &model.complex_types {
        out.push(CandidateConcept {
            kind: ConceptKind::Class,
            name: ty.name.clone(),
            domain_name: None,
            source_path: ty.name.clone(),
            range_name: None,
            parent_name: ty.base.clone(),
            min_count: 0,
            max_count: None,
        });
        for el in &ty.elements {
            let (kind, name, range) = if complex.contains(el.type_ref.as_str()) {
                (ConceptKind::ObjectProperty, format!("has{}", el.name), el.type_ref.clone())
            } else {
                (
                    ConceptKind::DatatypeProperty,
                    lower_camel(&el.name),
                    model.resolve_datatype(&el.type_ref).to_string(),
                )
            };
            out.push(CandidateConcept {
                kind,
                name,
                domain_name: Some(ty.name.clone()),
                source_path: format!("{}/{}", ty.name, el.name),
                range_name: Some(range),
                parent_name: None,
                min_count: el.min_occurs,
                max_count: el.max_occurs,
            });
        }
        for attr in &ty.attributes {
            out.push(CandidateConcept {
                kind: ConceptKind::DatatypeProperty,
                name: lower_camel(&attr.name),
                domain_name: Some(ty.name.clone()),
                source_path: format!("{}/@{}", ty.name, attr.name),
                range_name: Some(model.resolve_datatype(&attr.datatype_ref).to_string()),
                parent_name: None,
                min_count: u32::from(attr.required),
                max_count: Some(1),
            });
        }
    }
    out.sort();
    out
}

/// Mints the candidates under `namespace`.
///
/// Identical duplicates collapse. A property name used by several domains
/// is qualified with the domain, so `id` on `Image` becomes `imageId`.
pub fn concepts_to_registry_fragment(
    concepts: &[CandidateConcept],
    namespace: Iri,
) -> Result<OntologyRegistry, TranslateError> {
    let mut classes: BTreeMap<&str, &CandidateConcept> = BTreeMap::new();
    // name -> domain -> definition
    let mut props: BTreeMap<&str, BTreeMap<&str, &CandidateConcept>> = BTreeMap::new();
    for c in concepts {
        let existing = match (c.kind, c.domain_name.as_deref()) {
            (ConceptKind::Class, _) => classes.insert(&c.name, c),
            (_, Some(domain)) => props.entry(&c.name).or_default().insert(domain, c),
            (_, None) => return Err(TranslateError::ConflictingDefinition(c.name.clone())),
        };
        if existing.is_some_and(|prev| !prev.same_definition(c)) {
            return Err(TranslateError::ConflictingDefinition(c.name.clone()));
        }
    }

    let mut locals: BTreeMap<String, (&str, &CandidateConcept)> = BTreeMap::new();
    for (name, by_domain) in &props {
        if classes.contains_key(name) {
            return Err(TranslateError::NameCollision((*name).to_string()));
        }
        for (domain, c) in by_domain {
            let local = if by_domain.len() == 1 {
                (*name).to_string()
            } else {
                format!("{}{}", lower_camel(domain), upper_first(name))
            };
            if classes.contains_key(local.as_str()) || locals.contains_key(&local) {
                return Err(TranslateError::NameCollision(local));
            }
            locals.insert(local, (domain, c));
        }
    }

    let mut reg = OntologyRegistry::new(namespace);
    let mut pending: Vec<&CandidateConcept> = classes.values().copied().collect();
    while !pending.is_empty() {
        let before = pending.len();
        let mut rest = Vec::new();
        for c in pending {
            let parent = c.parent_name.as_deref().map(|p| reg.term(p));
            let waiting = c.parent_name.as_deref().is_some_and(|p| classes.contains_key(p))
                && parent.as_ref().is_some_and(|p| reg.lookup_class(p).is_err());
            if waiting {
                rest.push(c);
                continue;
            }
            reg.add_class(OntologyClass {
                iri: reg.term(&c.name),
                label: c.name.clone(),
                category: None,
                origin: Origin::Translated,
                superclass: parent,
            })?;
        }
        if rest.len() == before {
            return Err(TranslateError::ConflictingDefinition(rest[0].name.clone()));
        }
        pending = rest;
    }

    for (local, (domain, c)) in &locals {
        let range_name = c.range_name.as_deref().unwrap_or("string");
        let range = match c.kind {
            ConceptKind::ObjectProperty => PropertyRange::Class(reg.term(range_name)),
            _ => PropertyRange::Datatype(
                vocab::xsd::named(range_name).ok_or_else(|| TranslateError::ConflictingDefinition(c.name.clone()))?,
            ),
        };
        let def = PropertyDef::new(reg.term(local), local.as_str(), reg.term(domain), range)
            .cardinality(c.min_count, c.max_count)
            .comment(format!("from {}", c.source_path));
        reg.add_property(def)?;
    }
    Ok(reg)
}

/// Result of [`translate`].
#[derive(Debug, Clone)]
pub struct Translation {
    pub model: XsdModel,
    pub concepts: Vec<CandidateConcept>,
    pub registry: OntologyRegistry,
}

/// Parse, extract and mint in one step.
pub fn translate(xsd_text: &str, namespace: Iri) -> Result<Translation, TranslateError> {
    let model = parse_xsd_subset(xsd_text)?;
    let concepts = extract_concepts(&model);
    let registry = concepts_to_registry_fragment(&concepts, namespace)?;
    Ok(Translation {
        model,
        concepts,
        registry,
    })
}

/// The warnings file: one `path<TAB>reason` line per skipped construct.
pub fn warnings_report(warnings: &[XsdWarning]) -> String {
    warnings.iter().map(|w| format!("{w}\n")).collect()
}
