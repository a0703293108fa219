//! Ontology <-> RDF graph.
//!
//! Classes become `owl:Class` declarations and properties become
//! `owl:ObjectProperty` / `owl:DatatypeProperty` declarations with
//! `rdfs:domain` and `rdfs:range`. Category, origin, cardinality and value
//! bounds are recorded with annotation properties in [`META_NAMESPACE`].

use std::collections::HashMap;

use crate::rdf::vocab::{owl, rdf, rdfs, xsd};
use crate::rdf::{Graph, Iri, Literal, Subject, Term};

use super::{
    OntologyClass, OntologyError, OntologyRegistry, Origin, PropertyDef, PropertyRange,
    ValueBounds,
};

pub const META_NAMESPACE: &str = "https://w3id.org/omerdf/meta#";

pub(crate) fn meta(local: &str) -> Iri {
    Iri::new(format!("{META_NAMESPACE}{local}")).expect("meta terms are valid IRIs")
}

fn ontology_iri(namespace: &Iri) -> Iri {
    let trimmed = namespace.as_str().trim_end_matches(['#', '/']);
    Iri::new(trimmed).unwrap_or_else(|_| namespace.clone())
}

fn decimal(v: f64) -> Literal {
    Literal::typed(v.to_string(), xsd::decimal()).expect("finite bound formats as decimal")
}

pub fn registry_to_graph(reg: &OntologyRegistry) -> Graph {
    let mut g = Graph::new();
    for (prefix, ns) in [
        ("onto", reg.namespace().as_str()),
        ("meta", META_NAMESPACE),
        ("owl", owl::NS),
        ("rdf", rdf::NS),
        ("rdfs", rdfs::NS),
        ("xsd", xsd::NS),
    ] {
        // a custom namespace may coincide with one of the fixed ones
        let _ = g.bind_prefix(prefix, Iri::new(ns).expect("namespace IRI"));
    }

    let ont = ontology_iri(reg.namespace());
    g.add(ont.clone(), rdf::type_(), owl::ontology());
    g.add(
        ont.clone(),
        rdfs::label(),
        Literal::string("Microscopy imaging metadata ontology"),
    );
    g.add(ont.clone(), owl::version_info(), Literal::string(env!("CARGO_PKG_VERSION")));
    g.add(ont, meta("namespace"), Literal::string(reg.namespace().as_str()));

    for class in reg.classes() {
        let s = class.iri.clone();
        g.add(s.clone(), rdf::type_(), owl::class());
        g.add(s.clone(), rdfs::label(), Literal::string(&class.label));
        g.add(s.clone(), meta("origin"), Literal::string(class.origin.as_str()));
        if let Some(cat) = class.category {
            g.add(s.clone(), meta("category"), Literal::string(cat.as_str()));
        }
        if let Some(sup) = &class.superclass {
            g.add(s, rdfs::sub_class_of(), sup.clone());
        }
    }

    for prop in reg.properties() {
        let s = prop.iri.clone();
        let kind = if prop.range.is_datatype() {
            owl::datatype_property()
        } else {
            owl::object_property()
        };
        g.add(s.clone(), rdf::type_(), kind);
        g.add(s.clone(), rdfs::label(), Literal::string(&prop.label));
        g.add(s.clone(), rdfs::domain(), prop.domain.clone());
        g.add(s.clone(), rdfs::range(), prop.range.iri().clone());
        g.add(
            s.clone(),
            meta("minCount"),
            Literal::typed(prop.min_count.to_string(), xsd::non_negative_integer())
                .expect("integer lexical"),
        );
        if let Some(max) = prop.max_count {
            g.add(
                s.clone(),
                meta("maxCount"),
                Literal::typed(max.to_string(), xsd::positive_integer()).expect("integer lexical"),
            );
        }
        if let Some(trigger) = &prop.required_if {
            g.add(s.clone(), meta("requiredIf"), trigger.clone());
        }
        if let Some(b) = &prop.bounds {
            for (name, value) in [
                ("minExclusive", b.min_exclusive),
                ("minInclusive", b.min_inclusive),
                ("maxInclusive", b.max_inclusive),
                ("maxExclusive", b.max_exclusive),
            ] {
                if let Some(v) = value {
                    g.add(s.clone(), meta(name), decimal(v));
                }
            }
        }
        if let Some(c) = &prop.comment {
            g.add(s, rdfs::comment(), Literal::string(c));
        }
    }
    g
}

type Index<'g> = HashMap<(&'g Subject, &'g str), Vec<&'g Term>>;

fn index(g: &Graph) -> Index<'_> {
    let mut idx: Index = HashMap::new();
    for t in g.iter() {
        idx.entry((&t.subject, t.predicate.as_str())).or_default().push(&t.object);
    }
    idx
}

fn malformed(msg: String) -> OntologyError {
    OntologyError::MalformedSchema(msg)
}

fn single<'g>(idx: &Index<'g>, s: &'g Subject, p: &str) -> Result<Option<&'g Term>, OntologyError> {
    match idx.get(&(s, p)).map(Vec::as_slice) {
        None | Some([]) => Ok(None),
        Some([one]) => Ok(Some(one)),
        Some(_) => Err(malformed(format!("{s} has several <{p}> values"))),
    }
}

fn literal_of<'g>(idx: &Index<'g>, s: &'g Subject, p: &str) -> Result<Option<&'g str>, OntologyError> {
    match single(idx, s, p)? {
        None => Ok(None),
        Some(Term::Literal(l)) => Ok(Some(l.lexical())),
        Some(_) => Err(malformed(format!("{s} <{p}> must be a literal"))),
    }
}

fn iri_of<'g>(idx: &Index<'g>, s: &'g Subject, p: &str) -> Result<Option<&'g Iri>, OntologyError> {
    match single(idx, s, p)? {
        None => Ok(None),
        Some(Term::Iri(i)) => Ok(Some(i)),
        Some(_) => Err(malformed(format!("{s} <{p}> must be an IRI"))),
    }
}

fn number_of(idx: &Index<'_>, s: &Subject, p: &str) -> Result<Option<f64>, OntologyError> {
    let Some(term) = idx.get(&(s, p)).and_then(|v| v.first()) else {
        return Ok(None);
    };
    term.as_literal()
        .and_then(Literal::as_f64)
        .map(Some)
        .ok_or_else(|| malformed(format!("{s} <{p}> must be numeric")))
}

/// Rebuilds a registry from a graph produced by [`registry_to_graph`].
pub fn registry_from_graph(g: &Graph) -> Result<OntologyRegistry, OntologyError> {
    let idx = index(g);
    let type_p = rdf::TYPE;
    let typed = |class: &str| -> Vec<&Subject> {
        g.iter()
            .filter(|t| t.predicate.as_str() == type_p && t.object.as_iri().is_some_and(|o| o.as_str() == class))
            .map(|t| &t.subject)
            .collect()
    };

    let ont = match typed(owl::ONTOLOGY).as_slice() {
        [one] => *one,
        other => return Err(malformed(format!("expected one owl:Ontology, found {}", other.len()))),
    };
    let ns_text = literal_of(&idx, ont, &meta("namespace").into_string())?
        .ok_or_else(|| malformed("ontology header lacks a namespace".into()))?;
    let namespace = Iri::new(ns_text).map_err(|e| malformed(e.to_string()))?;
    let mut reg = OntologyRegistry::new(namespace);

    let mut pending: Vec<OntologyClass> = Vec::new();
    for s in typed(owl::CLASS) {
        let iri = s
            .as_iri()
            .ok_or_else(|| malformed("class declared on a blank node".into()))?
            .clone();
        let label = literal_of(&idx, s, rdfs::LABEL)?
            .ok_or_else(|| malformed(format!("class {iri} lacks a label")))?;
        let origin = literal_of(&idx, s, &meta("origin").into_string())?
            .ok_or_else(|| malformed(format!("class {iri} lacks an origin")))?
            .parse::<Origin>()?;
        let category = literal_of(&idx, s, &meta("category").into_string())?
            .map(str::parse)
            .transpose()?;
        let superclass = iri_of(&idx, s, rdfs::SUB_CLASS_OF)?.cloned();
        pending.push(OntologyClass {
            iri,
            label: label.to_string(),
            category,
            origin,
            superclass,
        });
    }
    // parents before children
    while !pending.is_empty() {
        let before = pending.len();
        let mut rest = Vec::new();
        for class in pending {
            let ready = class
                .superclass
                .as_ref()
                .is_none_or(|sup| reg.lookup_class(sup).is_ok());
            if ready {
                reg.add_class(class)?;
            } else {
                rest.push(class);
            }
        }
        if rest.len() == before {
            let c = &rest[0];
            return Err(OntologyError::UnknownClass {
                iri: c.iri.as_str().into(),
                class: c.superclass.as_ref().map(|i| i.as_str().to_string()).unwrap_or_default(),
            });
        }
        pending = rest;
    }

    for (kind, is_datatype) in [(owl::OBJECT_PROPERTY, false), (owl::DATATYPE_PROPERTY, true)] {
        for s in typed(kind) {
            let iri = s
                .as_iri()
                .ok_or_else(|| malformed("property declared on a blank node".into()))?
                .clone();
            let label = literal_of(&idx, s, rdfs::LABEL)?.unwrap_or_default();
            let domain = iri_of(&idx, s, rdfs::DOMAIN)?
                .ok_or_else(|| malformed(format!("property {iri} lacks a domain")))?
                .clone();
            let range_iri = iri_of(&idx, s, rdfs::RANGE)?
                .ok_or_else(|| malformed(format!("property {iri} lacks a range")))?
                .clone();
            let range = if is_datatype {
                PropertyRange::Datatype(range_iri)
            } else {
                PropertyRange::Class(range_iri)
            };
            let count = |name: &str| -> Result<Option<u32>, OntologyError> {
                literal_of(&idx, s, &meta(name).into_string())?
                    .map(|lex| {
                        lex.parse::<u32>()
                            .map_err(|_| malformed(format!("property {iri} has bad {name} {lex:?}")))
                    })
                    .transpose()
            };
            let mut def = PropertyDef::new(iri.clone(), label, domain, range)
                .cardinality(count("minCount")?.unwrap_or(0), count("maxCount")?);
            if let Some(trigger) = iri_of(&idx, s, &meta("requiredIf").into_string())? {
                def = def.required_if(trigger.clone());
            }
            let bounds = ValueBounds {
                min_exclusive: number_of(&idx, s, &meta("minExclusive").into_string())?,
                min_inclusive: number_of(&idx, s, &meta("minInclusive").into_string())?,
                max_inclusive: number_of(&idx, s, &meta("maxInclusive").into_string())?,
                max_exclusive: number_of(&idx, s, &meta("maxExclusive").into_string())?,
            };
            if bounds != ValueBounds::default() {
                def = def.bounds(bounds);
            }
            if let Some(c) = literal_of(&idx, s, rdfs::COMMENT)? {
                def = def.comment(c);
            }
            reg.add_property(def)?;
        }
    }
    Ok(reg)
}
