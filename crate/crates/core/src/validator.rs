//! Closed-world conformance checks of instance graphs against an ontology
//! registry.
//!
//! Subjects are checked only when they are local, that is inside the
//! ontology namespace, an instance base, or blank. Other IRIs are opaque
//! links.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use chrono::{DateTime, NaiveDate, NaiveDateTime};

use crate::mapper::DEFAULT_INSTANCE_BASE;
use crate::ontology::{OntologyRegistry, PropertyDef, PropertyRange};
use crate::rdf::vocab::{rdf, rdfs, xsd};
use crate::rdf::{Graph, Iri, Literal, Subject, Term, Triple};

/// Declared in the order reports are sorted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ViolationCode {
    BadDatatype,
    CardinalityMax,
    CardinalityMin,
    DomainMismatch,
    RangeMismatch,
    UnknownClass,
    UnknownProperty,
    UntypedSubject,
    ValueOutOfRange,
}

impl ViolationCode {
    pub const ALL: [ViolationCode; 9] = [
        ViolationCode::BadDatatype,
        ViolationCode::CardinalityMax,
        ViolationCode::CardinalityMin,
        ViolationCode::DomainMismatch,
        ViolationCode::RangeMismatch,
        ViolationCode::UnknownClass,
        ViolationCode::UnknownProperty,
        ViolationCode::UntypedSubject,
        ViolationCode::ValueOutOfRange,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ViolationCode::BadDatatype => "BAD_DATATYPE",
            ViolationCode::CardinalityMax => "CARDINALITY_MAX",
            ViolationCode::CardinalityMin => "CARDINALITY_MIN",
            ViolationCode::DomainMismatch => "DOMAIN_MISMATCH",
            ViolationCode::RangeMismatch => "RANGE_MISMATCH",
            ViolationCode::UnknownClass => "UNKNOWN_CLASS",
            ViolationCode::UnknownProperty => "UNKNOWN_PROPERTY",
            ViolationCode::UntypedSubject => "UNTYPED_SUBJECT",
            ViolationCode::ValueOutOfRange => "VALUE_OUT_OF_RANGE",
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Violation {
    pub code: ViolationCode,
    pub subject: Subject,
    pub detail: String,
}

/// One line: code, subject and the violated constraint.
pub fn explain(v: &Violation) -> String {
    format!("{} {}: {}", v.code, v.subject, v.detail)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    /// Sorted by code, subject, detail.
    pub violations: Vec<Violation>,
    pub checked_triples: usize,
    pub passed: bool,
}

impl ValidationReport {
    pub fn count(&self, code: ViolationCode) -> usize {
        self.violations.iter().filter(|v| v.code == code).count()
    }

    pub fn codes(&self) -> BTreeSet<ViolationCode> {
        self.violations.iter().map(|v| v.code).collect()
    }

    /// `code<TAB>subject<TAB>detail` per violation.
    pub fn to_tsv(&self) -> String {
        self.violations
            .iter()
            .map(|v| format!("{}\t{}\t{}\n", v.code, v.subject, v.detail))
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut out: String = self.violations.iter().map(|v| explain(v) + "\n").collect();
        out.push_str(&format!(
            "{} triples checked, {} violations: {}\n",
            self.checked_triples,
            self.violations.len(),
            if self.passed { "passed" } else { "failed" }
        ));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidatorOptions {
    /// Namespaces whose IRIs are checked, in addition to the ontology
    /// namespace.
    pub instance_bases: Vec<Iri>,
}

impl Default for ValidatorOptions {
    fn default() -> Self {
        ValidatorOptions {
            instance_bases: vec![Iri::new(DEFAULT_INSTANCE_BASE).expect("valid")],
        }
    }
}

pub fn validate(g: &Graph, r: &OntologyRegistry) -> ValidationReport {
    validate_with(g, r, &ValidatorOptions::default())
}

struct Checker<'a> {
    registry: &'a OntologyRegistry,
    options: &'a ValidatorOptions,
    types: BTreeMap<&'a Subject, Vec<&'a Iri>>,
    found: BTreeSet<Violation>,
}

impl<'a> Checker<'a> {
    fn is_local(&self, iri: &Iri) -> bool {
        iri.starts_with(self.registry.namespace()) || self.options.instance_bases.iter().any(|b| iri.starts_with(b))
    }

    fn subject_is_local(&self, s: &Subject) -> bool {
        match s {
            Subject::Iri(iri) => self.is_local(iri),
            Subject::Blank(_) => true,
        }
    }

    fn report(&mut self, code: ViolationCode, subject: &Subject, detail: String) {
        self.found.insert(Violation {
            code,
            subject: subject.clone(),
            detail,
        });
    }

    fn has_type_within(&self, s: &Subject, class: &Iri) -> bool {
        self.types
            .get(s)
            .is_some_and(|ts| ts.iter().any(|t| self.registry.is_subclass_of(t, class)))
    }

    fn check_type(&mut self, t: &Triple) {
        match &t.object {
            Term::Iri(class) if self.registry.lookup_class(class).is_ok() => {}
            Term::Iri(class) => {
                self.report(ViolationCode::UnknownClass, &t.subject, format!("class {class} is not registered"))
            }
            other => self.report(
                ViolationCode::UnknownClass,
                &t.subject,
                format!("rdf:type object {other} is not a class IRI"),
            ),
        }
    }

    fn check_statement(&mut self, t: &Triple, prop: &PropertyDef, typed: bool) {
        let s = &t.subject;
        if typed && !self.has_type_within(s, &prop.domain) {
            self.report(
                ViolationCode::DomainMismatch,
                s,
                format!("{} requires a subject of type {}", prop.iri, prop.domain),
            );
        }
        match (&prop.range, &t.object) {
            (PropertyRange::Class(_), Term::Literal(l)) => self.report(
                ViolationCode::RangeMismatch,
                s,
                format!("{} expects a resource, found literal {l}", prop.iri),
            ),
            (PropertyRange::Class(range), object) => {
                let o: Subject = match object {
                    Term::Iri(i) if !self.is_local(i) => return,
                    Term::Iri(i) => Subject::Iri(i.clone()),
                    Term::Blank(b) => Subject::Blank(b.clone()),
                    Term::Literal(_) => unreachable!("handled above"),
                };
                if !self.has_type_within(&o, range) {
                    self.report(
                        ViolationCode::RangeMismatch,
                        s,
                        format!("{} expects an object of type {range}, found {o}", prop.iri),
                    );
                }
            }
            (PropertyRange::Datatype(dt), Term::Literal(l)) => {
                if !datatype_matches(dt, l) {
                    self.report(
                        ViolationCode::BadDatatype,
                        s,
                        format!("{} expects {dt}, found {:?} ({})", prop.iri, l.lexical(), l.datatype()),
                    );
                } else if let Some(bounds) = &prop.bounds {
                    if let Some(v) = l.as_f64().filter(|v| !bounds.contains(*v)) {
                        self.report(
                            ViolationCode::ValueOutOfRange,
                            s,
                            format!("{} value {v} outside {}", prop.iri, bounds.describe()),
                        );
                    }
                }
            }
            (PropertyRange::Datatype(dt), other) => self.report(
                ViolationCode::BadDatatype,
                s,
                format!("{} expects a {dt} literal, found {other}", prop.iri),
            ),
        }
    }

    fn check_cardinality(&mut self, s: &Subject, statements: &[&Triple]) {
        let Some(types) = self.types.get(s).cloned() else { return };
        let applicable: BTreeMap<&Iri, &PropertyDef> = self
            .registry
            .properties()
            .filter(|p| types.iter().any(|t| self.registry.is_subclass_of(t, &p.domain)))
            .map(|p| (&p.iri, p))
            .collect();
        let count = |p: &Iri| statements.iter().filter(|t| t.predicate == *p).count();
        for prop in applicable.values() {
            let n = count(&prop.iri);
            let triggered = prop.required_if.as_ref().filter(|trigger| count(trigger) > 0);
            let min = if triggered.is_some() { prop.min_count.max(1) } else { prop.min_count };
            if (n as u64) < u64::from(min) {
                let why = triggered.map(|t| format!(" because {t} is present")).unwrap_or_default();
                self.report(
                    ViolationCode::CardinalityMin,
                    s,
                    format!("{} has {n} values, minCount {min}{why}", prop.iri),
                );
            }
            if let Some(max) = prop.max_count.filter(|m| n as u64 > u64::from(*m)) {
                self.report(
                    ViolationCode::CardinalityMax,
                    s,
                    format!("{} has {n} values, maxCount {max}", prop.iri),
                );
            }
        }
    }
}

fn datatype_matches(expected: &Iri, l: &Literal) -> bool {
    let dt = l.datatype().as_str();
    let exact = dt == expected.as_str();
    let widened = expected.as_str() == xsd::DECIMAL && xsd::is_integer_type(dt);
    if !(exact || widened) {
        return false;
    }
    let lex = l.lexical();
    match dt {
        xsd::DATE_TIME => {
            DateTime::parse_from_rfc3339(lex).is_ok() || NaiveDateTime::parse_from_str(lex, "%Y-%m-%dT%H:%M:%S%.f").is_ok()
        }
        xsd::DATE => NaiveDate::parse_from_str(lex, "%Y-%m-%d").is_ok(),
        xsd::BOOLEAN => matches!(lex, "true" | "false" | "1" | "0"),
        _ => true,
    }
}

const ANNOTATION_PREDICATES: [&str; 3] = [rdf::TYPE, rdfs::LABEL, rdfs::COMMENT];

pub fn validate_with(g: &Graph, r: &OntologyRegistry, options: &ValidatorOptions) -> ValidationReport {
    let mut by_subject: BTreeMap<&Subject, Vec<&Triple>> = BTreeMap::new();
    let mut types: BTreeMap<&Subject, Vec<&Iri>> = BTreeMap::new();
    for t in g.iter() {
        by_subject.entry(&t.subject).or_default().push(t);
        if t.predicate.as_str() == rdf::TYPE {
            if let Term::Iri(class) = &t.object {
                types.entry(&t.subject).or_default().push(class);
            }
        }
    }
    let mut c = Checker {
        registry: r,
        options,
        types,
        found: BTreeSet::new(),
    };

    for (s, statements) in &by_subject {
        if !c.subject_is_local(s) {
            continue;
        }
        let typed = statements.iter().any(|t| t.predicate.as_str() == rdf::TYPE);
        if !typed {
            c.report(ViolationCode::UntypedSubject, s, "no rdf:type asserted".into());
        }
        for t in statements {
            if t.predicate.as_str() == rdf::TYPE {
                c.check_type(t);
                continue;
            }
            if ANNOTATION_PREDICATES.contains(&t.predicate.as_str()) {
                continue;
            }
            match r.property(&t.predicate) {
                Some(prop) => c.check_statement(t, prop, typed),
                None => c.report(
                    ViolationCode::UnknownProperty,
                    s,
                    format!("property {} is not registered", t.predicate),
                ),
            }
        }
        c.check_cardinality(s, statements);
    }

    let violations: Vec<Violation> = c.found.into_iter().collect();
    ValidationReport {
        passed: violations.is_empty(),
        checked_triples: g.len(),
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology::build_core_ontology;

    fn data(path: &str) -> Iri {
        Iri::new(format!("{DEFAULT_INSTANCE_BASE}{path}")).unwrap()
    }

    #[test]
    fn empty_graph_passes() {
        let report = validate(&Graph::new(), &build_core_ontology());
        assert!(report.passed);
        assert_eq!(report.violations, vec![]);
        assert_eq!(report.checked_triples, 0);
    }

    #[test]
    fn unknown_class() {
        let mut g = Graph::new();
        g.add(data("thing/1"), rdf::type_(), Iri::new("http://example.org/Unicorn").unwrap());
        let report = validate(&g, &build_core_ontology());
        assert_eq!(report.codes(), [ViolationCode::UnknownClass].into());
        assert_eq!(report.violations.len(), 1);
        assert!(!report.passed);
    }

    #[test]
    fn voltage_out_of_range_and_explained() {
        let reg = build_core_ontology();
        let mut g = Graph::new();
        let cond = data("imagingcondition/I1");
        g.add(cond.clone(), rdf::type_(), reg.term("ImagingCondition"));
        g.add(
            cond,
            reg.term("accelerationVoltage"),
            Literal::typed("1500", xsd::decimal()).unwrap(),
        );
        let report = validate(&g, &reg);
        assert_eq!(report.codes(), [ViolationCode::ValueOutOfRange].into());
        let msg = explain(&report.violations[0]);
        assert!(msg.contains("VALUE_OUT_OF_RANGE") && msg.contains("(0, 1000]"), "{msg}");
    }

    #[test]
    fn conditional_minimum() {
        let reg = build_core_ontology();
        let mut g = Graph::new();
        let img = data("image/I1");
        let em = data("electronmicroscope/E1");
        g.add(img.clone(), rdf::type_(), reg.term("Image"));
        g.add(img, reg.term("acquiredWithElectronMicroscope"), em.clone());
        g.add(em, rdf::type_(), reg.term("ElectronMicroscope"));
        let report = validate(&g, &reg);
        assert_eq!(report.codes(), [ViolationCode::CardinalityMin].into());
        let msg = explain(&report.violations[0]);
        assert!(msg.contains("hasImagingCondition") && msg.contains("minCount 1"), "{msg}");
    }

    #[test]
    fn external_subjects_are_opaque() {
        let mut g = Graph::new();
        let ext = Iri::new("http://metadb.riken.jp/metadb/db/rikenbrc_mouse/X").unwrap();
        g.add(ext, Iri::new("http://example.org/anything").unwrap(), Literal::string("x"));
        assert!(validate(&g, &build_core_ontology()).passed);
    }

    #[test]
    fn untyped_suppresses_domain() {
        let reg = build_core_ontology();
        let mut g = Graph::new();
        g.add(data("image/I1"), reg.term("name"), Literal::string("n"));
        let report = validate(&g, &reg);
        assert_eq!(report.codes(), [ViolationCode::UntypedSubject].into());
    }

    #[test]
    fn bad_datatype_mentions_lexical() {
        let reg = build_core_ontology();
        let mut g = Graph::new();
        let cond = data("imagingcondition/I1");
        g.add(cond.clone(), rdf::type_(), reg.term("ImagingCondition"));
        g.add(cond, reg.term("accelerationVoltage"), Literal::string("abc"));
        let report = validate(&g, &reg);
        assert_eq!(report.codes(), [ViolationCode::BadDatatype].into());
        assert!(explain(&report.violations[0]).contains("\"abc\""));
    }
}
