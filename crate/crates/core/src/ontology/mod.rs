//! The microscopy ontology: classes grouped into five categories, property
//! definitions with cardinality and value constraints, and conversion to and
//! from RDF.

mod roster;
mod export;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::rdf::Iri;

pub use self::roster::{
    build_core_ontology, build_core_ontology_in, DEFAULT_NAMESPACE, MAX_ACCELERATION_VOLTAGE_KV,
};
pub use self::export::{registry_from_graph, registry_to_graph, META_NAMESPACE};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OntologyError {
    #[error("not found: <{0}>")]
    NotFound(String),
    #[error("duplicate IRI <{0}>")]
    DuplicateIri(String),
    #[error("<{iri}> is outside the ontology namespace <{namespace}>")]
    OutsideNamespace { iri: String, namespace: String },
    #[error("class <{0}> has an empty label")]
    EmptyLabel(String),
    #[error("<{iri}> refers to unregistered class <{class}>")]
    UnknownClass { iri: String, class: String },
    #[error("property <{0}> has minCount greater than maxCount")]
    BadCardinality(String),
    #[error("malformed schema graph: {0}")]
    MalformedSchema(String),
}

/// The five top-level groupings of the ontology.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Category {
    Image,
    Experimenter,
    Instrument,
    BioSample,
    Screening,
}

impl Category {
    pub const ALL: [Category; 5] = [
        Category::Image,
        Category::Experimenter,
        Category::Instrument,
        Category::BioSample,
        Category::Screening,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Image => "IMAGE",
            Category::Experimenter => "EXPERIMENTER",
            Category::Instrument => "INSTRUMENT",
            Category::BioSample => "BIOSAMPLE",
            Category::Screening => "SCREENING",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = OntologyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Category::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| OntologyError::MalformedSchema(format!("unknown category {s:?}")))
    }
}

/// Whether a class was carried over from the OME model or added on top of it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Origin {
    Translated,
    Extended,
}

impl Origin {
    pub fn as_str(self) -> &'static str {
        match self {
            Origin::Translated => "translated",
            Origin::Extended => "extended",
        }
    }
}

impl FromStr for Origin {
    type Err = OntologyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "translated" => Ok(Origin::Translated),
            "extended" => Ok(Origin::Extended),
            other => Err(OntologyError::MalformedSchema(format!("unknown origin {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OntologyClass {
    pub iri: Iri,
    pub label: String,
    /// Absent only for classes of translated fragments.
    pub category: Option<Category>,
    pub origin: Origin,
    pub superclass: Option<Iri>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PropertyRange {
    Class(Iri),
    Datatype(Iri),
}

impl PropertyRange {
    pub fn iri(&self) -> &Iri {
        match self {
            PropertyRange::Class(iri) | PropertyRange::Datatype(iri) => iri,
        }
    }

    pub fn is_datatype(&self) -> bool {
        matches!(self, PropertyRange::Datatype(_))
    }
}

/// Numeric limits on the values of a datatype property.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ValueBounds {
    pub min_exclusive: Option<f64>,
    pub min_inclusive: Option<f64>,
    pub max_inclusive: Option<f64>,
    pub max_exclusive: Option<f64>,
}

impl ValueBounds {
    pub fn contains(&self, v: f64) -> bool {
        self.min_exclusive.is_none_or(|m| v > m)
            && self.min_inclusive.is_none_or(|m| v >= m)
            && self.max_inclusive.is_none_or(|m| v <= m)
            && self.max_exclusive.is_none_or(|m| v < m)
    }

    /// Interval notation, e.g. `(0, 1000]`.
    pub fn describe(&self) -> String {
        let lower = match (self.min_exclusive, self.min_inclusive) {
            (Some(m), _) => format!("({m}"),
            (None, Some(m)) => format!("[{m}"),
            (None, None) => "(-inf".to_string(),
        };
        let upper = match (self.max_exclusive, self.max_inclusive) {
            (Some(m), _) => format!("{m})"),
            (None, Some(m)) => format!("{m}]"),
            (None, None) => "+inf)".to_string(),
        };
        format!("{lower}, {upper}")
    }
}

impl Eq for ValueBounds {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyDef {
    pub iri: Iri,
    pub label: String,
    pub domain: Iri,
    pub range: PropertyRange,
    pub min_count: u32,
    /// `None` means unbounded.
    pub max_count: Option<u32>,
    /// When the subject also carries this property, `min_count` is raised to 1.
    pub required_if: Option<Iri>,
    pub bounds: Option<ValueBounds>,
    pub comment: Option<String>,
}

impl PropertyDef {
    pub fn new(iri: Iri, label: impl Into<String>, domain: Iri, range: PropertyRange) -> Self {
        PropertyDef {
            iri,
            label: label.into(),
            domain,
            range,
            min_count: 0,
            max_count: None,
            required_if: None,
            bounds: None,
            comment: None,
        }
    }

    pub fn cardinality(mut self, min: u32, max: Option<u32>) -> Self {
        self.min_count = min;
        self.max_count = max;
        self
    }

    pub fn required_if(mut self, trigger: Iri) -> Self {
        self.required_if = Some(trigger);
        self
    }

    pub fn bounds(mut self, bounds: ValueBounds) -> Self {
        self.bounds = Some(bounds);
        self
    }

    pub fn comment(mut self, comment: impl Into<String>) -> Self {
        self.comment = Some(comment.into());
        self
    }
}

/// Classes and properties of one ontology namespace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OntologyRegistry {
    namespace: Iri,
    classes: BTreeMap<Iri, OntologyClass>,
    properties: BTreeMap<Iri, PropertyDef>,
}

impl OntologyRegistry {
    pub fn new(namespace: Iri) -> Self {
        OntologyRegistry {
            namespace,
            classes: BTreeMap::new(),
            properties: BTreeMap::new(),
        }
    }

    pub fn namespace(&self) -> &Iri {
        &self.namespace
    }

    /// `namespace + local`.
    pub fn term(&self, local: &str) -> Iri {
        self.namespace
            .join(local)
            .expect("local names used by the toolkit are IRI-safe")
    }

    pub fn add_class(&mut self, class: OntologyClass) -> Result<(), OntologyError> {
        if class.label.is_empty() {
            return Err(OntologyError::EmptyLabel(class.iri.as_str().into()));
        }
        if !class.iri.starts_with(&self.namespace) {
            return Err(OntologyError::OutsideNamespace {
                iri: class.iri.as_str().into(),
                namespace: self.namespace.as_str().into(),
            });
        }
        if self.classes.contains_key(&class.iri) || self.properties.contains_key(&class.iri) {
            return Err(OntologyError::DuplicateIri(class.iri.as_str().into()));
        }
        if let Some(sup) = &class.superclass {
            if !self.classes.contains_key(sup) {
                return Err(OntologyError::UnknownClass {
                    iri: class.iri.as_str().into(),
                    class: sup.as_str().into(),
                });
            }
        }
        self.classes.insert(class.iri.clone(), class);
        Ok(())
    }

    pub fn add_property(&mut self, prop: PropertyDef) -> Result<(), OntologyError> {
        if !prop.iri.starts_with(&self.namespace) {
            return Err(OntologyError::OutsideNamespace {
                iri: prop.iri.as_str().into(),
                namespace: self.namespace.as_str().into(),
            });
        }
        if self.classes.contains_key(&prop.iri) || self.properties.contains_key(&prop.iri) {
            return Err(OntologyError::DuplicateIri(prop.iri.as_str().into()));
        }
        if !self.classes.contains_key(&prop.domain) {
            return Err(OntologyError::UnknownClass {
                iri: prop.iri.as_str().into(),
                class: prop.domain.as_str().into(),
            });
        }
        if let PropertyRange::Class(range) = &prop.range {
            if !self.classes.contains_key(range) {
                return Err(OntologyError::UnknownClass {
                    iri: prop.iri.as_str().into(),
                    class: range.as_str().into(),
                });
            }
        }
        if prop.max_count.is_some_and(|max| max == 0 || prop.min_count > max) {
            return Err(OntologyError::BadCardinality(prop.iri.as_str().into()));
        }
        self.properties.insert(prop.iri.clone(), prop);
        Ok(())
    }

    pub fn lookup_class(&self, iri: &Iri) -> Result<&OntologyClass, OntologyError> {
        self.classes
            .get(iri)
            .ok_or_else(|| OntologyError::NotFound(iri.as_str().into()))
    }

    pub fn class_by_label(&self, label: &str) -> Option<&OntologyClass> {
        self.classes.values().find(|c| c.label == label)
    }

    pub fn property(&self, iri: &Iri) -> Option<&PropertyDef> {
        self.properties.get(iri)
    }

    pub fn classes(&self) -> impl Iterator<Item = &OntologyClass> {
        self.classes.values()
    }

    pub fn properties(&self) -> impl Iterator<Item = &PropertyDef> {
        self.properties.values()
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn property_count(&self) -> usize {
        self.properties.len()
    }

    /// Classes with no superclass.
    pub fn upper_level_classes(&self) -> impl Iterator<Item = &OntologyClass> {
        self.classes.values().filter(|c| c.superclass.is_none())
    }

    /// Properties whose domain is `class`.
    pub fn properties_of<'a>(&'a self, class: &'a Iri) -> impl Iterator<Item = &'a PropertyDef> + 'a {
        self.properties.values().filter(move |p| p.domain == *class)
    }

    /// True if `class` equals `ancestor` or reaches it through superclass links.
    pub fn is_subclass_of(&self, class: &Iri, ancestor: &Iri) -> bool {
        let mut current = Some(class);
        let mut steps = 0;
        while let Some(c) = current {
            if c == ancestor {
                return true;
            }
            steps += 1;
            if steps > self.classes.len() {
                return false;
            }
            current = self.classes.get(c).and_then(|k| k.superclass.as_ref());
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_examples() {
        let r = build_core_ontology();
        let image = r.lookup_class(&r.term("Image")).unwrap();
        assert_eq!(image.category, Some(Category::Image));
        assert_eq!(image.origin, Origin::Translated);
        let bio = r.lookup_class(&r.term("BioSample")).unwrap();
        assert_eq!(bio.origin, Origin::Extended);
        assert!(matches!(
            r.lookup_class(&r.term("Nope")),
            Err(OntologyError::NotFound(_))
        ));
    }

    #[test]
    fn core_counts() {
        let r = build_core_ontology();
        assert_eq!(r.upper_level_classes().count(), 18);
        assert_eq!(r.class_count(), 18);
        assert_eq!(
            r.classes().filter(|c| c.origin == Origin::Extended).count(),
            7
        );
        let cats: std::collections::BTreeSet<_> = r.classes().filter_map(|c| c.category).collect();
        assert_eq!(cats.into_iter().collect::<Vec<_>>(), Category::ALL.to_vec());
        assert!(r.classes().all(|c| c.category.is_some()));
    }

    #[test]
    fn required_properties_present() {
        let r = build_core_ontology();
        let check = |prop: &str, domain: &str, range: &str| {
            let p = r.property(&r.term(prop)).unwrap_or_else(|| panic!("{prop} missing"));
            assert_eq!(p.domain, r.term(domain), "{prop} domain");
            assert!(p.range.iri().as_str().ends_with(range), "{prop} range");
        };
        check("acquiredBy", "Image", "Experimenter");
        check("acquiredWith", "Image", "Instrument");
        check("depicts", "Image", "BioSample");
        check("containedIn", "BioSample", "SampleContainer");
        check("derivedFrom", "BioSample", "Bioresource");
        check("hasImagingCondition", "Image", "ImagingCondition");
        check("accelerationVoltage", "ImagingCondition", "decimal");
        check("electronGunType", "ImagingCondition", "string");
        check("electronWavelength", "ImagingCondition", "decimal");
        check("preparedBy", "BioSample", "SamplePreparation");
        check("stainingMethod", "SamplePreparation", "string");
        check("hasObservation", "Image", "PhenotypeData");
    }

    #[test]
    fn category_assignment() {
        let r = build_core_ontology();
        let cat = |l: &str| r.class_by_label(l).unwrap().category.unwrap();
        for l in ["Image", "ROI"] {
            assert_eq!(cat(l), Category::Image);
        }
        for l in ["Experimenter", "ExperimenterGroup"] {
            assert_eq!(cat(l), Category::Experimenter);
        }
        for l in [
            "Instrument",
            "Detector",
            "Objective",
            "LightSource",
            "Filter",
            "ImagingCondition",
            "ElectronMicroscope",
        ] {
            assert_eq!(cat(l), Category::Instrument);
        }
        for l in [
            "BioSample",
            "Bioresource",
            "SampleContainer",
            "SamplePreparation",
            "PhenotypeData",
        ] {
            assert_eq!(cat(l), Category::BioSample);
        }
        for l in ["Screen", "Plate"] {
            assert_eq!(cat(l), Category::Screening);
        }
    }

    #[test]
    fn registry_rejects_bad_entries() {
        let ns = Iri::new("http://e/o#").unwrap();
        let mut r = OntologyRegistry::new(ns.clone());
        let class = |l: &str| OntologyClass {
            iri: ns.join(l).unwrap(),
            label: l.into(),
            category: None,
            origin: Origin::Translated,
            superclass: None,
        };
        r.add_class(class("A")).unwrap();
        assert!(matches!(r.add_class(class("A")), Err(OntologyError::DuplicateIri(_))));
        let mut empty = class("B");
        empty.label.clear();
        assert!(matches!(r.add_class(empty), Err(OntologyError::EmptyLabel(_))));
        let mut outside = class("C");
        outside.iri = Iri::new("http://elsewhere/C").unwrap();
        assert!(matches!(
            r.add_class(outside),
            Err(OntologyError::OutsideNamespace { .. })
        ));
        let mut orphan = class("D");
        orphan.superclass = Some(ns.join("Missing").unwrap());
        assert!(matches!(r.add_class(orphan), Err(OntologyError::UnknownClass { .. })));

        let p = PropertyDef::new(
            ns.join("p").unwrap(),
            "p",
            ns.join("A").unwrap(),
            PropertyRange::Datatype(crate::rdf::vocab::xsd::string()),
        );
        assert!(matches!(
            r.add_property(p.clone().cardinality(2, Some(1))),
            Err(OntologyError::BadCardinality(_))
        ));
        let mut wrong_domain = p.clone();
        wrong_domain.domain = ns.join("Z").unwrap();
        assert!(matches!(
            r.add_property(wrong_domain),
            Err(OntologyError::UnknownClass { .. })
        ));
        r.add_property(p).unwrap();
    }

    #[test]
    fn bounds() {
        let b = ValueBounds {
            min_exclusive: Some(0.0),
            max_inclusive: Some(1000.0),
            ..Default::default()
        };
        assert!(b.contains(5.0));
        assert!(b.contains(1000.0));
        assert!(!b.contains(0.0));
        assert!(!b.contains(1500.0));
        assert_eq!(b.describe(), "(0, 1000]");
    }
}
