//! OME records to RDF instance graphs.
//!
//! Every node gets a minted IRI derived from its source id, so mapping is
//! deterministic and nodes shared between records (a biosample imaged
//! twice) collapse under graph set semantics.

use percent_encoding::{utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};
use thiserror::Error;

use crate::links::{LinkError, LinkRegistry};
use crate::ome::{EmAnnotation, ImageRecord, InstrumentKind};
use crate::ontology::{OntologyClass, OntologyRegistry};
use crate::rdf::vocab::{rdf, xsd};
use crate::rdf::{Graph, Iri, Literal, Subject, Term};

pub const DEFAULT_INSTANCE_BASE: &str = "https://w3id.org/omerdf/data/";

/// RFC 3986 unreserved characters stay as they are.
const ENCODE: &AsciiSet = &NON_ALPHANUMERIC.remove(b'-').remove(b'.').remove(b'_').remove(b'~');

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("instance base <{0}> must end with '/' or '#'")]
    BadInstanceBase(String),
    #[error("empty local id")]
    EmptyLocalId,
    #[error("cannot resolve strain {strain:?}: {source}")]
    UnresolvableStrain { strain: String, source: LinkError },
    #[error("class {0:?} is not in the ontology registry")]
    UnknownClassInRegistry(String),
    #[error("property {0:?} is not in the ontology registry")]
    UnknownPropertyInRegistry(String),
    #[error("annotation for {annotation:?} attached to image {image:?}")]
    MismatchedAnnotation { image: String, annotation: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MintingPolicy {
    instance_base: Iri,
}

impl MintingPolicy {
    pub fn new(instance_base: Iri) -> Result<Self, MapError> {
        if !instance_base.as_str().ends_with(['/', '#']) {
            return Err(MapError::BadInstanceBase(instance_base.into_string()));
        }
        Ok(MintingPolicy { instance_base })
    }

    pub fn instance_base(&self) -> &Iri {
        &self.instance_base
    }
}

impl Default for MintingPolicy {
    fn default() -> Self {
        MintingPolicy::new(Iri::new(DEFAULT_INSTANCE_BASE).expect("valid")).expect("ends with '/'")
    }
}

/// `base + lowercase(label) + "/" + percent-encoded local id`.
pub fn mint_iri(policy: &MintingPolicy, class: &OntologyClass, local_id: &str) -> Result<Iri, MapError> {
    mint(policy, &class.label.to_lowercase(), local_id)
}

fn mint(policy: &MintingPolicy, segment: &str, local_id: &str) -> Result<Iri, MapError> {
    if local_id.is_empty() {
        return Err(MapError::EmptyLocalId);
    }
    let encoded = utf8_percent_encode(local_id, ENCODE);
    Ok(Iri::new(format!("{}{segment}/{encoded}", policy.instance_base.as_str()))
        .expect("percent-encoded IRIs are valid"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MappedRecord {
    pub image_iri: Iri,
    pub graph: Graph,
    pub triple_count: usize,
    pub external_links: Vec<Iri>,
}

/// Ontology terms the mapper emits, resolved once.
#[derive(Debug, Clone)]
struct Vocabulary {
    namespace: Iri,
    classes: std::collections::HashMap<&'static str, (Iri, String)>,
    properties: std::collections::HashMap<&'static str, Iri>,
}

const CLASSES: &[&str] = &[
    "Image",
    "Instrument",
    "ElectronMicroscope",
    "Experimenter",
    "BioSample",
    "SampleContainer",
    "SamplePreparation",
    "ImagingCondition",
    "PhenotypeData",
];

const PROPERTIES: &[&str] = &[
    "name",
    "acquisitionDate",
    "sizeX",
    "sizeY",
    "sizeZ",
    "sizeC",
    "sizeT",
    "physicalSizeX",
    "physicalSizeY",
    "acquiredBy",
    "acquiredWith",
    "acquiredWithElectronMicroscope",
    "model",
    "microscopeModel",
    "experimenterName",
    "email",
    "depicts",
    "containedIn",
    "derivedFrom",
    "preparedBy",
    "stainingMethod",
    "hasImagingCondition",
    "accelerationVoltage",
    "electronGunType",
    "electronWavelength",
    "hasObservation",
    "description",
];

impl Vocabulary {
    fn new(registry: &OntologyRegistry) -> Result<Self, MapError> {
        let mut classes = std::collections::HashMap::new();
        for label in CLASSES {
            let class = registry
                .class_by_label(label)
                .ok_or_else(|| MapError::UnknownClassInRegistry((*label).to_string()))?;
            classes.insert(*label, (class.iri.clone(), class.label.to_lowercase()));
        }
        let mut properties = std::collections::HashMap::new();
        for local in PROPERTIES {
            let iri = registry.term(local);
            registry
                .property(&iri)
                .ok_or_else(|| MapError::UnknownPropertyInRegistry((*local).to_string()))?;
            properties.insert(*local, iri);
        }
        Ok(Vocabulary {
            namespace: registry.namespace().clone(),
            classes,
            properties,
        })
    }

    fn p(&self, local: &str) -> Iri {
        self.properties[local].clone()
    }
}

/// Maps image records under a fixed registry, policy and link registry.
#[derive(Debug, Clone)]
pub struct Mapper {
    vocab: Vocabulary,
    policy: MintingPolicy,
    links: LinkRegistry,
}

struct Builder<'m> {
    mapper: &'m Mapper,
    graph: Graph,
    external_links: Vec<Iri>,
}

impl Builder<'_> {
    /// Mints a node and asserts its type.
    fn node(&mut self, class: &str, local_id: &str) -> Result<Iri, MapError> {
        let (class_iri, segment) = &self.mapper.vocab.classes[class];
        let iri = mint(&self.mapper.policy, segment, local_id)?;
        self.graph.add(iri.clone(), rdf::type_(), class_iri.clone());
        Ok(iri)
    }

    fn add(&mut self, s: &Iri, property: &str, o: impl Into<Term>) {
        self.graph.add(Subject::Iri(s.clone()), self.mapper.vocab.p(property), o);
    }
}

fn decimal(v: f64) -> Literal {
    Literal::typed(v.to_string(), xsd::decimal()).expect("finite values format as decimals")
}

fn positive_integer(v: u32) -> Literal {
    Literal::typed(v.to_string(), xsd::positive_integer()).expect("integer lexical")
}

impl Mapper {
    pub fn new(registry: &OntologyRegistry, policy: MintingPolicy, links: LinkRegistry) -> Result<Self, MapError> {
        Ok(Mapper {
            vocab: Vocabulary::new(registry)?,
            policy,
            links,
        })
    }

    pub fn policy(&self) -> &MintingPolicy {
        &self.policy
    }

    pub fn map(&self, record: &ImageRecord) -> Result<MappedRecord, MapError> {
        let mut b = Builder {
            mapper: self,
            graph: Graph::new(),
            external_links: Vec::new(),
        };
        for (prefix, ns) in [
            ("onto", self.vocab.namespace.clone()),
            ("xsd", Iri::new(xsd::NS).expect("valid")),
            ("data", self.policy.instance_base.clone()),
        ] {
            let _ = b.graph.bind_prefix(prefix, ns);
        }

        let img = &record.image;
        let image = b.node("Image", &img.id)?;
        b.add(&image, "name", Literal::string(&img.name));
        if let Some(date) = &img.acquisition_date {
            let lit = Literal::typed(date.as_str(), xsd::date_time()).expect("dateTime is non-numeric");
            b.add(&image, "acquisitionDate", lit);
        }
        let px = &img.pixels;
        for (prop, v) in [
            ("sizeX", px.size_x),
            ("sizeY", px.size_y),
            ("sizeZ", px.size_z),
            ("sizeC", px.size_c),
            ("sizeT", px.size_t),
        ] {
            b.add(&image, prop, positive_integer(v));
        }
        if let Some(v) = px.physical_size_x {
            b.add(&image, "physicalSizeX", decimal(v));
        }
        if let Some(v) = px.physical_size_y {
            b.add(&image, "physicalSizeY", decimal(v));
        }

        if let Some(inst) = &record.instrument {
            let (class, link, model_prop) = match inst.kind {
                InstrumentKind::ElectronMicroscope => {
                    ("ElectronMicroscope", "acquiredWithElectronMicroscope", "microscopeModel")
                }
                InstrumentKind::OpticalMicroscope => ("Instrument", "acquiredWith", "model"),
            };
            let node = b.node(class, &inst.id)?;
            b.add(&image, link, node.clone());
            if let Some(model) = &inst.model {
                b.add(&node, model_prop, Literal::string(model));
            }
        }

        if let Some(exp) = &record.experimenter {
            let node = b.node("Experimenter", &exp.id)?;
            b.add(&image, "acquiredBy", node.clone());
            b.add(&node, "experimenterName", Literal::string(&exp.name));
            if let Some(email) = &exp.email {
                b.add(&node, "email", Literal::string(email));
            }
        }

        if let Some(ann) = &record.annotation {
            if ann.image_id != img.id {
                return Err(MapError::MismatchedAnnotation {
                    image: img.id.clone(),
                    annotation: ann.image_id.clone(),
                });
            }
            self.annotate(&mut b, &image, ann)?;
        }

        let graph = b.graph;
        Ok(MappedRecord {
            image_iri: image,
            triple_count: graph.len(),
            graph,
            external_links: b.external_links,
        })
    }

    fn annotate(&self, b: &mut Builder, image: &Iri, ann: &EmAnnotation) -> Result<(), MapError> {
        let sample = b.node("BioSample", &ann.sample_id)?;
        b.add(image, "depicts", sample.clone());

        if let Some(c) = &ann.container_id {
            let container = b.node("SampleContainer", c)?;
            b.add(&sample, "containedIn", container);
        }
        if let Some(strain) = &ann.strain_id {
            let external = self.links.resolve(strain).map_err(|source| MapError::UnresolvableStrain {
                strain: strain.clone(),
                source,
            })?;
            let prefix = strain.split_once(':').map_or("", |(p, _)| p);
            if let Some(entry) = self.links.get(prefix) {
                let ns = Iri::new(format!("{}/", entry.base.as_str())).expect("base plus slash");
                let _ = b.graph.bind_prefix(prefix, ns);
            }
            b.add(&sample, "derivedFrom", external.clone());
            b.external_links.push(external);
        }
        if let Some(stain) = &ann.staining_method {
            let prep = b.node("SamplePreparation", &format!("{}_{stain}", ann.sample_id))?;
            b.add(&sample, "preparedBy", prep.clone());
            b.add(&prep, "stainingMethod", Literal::string(stain));
        }

        let has_condition = ann.acceleration_voltage_kv.is_some()
            || ann.electron_gun_type.is_some()
            || ann.electron_wavelength_pm.is_some();
        if has_condition {
            let cond = b.node("ImagingCondition", &ann.image_id)?;
            b.add(image, "hasImagingCondition", cond.clone());
            if let Some(v) = ann.acceleration_voltage_kv {
                b.add(&cond, "accelerationVoltage", decimal(v));
            }
            if let Some(gun) = &ann.electron_gun_type {
                b.add(&cond, "electronGunType", Literal::string(gun));
            }
            if let Some(v) = ann.electron_wavelength_pm {
                b.add(&cond, "electronWavelength", decimal(v));
            }
        }

        for (n, obs) in ann.phenotype_observations.iter().enumerate() {
            let node = b.node("PhenotypeData", &format!("{}-{}", ann.image_id, n + 1))?;
            b.add(image, "hasObservation", node.clone());
            b.add(&node, "description", Literal::string(obs));
        }
        Ok(())
    }
}

/// Maps one record. Builds a [`Mapper`] per call; use [`Mapper`] directly
/// for many records.
pub fn map_pair(
    record: &ImageRecord,
    registry: &OntologyRegistry,
    policy: &MintingPolicy,
    links: &LinkRegistry,
) -> Result<MappedRecord, MapError> {
    Mapper::new(registry, policy.clone(), links.clone())?.map(record)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("image {image_id:?}: {error}")]
pub struct RecordError {
    pub image_id: String,
    pub error: MapError,
}

#[derive(Debug, Clone, Default)]
pub struct MapAllOutput {
    pub graph: Graph,
    pub records: Vec<MappedRecord>,
    /// Records skipped under `skip_errors`, in input order.
    pub skipped: Vec<RecordError>,
}

/// Maps every record and merges the graphs. The first failure aborts unless
/// `skip_errors` is set, in which case failing records are reported and
/// left out.
pub fn map_all(records: &[ImageRecord], mapper: &Mapper, skip_errors: bool) -> Result<MapAllOutput, RecordError> {
    let mut out = MapAllOutput::default();
    for record in records {
        match mapper.map(record) {
            Ok(mapped) => {
                out.graph.extend_from(&mapped.graph);
                out.records.push(mapped);
            }
            Err(error) => {
                let err = RecordError {
                    image_id: record.image.id.clone(),
                    error,
                };
                if !skip_errors {
                    return Err(err);
                }
                out.skipped.push(err);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ome::{OmeImage, Pixels};
    use crate::ontology::build_core_ontology;

    fn image(id: &str) -> ImageRecord {
        ImageRecord {
            image: OmeImage {
                id: id.into(),
                name: format!("{id}.tif"),
                acquisition_date: None,
                pixels: Pixels {
                    size_x: 512,
                    size_y: 512,
                    size_z: 1,
                    size_c: 1,
                    size_t: 1,
                    physical_size_x: None,
                    physical_size_y: None,
                },
                instrument_ref: None,
                experimenter_ref: None,
            },
            instrument: None,
            experimenter: None,
            annotation: None,
        }
    }

    fn mapper() -> Mapper {
        Mapper::new(&build_core_ontology(), MintingPolicy::default(), LinkRegistry::builtin()).unwrap()
    }

    #[test]
    fn mint_examples() {
        let policy = MintingPolicy::new(Iri::new("http://ex.org/i/").unwrap()).unwrap();
        let reg = build_core_ontology();
        let img = reg.class_by_label("Image").unwrap();
        assert_eq!(mint_iri(&policy, img, "IMG001").unwrap().as_str(), "http://ex.org/i/image/IMG001");
        assert_eq!(mint_iri(&policy, img, "a b").unwrap().as_str(), "http://ex.org/i/image/a%20b");
        assert_eq!(mint_iri(&policy, img, ""), Err(MapError::EmptyLocalId));
        let bs = reg.class_by_label("BioSample").unwrap();
        assert_eq!(mint_iri(&policy, bs, "S:1/2").unwrap().as_str(), "http://ex.org/i/biosample/S%3A1%2F2");
        assert!(MintingPolicy::new(Iri::new("http://ex.org/i").unwrap()).is_err());
    }

    #[test]
    fn image_only_is_seven_triples() {
        let rec = mapper().map(&image("IMG001")).unwrap();
        assert_eq!(rec.triple_count, 7);
        assert_eq!(rec.graph.len(), 7);
        assert!(rec.external_links.is_empty());
    }

    #[test]
    fn strain_link() {
        let mut r = image("IMG001");
        let mut ann = EmAnnotation::new("IMG001", "S1");
        ann.strain_id = Some("rikenbrc_mouse:RBRC001".into());
        ann.staining_method = Some("osmium".into());
        r.annotation = Some(ann);
        let rec = mapper().map(&r).unwrap();
        let ext = Iri::new("http://metadb.riken.jp/metadb/db/rikenbrc_mouse/RBRC001").unwrap();
        let sample = Iri::new(format!("{DEFAULT_INSTANCE_BASE}biosample/S1")).unwrap();
        let derived = build_core_ontology().term("derivedFrom");
        assert!(rec.graph.contains(&crate::rdf::Triple::new(sample, derived, ext.clone())));
        assert_eq!(rec.external_links, [ext]);
    }

    #[test]
    fn unresolvable_strain() {
        let mut r = image("IMG001");
        let mut ann = EmAnnotation::new("IMG001", "S1");
        ann.strain_id = Some("nosuch:X".into());
        r.annotation = Some(ann);
        assert!(matches!(mapper().map(&r), Err(MapError::UnresolvableStrain { .. })));
    }

    #[test]
    fn missing_class_in_registry() {
        let reg = OntologyRegistry::new(Iri::new("http://e/o#").unwrap());
        assert!(matches!(
            Mapper::new(&reg, MintingPolicy::default(), LinkRegistry::new()),
            Err(MapError::UnknownClassInRegistry(_))
        ));
    }

    #[test]
    fn map_all_skips_or_fails() {
        let mut bad = image("B");
        let mut ann = EmAnnotation::new("B", "S1");
        ann.strain_id = Some("nosuch:X".into());
        bad.annotation = Some(ann);
        let recs = vec![image("A"), bad, image("C")];
        let m = mapper();
        let err = map_all(&recs, &m, false).unwrap_err();
        assert_eq!(err.image_id, "B");
        let out = map_all(&recs, &m, true).unwrap();
        assert_eq!(out.records.len(), 2);
        assert_eq!(out.skipped.len(), 1);
        assert_eq!(out.graph.len(), 14);
        assert!(map_all(&[], &m, false).unwrap().graph.is_empty());
    }
}
