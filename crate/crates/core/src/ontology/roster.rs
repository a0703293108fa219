use crate::rdf::vocab::xsd;
use crate::rdf::Iri;

use super::{
    Category, OntologyClass, OntologyRegistry, Origin, PropertyDef, PropertyRange, ValueBounds,
};

pub const DEFAULT_NAMESPACE: &str = "https://w3id.org/omerdf/onto#";

const CLASSES: &[(&str, Category, Origin)] = &[
    ("Image", Category::Image, Origin::Translated),
    ("ROI", Category::Image, Origin::Translated),
    ("Experimenter", Category::Experimenter, Origin::Translated),
    ("ExperimenterGroup", Category::Experimenter, Origin::Translated),
    ("Instrument", Category::Instrument, Origin::Translated),
    ("Detector", Category::Instrument, Origin::Translated),
    ("Objective", Category::Instrument, Origin::Translated),
    ("LightSource", Category::Instrument, Origin::Translated),
    ("Filter", Category::Instrument, Origin::Translated),
    ("Screen", Category::Screening, Origin::Translated),
    ("Plate", Category::Screening, Origin::Translated),
    ("BioSample", Category::BioSample, Origin::Extended),
    ("Bioresource", Category::BioSample, Origin::Extended),
    ("SampleContainer", Category::BioSample, Origin::Extended),
    ("SamplePreparation", Category::BioSample, Origin::Extended),
    ("PhenotypeData", Category::BioSample, Origin::Extended),
    ("ImagingCondition", Category::Instrument, Origin::Extended),
    ("ElectronMicroscope", Category::Instrument, Origin::Extended),
];

const ONE: Option<u32> = Some(1);
const MANY: Option<u32> = None;

enum R {
    Class(&'static str),
    Xsd(&'static str),
}

struct P {
    name: &'static str,
    domain: &'static str,
    range: R,
    max: Option<u32>,
    comment: Option<&'static str>,
    bounds: Option<ValueBounds>,
}

const fn p(name: &'static str, domain: &'static str, range: R, max: Option<u32>) -> P {
    P {
        name,
        domain,
        range,
        max,
        comment: None,
        bounds: None,
    }
}

const POSITIVE: ValueBounds = ValueBounds {
    min_exclusive: Some(0.0),
    min_inclusive: None,
    max_inclusive: None,
    max_exclusive: None,
};

const AT_LEAST_ONE: ValueBounds = ValueBounds {
    min_exclusive: None,
    min_inclusive: Some(1.0),
    max_inclusive: None,
    max_exclusive: None,
};

/// Acceleration voltage limit in kilovolts, covering SEM and TEM hardware.
pub const MAX_ACCELERATION_VOLTAGE_KV: f64 = 1000.0;

const VOLTAGE: ValueBounds = ValueBounds {
    min_exclusive: Some(0.0),
    min_inclusive: None,
    max_inclusive: Some(MAX_ACCELERATION_VOLTAGE_KV),
    max_exclusive: None,
};

fn properties() -> Vec<P> {
    use R::{Class as C, Xsd as X};
    let with = |mut prop: P, comment: &'static str, bounds: Option<ValueBounds>| {
        prop.comment = Some(comment);
        prop.bounds = bounds;
        prop
    };
    let size = |name: &'static str, axis: &'static str| {
        with(p(name, "Image", X("positiveInteger"), ONE), axis, Some(AT_LEAST_ONE))
    };
    vec![
        // IMAGE
        p("name", "Image", X("string"), ONE),
        p("acquisitionDate", "Image", X("dateTime"), ONE),
        size("sizeX", "pixels along X"),
        size("sizeY", "pixels along Y"),
        size("sizeZ", "focal planes"),
        size("sizeC", "channels"),
        size("sizeT", "time points"),
        with(p("physicalSizeX", "Image", X("decimal"), ONE), "micrometres per pixel along X", Some(POSITIVE)),
        with(p("physicalSizeY", "Image", X("decimal"), ONE), "micrometres per pixel along Y", Some(POSITIVE)),
        p("acquiredBy", "Image", C("Experimenter"), ONE),
        p("acquiredWith", "Image", C("Instrument"), ONE),
        p("acquiredWithElectronMicroscope", "Image", C("ElectronMicroscope"), ONE),
        p("depicts", "Image", C("BioSample"), ONE),
        p("hasImagingCondition", "Image", C("ImagingCondition"), ONE),
        p("hasObservation", "Image", C("PhenotypeData"), MANY),
        p("hasROI", "Image", C("ROI"), MANY),
        p("roiLabel", "ROI", X("string"), ONE),
        // EXPERIMENTER
        p("experimenterName", "Experimenter", X("string"), ONE),
        p("email", "Experimenter", X("string"), ONE),
        p("memberOf", "Experimenter", C("ExperimenterGroup"), MANY),
        p("groupName", "ExperimenterGroup", X("string"), ONE),
        // INSTRUMENT
        p("model", "Instrument", X("string"), ONE),
        p("hasDetector", "Instrument", C("Detector"), MANY),
        p("hasObjective", "Instrument", C("Objective"), MANY),
        p("hasLightSource", "Instrument", C("LightSource"), MANY),
        p("hasFilter", "Instrument", C("Filter"), MANY),
        p("detectorType", "Detector", X("string"), ONE),
        with(p("nominalMagnification", "Objective", X("decimal"), ONE), "magnification factor", Some(POSITIVE)),
        with(p("wavelength", "LightSource", X("decimal"), ONE), "nanometres", Some(POSITIVE)),
        p("filterType", "Filter", X("string"), ONE),
        p("microscopeModel", "ElectronMicroscope", X("string"), ONE),
        with(p("accelerationVoltage", "ImagingCondition", X("decimal"), ONE), "kilovolts", Some(VOLTAGE)),
        p("electronGunType", "ImagingCondition", X("string"), ONE),
        with(p("electronWavelength", "ImagingCondition", X("decimal"), ONE), "picometres", Some(POSITIVE)),
        // BIOSAMPLE
        p("containedIn", "BioSample", C("SampleContainer"), ONE),
        with(p("derivedFrom", "BioSample", C("Bioresource"), ONE), "link to a bioresource record in an external database", None),
        p("preparedBy", "BioSample", C("SamplePreparation"), MANY),
        p("stainingMethod", "SamplePreparation", X("string"), ONE),
        p("description", "PhenotypeData", X("string"), ONE),
        // SCREENING
        p("hasPlate", "Screen", C("Plate"), MANY),
        p("plateName", "Plate", X("string"), ONE),
    ]
}

/// The ontology under [`DEFAULT_NAMESPACE`].
pub fn build_core_ontology() -> OntologyRegistry {
    build_core_ontology_in(Iri::new(DEFAULT_NAMESPACE).expect("default namespace is valid"))
}

/// The ontology with every term minted under `namespace`.
pub fn build_core_ontology_in(namespace: Iri) -> OntologyRegistry {
    let mut reg = OntologyRegistry::new(namespace);
    for (label, category, origin) in CLASSES {
        reg.add_class(OntologyClass {
            iri: reg.term(label),
            label: (*label).to_string(),
            category: Some(*category),
            origin: *origin,
            superclass: None,
        })
        .expect("roster classes are unique");
    }
    for prop in properties() {
        let range = match prop.range {
            R::Class(c) => PropertyRange::Class(reg.term(c)),
            R::Xsd(local) => PropertyRange::Datatype(xsd::named(local).expect("xsd local name")),
        };
        let mut def = PropertyDef::new(reg.term(prop.name), prop.name, reg.term(prop.domain), range)
            .cardinality(0, prop.max);
        if prop.name == "hasImagingCondition" {
            def = def.required_if(reg.term("acquiredWithElectronMicroscope"));
        }
        if let Some(c) = prop.comment {
            def = def.comment(c);
        }
        if let Some(b) = prop.bounds {
            def = def.bounds(b);
        }
        reg.add_property(def).expect("roster properties are consistent");
    }
    reg
}
