//! Well-known vocabulary IRIs.

use super::term::Iri;

fn known(s: &str) -> Iri {
    Iri::new(s).expect("vocabulary IRI is valid")
}

pub mod rdf {
    use super::{known, Iri};

    pub const NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
    pub const TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
    pub const LANG_STRING: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";

    pub fn type_() -> Iri {
        known(TYPE)
    }

    pub fn lang_string() -> Iri {
        known(LANG_STRING)
    }
}

pub mod rdfs {
    use super::{known, Iri};

    pub const NS: &str = "http://www.w3.org/2000/01/rdf-schema#";
    pub const LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";
    pub const COMMENT: &str = "http://www.w3.org/2000/01/rdf-schema#comment";
    pub const DOMAIN: &str = "http://www.w3.org/2000/01/rdf-schema#domain";
    pub const RANGE: &str = "http://www.w3.org/2000/01/rdf-schema#range";
    pub const SUB_CLASS_OF: &str = "http://www.w3.org/2000/01/rdf-schema#subClassOf";

    pub fn label() -> Iri {
        known(LABEL)
    }

    pub fn comment() -> Iri {
        known(COMMENT)
    }

    pub fn domain() -> Iri {
        known(DOMAIN)
    }

    pub fn range() -> Iri {
        known(RANGE)
    }

    pub fn sub_class_of() -> Iri {
        known(SUB_CLASS_OF)
    }
}

pub mod owl {
    use super::{known, Iri};

    pub const NS: &str = "http://www.w3.org/2002/07/owl#";
    pub const ONTOLOGY: &str = "http://www.w3.org/2002/07/owl#Ontology";
    pub const CLASS: &str = "http://www.w3.org/2002/07/owl#Class";
    pub const OBJECT_PROPERTY: &str = "http://www.w3.org/2002/07/owl#ObjectProperty";
    pub const DATATYPE_PROPERTY: &str = "http://www.w3.org/2002/07/owl#DatatypeProperty";
    pub const VERSION_INFO: &str = "http://www.w3.org/2002/07/owl#versionInfo";

    pub fn ontology() -> Iri {
        known(ONTOLOGY)
    }

    pub fn class() -> Iri {
        known(CLASS)
    }

    pub fn object_property() -> Iri {
        known(OBJECT_PROPERTY)
    }

    pub fn datatype_property() -> Iri {
        known(DATATYPE_PROPERTY)
    }

    pub fn version_info() -> Iri {
        known(VERSION_INFO)
    }
}

pub mod xsd {
    use super::{known, Iri};

    pub const NS: &str = "http://www.w3.org/2001/XMLSchema#";
    pub const STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
    pub const BOOLEAN: &str = "http://www.w3.org/2001/XMLSchema#boolean";
    pub const INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";
    pub const DECIMAL: &str = "http://www.w3.org/2001/XMLSchema#decimal";
    pub const DOUBLE: &str = "http://www.w3.org/2001/XMLSchema#double";
    pub const FLOAT: &str = "http://www.w3.org/2001/XMLSchema#float";
    pub const DATE_TIME: &str = "http://www.w3.org/2001/XMLSchema#dateTime";
    pub const DATE: &str = "http://www.w3.org/2001/XMLSchema#date";
    pub const POSITIVE_INTEGER: &str = "http://www.w3.org/2001/XMLSchema#positiveInteger";
    pub const NON_NEGATIVE_INTEGER: &str = "http://www.w3.org/2001/XMLSchema#nonNegativeInteger";

    const INTEGER_TYPES: &[&str] = &[
        "integer",
        "int",
        "long",
        "short",
        "byte",
        "nonNegativeInteger",
        "positiveInteger",
        "nonPositiveInteger",
        "negativeInteger",
        "unsignedLong",
        "unsignedInt",
        "unsignedShort",
        "unsignedByte",
    ];

    pub fn is_integer_type(datatype: &str) -> bool {
        datatype
            .strip_prefix(NS)
            .is_some_and(|local| INTEGER_TYPES.contains(&local))
    }

    pub fn is_numeric(datatype: &str) -> bool {
        is_integer_type(datatype) || matches!(datatype, DECIMAL | DOUBLE | FLOAT)
    }

    pub fn string() -> Iri {
        known(STRING)
    }

    pub fn integer() -> Iri {
        known(INTEGER)
    }

    pub fn decimal() -> Iri {
        known(DECIMAL)
    }

    pub fn double() -> Iri {
        known(DOUBLE)
    }

    pub fn boolean() -> Iri {
        known(BOOLEAN)
    }

    pub fn date_time() -> Iri {
        known(DATE_TIME)
    }

    pub fn positive_integer() -> Iri {
        known(POSITIVE_INTEGER)
    }

    pub fn non_negative_integer() -> Iri {
        known(NON_NEGATIVE_INTEGER)
    }

    /// Full IRI for an XSD local name such as `"int"`.
    pub fn named(local: &str) -> Option<Iri> {
        Iri::new(format!("{NS}{local}")).ok()
    }
}
