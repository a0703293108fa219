//! OME-XML instance documents, EM annotation sidecars, and joining the two.

mod document;
mod sidecar;

use std::collections::{HashMap, HashSet};

use thiserror::Error;

pub use document::parse_ome_document;
pub use sidecar::{parse_sidecar, parse_sidecar_with, serialize_sidecar, SidecarError, SidecarOptions, SIDECAR_COLUMNS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OmeError {
    #[error("malformed XML: {0}")]
    MalformedXml(String),
    #[error("reference to undeclared id {0:?}")]
    DanglingReference(String),
    #[error("missing required field {0}")]
    MissingRequiredField(String),
    #[error("invalid dimension at {0}")]
    InvalidDimension(String),
    #[error("id {0:?} is declared twice")]
    DuplicateId(String),
    #[error("{path}: {value:?} is not an RFC 3339 timestamp with a timezone")]
    InvalidTimestamp { path: String, value: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pixels {
    pub size_x: u32,
    pub size_y: u32,
    pub size_z: u32,
    pub size_c: u32,
    pub size_t: u32,
    /// Micrometres per pixel.
    pub physical_size_x: Option<f64>,
    pub physical_size_y: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OmeImage {
    pub id: String,
    pub name: String,
    /// Normalised RFC 3339, `Z` for UTC.
    pub acquisition_date: Option<String>,
    pub pixels: Pixels,
    pub instrument_ref: Option<String>,
    pub experimenter_ref: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InstrumentKind {
    OpticalMicroscope,
    ElectronMicroscope,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmeInstrument {
    pub id: String,
    pub kind: InstrumentKind,
    pub model: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmeExperimenter {
    pub id: String,
    pub name: String,
    pub email: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct OmeDocument {
    pub images: Vec<OmeImage>,
    pub instruments: Vec<OmeInstrument>,
    pub experimenters: Vec<OmeExperimenter>,
}

impl OmeDocument {
    pub fn instrument(&self, id: &str) -> Option<&OmeInstrument> {
        self.instruments.iter().find(|i| i.id == id)
    }

    pub fn experimenter(&self, id: &str) -> Option<&OmeExperimenter> {
        self.experimenters.iter().find(|e| e.id == id)
    }
}

/// One sidecar row.
#[derive(Debug, Clone, PartialEq)]
pub struct EmAnnotation {
    pub image_id: String,
    pub sample_id: String,
    pub container_id: Option<String>,
    /// CURIE such as `rikenbrc_mouse:RBRC00001`.
    pub strain_id: Option<String>,
    pub staining_method: Option<String>,
    pub acceleration_voltage_kv: Option<f64>,
    pub electron_gun_type: Option<String>,
    pub electron_wavelength_pm: Option<f64>,
    pub phenotype_observations: Vec<String>,
}

impl EmAnnotation {
    pub fn new(image_id: impl Into<String>, sample_id: impl Into<String>) -> Self {
        EmAnnotation {
            image_id: image_id.into(),
            sample_id: sample_id.into(),
            container_id: None,
            strain_id: None,
            staining_method: None,
            acceleration_voltage_kv: None,
            electron_gun_type: None,
            electron_wavelength_pm: None,
            phenotype_observations: Vec::new(),
        }
    }
}

/// An image with its resolved references and optional annotation.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageRecord {
    pub image: OmeImage,
    pub instrument: Option<OmeInstrument>,
    pub experimenter: Option<OmeExperimenter>,
    pub annotation: Option<EmAnnotation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JoinError {
    #[error("annotation for unknown image {0:?}")]
    OrphanAnnotation(String),
}

/// Pairs every image with its annotation, in document order.
pub fn join_annotations(doc: &OmeDocument, anns: Vec<EmAnnotation>) -> Result<Vec<ImageRecord>, JoinError> {
    let ids: HashSet<&str> = doc.images.iter().map(|i| i.id.as_str()).collect();
    let mut by_image: HashMap<String, EmAnnotation> = HashMap::with_capacity(anns.len());
    for ann in anns {
        if !ids.contains(ann.image_id.as_str()) {
            return Err(JoinError::OrphanAnnotation(ann.image_id));
        }
        by_image.insert(ann.image_id.clone(), ann);
    }
    Ok(doc
        .images
        .iter()
        .map(|img| ImageRecord {
            image: img.clone(),
            instrument: img.instrument_ref.as_deref().and_then(|r| doc.instrument(r)).cloned(),
            experimenter: img.experimenter_ref.as_deref().and_then(|r| doc.experimenter(r)).cloned(),
            annotation: by_image.remove(&img.id),
        })
        .collect())
}
