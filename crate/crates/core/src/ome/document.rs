use std::collections::HashSet;

use chrono::{DateTime, SecondsFormat};
use roxmltree::{Document, Node};

use super::{InstrumentKind, OmeDocument, OmeError, OmeExperimenter, OmeImage, OmeInstrument, Pixels};

fn children<'a, 'i: 'a>(node: Node<'a, 'i>, name: &'a str) -> impl Iterator<Item = Node<'a, 'i>> + 'a {
    node.children().filter(move |n| n.is_element() && n.tag_name().name() == name)
}

fn child<'a, 'i: 'a>(node: Node<'a, 'i>, name: &'a str) -> Option<Node<'a, 'i>> {
    children(node, name).next()
}

fn non_empty(value: Option<&str>) -> Option<String> {
    value.map(str::trim).filter(|v| !v.is_empty()).map(str::to_string)
}

fn required_id(node: Node, path: &str) -> Result<String, OmeError> {
    non_empty(node.attribute("ID")).ok_or_else(|| OmeError::MissingRequiredField(format!("{path}/@ID")))
}

fn reference(node: Node, name: &str, path: &str) -> Result<Option<String>, OmeError> {
    match child(node, name) {
        None => Ok(None),
        Some(r) => required_id(r, &format!("{path}/{name}")).map(Some),
    }
}

fn size(pixels: Node, attr: &str, path: &str) -> Result<u32, OmeError> {
    let path = format!("{path}/@{attr}");
    let raw = pixels
        .attribute(attr)
        .ok_or_else(|| OmeError::MissingRequiredField(path.clone()))?;
    match raw.trim().parse::<u32>() {
        Ok(v) if v >= 1 => Ok(v),
        _ => Err(OmeError::InvalidDimension(path)),
    }
}

fn physical_size(pixels: Node, attr: &str, path: &str) -> Result<Option<f64>, OmeError> {
    let Some(raw) = pixels.attribute(attr) else {
        return Ok(None);
    };
    match raw.trim().parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(Some(v)),
        _ => Err(OmeError::InvalidDimension(format!("{path}/@{attr}"))),
    }
}

fn image(node: Node) -> Result<OmeImage, OmeError> {
    let id = required_id(node, "Image")?;
    let path = format!("Image[{id}]");
    let name = non_empty(node.attribute("Name"))
        .ok_or_else(|| OmeError::MissingRequiredField(format!("{path}/@Name")))?;

    let acquisition_date = match child(node, "AcquisitionDate") {
        None => None,
        Some(n) => {
            let text = n.text().unwrap_or("").trim();
            let parsed = DateTime::parse_from_rfc3339(text).map_err(|_| OmeError::InvalidTimestamp {
                path: format!("{path}/AcquisitionDate"),
                value: text.to_string(),
            })?;
            Some(parsed.to_rfc3339_opts(SecondsFormat::AutoSi, true))
        }
    };

    let pixels_path = format!("{path}/Pixels");
    let px = child(node, "Pixels").ok_or_else(|| OmeError::MissingRequiredField(pixels_path.clone()))?;
    let pixels = Pixels {
        size_x: size(px, "SizeX", &pixels_path)?,
        size_y: size(px, "SizeY", &pixels_path)?,
        size_z: size(px, "SizeZ", &pixels_path)?,
        size_c: size(px, "SizeC", &pixels_path)?,
        size_t: size(px, "SizeT", &pixels_path)?,
        physical_size_x: physical_size(px, "PhysicalSizeX", &pixels_path)?,
        physical_size_y: physical_size(px, "PhysicalSizeY", &pixels_path)?,
    };

    Ok(OmeImage {
        instrument_ref: reference(node, "InstrumentRef", &path)?,
        experimenter_ref: reference(node, "ExperimenterRef", &path)?,
        id,
        name,
        acquisition_date,
        pixels,
    })
}

fn instrument(node: Node) -> Result<OmeInstrument, OmeError> {
    let id = required_id(node, "Instrument")?;
    let microscope = child(node, "Microscope");
    let electron = microscope
        .and_then(|m| m.attribute("Type"))
        .is_some_and(|t| ["electron", "sem", "tem"].contains(&t.trim().to_ascii_lowercase().as_str()));
    Ok(OmeInstrument {
        id,
        kind: if electron {
            InstrumentKind::ElectronMicroscope
        } else {
            InstrumentKind::OpticalMicroscope
        },
        model: microscope.and_then(|m| non_empty(m.attribute("Model"))),
    })
}

fn experimenter(node: Node) -> Result<OmeExperimenter, OmeError> {
    let id = required_id(node, "Experimenter")?;
    let full: Vec<String> = ["FirstName", "LastName"]
        .iter()
        .filter_map(|a| non_empty(node.attribute(*a)))
        .collect();
    let name = if full.is_empty() {
        non_empty(node.attribute("UserName"))
            .ok_or_else(|| OmeError::MissingRequiredField(format!("Experimenter[{id}]/@UserName")))?
    } else {
        full.join(" ")
    };
    Ok(OmeExperimenter {
        email: non_empty(node.attribute("Email")),
        id,
        name,
    })
}

/// Parses the supported OME-XML subset. Element names are matched without
/// regard to namespace; unrecognised elements are ignored.
pub fn parse_ome_document(text: &str) -> Result<OmeDocument, OmeError> {
    let xml = Document::parse(text).map_err(|e| OmeError::MalformedXml(e.to_string()))?;
    let root = xml.root_element();
    if root.tag_name().name() != "OME" {
        return Err(OmeError::MalformedXml(format!(
            "root element is <{}>, expected <OME>",
            root.tag_name().name()
        )));
    }

    let doc = OmeDocument {
        instruments: children(root, "Instrument").map(instrument).collect::<Result<_, _>>()?,
        experimenters: children(root, "Experimenter").map(experimenter).collect::<Result<_, _>>()?,
        images: children(root, "Image").map(image).collect::<Result<_, _>>()?,
    };

    let mut seen = HashSet::new();
    let ids = doc
        .images
        .iter()
        .map(|i| &i.id)
        .chain(doc.instruments.iter().map(|i| &i.id))
        .chain(doc.experimenters.iter().map(|e| &e.id));
    for id in ids {
        if !seen.insert(id.as_str()) {
            return Err(OmeError::DuplicateId(id.clone()));
        }
    }
    for img in &doc.images {
        if let Some(r) = &img.instrument_ref {
            doc.instrument(r).ok_or_else(|| OmeError::DanglingReference(r.clone()))?;
        }
        if let Some(r) = &img.experimenter_ref {
            doc.experimenter(r).ok_or_else(|| OmeError::DanglingReference(r.clone()))?;
        }
    }
    Ok(doc)
}
