//! Tab-separated EM annotation sidecar.

use std::collections::HashSet;

use thiserror::Error;

use super::EmAnnotation;
use crate::ontology::MAX_ACCELERATION_VOLTAGE_KV;

pub const SIDECAR_COLUMNS: [&str; 9] = [
    "image_id",
    "sample_id",
    "container_id",
    "strain_id",
    "stain",
    "voltage_kv",
    "gun_type",
    "wavelength_pm",
    "phenotypes",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SidecarError {
    #[error("missing header line")]
    MissingHeader,
    #[error("unknown column {0:?}")]
    UnknownColumn(String),
    #[error("header must be exactly: {}", SIDECAR_COLUMNS.join(" "))]
    BadHeader,
    #[error("line {line}: expected {expected} fields, found {found}")]
    WrongFieldCount { line: usize, expected: usize, found: usize },
    #[error("line {row}, column {column}: {reason}")]
    BadValue { row: usize, column: String, reason: String },
    #[error("image {0:?} is annotated twice")]
    DuplicateImageId(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SidecarOptions {
    /// Also reject acceleration voltages above the ontology bound. When off,
    /// such values are left for the validator to report.
    pub strict: bool,
}

fn is_curie(s: &str) -> bool {
    let Some((prefix, local)) = s.split_once(':') else {
        return false;
    };
    let mut chars = prefix.chars();
    chars.next().is_some_and(|c| c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
        && !local.is_empty()
}

pub fn parse_sidecar(text: &str) -> Result<Vec<EmAnnotation>, SidecarError> {
    parse_sidecar_with(text, SidecarOptions::default())
}

pub fn parse_sidecar_with(text: &str, options: SidecarOptions) -> Result<Vec<EmAnnotation>, SidecarError> {
    let mut lines = text.split('\n').enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().filter(|(_, h)| !h.is_empty()).ok_or(SidecarError::MissingHeader)?;
    let columns: Vec<&str> = header.split('\t').collect();
    if let Some(unknown) = columns.iter().find(|c| !SIDECAR_COLUMNS.contains(c)) {
        return Err(SidecarError::UnknownColumn((*unknown).to_string()));
    }
    if columns != SIDECAR_COLUMNS {
        return Err(SidecarError::BadHeader);
    }

    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (line, row) in lines {
        if row.is_empty() {
            continue;
        }
        let cells: Vec<&str> = row.split('\t').collect();
        if cells.len() != SIDECAR_COLUMNS.len() {
            return Err(SidecarError::WrongFieldCount {
                line,
                expected: SIDECAR_COLUMNS.len(),
                found: cells.len(),
            });
        }
        let bad = |column: usize, reason: &str| SidecarError::BadValue {
            row: line,
            column: SIDECAR_COLUMNS[column].to_string(),
            reason: reason.to_string(),
        };
        let opt = |i: usize| Some(cells[i].to_string()).filter(|c| !c.is_empty());
        let positive = |i: usize| -> Result<Option<f64>, SidecarError> {
            match opt(i) {
                None => Ok(None),
                Some(raw) => match raw.parse::<f64>() {
                    Ok(v) if v.is_finite() && v > 0.0 => Ok(Some(v)),
                    _ => Err(bad(i, &format!("{raw:?} is not a positive decimal"))),
                },
            }
        };

        let image_id = opt(0).ok_or_else(|| bad(0, "required"))?;
        let sample_id = opt(1).ok_or_else(|| bad(1, "required"))?;
        let strain_id = opt(3);
        if strain_id.as_deref().is_some_and(|s| !is_curie(s)) {
            return Err(bad(3, "expected prefix:localId"));
        }
        let voltage = positive(5)?;
        if options.strict && voltage.is_some_and(|v| v > MAX_ACCELERATION_VOLTAGE_KV) {
            return Err(bad(5, &format!("exceeds {MAX_ACCELERATION_VOLTAGE_KV} kV")));
        }
        if !seen.insert(image_id.clone()) {
            return Err(SidecarError::DuplicateImageId(image_id));
        }
        out.push(EmAnnotation {
            image_id,
            sample_id,
            container_id: opt(2),
            strain_id,
            staining_method: opt(4),
            acceleration_voltage_kv: voltage,
            electron_gun_type: opt(6),
            electron_wavelength_pm: positive(7)?,
            phenotype_observations: cells[8]
                .split(';')
                .map(str::trim)
                .filter(|p| !p.is_empty())
                .map(str::to_string)
                .collect(),
        });
    }
    Ok(out)
}

/// Writes records in sidecar form. Cells must not contain tabs or line
/// breaks, and phenotype entries must not contain `;`.
pub fn serialize_sidecar(records: &[EmAnnotation]) -> String {
    let mut out = SIDECAR_COLUMNS.join("\t");
    out.push('\n');
    let text = |v: &Option<String>| v.clone().unwrap_or_default();
    let num = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in records {
        let cells = [
            r.image_id.clone(),
            r.sample_id.clone(),
            text(&r.container_id),
            text(&r.strain_id),
            text(&r.staining_method),
            num(r.acceleration_voltage_kv),
            text(&r.electron_gun_type),
            num(r.electron_wavelength_pm),
            r.phenotype_observations.join(";"),
        ];
        out.push_str(&cells.join("\t"));
        out.push('\n');
    }
    out
}
