//! Synthetic OME-XML + sidecar corpora with a ledger of what was generated.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ome::{serialize_sidecar, EmAnnotation};

/// Staining protocols used in SEM sample preparation.
pub const STAINING_METHODS: &[&str] = &[
    "osmium tetroxide",
    "uranyl acetate",
    "lead citrate",
    "osmium-thiocarbohydrazide-osmium",
    "tannic acid",
    "ruthenium red",
    "phosphotungstic acid",
    "potassium ferrocyanide-reduced osmium",
];

pub const GUN_TYPES: &[&str] = &["cold field emission", "Schottky field emission", "thermionic tungsten", "LaB6"];

pub const PHENOTYPES: &[&str] = &[
    "hepatocyte vacuolation",
    "lipid droplet accumulation",
    "mitochondrial swelling",
    "glycogen depletion",
    "bile canaliculus dilation",
    "sinusoidal fenestration loss",
    "pericellular fibrosis",
];

const EM_MODELS: &[&str] = &["JSM-7800F", "SU8220", "Sigma 300", "Helios G4", "Merlin Compact"];
const OPTICAL_MODELS: &[&str] = &["Axio Imager 2", "BX63", "Eclipse Ti2"];
const NAMES: &[(&str, &str)] = &[
    ("Aiko", "Tanaka"),
    ("Kenji", "Sato"),
    ("Mei", "Suzuki"),
    ("Hiro", "Watanabe"),
    ("Yui", "Ito"),
];

/// Shape of a generated corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorpusSpec {
    pub images: usize,
    pub images_per_file: usize,
    pub seed: u64,
    /// Every n-th image gets a strain CURIE with an unregistered prefix.
    pub fault_every: Option<usize>,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            images: 100,
            images_per_file: 10,
            seed: 0,
            fault_every: None,
        }
    }
}

/// Counts recorded while generating.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusLedger {
    pub files: usize,
    pub images: usize,
    pub annotated: usize,
    pub electron_images: usize,
    /// Annotations carrying a resolvable strain link.
    pub strain_links: usize,
    pub faulty: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusFile {
    /// Relative path without the `.ome.xml` / `.ann.tsv` suffix.
    pub stem: PathBuf,
    pub ome_xml: String,
    pub sidecar: String,
}

/// Relativistic electron wavelength in picometres for an accelerating
/// voltage in kilovolts.
pub fn electron_wavelength_pm(kv: f64) -> f64 {
    const H: f64 = 6.626_070_15e-34;
    const M: f64 = 9.109_383_701_5e-31;
    const E: f64 = 1.602_176_634e-19;
    const C: f64 = 299_792_458.0;
    let v = kv * 1e3;
    let p = (2.0 * M * E * v * (1.0 + E * v / (2.0 * M * C * C))).sqrt();
    H / p * 1e12
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}

/// Sample properties are a function of the sample index, so a sample
/// shared by several images always has the same container and strain.
fn sample_annotation(image_id: &str, sample: usize) -> EmAnnotation {
    let mut ann = EmAnnotation::new(image_id, format!("S{sample:05}"));
    ann.container_id = Some(format!("C{:04}", sample / 8));
    ann.strain_id = Some(format!("rikenbrc_mouse:RBRC{:05}", sample % 700 + 1));
    ann
}

struct Generator {
    rng: ChaCha8Rng,
    spec: CorpusSpec,
    ledger: CorpusLedger,
    next_image: usize,
}

impl Generator {
    fn file(&mut self, index: usize, count: usize) -> CorpusFile {
        let rng = &mut self.rng;
        let mut xml = String::from(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<OME xmlns=\"http://www.openmicroscopy.org/Schemas/OME/2015-01\">\n",
        );

        let experimenters: Vec<String> = (0..rng.random_range(1..=2))
            .map(|e| {
                let id = format!("Experimenter:{index}-{e}");
                let (first, last) = NAMES.choose(rng).expect("non-empty");
                let _ = writeln!(
                    xml,
                    "  <Experimenter ID=\"{id}\" FirstName=\"{first}\" LastName=\"{last}\" Email=\"{}.{}@example.org\"/>",
                    first.to_lowercase(),
                    last.to_lowercase()
                );
                id
            })
            .collect();

        let em_id = format!("Instrument:{index}-0");
        let _ = writeln!(
            xml,
            "  <Instrument ID=\"{em_id}\"><Microscope Type=\"SEM\" Model=\"{}\"/></Instrument>",
            escape(EM_MODELS.choose(rng).expect("non-empty"))
        );
        let optical_id = rng.random_bool(0.5).then(|| {
            let id = format!("Instrument:{index}-1");
            let _ = writeln!(
                xml,
                "  <Instrument ID=\"{id}\"><Microscope Type=\"Upright\" Model=\"{}\"/></Instrument>",
                escape(OPTICAL_MODELS.choose(rng).expect("non-empty"))
            );
            id
        });

        let sample_pool = (self.spec.images / 3).max(1);
        let mut annotations = Vec::new();
        for _ in 0..count {
            let n = self.next_image;
            self.next_image += 1;
            let id = format!("Image:{n:06}");
            let electron = optical_id.is_none() || rng.random_bool(0.85);
            let instrument = if electron { &em_id } else { optical_id.as_ref().expect("optical present") };
            let experimenter = experimenters.choose(rng).expect("non-empty");
            let date = format!(
                "2015-{:02}-{:02}T{:02}:{:02}:{:02}Z",
                rng.random_range(1..=12),
                rng.random_range(1..=28),
                rng.random_range(0..24),
                rng.random_range(0..60),
                rng.random_range(0..60)
            );
            let side = [512, 1024, 2048, 4096];
            let _ = write!(
                xml,
                "  <Image ID=\"{id}\" Name=\"liver_{n:06}.tif\">\n    <AcquisitionDate>{date}</AcquisitionDate>\n    <ExperimenterRef ID=\"{experimenter}\"/>\n    <InstrumentRef ID=\"{instrument}\"/>\n    <Pixels ID=\"Pixels:{n}\" DimensionOrder=\"XYZCT\" Type=\"uint16\" SizeX=\"{}\" SizeY=\"{}\" SizeZ=\"{}\" SizeC=\"1\" SizeT=\"1\" PhysicalSizeX=\"{}\" PhysicalSizeY=\"{}\"/>\n  </Image>\n",
                side.choose(rng).expect("non-empty"),
                side.choose(rng).expect("non-empty"),
                rng.random_range(1..=64),
                f64::from(rng.random_range(1..=5000u32)) / 1000.0,
                f64::from(rng.random_range(1..=5000u32)) / 1000.0,
            );

            self.ledger.images += 1;
            if electron {
                self.ledger.electron_images += 1;
            }
            if !electron && !rng.random_bool(0.5) {
                continue;
            }
            let mut ann = sample_annotation(&id, rng.random_range(0..sample_pool));
            ann.staining_method = Some(STAINING_METHODS.choose(rng).expect("non-empty").to_string());
            if electron {
                let kv = f64::from(rng.random_range(5..=300u32)) / 10.0;
                ann.acceleration_voltage_kv = Some(kv);
                ann.electron_gun_type = Some(GUN_TYPES.choose(rng).expect("non-empty").to_string());
                ann.electron_wavelength_pm = Some((electron_wavelength_pm(kv) * 1000.0).round() / 1000.0);
            }
            let observed = rng.random_range(0..=2);
            ann.phenotype_observations = PHENOTYPES
                .choose_multiple(rng, observed)
                .map(|p| p.to_string())
                .collect();
            if self.spec.fault_every.is_some_and(|k| k > 0 && (n + 1).is_multiple_of(k)) {
                ann.strain_id = Some(format!("nosuch:X{n}"));
                self.ledger.faulty += 1;
            } else {
                self.ledger.strain_links += 1;
            }
            self.ledger.annotated += 1;
            annotations.push(ann);
        }
        xml.push_str("</OME>\n");
        self.ledger.files += 1;

        CorpusFile {
            stem: PathBuf::from(format!("batch-{:03}", index / 100)).join(format!("rec-{index:05}")),
            ome_xml: xml,
            sidecar: serialize_sidecar(&annotations),
        }
    }
}

/// Generates the corpus in memory.
pub fn generate_corpus(spec: CorpusSpec) -> (Vec<CorpusFile>, CorpusLedger) {
    let per_file = spec.images_per_file.max(1);
    let mut g = Generator {
        rng: ChaCha8Rng::seed_from_u64(spec.seed),
        spec,
        ledger: CorpusLedger::default(),
        next_image: 0,
    };
    let mut files = Vec::new();
    let mut remaining = spec.images;
    while remaining > 0 {
        let count = remaining.min(per_file);
        files.push(g.file(files.len(), count));
        remaining -= count;
    }
    (files, g.ledger)
}

/// Generates the corpus and writes `<stem>.ome.xml` and `<stem>.ann.tsv`
/// files under `dir`.
pub fn write_corpus(dir: &Path, spec: CorpusSpec) -> io::Result<CorpusLedger> {
    let (files, ledger) = generate_corpus(spec);
    for f in &files {
        let base = dir.join(&f.stem);
        if let Some(parent) = base.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(base.with_extension("ome.xml"), &f.ome_xml)?;
        std::fs::write(base.with_extension("ann.tsv"), &f.sidecar)?;
    }
    Ok(ledger)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wavelength_matches_textbook_values() {
        // 100 kV -> 3.701 pm, 200 kV -> 2.508 pm
        assert!((electron_wavelength_pm(100.0) - 3.701).abs() < 0.001);
        assert!((electron_wavelength_pm(200.0) - 2.508).abs() < 0.001);
    }

    #[test]
    fn ledger_counts_and_determinism() {
        let spec = CorpusSpec {
            images: 25,
            images_per_file: 10,
            seed: 7,
            fault_every: Some(5),
        };
        let (files, ledger) = generate_corpus(spec);
        assert_eq!(files.len(), 3);
        assert_eq!(ledger.files, 3);
        assert_eq!(ledger.images, 25);
        assert_eq!(ledger.annotated, ledger.strain_links + ledger.faulty);
        assert_eq!(generate_corpus(spec), (files, ledger));
    }
}
