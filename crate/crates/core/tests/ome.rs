use std::path::PathBuf;

use ome_rdf::ome::{
    join_annotations, parse_ome_document, parse_sidecar, parse_sidecar_with, serialize_sidecar, EmAnnotation,
    InstrumentKind, JoinError, OmeError, Pixels, SidecarError, SidecarOptions, SIDECAR_COLUMNS,
};
use ome_rdf::synthetic::{generate_corpus, CorpusSpec, PHENOTYPES, STAINING_METHODS};
use proptest::prelude::*;

fn fixture(name: &str) -> String {
    std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/fixtures").join(name)).unwrap()
}

#[test]
fn minimal_document() {
    let doc = parse_ome_document(&fixture("minimal.ome.xml")).unwrap();
    assert_eq!(doc.images.len(), 1);
    let img = &doc.images[0];
    assert_eq!(img.id, "Image:1");
    assert_eq!(img.name, "plain.tif");
    assert_eq!(img.acquisition_date.as_deref(), Some("2015-01-01T00:00:00Z"));
    assert_eq!(
        img.pixels,
        Pixels {
            size_x: 512,
            size_y: 512,
            size_z: 1,
            size_c: 1,
            size_t: 1,
            physical_size_x: Some(0.25),
            physical_size_y: Some(0.25),
        }
    );
    assert_eq!(img.instrument_ref.as_deref(), Some("Instrument:1"));
    assert_eq!(doc.instrument("Instrument:1").unwrap().kind, InstrumentKind::OpticalMicroscope);
    assert_eq!(doc.experimenter("Experimenter:1").unwrap().name, "kenji");
}

#[test]
fn sem_document_is_electron() {
    let doc = parse_ome_document(&fixture("liver.ome.xml")).unwrap();
    let inst = doc.instrument("Instrument:0").unwrap();
    assert_eq!(inst.kind, InstrumentKind::ElectronMicroscope);
    assert_eq!(inst.model.as_deref(), Some("JSM-7800F"));
    assert_eq!(doc.images[0].acquisition_date.as_deref(), Some("2015-06-12T09:30:00+09:00"));
    assert_eq!(doc.experimenter("Experimenter:0").unwrap().name, "Aiko Tanaka");
}

#[test]
fn invalid_documents() {
    let minimal = fixture("minimal.ome.xml");
    let zero = minimal.replace("SizeZ=\"1\"", "SizeZ=\"0\"");
    assert!(matches!(parse_ome_document(&zero), Err(OmeError::InvalidDimension(_))));

    let dangling = minimal.replace("<InstrumentRef ID=\"Instrument:1\"/>", "<InstrumentRef ID=\"I9\"/>");
    assert_eq!(parse_ome_document(&dangling), Err(OmeError::DanglingReference("I9".into())));

    let naive = minimal.replace("00:00:00Z", "00:00:00");
    assert!(matches!(parse_ome_document(&naive), Err(OmeError::InvalidTimestamp { .. })));

    let unnamed = minimal.replace(" Name=\"plain.tif\"", "");
    assert!(matches!(parse_ome_document(&unnamed), Err(OmeError::MissingRequiredField(_))));

    let twice = minimal.replace("<Experimenter ID=\"Experimenter:1\" UserName=\"kenji\"/>",
        "<Experimenter ID=\"Experimenter:1\" UserName=\"kenji\"/><Experimenter ID=\"Experimenter:1\" UserName=\"mei\"/>");
    assert_eq!(parse_ome_document(&twice), Err(OmeError::DuplicateId("Experimenter:1".into())));

    assert!(matches!(parse_ome_document("<OME><Image"), Err(OmeError::MalformedXml(_))));
    assert!(matches!(parse_ome_document("<NotOME/>"), Err(OmeError::MalformedXml(_))));
}

#[test]
fn sem_sidecar_row() {
    let anns = parse_sidecar(&fixture("liver.ann.tsv")).unwrap();
    assert_eq!(anns.len(), 1);
    let a = &anns[0];
    assert_eq!(a.image_id, "Image:0");
    assert_eq!(a.sample_id, "S1");
    assert_eq!(a.container_id.as_deref(), Some("C1"));
    assert_eq!(a.strain_id.as_deref(), Some("rikenbrc_mouse:RBRC00001"));
    assert_eq!(a.staining_method.as_deref(), Some("osmium"));
    assert_eq!(a.acceleration_voltage_kv, Some(5.0));
    assert_eq!(a.electron_gun_type.as_deref(), Some("Schottky field emission"));
    assert_eq!(a.electron_wavelength_pm, Some(17.3));
    assert_eq!(a.phenotype_observations, ["hepatocyte vacuolation", "lipid droplet accumulation"]);
}

#[test]
fn sidecar_edge_cases() {
    let header = SIDECAR_COLUMNS.join("\t");
    assert_eq!(parse_sidecar(&format!("{header}\n")).unwrap(), vec![]);
    let row = "Image:1\tS1\t\t\t\t\t\t\t";
    let twice = format!("{header}\n{row}\n{row}\n");
    assert_eq!(parse_sidecar(&twice), Err(SidecarError::DuplicateImageId("Image:1".into())));
    let extra = format!("{header}\tnotes\n");
    assert_eq!(parse_sidecar(&extra), Err(SidecarError::UnknownColumn("notes".into())));
    let hot = format!("{header}\nImage:1\tS1\t\t\t\t1500\t\t\t\n");
    assert_eq!(parse_sidecar(&hot).unwrap()[0].acceleration_voltage_kv, Some(1500.0));
    assert!(matches!(
        parse_sidecar_with(&hot, SidecarOptions { strict: true }),
        Err(SidecarError::BadValue { .. })
    ));
}

#[test]
fn join_matches_image_count() {
    let doc = parse_ome_document(&fixture("liver.ome.xml")).unwrap();
    assert_eq!(join_annotations(&doc, vec![]).unwrap().len(), 1);
    let orphan = join_annotations(&doc, vec![EmAnnotation::new("Image:404", "S1")]);
    assert_eq!(orphan, Err(JoinError::OrphanAnnotation("Image:404".into())));
    assert!(join_annotations(&Default::default(), vec![]).unwrap().is_empty());
}

#[test]
fn generated_corpus_parses_and_joins() {
    let (files, ledger) = generate_corpus(CorpusSpec { images: 120, images_per_file: 9, seed: 21, fault_every: None });
    let mut images = 0;
    let mut annotated = 0;
    for f in &files {
        let doc = parse_ome_document(&f.ome_xml).unwrap();
        let anns = parse_sidecar(&f.sidecar).unwrap();
        assert_eq!(serialize_sidecar(&anns), f.sidecar);
        annotated += anns.len();
        let joined = join_annotations(&doc, anns).unwrap();
        assert_eq!(joined.len(), doc.images.len());
        images += joined.len();
    }
    assert_eq!(images, ledger.images);
    assert_eq!(annotated, ledger.annotated);
}

fn cell() -> impl Strategy<Value = Option<String>> {
    proptest::option::of("[A-Za-z0-9][A-Za-z0-9 ._-]{0,11}[A-Za-z0-9]")
}

fn annotation() -> impl Strategy<Value = EmAnnotation> {
    let positive = proptest::option::of(1e-3f64..1e4);
    (
        "[A-Za-z0-9:._-]{1,12}",
        "S[0-9]{1,5}",
        cell(),
        proptest::option::of("[a-z][a-z0-9_]{0,11}:[A-Za-z0-9._-]{1,10}"),
        proptest::option::of(proptest::sample::select(STAINING_METHODS).prop_map(String::from)),
        (positive.clone(), cell(), positive),
        proptest::sample::subsequence(PHENOTYPES, 0..=3),
    )
        .prop_map(|(image_id, sample_id, container_id, strain_id, staining_method, (kv, gun, pm), ph)| EmAnnotation {
            image_id,
            sample_id,
            container_id,
            strain_id,
            staining_method,
            acceleration_voltage_kv: kv,
            electron_gun_type: gun,
            electron_wavelength_pm: pm,
            phenotype_observations: ph.into_iter().map(String::from).collect(),
        })
}

proptest! {
    #[test]
    fn sidecar_round_trip(records in proptest::collection::vec(annotation(), 0..20)) {
        let mut seen = std::collections::HashSet::new();
        let records: Vec<EmAnnotation> = records.into_iter().filter(|r| seen.insert(r.image_id.clone())).collect();
        prop_assert_eq!(parse_sidecar(&serialize_sidecar(&records)).unwrap(), records);
    }

    #[test]
    fn document_parser_is_total(cut in 0usize..2000, noise in proptest::collection::vec((0usize..2000, any::<char>()), 0..6)) {
        for name in ["minimal.ome.xml", "liver.ome.xml"] {
            let text = fixture(name);
            let mut chars: Vec<char> = text.chars().collect();
            for (at, c) in &noise {
                if !chars.is_empty() {
                    let i = at % chars.len();
                    chars[i] = *c;
                }
            }
            chars.truncate(cut.max(1).min(chars.len()));
            let mangled: String = chars.into_iter().collect();
            let _ = parse_ome_document(&mangled);
        }
    }

    #[test]
    fn sidecar_parser_is_total(text in "\\PC{0,200}") {
        let header = SIDECAR_COLUMNS.join("\t");
        let _ = parse_sidecar(&text);
        let _ = parse_sidecar(&format!("{header}\n{text}"));
    }
}
