use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ome_rdf::synthetic::{write_corpus, CorpusSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SUBCOMMANDS: &[(&str, &[&str])] = &[
    ("schema-export", &["--format", "--namespace", "--output", "--config"]),
    ("translate-xsd", &["--format", "--namespace", "--warnings", "--output", "--config"]),
    (
        "convert",
        &["--sidecar", "--format", "--namespace", "--instance-base", "--registry", "--skip-errors", "--output", "--config"],
    ),
    (
        "validate",
        &["--format", "--input-format", "--ontology", "--namespace", "--instance-base", "--output", "--config"],
    ),
    (
        "ingest",
        &[
            "--output", "--format", "--shard-size", "--parallelism", "--skip-errors", "--namespace", "--instance-base",
            "--registry", "--config",
        ],
    ),
    ("link-check", &["--registry", "--offline", "--parallelism", "--timeout-secs", "--output", "--config"]),
    ("stats", &["--output", "--config"]),
];

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/data/fixtures").join(name)
}

fn ome_rdf(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ome-rdf"))
        .args(args)
        .current_dir(cwd)
        .env_remove("OME_RDF_CONFIG")
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn shards(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.starts_with("shard-"))
        .collect();
    names.sort();
    names
}

#[test]
fn help_lists_every_subcommand_and_flag() {
    let tmp = tempfile::tempdir().unwrap();
    let top = ome_rdf(&["--help"], tmp.path());
    assert_eq!(code(&top), 0);
    for (name, flags) in SUBCOMMANDS {
        assert!(stdout(&top).contains(name), "{name}");
        let help = ome_rdf(&[name, "--help"], tmp.path());
        assert_eq!(code(&help), 0);
        for flag in *flags {
            assert!(stdout(&help).contains(flag), "{name} {flag}");
        }
    }
    let version = ome_rdf(&["--version"], tmp.path());
    assert_eq!(code(&version), 0);
    assert!(stdout(&version).contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn unknown_flags_are_usage_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for (name, flags) in SUBCOMMANDS {
        for _ in 0..8 {
            let len = rng.random_range(1..12);
            let junk: String = (0..len).map(|_| rng.random_range(b'a'..=b'z') as char).collect();
            let flag = format!("--{junk}");
            if flags.contains(&flag.as_str()) {
                continue;
            }
            let out = ome_rdf(&[name, &flag, "x"], tmp.path());
            assert_eq!(code(&out), 2, "{name} {flag}");
        }
    }
    assert_eq!(code(&ome_rdf(&[], tmp.path())), 2);
    assert_eq!(code(&ome_rdf(&["frobnicate"], tmp.path())), 2);
    assert_eq!(code(&ome_rdf(&["convert"], tmp.path())), 2);
    assert_eq!(code(&ome_rdf(&["schema-export", "--format", "rdfxml"], tmp.path())), 2);
    // nothing was written
    assert_eq!(fs::read_dir(tmp.path()).unwrap().count(), 0);
}

#[test]
fn schema_export_declares_eighteen_classes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = ome_rdf(&["schema-export", "--format", "ntriples", "-o", "onto.nt"], tmp.path());
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(tmp.path().join("onto.nt")).unwrap();
    let decl = "<http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://www.w3.org/2002/07/owl#Class> .";
    assert_eq!(text.lines().filter(|l| l.ends_with(decl)).count(), 18);

    let ttl = ome_rdf(&["schema-export"], tmp.path());
    assert!(stdout(&ttl).starts_with("@prefix"));
    let moved = ome_rdf(&["schema-export", "--namespace", "http://example.org/o#"], tmp.path());
    assert!(stdout(&moved).contains("@prefix onto: <http://example.org/o#> ."));
    assert!(stdout(&moved).contains("onto:BioSample a owl:Class"));
    assert_eq!(code(&ome_rdf(&["schema-export", "--namespace", "not an iri"], tmp.path())), 2);
}

#[test]
fn convert_is_byte_stable() {
    let tmp = tempfile::tempdir().unwrap();
    let (ome, ann) = (fixture("liver.ome.xml"), fixture("liver.ann.tsv"));
    for name in ["a.nt", "b.nt"] {
        let out = ome_rdf(&["convert", p(&ome), "--sidecar", p(&ann), "-o", name], tmp.path());
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = fs::read(tmp.path().join("a.nt")).unwrap();
    assert_eq!(a, fs::read(tmp.path().join("b.nt")).unwrap());
    assert_eq!(a, fs::read(fixture("liver.expected.nt")).unwrap());

    let missing = ome_rdf(&["convert", "nope.ome.xml"], tmp.path());
    assert_eq!(code(&missing), 3);
    let broken = tmp.path().join("broken.ome.xml");
    fs::write(&broken, "<OME><Image").unwrap();
    assert_eq!(code(&ome_rdf(&["convert", p(&broken)], tmp.path())), 3);
}

#[test]
fn convert_rejects_or_skips_bad_strains() {
    let tmp = tempfile::tempdir().unwrap();
    let ann = tmp.path().join("bad.ann.tsv");
    fs::write(&ann, fs::read_to_string(fixture("liver.ann.tsv")).unwrap().replace("rikenbrc_mouse:", "nosuch:")).unwrap();
    let ome = fixture("liver.ome.xml");
    let strict = ome_rdf(&["convert", p(&ome), "--sidecar", p(&ann)], tmp.path());
    assert_eq!(code(&strict), 1);
    let lenient = ome_rdf(&["convert", p(&ome), "--sidecar", p(&ann), "--skip-errors", "--format", "nt"], tmp.path());
    assert_eq!(code(&lenient), 0);
    assert_eq!(stdout(&lenient), "");
    assert!(String::from_utf8_lossy(&lenient.stderr).contains("Image:0"));

    let registry = tmp.path().join("links.tsv");
    fs::write(&registry, "nosuch\thttp://strains.example/db\t[A-Z0-9]+\n").unwrap();
    let custom = ome_rdf(&["convert", p(&ome), "--sidecar", p(&ann), "--registry", p(&registry), "--format", "nt"], tmp.path());
    assert_eq!(code(&custom), 0);
    assert!(stdout(&custom).contains("<http://strains.example/db/RBRC00001>"));
}

#[test]
fn validate_exit_codes_and_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let clean = ome_rdf(&["validate", p(&fixture("liver.expected.nt"))], tmp.path());
    assert_eq!(code(&clean), 0);
    assert_eq!(stdout(&clean), "");

    let bad = ome_rdf(&["validate", p(&fixture("faults/value-out-of-range.nt"))], tmp.path());
    assert_eq!(code(&bad), 1);
    let rows: Vec<String> = stdout(&bad).lines().map(String::from).collect();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].starts_with("VALUE_OUT_OF_RANGE\t"));
    assert_eq!(rows[0].split('\t').count(), 3);

    let text = ome_rdf(&["validate", "--format", "text", "-o", "r.txt", p(&fixture("faults/value-out-of-range.nt"))], tmp.path());
    assert_eq!(code(&text), 1);
    assert!(fs::read_to_string(tmp.path().join("r.txt")).unwrap().contains("1 violations: failed"));

    let odd = tmp.path().join("graph.rdf");
    fs::copy(fixture("liver.expected.nt"), &odd).unwrap();
    assert_eq!(code(&ome_rdf(&["validate", p(&odd)], tmp.path())), 2);
    assert_eq!(code(&ome_rdf(&["validate", "--input-format", "ntriples", p(&odd)], tmp.path())), 0);
    fs::write(&odd, "this is not rdf").unwrap();
    assert_eq!(code(&ome_rdf(&["validate", "--input-format", "ntriples", p(&odd)], tmp.path())), 3);
}

#[test]
fn validate_against_an_exported_ontology() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(code(&ome_rdf(&["schema-export", "-o", "onto.ttl"], tmp.path())), 0);
    let out = ome_rdf(&["validate", "--ontology", "onto.ttl", p(&fixture("liver.expected.nt"))], tmp.path());
    assert_eq!(code(&out), 0);
    let bad = ome_rdf(&["validate", "--ontology", "onto.ttl", p(&fixture("faults/unknown-property.nt"))], tmp.path());
    assert_eq!(code(&bad), 1);
}

#[test]
fn translate_writes_warnings() {
    let tmp = tempfile::tempdir().unwrap();
    let out = ome_rdf(&["translate-xsd", "--warnings", "w.tsv", "-o", "t.nt"], tmp.path());
    assert_eq!(code(&out), 0);
    let warnings = fs::read_to_string(tmp.path().join("w.tsv")).unwrap();
    assert!(warnings.lines().count() > 0);
    assert!(warnings.lines().all(|l| l.split('\t').count() == 2));
    let graph = fs::read_to_string(tmp.path().join("t.nt")).unwrap();
    let decl = "<http://www.w3.org/2002/07/owl#Class> .";
    assert_eq!(graph.lines().filter(|l| l.ends_with(decl)).count(), 26);

    let bad = tmp.path().join("bad.xsd");
    fs::write(&bad, "<schema>").unwrap();
    assert_eq!(code(&ome_rdf(&["translate-xsd", p(&bad)], tmp.path())), 3);
}

#[test]
fn ingest_and_stats() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("in");
    let spec = CorpusSpec { images: 2000, images_per_file: 20, seed: 8, fault_every: None };
    write_corpus(&input, spec).unwrap();

    let out = ome_rdf(&["ingest", "in", "-o", "out", "--shard-size", "1000", "--parallelism", "3"], tmp.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("imagesConverted: 2000\n"));
    assert_eq!(shards(&tmp.path().join("out")), ["shard-00000.nt", "shard-00001.nt"]);

    let report = ome_rdf(&["stats", "out"], tmp.path());
    assert_eq!(code(&report), 0);
    assert_eq!(stdout(&report), stdout(&out));
    assert_eq!(code(&ome_rdf(&["ingest", "in"], tmp.path())), 2);
    assert_eq!(code(&ome_rdf(&["ingest", "missing", "-o", "o2"], tmp.path())), 3);
    assert_eq!(code(&ome_rdf(&["ingest", "in", "-o", "o3", "--shard-size", "0"], tmp.path())), 2);
}

#[test]
fn ingest_fault_handling() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = CorpusSpec { images: 60, images_per_file: 6, seed: 2, fault_every: Some(7) };
    let ledger = write_corpus(&tmp.path().join("in"), spec).unwrap();
    let strict = ome_rdf(&["ingest", "in", "-o", "out"], tmp.path());
    assert_eq!(code(&strict), 1);
    let lenient = ome_rdf(&["ingest", "in", "-o", "out", "--skip-errors"], tmp.path());
    assert_eq!(code(&lenient), 0);
    assert!(stdout(&lenient).contains(&format!("imagesSkipped: {}\n", ledger.faulty)));
    let errors = fs::read_to_string(tmp.path().join("out/errors.tsv")).unwrap();
    assert_eq!(errors.lines().count(), ledger.faulty);

    write_corpus(&tmp.path().join("clean"), CorpusSpec::default()).unwrap();
    fs::write(tmp.path().join("clean/zz.ome.xml"), "<OME>").unwrap();
    assert_eq!(code(&ome_rdf(&["ingest", "clean", "-o", "out2"], tmp.path())), 3);
}

#[test]
fn config_file_and_environment() {
    let tmp = tempfile::tempdir().unwrap();
    write_corpus(&tmp.path().join("in"), CorpusSpec::default()).unwrap();
    fs::write(tmp.path().join("small.conf"), "# tiny shards\nshard-size = 10\nformat = turtle\n").unwrap();

    let via_flag = ome_rdf(&["ingest", "in", "-o", "a", "--config", "small.conf"], tmp.path());
    assert_eq!(code(&via_flag), 0);
    assert_eq!(shards(&tmp.path().join("a")).len(), 10);
    assert!(shards(&tmp.path().join("a"))[0].ends_with(".ttl"));

    let flags_win = ome_rdf(&["ingest", "in", "-o", "b", "--config", "small.conf", "--shard-size", "50", "--format", "nt"], tmp.path());
    assert_eq!(code(&flags_win), 0);
    assert_eq!(shards(&tmp.path().join("b")), ["shard-00000.nt", "shard-00001.nt"]);

    let via_env = Command::new(env!("CARGO_BIN_EXE_ome-rdf"))
        .args(["ingest", "in", "-o", "c"])
        .current_dir(tmp.path())
        .env("OME_RDF_CONFIG", tmp.path().join("small.conf"))
        .output()
        .unwrap();
    assert_eq!(code(&via_env), 0);
    assert_eq!(shards(&tmp.path().join("c")).len(), 10);

    fs::write(tmp.path().join("typo.conf"), "shard-sise = 10\n").unwrap();
    assert_eq!(code(&ome_rdf(&["schema-export", "--config", "typo.conf"], tmp.path())), 2);
    assert_eq!(code(&ome_rdf(&["schema-export", "--config", "absent.conf"], tmp.path())), 3);
}

#[test]
fn link_check_offline() {
    let tmp = tempfile::tempdir().unwrap();
    let out = ome_rdf(&["link-check", "--offline", p(&fixture("liver.expected.nt"))], tmp.path());
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "http://metadb.riken.jp/metadb/db/rikenbrc_mouse/RBRC00001\tnotChecked\t\n");
    assert_eq!(code(&ome_rdf(&["link-check"], tmp.path())), 2);
}
