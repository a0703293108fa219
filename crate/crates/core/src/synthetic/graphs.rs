//! Random graphs inside the supported syntax subset.

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::rdf::{vocab::xsd, BlankNode, Graph, Iri, Literal, Subject, Term, Triple};

const NAMESPACES: &[(&str, &str)] = &[
    ("ex", "http://example.org/"),
    ("onto", "https://w3id.org/omerdf/onto#"),
    ("brc", "http://metadb.riken.jp/metadb/db/rikenbrc_mouse/"),
];

const LOCALS: &[&str] = &[
    "a", "b", "Image", "sample-1", "S_2", "x.y", "caf\u{e9}", "with%20space", "trailing.", "9lives",
    "",
];

const LEXICALS: &[&str] = &[
    "",
    "plain",
    "quote \" inside",
    "back\\slash",
    "line\nbreak",
    "tab\tcell",
    "osmium tetroxide",
    "\u{3b1}\u{3b2}\u{3b3}",
    "emoji \u{1f52c}",
    "'single'",
    "\"\"\"triple\"\"\"",
];

const LANGS: &[&str] = &["en", "ja", "en-GB", "de-CH-1996"];

/// Parameters for [`random_graph`].
#[derive(Debug, Clone, Copy)]
pub struct GraphShape {
    pub max_triples: usize,
    pub max_blank_nodes: usize,
}

impl Default for GraphShape {
    fn default() -> Self {
        GraphShape {
            max_triples: 30,
            max_blank_nodes: 8,
        }
    }
}

fn random_iri(rng: &mut impl Rng) -> Iri {
    let (_, ns) = NAMESPACES.choose(rng).expect("non-empty");
    let local = LOCALS.choose(rng).expect("non-empty");
    Iri::new(format!("{ns}{local}")).expect("pool IRIs are valid")
}

fn random_literal(rng: &mut impl Rng) -> Literal {
    match rng.random_range(0..5) {
        0 => Literal::string(*LEXICALS.choose(rng).expect("non-empty")),
        1 => Literal::lang(
            *LEXICALS.choose(rng).expect("non-empty"),
            *LANGS.choose(rng).expect("non-empty"),
        )
        .expect("pool tags are valid"),
        2 => Literal::integer(rng.random_range(-1000..1000)),
        3 => Literal::typed(
            format!("{}.{}", rng.random_range(0..500), rng.random_range(0..100)),
            xsd::decimal(),
        )
        .expect("decimal lexical"),
        _ => Literal::typed(
            *LEXICALS.choose(rng).expect("non-empty"),
            Iri::new("http://example.org/customType").expect("valid"),
        )
        .expect("non-numeric custom datatype"),
    }
}

/// A random graph with at most `shape.max_triples` triples and at most
/// `shape.max_blank_nodes` distinct blank nodes. A random subset of the
/// namespace pool is bound as prefixes.
pub fn random_graph(rng: &mut impl Rng, shape: GraphShape) -> Graph {
    let mut g = Graph::new();
    for (prefix, ns) in NAMESPACES {
        if rng.random_bool(0.5) {
            g.bind_prefix(prefix, Iri::new(*ns).expect("valid"))
                .expect("distinct prefixes");
        }
    }
    let blank_pool: Vec<BlankNode> = (0..shape.max_blank_nodes)
        .map(|i| BlankNode::new(format!("b{i}")).expect("valid label"))
        .collect();
    let n = rng.random_range(0..=shape.max_triples);
    for _ in 0..n {
        let subject: Subject = if !blank_pool.is_empty() && rng.random_bool(0.4) {
            blank_pool.choose(rng).expect("non-empty").clone().into()
        } else {
            random_iri(rng).into()
        };
        let object: Term = match rng.random_range(0..3) {
            0 if !blank_pool.is_empty() => blank_pool.choose(rng).expect("non-empty").clone().into(),
            1 => random_literal(rng).into(),
            _ => random_iri(rng).into(),
        };
        g.insert(Triple::new(subject, random_iri(rng), object));
    }
    g
}

/// Renames every blank node of `g` through a random permutation onto fresh
/// labels, giving an isomorphic copy.
pub fn shuffle_blank_labels(rng: &mut impl Rng, g: &Graph) -> Graph {
    use rand::seq::SliceRandom;
    let labels: Vec<String> = g.blank_nodes().into_iter().map(|b| b.label().to_string()).collect();
    let mut targets: Vec<String> = (0..labels.len()).map(|i| format!("r{i}")).collect();
    targets.shuffle(rng);
    let map: std::collections::HashMap<&str, &str> = labels
        .iter()
        .map(String::as_str)
        .zip(targets.iter().map(String::as_str))
        .collect();
    g.map_blank_nodes(|b| BlankNode::new(map[b.label()]).expect("valid label"))
}
