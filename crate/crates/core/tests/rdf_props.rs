use ome_rdf::rdf::{
    self, isomorphic, isomorphic_brute_force, BlankNode, Graph, Iri, RdfFormat, Triple,
};
use ome_rdf::synthetic::{random_graph, shuffle_blank_labels, GraphShape};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn graph_from(seed: u64) -> Graph {
    random_graph(&mut ChaCha8Rng::seed_from_u64(seed), GraphShape::default())
}

fn ground_count(g: &Graph) -> usize {
    g.iter().filter(|t| t.is_ground()).count()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn ntriples_round_trip(seed in any::<u64>()) {
        let g = graph_from(seed);
        let text = rdf::serialize(&g, RdfFormat::NTriples);
        let back = rdf::parse(&text, RdfFormat::NTriples).unwrap();
        prop_assert!(isomorphic_brute_force(&g, &back).unwrap());
        prop_assert_eq!(rdf::serialize(&back, RdfFormat::NTriples), text);
    }

    #[test]
    fn turtle_round_trip(seed in any::<u64>()) {
        let g = graph_from(seed);
        let text = rdf::serialize(&g, RdfFormat::Turtle);
        let back = rdf::parse(&text, RdfFormat::Turtle).unwrap();
        prop_assert!(isomorphic_brute_force(&g, &back).unwrap(), "{}", text);
        prop_assert_eq!(back.prefixes(), g.prefixes());
    }

    #[test]
    fn relabelled_copies_are_isomorphic(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, GraphShape::default());
        let h = shuffle_blank_labels(&mut rng, &g);
        prop_assert!(isomorphic(&g, &h).unwrap());
        prop_assert!(isomorphic_brute_force(&g, &h).unwrap());
    }

    #[test]
    fn refinement_agrees_with_brute_force(a in any::<u64>(), b in any::<u64>()) {
        let shape = GraphShape { max_triples: 6, max_blank_nodes: 3 };
        let g = random_graph(&mut ChaCha8Rng::seed_from_u64(a), shape);
        let h = random_graph(&mut ChaCha8Rng::seed_from_u64(b), shape);
        prop_assert_eq!(isomorphic(&g, &h).unwrap(), isomorphic_brute_force(&g, &h).unwrap());

        // dropping one triple always breaks isomorphism
        let first = g.iter().next().cloned();
        if let Some(t) = first {
            let mut smaller = g.clone();
            smaller.remove(&t);
            prop_assert!(!isomorphic(&g, &smaller).unwrap());
        }
    }

    #[test]
    fn insert_is_idempotent(seed in any::<u64>()) {
        let g = graph_from(seed);
        let mut h = g.clone();
        for t in g.iter() {
            prop_assert!(!h.insert(t.clone()));
        }
        prop_assert_eq!(h, g);
    }

    #[test]
    fn self_merge_keeps_ground_triples_once(seed in any::<u64>()) {
        let g = graph_from(seed);
        let merged = g.merge(&g, true).unwrap();
        prop_assert_eq!(merged.len(), 2 * g.len() - ground_count(&g));
        if g.blank_nodes().is_empty() {
            prop_assert_eq!(&merged, &g);
        } else {
            prop_assert!(g.merge(&g, false).is_err());
        }
    }

    #[test]
    fn merge_is_commutative_up_to_isomorphism(a in any::<u64>(), b in any::<u64>()) {
        let shape = GraphShape { max_triples: 10, max_blank_nodes: 3 };
        let g = random_graph(&mut ChaCha8Rng::seed_from_u64(a), shape);
        let h = random_graph(&mut ChaCha8Rng::seed_from_u64(b), shape);
        let gh = g.merge(&h, true).unwrap();
        let hg = h.merge(&g, true).unwrap();
        prop_assert!(isomorphic_brute_force(&gh, &hg).unwrap());
    }
}

#[test]
fn hand_written_turtle_matches_ntriples() {
    let ttl = r#"
@prefix ex: <http://example.org/> .
@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .
ex:img a ex:Image ;
    ex:label "liver"@en, "kanzo"@ja ;
    ex:size 42 ;
    ex:scale 0.5 ;
    ex:depicts _:s .
_:s ex:strain <http://metadb.riken.jp/metadb/db/rikenbrc_mouse/RBRC00001> .
"#;
    let nt = r#"<http://example.org/img> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://example.org/Image> .
<http://example.org/img> <http://example.org/label> "liver"@en .
<http://example.org/img> <http://example.org/label> "kanzo"@ja .
<http://example.org/img> <http://example.org/size> "42"^^<http://www.w3.org/2001/XMLSchema#integer> .
<http://example.org/img> <http://example.org/scale> "0.5"^^<http://www.w3.org/2001/XMLSchema#decimal> .
<http://example.org/img> <http://example.org/depicts> _:x .
_:x <http://example.org/strain> <http://metadb.riken.jp/metadb/db/rikenbrc_mouse/RBRC00001> .
"#;
    let a = rdf::parse(ttl, RdfFormat::Turtle).unwrap();
    let b = rdf::parse(nt, RdfFormat::NTriples).unwrap();
    assert_eq!(a.len(), 7);
    assert!(isomorphic_brute_force(&a, &b).unwrap());
}

#[test]
fn unsupported_turtle_is_rejected() {
    for text in [
        "@prefix ex: <http://example.org/> . ex:a ex:p ( ex:b ) .",
        "@prefix ex: <http://example.org/> . ex:a ex:p [ ex:q ex:b ] .",
        "ex:a ex:p ex:b .",
    ] {
        assert!(rdf::parse(text, RdfFormat::Turtle).is_err(), "{text}");
    }
}

#[test]
fn blank_ring_needs_search() {
    // two 3-cycles vs one 6-cycle: colour refinement cannot separate them
    let p = Iri::new("http://example.org/next").unwrap();
    let ring = |edges: &[(usize, usize)]| {
        let mut g = Graph::new();
        for (a, b) in edges {
            g.insert(Triple::new(
                BlankNode::new(format!("n{a}")).unwrap(),
                p.clone(),
                BlankNode::new(format!("n{b}")).unwrap(),
            ));
        }
        g
    };
    let two = ring(&[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]);
    let six = ring(&[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]);
    assert!(!isomorphic(&two, &six).unwrap());
    assert!(!isomorphic_brute_force(&two, &six).unwrap());
    assert!(isomorphic(&six, &six.map_blank_nodes(|b| BlankNode::new(format!("{}x", b.label())).unwrap())).unwrap());
}
