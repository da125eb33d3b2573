use std::collections::BTreeSet;

use pathgate::dataset;
use pathgate::rdf::{parse_turtle, Iri, PrefixTable, Term, Triple, TripleGraph};
use pathgate::vocab;
use proptest::prelude::*;

fn iri_strategy() -> impl Strategy<Value = Iri> {
    prop_oneof![
        "[A-Za-z][A-Za-z0-9_-]{0,8}".prop_map(|s| Iri::new(format!("{}{s}", vocab::BUILDING1)).unwrap()),
        "[A-Za-z][A-Za-z0-9_]{0,6}".prop_map(|s| Iri::new(format!("{}{s}", vocab::BRICK)).unwrap()),
        "[a-z]{1,5}/[a-z0-9]{1,5}".prop_map(|s| Iri::new(format!("http://other.example/{s}")).unwrap()),
        Just(Iri::new(vocab::RDF_TYPE).unwrap()),
    ]
}

fn term_strategy() -> impl Strategy<Value = Term> {
    prop_oneof![
        4 => iri_strategy().prop_map(Term::Iri),
        1 => "[a-zA-Z0-9 ]{0,10}".prop_map(|s| Term::Literal(format!("\"{s}\""))),
        1 => (0u32..10_000).prop_map(|n| Term::Literal(n.to_string())),
    ]
}

fn graph_strategy() -> impl Strategy<Value = TripleGraph> {
    prop::collection::vec((iri_strategy(), iri_strategy(), term_strategy()), 0..40).prop_map(|ts| {
        TripleGraph::from_triples(
            ts.into_iter().map(|(s, p, o)| Triple::new(s, p, o)),
            PrefixTable::building_defaults(),
        )
    })
}

/// Reflexive-transitive closure by repeated relaxation over the edge list.
fn naive_closure(edges: &[(Iri, Iri)], root: &Iri) -> BTreeSet<Iri> {
    let mut set = BTreeSet::from([root.clone()]);
    loop {
        let before = set.len();
        for (sub, sup) in edges {
            if set.contains(sup) {
                set.insert(sub.clone());
            }
        }
        if set.len() == before {
            return set;
        }
    }
}

fn subclass_edges(g: &TripleGraph) -> Vec<(Iri, Iri)> {
    g.triples()
        .iter()
        .filter(|t| t.predicate.as_str() == vocab::RDFS_SUBCLASS_OF)
        .filter_map(|t| t.object.as_iri().map(|o| (t.subject.clone(), o.clone())))
        .collect()
}

proptest! {
    #[test]
    fn pretty_printed_graph_reparses_identically(g in graph_strategy()) {
        let text = g.to_turtle();
        let back = parse_turtle(&text).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn fully_specified_match_has_at_most_one_result(g in graph_strategy(), s in iri_strategy(), p in iri_strategy(), o in term_strategy()) {
        prop_assert!(g.match_pattern(Some(&s), Some(&p), Some(&o)).len() <= 1);
        for t in g.triples() {
            prop_assert_eq!(g.match_pattern(Some(&t.subject), Some(&t.predicate), Some(&t.object)).len(), 1);
        }
    }

    #[test]
    fn closure_is_monotone_and_matches_naive(
        edges in prop::collection::vec((0usize..8, 0usize..8), 0..20),
        extra in prop::collection::vec((0usize..8, 0usize..8), 0..5),
        root in 0usize..8,
    ) {
        let class = |i: usize| Iri::new(format!("http://c/{i}")).unwrap();
        let sub = Iri::new(vocab::RDFS_SUBCLASS_OF).unwrap();
        let build = |es: &[(usize, usize)]| TripleGraph::from_triples(
            es.iter().map(|(a, b)| Triple::new(class(*a), sub.clone(), class(*b))),
            PrefixTable::new(),
        );
        let g = build(&edges);
        let closure = g.subclass_closure(&class(root));
        prop_assert_eq!(&closure, &naive_closure(&subclass_edges(&g), &class(root)));

        let all: Vec<_> = edges.iter().chain(extra.iter()).copied().collect();
        let bigger = build(&all).subclass_closure(&class(root));
        prop_assert!(closure.is_subset(&bigger));
    }
}

#[test]
fn point_closure_over_shipped_taxonomy() {
    let tax = parse_turtle(dataset::TAXONOMY).unwrap();
    let point = Iri::new(vocab::BRICK_POINT).unwrap();
    let expected = naive_closure(&subclass_edges(&tax), &point);
    assert_eq!(tax.subclass_closure(&point), expected);
    let names: BTreeSet<&str> = expected.iter().map(|i| i.local_name()).collect();
    for want in ["Point", "Sensor", "Temperature_Sensor", "Setpoint", "Temperature_Setpoint", "Command"] {
        assert!(names.contains(want), "{want}");
    }
    assert!(!names.contains("Room"));
}

#[test]
fn match_examples() {
    let g = parse_turtle(dataset::APPENDIX_A1).unwrap();
    assert_eq!(g.match_pattern(None, None, None).len(), g.len());
    let nothing = Iri::new(format!("{}Nonexistent", vocab::BUILDING1)).unwrap();
    assert!(g.match_pattern(Some(&nothing), None, None).is_empty());
    let vav = Iri::new(format!("{}VAV-1-12", vocab::BUILDING1)).unwrap();
    assert_eq!(g.objects(&vav, &Iri::new(vocab::BF_HAS_POINT).unwrap()).len(), 3);
    assert_eq!(g.objects(&vav, &Iri::new(vocab::BF_FEEDS).unwrap()).len(), 1);
}
