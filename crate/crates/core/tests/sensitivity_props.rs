use pathgate::building::AlignedBuilding;
use pathgate::dataset;
use pathgate::rdf::{Iri, Triple, TripleGraph};
use pathgate::sensitivity::{ahp_weights, room_cost, rooms_cost, PairwiseMatrix};
use pathgate::vocab;
use proptest::prelude::*;

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{i}")).collect()
}

fn weight_vector() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05f64..10.0, 2..=15).prop_map(|v| {
        let s: f64 = v.iter().sum();
        v.into_iter().map(|x| x / s).collect()
    })
}

fn saaty_answers(n: usize) -> impl Strategy<Value = Vec<f64>> {
    let scale = prop_oneof![(1u32..=9).prop_map(f64::from), (2u32..=9).prop_map(|k| 1.0 / f64::from(k))];
    prop::collection::vec(scale, n * (n - 1) / 2)
}

proptest! {
    #[test]
    fn consistent_matrix_recovers_weights(w in weight_vector()) {
        let m = PairwiseMatrix::consistent(labels(w.len()), &w).unwrap();
        let r = ahp_weights(&m).unwrap();
        for (got, want) in r.weights.iter().zip(&w) {
            prop_assert!((got - want).abs() < 1e-9);
        }
        prop_assert!(r.consistency_ratio.abs() < 1e-9);
    }

    #[test]
    fn diagonal_similarity_rescales_eigenvector(
        (answers, d) in (2usize..=8).prop_flat_map(|n| (saaty_answers(n), prop::collection::vec(0.2f64..5.0, n)))
    ) {
        let n = d.len();
        let m = PairwiseMatrix::from_answers(labels(n), &answers).unwrap();
        let scaled: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| d[i] * m.entries()[i][j] / d[j]).collect())
            .collect();
        let m2 = PairwiseMatrix::new(labels(n), scaled).unwrap();
        let r = ahp_weights(&m).unwrap();
        let r2 = ahp_weights(&m2).unwrap();
        let dv: Vec<f64> = r.weights.iter().zip(&d).map(|(w, di)| w * di).collect();
        let s: f64 = dv.iter().sum();
        for (got, want) in r2.weights.iter().zip(dv.iter().map(|x| x / s)) {
            prop_assert!((got - want).abs() < 1e-9);
        }
        prop_assert!((r.lambda_max - r2.lambda_max).abs() < 1e-7);
        prop_assert!(r.lambda_max >= n as f64 - 1e-9);
    }
}

fn with_extra(b: &AlignedBuilding, extra: Triple) -> AlignedBuilding {
    let g = TripleGraph::from_triples(
        b.graph().triples().iter().cloned().chain([extra]),
        b.graph().prefixes().clone(),
    );
    AlignedBuilding::from_graph(g).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adding_a_fed_room_never_lowers_costs(zone_pick in 0usize..6, room_pick in 0usize..64) {
        let b = dataset::example_building().unwrap();
        let w = dataset::table2_weights().unwrap();
        let hvac: Vec<Iri> = b
            .graph()
            .subjects(&Iri::new(vocab::RDF_TYPE).unwrap(), &Iri::new(vocab::BRICK_HVAC_ZONE).unwrap());
        let rooms = b.rooms();
        let zone = hvac[zone_pick % hvac.len()].clone();
        let room = rooms[room_pick % rooms.len()].iri.clone();
        let b2 = with_extra(&b, Triple::new(zone, Iri::new(vocab::BF_HAS_PART).unwrap(), room));
        for r in &rooms {
            let before = room_cost(&b, &w, &r.iri).unwrap().total();
            let after = room_cost(&b2, &w, &r.iri).unwrap().total();
            prop_assert!(after >= before - 1e-12);
        }
    }

    #[test]
    fn path_cost_is_additive(split in 0usize..64, seed in any::<u64>()) {
        let b = dataset::example_building().unwrap();
        let w = dataset::table2_weights().unwrap();
        let mut rooms: Vec<Iri> = b.rooms().into_iter().map(|r| r.iri).collect();
        let k = (seed as usize) % rooms.len();
        rooms.rotate_left(k);
        let cut = split % rooms.len();
        let (first, second) = rooms.split_at(cut);
        let whole = rooms_cost(&b, &w, &rooms).unwrap().total;
        let parts = rooms_cost(&b, &w, first).unwrap().total + rooms_cost(&b, &w, second).unwrap().total;
        prop_assert!((whole - parts).abs() < 1e-9);
        prop_assert_eq!(rooms_cost(&b, &w, &[]).unwrap().total, 0.0);
    }
}

#[test]
fn missing_weight_is_an_error() {
    let b = dataset::example_building().unwrap();
    let empty = pathgate::sensitivity::WeightTable::new();
    let room = Iri::new(format!("{}Room-1-1-150", vocab::BUILDING1)).unwrap();
    assert!(room_cost(&b, &empty, &room).is_err());
    assert!(!empty.unweighted_points(&b).is_empty());
    assert!(dataset::table2_weights().unwrap().unweighted_points(&b).is_empty());
}
