//! Golden pathways and a brute-force control-fanout count for the example
//! building.

use std::collections::{BTreeMap, BTreeSet};

use pathgate::building::{AlignedBuilding, ResourceKind};
use pathgate::planner::IndoorPath;
use pathgate::rdf::{Iri, Term};
use pathgate::vocab;

pub fn b1(local: &str) -> Iri {
    Iri::new(format!("{}{local}", vocab::BUILDING1)).unwrap()
}

pub fn iri(s: &str) -> Iri {
    Iri::new(s).unwrap()
}

pub fn rooms_to_path(b: &AlignedBuilding, rooms: &[&str]) -> IndoorPath {
    let mut seq = vec![b1(rooms[0])];
    for pair in rooms.windows(2) {
        let (from, to) = (b1(pair[0]), b1(pair[1]));
        let door = b
            .adjacent_resources(&from)
            .into_iter()
            .find(|d| b.kind_of(d) == Some(ResourceKind::Door) && b.adjacent_resources(d).contains(&to))
            .unwrap_or_else(|| panic!("no door between {from} and {to}"));
        seq.push(door);
        seq.push(to);
    }
    IndoorPath::new(b, seq).unwrap()
}

pub const PATHWAY_1: [&str; 11] = [
    "MainEntrance",
    "Room-1-1-102",
    "Room-1-1-101",
    "Room-1-1-100",
    "Room-1-1-112",
    "Room-1-1-114",
    "Room-1-1-178",
    "Room-1-1-184",
    "Room-1-1-152",
    "Room-1-1-150",
    "Room-1-1-144",
];
pub const PATHWAY_2: [&str; 5] = ["MainEntrance", "Room-1-1-1ST3", "Room-1-1-184", "Room-1-1-150", "Room-1-1-144"];

/// Counts distinct locations by joining every controls/hasPoint/feeds/hasPart
/// 4-tuple of triples, without using the graph indexes.
pub fn brute_force_fanout(b: &AlignedBuilding) -> BTreeMap<Iri, usize> {
    let by_pred = |p: &str| -> Vec<(Iri, Iri)> {
        b.graph()
            .triples()
            .iter()
            .filter(|t| t.predicate.as_str() == p)
            .filter_map(|t| match &t.object {
                Term::Iri(o) => Some((t.subject.clone(), o.clone())),
                Term::Literal(_) => None,
            })
            .collect()
    };
    let controls = by_pred(vocab::BF_CONTROLS);
    let has_point = by_pred(vocab::BF_HAS_POINT);
    let feeds = by_pred(vocab::BF_FEEDS);
    let has_part = by_pred(vocab::BF_HAS_PART);
    let mut reached: BTreeMap<Iri, BTreeSet<Iri>> = BTreeMap::new();
    for (point, cmd) in &controls {
        for (equip, cmd2) in &has_point {
            if cmd != cmd2 {
                continue;
            }
            for (equip2, zone) in &feeds {
                if equip != equip2 {
                    continue;
                }
                for (zone2, loc) in &has_part {
                    if zone == zone2 {
                        reached.entry(point.clone()).or_default().insert(loc.clone());
                    }
                }
            }
        }
    }
    reached.into_iter().map(|(p, s)| (p, s.len())).collect()
}
