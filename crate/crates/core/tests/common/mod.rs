//! Shared oracles: random room/door buildings with a brute-force path
//! enumerator, golden data for the example building, and the contract
//! property harness.

#![allow(dead_code)]

pub mod contracts;
pub mod model;

use std::collections::BTreeSet;

use pathgate::building::AlignedBuilding;
use pathgate::rdf::{parse_turtle, Iri};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const NS: &str = "http://random.example/";

pub fn rid(local: &str) -> Iri {
    Iri::new(format!("{NS}{local}")).unwrap()
}

pub struct RandomBuilding {
    pub rooms: Vec<String>,
    /// door name and the rooms it touches
    pub doors: Vec<(String, Vec<String>)>,
    pub building: AlignedBuilding,
}

/// A connected building of `2..=max_rooms` rooms: a random spanning tree of
/// doors plus extra doors, some parallel and a few touching three rooms.
pub fn random_building(seed: u64, max_rooms: usize) -> RandomBuilding {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=max_rooms);
    let rooms: Vec<String> = (0..n).map(|i| format!("R{i}")).collect();
    let mut doors = Vec::new();
    for i in 1..n {
        let j = rng.random_range(0..i);
        doors.push((format!("D{}", doors.len()), vec![rooms[i].clone(), rooms[j].clone()]));
    }
    for _ in 0..rng.random_range(0..=n) {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a == b {
            continue;
        }
        let mut touched = vec![rooms[a].clone(), rooms[b].clone()];
        if n > 2 && rng.random_bool(0.15) {
            let c = rng.random_range(0..n);
            if c != a && c != b {
                touched.push(rooms[c].clone());
            }
        }
        doors.push((format!("D{}", doors.len()), touched));
    }

    let zones = ["Public", "Reception", "Operations", "Security", "High-Security"];
    let mut ttl = format!(
        "@prefix bot: <https://w3id.org/bot#> .\n@prefix brick: <https://brickschema.org/schema/1.0.3/Brick#> .\n@prefix r: <{NS}> .\n"
    );
    for room in &rooms {
        let zone = zones[rng.random_range(0..zones.len())];
        ttl.push_str(&format!("r:{room} a brick:Room, bot:Space .\nr:{zone}-Zone bot:hasSpace r:{room} .\n"));
    }
    for (door, touched) in &doors {
        ttl.push_str(&format!("r:{door} a bot:Element .\n"));
        for room in touched {
            // alternate the direction of the adjacency triple
            if rng.random_bool(0.5) {
                ttl.push_str(&format!("r:{room} bot:adjacentElement r:{door} .\n"));
            } else {
                ttl.push_str(&format!("r:{door} bot:adjacentElement r:{room} .\n"));
            }
        }
    }
    let building = AlignedBuilding::from_graph(parse_turtle(&ttl).unwrap()).unwrap();
    RandomBuilding { rooms, doors, building }
}

/// Every simple alternating path from `from` to `to`: all orderings of all
/// subsets of intermediate rooms, times every choice of connecting door.
pub fn brute_force_paths(rb: &RandomBuilding, from: &str, to: &str) -> BTreeSet<Vec<String>> {
    let others: Vec<&String> = rb.rooms.iter().filter(|r| *r != from && *r != to).collect();
    let mut out = BTreeSet::new();
    for mask in 0u32..(1 << others.len()) {
        let subset: Vec<&String> = (0..others.len()).filter(|i| mask & (1 << i) != 0).map(|i| others[i]).collect();
        for order in permutations(&subset) {
            let mut rooms: Vec<&str> = vec![from];
            rooms.extend(order.iter().map(|s| s.as_str()));
            rooms.push(to);
            let mut partial: Vec<Vec<String>> = vec![vec![from.to_owned()]];
            for pair in rooms.windows(2) {
                let joining: Vec<&String> = rb
                    .doors
                    .iter()
                    .filter(|(_, t)| t.iter().any(|r| r == pair[0]) && t.iter().any(|r| r == pair[1]))
                    .map(|(d, _)| d)
                    .collect();
                let mut next = Vec::new();
                for p in &partial {
                    for d in &joining {
                        let mut q = p.clone();
                        q.push((*d).clone());
                        q.push(pair[1].to_owned());
                        next.push(q);
                    }
                }
                partial = next;
            }
            out.extend(partial);
        }
    }
    out
}

fn permutations<'a>(items: &[&'a String]) -> Vec<Vec<&'a String>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}
