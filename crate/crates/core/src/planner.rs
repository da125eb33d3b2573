//! Enumeration and ranking of simple indoor paths.
//!
//! A path alternates rooms and doors and never revisits a room. Children are
//! explored in ascending IRI order so the enumeration is reproducible.

use std::collections::BTreeSet;

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::building::{AlignedBuilding, ResourceKind};
use crate::rdf::Iri;
use crate::sensitivity::{path_cost, PathCost, SensitivityError, WeightTable};

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("{0} is not a room")]
    NotARoom(Iri),
    #[error("origin and destination are both {0}")]
    SameRoom(Iri),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error(transparent)]
    Sensitivity(#[from] SensitivityError),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct IndoorPath {
    sequence: Vec<Iri>,
}

impl IndoorPath {
    /// Checks alternation, adjacency and room uniqueness against `b`.
    pub fn new(b: &AlignedBuilding, sequence: Vec<Iri>) -> Result<Self, PlanError> {
        if sequence.len() % 2 == 0 {
            return Err(PlanError::InvalidPath("a path has an odd number of elements".into()));
        }
        let mut seen = BTreeSet::new();
        for (i, iri) in sequence.iter().enumerate() {
            let want = if i % 2 == 0 { ResourceKind::Room } else { ResourceKind::Door };
            if b.kind_of(iri) != Some(want) {
                return Err(PlanError::InvalidPath(format!("element {i} ({iri}) is not a {want:?}")));
            }
            if i % 2 == 0 && !seen.insert(iri) {
                return Err(PlanError::InvalidPath(format!("room {iri} repeats")));
            }
            if i > 0 && !b.adjacent_resources(&sequence[i - 1]).contains(iri) {
                return Err(PlanError::InvalidPath(format!("{} and {iri} are not adjacent", sequence[i - 1])));
            }
        }
        Ok(Self { sequence })
    }

    pub(crate) fn from_sequence_unchecked(sequence: Vec<Iri>) -> Self {
        Self { sequence }
    }

    pub fn sequence(&self) -> &[Iri] {
        &self.sequence
    }

    pub fn origin(&self) -> &Iri {
        &self.sequence[0]
    }

    pub fn destination(&self) -> &Iri {
        self.sequence.last().expect("paths are non-empty")
    }

    pub fn rooms(&self) -> impl Iterator<Item = &Iri> {
        self.sequence.iter().step_by(2)
    }

    pub fn doors(&self) -> impl Iterator<Item = &Iri> {
        self.sequence.iter().skip(1).step_by(2)
    }

    pub fn room_count(&self) -> usize {
        self.sequence.len() / 2 + 1
    }

    pub fn reversed(&self) -> Self {
        let mut sequence = self.sequence.clone();
        sequence.reverse();
        Self { sequence }
    }

    /// Stable identifier: the first 16 hex digits of SHA-256 over the
    /// length-prefixed IRIs.
    pub fn id(&self) -> String {
        let mut h = Sha256::new();
        for iri in &self.sequence {
            h.update((iri.as_str().len() as u64).to_be_bytes());
            h.update(iri.as_str().as_bytes());
        }
        hex::encode(&h.finalize()[..8])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PlanOptions {
    pub max_paths: usize,
    /// Maximum number of rooms in a path, origin and destination included.
    pub max_depth: usize,
}

impl Default for PlanOptions {
    fn default() -> Self {
        Self {
            max_paths: 64,
            max_depth: 32,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathSet {
    pub paths: Vec<IndoorPath>,
    /// More paths exist than `max_paths`.
    pub truncated_by_count: bool,
    /// Some branch was cut at `max_depth` rooms.
    pub truncated_by_depth: bool,
}

impl PathSet {
    pub fn is_complete(&self) -> bool {
        !self.truncated_by_count && !self.truncated_by_depth
    }
}

struct Search<'a> {
    b: &'a AlignedBuilding,
    destination: &'a Iri,
    opts: PlanOptions,
    stack: Vec<Iri>,
    visited: BTreeSet<Iri>,
    out: PathSet,
}

impl Search<'_> {
    fn neighbours(&self, iri: &Iri, kind: ResourceKind) -> Vec<Iri> {
        self.b
            .adjacent_resources(iri)
            .into_iter()
            .filter(|r| self.b.kind_of(r) == Some(kind))
            .collect()
    }

    /// Returns false once the search should stop.
    fn visit(&mut self, room: &Iri) -> bool {
        if room == self.destination {
            if self.out.paths.len() == self.opts.max_paths {
                self.out.truncated_by_count = true;
                return false;
            }
            self.out.paths.push(IndoorPath::from_sequence_unchecked(self.stack.clone()));
            return true;
        }
        let rooms_so_far = self.stack.len() / 2 + 1;
        for door in self.neighbours(room, ResourceKind::Door) {
            for next in self.neighbours(&door, ResourceKind::Room) {
                if self.visited.contains(&next) {
                    continue;
                }
                if rooms_so_far == self.opts.max_depth {
                    self.out.truncated_by_depth = true;
                    continue;
                }
                self.stack.push(door.clone());
                self.stack.push(next.clone());
                self.visited.insert(next.clone());
                let go_on = self.visit(&next);
                self.visited.remove(&next);
                self.stack.truncate(self.stack.len() - 2);
                if !go_on {
                    return false;
                }
            }
        }
        true
    }
}

/// All simple alternating room/door paths from `origin` to `destination`, in
/// depth-first order, bounded by `opts`.
pub fn enumerate_paths(
    b: &AlignedBuilding,
    origin: &Iri,
    destination: &Iri,
    opts: PlanOptions,
) -> Result<PathSet, PlanError> {
    for room in [origin, destination] {
        if b.kind_of(room) != Some(ResourceKind::Room) {
            return Err(PlanError::NotARoom(room.clone()));
        }
    }
    if origin == destination {
        return Err(PlanError::SameRoom(origin.clone()));
    }
    let mut search = Search {
        b,
        destination,
        opts,
        stack: vec![origin.clone()],
        visited: BTreeSet::from([origin.clone()]),
        out: PathSet {
            paths: Vec::new(),
            truncated_by_count: false,
            truncated_by_depth: false,
        },
    };
    search.visit(origin);
    Ok(search.out)
}

/// Pairs of consecutive rooms where the zone level rises by more than one.
pub fn zone_order_violations(b: &AlignedBuilding, path: &IndoorPath) -> Vec<(Iri, Iri)> {
    let rooms: Vec<&Iri> = path.rooms().collect();
    rooms
        .windows(2)
        .filter_map(|w| {
            let from = b.security_zone_of(w[0]).ok()?;
            let to = b.security_zone_of(w[1]).ok()?;
            (to.ordinal() > from.ordinal() + 1).then(|| (w[0].clone(), w[1].clone()))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedPath {
    pub id: String,
    pub path: IndoorPath,
    pub cost: PathCost,
    pub zone_order_warning: bool,
    pub zone_order_violations: Vec<(Iri, Iri)>,
}

/// Sorts by total cost, then fewer rooms, then the IRI sequence.
pub fn rank_paths(paths: &[IndoorPath], w: &WeightTable, b: &AlignedBuilding) -> Result<Vec<RankedPath>, PlanError> {
    let mut ranked = paths
        .iter()
        .map(|p| {
            let violations = zone_order_violations(b, p);
            Ok(RankedPath {
                id: p.id(),
                path: p.clone(),
                cost: path_cost(b, w, p)?,
                zone_order_warning: !violations.is_empty(),
                zone_order_violations: violations,
            })
        })
        .collect::<Result<Vec<_>, PlanError>>()?;
    ranked.sort_by(|a, b| {
        a.cost
            .total
            .total_cmp(&b.cost.total)
            .then(a.path.room_count().cmp(&b.path.room_count()))
            .then_with(|| a.path.sequence().cmp(b.path.sequence()))
    });
    Ok(ranked)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::parse_turtle;

    const PREFIX: &str = "@prefix bot: <https://w3id.org/bot#> .\n\
        @prefix brick: <https://brickschema.org/schema/1.0.3/Brick#> .\n\
        @prefix t: <http://t/> .\n";

    fn building(body: &str) -> AlignedBuilding {
        AlignedBuilding::from_graph(parse_turtle(&format!("{PREFIX}{body}")).unwrap()).unwrap()
    }

    fn t(s: &str) -> Iri {
        Iri::new(format!("http://t/{s}")).unwrap()
    }

    const LINE: &str = "t:A a brick:Room, bot:Space ; bot:adjacentElement t:d1 .\n\
        t:B a brick:Room, bot:Space ; bot:adjacentElement t:d1, t:d2 .\n\
        t:C a brick:Room, bot:Space ; bot:adjacentElement t:d2 .\n\
        t:Z a brick:Room, bot:Space .\n\
        t:d1 a bot:Element . t:d2 a bot:Element .\n\
        t:Public-Zone bot:hasSpace t:A . t:Security-Zone bot:hasSpace t:B . t:Reception-Zone bot:hasSpace t:C .\n";

    #[test]
    fn single_door() {
        let b = building(LINE);
        let set = enumerate_paths(&b, &t("A"), &t("B"), PlanOptions::default()).unwrap();
        assert!(set.is_complete());
        assert_eq!(set.paths.len(), 1);
        assert_eq!(set.paths[0].sequence(), &[t("A"), t("d1"), t("B")]);
    }

    #[test]
    fn disconnected_and_errors() {
        let b = building(LINE);
        assert!(enumerate_paths(&b, &t("A"), &t("Z"), PlanOptions::default()).unwrap().paths.is_empty());
        assert!(matches!(enumerate_paths(&b, &t("A"), &t("A"), PlanOptions::default()), Err(PlanError::SameRoom(_))));
        assert!(matches!(enumerate_paths(&b, &t("A"), &t("d1"), PlanOptions::default()), Err(PlanError::NotARoom(_))));
    }

    #[test]
    fn depth_bound_is_reported() {
        let b = building(LINE);
        let opts = PlanOptions { max_paths: 64, max_depth: 2 };
        let set = enumerate_paths(&b, &t("A"), &t("C"), opts).unwrap();
        assert!(set.paths.is_empty());
        assert!(set.truncated_by_depth);
    }

    #[test]
    fn count_bound_is_reported() {
        let b = building(
            "t:A a brick:Room, bot:Space ; bot:adjacentElement t:d1, t:d2, t:d3 .\n\
             t:B a brick:Room, bot:Space ; bot:adjacentElement t:d1, t:d2, t:d3 .\n\
             t:d1 a bot:Element . t:d2 a bot:Element . t:d3 a bot:Element .\n",
        );
        let set = enumerate_paths(&b, &t("A"), &t("B"), PlanOptions { max_paths: 2, max_depth: 32 }).unwrap();
        assert_eq!(set.paths.len(), 2);
        assert!(set.truncated_by_count);
        let all = enumerate_paths(&b, &t("A"), &t("B"), PlanOptions { max_paths: 3, max_depth: 32 }).unwrap();
        assert!(all.is_complete());
        let doors: Vec<_> = all.paths.iter().map(|p| p.sequence()[1].local_name().to_owned()).collect();
        assert_eq!(doors, vec!["d1", "d2", "d3"]);
    }

    #[test]
    fn zone_warning() {
        let b = building(LINE);
        let p = IndoorPath::new(&b, vec![t("A"), t("d1"), t("B"), t("d2"), t("C")]).unwrap();
        assert_eq!(zone_order_violations(&b, &p), vec![(t("A"), t("B"))]);
        assert!(IndoorPath::new(&b, vec![t("A"), t("d2"), t("C")]).is_err());
        assert!(IndoorPath::new(&b, vec![t("A"), t("d1")]).is_err());
    }

    #[test]
    fn ids_are_stable_and_distinct() {
        let b = building(LINE);
        let p = IndoorPath::new(&b, vec![t("A"), t("d1"), t("B")]).unwrap();
        assert_eq!(p.id(), p.clone().id());
        assert_ne!(p.id(), p.reversed().id());
        assert_eq!(p.id().len(), 16);
    }
}
