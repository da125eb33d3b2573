//! Aligned Brick + BOT building model and the typed queries used for path
//! planning and costing.
//!
//! Alignment renames every Brick location listed in a [`Correspondence`] to
//! its BOT space so that one node carries both the functional relations
//! (`bf:isLocationOf`, `bf:hasPart`) and the topological ones
//! (`bot:adjacentElement`, `bot:hasSpace`).

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::rdf::{parse_turtle, Iri, PrefixTable, RdfError, Term, Triple, TripleGraph};
use crate::sensitivity::SecurityZone;
use crate::vocab;

#[derive(Debug, Error)]
pub enum BuildingError {
    #[error(transparent)]
    Rdf(#[from] RdfError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("correspondence source {0} does not occur in the Brick graph")]
    MissingSource(Iri),
    #[error("correspondence target {0} does not occur in the BOT graph")]
    MissingTarget(Iri),
    #[error("correspondence maps both {first} and {second} onto {target}")]
    DuplicateTarget { first: Iri, second: Iri, target: Iri },
    #[error("room {room} belongs to several security zones: {zones:?}")]
    MultipleZones { room: Iri, zones: Vec<Iri> },
    #[error("room {0} has no security zone")]
    NoZone(Iri),
    #[error("cannot derive a security level for zone {0}")]
    UnknownZoneLevel(Iri),
    #[error("{0} is not a room")]
    NotARoom(Iri),
    #[error("{0} is not a point")]
    NotAPoint(Iri),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ResourceKind {
    Room,
    Door,
    Point,
    Equipment,
    HvacZone,
    SecurityZoneNode,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Resource {
    pub iri: Iri,
    pub kind: ResourceKind,
}

/// A point located in a room, classified through the taxonomy.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct LocatedPoint {
    pub point: Iri,
    /// The point's direct `rdf:type`.
    pub leaf_type: Iri,
    /// The class directly below the category on the way up from `leaf_type`
    /// (equal to `leaf_type` for the shipped taxonomy).
    pub point_type: Iri,
    /// The class directly below `brick:Point`, e.g. `brick:Sensor`.
    pub category: Iri,
}

/// Brick location IRI to BOT space IRI.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Correspondence {
    pairs: BTreeMap<Iri, Iri>,
}

impl Correspondence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, brick: Iri, bot: Iri) {
        self.pairs.insert(brick, bot);
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Iri, &Iri)> {
        self.pairs.iter()
    }

    /// Pairs Brick rooms with BOT spaces that share a local name.
    pub fn by_local_name(brick: &TripleGraph, bot: &TripleGraph) -> Self {
        let rooms = instances_of(brick, &brick.subclass_closure(&Iri::constant(vocab::BRICK_ROOM)));
        let spaces = instances_of(bot, &bot.subclass_closure(&Iri::constant(vocab::BOT_SPACE)));
        let mut by_name: BTreeMap<&str, Vec<&Iri>> = BTreeMap::new();
        for space in &spaces {
            by_name.entry(space.local_name()).or_default().push(space);
        }
        let mut corr = Correspondence::new();
        for room in &rooms {
            if let Some([single]) = by_name.get(room.local_name()).map(Vec::as_slice) {
                corr.insert(room.clone(), (*single).clone());
            }
        }
        corr
    }

    /// Two-column CSV (`brick-iri,bot-iri`); prefixed names are expanded with
    /// `prefixes`. A header row starting with `brick` is skipped.
    pub fn from_csv(text: &str, prefixes: &PrefixTable) -> Result<Self, BuildingError> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let mut corr = Correspondence::new();
        for (i, record) in reader.records().enumerate() {
            let record = record.map_err(|e| BuildingError::Parse {
                path: PathBuf::from("<correspondence>"),
                message: e.to_string(),
            })?;
            if record.len() != 2 {
                return Err(BuildingError::Parse {
                    path: PathBuf::from("<correspondence>"),
                    message: format!("row {} has {} columns, expected 2", i + 1, record.len()),
                });
            }
            if i == 0 && record[0].to_ascii_lowercase().starts_with("brick") && !record[0].contains(':') {
                continue;
            }
            corr.insert(prefixes.expand(&record[0])?, prefixes.expand(&record[1])?);
        }
        Ok(corr)
    }
}

fn instances_of(graph: &TripleGraph, classes: &BTreeSet<Iri>) -> BTreeSet<Iri> {
    let rdf_type = Iri::constant(vocab::RDF_TYPE);
    classes
        .iter()
        .flat_map(|c| graph.subjects(&rdf_type, c))
        .collect()
}

/// The merged building graph with its resources classified.
#[derive(Debug, Clone)]
pub struct AlignedBuilding {
    graph: TripleGraph,
    kinds: BTreeMap<Iri, ResourceKind>,
    zone_levels: BTreeMap<Iri, SecurityZone>,
}

/// Merges the Brick and BOT graphs, collapsing each corresponded pair into
/// the BOT node.
pub fn align(brick: &TripleGraph, bot: &TripleGraph, correspondence: &Correspondence) -> Result<AlignedBuilding, BuildingError> {
    let mut targets: BTreeMap<&Iri, &Iri> = BTreeMap::new();
    for (source, target) in correspondence.iter() {
        if !brick.mentions(source) {
            return Err(BuildingError::MissingSource(source.clone()));
        }
        if !bot.mentions(target) {
            return Err(BuildingError::MissingTarget(target.clone()));
        }
        if let Some(first) = targets.insert(target, source) {
            return Err(BuildingError::DuplicateTarget {
                first: first.clone(),
                second: source.clone(),
                target: target.clone(),
            });
        }
    }
    let rename = |iri: &Iri| -> Iri {
        correspondence
            .pairs
            .get(iri)
            .cloned()
            .unwrap_or_else(|| iri.clone())
    };
    let renamed = brick.triples().iter().map(|t| Triple {
        subject: rename(&t.subject),
        predicate: t.predicate.clone(),
        object: match &t.object {
            Term::Iri(o) => Term::Iri(rename(o)),
            lit => lit.clone(),
        },
    });
    let mut prefixes = brick.prefixes().clone();
    prefixes.extend(bot.prefixes());
    let graph = TripleGraph::from_triples(renamed.chain(bot.triples().iter().cloned()), prefixes);
    AlignedBuilding::from_graph(graph)
}

impl AlignedBuilding {
    /// Classifies the resources of an already merged graph.
    pub fn from_graph(graph: TripleGraph) -> Result<Self, BuildingError> {
        let closure = |c: &str| graph.subclass_closure(&Iri::constant(c));
        let brick_rooms = instances_of(&graph, &closure(vocab::BRICK_ROOM));
        let bot_spaces = instances_of(&graph, &closure(vocab::BOT_SPACE));
        let doors = instances_of(&graph, &closure(vocab::BOT_ELEMENT));
        let points = instances_of(&graph, &closure(vocab::BRICK_POINT));
        let equipment = instances_of(&graph, &closure(vocab::BRICK_EQUIPMENT));
        let hvac_zones = instances_of(&graph, &closure(vocab::BRICK_HVAC_ZONE));
        let has_space = Iri::constant(vocab::BOT_HAS_SPACE);
        let security_zones: BTreeSet<Iri> = graph
            .match_pattern(None, Some(&has_space), None)
            .into_iter()
            .map(|t| t.subject.clone())
            .collect();

        let mut kinds = BTreeMap::new();
        // later inserts win; rooms last so a room typed as a zone stays a room
        for (set, kind) in [
            (&security_zones, ResourceKind::SecurityZoneNode),
            (&hvac_zones, ResourceKind::HvacZone),
            (&equipment, ResourceKind::Equipment),
            (&points, ResourceKind::Point),
            (&doors, ResourceKind::Door),
        ] {
            for iri in set {
                kinds.insert(iri.clone(), kind);
            }
        }
        for room in brick_rooms.intersection(&bot_spaces) {
            kinds.insert(room.clone(), ResourceKind::Room);
        }

        let mut building = AlignedBuilding {
            graph,
            kinds,
            zone_levels: BTreeMap::new(),
        };
        for zone in &security_zones {
            if let Some(level) = SecurityZone::from_zone_name(zone.local_name()) {
                building.zone_levels.insert(zone.clone(), level);
            }
        }
        for room in building.rooms() {
            let zones = building.graph.subjects(&has_space, &room.iri);
            if zones.len() > 1 {
                return Err(BuildingError::MultipleZones { room: room.iri, zones });
            }
        }
        Ok(building)
    }

    pub fn graph(&self) -> &TripleGraph {
        &self.graph
    }

    /// Overrides the level derived from a zone node's name.
    pub fn set_zone_level(&mut self, zone: Iri, level: SecurityZone) {
        self.zone_levels.insert(zone, level);
    }

    pub fn kind_of(&self, iri: &Iri) -> Option<ResourceKind> {
        self.kinds.get(iri).copied()
    }

    pub fn resource(&self, iri: &Iri) -> Option<Resource> {
        self.kind_of(iri).map(|kind| Resource {
            iri: iri.clone(),
            kind,
        })
    }

    fn of_kind(&self, kind: ResourceKind) -> Vec<Resource> {
        self.kinds
            .iter()
            .filter(|(_, k)| **k == kind)
            .map(|(iri, k)| Resource {
                iri: iri.clone(),
                kind: *k,
            })
            .collect()
    }

    pub fn rooms(&self) -> Vec<Resource> {
        self.of_kind(ResourceKind::Room)
    }

    pub fn doors(&self) -> Vec<Resource> {
        self.of_kind(ResourceKind::Door)
    }

    pub fn points(&self) -> Vec<Resource> {
        self.of_kind(ResourceKind::Point)
    }

    /// Resolves `prefix:name`, `<iri>`, an absolute IRI, or a bare local name
    /// of a known resource.
    pub fn lookup(&self, name: &str) -> Option<Iri> {
        if let Ok(iri) = self.graph.prefixes().expand(name) {
            if self.graph.mentions(&iri) {
                return Some(iri);
            }
        }
        let mut hits = self.kinds.keys().filter(|iri| iri.local_name() == name);
        match (hits.next(), hits.next()) {
            (Some(iri), None) => Some(iri.clone()),
            _ => None,
        }
    }

    /// Compact display name of an IRI.
    pub fn short(&self, iri: &Iri) -> String {
        self.graph.prefixes().display(iri)
    }

    /// Resources joined to `iri` by `bot:adjacentElement` in either direction.
    pub fn adjacent_resources(&self, iri: &Iri) -> BTreeSet<Iri> {
        let adjacent = Iri::constant(vocab::BOT_ADJACENT_ELEMENT);
        let mut out: BTreeSet<Iri> = self.graph.subjects(&adjacent, iri).into_iter().collect();
        out.extend(self.graph.objects(iri, &adjacent));
        out.remove(iri);
        out
    }

    /// The zone node holding `room` via `bot:hasSpace`.
    pub fn zone_node_of(&self, room: &Iri) -> Result<Iri, BuildingError> {
        self.require_room(room)?;
        let zones = self.graph.subjects(&Iri::constant(vocab::BOT_HAS_SPACE), room);
        match zones.as_slice() {
            [] => Err(BuildingError::NoZone(room.clone())),
            [zone] => Ok(zone.clone()),
            _ => Err(BuildingError::MultipleZones {
                room: room.clone(),
                zones,
            }),
        }
    }

    pub fn security_zone_of(&self, room: &Iri) -> Result<SecurityZone, BuildingError> {
        let zone = self.zone_node_of(room)?;
        self.zone_levels
            .get(&zone)
            .copied()
            .ok_or(BuildingError::UnknownZoneLevel(zone))
    }

    fn require_room(&self, room: &Iri) -> Result<(), BuildingError> {
        match self.kind_of(room) {
            Some(ResourceKind::Room) => Ok(()),
            _ => Err(BuildingError::NotARoom(room.clone())),
        }
    }

    /// Points located in `room` with their taxonomy classification. Located
    /// objects whose type does not reach `brick:Point` are left out; see
    /// [`AlignedBuilding::unclassified_in`].
    pub fn points_in(&self, room: &Iri) -> Result<Vec<LocatedPoint>, BuildingError> {
        self.require_room(room)?;
        let located = self.graph.objects(room, &Iri::constant(vocab::BF_IS_LOCATION_OF));
        let mut out = Vec::new();
        for point in located {
            if let Some(found) = self.classify_point(&point) {
                out.push(found);
            }
        }
        out.sort();
        Ok(out)
    }

    /// Objects of `room bf:isLocationOf ?x` that are not points (equipment
    /// and anything unclassified).
    pub fn unclassified_in(&self, room: &Iri) -> Vec<Iri> {
        self.graph
            .objects(room, &Iri::constant(vocab::BF_IS_LOCATION_OF))
            .into_iter()
            .filter(|p| self.classify_point(p).is_none())
            .collect()
    }

    fn classify_point(&self, point: &Iri) -> Option<LocatedPoint> {
        let sub_class_of = Iri::constant(vocab::RDFS_SUBCLASS_OF);
        let brick_point = Iri::constant(vocab::BRICK_POINT);
        let mut found = Vec::new();
        for leaf in self.graph.types_of(point) {
            for subsub in self.graph.superclass_closure(&leaf) {
                for subtype in self.graph.objects(&subsub, &sub_class_of) {
                    if self.graph.objects(&subtype, &sub_class_of).contains(&brick_point) {
                        found.push(LocatedPoint {
                            point: point.clone(),
                            leaf_type: leaf.clone(),
                            point_type: subsub.clone(),
                            category: subtype,
                        });
                    }
                }
            }
        }
        found.sort();
        found.into_iter().next()
    }

    /// Number of distinct locations reached by
    /// `point controls ?cmd . ?eq hasPoint ?cmd . ?eq feeds ?zone . ?zone hasPart ?loc`.
    pub fn control_fanout(&self, point: &Iri) -> Result<usize, BuildingError> {
        if self.kind_of(point) != Some(ResourceKind::Point) {
            return Err(BuildingError::NotAPoint(point.clone()));
        }
        Ok(self.controlled_locations(point).len())
    }

    pub fn controlled_locations(&self, point: &Iri) -> BTreeSet<Iri> {
        let g = &self.graph;
        let controls = Iri::constant(vocab::BF_CONTROLS);
        let has_point = Iri::constant(vocab::BF_HAS_POINT);
        let feeds = Iri::constant(vocab::BF_FEEDS);
        let has_part = Iri::constant(vocab::BF_HAS_PART);
        let mut locations = BTreeSet::new();
        for command in g.objects(point, &controls) {
            for equipment in g.subjects(&has_point, &command) {
                for zone in g.objects(&equipment, &feeds) {
                    locations.extend(g.objects(&zone, &has_part));
                }
            }
        }
        locations
    }

    /// Consistency findings for `model check`: rooms without a resolvable
    /// zone, doors touching no room, and located non-points.
    pub fn check(&self) -> Vec<String> {
        let mut issues = Vec::new();
        for room in self.rooms() {
            if let Err(e) = self.security_zone_of(&room.iri) {
                issues.push(e.to_string());
            }
            for other in self.unclassified_in(&room.iri) {
                if self.kind_of(&other) != Some(ResourceKind::Equipment) {
                    issues.push(format!("{} in {} does not reach brick:Point", other, room.iri));
                }
            }
        }
        for door in self.doors() {
            let touches_room = self
                .adjacent_resources(&door.iri)
                .iter()
                .any(|r| self.kind_of(r) == Some(ResourceKind::Room));
            if !touches_room {
                issues.push(format!("door {} is not adjacent to any room", door.iri));
            }
        }
        issues
    }
}

/// Paths of the Turtle and CSV inputs that make up a building.
#[derive(Debug, Clone)]
pub struct BuildingFiles {
    pub brick: PathBuf,
    pub bot: PathBuf,
    pub taxonomy: Option<PathBuf>,
    pub correspondence: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String, BuildingError> {
    fs::read_to_string(path).map_err(|source| BuildingError::Io {
        path: path.to_owned(),
        source,
    })
}

fn parse_file(path: &Path) -> Result<TripleGraph, BuildingError> {
    parse_turtle(&read(path)?).map_err(|e| BuildingError::Parse {
        path: path.to_owned(),
        message: e.to_string(),
    })
}

/// Loads and aligns a building; the taxonomy is merged into the Brick view.
pub fn load(files: &BuildingFiles) -> Result<AlignedBuilding, BuildingError> {
    let mut brick = parse_file(&files.brick)?;
    let bot = parse_file(&files.bot)?;
    if let Some(tax) = &files.taxonomy {
        brick = brick.merge(&parse_file(tax)?);
    }
    let correspondence = match &files.correspondence {
        Some(path) => {
            let mut prefixes = brick.prefixes().clone();
            prefixes.extend(bot.prefixes());
            Correspondence::from_csv(&read(path)?, &prefixes)?
        }
        None => Correspondence::by_local_name(&brick, &bot),
    };
    align(&brick, &bot, &correspondence)
}
