//! Namespaces and terms of the Brick, BrickFrame and BOT vocabularies used by
//! the building queries.

pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
pub const XML: &str = "http://www.w3.org/XML/1998/namespace";
pub const BF: &str = "https://brickschema.org/schema/1.0.3/BrickFrame#";
pub const BRICK: &str = "https://brickschema.org/schema/1.0.3/Brick#";
pub const BOT: &str = "https://w3id.org/bot#";
pub const BUILDING1: &str = "http://building1.com#";

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const RDFS_SUBCLASS_OF: &str = "http://www.w3.org/2000/01/rdf-schema#subClassOf";

pub const BF_FEEDS: &str = "https://brickschema.org/schema/1.0.3/BrickFrame#feeds";
pub const BF_CONTROLS: &str = "https://brickschema.org/schema/1.0.3/BrickFrame#controls";
pub const BF_HAS_PART: &str = "https://brickschema.org/schema/1.0.3/BrickFrame#hasPart";
pub const BF_HAS_POINT: &str = "https://brickschema.org/schema/1.0.3/BrickFrame#hasPoint";
pub const BF_IS_LOCATION_OF: &str = "https://brickschema.org/schema/1.0.3/BrickFrame#isLocationOf";

pub const BRICK_POINT: &str = "https://brickschema.org/schema/1.0.3/Brick#Point";
pub const BRICK_ROOM: &str = "https://brickschema.org/schema/1.0.3/Brick#Room";
pub const BRICK_EQUIPMENT: &str = "https://brickschema.org/schema/1.0.3/Brick#Equipment";
pub const BRICK_HVAC_ZONE: &str = "https://brickschema.org/schema/1.0.3/Brick#HVAC_Zone";

pub const BOT_ZONE: &str = "https://w3id.org/bot#Zone";
pub const BOT_SPACE: &str = "https://w3id.org/bot#Space";
pub const BOT_ELEMENT: &str = "https://w3id.org/bot#Element";
pub const BOT_HAS_SPACE: &str = "https://w3id.org/bot#hasSpace";
pub const BOT_ADJACENT_ELEMENT: &str = "https://w3id.org/bot#adjacentElement";

/// The prefix table used by the example building files and the queries.
pub fn default_prefixes() -> Vec<(&'static str, &'static str)> {
    vec![
        ("bf", BF),
        ("bot", BOT),
        ("brick", BRICK),
        ("building1", BUILDING1),
        ("rdf", RDF),
        ("rdfs", RDFS),
        ("xml", XML),
        ("xsd", XSD),
    ]
}
