//! The example building and weight files shipped under `data/`, embedded so
//! tests and examples run without touching the filesystem.

use crate::ledger::LedgerConfig;
use crate::service::{AccessService, Keyring, ServiceConfig};
use crate::building::{align, AlignedBuilding, BuildingError, Correspondence};
use crate::rdf::{parse_turtle, PrefixTable};
use crate::sensitivity::{SensitivityError, WeightConfig, WeightTable};

pub const TAXONOMY: &str = include_str!("../data/taxonomy.ttl");
pub const BRICK: &str = include_str!("../data/building1-brick.ttl");
pub const BOT: &str = include_str!("../data/building1-bot.ttl");
pub const APPENDIX_A1: &str = include_str!("../data/appendix-a1.ttl");
pub const AHP_ANSWERS: &str = include_str!("../data/ahp-answers.json");
pub const TABLE2_WEIGHTS: &str = include_str!("../data/weights-table2.json");

/// The aligned example building (Brick view + taxonomy, BOT view, identity
/// correspondence).
pub fn example_building() -> Result<AlignedBuilding, BuildingError> {
    let brick = parse_turtle(BRICK)?.merge(&parse_turtle(TAXONOMY)?);
    let bot = parse_turtle(BOT)?;
    let corr = Correspondence::by_local_name(&brick, &bot);
    align(&brick, &bot, &corr)
}

/// Weights with the 3-decimal values used for the published path costs.
pub fn table2_weights() -> Result<WeightTable, SensitivityError> {
    WeightConfig::from_json(TABLE2_WEIGHTS)?.weight_table(&PrefixTable::building_defaults())
}

/// The pairwise answers for sensors and setpoints.
pub fn ahp_answers() -> Result<WeightConfig, SensitivityError> {
    WeightConfig::from_json(AHP_ANSWERS)
}

pub const KEYRING: &str = include_str!("../data/keyring.json");

/// Local name of the outdoor space every visit starts from.
pub const ENTRANCE: &str = "MainEntrance";

/// Accounts `manager` (root), `host` and `reception`.
pub fn example_keyring() -> Keyring {
    Keyring::from_json(KEYRING).expect("shipped keyring parses")
}

/// A service over the example building with the given ledger settings.
pub fn example_service(ledger: LedgerConfig) -> AccessService {
    let building = example_building().expect("shipped building loads");
    let weights = table2_weights().expect("shipped weights load");
    let entrance = building.lookup(ENTRANCE).expect("entrance exists");
    AccessService::new(building, weights, entrance, example_keyring(), ledger, ServiceConfig::default())
}
