//! Deployment configuration: building files, weights, keyring, ledger,
//! service and simulation settings, read from TOML or JSON.
//!
//! Relative paths resolve against the config file's directory. Everything a
//! command might need is loaded and validated up front.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::building::{self, AlignedBuilding, BuildingError, BuildingFiles};
use crate::dataset;
use crate::ledger::LedgerConfig;
use crate::rdf::{Iri, PrefixTable};
use crate::sensitivity::{SecurityZone, SensitivityError, WeightConfig, WeightTable};
use crate::service::{AccessService, Keyring, KeyringError, ServiceConfig};
use crate::sim::{DayKind, DayProfile, WorkloadConfig};

pub const CONFIG_ENV: &str = "PATHGATE_CONFIG";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error(transparent)]
    Building(#[from] BuildingError),
    #[error(transparent)]
    Weights(#[from] SensitivityError),
    #[error(transparent)]
    Keyring(#[from] KeyringError),
    #[error("zones file {path}, line {line}: {message}")]
    Zones { path: PathBuf, line: usize, message: String },
    #[error("entrance {0:?} is not a space in the building")]
    Entrance(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuildingSection {
    pub brick: PathBuf,
    pub bot: PathBuf,
    #[serde(default)]
    pub taxonomy: Option<PathBuf>,
    /// CSV `source,target` pairs; identity on local names when absent.
    #[serde(default)]
    pub correspondence: Option<PathBuf>,
    /// CSV `zone,level` overriding levels read from zone names.
    #[serde(default)]
    pub zones: Option<PathBuf>,
    #[serde(default = "default_entrance")]
    pub entrance: String,
}

fn default_entrance() -> String {
    dataset::ENTRANCE.to_owned()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSection {
    pub workload: WorkloadConfig,
    /// Replaces the calibrated preset of the same kind.
    pub profiles: BTreeMap<DayKind, DayProfile>,
}

impl SimSection {
    pub fn profile(&self, kind: DayKind) -> DayProfile {
        self.profiles.get(&kind).cloned().unwrap_or_else(|| DayProfile::preset(kind))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    /// Built-in example building when absent.
    #[serde(default)]
    pub building: Option<BuildingSection>,
    /// Pairwise answers or explicit weights, JSON.
    #[serde(default)]
    pub weights: Option<PathBuf>,
    #[serde(default)]
    pub keyring: Option<PathBuf>,
    #[serde(default)]
    pub ledger: LedgerConfig,
    #[serde(default)]
    pub service: ServiceConfig,
    #[serde(default)]
    pub sim: SimSection,
    /// Where single-shot CLI commands keep their journal.
    #[serde(default = "default_state_dir")]
    pub state_dir: PathBuf,
}

fn default_state_dir() -> PathBuf {
    PathBuf::from(".pathgate")
}

impl Default for Config {
    fn default() -> Self {
        Self {
            building: None,
            weights: None,
            keyring: None,
            ledger: LedgerConfig::default(),
            service: ServiceConfig::default(),
            sim: SimSection::default(),
            state_dir: default_state_dir(),
        }
    }
}

fn read(path: &Path) -> Result<String, ConfigError> {
    fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_owned(),
        source,
    })
}

impl Config {
    /// Parses TOML, or JSON when the extension is `.json`.
    pub fn parse(text: &str, path: &Path) -> Result<Self, ConfigError> {
        let parsed = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(text).map_err(|e| e.to_string())
        } else {
            toml::from_str(text).map_err(|e| e.to_string())
        };
        parsed.map_err(|message| ConfigError::Parse {
            path: path.to_owned(),
            message,
        })
    }

    /// Reads a config file and makes its relative paths absolute.
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let mut c = Self::parse(&read(path)?, path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(b) = &mut c.building {
            fix(&mut b.brick);
            fix(&mut b.bot);
            b.taxonomy.iter_mut().for_each(fix);
            b.correspondence.iter_mut().for_each(fix);
            b.zones.iter_mut().for_each(fix);
        }
        c.weights.iter_mut().for_each(fix);
        c.keyring.iter_mut().for_each(fix);
        fix(&mut c.state_dir);
        Ok(c)
    }

    /// Loads and validates every referenced input.
    pub fn load(&self) -> Result<Environment, ConfigError> {
        let (building, entrance_name) = match &self.building {
            None => (dataset::example_building()?, default_entrance()),
            Some(b) => {
                let mut building = building::load(&BuildingFiles {
                    brick: b.brick.clone(),
                    bot: b.bot.clone(),
                    taxonomy: b.taxonomy.clone(),
                    correspondence: b.correspondence.clone(),
                })?;
                if let Some(zones) = &b.zones {
                    apply_zones(&mut building, zones)?;
                }
                (building, b.entrance.clone())
            }
        };
        let entrance = building
            .lookup(&entrance_name)
            .ok_or_else(|| ConfigError::Entrance(entrance_name.clone()))?;
        let weight_config = match &self.weights {
            None => WeightConfig::from_json(dataset::TABLE2_WEIGHTS)?,
            Some(p) => WeightConfig::from_json(&read(p)?).map_err(|e| ConfigError::Parse {
                path: p.clone(),
                message: e.to_string(),
            })?,
        };
        let mut prefixes = PrefixTable::building_defaults();
        prefixes.extend(building.graph().prefixes());
        let weights = weight_config.weight_table(&prefixes)?;
        let keyring = match &self.keyring {
            None => dataset::example_keyring(),
            Some(p) => Keyring::from_json(&read(p)?)?,
        };
        Ok(Environment {
            config: self.clone(),
            building,
            entrance,
            weight_config,
            prefixes,
            weights,
            keyring,
        })
    }
}

fn apply_zones(building: &mut AlignedBuilding, path: &Path) -> Result<(), ConfigError> {
    let text = read(path)?;
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(text.as_bytes());
    for (i, row) in reader.records().enumerate() {
        let err = |message: String| ConfigError::Zones {
            path: path.to_owned(),
            line: i + 1,
            message,
        };
        let row = row.map_err(|e| err(e.to_string()))?;
        let (Some(zone), Some(level)) = (row.get(0), row.get(1)) else {
            return Err(err("expected zone,level".into()));
        };
        if zone == "zone" && i == 0 {
            continue;
        }
        let zone = building.lookup(zone).ok_or_else(|| err(format!("unknown zone {zone}")))?;
        let level = match level.parse::<u8>() {
            Ok(n) => SecurityZone::from_ordinal(n).ok_or_else(|| err(format!("no zone level {n}")))?,
            Err(_) => level.parse::<SecurityZone>().map_err(|e| err(e.to_string()))?,
        };
        building.set_zone_level(zone, level);
    }
    Ok(())
}

/// Everything loaded from a [`Config`].
pub struct Environment {
    pub config: Config,
    pub building: AlignedBuilding,
    pub entrance: Iri,
    pub weight_config: WeightConfig,
    pub prefixes: PrefixTable,
    pub weights: WeightTable,
    pub keyring: Keyring,
}

impl Environment {
    pub fn service(&self) -> AccessService {
        AccessService::new(
            self.building.clone(),
            self.weights.clone(),
            self.entrance.clone(),
            self.keyring.clone(),
            self.config.ledger.clone(),
            self.config.service.clone(),
        )
    }
}
