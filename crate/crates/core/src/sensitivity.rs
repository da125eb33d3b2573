//! Security-zone ordinals, AHP point weights and the room/path cost function.
//!
//! A room costs its zone ordinal plus, for every point located in it,
//! `weight(type) * (1 + control_fanout(point))`. A path costs the sum of its
//! rooms; doors are free.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::building::{AlignedBuilding, BuildingError, LocatedPoint};
use crate::planner::IndoorPath;
use crate::rdf::{Iri, PrefixTable, RdfError};

#[derive(Debug, Error)]
pub enum SensitivityError {
    #[error(transparent)]
    Building(#[from] BuildingError),
    #[error(transparent)]
    Rdf(#[from] RdfError),
    #[error("pairwise matrix: {0}")]
    Matrix(String),
    #[error("power iteration did not converge after {0} iterations")]
    NoConvergence(usize),
    #[error("no weight for point type {point_type} (point {point})")]
    MissingWeight { point: Iri, point_type: Iri },
    #[error("weight table: {0}")]
    Table(String),
    #[error("weight config: {0}")]
    Config(String),
}

/// Baseline sensitivity of a room, ordered from least to most sensitive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SecurityZone {
    Public,
    Reception,
    Operations,
    Security,
    HighSecurity,
}

impl SecurityZone {
    pub const ALL: [SecurityZone; 5] = [
        SecurityZone::Public,
        SecurityZone::Reception,
        SecurityZone::Operations,
        SecurityZone::Security,
        SecurityZone::HighSecurity,
    ];

    pub fn ordinal(self) -> u8 {
        self as u8
    }

    pub fn from_ordinal(ordinal: u8) -> Option<Self> {
        Self::ALL.get(ordinal as usize).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            SecurityZone::Public => "Public",
            SecurityZone::Reception => "Reception",
            SecurityZone::Operations => "Operations",
            SecurityZone::Security => "Security",
            SecurityZone::HighSecurity => "HighSecurity",
        }
    }

    /// Derives the level from a zone node's local name such as
    /// `High-Security-Zone` or `Operations_Zone`.
    pub fn from_zone_name(local: &str) -> Option<Self> {
        let mut key: String = local
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        if key.len() > 4 && key.ends_with("zone") {
            key.truncate(key.len() - 4);
        }
        Self::ALL
            .iter()
            .copied()
            .find(|z| z.name().to_ascii_lowercase() == key)
    }
}

impl fmt::Display for SecurityZone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SecurityZone {
    type Err = SensitivityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Ok(n) = s.parse::<u8>() {
            return Self::from_ordinal(n).ok_or_else(|| SensitivityError::Config(format!("zone ordinal {n} out of range")));
        }
        Self::from_zone_name(s).ok_or_else(|| SensitivityError::Config(format!("unknown security zone {s:?}")))
    }
}

/// Saaty's random consistency index for n = 1..=15.
const RANDOM_INDEX: [f64; 15] = [
    0.0, 0.0, 0.58, 0.90, 1.12, 1.24, 1.32, 1.41, 1.45, 1.49, 1.51, 1.48, 1.56, 1.57, 1.59,
];

pub fn random_index(n: usize) -> Option<f64> {
    n.checked_sub(1).and_then(|i| RANDOM_INDEX.get(i)).copied()
}

const RECIPROCITY_TOLERANCE: f64 = 1e-9;
const POWER_TOLERANCE: f64 = 1e-10;
const MAX_ITERATIONS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairwiseMatrix {
    labels: Vec<String>,
    entries: Vec<Vec<f64>>,
}

impl PairwiseMatrix {
    pub fn new(labels: Vec<String>, entries: Vec<Vec<f64>>) -> Result<Self, SensitivityError> {
        let n = labels.len();
        if !(2..=15).contains(&n) {
            return Err(SensitivityError::Matrix(format!("size {n} outside 2..=15")));
        }
        if entries.len() != n || entries.iter().any(|row| row.len() != n) {
            return Err(SensitivityError::Matrix(format!("expected a {n}x{n} matrix")));
        }
        for i in 0..n {
            for j in 0..n {
                let v = entries[i][j];
                if !(v.is_finite() && v > 0.0) {
                    return Err(SensitivityError::Matrix(format!("entry ({i},{j}) = {v} is not positive")));
                }
                if (v * entries[j][i] - 1.0).abs() > RECIPROCITY_TOLERANCE {
                    return Err(SensitivityError::Matrix(format!(
                        "entries ({i},{j}) and ({j},{i}) are not reciprocal"
                    )));
                }
            }
        }
        Ok(Self { labels, entries })
    }

    /// Builds the matrix from answers to "how important is i compared to j"
    /// listed row by row over the upper triangle: (0,1), (0,2), ..., (1,2), ...
    pub fn from_answers(labels: Vec<String>, answers: &[f64]) -> Result<Self, SensitivityError> {
        let n = labels.len();
        let expected = n * n.saturating_sub(1) / 2;
        if answers.len() != expected {
            return Err(SensitivityError::Matrix(format!(
                "{n} labels need {expected} answers, got {}",
                answers.len()
            )));
        }
        let mut entries = vec![vec![1.0; n]; n];
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                let a = answers[k];
                if !(a.is_finite() && a > 0.0) {
                    return Err(SensitivityError::Matrix(format!("answer {} = {a} is not positive", k + 1)));
                }
                entries[i][j] = a;
                entries[j][i] = 1.0 / a;
                k += 1;
            }
        }
        Self::new(labels, entries)
    }

    /// The perfectly consistent matrix `m[i][j] = w[i] / w[j]`.
    pub fn consistent(labels: Vec<String>, weights: &[f64]) -> Result<Self, SensitivityError> {
        let entries = weights
            .iter()
            .map(|wi| weights.iter().map(|wj| wi / wj).collect())
            .collect();
        Self::new(labels, entries)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn entries(&self) -> &[Vec<f64>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.entries
            .iter()
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AhpResult {
    pub weights: Vec<f64>,
    pub lambda_max: f64,
    pub consistency_ratio: f64,
}

/// Principal eigenvector by power iteration, normalized to sum 1.
pub fn ahp_weights(m: &PairwiseMatrix) -> Result<AhpResult, SensitivityError> {
    let n = m.len();
    let mut w = vec![1.0 / n as f64; n];
    for _ in 0..MAX_ITERATIONS {
        let mut next = m.apply(&w);
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= total);
        let delta = next
            .iter()
            .zip(&w)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        w = next;
        if delta < POWER_TOLERANCE {
            let mw = m.apply(&w);
            let lambda_max = mw.iter().zip(&w).map(|(a, b)| a / b).sum::<f64>() / n as f64;
            let ri = random_index(n).unwrap_or(0.0);
            let consistency_ratio = if ri == 0.0 {
                0.0
            } else {
                ((lambda_max - n as f64) / (n as f64 - 1.0)) / ri
            };
            return Ok(AhpResult {
                weights: w,
                lambda_max,
                consistency_ratio,
            });
        }
    }
    Err(SensitivityError::NoConvergence(MAX_ITERATIONS))
}

/// Per-category weights keyed by point type.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct WeightTable {
    categories: BTreeMap<Iri, BTreeMap<Iri, f64>>,
}

impl WeightTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a category; weights must lie in (0, 1) and sum to 1 within
    /// `sum_tolerance`.
    pub fn insert_category(
        &mut self,
        category: Iri,
        weights: BTreeMap<Iri, f64>,
        sum_tolerance: f64,
    ) -> Result<(), SensitivityError> {
        if weights.is_empty() {
            return Err(SensitivityError::Table(format!("category {category} has no weights")));
        }
        for (ty, w) in &weights {
            if !(*w > 0.0 && *w < 1.0) && !(weights.len() == 1 && *w == 1.0) {
                return Err(SensitivityError::Table(format!("weight of {ty} = {w} outside (0,1)")));
            }
            if let Some(other) = self.category_of(ty) {
                return Err(SensitivityError::Table(format!("{ty} already weighted under {other}")));
            }
        }
        let sum: f64 = weights.values().sum();
        if (sum - 1.0).abs() > sum_tolerance {
            return Err(SensitivityError::Table(format!(
                "weights of {category} sum to {sum}, not 1 within {sum_tolerance}"
            )));
        }
        self.categories.insert(category, weights);
        Ok(())
    }

    /// Adds an AHP-derived category (sum tolerance 1e-9).
    pub fn insert_ahp(&mut self, category: Iri, types: &[Iri], result: &AhpResult) -> Result<(), SensitivityError> {
        if types.len() != result.weights.len() {
            return Err(SensitivityError::Table("type list and weight vector differ in length".into()));
        }
        let weights = types.iter().cloned().zip(result.weights.iter().copied()).collect();
        self.insert_category(category, weights, 1e-9)
    }

    /// Adds explicitly listed weights, allowing the rounding error of
    /// 3-decimal values (0.0005 per entry).
    pub fn insert_explicit(&mut self, category: Iri, weights: BTreeMap<Iri, f64>) -> Result<(), SensitivityError> {
        let tolerance = 0.0005 * weights.len() as f64;
        self.insert_category(category, weights, tolerance)
    }

    pub fn weight(&self, point_type: &Iri) -> Option<f64> {
        self.categories.values().find_map(|m| m.get(point_type).copied())
    }

    pub fn category_of(&self, point_type: &Iri) -> Option<&Iri> {
        self.categories
            .iter()
            .find(|(_, m)| m.contains_key(point_type))
            .map(|(c, _)| c)
    }

    pub fn categories(&self) -> impl Iterator<Item = (&Iri, &BTreeMap<Iri, f64>)> {
        self.categories.iter()
    }

    fn weight_for(&self, p: &LocatedPoint) -> Result<f64, SensitivityError> {
        self.weight(&p.leaf_type)
            .or_else(|| self.weight(&p.point_type))
            .ok_or_else(|| SensitivityError::MissingWeight {
                point: p.point.clone(),
                point_type: p.point_type.clone(),
            })
    }

    /// Located points whose type has no weight; a non-empty result is a
    /// configuration error.
    pub fn unweighted_points(&self, b: &AlignedBuilding) -> Vec<LocatedPoint> {
        let mut out = Vec::new();
        for room in b.rooms() {
            for p in b.points_in(&room.iri).unwrap_or_default() {
                if self.weight_for(&p).is_err() {
                    out.push(p);
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

/// One category of a weight configuration file: either pairwise answers over
/// an ordered type list, or explicit weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CategoryConfig {
    pub category: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub types: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub answers: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<BTreeMap<String, f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightConfig {
    pub categories: Vec<CategoryConfig>,
}

/// A category resolved from a [`WeightConfig`], with AHP diagnostics when it
/// came from answers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategoryWeights {
    pub category: Iri,
    pub types: Vec<Iri>,
    pub weights: Vec<f64>,
    pub ahp: Option<AhpResult>,
}

impl WeightConfig {
    pub fn from_json(text: &str) -> Result<Self, SensitivityError> {
        serde_json::from_str(text).map_err(|e| SensitivityError::Config(e.to_string()))
    }

    /// Resolves every category, running AHP where answers are given.
    pub fn resolve(&self, prefixes: &PrefixTable) -> Result<Vec<CategoryWeights>, SensitivityError> {
        let mut out = Vec::new();
        for cat in &self.categories {
            let category = prefixes.expand(&cat.category)?;
            match (&cat.answers, &cat.weights) {
                (Some(answers), None) => {
                    let names = cat
                        .types
                        .clone()
                        .ok_or_else(|| SensitivityError::Config(format!("{category}: answers need a types list")))?;
                    let types = names
                        .iter()
                        .map(|t| prefixes.expand(t))
                        .collect::<Result<Vec<_>, _>>()?;
                    let matrix = PairwiseMatrix::from_answers(names, answers)?;
                    let ahp = ahp_weights(&matrix)?;
                    out.push(CategoryWeights {
                        category,
                        types,
                        weights: ahp.weights.clone(),
                        ahp: Some(ahp),
                    });
                }
                (None, Some(weights)) => {
                    let mut types = Vec::new();
                    let mut values = Vec::new();
                    for (t, w) in weights {
                        types.push(prefixes.expand(t)?);
                        values.push(*w);
                    }
                    out.push(CategoryWeights {
                        category,
                        types,
                        weights: values,
                        ahp: None,
                    });
                }
                _ => {
                    return Err(SensitivityError::Config(format!(
                        "{category}: give exactly one of answers or weights"
                    )))
                }
            }
        }
        Ok(out)
    }

    pub fn weight_table(&self, prefixes: &PrefixTable) -> Result<WeightTable, SensitivityError> {
        let mut table = WeightTable::new();
        for cat in self.resolve(prefixes)? {
            match &cat.ahp {
                Some(ahp) => table.insert_ahp(cat.category, &cat.types, ahp)?,
                None => table.insert_explicit(cat.category, cat.types.into_iter().zip(cat.weights).collect())?,
            }
        }
        Ok(table)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointTerm {
    pub point: Iri,
    pub point_type: Iri,
    pub weight: f64,
    pub control: usize,
}

impl PointTerm {
    pub fn cost(&self) -> f64 {
        self.weight * (1.0 + self.control as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoomCost {
    pub room: Iri,
    pub zone: SecurityZone,
    pub sensitivity: f64,
    pub point_cost: f64,
    pub points: Vec<PointTerm>,
}

impl RoomCost {
    pub fn total(&self) -> f64 {
        self.sensitivity + self.point_cost
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathCost {
    pub per_room: Vec<RoomCost>,
    pub total: f64,
}

pub fn room_cost(b: &AlignedBuilding, w: &WeightTable, room: &Iri) -> Result<RoomCost, SensitivityError> {
    let zone = b.security_zone_of(room)?;
    let mut points = Vec::new();
    for p in b.points_in(room)? {
        let weight = w.weight_for(&p)?;
        let control = b.control_fanout(&p.point)?;
        points.push(PointTerm {
            point: p.point,
            point_type: p.leaf_type,
            weight,
            control,
        });
    }
    let point_cost = points.iter().map(PointTerm::cost).fold(0.0, |a, c| a + c);
    Ok(RoomCost {
        room: room.clone(),
        zone,
        sensitivity: zone.ordinal() as f64,
        point_cost,
        points,
    })
}

/// Cost of a list of rooms (the rooms of a path, in order).
pub fn rooms_cost<'a>(
    b: &AlignedBuilding,
    w: &WeightTable,
    rooms: impl IntoIterator<Item = &'a Iri>,
) -> Result<PathCost, SensitivityError> {
    let per_room = rooms
        .into_iter()
        .map(|r| room_cost(b, w, r))
        .collect::<Result<Vec<_>, _>>()?;
    let total = per_room.iter().map(RoomCost::total).fold(0.0, |a, c| a + c);
    Ok(PathCost { per_room, total })
}

pub fn path_cost(b: &AlignedBuilding, w: &WeightTable, path: &IndoorPath) -> Result<PathCost, SensitivityError> {
    rooms_cost(b, w, path.rooms())
}
