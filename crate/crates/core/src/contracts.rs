//! The three contracts as one deterministic state machine.
//!
//! * Archives: entities and the access-rule records.
//! * Implications: the ordered door/room list of each rule.
//! * Exclusions: resources each rule explicitly denies.
//!
//! State changes only through [`ContractState::apply`], which checks every
//! precondition before touching state, so a rejected call leaves it
//! unchanged. [`verify_access`] is a pure read. The per-rule pointer that
//! tracks progress along the implications is kept outside the hashed state in
//! a [`PointerStore`] owned by the access service.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::building::{AlignedBuilding, ResourceKind};
use crate::canon::Canon;
use crate::rdf::Iri;
use crate::time::SimTime;

macro_rules! hash_id {
    ($name:ident) => {
        #[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub [u8; 32]);

        impl $name {
            pub fn to_hex(&self) -> String {
                hex::encode(self.0)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.to_hex())
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}({}..)", stringify!($name), &self.to_hex()[..12])
            }
        }

        impl FromStr for $name {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, String> {
                let s = s.strip_prefix("0x").unwrap_or(s);
                let bytes = hex::decode(s).map_err(|e| format!("{}: {e}", stringify!($name)))?;
                let arr: [u8; 32] = bytes
                    .try_into()
                    .map_err(|_| format!("{} must be 32 bytes", stringify!($name)))?;
                Ok(Self(arr))
            }
        }

        impl Serialize for $name {
            fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(&self.to_hex())
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

hash_id!(Address);
hash_id!(RuleId);

impl Address {
    /// Deterministic address for a human-readable name (SHA-256 of it).
    pub fn from_label(label: &str) -> Self {
        Address(Canon::new().str("address").str(label).digest())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Permission {
    Read,
    Write,
    Delegate,
}

impl FromStr for Permission {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "read" => Ok(Permission::Read),
            "write" => Ok(Permission::Write),
            "delegate" => Ok(Permission::Delegate),
            other => Err(format!("unknown permission {other:?}")),
        }
    }
}

pub type Permissions = BTreeSet<Permission>;

pub fn all_permissions() -> Permissions {
    [Permission::Read, Permission::Write, Permission::Delegate].into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Open,
    Read,
    Write,
}

impl FromStr for Action {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "open" => Ok(Action::Open),
            "read" => Ok(Action::Read),
            "write" => Ok(Action::Write),
            other => Err(format!("unknown action {other:?}")),
        }
    }
}

impl Action {
    fn required_permission(self) -> Option<Permission> {
        match self {
            Action::Open => None,
            Action::Read => Some(Permission::Read),
            Action::Write => Some(Permission::Write),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entity {
    pub address: Address,
    pub created_by: Address,
    pub valid: bool,
    pub start: SimTime,
    pub expiry: Option<SimTime>,
    pub permissions: Permissions,
}

impl Entity {
    pub fn active_at(&self, now: SimTime) -> bool {
        now >= self.start && self.expiry.is_none_or(|e| now <= e)
    }
}

/// The Archives record of a rule; the lists live in the other two contracts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleRecord {
    pub source: Address,
    pub target: Address,
    pub start: SimTime,
    pub expiry: SimTime,
    pub destination: Iri,
    pub order_enforced: bool,
    pub valid: bool,
}

/// A rule assembled from all three contracts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AccessRule {
    pub rule_id: RuleId,
    pub source: Address,
    pub target: Address,
    pub start: SimTime,
    pub expiry: SimTime,
    pub destination: Iri,
    pub implications: Vec<Iri>,
    pub exclusions: BTreeSet<Iri>,
    pub order_enforced: bool,
    pub valid: bool,
}

impl AccessRule {
    pub fn active_at(&self, now: SimTime) -> bool {
        now >= self.start && now <= self.expiry
    }
}

/// Hash of (delegator, delegate, destination, start, expiry, implications).
pub fn rule_id(
    delegator: &Address,
    delegate: &Address,
    destination: &Iri,
    start: SimTime,
    expiry: SimTime,
    implications: &[Iri],
) -> RuleId {
    let mut c = Canon::new();
    c.bytes(&delegator.0)
        .bytes(&delegate.0)
        .str(destination.as_str())
        .u64(start.as_micros())
        .u64(expiry.as_micros())
        .list(implications.iter(), |c, iri| {
            c.str(iri.as_str());
        });
    RuleId(c.digest())
}

/// Building knowledge the contracts need: what each IRI is, which doors lead
/// in from outside, and the resources related to a destination.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ResourceCatalog {
    kinds: BTreeMap<Iri, ResourceKind>,
    entrance_doors: BTreeSet<Iri>,
    related: BTreeMap<Iri, BTreeSet<Iri>>,
}

impl ResourceCatalog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, iri: Iri, kind: ResourceKind) {
        self.kinds.insert(iri, kind);
    }

    pub fn add_entrance_door(&mut self, door: Iri) {
        self.entrance_doors.insert(door);
    }

    pub fn add_related(&mut self, destination: Iri, resource: Iri) {
        self.related.entry(destination).or_default().insert(resource);
    }

    /// Doors adjacent to `entrance` are entrance doors; each room's related
    /// resources are the points located in it.
    pub fn from_building(b: &AlignedBuilding, entrance: &Iri) -> Self {
        let mut cat = Self::new();
        for r in b.rooms().into_iter().chain(b.doors()).chain(b.points()) {
            cat.insert(r.iri, r.kind);
        }
        for door in b.adjacent_resources(entrance) {
            if b.kind_of(&door) == Some(ResourceKind::Door) {
                cat.add_entrance_door(door);
            }
        }
        for room in b.rooms() {
            for p in b.points_in(&room.iri).unwrap_or_default() {
                cat.add_related(room.iri.clone(), p.point);
            }
        }
        cat
    }

    pub fn kind(&self, iri: &Iri) -> Option<ResourceKind> {
        self.kinds.get(iri).copied()
    }

    pub fn is_door(&self, iri: &Iri) -> bool {
        self.kind(iri) == Some(ResourceKind::Door)
    }

    pub fn is_entrance_door(&self, iri: &Iri) -> bool {
        self.entrance_doors.contains(iri)
    }

    pub fn related(&self, destination: &Iri) -> BTreeSet<Iri> {
        self.related.get(destination).cloned().unwrap_or_default()
    }

    pub fn entrance_doors(&self) -> &BTreeSet<Iri> {
        &self.entrance_doors
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "call", rename_all = "snake_case", deny_unknown_fields)]
pub enum ContractCall {
    CreateEntity {
        address: Address,
        start: SimTime,
        #[serde(default)]
        expiry: Option<SimTime>,
        permissions: Permissions,
    },
    CreateAccessRule {
        target: Address,
        destination: Iri,
        implications: Vec<Iri>,
        #[serde(default)]
        exclusions: BTreeSet<Iri>,
        start: SimTime,
        expiry: SimTime,
        order_enforced: bool,
    },
    RevokeRule {
        rule_id: RuleId,
    },
    RevokeEntity {
        address: Address,
    },
}

impl ContractCall {
    pub fn kind(&self) -> CallKind {
        match self {
            ContractCall::CreateEntity { .. } => CallKind::CreateEntity,
            ContractCall::CreateAccessRule { .. } => CallKind::CreateAccessRule,
            ContractCall::RevokeRule { .. } => CallKind::RevokeRule,
            ContractCall::RevokeEntity { .. } => CallKind::RevokeEntity,
        }
    }

    /// Canonical JSON used as the transaction payload.
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string(self).expect("contract calls always serialize")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CallKind {
    CreateEntity,
    CreateAccessRule,
    RevokeRule,
    RevokeEntity,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum CallOutcome {
    EntityCreated { address: Address },
    RuleCreated { rule_id: RuleId },
    RuleRevoked { rule_id: RuleId },
    EntityRevoked { address: Address },
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "error", content = "detail", rename_all = "snake_case")]
pub enum ContractError {
    #[error("caller {0} has no valid entity")]
    CallerInvalid(Address),
    #[error("caller {0} is outside its validity window")]
    CallerExpired(Address),
    #[error("caller {0} lacks delegate permission")]
    NoDelegatePermission(Address),
    #[error("caller cannot grant permissions it does not hold: {0:?}")]
    PermissionNotHeld(Vec<Permission>),
    #[error("address {0} already has a valid entity")]
    AlreadyExists(Address),
    #[error("address {0} was invalidated and cannot be reused")]
    AddressRevoked(Address),
    #[error("start must precede expiry")]
    InvalidWindow,
    #[error("target {0} has no valid entity")]
    UnknownTarget(Address),
    #[error("implications must not be empty")]
    EmptyImplications,
    #[error("implications must end at the destination {0}")]
    DestinationMismatch(Iri),
    #[error("implications must start at an entrance door, not {0}")]
    NotAnEntrance(Iri),
    #[error("{0} is not a room or door of the building")]
    UnknownResource(Iri),
    #[error("{0} appears twice in the implications")]
    DuplicateResource(Iri),
    #[error("exclusion {0} is also an implication")]
    ExclusionOverlap(Iri),
    #[error("caller has no authority to grant {action:?} on {resource}")]
    NoAuthority { resource: Iri, action: Action },
    #[error("access rule {0} already exists")]
    DuplicateRule(RuleId),
    #[error("access rule {0} was revoked and cannot be re-created")]
    RuleRevokedPermanently(RuleId),
    #[error("unknown access rule {0}")]
    UnknownRule(RuleId),
    #[error("unknown entity {0}")]
    UnknownEntity(Address),
    #[error("caller is not allowed to revoke this")]
    NotAuthorized,
    #[error("already invalid")]
    AlreadyInvalid,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Archives {
    pub roots: BTreeSet<Address>,
    pub entities: BTreeMap<Address, Entity>,
    pub rules: BTreeMap<RuleId, RuleRecord>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Implications {
    pub lists: BTreeMap<RuleId, Vec<Iri>>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exclusions {
    pub sets: BTreeMap<RuleId, BTreeSet<Iri>>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractState {
    pub archives: Archives,
    pub implications: Implications,
    pub exclusions: Exclusions,
}

type Grant = (Iri, Action);

impl ContractState {
    /// Genesis state: each root (building manager) holds an open-ended entity
    /// with every permission.
    pub fn genesis(roots: impl IntoIterator<Item = Address>) -> Self {
        let mut state = Self::default();
        for root in roots {
            state.archives.roots.insert(root);
            state.archives.entities.insert(
                root,
                Entity {
                    address: root,
                    created_by: root,
                    valid: true,
                    start: SimTime::ZERO,
                    expiry: None,
                    permissions: all_permissions(),
                },
            );
        }
        state
    }

    pub fn entity(&self, address: &Address) -> Option<&Entity> {
        self.archives.entities.get(address)
    }

    pub fn rule(&self, id: &RuleId) -> Option<AccessRule> {
        let r = self.archives.rules.get(id)?;
        Some(AccessRule {
            rule_id: *id,
            source: r.source,
            target: r.target,
            start: r.start,
            expiry: r.expiry,
            destination: r.destination.clone(),
            implications: self.implications.lists.get(id).cloned().unwrap_or_default(),
            exclusions: self.exclusions.sets.get(id).cloned().unwrap_or_default(),
            order_enforced: r.order_enforced,
            valid: r.valid,
        })
    }

    pub fn rules(&self) -> impl Iterator<Item = AccessRule> + '_ {
        self.archives.rules.keys().filter_map(|id| self.rule(id))
    }

    pub fn is_root(&self, address: &Address) -> bool {
        self.archives.roots.contains(address)
    }

    /// Delegation edges (delegator, delegate, rule) of every recorded rule.
    pub fn authorization_graph(&self) -> BTreeSet<(Address, Address, RuleId)> {
        self.archives
            .rules
            .iter()
            .map(|(id, r)| (r.source, r.target, *id))
            .collect()
    }

    /// Canonical encoding; the state root is its SHA-256.
    pub fn canonical(&self) -> Canon {
        let mut c = Canon::new();
        c.list(self.archives.roots.iter(), |c, a| {
            c.bytes(&a.0);
        });
        c.list(self.archives.entities.values(), |c, e| {
            c.bytes(&e.address.0)
                .bytes(&e.created_by.0)
                .bool(e.valid)
                .u64(e.start.as_micros())
                .opt_u64(e.expiry.map(SimTime::as_micros))
                .list(e.permissions.iter(), |c, p| {
                    c.u64(*p as u64);
                });
        });
        c.list(self.archives.rules.iter(), |c, (id, r)| {
            c.bytes(&id.0)
                .bytes(&r.source.0)
                .bytes(&r.target.0)
                .u64(r.start.as_micros())
                .u64(r.expiry.as_micros())
                .str(r.destination.as_str())
                .bool(r.order_enforced)
                .bool(r.valid);
        });
        c.list(self.implications.lists.iter(), |c, (id, list)| {
            c.bytes(&id.0).list(list.iter(), |c, iri| {
                c.str(iri.as_str());
            });
        });
        c.list(self.exclusions.sets.iter(), |c, (id, set)| {
            c.bytes(&id.0).list(set.iter(), |c, iri| {
                c.str(iri.as_str());
            });
        });
        c
    }

    pub fn state_root(&self) -> [u8; 32] {
        self.canonical().digest()
    }

    fn active_caller(&self, caller: &Address, now: SimTime) -> Result<&Entity, ContractError> {
        let e = self
            .entity(caller)
            .filter(|e| e.valid)
            .ok_or(ContractError::CallerInvalid(*caller))?;
        if !e.active_at(now) {
            return Err(ContractError::CallerExpired(*caller));
        }
        if !e.permissions.contains(&Permission::Delegate) {
            return Err(ContractError::NoDelegatePermission(*caller));
        }
        Ok(e)
    }

    /// Every (resource, action) a rule lets its target perform.
    fn grants_of(catalog: &ResourceCatalog, rule: &AccessRule, holder_perms: &Permissions) -> BTreeSet<Grant> {
        let mut out: BTreeSet<Grant> = rule.implications.iter().map(|r| (r.clone(), Action::Open)).collect();
        for res in catalog.related(&rule.destination) {
            if rule.exclusions.contains(&res) || rule.implications.contains(&res) {
                continue;
            }
            for action in [Action::Read, Action::Write] {
                if action.required_permission().is_some_and(|p| holder_perms.contains(&p)) {
                    out.insert((res.clone(), action));
                }
            }
        }
        out
    }

    /// What `caller` may pass on: `None` means unrestricted (a root).
    pub fn authority_of(&self, catalog: &ResourceCatalog, caller: &Address, now: SimTime) -> Option<BTreeSet<Grant>> {
        if self.is_root(caller) {
            return None;
        }
        let perms = self.entity(caller).map(|e| e.permissions.clone()).unwrap_or_default();
        let mut out = BTreeSet::new();
        for rule in self.rules() {
            if rule.target == *caller && rule.valid && now <= rule.expiry {
                out.extend(Self::grants_of(catalog, &rule, &perms));
            }
        }
        Some(out)
    }

    /// Applies one call from `sender`. On error the state is untouched.
    pub fn apply(
        &mut self,
        catalog: &ResourceCatalog,
        sender: &Address,
        call: &ContractCall,
        now: SimTime,
    ) -> Result<CallOutcome, ContractError> {
        match call {
            ContractCall::CreateEntity {
                address,
                start,
                expiry,
                permissions,
            } => {
                let caller = self.active_caller(sender, now)?;
                let missing: Vec<Permission> = permissions.difference(&caller.permissions).copied().collect();
                if !missing.is_empty() {
                    return Err(ContractError::PermissionNotHeld(missing));
                }
                if let Some(existing) = self.entity(address) {
                    return Err(if existing.valid {
                        ContractError::AlreadyExists(*address)
                    } else {
                        ContractError::AddressRevoked(*address)
                    });
                }
                if expiry.is_some_and(|e| *start >= e) {
                    return Err(ContractError::InvalidWindow);
                }
                self.archives.entities.insert(
                    *address,
                    Entity {
                        address: *address,
                        created_by: *sender,
                        valid: true,
                        start: *start,
                        expiry: *expiry,
                        permissions: permissions.clone(),
                    },
                );
                Ok(CallOutcome::EntityCreated { address: *address })
            }
            ContractCall::CreateAccessRule {
                target,
                destination,
                implications,
                exclusions,
                start,
                expiry,
                order_enforced,
            } => {
                self.active_caller(sender, now)?;
                let target_entity = self
                    .entity(target)
                    .filter(|e| e.valid)
                    .ok_or(ContractError::UnknownTarget(*target))?;
                if start >= expiry {
                    return Err(ContractError::InvalidWindow);
                }
                let first = implications.first().ok_or(ContractError::EmptyImplications)?;
                if implications.last() != Some(destination) {
                    return Err(ContractError::DestinationMismatch(destination.clone()));
                }
                let mut seen = BTreeSet::new();
                for res in implications {
                    if !matches!(catalog.kind(res), Some(ResourceKind::Room | ResourceKind::Door)) {
                        return Err(ContractError::UnknownResource(res.clone()));
                    }
                    if !seen.insert(res) {
                        return Err(ContractError::DuplicateResource(res.clone()));
                    }
                }
                if !catalog.is_entrance_door(first) {
                    return Err(ContractError::NotAnEntrance(first.clone()));
                }
                if let Some(overlap) = exclusions.iter().find(|x| seen.contains(x)) {
                    return Err(ContractError::ExclusionOverlap(overlap.clone()));
                }
                let id = rule_id(sender, target, destination, *start, *expiry, implications);
                if let Some(existing) = self.archives.rules.get(&id) {
                    return Err(if existing.valid {
                        ContractError::DuplicateRule(id)
                    } else {
                        ContractError::RuleRevokedPermanently(id)
                    });
                }
                let candidate = AccessRule {
                    rule_id: id,
                    source: *sender,
                    target: *target,
                    start: *start,
                    expiry: *expiry,
                    destination: destination.clone(),
                    implications: implications.clone(),
                    exclusions: exclusions.clone(),
                    order_enforced: *order_enforced,
                    valid: true,
                };
                if let Some(authority) = self.authority_of(catalog, sender, now) {
                    let wanted = Self::grants_of(catalog, &candidate, &target_entity.permissions);
                    if let Some((resource, action)) = wanted.difference(&authority).next() {
                        return Err(ContractError::NoAuthority {
                            resource: resource.clone(),
                            action: *action,
                        });
                    }
                }
                self.archives.rules.insert(
                    id,
                    RuleRecord {
                        source: *sender,
                        target: *target,
                        start: *start,
                        expiry: *expiry,
                        destination: destination.clone(),
                        order_enforced: *order_enforced,
                        valid: true,
                    },
                );
                self.implications.lists.insert(id, implications.clone());
                self.exclusions.sets.insert(id, exclusions.clone());
                Ok(CallOutcome::RuleCreated { rule_id: id })
            }
            ContractCall::RevokeRule { rule_id } => {
                let rule = self
                    .archives
                    .rules
                    .get_mut(rule_id)
                    .ok_or(ContractError::UnknownRule(*rule_id))?;
                if rule.source != *sender {
                    return Err(ContractError::NotAuthorized);
                }
                if !rule.valid {
                    return Err(ContractError::AlreadyInvalid);
                }
                rule.valid = false;
                Ok(CallOutcome::RuleRevoked { rule_id: *rule_id })
            }
            ContractCall::RevokeEntity { address } => {
                if !self.is_root(sender) || !self.entity(sender).is_some_and(|e| e.valid) {
                    return Err(ContractError::NotAuthorized);
                }
                let entity = self
                    .archives
                    .entities
                    .get_mut(address)
                    .ok_or(ContractError::UnknownEntity(*address))?;
                if !entity.valid {
                    return Err(ContractError::AlreadyInvalid);
                }
                entity.valid = false;
                Ok(CallOutcome::EntityRevoked { address: *address })
            }
        }
    }
}

/// Progress of each rule's holder along its implications. Lives beside the
/// contract state, not inside it.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointerStore {
    pointers: BTreeMap<RuleId, usize>,
}

impl PointerStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, rule: &RuleId) -> usize {
        self.pointers.get(rule).copied().unwrap_or(0)
    }

    /// Moves the pointer forward; it never decreases.
    pub fn advance(&mut self, rule: &RuleId, to: usize) {
        let p = self.pointers.entry(*rule).or_insert(0);
        *p = (*p).max(to);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DenyReason {
    Unknown,
    NotHolder,
    EntityRevoked,
    RuleRevoked,
    NotYetValid,
    Expired,
    Excluded,
    OutOfOrder,
    Permission,
    NotGranted,
}

impl fmt::Display for DenyReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("serializes");
        f.write_str(s.as_str().unwrap_or("unknown"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "decision", rename_all = "lowercase")]
pub enum Decision {
    /// `advance_to` is the new pointer when an in-order door was opened.
    Allow { advance_to: Option<usize> },
    Deny { reason: DenyReason },
}

impl Decision {
    pub fn is_allow(&self) -> bool {
        matches!(self, Decision::Allow { .. })
    }

    fn deny(reason: DenyReason) -> Self {
        Decision::Deny { reason }
    }
}

/// Index of the door the holder must open next, or `len` when none remain.
fn expected_index(catalog: &ResourceCatalog, implications: &[Iri], pointer: usize) -> usize {
    (pointer..implications.len())
        .find(|&i| catalog.is_door(&implications[i]))
        .unwrap_or(implications.len())
}

/// Decides an access request. Pure: never mutates contract state or pointers.
#[allow(clippy::too_many_arguments)]
pub fn verify_access(
    state: &ContractState,
    catalog: &ResourceCatalog,
    pointers: &PointerStore,
    target: &Address,
    rule_id: &RuleId,
    resource: &Iri,
    action: Action,
    now: SimTime,
) -> Decision {
    let (Some(entity), Some(rule)) = (state.entity(target), state.rule(rule_id)) else {
        return Decision::deny(DenyReason::Unknown);
    };
    if rule.target != *target {
        return Decision::deny(DenyReason::NotHolder);
    }
    if !entity.valid {
        return Decision::deny(DenyReason::EntityRevoked);
    }
    if now < entity.start {
        return Decision::deny(DenyReason::NotYetValid);
    }
    if entity.expiry.is_some_and(|e| now > e) {
        return Decision::deny(DenyReason::Expired);
    }
    if !rule.valid {
        return Decision::deny(DenyReason::RuleRevoked);
    }
    if now < rule.start {
        return Decision::deny(DenyReason::NotYetValid);
    }
    if now > rule.expiry {
        return Decision::deny(DenyReason::Expired);
    }
    if rule.exclusions.contains(resource) {
        return Decision::deny(DenyReason::Excluded);
    }
    if let Some(index) = rule.implications.iter().position(|r| r == resource) {
        if action != Action::Open {
            return Decision::deny(DenyReason::Permission);
        }
        if !rule.order_enforced {
            return Decision::Allow { advance_to: None };
        }
        let pointer = pointers.get(rule_id);
        let expected = expected_index(catalog, &rule.implications, pointer);
        if index == expected {
            let next = expected_index(catalog, &rule.implications, index + 1);
            return Decision::Allow { advance_to: Some(next) };
        }
        // rooms already entered (before the next door) stay accessible
        if !catalog.is_door(resource) && index < expected {
            return Decision::Allow { advance_to: None };
        }
        return Decision::deny(DenyReason::OutOfOrder);
    }
    if catalog.related(&rule.destination).contains(resource) {
        return match action.required_permission() {
            Some(p) if entity.permissions.contains(&p) => Decision::Allow { advance_to: None },
            _ => Decision::deny(DenyReason::Permission),
        };
    }
    Decision::deny(DenyReason::NotGranted)
}
