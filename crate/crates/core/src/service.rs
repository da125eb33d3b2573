//! The access-control JSON API: plan, add entity, add rule, verify, revoke.
//!
//! Every endpoint is a method on [`AccessService`] and also reachable through
//! [`AccessService::handle`] with an [`ApiRequest`]; `serve` in [`http`] puts
//! the same handler behind HTTP. State-changing calls are dry-run against the
//! mined state plus pending transactions before submission so contract
//! rejections surface immediately.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::building::AlignedBuilding;
use crate::contracts::{
    self, verify_access, Action, Address, CallOutcome, ContractCall, ContractError, ContractState, Decision,
    DenyReason, Permission, PointerStore, ResourceCatalog, RuleId,
};
use crate::ledger::{LedgerConfig, LedgerError, LedgerNetwork, Receipt, TxId, TxStatus};
use crate::planner::{enumerate_paths, rank_paths, PlanOptions, RankedPath};
use crate::rdf::Iri;
use crate::sensitivity::WeightTable;
use crate::time::SimTime;

pub mod http;

#[derive(Debug, Error)]
pub enum KeyringError {
    #[error("keyring: {0}")]
    Parse(String),
    #[error("keyring lists {0} twice")]
    Duplicate(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Account {
    pub name: String,
    /// Defaults to the address derived from `name`.
    #[serde(default)]
    pub address: Option<Address>,
    pub token: String,
    /// Genesis building manager.
    #[serde(default)]
    pub root: bool,
}

/// Static sender authentication: a request's `sender` must name an account
/// and carry its token.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Keyring {
    pub accounts: Vec<Account>,
}

impl Keyring {
    pub fn from_json(text: &str) -> Result<Self, KeyringError> {
        let k: Keyring = serde_json::from_str(text).map_err(|e| KeyringError::Parse(e.to_string()))?;
        let mut names = BTreeSet::new();
        for a in &k.accounts {
            if !names.insert(&a.name) {
                return Err(KeyringError::Duplicate(a.name.clone()));
            }
        }
        Ok(k)
    }

    pub fn address_of(account: &Account) -> Address {
        account.address.unwrap_or_else(|| Address::from_label(&account.name))
    }

    pub fn find(&self, name_or_address: &str) -> Option<&Account> {
        self.accounts
            .iter()
            .find(|a| a.name == name_or_address || Self::address_of(a).to_hex() == name_or_address)
    }

    pub fn roots(&self) -> Vec<Address> {
        self.accounts.iter().filter(|a| a.root).map(Self::address_of).collect()
    }

    pub fn addresses(&self) -> Vec<Address> {
        self.accounts.iter().map(Self::address_of).collect()
    }
}

/// 64 hex digits, a keyring account name, or any other label (hashed).
pub fn resolve_address(keyring: &Keyring, s: &str) -> Address {
    if let Ok(a) = s.parse::<Address>() {
        return a;
    }
    match keyring.find(s) {
        Some(acc) => Keyring::address_of(acc),
        None => Address::from_label(s),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanRequest {
    pub from: String,
    pub to: String,
    #[serde(default)]
    pub max_paths: Option<usize>,
    #[serde(default)]
    pub max_depth: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntityRequest {
    pub delegator: String,
    pub token: String,
    pub delegate: String,
    pub start: SimTime,
    #[serde(default)]
    pub expiry: Option<SimTime>,
    pub permissions: BTreeSet<Permission>,
    /// Visitor flow: expiry is mandatory.
    #[serde(default = "yes")]
    pub visitor: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleRequest {
    pub delegator: String,
    pub token: String,
    pub delegate: String,
    pub path_id: String,
    #[serde(default)]
    pub exclusions: Vec<String>,
    pub start: SimTime,
    pub expiry: SimTime,
    /// Defaults to true (visitors); occupants get false.
    #[serde(default)]
    pub order_enforced: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyRequest {
    pub delegate: String,
    pub rule_id: RuleId,
    pub resource: String,
    pub action: Action,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RevokeRequest {
    pub caller: String,
    pub token: String,
    #[serde(default)]
    pub rule_id: Option<RuleId>,
    #[serde(default)]
    pub address: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClockRequest {
    pub until: SimTime,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "endpoint", content = "body", rename_all = "lowercase")]
pub enum ApiRequest {
    Plan(PlanRequest),
    Entities(EntityRequest),
    Rules(RuleRequest),
    Verify(VerifyRequest),
    Revoke(RevokeRequest),
    Clock(ClockRequest),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    OkExisting,
    Denied,
    Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorKind {
    BadRequest,
    Unauthorized,
    StalePath,
    Contract,
    Ledger,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiError {
    pub kind: ErrorKind,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contract: Option<ContractError>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoomBreakdown {
    pub room: String,
    pub zone: String,
    pub sensitivity: f64,
    pub point_cost: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannedPath {
    pub rank: usize,
    pub path_id: String,
    pub sequence: Vec<String>,
    pub rooms: usize,
    pub total_cost: f64,
    pub per_room: Vec<RoomBreakdown>,
    pub zone_order_warning: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiResponse {
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tx_id: Option<TxId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule_id: Option<RuleId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub address: Option<Address>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decision: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<DenyReason>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paths: Option<Vec<PlannedPath>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncated: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ApiError>,
}

impl ApiResponse {
    fn empty(status: Status) -> Self {
        Self {
            status,
            tx_id: None,
            rule_id: None,
            address: None,
            decision: None,
            reason: None,
            paths: None,
            truncated: None,
            error: None,
        }
    }

    pub fn error(kind: ErrorKind, message: impl Into<String>) -> Self {
        Self {
            error: Some(ApiError {
                kind,
                message: message.into(),
                contract: None,
            }),
            ..Self::empty(Status::Error)
        }
    }

    fn contract(err: ContractError) -> Self {
        Self {
            error: Some(ApiError {
                kind: ErrorKind::Contract,
                message: err.to_string(),
                contract: Some(err),
            }),
            ..Self::empty(Status::Error)
        }
    }

    fn submitted(receipt: Receipt) -> Self {
        Self {
            tx_id: Some(receipt.tx_id),
            ..Self::empty(Status::Ok)
        }
    }

    pub fn is_ok(&self) -> bool {
        matches!(self.status, Status::Ok | Status::OkExisting)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyLogRecord {
    pub at: SimTime,
    pub delegate: Address,
    pub rule_id: RuleId,
    pub resource: String,
    pub action: Action,
    pub decision: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<DenyReason>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceConfig {
    /// Rules become active this many seconds before the requested start.
    pub lead_seconds: f64,
    pub max_paths: usize,
    pub max_depth: usize,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            lead_seconds: 30.0 * 60.0,
            max_paths: 64,
            max_depth: 32,
        }
    }
}

pub struct AccessService {
    building: AlignedBuilding,
    weights: WeightTable,
    entrance: Iri,
    keyring: Keyring,
    config: ServiceConfig,
    ledger: LedgerNetwork,
    pointers: PointerStore,
    paths: BTreeMap<String, RankedPath>,
    verify_log: Vec<VerifyLogRecord>,
}

impl AccessService {
    /// Builds the service and a ledger whose genesis roots are the keyring's
    /// root accounts; every keyring account may submit.
    pub fn new(
        building: AlignedBuilding,
        weights: WeightTable,
        entrance: Iri,
        keyring: Keyring,
        ledger_config: LedgerConfig,
        config: ServiceConfig,
    ) -> Self {
        let catalog = ResourceCatalog::from_building(&building, &entrance);
        let mut ledger = LedgerNetwork::new(ledger_config, catalog, keyring.roots());
        for a in keyring.addresses() {
            ledger.register(a);
        }
        Self {
            building,
            weights,
            entrance,
            keyring,
            config,
            ledger,
            pointers: PointerStore::new(),
            paths: BTreeMap::new(),
            verify_log: Vec::new(),
        }
    }

    pub fn building(&self) -> &AlignedBuilding {
        &self.building
    }

    pub fn weights(&self) -> &WeightTable {
        &self.weights
    }

    pub fn entrance(&self) -> &Iri {
        &self.entrance
    }

    pub fn keyring(&self) -> &Keyring {
        &self.keyring
    }

    pub fn ledger(&self) -> &LedgerNetwork {
        &self.ledger
    }

    pub fn ledger_mut(&mut self) -> &mut LedgerNetwork {
        &mut self.ledger
    }

    pub fn pointers(&self) -> &PointerStore {
        &self.pointers
    }

    pub fn now(&self) -> SimTime {
        self.ledger.now()
    }

    pub fn address(&self, s: &str) -> Address {
        resolve_address(&self.keyring, s)
    }

    pub fn cached_path(&self, id: &str) -> Option<&RankedPath> {
        self.paths.get(id)
    }

    pub fn verify_log(&self) -> &[VerifyLogRecord] {
        &self.verify_log
    }

    pub fn write_verify_log(&self, mut out: impl Write) -> std::io::Result<()> {
        for r in &self.verify_log {
            serde_json::to_writer(&mut out, r)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    /// Moves simulated time forward, mining due blocks.
    pub fn advance(&mut self, until: SimTime) -> Result<(), LedgerError> {
        self.ledger.advance(until).map(|_| ())
    }

    /// Advances block by block until `tx` is mined; returns its final status.
    pub fn settle(&mut self, tx: &TxId) -> Result<TxStatus, LedgerError> {
        let limit = self.now() + SimTime::from_hours(24.0);
        self.ledger.advance_until_mined(tx, limit)?;
        Ok(self
            .ledger
            .transaction(tx)
            .map(|t| t.status.clone())
            .unwrap_or(TxStatus::Pending))
    }

    pub fn handle(&mut self, request: ApiRequest) -> ApiResponse {
        match request {
            ApiRequest::Plan(r) => self.plan(&r),
            ApiRequest::Entities(r) => self.add_entity(&r),
            ApiRequest::Rules(r) => self.add_rule(&r),
            ApiRequest::Verify(r) => self.verify(&r),
            ApiRequest::Revoke(r) => self.revoke(&r),
            ApiRequest::Clock(r) => match self.advance(r.until) {
                Ok(()) => ApiResponse::empty(Status::Ok),
                Err(e) => ApiResponse::error(ErrorKind::BadRequest, e.to_string()),
            },
        }
    }

    pub fn handle_json(&mut self, request: &str) -> String {
        let response = match serde_json::from_str::<ApiRequest>(request) {
            Ok(r) => self.handle(r),
            Err(e) => ApiResponse::error(ErrorKind::BadRequest, e.to_string()),
        };
        serde_json::to_string(&response).expect("responses serialize")
    }

    fn resource(&self, name: &str) -> Option<Iri> {
        self.building.lookup(name).or_else(|| Iri::new(name).ok())
    }

    fn authenticate(&self, sender: &str, token: &str) -> Result<Address, ApiResponse> {
        match self.keyring.find(sender) {
            Some(acc) if acc.token == token => Ok(Keyring::address_of(acc)),
            _ => Err(ApiResponse::error(
                ErrorKind::Unauthorized,
                format!("sender {sender:?} is not authenticated"),
            )),
        }
    }

    /// Mined state with all pending transactions applied in order.
    fn projected_state(&self) -> ContractState {
        let mut state = self.ledger.read_state().clone();
        let now = self.now();
        for tx in self.ledger.transactions().iter().filter(|t| t.mined_at.is_none()) {
            let _ = state.apply(self.ledger.catalog(), &tx.sender, &tx.payload, now);
        }
        state
    }

    fn dry_run_and_submit(&mut self, sender: Address, call: ContractCall) -> Result<(Receipt, CallOutcome), ApiResponse> {
        let mut projected = self.projected_state();
        let outcome = projected
            .apply(self.ledger.catalog(), &sender, &call, self.now())
            .map_err(ApiResponse::contract)?;
        let receipt = self
            .ledger
            .submit(sender, call)
            .map_err(|e| ApiResponse::error(ErrorKind::Ledger, e.to_string()))?;
        Ok((receipt, outcome))
    }

    pub fn plan(&mut self, req: &PlanRequest) -> ApiResponse {
        let (Some(from), Some(to)) = (self.building.lookup(&req.from), self.building.lookup(&req.to)) else {
            return ApiResponse::error(ErrorKind::BadRequest, "unknown origin or destination");
        };
        let opts = PlanOptions {
            max_paths: req.max_paths.unwrap_or(self.config.max_paths),
            max_depth: req.max_depth.unwrap_or(self.config.max_depth),
        };
        let set = match enumerate_paths(&self.building, &from, &to, opts) {
            Ok(s) => s,
            Err(e) => return ApiResponse::error(ErrorKind::BadRequest, e.to_string()),
        };
        let ranked = match rank_paths(&set.paths, &self.weights, &self.building) {
            Ok(r) => r,
            Err(e) => return ApiResponse::error(ErrorKind::BadRequest, e.to_string()),
        };
        let mut views = Vec::with_capacity(ranked.len());
        for (i, r) in ranked.into_iter().enumerate() {
            views.push(self.view(i + 1, &r));
            self.paths.insert(r.id.clone(), r);
        }
        ApiResponse {
            paths: Some(views),
            truncated: Some(!set.is_complete()),
            ..ApiResponse::empty(Status::Ok)
        }
    }

    fn view(&self, rank: usize, r: &RankedPath) -> PlannedPath {
        PlannedPath {
            rank,
            path_id: r.id.clone(),
            sequence: r.path.sequence().iter().map(|i| self.building.short(i)).collect(),
            rooms: r.path.room_count(),
            total_cost: r.cost.total,
            per_room: r
                .cost
                .per_room
                .iter()
                .map(|rc| RoomBreakdown {
                    room: self.building.short(&rc.room),
                    zone: rc.zone.name().to_owned(),
                    sensitivity: rc.sensitivity,
                    point_cost: rc.point_cost,
                    total: rc.total(),
                })
                .collect(),
            zone_order_warning: r.zone_order_warning,
        }
    }

    pub fn add_entity(&mut self, req: &EntityRequest) -> ApiResponse {
        let sender = match self.authenticate(&req.delegator, &req.token) {
            Ok(a) => a,
            Err(resp) => return resp,
        };
        if req.visitor && req.expiry.is_none() {
            return ApiResponse::error(ErrorKind::BadRequest, "the expiry time must be provided for visitors");
        }
        let delegate = self.address(&req.delegate);
        // pending creations count too, or a second invite would be reverted
        if self.projected_state().entity(&delegate).is_some_and(|e| e.valid) {
            return ApiResponse {
                address: Some(delegate),
                ..ApiResponse::empty(Status::OkExisting)
            };
        }
        let call = ContractCall::CreateEntity {
            address: delegate,
            start: req.start,
            expiry: req.expiry,
            permissions: req.permissions.clone(),
        };
        match self.dry_run_and_submit(sender, call) {
            Ok((receipt, _)) => ApiResponse {
                address: Some(delegate),
                ..ApiResponse::submitted(receipt)
            },
            Err(resp) => resp,
        }
    }

    pub fn add_rule(&mut self, req: &RuleRequest) -> ApiResponse {
        let sender = match self.authenticate(&req.delegator, &req.token) {
            Ok(a) => a,
            Err(resp) => return resp,
        };
        let Some(path) = self.paths.get(&req.path_id) else {
            return ApiResponse::error(ErrorKind::StalePath, format!("no planned path {:?}", req.path_id));
        };
        // the origin is where the visitor stands; access starts at its first door
        let implications: Vec<Iri> = path.path.sequence()[1..].to_vec();
        let destination = path.path.destination().clone();
        let mut exclusions = BTreeSet::new();
        for name in &req.exclusions {
            match self.resource(name) {
                Some(iri) => {
                    exclusions.insert(iri);
                }
                None => return ApiResponse::error(ErrorKind::BadRequest, format!("unknown resource {name:?}")),
            }
        }
        let start = req.start.saturating_sub(SimTime::from_secs(self.config.lead_seconds));
        let delegate = self.address(&req.delegate);
        let call = ContractCall::CreateAccessRule {
            target: delegate,
            destination: destination.clone(),
            implications: implications.clone(),
            exclusions,
            start,
            expiry: req.expiry,
            order_enforced: req.order_enforced.unwrap_or(true),
        };
        let id = contracts::rule_id(&sender, &delegate, &destination, start, req.expiry, &implications);
        match self.dry_run_and_submit(sender, call) {
            Ok((receipt, _)) => ApiResponse {
                rule_id: Some(id),
                ..ApiResponse::submitted(receipt)
            },
            Err(resp) => resp,
        }
    }

    pub fn verify(&mut self, req: &VerifyRequest) -> ApiResponse {
        let delegate = self.address(&req.delegate);
        let now = self.now();
        let decision = match self.resource(&req.resource) {
            Some(resource) => verify_access(
                self.ledger.read_state(),
                self.ledger.catalog(),
                &self.pointers,
                &delegate,
                &req.rule_id,
                &resource,
                req.action,
                now,
            ),
            None => Decision::Deny {
                reason: DenyReason::NotGranted,
            },
        };
        if let Decision::Allow { advance_to: Some(p) } = decision {
            self.pointers.advance(&req.rule_id, p);
        }
        let (status, word, reason) = match decision {
            Decision::Allow { .. } => (Status::Ok, "allow", None),
            Decision::Deny { reason } => (Status::Denied, "deny", Some(reason)),
        };
        self.verify_log.push(VerifyLogRecord {
            at: now,
            delegate,
            rule_id: req.rule_id,
            resource: req.resource.clone(),
            action: req.action,
            decision: word.to_owned(),
            reason,
        });
        ApiResponse {
            decision: Some(word.to_owned()),
            reason,
            ..ApiResponse::empty(status)
        }
    }

    pub fn revoke(&mut self, req: &RevokeRequest) -> ApiResponse {
        let sender = match self.authenticate(&req.caller, &req.token) {
            Ok(a) => a,
            Err(resp) => return resp,
        };
        let call = match (&req.rule_id, &req.address) {
            (Some(rule_id), None) => ContractCall::RevokeRule { rule_id: *rule_id },
            (None, Some(addr)) => ContractCall::RevokeEntity {
                address: self.address(addr),
            },
            _ => return ApiResponse::error(ErrorKind::BadRequest, "give exactly one of rule_id or address"),
        };
        match self.dry_run_and_submit(sender, call) {
            Ok((receipt, _)) => ApiResponse::submitted(receipt),
            Err(resp) => resp,
        }
    }
}
