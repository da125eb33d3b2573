//! A simulated single-chain ledger shared by N nodes.
//!
//! Submissions are assigned to nodes round-robin and wait in per-node FIFO
//! queues. Blocks arrive as a Poisson process; each block takes up to
//! `per_node_capacity * interval` transactions from every node queue, merges
//! them by submission order and applies them to the contract state. All
//! randomness comes from seeded ChaCha8 streams, so a run is a pure function
//! of its seed and inputs.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canon::Canon;
use crate::contracts::{
    AccessRule, Address, CallKind, CallOutcome, ContractCall, ContractError, ContractState, Entity, ResourceCatalog,
    RuleId,
};
use crate::time::SimTime;

#[derive(Debug, Error)]
pub enum LedgerError {
    #[error("sender {0} is not a registered account")]
    UnregisteredSender(Address),
    #[error("malformed payload: {0}")]
    MalformedPayload(String),
    #[error("cannot move time backwards from {now} to {until}")]
    TimeReversal { now: SimTime, until: SimTime },
    #[error("replay diverged at block {height}: {message}")]
    ReplayDiverged { height: u64, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Gas charged per call kind. Defaults reproduce 0.019 USD per entity and
/// 0.0044 USD per rule at the default gas price and ether rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GasSchedule {
    pub create_entity: u64,
    pub create_access_rule: u64,
    pub revoke_rule: u64,
    pub revoke_entity: u64,
}

impl Default for GasSchedule {
    fn default() -> Self {
        Self {
            create_entity: 6612,
            create_access_rule: 1531,
            revoke_rule: 1200,
            revoke_entity: 1200,
        }
    }
}

impl GasSchedule {
    pub fn gas_for(&self, kind: CallKind) -> u64 {
        match kind {
            CallKind::CreateEntity => self.create_entity,
            CallKind::CreateAccessRule => self.create_access_rule,
            CallKind::RevokeRule => self.revoke_rule,
            CallKind::RevokeEntity => self.revoke_entity,
        }
    }
}

/// When the submitter is told a transaction went through.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Confirmation {
    /// After the receiving node validates it (exponential delay).
    OnValidation,
    /// When the block containing it is mined.
    OnMining,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfirmationPolicy {
    pub create_entity: Confirmation,
    pub create_access_rule: Confirmation,
    pub revoke_rule: Confirmation,
    pub revoke_entity: Confirmation,
}

impl Default for ConfirmationPolicy {
    fn default() -> Self {
        Self {
            create_entity: Confirmation::OnValidation,
            create_access_rule: Confirmation::OnMining,
            revoke_rule: Confirmation::OnMining,
            revoke_entity: Confirmation::OnMining,
        }
    }
}

impl ConfirmationPolicy {
    pub fn for_kind(&self, kind: CallKind) -> Confirmation {
        match kind {
            CallKind::CreateEntity => self.create_entity,
            CallKind::CreateAccessRule => self.create_access_rule,
            CallKind::RevokeRule => self.revoke_rule,
            CallKind::RevokeEntity => self.revoke_entity,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LedgerConfig {
    pub nodes: usize,
    /// Mean seconds between blocks.
    pub block_interval_mean: f64,
    /// Transactions per second each node contributes to a block, and the
    /// read requests per second each node serves.
    pub per_node_capacity: f64,
    /// Ether per unit of gas.
    pub gas_price: f64,
    pub usd_per_ether: f64,
    /// Mean seconds for a node to validate a submission.
    pub validation_delay_mean: f64,
    pub seed: u64,
    pub gas: GasSchedule,
    pub confirmation: ConfirmationPolicy,
}

impl Default for LedgerConfig {
    fn default() -> Self {
        Self {
            nodes: 1,
            block_interval_mean: 13.0,
            per_node_capacity: 50.0,
            gas_price: 2e-8,
            usd_per_ether: 143.68,
            validation_delay_mean: 0.9,
            seed: 0,
            gas: GasSchedule::default(),
            confirmation: ConfirmationPolicy::default(),
        }
    }
}

pub fn fee_in_usd(gas_used: u64, gas_price_ether_per_gas: f64, usd_per_ether: f64) -> f64 {
    gas_used as f64 * gas_price_ether_per_gas * usd_per_ether
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TxId(pub [u8; 32]);

impl TxId {
    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }
}

impl std::fmt::Display for TxId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl std::fmt::Debug for TxId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TxId({}..)", &self.to_hex()[..12])
    }
}

impl Serialize for TxId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for TxId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let bytes = hex::decode(&s).map_err(serde::de::Error::custom)?;
        let arr: [u8; 32] = bytes
            .try_into()
            .map_err(|_| serde::de::Error::custom("tx id must be 32 bytes"))?;
        Ok(TxId(arr))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TxStatus {
    Pending,
    Applied { outcome: CallOutcome },
    Reverted { error: ContractError },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transaction {
    pub id: TxId,
    pub seq: u64,
    pub sender: Address,
    pub payload: ContractCall,
    pub gas_used: u64,
    pub submitted_at: SimTime,
    pub validated_at: SimTime,
    pub mined_at: Option<SimTime>,
    pub node: usize,
    pub status: TxStatus,
}

impl Transaction {
    pub fn kind(&self) -> CallKind {
        self.payload.kind()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub height: u64,
    #[serde(with = "hex32")]
    pub parent_hash: [u8; 32],
    pub timestamp: SimTime,
    pub transactions: Vec<TxId>,
    #[serde(with = "hex32")]
    pub state_root: [u8; 32],
    pub miner: usize,
    #[serde(with = "hex32")]
    pub hash: [u8; 32],
}

impl Block {
    fn compute_hash(&self) -> [u8; 32] {
        let mut c = Canon::new();
        c.u64(self.height)
            .bytes(&self.parent_hash)
            .u64(self.timestamp.as_micros())
            .list(self.transactions.iter(), |c, id| {
                c.bytes(&id.0);
            })
            .bytes(&self.state_root)
            .u64(self.miner as u64);
        c.digest()
    }
}

mod hex32 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[u8; 32], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[u8; 32], D::Error> {
        let s = String::deserialize(d)?;
        let bytes = hex::decode(&s).map_err(serde::de::Error::custom)?;
        bytes
            .try_into()
            .map_err(|_| serde::de::Error::custom("expected 32 bytes"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Receipt {
    pub tx_id: TxId,
    pub node: usize,
    pub seq: u64,
    pub submitted_at: SimTime,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum LedgerEvent {
    Submitted {
        tx: TxId,
        kind: CallKind,
        node: usize,
        at: SimTime,
    },
    Mined {
        tx: TxId,
        height: u64,
        at: SimTime,
        applied: bool,
        gas_used: u64,
    },
    Block {
        height: u64,
        #[serde(with = "hex32")]
        hash: [u8; 32],
        timestamp: SimTime,
        tx_count: usize,
        #[serde(with = "hex32")]
        state_root: [u8; 32],
    },
}

/// Everything needed to replay a chain from genesis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainExport {
    pub roots: Vec<Address>,
    pub blocks: Vec<Block>,
    pub transactions: Vec<Transaction>,
}

#[derive(Debug, Clone)]
pub struct LedgerNetwork {
    config: LedgerConfig,
    catalog: ResourceCatalog,
    roots: Vec<Address>,
    block_rng: ChaCha8Rng,
    validation_rng: ChaCha8Rng,
    block_gap: Exp<f64>,
    validation_gap: Option<Exp<f64>>,
    now: SimTime,
    next_block_at: SimTime,
    next_node: usize,
    next_seq: u64,
    pending: Vec<VecDeque<u64>>,
    txs: Vec<Transaction>,
    index: BTreeMap<TxId, u64>,
    blocks: Vec<Block>,
    state: ContractState,
    registered: BTreeSet<Address>,
    events: Vec<LedgerEvent>,
    mined_gas: u64,
}

impl LedgerNetwork {
    /// A network at time zero holding only the genesis block. Roots are
    /// registered accounts with full authority.
    pub fn new(config: LedgerConfig, catalog: ResourceCatalog, roots: impl IntoIterator<Item = Address>) -> Self {
        let roots: Vec<Address> = roots.into_iter().collect();
        let nodes = config.nodes.max(1);
        let mut block_rng = ChaCha8Rng::seed_from_u64(config.seed);
        block_rng.set_stream(1);
        let mut validation_rng = ChaCha8Rng::seed_from_u64(config.seed);
        validation_rng.set_stream(2);
        let block_gap = Exp::new(1.0 / config.block_interval_mean.max(1e-9)).expect("positive rate");
        let validation_gap = (config.validation_delay_mean > 0.0)
            .then(|| Exp::new(1.0 / config.validation_delay_mean).expect("positive rate"));
        let state = ContractState::genesis(roots.iter().copied());
        let mut genesis = Block {
            height: 0,
            parent_hash: [0; 32],
            timestamp: SimTime::ZERO,
            transactions: Vec::new(),
            state_root: state.state_root(),
            miner: 0,
            hash: [0; 32],
        };
        genesis.hash = genesis.compute_hash();
        let mut net = Self {
            config,
            catalog,
            registered: roots.iter().copied().collect(),
            roots,
            block_rng,
            validation_rng,
            block_gap,
            validation_gap,
            now: SimTime::ZERO,
            next_block_at: SimTime::ZERO,
            next_node: 0,
            next_seq: 0,
            pending: vec![VecDeque::new(); nodes],
            txs: Vec::new(),
            index: BTreeMap::new(),
            blocks: vec![genesis],
            state,
            events: Vec::new(),
            mined_gas: 0,
        };
        net.next_block_at = net.draw_block_gap();
        net
    }

    fn draw_block_gap(&mut self) -> SimTime {
        let gap = self.block_gap.sample(&mut self.block_rng);
        // at least one microsecond so time always moves forward
        self.now.max(self.last_block().timestamp) + SimTime::from_secs(gap).max(SimTime::from_micros(1))
    }

    pub fn config(&self) -> &LedgerConfig {
        &self.config
    }

    pub fn catalog(&self) -> &ResourceCatalog {
        &self.catalog
    }

    pub fn nodes(&self) -> usize {
        self.pending.len()
    }

    pub fn now(&self) -> SimTime {
        self.now
    }

    pub fn register(&mut self, account: Address) {
        self.registered.insert(account);
    }

    pub fn is_registered(&self, account: &Address) -> bool {
        self.registered.contains(account)
    }

    /// Queues a call from `sender` at the current time.
    pub fn submit(&mut self, sender: Address, payload: ContractCall) -> Result<Receipt, LedgerError> {
        if !self.is_registered(&sender) {
            return Err(LedgerError::UnregisteredSender(sender));
        }
        let seq = self.next_seq;
        self.next_seq += 1;
        let node = self.next_node;
        self.next_node = (self.next_node + 1) % self.pending.len();
        let json = payload.to_canonical_json();
        let id = TxId(
            Canon::new()
                .u64(seq)
                .bytes(&sender.0)
                .str(&json)
                .u64(self.now.as_micros())
                .digest(),
        );
        let validation = match &self.validation_gap {
            Some(exp) => SimTime::from_secs(exp.sample(&mut self.validation_rng)),
            None => SimTime::ZERO,
        };
        let kind = payload.kind();
        self.txs.push(Transaction {
            id,
            seq,
            sender,
            gas_used: self.config.gas.gas_for(kind),
            payload,
            submitted_at: self.now,
            validated_at: self.now + validation,
            mined_at: None,
            node,
            status: TxStatus::Pending,
        });
        self.index.insert(id, seq);
        self.pending[node].push_back(seq);
        self.events.push(LedgerEvent::Submitted {
            tx: id,
            kind,
            node,
            at: self.now,
        });
        Ok(Receipt {
            tx_id: id,
            node,
            seq,
            submitted_at: self.now,
        })
    }

    /// Parses a canonical JSON payload and submits it.
    pub fn submit_json(&mut self, sender: Address, payload: &str) -> Result<Receipt, LedgerError> {
        let call: ContractCall =
            serde_json::from_str(payload).map_err(|e| LedgerError::MalformedPayload(e.to_string()))?;
        self.submit(sender, call)
    }

    /// Mines every block due up to `until` and moves the clock there.
    pub fn advance(&mut self, until: SimTime) -> Result<Vec<Block>, LedgerError> {
        if until < self.now {
            return Err(LedgerError::TimeReversal { now: self.now, until });
        }
        let mut mined = Vec::new();
        while self.next_block_at <= until {
            let at = self.next_block_at;
            self.now = at;
            mined.push(self.mine_block(at));
            self.next_block_at = self.draw_block_gap();
        }
        self.now = until;
        Ok(mined)
    }

    /// Advances until `tx` is mined or `limit` is reached; returns whether it
    /// was mined.
    pub fn advance_until_mined(&mut self, tx: &TxId, limit: SimTime) -> Result<bool, LedgerError> {
        while self.transaction(tx).is_some_and(|t| t.mined_at.is_none()) {
            if self.next_block_at > limit {
                self.advance(limit)?;
                return Ok(false);
            }
            let at = self.next_block_at;
            self.advance(at)?;
        }
        Ok(self.transaction(tx).is_some_and(|t| t.mined_at.is_some()))
    }

    pub fn next_block_at(&self) -> SimTime {
        self.next_block_at
    }

    fn mine_block(&mut self, at: SimTime) -> Block {
        let prev = self.last_block().clone();
        let interval = (at - prev.timestamp).as_secs();
        let budget = (self.config.per_node_capacity * interval).floor().max(1.0) as usize;
        let mut chosen: Vec<u64> = Vec::new();
        for queue in &mut self.pending {
            for _ in 0..budget {
                match queue.front() {
                    Some(&seq) if self.txs[seq as usize].submitted_at <= at => {
                        chosen.push(seq);
                        queue.pop_front();
                    }
                    _ => break,
                }
            }
        }
        chosen.sort_unstable();
        let height = prev.height + 1;
        let miner = (height as usize - 1) % self.pending.len();
        let mut ids = Vec::with_capacity(chosen.len());
        for seq in chosen {
            let tx = &self.txs[seq as usize];
            let result = self.state.apply(&self.catalog, &tx.sender, &tx.payload, at);
            let tx = &mut self.txs[seq as usize];
            tx.mined_at = Some(at);
            let applied = result.is_ok();
            tx.status = match result {
                Ok(outcome) => TxStatus::Applied { outcome },
                Err(error) => TxStatus::Reverted { error },
            };
            self.mined_gas += tx.gas_used;
            ids.push(tx.id);
            self.events.push(LedgerEvent::Mined {
                tx: tx.id,
                height,
                at,
                applied,
                gas_used: tx.gas_used,
            });
        }
        let mut block = Block {
            height,
            parent_hash: prev.hash,
            timestamp: at,
            transactions: ids,
            state_root: self.state.state_root(),
            miner,
            hash: [0; 32],
        };
        block.hash = block.compute_hash();
        self.events.push(LedgerEvent::Block {
            height,
            hash: block.hash,
            timestamp: at,
            tx_count: block.transactions.len(),
            state_root: block.state_root,
        });
        self.blocks.push(block.clone());
        block
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn last_block(&self) -> &Block {
        self.blocks.last().expect("genesis block always present")
    }

    pub fn transactions(&self) -> &[Transaction] {
        &self.txs
    }

    pub fn transaction(&self, id: &TxId) -> Option<&Transaction> {
        self.index.get(id).map(|&seq| &self.txs[seq as usize])
    }

    pub fn pending_count(&self) -> usize {
        self.pending.iter().map(VecDeque::len).sum()
    }

    pub fn pending_per_node(&self) -> Vec<usize> {
        self.pending.iter().map(VecDeque::len).collect()
    }

    /// The mined contract state. Reading it costs nothing.
    pub fn read_state(&self) -> &ContractState {
        &self.state
    }

    pub fn read_entity(&self, address: &Address) -> Option<&Entity> {
        self.state.entity(address)
    }

    pub fn read_rule(&self, id: &RuleId) -> Option<AccessRule> {
        self.state.rule(id)
    }

    /// Gas of all mined transactions.
    pub fn total_gas(&self) -> u64 {
        self.mined_gas
    }

    /// When the submitter learns the outcome, per the confirmation policy.
    pub fn acknowledged_at(&self, id: &TxId) -> Option<SimTime> {
        let tx = self.transaction(id)?;
        match self.config.confirmation.for_kind(tx.kind()) {
            Confirmation::OnValidation => Some(tx.validated_at),
            Confirmation::OnMining => tx.mined_at,
        }
    }

    pub fn fee_usd(&self, tx: &Transaction) -> f64 {
        fee_in_usd(tx.gas_used, self.config.gas_price, self.config.usd_per_ether)
    }

    pub fn events(&self) -> &[LedgerEvent] {
        &self.events
    }

    pub fn write_event_log(&self, mut out: impl Write) -> Result<(), LedgerError> {
        for event in &self.events {
            serde_json::to_writer(&mut out, event).map_err(std::io::Error::from)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn export(&self) -> ChainExport {
        ChainExport {
            roots: self.roots.clone(),
            blocks: self.blocks.clone(),
            transactions: self.txs.clone(),
        }
    }

    /// Replays this network's own chain from genesis.
    pub fn verify_replay(&self) -> Result<ContractState, LedgerError> {
        replay(&self.export(), &self.catalog)
    }
}

/// Rebuilds the contract state block by block, checking hashes, parent links
/// and every state root.
pub fn replay(chain: &ChainExport, catalog: &ResourceCatalog) -> Result<ContractState, LedgerError> {
    let by_id: BTreeMap<TxId, &Transaction> = chain.transactions.iter().map(|t| (t.id, t)).collect();
    let mut state = ContractState::genesis(chain.roots.iter().copied());
    let mut parent: Option<&Block> = None;
    for block in &chain.blocks {
        let fail = |message: String| LedgerError::ReplayDiverged {
            height: block.height,
            message,
        };
        match parent {
            None if block.height != 0 => return Err(fail("chain does not start at genesis".into())),
            Some(p) if block.height != p.height + 1 => return Err(fail("height gap".into())),
            Some(p) if block.parent_hash != p.hash => return Err(fail("parent hash mismatch".into())),
            _ => {}
        }
        if block.compute_hash() != block.hash {
            return Err(fail("block hash mismatch".into()));
        }
        for id in &block.transactions {
            let tx = by_id.get(id).ok_or_else(|| fail(format!("missing transaction {id}")))?;
            let result = state.apply(catalog, &tx.sender, &tx.payload, block.timestamp);
            let recorded_ok = matches!(tx.status, TxStatus::Applied { .. });
            if result.is_ok() != recorded_ok {
                return Err(fail(format!("transaction {id} outcome differs")));
            }
        }
        if state.state_root() != block.state_root {
            return Err(fail("state root mismatch".into()));
        }
        parent = Some(block);
    }
    Ok(state)
}
