//! Meeting-day workload simulation and the node-scaling study.
//!
//! A day is a per-room Poisson schedule of meetings. Every participant is
//! invited (entity + rule through the access service), arrives inside the
//! window before the meeting, opens each door on the host's chosen path, and
//! leaves inside the window after it. Everything runs in one discrete-event
//! loop over simulated time, so a seed fixes every output byte.

use std::fmt;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::contracts::{Action, CallKind, Permission, RuleId};
use crate::dataset;
use crate::ledger::{LedgerConfig, LedgerError, TxId};
use crate::service::{AccessService, EntityRequest, PlanRequest, RuleRequest, Status, VerifyRequest};
use crate::time::SimTime;

const SCHEDULE_STREAM: u64 = 3;
const PEOPLE_STREAM: u64 = 4;
const SCALING_STREAM: u64 = 5;

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Ledger(#[from] LedgerError),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("host could not plan a path to {0}")]
    NoPath(String),
    #[error("unknown day profile {0:?}")]
    UnknownProfile(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DayKind {
    Busy,
    Average,
    Quiet,
}

impl DayKind {
    pub const ALL: [DayKind; 3] = [DayKind::Busy, DayKind::Average, DayKind::Quiet];

    pub fn name(self) -> &'static str {
        match self {
            DayKind::Busy => "busy",
            DayKind::Average => "average",
            DayKind::Quiet => "quiet",
        }
    }
}

impl fmt::Display for DayKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DayKind {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, SimError> {
        match s {
            "busy" => Ok(DayKind::Busy),
            "average" => Ok(DayKind::Average),
            "quiet" => Ok(DayKind::Quiet),
            _ => Err(SimError::UnknownProfile(s.to_owned())),
        }
    }
}

/// The five conference rooms of the example building.
pub fn conference_rooms() -> Vec<String> {
    ["Room-1-1-144", "Room-1-1-121", "Room-1-1-104", "Room-1-1-106", "Room-1-1-130"]
        .map(String::from)
        .to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DayProfile {
    pub kind: DayKind,
    pub rooms: Vec<String>,
    /// Poisson rate of meeting starts while a room is free.
    pub meetings_per_hour: f64,
    /// Participants per meeting, uniform over the inclusive range.
    pub participants_min: u32,
    pub participants_max: u32,
    /// Meetings start between these hours of the day.
    pub first_start_hour: f64,
    pub last_start_hour: f64,
    pub duration_min_minutes: f64,
    pub duration_max_minutes: f64,
    /// Arrivals and departures fall inside this window around a meeting.
    pub window_minutes: f64,
    /// Chance that a seat goes to someone already seen that day.
    pub returning_fraction: f64,
}

impl DayProfile {
    /// Calibrated defaults. Rates and head counts are not published; these
    /// were tuned so mean peak occupancy lands near 70 (busy, average) and
    /// 30 (quiet) over seeds 0..5.
    pub fn preset(kind: DayKind) -> Self {
        let (meetings_per_hour, participants_min, participants_max) = match kind {
            DayKind::Busy => (1.5, 6, 16),
            DayKind::Average => (0.6, 8, 20),
            DayKind::Quiet => (0.5, 3, 9),
        };
        Self {
            kind,
            rooms: conference_rooms(),
            meetings_per_hour,
            participants_min,
            participants_max,
            first_start_hour: 8.0,
            last_start_hour: 17.0,
            duration_min_minutes: 60.0,
            duration_max_minutes: 150.0,
            window_minutes: 30.0,
            returning_fraction: 0.15,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meeting {
    pub id: usize,
    pub room: String,
    pub start: SimTime,
    pub duration: SimTime,
    pub participants: u32,
}

impl Meeting {
    pub fn end(&self) -> SimTime {
        self.start + self.duration
    }
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        lo
    } else {
        rng.random_range(lo..hi)
    }
}

/// Per room: idle gaps are exponential at `meetings_per_hour`, then a meeting
/// of uniform duration occupies the room.
pub fn generate_schedule(profile: &DayProfile, seed: u64) -> Vec<Meeting> {
    let mut meetings = Vec::new();
    if profile.meetings_per_hour <= 0.0 {
        return meetings;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(SCHEDULE_STREAM);
    let gap = Exp::new(profile.meetings_per_hour).expect("positive rate");
    let last = profile.last_start_hour;
    for room in &profile.rooms {
        let mut t = profile.first_start_hour;
        loop {
            t += gap.sample(&mut rng);
            if t > last {
                break;
            }
            let minutes = uniform(&mut rng, profile.duration_min_minutes, profile.duration_max_minutes);
            let participants = rng.random_range(profile.participants_min..=profile.participants_max.max(profile.participants_min));
            let start = SimTime::from_hours(t);
            let duration = SimTime::from_minutes(minutes);
            meetings.push(Meeting {
                id: 0,
                room: room.clone(),
                start,
                duration,
                participants,
            });
            t = (start + duration).as_secs() / 3600.0;
        }
    }
    meetings.sort_by(|a, b| a.start.cmp(&b.start).then_with(|| a.room.cmp(&b.room)));
    for (i, m) in meetings.iter_mut().enumerate() {
        m.id = i;
    }
    meetings
}

/// FIFO single-server queues with deterministic service time, requests
/// spread round-robin across nodes.
#[derive(Debug, Clone)]
pub struct NodePool {
    service: SimTime,
    free_at: Vec<SimTime>,
    next: usize,
}

impl NodePool {
    pub fn new(nodes: usize, per_node_capacity: f64) -> Self {
        Self {
            service: SimTime::from_secs(1.0 / per_node_capacity),
            free_at: vec![SimTime::ZERO; nodes.max(1)],
            next: 0,
        }
    }

    pub fn nodes(&self) -> usize {
        self.free_at.len()
    }

    pub fn service_time(&self) -> SimTime {
        self.service
    }

    /// Enqueues a request arriving at `at`; returns its completion time.
    /// Arrivals must be offered in time order.
    pub fn submit(&mut self, at: SimTime) -> SimTime {
        let node = self.next;
        self.next = (self.next + 1) % self.free_at.len();
        let done = at.max(self.free_at[node]) + self.service;
        self.free_at[node] = done;
        done
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorkloadConfig {
    /// Hosts book this many minutes before the meeting (uniform range).
    pub booking_min_minutes: f64,
    pub booking_max_minutes: f64,
    /// Mean seconds between a host's successive invitations.
    pub invite_spacing_secs: f64,
    /// Seconds to walk from one door to the next (uniform range).
    pub door_walk_min_secs: f64,
    pub door_walk_max_secs: f64,
    /// Visitor entities expire at this hour.
    pub entity_expiry_hour: f64,
}

impl Default for WorkloadConfig {
    fn default() -> Self {
        Self {
            booking_min_minutes: 60.0,
            booking_max_minutes: 120.0,
            invite_spacing_secs: 5.0,
            door_walk_min_secs: 20.0,
            door_walk_max_secs: 60.0,
            entity_expiry_hour: 23.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum EventKind {
    Book { meeting: usize },
    Invite { seat: usize },
    Door { seat: usize, door: usize },
}

#[derive(Debug, Clone)]
struct Seat {
    meeting: usize,
    person: usize,
    arrival: SimTime,
    departure: SimTime,
}

/// One participant's presence in the building.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presence {
    pub arrival: SimTime,
    pub departure: SimTime,
}

/// Step function of people present: `(time, count from then on)`.
pub fn occupancy_curve(presence: &[Presence]) -> Vec<(SimTime, u32)> {
    let mut changes: Vec<(SimTime, i64)> = Vec::with_capacity(presence.len() * 2);
    for p in presence {
        changes.push((p.arrival, 1));
        changes.push((p.departure, -1));
    }
    changes.sort();
    let mut curve: Vec<(SimTime, u32)> = Vec::new();
    let mut count: i64 = 0;
    for (t, d) in changes {
        count += d;
        match curve.last_mut() {
            Some(last) if last.0 == t => last.1 = count as u32,
            _ => curve.push((t, count as u32)),
        }
    }
    curve
}

/// Person-microseconds under the curve.
pub fn occupancy_integral(curve: &[(SimTime, u32)]) -> u128 {
    curve
        .windows(2)
        .map(|w| u128::from(w[0].1) * u128::from((w[1].0 - w[0].0).as_micros()))
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifySample {
    pub at: SimTime,
    pub latency_ms: f64,
    pub allowed: bool,
}

/// Flat per-run metrics, one CSV row.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub profile: String,
    pub seed: u64,
    pub nodes: usize,
    pub meetings: usize,
    pub participants: usize,
    pub distinct_people: usize,
    pub requests: usize,
    pub requests_per_participant: f64,
    pub entities_submitted: usize,
    pub entities_existing: usize,
    pub rules_submitted: usize,
    pub rejected_requests: usize,
    pub reverted_txs: usize,
    pub avg_entity_delay_s: f64,
    pub avg_rule_delay_s: f64,
    pub avg_entity_fee_usd: f64,
    pub avg_rule_fee_usd: f64,
    pub verifies: usize,
    pub verify_allowed: usize,
    pub verify_denied: usize,
    pub verify_latency_mean_ms: f64,
    pub verify_latency_p95_ms: f64,
    pub verify_latency_max_ms: f64,
    pub peak_occupancy: u32,
    pub occupancy_person_hours: f64,
    pub blocks: usize,
    pub total_gas: u64,
}

pub struct RunReport {
    pub metrics: RunMetrics,
    pub meetings: Vec<Meeting>,
    pub presence: Vec<Presence>,
    pub occupancy: Vec<(SimTime, u32)>,
    pub verify_samples: Vec<VerifySample>,
    pub service: AccessService,
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1]
}

/// Drives `service` through one day. The service's ledger clock must be at
/// or before the first booking.
pub fn run_workload(
    schedule: &[Meeting],
    profile: &DayProfile,
    workload: &WorkloadConfig,
    mut service: AccessService,
    seed: u64,
) -> Result<RunReport, SimError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(PEOPLE_STREAM);
    let window = profile.window_minutes;
    let spacing = Exp::new(1.0 / workload.invite_spacing_secs.max(1e-6)).expect("positive rate");

    // seat assignment: returning people must be free for the whole window
    let mut busy_until: Vec<SimTime> = Vec::new();
    let mut seats: Vec<Seat> = Vec::new();
    let mut events: Vec<(SimTime, EventKind)> = Vec::new();
    for m in schedule {
        let book = m.start.saturating_sub(SimTime::from_minutes(uniform(
            &mut rng,
            workload.booking_min_minutes,
            workload.booking_max_minutes,
        )));
        events.push((book, EventKind::Book { meeting: m.id }));
        let opens = m.start.saturating_sub(SimTime::from_minutes(window));
        let mut invite_at = book;
        for _ in 0..m.participants {
            let free: Vec<usize> = (0..busy_until.len()).filter(|&p| busy_until[p] < opens).collect();
            let person = if !free.is_empty() && rng.random_bool(profile.returning_fraction.clamp(0.0, 1.0)) {
                free[rng.random_range(0..free.len())]
            } else {
                busy_until.push(SimTime::ZERO);
                busy_until.len() - 1
            };
            let arrival = opens + SimTime::from_minutes(uniform(&mut rng, 0.0, window));
            let departure = m.end() + SimTime::from_minutes(uniform(&mut rng, 0.0, window));
            busy_until[person] = departure;
            invite_at = invite_at + SimTime::from_secs(spacing.sample(&mut rng));
            let seat = seats.len();
            events.push((invite_at, EventKind::Invite { seat }));
            seats.push(Seat {
                meeting: m.id,
                person,
                arrival,
                departure,
            });
        }
    }

    let host = "manager";
    let token = service
        .keyring()
        .find(host)
        .map(|a| a.token.clone())
        .unwrap_or_default();
    let mut nodes = NodePool::new(service.ledger().nodes(), service.ledger().config().per_node_capacity);
    let mut path_ids: Vec<Option<String>> = vec![None; schedule.len()];
    let mut door_names: Vec<Vec<String>> = vec![Vec::new(); schedule.len()];
    let mut rule_of_seat: Vec<Option<RuleId>> = vec![None; seats.len()];
    let mut submitted: Vec<(TxId, CallKind)> = Vec::new();
    let mut metrics = RunMetrics {
        profile: profile.kind.name().to_owned(),
        seed,
        nodes: nodes.nodes(),
        meetings: schedule.len(),
        participants: seats.len(),
        distinct_people: busy_until.len(),
        ..RunMetrics::default()
    };
    let mut samples = Vec::new();
    let entity_expiry = SimTime::from_hours(workload.entity_expiry_hour);

    let mut order: Vec<(SimTime, EventKind)> = events;
    // door events are only known once paths are planned, so they go to a
    // second queue merged in time order
    order.sort();
    let mut pending_doors: std::collections::BTreeSet<(SimTime, EventKind)> = std::collections::BTreeSet::new();
    let mut main = order.into_iter().peekable();
    loop {
        let next_main = main.peek().map(|e| e.0);
        let next_door = pending_doors.first().map(|e| e.0);
        let (at, ev) = match (next_main, next_door) {
            (None, None) => break,
            (Some(a), Some(b)) if b < a => pending_doors.pop_first().expect("peeked"),
            (Some(_), _) => main.next().expect("peeked"),
            (None, Some(_)) => pending_doors.pop_first().expect("peeked"),
        };
        if at > service.now() {
            service.advance(at)?;
        }
        match ev {
            EventKind::Book { meeting } => {
                let m = &schedule[meeting];
                let r = service.plan(&PlanRequest {
                    from: dataset::ENTRANCE.to_owned(),
                    to: m.room.clone(),
                    max_paths: None,
                    max_depth: None,
                });
                let best = r
                    .paths
                    .and_then(|p| p.into_iter().next())
                    .ok_or_else(|| SimError::NoPath(m.room.clone()))?;
                door_names[meeting] = best.sequence.iter().skip(1).step_by(2).cloned().collect();
                path_ids[meeting] = Some(best.path_id);
            }
            EventKind::Invite { seat } => {
                let s = &seats[seat];
                let m = &schedule[s.meeting];
                let person = format!("visitor-{}", s.person);
                metrics.requests += 1;
                let e = service.add_entity(&EntityRequest {
                    delegator: host.to_owned(),
                    token: token.clone(),
                    delegate: person.clone(),
                    start: SimTime::ZERO,
                    expiry: Some(entity_expiry),
                    permissions: [Permission::Read].into(),
                    visitor: true,
                });
                match e.status {
                    Status::Ok => {
                        metrics.entities_submitted += 1;
                        submitted.push((e.tx_id.expect("submitted"), CallKind::CreateEntity));
                    }
                    Status::OkExisting => metrics.entities_existing += 1,
                    _ => metrics.rejected_requests += 1,
                }
                metrics.requests += 1;
                let r = service.add_rule(&RuleRequest {
                    delegator: host.to_owned(),
                    token: token.clone(),
                    delegate: person,
                    path_id: path_ids[s.meeting].clone().unwrap_or_default(),
                    exclusions: Vec::new(),
                    start: m.start,
                    expiry: m.end() + SimTime::from_minutes(window),
                    order_enforced: None,
                });
                if r.status == Status::Ok {
                    metrics.rules_submitted += 1;
                    submitted.push((r.tx_id.expect("submitted"), CallKind::CreateAccessRule));
                    rule_of_seat[seat] = r.rule_id;
                } else {
                    metrics.rejected_requests += 1;
                }
                let walk = &door_names[s.meeting];
                let mut t = s.arrival;
                for door in 0..walk.len() {
                    if door > 0 {
                        t = t + SimTime::from_secs(uniform(
                            &mut rng,
                            workload.door_walk_min_secs,
                            workload.door_walk_max_secs,
                        ));
                    }
                    pending_doors.insert((t, EventKind::Door { seat, door }));
                }
            }
            EventKind::Door { seat, door } => {
                let s = &seats[seat];
                metrics.requests += 1;
                metrics.verifies += 1;
                let r = service.verify(&VerifyRequest {
                    delegate: format!("visitor-{}", s.person),
                    rule_id: rule_of_seat[seat].unwrap_or(RuleId([0; 32])),
                    resource: door_names[s.meeting][door].clone(),
                    action: Action::Open,
                });
                let allowed = r.status == Status::Ok;
                if allowed {
                    metrics.verify_allowed += 1;
                } else {
                    metrics.verify_denied += 1;
                }
                let done = nodes.submit(at);
                samples.push(VerifySample {
                    at,
                    latency_ms: (done - at).as_secs() * 1e3,
                    allowed,
                });
            }
        }
    }
    // let every outstanding transaction reach a block
    let drain_until = service.now() + SimTime::from_hours(1.0);
    service.advance(drain_until)?;

    let ledger = service.ledger();
    let mut entity_delays = Vec::new();
    let mut rule_delays = Vec::new();
    let mut entity_fees = Vec::new();
    let mut rule_fees = Vec::new();
    for (id, kind) in &submitted {
        let tx = ledger.transaction(id).expect("submitted tx exists");
        let Some(ack) = ledger.acknowledged_at(id) else { continue };
        let delay = (ack - tx.submitted_at).as_secs();
        match kind {
            CallKind::CreateEntity => {
                entity_delays.push(delay);
                entity_fees.push(ledger.fee_usd(tx));
            }
            _ => {
                rule_delays.push(delay);
                rule_fees.push(ledger.fee_usd(tx));
            }
        }
    }
    metrics.reverted_txs = ledger
        .transactions()
        .iter()
        .filter(|t| matches!(t.status, crate::ledger::TxStatus::Reverted { .. }))
        .count();
    metrics.avg_entity_delay_s = mean(&entity_delays);
    metrics.avg_rule_delay_s = mean(&rule_delays);
    metrics.avg_entity_fee_usd = mean(&entity_fees);
    metrics.avg_rule_fee_usd = mean(&rule_fees);
    metrics.requests_per_participant = if seats.is_empty() {
        0.0
    } else {
        metrics.requests as f64 / seats.len() as f64
    };
    let mut lat: Vec<f64> = samples.iter().map(|s| s.latency_ms).collect();
    lat.sort_by(f64::total_cmp);
    metrics.verify_latency_mean_ms = mean(&lat);
    metrics.verify_latency_p95_ms = percentile(&lat, 0.95);
    metrics.verify_latency_max_ms = lat.last().copied().unwrap_or(0.0);
    let presence: Vec<Presence> = seats
        .iter()
        .map(|s| Presence {
            arrival: s.arrival,
            departure: s.departure,
        })
        .collect();
    let occupancy = occupancy_curve(&presence);
    metrics.peak_occupancy = occupancy.iter().map(|c| c.1).max().unwrap_or(0);
    metrics.occupancy_person_hours = occupancy_integral(&occupancy) as f64 / 3.6e9;
    metrics.blocks = ledger.blocks().len();
    metrics.total_gas = ledger.total_gas();
    Ok(RunReport {
        metrics,
        meetings: schedule.to_vec(),
        presence,
        occupancy,
        verify_samples: samples,
        service,
    })
}

/// Schedule plus workload on a fresh example-building service, with the
/// ledger seeded from `seed`.
pub fn simulate_day(
    profile: &DayProfile,
    workload: &WorkloadConfig,
    ledger: &LedgerConfig,
    seed: u64,
) -> Result<RunReport, SimError> {
    let schedule = generate_schedule(profile, seed);
    let service = dataset::example_service(LedgerConfig {
        seed,
        ..ledger.clone()
    });
    run_workload(&schedule, profile, workload, service, seed)
}

/// Means over runs of the headline metrics.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub profile: String,
    pub runs: usize,
    pub requests_per_participant: f64,
    pub peak_occupancy: f64,
    pub avg_entity_delay_s: f64,
    pub avg_rule_delay_s: f64,
    pub avg_entity_fee_usd: f64,
    pub avg_rule_fee_usd: f64,
    pub verify_latency_mean_ms: f64,
}

pub fn summarize(runs: &[RunMetrics]) -> Summary {
    let avg = |f: fn(&RunMetrics) -> f64| mean(&runs.iter().map(f).collect::<Vec<_>>());
    Summary {
        profile: runs.first().map(|r| r.profile.clone()).unwrap_or_default(),
        runs: runs.len(),
        requests_per_participant: avg(|r| r.requests_per_participant),
        peak_occupancy: avg(|r| f64::from(r.peak_occupancy)),
        avg_entity_delay_s: avg(|r| r.avg_entity_delay_s),
        avg_rule_delay_s: avg(|r| r.avg_rule_delay_s),
        avg_entity_fee_usd: avg(|r| r.avg_entity_fee_usd),
        avg_rule_fee_usd: avg(|r| r.avg_rule_fee_usd),
        verify_latency_mean_ms: avg(|r| r.verify_latency_mean_ms),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub nodes: usize,
    pub offered_per_minute: f64,
    pub seeds: usize,
    pub throughput_per_minute: f64,
    pub mean_latency_ms: f64,
    pub capacity_per_minute: f64,
}

/// Poisson verify load against `nodes` FIFO servers for `duration`.
/// Throughput counts completions inside the window; latency averages them.
pub fn scaling_point(nodes: usize, offered_per_minute: f64, per_node_capacity: f64, duration: SimTime, seed: u64) -> (f64, f64) {
    if offered_per_minute <= 0.0 {
        return (0.0, 0.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(SCALING_STREAM);
    let gap = Exp::new(offered_per_minute / 60.0).expect("positive rate");
    let mut pool = NodePool::new(nodes, per_node_capacity);
    let mut t = 0.0;
    let mut done = 0usize;
    let mut latency = 0.0;
    loop {
        t += gap.sample(&mut rng);
        let at = SimTime::from_secs(t);
        if at >= duration {
            break;
        }
        let finish = pool.submit(at);
        if finish <= duration {
            done += 1;
            latency += (finish - at).as_secs();
        }
    }
    let minutes = duration.as_secs() / 60.0;
    let mean_ms = if done == 0 { 0.0 } else { latency / done as f64 * 1e3 };
    (done as f64 / minutes, mean_ms)
}

pub fn scaling_study(
    loads: &[f64],
    node_counts: &[usize],
    seeds: &[u64],
    per_node_capacity: f64,
    duration: SimTime,
) -> Vec<ScalingRow> {
    let mut rows = Vec::new();
    for &nodes in node_counts {
        for &load in loads {
            let points: Vec<(f64, f64)> = seeds
                .iter()
                .map(|&s| scaling_point(nodes, load, per_node_capacity, duration, s))
                .collect();
            rows.push(ScalingRow {
                nodes,
                offered_per_minute: load,
                seeds: seeds.len(),
                throughput_per_minute: mean(&points.iter().map(|p| p.0).collect::<Vec<_>>()),
                mean_latency_ms: mean(&points.iter().map(|p| p.1).collect::<Vec<_>>()),
                capacity_per_minute: nodes as f64 * per_node_capacity * 60.0,
            });
        }
    }
    rows
}

fn write_csv<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<(), SimError> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct OccupancyRow<'a> {
    profile: &'a str,
    seed: u64,
    time_s: f64,
    present: u32,
}

#[derive(Serialize)]
struct MeetingRow<'a> {
    profile: &'a str,
    seed: u64,
    meeting: usize,
    room: &'a str,
    start_s: f64,
    duration_s: f64,
    participants: u32,
}

#[derive(Serialize)]
struct LatencyRow<'a> {
    profile: &'a str,
    seed: u64,
    at_s: f64,
    latency_ms: f64,
    allowed: bool,
}

/// Writes `runs.csv`, `summary.csv`, `meetings.csv`, `occupancy.csv`,
/// `verify_latency.csv`, and per seed `ledger-<profile>-<seed>.jsonl`,
/// `verify-<profile>-<seed>.jsonl` and `chain-<profile>-<seed>.json`.
pub fn write_reports(dir: &Path, reports: &[RunReport]) -> Result<(), SimError> {
    fs::create_dir_all(dir)?;
    let metrics: Vec<&RunMetrics> = reports.iter().map(|r| &r.metrics).collect();
    write_csv(&dir.join("runs.csv"), metrics.iter().copied())?;
    let owned: Vec<RunMetrics> = metrics.iter().map(|m| (*m).clone()).collect();
    let mut profiles: Vec<&str> = owned.iter().map(|m| m.profile.as_str()).collect();
    profiles.dedup();
    let summaries: Vec<Summary> = profiles
        .iter()
        .map(|p| summarize(&owned.iter().filter(|m| m.profile == *p).cloned().collect::<Vec<_>>()))
        .collect();
    write_csv(&dir.join("summary.csv"), summaries)?;
    write_csv(
        &dir.join("meetings.csv"),
        reports.iter().flat_map(|r| {
            r.meetings.iter().map(move |m| MeetingRow {
                profile: &r.metrics.profile,
                seed: r.metrics.seed,
                meeting: m.id,
                room: &m.room,
                start_s: m.start.as_secs(),
                duration_s: m.duration.as_secs(),
                participants: m.participants,
            })
        }),
    )?;
    write_csv(
        &dir.join("occupancy.csv"),
        reports.iter().flat_map(|r| {
            r.occupancy.iter().map(move |(t, n)| OccupancyRow {
                profile: &r.metrics.profile,
                seed: r.metrics.seed,
                time_s: t.as_secs(),
                present: *n,
            })
        }),
    )?;
    write_csv(
        &dir.join("verify_latency.csv"),
        reports.iter().flat_map(|r| {
            r.verify_samples.iter().map(move |s| LatencyRow {
                profile: &r.metrics.profile,
                seed: r.metrics.seed,
                at_s: s.at.as_secs(),
                latency_ms: s.latency_ms,
                allowed: s.allowed,
            })
        }),
    )?;
    for r in reports {
        let stem = format!("{}-{}", r.metrics.profile, r.metrics.seed);
        let ledger = r.service.ledger();
        ledger.write_event_log(BufWriter::new(fs::File::create(dir.join(format!("ledger-{stem}.jsonl")))?))?;
        let mut out = BufWriter::new(fs::File::create(dir.join(format!("verify-{stem}.jsonl")))?);
        r.service.write_verify_log(&mut out)?;
        out.flush()?;
        let mut out = BufWriter::new(fs::File::create(dir.join(format!("chain-{stem}.json")))?);
        serde_json::to_writer(&mut out, &ledger.export())?;
        out.flush()?;
    }
    Ok(())
}

pub fn write_scaling(path: &Path, rows: &[ScalingRow]) -> Result<(), SimError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    write_csv(path, rows)
}
