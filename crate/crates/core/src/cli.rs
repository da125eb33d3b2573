//! The `pathgate` command line.
//!
//! Commands are single-shot. Service state survives between invocations as a
//! journal of requests in the state directory; each run rebuilds the service
//! by replaying it, which is exact because the ledger is seeded.
//!
//! Exit codes: 0 success or a rendered decision, 1 usage error, 2 config or
//! parse error, 3 rejection of a state-changing command.

use std::ffi::OsString;
use std::fs;
use std::io::{self, BufRead, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::{Config, Environment, CONFIG_ENV};
use crate::contracts::{Action, Permission, RuleId};
use crate::ledger::{TxId, TxStatus};
use crate::sensitivity::WeightConfig;
use crate::service::{
    AccessService, ApiRequest, ApiResponse, ClockRequest, EntityRequest, ErrorKind, PlanRequest, RevokeRequest,
    RuleRequest, Status, VerifyRequest,
};
use crate::sim::{self, DayKind};
use crate::time::SimTime;
use crate::{dataset, service};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_REJECTED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "pathgate", version, about = "Indoor path planning and ledger-backed building access control")]
pub struct Cli {
    /// TOML or JSON config; built-in example building when absent.
    #[arg(long, global = true, env = CONFIG_ENV)]
    pub config: Option<PathBuf>,
    /// Overrides the config's state directory.
    #[arg(long, global = true)]
    pub state_dir: Option<PathBuf>,
    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Building model commands.
    Model {
        #[command(subcommand)]
        command: ModelCommand,
    },
    /// Print point-type weights, lambda_max and consistency ratios.
    Weights {
        /// Pairwise answers or explicit weights; defaults to the config's
        /// weights file, else the shipped answers.
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Rank indoor paths between two spaces.
    Plan(PlanArgs),
    /// Entity commands.
    Entity {
        #[command(subcommand)]
        command: EntityCommand,
    },
    /// Access-rule commands.
    Rule {
        #[command(subcommand)]
        command: RuleCommand,
    },
    /// Check one access request.
    Verify(VerifyArgs),
    /// Revoke a rule or an entity.
    Revoke(RevokeArgs),
    /// Run the HTTP access service.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
    },
    /// Simulate meeting days and write CSV and JSON-lines reports.
    Simulate(SimulateArgs),
}

#[derive(Debug, Subcommand)]
pub enum ModelCommand {
    /// Load, align and validate the building.
    Check,
}

#[derive(Debug, Subcommand)]
pub enum EntityCommand {
    Add(EntityArgs),
}

#[derive(Debug, Subcommand)]
pub enum RuleCommand {
    Add(RuleArgs),
}

/// Times are seconds since midnight or `HH:MM[:SS]`.
fn parse_time(s: &str) -> Result<SimTime, String> {
    if let Ok(secs) = s.parse::<f64>() {
        if secs >= 0.0 && secs.is_finite() {
            return Ok(SimTime::from_secs(secs));
        }
        return Err(format!("time must be non-negative: {s}"));
    }
    let parts: Vec<&str> = s.split(':').collect();
    if !(2..=3).contains(&parts.len()) {
        return Err(format!("expected seconds or HH:MM[:SS], got {s:?}"));
    }
    let mut secs = 0.0;
    for (part, scale) in parts.iter().zip([3600.0, 60.0, 1.0]) {
        let v: f64 = part.parse().map_err(|_| format!("bad time {s:?}"))?;
        secs += v * scale;
    }
    Ok(SimTime::from_secs(secs))
}

#[derive(Debug, Clone, Args)]
pub struct Clock {
    /// Move the simulated clock to this time first.
    #[arg(long, value_parser = parse_time)]
    pub at: Option<SimTime>,
}

#[derive(Debug, Clone, Args)]
pub struct Sender {
    /// Keyring account name.
    #[arg(long)]
    pub sender: String,
    #[arg(long)]
    pub token: String,
    /// Return after submission instead of waiting for the block.
    #[arg(long)]
    pub no_wait: bool,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[arg(long)]
    pub from: String,
    #[arg(long)]
    pub to: String,
    /// Remember path N (1-based rank) for `rule add`.
    #[arg(long)]
    pub choose: Option<usize>,
    #[arg(long)]
    pub max_paths: Option<usize>,
    #[arg(long)]
    pub max_depth: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EntityArgs {
    #[command(flatten)]
    pub sender: Sender,
    #[command(flatten)]
    pub clock: Clock,
    /// Address, keyring name or label of the new entity.
    #[arg(long)]
    pub delegate: String,
    #[arg(long, value_parser = parse_time, default_value = "0")]
    pub start: SimTime,
    #[arg(long, value_parser = parse_time)]
    pub expiry: Option<SimTime>,
    #[arg(long, value_delimiter = ',', default_value = "read")]
    pub permissions: Vec<Permission>,
    /// Building occupant: expiry becomes optional.
    #[arg(long)]
    pub occupant: bool,
}

#[derive(Debug, Args)]
pub struct RuleArgs {
    #[command(flatten)]
    pub sender: Sender,
    #[command(flatten)]
    pub clock: Clock,
    #[arg(long)]
    pub delegate: String,
    /// Planned path; defaults to the one picked with `plan --choose`.
    #[arg(long)]
    pub path_id: Option<String>,
    #[arg(long, value_parser = parse_time)]
    pub start: SimTime,
    #[arg(long, value_parser = parse_time)]
    pub expiry: SimTime,
    #[arg(long = "exclude")]
    pub exclusions: Vec<String>,
    /// Doors may be opened in any order (occupants).
    #[arg(long)]
    pub unordered: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub clock: Clock,
    #[arg(long)]
    pub delegate: String,
    #[arg(long)]
    pub rule_id: RuleId,
    #[arg(long)]
    pub resource: String,
    #[arg(long, default_value = "open")]
    pub action: Action,
}

#[derive(Debug, Args)]
pub struct RevokeArgs {
    #[command(flatten)]
    pub sender: Sender,
    #[command(flatten)]
    pub clock: Clock,
    #[arg(long, conflicts_with = "address", required_unless_present = "address")]
    pub rule_id: Option<RuleId>,
    #[arg(long)]
    pub address: Option<String>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value = "average")]
    pub profile: DayKind,
    /// Ledger nodes; the config's value when absent.
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long, default_value_t = 5)]
    pub seeds: u64,
    #[arg(long, default_value_t = 0)]
    pub first_seed: u64,
    #[arg(long, default_value = "report")]
    pub out: PathBuf,
    /// Also run the node-scaling study into `scaling.csv`.
    #[arg(long)]
    pub scaling: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "entry", rename_all = "snake_case")]
enum JournalEntry {
    Request { request: ApiRequest },
    Settle { tx: TxId },
    Choose { path_id: String },
}

/// A replayed service plus the journal that rebuilt it.
struct Session {
    service: AccessService,
    chosen: Option<String>,
    journal: PathBuf,
}

impl Session {
    fn open(env: &Environment, state_dir: &Path) -> Result<Self, Failure> {
        let journal = state_dir.join("journal.jsonl");
        let mut session = Session {
            service: env.service(),
            chosen: None,
            journal,
        };
        let file = match fs::File::open(&session.journal) {
            Ok(f) => f,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(session),
            Err(e) => return Err(Failure::config(format!("{}: {e}", session.journal.display()))),
        };
        for (n, line) in io::BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Failure::config(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let entry: JournalEntry = serde_json::from_str(&line)
                .map_err(|e| Failure::config(format!("{} line {}: {e}", session.journal.display(), n + 1)))?;
            session.replay(entry)?;
        }
        Ok(session)
    }

    fn replay(&mut self, entry: JournalEntry) -> Result<(), Failure> {
        match entry {
            JournalEntry::Request { request } => {
                self.service.handle(request);
            }
            JournalEntry::Settle { tx } => {
                self.service.settle(&tx).map_err(|e| Failure::config(e.to_string()))?;
            }
            JournalEntry::Choose { path_id } => self.chosen = Some(path_id),
        }
        Ok(())
    }

    fn record(&self, entry: &JournalEntry) -> Result<(), Failure> {
        if let Some(dir) = self.journal.parent() {
            fs::create_dir_all(dir).map_err(|e| Failure::config(format!("{}: {e}", dir.display())))?;
        }
        let mut f = fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.journal)
            .map_err(|e| Failure::config(format!("{}: {e}", self.journal.display())))?;
        let line = serde_json::to_string(entry).expect("journal entries serialize");
        writeln!(f, "{line}").map_err(|e| Failure::config(e.to_string()))
    }

    /// Handles and journals a request.
    fn call(&mut self, request: ApiRequest) -> Result<ApiResponse, Failure> {
        let response = self.service.handle(request.clone());
        self.record(&JournalEntry::Request { request })?;
        Ok(response)
    }

    fn advance(&mut self, clock: &Clock) -> Result<(), Failure> {
        if let Some(at) = clock.at {
            if at < self.service.now() {
                return Err(Failure::usage(format!(
                    "--at {} is before the current clock {}",
                    at,
                    self.service.now()
                )));
            }
            self.call(ApiRequest::Clock(ClockRequest { until: at }))?;
        }
        Ok(())
    }

    /// Waits for the block holding the response's transaction, if any.
    fn settle(&mut self, response: &mut ApiResponse, wait: bool) -> Result<(), Failure> {
        let (Some(tx), true) = (response.tx_id, wait) else {
            return Ok(());
        };
        let status = self.service.settle(&tx).map_err(|e| Failure::config(e.to_string()))?;
        self.record(&JournalEntry::Settle { tx })?;
        if let TxStatus::Reverted { error } = status {
            *response = ApiResponse::error(ErrorKind::Contract, format!("reverted when mined: {error}"));
        }
        Ok(())
    }
}

/// A command failure: exit code plus a JSON error for stderr.
#[derive(Debug)]
struct Failure {
    code: i32,
    kind: &'static str,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            kind: "usage",
            message: message.into(),
        }
    }

    fn config(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_CONFIG,
            kind: "config",
            message: message.into(),
        }
    }

    fn from_response(r: &ApiResponse) -> Option<Self> {
        let e = r.error.as_ref()?;
        let (code, kind) = match e.kind {
            ErrorKind::BadRequest => (EXIT_USAGE, "bad-request"),
            ErrorKind::StalePath => (EXIT_USAGE, "stale-path"),
            ErrorKind::Unauthorized => (EXIT_REJECTED, "unauthorized"),
            ErrorKind::Contract => (EXIT_REJECTED, "contract"),
            ErrorKind::Ledger => (EXIT_CONFIG, "ledger"),
        };
        Some(Self {
            code,
            kind,
            message: e.message.clone(),
        })
    }
}

struct Io<'a> {
    out: &'a mut dyn Write,
    json: bool,
}

impl Io<'_> {
    fn emit(&mut self, value: &impl Serialize, text: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> io::Result<()> {
        if self.json {
            serde_json::to_writer_pretty(&mut *self.out, value)?;
            writeln!(self.out)
        } else {
            text(self.out)
        }
    }
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind as K;
            let code = match e.kind() {
                K::DisplayHelp | K::DisplayVersion | K::DisplayHelpOnMissingArgumentOrSubcommand => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(f) => {
            let body = json!({ "error": { "kind": f.kind, "message": f.message } });
            let _ = writeln!(err, "{body}");
            f.code
        }
    }
}

fn load_config(cli: &Cli) -> Result<Config, Failure> {
    let mut config = match &cli.config {
        Some(p) => Config::from_file(p).map_err(|e| Failure::config(e.to_string()))?,
        None => Config::default(),
    };
    if let Some(dir) = &cli.state_dir {
        config.state_dir = dir.clone();
    }
    Ok(config)
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    let config = load_config(cli)?;
    let env = config.load().map_err(|e| Failure::config(e.to_string()))?;
    let mut io = Io { out, json: cli.json };
    let wrote = |r: io::Result<()>| r.map_err(|e| Failure::config(e.to_string()));
    match &cli.command {
        Command::Model {
            command: ModelCommand::Check,
        } => {
            let b = &env.building;
            let issues = b.check();
            let report = json!({
                "rooms": b.rooms().len(),
                "doors": b.doors().len(),
                "points": b.points().len(),
                "triples": b.graph().len(),
                "entrance": b.short(&env.entrance),
                "issues": issues,
            });
            wrote(io.emit(&report, |w| {
                writeln!(
                    w,
                    "{} triples, {} rooms, {} doors, {} points; entrance {}",
                    b.graph().len(),
                    b.rooms().len(),
                    b.doors().len(),
                    b.points().len(),
                    b.short(&env.entrance)
                )?;
                for i in &issues {
                    writeln!(w, "issue: {i}")?;
                }
                Ok(())
            }))?;
            Ok(if issues.is_empty() { EXIT_OK } else { EXIT_CONFIG })
        }
        Command::Weights { file } => {
            let wc = match (file, &env.config.weights) {
                (Some(p), _) | (None, Some(p)) => {
                    let text = fs::read_to_string(p).map_err(|e| Failure::config(format!("{}: {e}", p.display())))?;
                    WeightConfig::from_json(&text).map_err(|e| Failure::config(e.to_string()))?
                }
                (None, None) => dataset::ahp_answers().map_err(|e| Failure::config(e.to_string()))?,
            };
            let resolved = wc.resolve(&env.prefixes).map_err(|e| Failure::config(e.to_string()))?;
            let report: Vec<_> = resolved
                .iter()
                .map(|c| {
                    json!({
                        "category": env.prefixes.display(&c.category),
                        "weights": c.types.iter().zip(&c.weights)
                            .map(|(t, w)| json!({ "type": env.prefixes.display(t), "weight": w }))
                            .collect::<Vec<_>>(),
                        "lambda_max": c.ahp.as_ref().map(|a| a.lambda_max),
                        "consistency_ratio": c.ahp.as_ref().map(|a| a.consistency_ratio),
                    })
                })
                .collect();
            wrote(io.emit(&report, |w| {
                for c in &resolved {
                    write!(w, "{}", env.prefixes.display(&c.category))?;
                    if let Some(a) = &c.ahp {
                        write!(w, "  lambda_max {:.4}  CR {:.3}", a.lambda_max, a.consistency_ratio)?;
                    }
                    writeln!(w)?;
                    for (t, x) in c.types.iter().zip(&c.weights) {
                        writeln!(w, "  {:<32} {:.3}", env.prefixes.display(t), x)?;
                    }
                }
                Ok(())
            }))?;
            Ok(EXIT_OK)
        }
        Command::Plan(args) => {
            let mut s = Session::open(&env, &env.config.state_dir)?;
            let r = s.call(ApiRequest::Plan(PlanRequest {
                from: args.from.clone(),
                to: args.to.clone(),
                max_paths: args.max_paths,
                max_depth: args.max_depth,
            }))?;
            if let Some(f) = Failure::from_response(&r) {
                return Err(f);
            }
            let paths = r.paths.clone().unwrap_or_default();
            if let Some(n) = args.choose {
                let Some(p) = paths.get(n.wrapping_sub(1)) else {
                    return Err(Failure::usage(format!("--choose {n}: only {} paths", paths.len())));
                };
                s.chosen = Some(p.path_id.clone());
                s.record(&JournalEntry::Choose {
                    path_id: p.path_id.clone(),
                })?;
            }
            let report = json!({ "paths": paths, "truncated": r.truncated, "chosen": s.chosen });
            wrote(io.emit(&report, |w| {
                for p in &paths {
                    let mark = if Some(&p.path_id) == s.chosen.as_ref() && args.choose.is_some() { "*" } else { " " };
                    let warn = if p.zone_order_warning { " [zone order]" } else { "" };
                    writeln!(w, "{mark}{:>2}. {:>8.3}  {}  {}{warn}", p.rank, p.total_cost, p.path_id, p.sequence.join(" > "))?;
                    for room in &p.per_room {
                        writeln!(
                            w,
                            "       {:<16} {:<14} zone {:>2}  points {:>8.3}",
                            room.room, room.zone, room.sensitivity, room.point_cost
                        )?;
                    }
                }
                if r.truncated == Some(true) {
                    writeln!(w, "search truncated; raise --max-paths or --max-depth")?;
                }
                Ok(())
            }))?;
            Ok(EXIT_OK)
        }
        Command::Entity {
            command: EntityCommand::Add(args),
        } => {
            let mut s = Session::open(&env, &env.config.state_dir)?;
            s.advance(&args.clock)?;
            let mut r = s.call(ApiRequest::Entities(EntityRequest {
                delegator: args.sender.sender.clone(),
                token: args.sender.token.clone(),
                delegate: args.delegate.clone(),
                start: args.start,
                expiry: args.expiry,
                permissions: args.permissions.iter().copied().collect(),
                visitor: !args.occupant,
            }))?;
            s.settle(&mut r, !args.sender.no_wait)?;
            respond(&mut io, &r)
        }
        Command::Rule {
            command: RuleCommand::Add(args),
        } => {
            let mut s = Session::open(&env, &env.config.state_dir)?;
            s.advance(&args.clock)?;
            let Some(path_id) = args.path_id.clone().or_else(|| s.chosen.clone()) else {
                return Err(Failure::usage("no --path-id and no path chosen with `plan --choose`"));
            };
            let mut r = s.call(ApiRequest::Rules(RuleRequest {
                delegator: args.sender.sender.clone(),
                token: args.sender.token.clone(),
                delegate: args.delegate.clone(),
                path_id,
                exclusions: args.exclusions.clone(),
                start: args.start,
                expiry: args.expiry,
                order_enforced: Some(!args.unordered),
            }))?;
            s.settle(&mut r, !args.sender.no_wait)?;
            respond(&mut io, &r)
        }
        Command::Verify(args) => {
            let mut s = Session::open(&env, &env.config.state_dir)?;
            s.advance(&args.clock)?;
            let r = s.call(ApiRequest::Verify(VerifyRequest {
                delegate: args.delegate.clone(),
                rule_id: args.rule_id,
                resource: args.resource.clone(),
                action: args.action,
            }))?;
            respond(&mut io, &r)
        }
        Command::Revoke(args) => {
            let mut s = Session::open(&env, &env.config.state_dir)?;
            s.advance(&args.clock)?;
            let mut r = s.call(ApiRequest::Revoke(RevokeRequest {
                caller: args.sender.sender.clone(),
                token: args.sender.token.clone(),
                rule_id: args.rule_id,
                address: args.address.clone(),
            }))?;
            s.settle(&mut r, !args.sender.no_wait)?;
            respond(&mut io, &r)
        }
        Command::Serve { addr } => {
            let s = Session::open(&env, &env.config.state_dir)?;
            let rt = tokio::runtime::Runtime::new().map_err(|e| Failure::config(e.to_string()))?;
            rt.block_on(service::http::serve(s.service, *addr))
                .map_err(|e| Failure::config(format!("{addr}: {e}")))?;
            Ok(EXIT_OK)
        }
        Command::Simulate(args) => simulate(&env, args, &mut io),
    }
}

fn respond(io: &mut Io<'_>, r: &ApiResponse) -> Result<i32, Failure> {
    if let Some(f) = Failure::from_response(r) {
        return Err(f);
    }
    io.emit(r, |w| {
        match r.status {
            Status::Ok => write!(w, "ok")?,
            Status::OkExisting => write!(w, "ok (already exists)")?,
            Status::Denied => write!(w, "deny")?,
            Status::Error => write!(w, "error")?,
        }
        if let Some(d) = &r.decision {
            if r.status == Status::Ok {
                write!(w, " {d}")?;
            }
        }
        if let Some(reason) = r.reason {
            write!(w, " ({reason})")?;
        }
        if let Some(a) = &r.address {
            write!(w, " address {a}")?;
        }
        if let Some(id) = &r.rule_id {
            write!(w, " rule {id}")?;
        }
        if let Some(tx) = &r.tx_id {
            write!(w, " tx {tx}")?;
        }
        writeln!(w)
    })
    .map_err(|e| Failure::config(e.to_string()))?;
    Ok(EXIT_OK)
}

/// Offered loads (requests per minute) for the scaling study.
pub const SCALING_LOADS: [f64; 10] = [600.0, 1200.0, 2400.0, 3600.0, 4800.0, 6000.0, 7200.0, 9600.0, 12000.0, 15000.0];

fn simulate(env: &Environment, args: &SimulateArgs, io: &mut Io<'_>) -> Result<i32, Failure> {
    let profile = env.config.sim.profile(args.profile);
    let mut ledger = env.config.ledger.clone();
    if let Some(n) = args.nodes {
        ledger.nodes = n;
    }
    let seeds: Vec<u64> = (args.first_seed..args.first_seed + args.seeds).collect();
    let mut reports = Vec::with_capacity(seeds.len());
    for &seed in &seeds {
        let r = sim::simulate_day(&profile, &env.config.sim.workload, &ledger, seed)
            .map_err(|e| Failure::config(e.to_string()))?;
        reports.push(r);
    }
    sim::write_reports(&args.out, &reports).map_err(|e| Failure::config(e.to_string()))?;
    let metrics: Vec<_> = reports.iter().map(|r| r.metrics.clone()).collect();
    let summary = sim::summarize(&metrics);
    let scaling = if args.scaling {
        let rows = sim::scaling_study(
            &SCALING_LOADS,
            &[1, 2, 3, 4],
            &seeds,
            ledger.per_node_capacity,
            SimTime::from_minutes(10.0),
        );
        sim::write_scaling(&args.out.join("scaling.csv"), &rows).map_err(|e| Failure::config(e.to_string()))?;
        Some(rows)
    } else {
        None
    };
    let report = json!({ "summary": summary, "runs": metrics, "scaling": scaling, "out": args.out });
    io.emit(&report, |w| {
        writeln!(w, "{} day, {} seeds, {} nodes -> {}", profile.kind, seeds.len(), ledger.nodes, args.out.display())?;
        writeln!(w, "  requests/participant {:.2}", summary.requests_per_participant)?;
        writeln!(w, "  peak occupancy       {:.1}", summary.peak_occupancy)?;
        writeln!(w, "  add-entity delay     {:.2} s   fee {:.4} USD", summary.avg_entity_delay_s, summary.avg_entity_fee_usd)?;
        writeln!(w, "  add-rule delay       {:.2} s   fee {:.4} USD", summary.avg_rule_delay_s, summary.avg_rule_fee_usd)?;
        writeln!(w, "  verify latency       {:.1} ms", summary.verify_latency_mean_ms)?;
        if let Some(rows) = &scaling {
            for row in rows {
                writeln!(
                    w,
                    "  nodes {} load {:>7.0}/min -> {:>7.0}/min, {:>8.1} ms",
                    row.nodes, row.offered_per_minute, row.throughput_per_minute, row.mean_latency_ms
                )?;
            }
        }
        Ok(())
    })
    .map_err(|e| Failure::config(e.to_string()))?;
    Ok(EXIT_OK)
}
