//! Random call sequences against the access contracts on the example
//! building, with the safety checks applied after every step.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use pathgate::building::ResourceKind;
use pathgate::contracts::{
    verify_access, AccessRule, Action, CallOutcome, Address, ContractCall, ContractError, ContractState, Decision,
    Permission, Permissions, PointerStore, ResourceCatalog, RuleId,
};
use pathgate::dataset;
use pathgate::planner::{enumerate_paths, PlanOptions};
use pathgate::rdf::Iri;
use pathgate::time::SimTime;
use proptest::prelude::*;

pub const ACTORS: usize = 5;
// 184 and 150 lie on the paths to 144, so sub-path delegation is common
pub const DESTINATIONS: [&str; 4] = ["Room-1-1-144", "Room-1-1-184", "Room-1-1-150", "Room-1-1-106"];

pub struct World {
    pub catalog: ResourceCatalog,
    /// Implication lists: every planned path to a destination, minus the origin.
    pub paths: Vec<Vec<Iri>>,
    pub resources: Vec<Iri>,
}

pub fn world() -> &'static World {
    static W: OnceLock<World> = OnceLock::new();
    W.get_or_init(|| {
        let b = dataset::example_building().unwrap();
        let entrance = b.lookup(dataset::ENTRANCE).unwrap();
        let catalog = ResourceCatalog::from_building(&b, &entrance);
        let mut paths = Vec::new();
        for d in DESTINATIONS {
            let set = enumerate_paths(&b, &entrance, &b.lookup(d).unwrap(), PlanOptions::default()).unwrap();
            for p in set.paths {
                paths.push(p.sequence()[1..].to_vec());
            }
        }
        let resources = b
            .rooms()
            .into_iter()
            .chain(b.doors())
            .chain(b.points())
            .map(|r| r.iri)
            .collect();
        World {
            catalog,
            paths,
            resources,
        }
    })
}

pub fn actor(i: usize) -> Address {
    Address::from_label(&format!("actor-{i}"))
}

pub fn root() -> Address {
    actor(0)
}

pub fn minutes(m: u32) -> SimTime {
    SimTime::from_minutes(f64::from(m))
}

#[derive(Debug, Clone)]
pub enum Op {
    Entity {
        caller: usize,
        address: usize,
        start: u32,
        length: Option<u32>,
        perms: Vec<Permission>,
    },
    Rule {
        caller: usize,
        target: usize,
        path: usize,
        exclude: Option<usize>,
        start: u32,
        length: u32,
        ordered: bool,
    },
    RevokeRule {
        caller: usize,
        rule: usize,
    },
    RevokeEntity {
        caller: usize,
        address: usize,
    },
    Verify {
        target: usize,
        rule: usize,
        resource: usize,
        action: Action,
    },
    /// The holder of an existing rule passes on its path, cut after the
    /// `keep`-th room when that is shorter.
    Redelegate {
        rule: usize,
        target: usize,
        keep: usize,
        start: u32,
        length: u32,
    },
    /// Verify the rule's own implication at `index`.
    Walk {
        rule: usize,
        index: usize,
    },
}

pub fn perms() -> impl Strategy<Value = Vec<Permission>> {
    prop::collection::vec(
        prop_oneof![Just(Permission::Read), Just(Permission::Write), Just(Permission::Delegate)],
        0..3,
    )
}

pub fn action() -> impl Strategy<Value = Action> {
    prop_oneof![Just(Action::Open), Just(Action::Read), Just(Action::Write)]
}

pub fn op() -> impl Strategy<Value = Op> {
    let n_paths = world().paths.len();
    let n_res = world().resources.len();
    prop_oneof![
        3 => (0..ACTORS, 1..ACTORS, 0u32..60, prop::option::weighted(0.8, 1u32..240), perms()).prop_map(
            |(caller, address, start, length, perms)| Op::Entity { caller, address, start, length, perms }
        ),
        6 => (prop_oneof![Just(0), 1..ACTORS], 1..ACTORS, 0..n_paths, prop::option::weighted(0.3, 0..n_res), 0u32..90, 1u32..180, any::<bool>())
            .prop_map(|(caller, target, path, exclude, start, length, ordered)| Op::Rule {
                caller, target, path, exclude, start, length, ordered
            }),
        1 => (0..ACTORS, 0..8usize).prop_map(|(caller, rule)| Op::RevokeRule { caller, rule }),
        1 => (1..ACTORS, 1..ACTORS).prop_map(|(caller, address)| Op::RevokeEntity { caller, address }),
        3 => (1..ACTORS, 0..8usize, 0..n_res, action()).prop_map(|(target, rule, resource, action)| Op::Verify {
            target, rule, resource, action
        }),
        8 => (0..6usize, 0..12usize).prop_map(|(rule, index)| Op::Walk { rule, index }),
        4 => (0..6usize, 1..ACTORS, 1..6usize, 0u32..90, 1u32..180).prop_map(|(rule, target, keep, start, length)| {
            Op::Redelegate { rule, target, keep, start, length }
        }),
        1 => (0..ACTORS, 1..2 * ACTORS).prop_map(|(caller, address)| Op::RevokeEntity { caller, address }),
    ]
}

/// Ops with the minute at which each happens (non-decreasing).
pub fn scenario() -> impl Strategy<Value = Vec<(u32, Op)>> {
    prop::collection::vec((0u32..8, op()), 1..40).prop_map(|steps| {
        let mut t = 0;
        steps
            .into_iter()
            .map(|(dt, op)| {
                t += dt;
                (t, op)
            })
            .collect()
    })
}

/// Whether `holder` can perform (resource, action) through `rule` at some
/// time in its window, with the pointer placed just before `resource`.
fn reachable_via(state: &ContractState, rule: &AccessRule, from: SimTime, resource: &Iri, action: Action) -> bool {
    let w = world();
    let mut pointers = PointerStore::new();
    if let Some(i) = rule.implications.iter().position(|r| r == resource) {
        pointers.advance(&rule.rule_id, i);
    }
    let entity_start = state.entity(&rule.target).map(|e| e.start).unwrap_or(SimTime::ZERO);
    let at = from.max(rule.start).max(entity_start);
    verify_access(state, &w.catalog, &pointers, &rule.target, &rule.rule_id, resource, action, at).is_allow()
}

pub fn check(steps: &[(u32, Op)]) -> Result<(), TestCaseError> {
    let w = world();
    let mut state = ContractState::genesis([root()]);
    let mut pointers = PointerStore::new();
    let mut rules: Vec<RuleId> = Vec::new();
    let mut created_calls: BTreeMap<RuleId, (Address, ContractCall)> = BTreeMap::new();
    let mut revoked_rules: Vec<RuleId> = Vec::new();
    let mut revoked_entities: Vec<Address> = Vec::new();

    // actors 3 and 4 hold no read permission, so paths can be delegated to
    // them without the destination's points
    for i in 1..ACTORS {
        let permissions = if i < 3 {
            [Permission::Read, Permission::Delegate].into()
        } else {
            [Permission::Delegate].into()
        };
        let call = ContractCall::CreateEntity {
            address: actor(i),
            start: SimTime::ZERO,
            expiry: None,
            permissions,
        };
        state.apply(&w.catalog, &root(), &call, SimTime::ZERO).unwrap();
    }

    for (minute, op) in steps {
        let now = minutes(*minute);
        match op {
            Op::Entity {
                caller,
                address,
                start,
                length,
                perms,
            } => {
                let call = ContractCall::CreateEntity {
                    address: actor(*address + ACTORS),
                    start: minutes(*start),
                    expiry: length.map(|l| minutes(start + l)),
                    permissions: perms.iter().copied().collect::<Permissions>(),
                };
                let before = state.clone();
                let r = state.apply(&w.catalog, &actor(*caller), &call, now);
                if r.is_err() {
                    prop_assert_eq!(&state, &before, "failed call changed state");
                }
                // (d) a revoked address can never be re-created
                if revoked_entities.contains(&actor(*address + ACTORS)) {
                    prop_assert!(r.is_err());
                }
            }
            Op::Rule {
                caller,
                target,
                path,
                exclude,
                start,
                length,
                ordered,
            } => {
                let implications = w.paths[*path].clone();
                let call = ContractCall::CreateAccessRule {
                    target: actor(*target),
                    destination: implications.last().unwrap().clone(),
                    exclusions: exclude.iter().map(|i| w.resources[*i].clone()).collect(),
                    implications,
                    start: minutes(*start),
                    expiry: minutes(start + length),
                    order_enforced: *ordered,
                };
                create_rule(&mut state, actor(*caller), call, now, &mut rules, &mut created_calls, &revoked_rules)?;
            }
            Op::Redelegate {
                rule,
                target,
                keep,
                start,
                length,
            } => {
                let Some(held) = rules.get(*rule).and_then(|id| state.rule(id)) else { continue };
                let mut implications = held.implications.clone();
                let rooms: Vec<usize> = (0..implications.len())
                    .filter(|&i| w.catalog.kind(&implications[i]) == Some(ResourceKind::Room))
                    .collect();
                if let Some(&cut) = rooms.get(*keep - 1) {
                    implications.truncate(cut + 1);
                }
                let call = ContractCall::CreateAccessRule {
                    target: actor(*target),
                    destination: implications.last().unwrap().clone(),
                    implications,
                    exclusions: held.exclusions.clone(),
                    start: minutes(*start),
                    expiry: minutes(start + length),
                    order_enforced: true,
                };
                create_rule(&mut state, held.target, call, now, &mut rules, &mut created_calls, &revoked_rules)?;
            }
            Op::RevokeRule { caller, rule } => {
                let Some(id) = rules.get(*rule).copied() else { continue };
                let call = ContractCall::RevokeRule { rule_id: id };
                if state.apply(&w.catalog, &actor(*caller), &call, now).is_ok() {
                    revoked_rules.push(id);
                    // (d) the same creation is refused forever; a revoked
                    // target or caller may be reported first
                    let (sender, original) = &created_calls[&id];
                    let before = state.clone();
                    let again = state.apply(&w.catalog, sender, original, now);
                    prop_assert!(again.is_err(), "{:?}", again);
                    prop_assert_eq!(&state, &before);
                    let ContractCall::CreateAccessRule { target, .. } = original else { unreachable!() };
                    let live = |a: &Address| state.entity(a).is_some_and(|e| e.valid && e.active_at(now));
                    if live(sender) && live(target) {
                        prop_assert!(matches!(again, Err(ContractError::RuleRevokedPermanently(_))), "{:?}", again);
                    }
                }
            }
            Op::RevokeEntity { caller, address } => {
                let call = ContractCall::RevokeEntity {
                    address: actor(*address),
                };
                if state.apply(&w.catalog, &actor(*caller), &call, now).is_ok() {
                    revoked_entities.push(actor(*address));
                    let recreate = ContractCall::CreateEntity {
                        address: actor(*address),
                        start: now,
                        expiry: None,
                        permissions: Permissions::new(),
                    };
                    let again = state.apply(&w.catalog, &root(), &recreate, now);
                    prop_assert!(matches!(again, Err(ContractError::AddressRevoked(_))), "{:?}", again);
                }
            }
            Op::Verify {
                target,
                rule,
                resource,
                action,
            } => {
                let id = rules.get(*rule).copied().unwrap_or(RuleId([7; 32]));
                let res = &w.resources[*resource];
                verify_and_check(&state, &mut pointers, &actor(*target), &id, res, *action, now, &revoked_rules, &revoked_entities)?;
            }
            Op::Walk { rule, index } => {
                let Some(id) = rules.get(*rule).copied() else { continue };
                let r = state.rule(&id).unwrap();
                let Some(res) = r.implications.get(*index).cloned() else { continue };
                verify_and_check(&state, &mut pointers, &r.target, &id, &res, Action::Open, now, &revoked_rules, &revoked_entities)?;
            }
        }
    }
    Ok(())
}

/// Applies a rule creation and, when it succeeds for a non-root sender,
/// checks that every grant is one the sender could already exercise.
fn create_rule(
    state: &mut ContractState,
    sender: Address,
    call: ContractCall,
    now: SimTime,
    rules: &mut Vec<RuleId>,
    created_calls: &mut BTreeMap<RuleId, (Address, ContractCall)>,
    revoked_rules: &[RuleId],
) -> Result<(), TestCaseError> {
    let w = world();
    let before = state.clone();
    match state.apply(&w.catalog, &sender, &call, now) {
        Ok(CallOutcome::RuleCreated { rule_id: id }) => {
            prop_assert!(!revoked_rules.contains(&id));
            // (e) no amplification
            if !before.is_root(&sender) {
                let new_rule = state.rule(&id).unwrap();
                let held: Vec<AccessRule> = before
                    .rules()
                    .filter(|r| r.target == sender && r.valid && now <= r.expiry)
                    .collect();
                for res in &w.resources {
                    for a in [Action::Open, Action::Read, Action::Write] {
                        if reachable_via(state, &new_rule, now, res, a) {
                            let covered = held
                                .iter()
                                .any(|h| h.implications.contains(res) && a == Action::Open || reachable_via(&before, h, now, res, a));
                            prop_assert!(covered, "{} {:?} not held by creator", res, a);
                        }
                    }
                }
            }
            rules.push(id);
            created_calls.insert(id, (sender, call));
        }
        Ok(other) => return Err(TestCaseError::fail(format!("unexpected {other:?}"))),
        Err(_) => prop_assert_eq!(&*state, &before, "failed call changed state"),
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn verify_and_check(
    state: &ContractState,
    pointers: &mut PointerStore,
    target: &Address,
    id: &RuleId,
    resource: &Iri,
    action: Action,
    now: SimTime,
    revoked_rules: &[RuleId],
    revoked_entities: &[Address],
) -> Result<(), TestCaseError> {
    let w = world();
    let before_state = state.clone();
    let before_pointers = pointers.clone();
    let d = verify_access(state, &w.catalog, pointers, target, id, resource, action, now);
    // (a) verification is pure
    prop_assert_eq!(state, &before_state);
    prop_assert_eq!(&*pointers, &before_pointers);
    if let (Some(rule), Some(entity)) = (state.rule(id), state.entity(target)) {
        // (c) outside either validity window nothing is allowed
        let outside = now < rule.start
            || now > rule.expiry
            || now < entity.start
            || entity.expiry.is_some_and(|e| now > e);
        if outside {
            prop_assert!(!d.is_allow(), "allowed outside window: {:?}", d);
        }
        // (b) an ordered rule only opens the next door
        if rule.order_enforced && action == Action::Open && w.catalog.kind(resource) == Some(ResourceKind::Door) {
            let pointer = pointers.get(id);
            let expected = (pointer..rule.implications.len()).find(|&i| w.catalog.is_door(&rule.implications[i]));
            let index = rule.implications.iter().position(|r| r == resource);
            if index.is_some() && index != expected {
                prop_assert!(!d.is_allow(), "door {} opened out of order", resource);
            }
        }
    }
    // (d) revoked rules and entities deny forever
    if revoked_rules.contains(id) || revoked_entities.contains(target) {
        prop_assert!(!d.is_allow());
    }
    if let Decision::Allow { advance_to: Some(p) } = d {
        pointers.advance(id, p);
    }
    Ok(())
}
