// A host grants a visitor a path to a meeting room; the visitor walks it
// door by door, then the rule is revoked mid-meeting.

use std::collections::BTreeSet;
use std::error::Error;

use pathgate::contracts::{Action, Permission};
use pathgate::dataset;
use pathgate::ledger::LedgerConfig;
use pathgate::service::{EntityRequest, PlanRequest, RevokeRequest, RuleRequest, VerifyRequest};
use pathgate::time::SimTime;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let mut svc = dataset::example_service(LedgerConfig::default());
    let plan = svc.plan(&PlanRequest {
        from: dataset::ENTRANCE.into(),
        to: "Room-1-1-144".into(),
        max_paths: None,
        max_depth: None,
    });
    let path = plan.paths.and_then(|p| p.into_iter().next()).ok_or("no path")?;
    println!("path {} costs {:.3}: {}", path.path_id, path.total_cost, path.sequence.join(" > "));

    let entity = svc.add_entity(&EntityRequest {
        delegator: "manager".into(),
        token: "manager-token".into(),
        delegate: "alice".into(),
        start: SimTime::ZERO,
        expiry: Some(SimTime::from_hours(18.0)),
        permissions: BTreeSet::from([Permission::Read]),
        visitor: true,
    });
    svc.settle(&entity.tx_id.ok_or("entity not submitted")?)?;
    println!("entity for alice mined at {}", svc.now());

    let rule = svc.add_rule(&RuleRequest {
        delegator: "manager".into(),
        token: "manager-token".into(),
        delegate: "alice".into(),
        path_id: path.path_id.clone(),
        exclusions: vec![],
        start: SimTime::from_hours(10.0),
        expiry: SimTime::from_hours(11.0),
        order_enforced: None,
    });
    let rule_id = rule.rule_id.ok_or("rule not submitted")?;
    svc.settle(&rule.tx_id.ok_or("rule not submitted")?)?;
    println!("rule {rule_id} mined at {}", svc.now());

    let verify = |svc: &mut pathgate::service::AccessService, resource: &str| {
        let r = svc.verify(&VerifyRequest {
            delegate: "alice".into(),
            rule_id,
            resource: resource.into(),
            action: Action::Open,
        });
        let reason = r.reason.map(|x| format!(" ({x})")).unwrap_or_default();
        println!("  {} {resource}: {}{reason}", svc.now(), r.decision.unwrap_or_default());
    };
    let doors: Vec<String> = path.sequence.iter().skip(1).step_by(2).cloned().collect();

    println!("an hour early (the rule opens 30 minutes before the meeting):");
    svc.advance(SimTime::from_hours(9.0))?;
    verify(&mut svc, &doors[0]);
    println!("on time, skipping a door, then in order:");
    svc.advance(SimTime::from_hours(9.75))?;
    verify(&mut svc, &doors[1]);
    for door in &doors {
        verify(&mut svc, door);
    }

    let revoke = svc.revoke(&RevokeRequest {
        caller: "manager".into(),
        token: "manager-token".into(),
        rule_id: Some(rule_id),
        address: None,
    });
    svc.settle(&revoke.tx_id.ok_or("revocation not submitted")?)?;
    println!("after revocation:");
    verify(&mut svc, &path.sequence[path.sequence.len() - 1]);
    println!("gas spent: {}", svc.ledger().total_gas());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
