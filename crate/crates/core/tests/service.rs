//! The JSON API end to end on the example building, in process and over HTTP.

use std::collections::BTreeSet;

use pathgate::contracts::{Action, ContractError, DenyReason, Permission, RuleId};
use pathgate::dataset;
use pathgate::ledger::{LedgerConfig, TxStatus};
use pathgate::service::{
    AccessService, ApiResponse, EntityRequest, ErrorKind, PlanRequest, RevokeRequest, RuleRequest, Status,
    VerifyRequest,
};
use pathgate::time::SimTime;

const PATHWAY_2: [&str; 9] = [
    "MainEntrance",
    "",
    "Room-1-1-1ST3",
    "",
    "Room-1-1-184",
    "",
    "Room-1-1-150",
    "",
    "Room-1-1-144",
];

fn settle(svc: &mut AccessService, r: &ApiResponse) {
    assert_eq!(r.status, Status::Ok, "{r:?}");
    let status = svc.settle(&r.tx_id.unwrap()).unwrap();
    assert!(matches!(status, TxStatus::Applied { .. }), "{status:?}");
}

fn plan_best(svc: &mut AccessService) -> (String, Vec<String>) {
    let r = svc.plan(&PlanRequest {
        from: "MainEntrance".into(),
        to: "Room-1-1-144".into(),
        max_paths: None,
        max_depth: None,
    });
    assert_eq!(r.status, Status::Ok);
    assert_eq!(r.truncated, Some(false));
    let best = &r.paths.as_ref().unwrap()[0];
    (best.path_id.clone(), best.sequence.clone())
}

fn visitor(svc: &mut AccessService, name: &str, expiry: Option<SimTime>) -> ApiResponse {
    svc.add_entity(&EntityRequest {
        delegator: "manager".into(),
        token: "manager-token".into(),
        delegate: name.into(),
        start: SimTime::ZERO,
        expiry,
        permissions: BTreeSet::from([Permission::Read]),
        visitor: true,
    })
}

fn rule(svc: &mut AccessService, delegate: &str, path_id: &str) -> ApiResponse {
    svc.add_rule(&RuleRequest {
        delegator: "manager".into(),
        token: "manager-token".into(),
        delegate: delegate.into(),
        path_id: path_id.into(),
        exclusions: vec![],
        start: SimTime::from_hours(1.0),
        expiry: SimTime::from_hours(3.0),
        order_enforced: None,
    })
}

fn verify(svc: &mut AccessService, who: &str, rule_id: RuleId, resource: &str, action: Action) -> ApiResponse {
    svc.verify(&VerifyRequest {
        delegate: who.into(),
        rule_id,
        resource: resource.into(),
        action,
    })
}

/// Visitor with a mined entity and a mined rule over the cheapest path.
fn granted(name: &str) -> (AccessService, RuleId, Vec<String>) {
    let mut svc = dataset::example_service(LedgerConfig::default());
    let (path_id, seq) = plan_best(&mut svc);
    let r = visitor(&mut svc, name, Some(SimTime::from_hours(10.0)));
    settle(&mut svc, &r);
    let r = rule(&mut svc, name, &path_id);
    let id = r.rule_id.unwrap();
    settle(&mut svc, &r);
    (svc, id, seq)
}

#[test]
fn plan_ranks_cheapest_path_first() {
    let mut svc = dataset::example_service(LedgerConfig::default());
    let (id, seq) = plan_best(&mut svc);
    for (got, want) in seq.iter().zip(PATHWAY_2) {
        if !want.is_empty() {
            assert!(got.ends_with(want), "{got} vs {want}");
        }
    }
    assert_eq!(seq.len(), PATHWAY_2.len());
    assert!(svc.cached_path(&id).is_some());
}

#[test]
fn in_order_walk_is_allowed_and_advances_pointer() {
    let (mut svc, id, seq) = granted("visitor-1");
    svc.advance(SimTime::from_hours(1.0)).unwrap();
    // doors sit at odd positions of the sequence
    for (n, door) in seq.iter().skip(1).step_by(2).enumerate() {
        let r = verify(&mut svc, "visitor-1", id, door, Action::Open);
        assert_eq!(r.decision.as_deref(), Some("allow"), "door {n} {door}: {r:?}");
    }
    assert_eq!(svc.pointers().get(&id), seq.len() - 1);
    // rooms already passed stay open
    let r = verify(&mut svc, "visitor-1", id, &seq[2], Action::Open);
    assert_eq!(r.decision.as_deref(), Some("allow"));
    assert_eq!(svc.verify_log().len(), 5);
}

#[test]
fn skipping_a_door_is_denied() {
    let (mut svc, id, seq) = granted("visitor-2");
    svc.advance(SimTime::from_hours(1.0)).unwrap();
    let r = verify(&mut svc, "visitor-2", id, &seq[3], Action::Open);
    assert_eq!(r.status, Status::Denied);
    assert_eq!(r.reason, Some(DenyReason::OutOfOrder));
    assert_eq!(svc.pointers().get(&id), 0);
}

#[test]
fn destination_points_follow_entity_permissions() {
    let (mut svc, id, _) = granted("visitor-3");
    svc.advance(SimTime::from_hours(1.0)).unwrap();
    let b = svc.building();
    let point = b.points_in(&b.lookup("Room-1-1-144").unwrap()).unwrap()[0].point.clone();
    let point = b.short(&point);
    assert_eq!(verify(&mut svc, "visitor-3", id, &point, Action::Read).decision.as_deref(), Some("allow"));
    let w = verify(&mut svc, "visitor-3", id, &point, Action::Write);
    assert_eq!(w.reason, Some(DenyReason::Permission));
    let other = verify(&mut svc, "visitor-3", id, "Room-1-1-120", Action::Open);
    assert_eq!(other.reason, Some(DenyReason::NotGranted));
}

#[test]
fn lead_time_and_expiry_bound_the_rule() {
    let (mut svc, id, seq) = granted("visitor-4");
    let rule = svc.ledger().read_rule(&id).unwrap();
    assert_eq!(rule.start, SimTime::from_minutes(30.0));
    svc.advance(SimTime::from_minutes(29.0)).unwrap();
    assert_eq!(verify(&mut svc, "visitor-4", id, &seq[1], Action::Open).reason, Some(DenyReason::NotYetValid));
    svc.advance(SimTime::from_hours(3.5)).unwrap();
    assert_eq!(verify(&mut svc, "visitor-4", id, &seq[1], Action::Open).reason, Some(DenyReason::Expired));
}

#[test]
fn revoked_rule_is_denied_and_cannot_be_recreated() {
    let (mut svc, id, seq) = granted("visitor-5");
    let r = svc.revoke(&RevokeRequest {
        caller: "manager".into(),
        token: "manager-token".into(),
        rule_id: Some(id),
        address: None,
    });
    settle(&mut svc, &r);
    svc.advance(SimTime::from_hours(1.0)).unwrap();
    assert_eq!(verify(&mut svc, "visitor-5", id, &seq[1], Action::Open).reason, Some(DenyReason::RuleRevoked));
    let path_id = plan_best(&mut svc).0;
    let again = rule(&mut svc, "visitor-5", &path_id);
    assert_eq!(again.status, Status::Error);
    let err = again.error.unwrap();
    assert_eq!(err.kind, ErrorKind::Contract);
    assert!(matches!(err.contract, Some(ContractError::RuleRevokedPermanently(_))), "{:?}", err.contract);
}

#[test]
fn entity_requests() {
    let mut svc = dataset::example_service(LedgerConfig::default());
    let missing = visitor(&mut svc, "v", None);
    assert_eq!(missing.error.unwrap().kind, ErrorKind::BadRequest);

    let r = visitor(&mut svc, "v", Some(SimTime::from_hours(2.0)));
    settle(&mut svc, &r);
    let again = visitor(&mut svc, "v", Some(SimTime::from_hours(2.0)));
    assert_eq!(again.status, Status::OkExisting);
    assert!(again.tx_id.is_none());

    let bad = svc.add_entity(&EntityRequest {
        delegator: "manager".into(),
        token: "wrong".into(),
        delegate: "w".into(),
        start: SimTime::ZERO,
        expiry: Some(SimTime::from_hours(1.0)),
        permissions: BTreeSet::new(),
        visitor: true,
    });
    assert_eq!(bad.error.unwrap().kind, ErrorKind::Unauthorized);

    // host holds no entity, so the contract rejects it on the dry run
    let unheld = svc.add_entity(&EntityRequest {
        delegator: "host".into(),
        token: "host-token".into(),
        delegate: "w".into(),
        start: SimTime::ZERO,
        expiry: Some(SimTime::from_hours(1.0)),
        permissions: BTreeSet::new(),
        visitor: true,
    });
    assert_eq!(unheld.error.unwrap().kind, ErrorKind::Contract);
    assert_eq!(svc.ledger().pending_count(), 0);
}

#[test]
fn stale_path_id_is_rejected() {
    let mut svc = dataset::example_service(LedgerConfig::default());
    let r = rule(&mut svc, "v", "0123456789abcdef");
    assert_eq!(r.error.unwrap().kind, ErrorKind::StalePath);
}

#[test]
fn json_round_trip() {
    let mut svc = dataset::example_service(LedgerConfig::default());
    let out = svc.handle_json(r#"{"endpoint":"plan","body":{"from":"MainEntrance","to":"Room-1-1-144"}}"#);
    let r: ApiResponse = serde_json::from_str(&out).unwrap();
    assert!(r.paths.unwrap().len() >= 2);
    let out = svc.handle_json(r#"{"endpoint":"nope"}"#);
    let r: ApiResponse = serde_json::from_str(&out).unwrap();
    assert_eq!(r.error.unwrap().kind, ErrorKind::BadRequest);
}

#[test]
fn http_routes() {
    use std::io::{Read, Write};

    let rt = tokio::runtime::Runtime::new().unwrap();
    let listener = rt.block_on(tokio::net::TcpListener::bind("127.0.0.1:0")).unwrap();
    let addr = listener.local_addr().unwrap();
    let app = pathgate::service::http::router(dataset::example_service(LedgerConfig::default()));
    rt.spawn(async move { axum::serve(listener, app).await.unwrap() });

    let post = |path: &str, body: &str| -> (u16, String) {
        let mut s = std::net::TcpStream::connect(addr).unwrap();
        write!(
            s,
            "POST {path} HTTP/1.1\r\nHost: x\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
            body.len()
        )
        .unwrap();
        let mut resp = String::new();
        s.read_to_string(&mut resp).unwrap();
        let code = resp[9..12].parse().unwrap();
        let body = resp.split("\r\n\r\n").nth(1).unwrap_or("").to_owned();
        (code, body)
    };
    let (code, body) = post("/plan", r#"{"from":"MainEntrance","to":"Room-1-1-144"}"#);
    assert_eq!(code, 200, "{body}");
    assert!(body.contains("path_id"));
    let (code, _) = post(
        "/entities",
        r#"{"delegator":"manager","token":"bad","delegate":"v","start":0,"permissions":[]}"#,
    );
    assert_eq!(code, 401);
    let (code, body) = post(
        "/verify",
        &format!(r#"{{"delegate":"v","rule_id":"{}","resource":"MainEntrance","action":"open"}}"#, "00".repeat(32)),
    );
    assert_eq!(code, 403, "{body}");
    assert!(body.contains("\"reason\":\"unknown\""));
}
