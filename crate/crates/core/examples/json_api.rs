// The access service through its JSON request format, as the HTTP layer
// sees it.

use std::error::Error;

use pathgate::dataset;
use pathgate::ledger::LedgerConfig;
use serde_json::{json, Value};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let mut svc = dataset::example_service(LedgerConfig::default());
    let mut call = |endpoint: &str, body: Value| -> Result<Value, Box<dyn Error>> {
        let request = json!({ "endpoint": endpoint, "body": body });
        let response: Value = serde_json::from_str(&svc.handle_json(&request.to_string()))?;
        println!("> {request}\n< {response}\n");
        Ok(response)
    };

    let plan = call("plan", json!({ "from": "MainEntrance", "to": "Room-1-1-106" }))?;
    let path = &plan["paths"][0];
    call(
        "entities",
        json!({ "delegator": "manager", "token": "manager-token", "delegate": "bob",
                "start": 0.0, "expiry": 64800.0, "permissions": ["read"] }),
    )?;
    let rule = call(
        "rules",
        json!({ "delegator": "manager", "token": "manager-token", "delegate": "bob",
                "path_id": path["path_id"], "exclusions": [], "start": 36000.0, "expiry": 39600.0 }),
    )?;
    call("clock", json!({ "until": 36000.0 }))?;
    for resource in path["sequence"].as_array().ok_or("no sequence")?.iter().skip(1) {
        call("verify", json!({ "delegate": "bob", "rule_id": rule["rule_id"], "resource": resource, "action": "open" }))?;
    }
    call("verify", json!({ "delegate": "bob", "rule_id": rule["rule_id"], "resource": "Door-1-1-144", "action": "open" }))?;
    call("entities", json!({ "delegator": "manager", "token": "wrong", "delegate": "eve", "start": 0.0, "expiry": 100.0, "permissions": [] }))?;
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
