//! Every cargo example runs to completion.

mod parse_model {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/parse_model.rs"));
}

#[test]
fn parse_model_example_runs() {
    parse_model::run_example().expect("parse_model example should run");
}

mod ahp_weights {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/ahp_weights.rs"));
}

#[test]
fn ahp_weights_example_runs() {
    ahp_weights::run_example().expect("ahp_weights example should run");
}

mod plan_paths {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/plan_paths.rs"));
}

#[test]
fn plan_paths_example_runs() {
    plan_paths::run_example().expect("plan_paths example should run");
}

mod grant_and_verify {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/grant_and_verify.rs"));
}

#[test]
fn grant_and_verify_example_runs() {
    grant_and_verify::run_example().expect("grant_and_verify example should run");
}

mod ledger_replay {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/ledger_replay.rs"));
}

#[test]
fn ledger_replay_example_runs() {
    ledger_replay::run_example().expect("ledger_replay example should run");
}

mod simulate_day {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/simulate_day.rs"));
}

#[test]
fn simulate_day_example_runs() {
    simulate_day::run_example().expect("simulate_day example should run");
}

mod scaling_study {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/scaling_study.rs"));
}

#[test]
fn scaling_study_example_runs() {
    scaling_study::run_example().expect("scaling_study example should run");
}

mod json_api {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/json_api.rs"));
}

#[test]
fn json_api_example_runs() {
    json_api::run_example().expect("json_api example should run");
}
