// Verify throughput and latency as offered load and node count grow.

use std::error::Error;

use pathgate::cli::SCALING_LOADS;
use pathgate::ledger::LedgerConfig;
use pathgate::sim::scaling_study;
use pathgate::time::SimTime;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let capacity = LedgerConfig::default().per_node_capacity;
    let rows = scaling_study(&SCALING_LOADS, &[1, 2, 4], &[0, 1, 2], capacity, SimTime::from_minutes(10.0));
    println!("nodes  offered/min  served/min  latency ms");
    for r in rows {
        println!("{:>5}  {:>11.0}  {:>10.0}  {:>10.1}", r.nodes, r.offered_per_minute, r.throughput_per_minute, r.mean_latency_ms);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
