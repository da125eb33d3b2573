// One simulated meeting day per profile: requests, occupancy, confirmation
// delays, fees and verify latency.

use std::error::Error;

use pathgate::ledger::LedgerConfig;
use pathgate::sim::{simulate_day, summarize, DayKind, DayProfile, WorkloadConfig};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let ledger = LedgerConfig::default();
    for kind in DayKind::ALL {
        let runs: Vec<_> = (0..2)
            .map(|seed| simulate_day(&DayProfile::preset(kind), &WorkloadConfig::default(), &ledger, seed).map(|r| r.metrics))
            .collect::<Result<_, _>>()?;
        for m in &runs {
            println!(
                "{kind:<7} seed {}: {} meetings, {} participants, {} requests, peak {}, {} blocks",
                m.seed, m.meetings, m.participants, m.requests, m.peak_occupancy, m.blocks
            );
        }
        let s = summarize(&runs);
        println!(
            "{kind:<7} mean: {:.2} requests/participant, entity {:.2} s / {:.4} USD, rule {:.2} s / {:.4} USD, verify {:.1} ms\n",
            s.requests_per_participant,
            s.avg_entity_delay_s,
            s.avg_entity_fee_usd,
            s.avg_rule_delay_s,
            s.avg_rule_fee_usd,
            s.verify_latency_mean_ms
        );
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
