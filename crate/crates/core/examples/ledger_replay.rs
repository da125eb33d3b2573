// Drive the simulated ledger directly: submit calls, mine blocks, export the
// chain, replay it, and watch a tampered block fail.

use std::error::Error;

use pathgate::contracts::{Address, ContractCall, Permission, ResourceCatalog};
use pathgate::ledger::{replay, LedgerConfig, LedgerNetwork};
use pathgate::time::SimTime;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let manager = Address::from_label("manager");
    let config = LedgerConfig {
        nodes: 2,
        seed: 42,
        ..LedgerConfig::default()
    };
    let mut net = LedgerNetwork::new(config, ResourceCatalog::new(), [manager]);
    for (i, name) in ["alice", "bob", "carol", "alice"].iter().enumerate() {
        net.advance(SimTime::from_secs(i as f64 * 4.0))?;
        let r = net.submit(
            manager,
            ContractCall::CreateEntity {
                address: Address::from_label(name),
                start: SimTime::ZERO,
                expiry: Some(SimTime::from_hours(8.0)),
                permissions: [Permission::Read].into(),
            },
        )?;
        println!("submitted {name} to node {} as {}", r.node, r.tx_id);
    }
    println!("alice visible before mining: {}", net.read_entity(&Address::from_label("alice")).is_some());
    net.advance(SimTime::from_secs(60.0))?;
    for b in net.blocks() {
        println!("block {} at {} with {} txs, root {}", b.height, b.timestamp, b.transactions.len(), hex(&b.state_root));
    }
    for t in net.transactions() {
        println!("  seq {} {:?}", t.seq, t.status);
    }
    println!("gas {}", net.total_gas());

    let mut chain = net.export();
    let state = replay(&chain, net.catalog())?;
    println!("replay matches: {}", &state == net.read_state());
    chain.blocks[1].state_root[0] ^= 1;
    println!("tampered replay: {}", replay(&chain, net.catalog()).err().map(|e| e.to_string()).unwrap_or_default());
    Ok(())
}

fn hex(bytes: &[u8]) -> String {
    bytes[..6].iter().map(|b| format!("{b:02x}")).collect()
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
