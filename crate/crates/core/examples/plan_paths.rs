// Enumerate and rank every simple path from the entrance to a meeting room.

use std::error::Error;

use pathgate::dataset;
use pathgate::planner::{enumerate_paths, rank_paths, PlanOptions};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let b = dataset::example_building()?;
    let w = dataset::table2_weights()?;
    let from = b.lookup(dataset::ENTRANCE).ok_or("no entrance")?;
    let to = b.lookup("Room-1-1-144").ok_or("no Room-1-1-144")?;
    let set = enumerate_paths(&b, &from, &to, PlanOptions::default())?;
    println!("{} paths, complete: {}", set.paths.len(), set.is_complete());
    for (i, r) in rank_paths(&set.paths, &w, &b)?.iter().enumerate() {
        let rooms: Vec<&str> = r.path.rooms().map(|x| x.local_name()).collect();
        let warn = if r.zone_order_warning { "  [zone order]" } else { "" };
        println!("{:>2}. {:>7.3}  {}  {}{warn}", i + 1, r.cost.total, r.id, rooms.join(" > "));
        for room in &r.cost.per_room {
            println!("      {:<14} zone {}  points {:>7.3}", room.room.local_name(), room.sensitivity, room.point_cost);
        }
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
