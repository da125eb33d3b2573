// Point-type weights from pairwise answers, and the room costs they imply.

use std::error::Error;

use pathgate::dataset;
use pathgate::rdf::PrefixTable;
use pathgate::sensitivity::room_cost;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let prefixes = PrefixTable::building_defaults();
    let config = dataset::ahp_answers()?;
    for c in config.resolve(&prefixes)? {
        print!("{}", prefixes.display(&c.category));
        if let Some(a) = &c.ahp {
            print!("  lambda_max {:.4}  CR {:.3}", a.lambda_max, a.consistency_ratio);
        }
        println!();
        for (t, w) in c.types.iter().zip(&c.weights) {
            println!("  {:<36} {w:.3}", prefixes.display(t));
        }
    }

    let b = dataset::example_building()?;
    let weights = config.weight_table(&prefixes)?;
    println!("\nroom costs (zone ordinal + weighted points):");
    for name in ["Room-1-1-102", "Room-1-1-121", "Room-1-1-184", "Room-1-1-144"] {
        let c = room_cost(&b, &weights, &b.lookup(name).ok_or(name)?)?;
        println!("  {name:<14} {:<14} {:>6.3}", c.zone.to_string(), c.total());
        for t in &c.points {
            println!("    {:<28} w {:.3} x (1 + {}) = {:.3}", t.point.local_name(), t.weight, t.control, t.cost());
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
