// Parse Turtle, query the triple store, and inspect the aligned example
// building: rooms, doors, zones, points and how far each setpoint reaches.

use std::error::Error;

use pathgate::dataset;
use pathgate::rdf::{parse_turtle, Iri, Term};
use pathgate::vocab;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let g = parse_turtle(dataset::APPENDIX_A1)?;
    println!("sub-graph: {} triples", g.len());
    let vav = Iri::new(format!("{}VAV-1-12", vocab::BUILDING1))?;
    for t in g.match_pattern(Some(&vav), None, None) {
        let object = match &t.object {
            Term::Iri(o) => g.prefixes().display(o),
            other => format!("{other:?}"),
        };
        println!("  {} {} {object}", g.prefixes().display(&t.subject), g.prefixes().display(&t.predicate));
    }

    let b = dataset::example_building()?;
    println!(
        "\naligned building: {} triples, {} rooms, {} doors, {} points",
        b.graph().len(),
        b.rooms().len(),
        b.doors().len(),
        b.points().len()
    );
    let room = b.lookup("Room-1-1-121").ok_or("no Room-1-1-121")?;
    println!("{} is in {} ({})", b.short(&room), b.short(&b.zone_node_of(&room)?), b.security_zone_of(&room)?);
    for p in b.points_in(&room)? {
        println!("  point {} ({})", b.short(&p.point), b.short(&p.point_type));
    }
    let doors: Vec<String> = b.adjacent_resources(&room).iter().map(|d| b.short(d)).collect();
    println!("  doors {}", doors.join(", "));

    println!("\ncontrol fanout per setpoint:");
    for p in b.points().iter().filter(|p| p.iri.local_name().contains("Setpoint")) {
        println!("  {:<28} {}", p.iri.local_name(), b.control_fanout(&p.iri)?);
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
