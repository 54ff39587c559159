// Explicit reachability graph, graph-based verdicts and DOT output.

use petri_h1s::behavior::{build_rg, oracle_home_state, oracle_live, oracle_reversible, ExplorationLimits};
use petri_h1s::fixtures::fixture;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for name in ["fig1", "fig7", "fig21"] {
        let s = fixture(name).ok_or("missing fixture")?;
        let rg = build_rg(&s, ExplorationLimits::default());
        println!(
            "{name}: {} markings, live {}, reversible {}, home state {}",
            rg.nodes.len(),
            oracle_live(&rg, &s.net)?,
            oracle_reversible(&rg)?,
            oracle_home_state(&rg)?
        );
    }
    let s = fixture("fig1").ok_or("missing fixture")?;
    let dot = build_rg(&s, ExplorationLimits::default()).to_dot(&s.net);
    println!("{dot}");
    assert!(dot.starts_with("digraph"));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
