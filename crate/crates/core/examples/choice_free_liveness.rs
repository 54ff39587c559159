// Choice-free systems: liveness through a repeating covering sequence, and
// the Keller confluence of two firing sequences.

use petri_h1s::behavior::{cf_liveness, check_keller, dickson_witness, ExplorationLimits};
use petri_h1s::fixtures::fixture;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let s = fixture("fig1").ok_or("missing fixture")?;
    let limits = ExplorationLimits::default();
    let (m, sigma) = dickson_witness(&s, limits).ok_or("no witness")?;
    println!(
        "from {} the sequence {} fires every transition and ends above its start",
        s.net.format_marking(&m),
        s.net.format_sequence(&sigma)
    );
    println!("verdict: {:?}", cf_liveness(&s, limits)?);

    let tau = s.net.parse_sequence("t2 t1 t3")?;
    let sigma = s.net.parse_sequence("t2 t3")?;
    assert!(check_keller(&s, &tau, &sigma)?);
    println!("τ(σ∸τ) and σ(τ∸σ) reach the same marking");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
