// Firing rule, incidence matrix and residues on a small weighted net.

use petri_h1s::fixtures::fixture;
use petri_h1s::net::{parikh, residue};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let s = fixture("fig1").ok_or("missing fixture")?;
    let net = &s.net;
    println!("M0 = {}", net.format_marking(&s.m0));

    let seq = net.parse_sequence("t2 t1 t3")?;
    let m = s.fire_sequence(&seq)?;
    println!("after {}: {}", net.format_sequence(&seq), net.format_marking(&m));

    let inc = net.incidence();
    let y = parikh(&seq, net.num_transitions());
    println!("I·P(σ) = {:?}", inc.apply(&y));
    assert_eq!(inc.shift(&s.m0, &y), Some(m));

    // residues only look at the letters, so any index alphabet works
    let a = [0, 2, 1, 2, 0, 2, 1, 2];
    let b = [0, 1, 1, 2, 1];
    println!("τ∸σ = {:?}, σ∸τ = {:?}", residue(&a, &b).0, residue(&b, &a).0);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
