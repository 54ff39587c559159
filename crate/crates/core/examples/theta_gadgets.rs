// The gadget transformation that isolates private inputs of synchronizations.

use petri_h1s::fixtures::fixture;
use petri_h1s::liveness::{expand_sequence, reduce_sequence, theta_transform};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let s = fixture("fig12").ok_or("missing fixture")?;
    let th = theta_transform(&s);
    let n = &th.transformed.net;
    for g in &th.pair_map {
        println!(
            "{} -> {}: new {} {} {}",
            s.net.place_name(g.p),
            s.net.transition_name(g.t),
            n.place_name(g.p_a),
            n.place_name(g.p_b),
            n.transition_name(g.t_p)
        );
    }
    let enabled = s.net.enabled_transitions(&s.m0);
    let alpha = &enabled[..1];
    let up = expand_sequence(&th, alpha)?;
    let down = reduce_sequence(&th, &up)?;
    println!("{} expands to {}", s.net.format_sequence(alpha), n.format_sequence(&up));
    assert_eq!(down, up);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
