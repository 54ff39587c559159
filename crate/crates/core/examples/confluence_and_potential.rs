// Potential reachability through the state equation, and the confluence
// witness of live H1S-WMG≤ systems.

use petri_h1s::behavior::{confluence_witness, is_deadlock, pr_member, ExplorationLimits};
use petri_h1s::fixtures::{fixture, gen_emblem};
use petri_h1s::net::{Marking, ParikhVector};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let s = fixture("fig8").ok_or("missing fixture")?;
    let m = Marking(vec![0, 0, 2, 1, 0]);
    let y = pr_member(&s, &m)?.ok_or("not potentially reachable")?;
    println!(
        "{} = M0 + I·{:?}, deadlock: {}",
        s.net.format_marking(&m),
        y.0,
        is_deadlock(&s.with_marking(m.clone()))
    );

    let e = gen_emblem([0, 0, 0, 1, 1, 2, 0, 0, 1]);
    let w = confluence_witness(&e, &ParikhVector(vec![1, 1, 1, 1]), ExplorationLimits::default())?;
    println!(
        "confluence through {} to {}",
        e.net.format_sequence(&w.sigma),
        e.net.format_marking(&w.m_prime)
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
