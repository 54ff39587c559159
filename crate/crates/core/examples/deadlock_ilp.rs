// Liveness of the swimming pool through one deadlock ILP per instance.

use std::time::Instant;

use petri_h1s::fixtures::gen_swimming_pool;
use petri_h1s::liveness::{check_liveness, deadlock_ilp, LivenessVerdict};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for (a, b, c) in [(1, 1, 1), (2, 1, 1), (14, 10, 5), (15, 10, 6), (15, 10, 5)] {
        let s = gen_swimming_pool(a, b, c);
        let t = Instant::now();
        let v = check_liveness(&s);
        let label = match &v {
            LivenessVerdict::Live => "live".to_string(),
            LivenessVerdict::NonLive { deadlock, .. } => format!("deadlock at {}", s.net.format_marking(deadlock)),
            other => format!("{other:?}"),
        };
        println!("({a},{b},{c}): {label} [{:.0?}]", t.elapsed());
    }
    let ilp = deadlock_ilp(&gen_swimming_pool(1, 1, 1))?;
    for c in &ilp.constraints {
        println!("{:?} for {}", c.shape, ilp.theta.transformed.net.transition_name(c.transition));
    }
    println!("LP file: {} lines", exact_ilp::export_lp(&ilp.model).lines().count());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
