// T-sequences, the two completion algorithms and return paths.

use petri_h1s::behavior::ExplorationLimits;
use petri_h1s::fixtures::fixture;
use petri_h1s::reversibility::{algo_sc1, algo_sc2, check_reversibility, find_tsequence, return_path};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let s = fixture("fig18").ok_or("missing fixture")?;
    let net = &s.net;
    let sr = find_tsequence(&s, 4).ok_or("no T-sequence")?.sequence;
    println!("T-sequence: {}", net.format_sequence(&sr));

    let t3 = net.transition("t3")?;
    let st = algo_sc1(&s, &sr, t3)?;
    let mut alpha = vec![t3];
    alpha.extend(st.iter());
    let rest = algo_sc2(&s, &alpha, &sr)?;
    println!("t3 | {} | {}", net.format_sequence(&st), net.format_sequence(&rest));

    let sigma = net.parse_sequence("t3 t4 t5 t2 t1")?;
    let back = return_path(&s, &sr, &sigma)?;
    println!("back from {}: {}", net.format_sequence(&sigma), net.format_sequence(&back));

    for name in ["fig18", "fig21"] {
        let s = fixture(name).ok_or("missing fixture")?;
        println!("{name}: {:?}", check_reversibility(&s, 4, ExplorationLimits::default()));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
