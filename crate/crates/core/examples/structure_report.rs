// Net classes, siphons, semiflows and structural bounds.

use petri_h1s::fixtures::gen_swimming_pool;
use petri_h1s::report::bounds_table;
use petri_h1s::structure::{classify, minimal_siphons, semiflows, SemiflowKind};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let s = gen_swimming_pool(2, 1, 1);
    let net = &s.net;
    let c = classify(net);
    println!(
        "H1S-WMG≤: {}, shared places: {}, strongly connected: {}",
        c.h1s_wmg_le, c.shared_place_count, c.strongly_connected
    );
    assert!(c.h1s_wmg_le);

    for f in semiflows(net, SemiflowKind::P, 64)? {
        let names: Vec<String> = f
            .support()
            .into_iter()
            .map(|p| format!("{}·{}", f.vector[p], net.place_name(p)))
            .collect();
        println!("P-semiflow {}", names.join(" + "));
    }
    let siphons = minimal_siphons(net, 64)?;
    println!("{} minimal siphons", siphons.len());
    for row in bounds_table(&s) {
        println!("{:<8} init {} bound {:?}", row.place, row.initial, row.upper);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
