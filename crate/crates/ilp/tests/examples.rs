mod small_knapsack {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/small_knapsack.rs"));
}

#[test]
fn small_knapsack_runs() {
    small_knapsack::run_example().expect("knapsack example");
}
