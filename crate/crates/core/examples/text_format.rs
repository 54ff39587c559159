// Reading and writing the text format, and a JSON report.

use petri_h1s::dsl::{parse, to_text};
use petri_h1s::liveness::check_liveness;
use petri_h1s::report::{liveness_report, AnalysisReport};

const NET: &str = "
# a producer and a consumer sharing a buffer of two slots
place free init 2
place full
trans produce
trans consume
arc free -> produce
arc produce -> full
arc full -> consume
arc consume -> free
";

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let s = parse(NET)?;
    let text = to_text(&s);
    print!("{text}");
    assert_eq!(parse(&text)?, s);

    let mut report = AnalysisReport::new("buffer");
    report.liveness = Some(liveness_report(&s, &check_liveness(&s)));
    println!("{}", report.to_json());

    let bad = parse("place p\narc p -> q");
    println!("{}", bad.unwrap_err());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
