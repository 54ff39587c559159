#![allow(dead_code)]

use std::collections::BTreeMap;

use petri_h1s::behavior::{build_rg, oracle_live, ExplorationLimits};
use petri_h1s::net::{Marking, Net, System, Transition};
use rand::seq::SliceRandom;
use rand::Rng;

/// Choice-free: every place has at most one output transition.
pub fn random_cf(rng: &mut impl Rng) -> System {
    let np = rng.gen_range(1..=6);
    let nt = rng.gen_range(1..=6);
    let mut b = Net::builder();
    for p in 0..np {
        b.place(format!("p{p}"));
    }
    for t in 0..nt {
        b.transition(format!("t{t}"));
    }
    for p in 0..np {
        if rng.gen_bool(0.8) {
            let t = rng.gen_range(0..nt);
            b.arc(format!("p{p}"), format!("t{t}"), rng.gen_range(1..=3));
        }
        for t in 0..nt {
            if rng.gen_bool(0.3) {
                b.arc(format!("t{t}"), format!("p{p}"), rng.gen_range(1..=3));
            }
        }
    }
    let m0 = Marking((0..np).map(|_| rng.gen_range(0..=5)).collect());
    System::new(b.build().expect("generated net is well formed"), m0).expect("sized marking")
}

/// A ring of transitions with chords and one shared place `s`.
///
/// With `wmg_le` every other place has one input and one output, so deleting
/// `s` leaves a strongly connected WMG≤. Otherwise chord places may collect
/// from two transitions.
pub fn random_h1s(rng: &mut impl Rng, wmg_le: bool) -> System {
    let nt = rng.gen_range(2..=4);
    let mut b = Net::builder();
    for t in 0..nt {
        b.transition(format!("t{t}"));
    }
    let mut tokens = Vec::new();
    for i in 0..nt {
        let p = format!("r{i}");
        b.place(&p);
        b.arc(format!("t{i}"), &p, rng.gen_range(1..=2));
        b.arc(&p, format!("t{}", (i + 1) % nt), rng.gen_range(1..=2));
        tokens.push(rng.gen_range(0..=3));
    }
    for k in 0..rng.gen_range(0..=2) {
        let p = format!("c{k}");
        let to = rng.gen_range(0..nt);
        let mut from: Vec<usize> = (0..nt).collect();
        from.shuffle(rng);
        let fan_in = if wmg_le { 1 } else { rng.gen_range(1..=2) };
        b.place(&p);
        for &f in &from[..fan_in] {
            b.arc(format!("t{f}"), &p, rng.gen_range(1..=2));
        }
        b.arc(&p, format!("t{to}"), rng.gen_range(1..=2));
        tokens.push(rng.gen_range(0..=3));
    }
    let mut ts: Vec<usize> = (0..nt).collect();
    ts.shuffle(rng);
    let outs = rng.gen_range(2..=nt.min(3));
    let w = rng.gen_range(1..=2);
    b.place("s");
    for &t in &ts[..outs] {
        b.arc("s", format!("t{t}"), w);
    }
    ts.shuffle(rng);
    for &t in &ts[..rng.gen_range(1..=2)] {
        b.arc(format!("t{t}"), "s", rng.gen_range(1..=2));
    }
    tokens.push(rng.gen_range(0..=4));
    System::new(b.build().expect("generated net is well formed"), Marking(tokens)).expect("sized marking")
}

/// Live according to a complete reachability graph of at most `cap` markings.
pub fn certified_live(s: &System, cap: usize) -> bool {
    let rg = build_rg(s, ExplorationLimits::nodes(cap));
    rg.is_complete() && oracle_live(&rg, &s.net).unwrap_or(false)
}

/// A uniformly chosen firing sequence of at most `len` steps from `m`.
pub fn random_walk(rng: &mut impl Rng, s: &System, len: usize) -> Vec<Transition> {
    let mut m = s.m0.clone();
    let mut out = Vec::new();
    for _ in 0..rng.gen_range(0..=len) {
        let en = s.net.enabled_transitions(&m);
        let Some(&t) = en.choose(rng) else { break };
        m = s.net.fire(&m, t).expect("enabled");
        out.push(t);
    }
    out
}

/// Rows of the `Subject To` section of an LP file: name -> (coefficients, relation, rhs).
pub fn read_lp_rows(text: &str) -> BTreeMap<String, (BTreeMap<String, i64>, String, i64)> {
    let mut rows = BTreeMap::new();
    let mut inside = false;
    for line in text.lines().map(str::trim) {
        if line.starts_with('\\') || line.is_empty() {
            continue;
        }
        match line {
            "Subject To" => inside = true,
            "Bounds" | "Generals" | "End" => inside = false,
            _ if inside => {
                let (name, body) = line.split_once(": ").expect("named row");
                let tokens: Vec<&str> = body.split_whitespace().collect();
                let (lhs, tail) = tokens.split_at(tokens.len() - 2);
                let mut coefs = BTreeMap::new();
                let (mut sign, mut coef) = (1, 1);
                for tok in lhs {
                    match *tok {
                        "+" => sign = 1,
                        "-" => sign = -1,
                        t => match t.parse::<i64>() {
                            Ok(k) => coef = k,
                            Err(_) => {
                                coefs.insert(t.to_string(), sign * coef);
                                (sign, coef) = (1, 1);
                            }
                        },
                    }
                }
                rows.insert(name.to_string(), (coefs, tail[0].to_string(), tail[1].parse().expect("integer rhs")));
            }
            _ => {}
        }
    }
    rows
}
