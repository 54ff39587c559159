//! Explicit-state behaviour: reachability graphs, brute-force oracles and the
//! constructive witnesses used to cross-check the structural results.

mod confluence;
mod graph;
mod potential;

use std::collections::HashSet;

use serde::Serialize;
use thiserror::Error;

use crate::net::{parikh, FiringSequence, Marking, NetError, ParikhVector, System, Transition};
use crate::structure::classify;

pub use confluence::{check_keller, confluence_witness, ConfluenceWitness};
pub use graph::{
    build_rg, is_deadlock, oracle_deadlock_free, oracle_home_state, oracle_live, oracle_reversible,
    ExplorationLimits, ReachabilityGraph, RgStatus,
};
pub use potential::{divisibility_deadlock_lift, initially_directed, pr_member, DirectedVerdict};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BehaviorError {
    #[error("reachability graph is truncated")]
    TruncatedGraph,
    #[error("net is not choice-free")]
    NotChoiceFree,
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("search for an enabling sequence exhausted its limits")]
    LivenessSearchExhausted,
    #[error("sequence is not feasible: {0}")]
    Infeasible(NetError),
    #[error(transparent)]
    Net(#[from] NetError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CfVerdict {
    Live,
    NonLive,
    Unknown(ExplorationLimits),
}

fn covers_all(seq: &[Transition], n: usize) -> bool {
    parikh(seq, n).iter().all(|&k| k > 0)
}

/// Closed walk through one strongly connected piece of `rg` firing every transition.
fn closed_covering_walk(rg: &ReachabilityGraph, n: usize) -> Option<(Marking, FiringSequence)> {
    let (comp, k) = rg.components();
    let mut labels = vec![vec![false; n]; k];
    for &(a, t, b) in &rg.arcs {
        if comp[a] == comp[b] {
            labels[comp[a]][t] = true;
        }
    }
    // components are visited in order of their smallest node
    let mut order: Vec<(usize, usize)> = Vec::new();
    for (i, &c) in comp.iter().enumerate() {
        if !order.iter().any(|&(_, oc)| oc == c) {
            order.push((i, c));
        }
    }
    for (start, c) in order {
        if !labels[c].iter().all(|&b| b) {
            continue;
        }
        let inside = |j: usize| comp[j] == c;
        let mut walk = Vec::new();
        let mut at = start;
        for t in 0..n {
            if walk.contains(&t) {
                continue;
            }
            let inner = |j: usize| rg.successors(j).find(|&(tt, k)| tt == t && comp[k] == c);
            let (a, prefix) = rg
                .nearest(at, inside, |j| inner(j).is_some())
                .expect("label seen inside the component");
            walk.extend(prefix.iter());
            let (_, b) = inner(a).expect("goal node");
            walk.push(t);
            at = b;
        }
        walk.extend(rg.path(at, start, inside).expect("strongly connected").iter());
        return Some((rg.nodes[start].clone(), FiringSequence(walk)));
    }
    None
}

/// A reachable `M_i` and a sequence `σ` from it with `P(σ) ≥ 1` and `I·P(σ) ≥ 0`.
pub fn dickson_witness(system: &System, limits: ExplorationLimits) -> Option<(Marking, FiringSequence)> {
    let n = system.net.num_transitions();
    let rg = build_rg(system, limits);
    if let Some(w) = closed_covering_walk(&rg, n) {
        return Some(w);
    }
    if rg.is_complete() {
        return None;
    }
    dominating_path(system, limits)
}

/// Depth-first search along firing paths looking for `M_j ≥ M_i` on the current path.
fn dominating_path(system: &System, limits: ExplorationLimits) -> Option<(Marking, FiringSequence)> {
    let net = &system.net;
    let n = net.num_transitions();
    let mut visited: HashSet<Marking> = HashSet::from([system.m0.clone()]);
    let mut path: Vec<Marking> = vec![system.m0.clone()];
    let mut fired: Vec<Transition> = Vec::new();
    // next transition to try at each depth
    let mut cursor: Vec<Transition> = vec![0];
    let mut steps = 0usize;
    while let Some(&t) = cursor.last() {
        if t >= n || steps >= limits.max_nodes {
            if steps >= limits.max_nodes {
                return None;
            }
            cursor.pop();
            path.pop();
            fired.pop();
            if let Some(c) = cursor.last_mut() {
                *c += 1;
            }
            continue;
        }
        let here = path.last().expect("non-empty path");
        let next = match net.fire(here, t) {
            Ok(m) if net.enabled(here, t) => m,
            _ => {
                *cursor.last_mut().expect("non-empty") += 1;
                continue;
            }
        };
        steps += 1;
        fired.push(t);
        for i in (0..path.len()).rev() {
            if next.covers(&path[i]) && covers_all(&fired[i..], n) {
                return Some((path[i].clone(), FiringSequence(fired[i..].to_vec())));
            }
        }
        let heavy = limits.max_token_sum.is_some_and(|k| next.token_sum() > k as u128);
        if heavy || !visited.insert(next.clone()) {
            fired.pop();
            *cursor.last_mut().expect("non-empty") += 1;
            continue;
        }
        path.push(next);
        cursor.push(0);
    }
    None
}

/// Liveness of a choice-free system through the existence of a Dickson witness.
pub fn cf_liveness(system: &System, limits: ExplorationLimits) -> Result<CfVerdict, BehaviorError> {
    if !classify(&system.net).choice_free {
        return Err(BehaviorError::NotChoiceFree);
    }
    if dickson_witness(system, limits).is_some() {
        return Ok(CfVerdict::Live);
    }
    if build_rg(system, limits).is_complete() {
        Ok(CfVerdict::NonLive)
    } else {
        Ok(CfVerdict::Unknown(limits))
    }
}

/// A feasible sequence with Parikh vector exactly `y` in a WMG≤ system.
///
/// Persistence makes greedy extraction complete: any enabled transition still
/// owed by `y` can be fired first.
pub fn realize_tvector(
    system: &System,
    y: &ParikhVector,
    sigma_enable: &[Transition],
) -> Result<FiringSequence, BehaviorError> {
    let net = &system.net;
    if !classify(net).wmg_le {
        return Err(BehaviorError::Precondition("net is not a WMG≤".into()));
    }
    if y.len() != net.num_transitions() {
        return Err(NetError::DimensionMismatch {
            expected: net.num_transitions(),
            found: y.len(),
        }
        .into());
    }
    system.fire_sequence(sigma_enable).map_err(BehaviorError::Infeasible)?;
    if !y.le(&parikh(sigma_enable, net.num_transitions())) {
        return Err(BehaviorError::Precondition("Y exceeds P(σ_enable)".into()));
    }
    if net.incidence().shift(&system.m0, y).is_none() {
        return Err(BehaviorError::Precondition("M0 + I·Y has a negative entry".into()));
    }
    let mut rest = y.clone();
    let mut m = system.m0.clone();
    let mut out = Vec::new();
    while rest.total() > 0 {
        let t = (0..net.num_transitions())
            .find(|&t| rest[t] > 0 && net.enabled(&m, t))
            .ok_or_else(|| BehaviorError::Precondition("no owed transition is enabled".into()))?;
        m = net.fire(&m, t)?;
        rest[t] -= 1;
        out.push(t);
    }
    Ok(FiringSequence(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::fixture;
    use crate::net::Net;

    fn check_witness(s: &System, m: &Marking, sigma: &[Transition]) {
        let n = s.net.num_transitions();
        assert!(covers_all(sigma, n));
        let end = s.net.fire_sequence(m, sigma).unwrap();
        assert!(end.covers(m));
        let inc = s.net.incidence();
        assert!(inc.apply(&parikh(sigma, n)).iter().all(|&x| x >= 0));
    }

    #[test]
    fn fig1_witness() {
        let s = fixture("fig1").unwrap();
        let (m, sigma) = dickson_witness(&s, ExplorationLimits::default()).unwrap();
        check_witness(&s, &m, &sigma);
        assert_eq!(s.net.format_sequence(&sigma), "t2 t1 t3 t1");
    }

    #[test]
    fn unbounded_witness_by_path_search() {
        // t keeps pumping p, u drains one of two tokens
        let mut b = Net::builder();
        b.places(&["p", "q"]).transitions(&["t", "u"]);
        b.arc("q", "t", 1).arc("t", "q", 1).arc("t", "p", 2).arc("p", "u", 1);
        let s = System::new(b.build().unwrap(), Marking(vec![0, 1])).unwrap();
        let limits = ExplorationLimits::nodes(50);
        assert!(!build_rg(&s, limits).is_complete());
        let (m, sigma) = dickson_witness(&s, limits).unwrap();
        check_witness(&s, &m, &sigma);
        assert_eq!(cf_liveness(&s, limits), Ok(CfVerdict::Live));
    }

    #[test]
    fn cf_verdicts() {
        let f4 = fixture("fig4").unwrap();
        let cf = crate::structure::delete_place(&f4.net, "p").unwrap();
        let cf = System::new(cf, Marking(vec![5; 6])).unwrap();
        let limits = ExplorationLimits::nodes(20_000);
        assert!(!build_rg(&cf, limits).is_complete());
        assert_eq!(cf_liveness(&cf, limits), Ok(CfVerdict::Live));

        // agreement with the graph oracle over a grid of markings
        let f1 = fixture("fig1").unwrap();
        let mut live = 0;
        for code in 0..4u64.pow(4) {
            let m = Marking((0..4).map(|i| code / 4u64.pow(i) % 4).collect());
            let s = f1.with_marking(m);
            let rg = build_rg(&s, limits);
            let want = if oracle_live(&rg, &s.net).unwrap() { CfVerdict::Live } else { CfVerdict::NonLive };
            live += usize::from(want == CfVerdict::Live);
            assert_eq!(cf_liveness(&s, limits), Ok(want), "{}", s.m0);
        }
        assert!(live > 0);
        assert_eq!(cf_liveness(&f4, ExplorationLimits::default()), Err(BehaviorError::NotChoiceFree));

        let mut b = Net::builder();
        b.places(&["a", "b"]).transitions(&["x", "y"]);
        b.arc("a", "x", 1).arc("x", "b", 1).arc("b", "y", 1).arc("y", "a", 1);
        let dead = System::new(b.build().unwrap(), Marking(vec![0, 0])).unwrap();
        assert_eq!(dickson_witness(&dead, ExplorationLimits::default()), None);
        assert_eq!(cf_liveness(&dead, ExplorationLimits::default()), Ok(CfVerdict::NonLive));

        // a source feeding a sink-less chain never closes, and never repeats
        let mut b = Net::builder();
        b.places(&["p", "q"]).transitions(&["t", "u"]);
        b.arc("t", "p", 1).arc("q", "u", 1);
        let grow = System::new(b.build().unwrap(), Marking(vec![0, 0])).unwrap();
        let limits = ExplorationLimits::nodes(20);
        assert_eq!(cf_liveness(&grow, limits), Ok(CfVerdict::Unknown(limits)));
    }

    #[test]
    fn realize_in_fig1() {
        let s = fixture("fig1").unwrap();
        let enable = s.seq("t2 t1 t3");
        let got = realize_tvector(&s, &ParikhVector(vec![0, 1, 0]), &enable).unwrap();
        assert_eq!(s.net.format_sequence(&got), "t2");
        let all = realize_tvector(&s, &parikh(&enable, 3), &enable).unwrap();
        assert_eq!(parikh(&all, 3), parikh(&enable, 3));
        assert!(realize_tvector(&s, &ParikhVector::zeros(3), &[]).unwrap().is_empty());
        assert!(matches!(
            realize_tvector(&s, &ParikhVector(vec![1, 0, 0]), &enable[..1]),
            Err(BehaviorError::Precondition(_))
        ));
    }
}
