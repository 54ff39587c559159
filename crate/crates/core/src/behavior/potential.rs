use std::collections::{BTreeSet, HashSet};

use exact_ilp::{ilp_feasible, rat, LinearModel, Relation, Sense, VarId};
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::net::{Marking, ParikhVector, Place, System, Transition};
use crate::structure::{bound_of, conservativeness, is_deadlocked_siphon, semiflows, SemiflowKind};

use super::{build_rg, BehaviorError, ExplorationLimits};

/// Branch-and-bound nodes allowed for one membership query.
const PR_BUDGET: usize = 200_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum DirectedVerdict {
    Holds,
    CounterExample(Marking),
    Unknown,
}

/// A non-negative integer `Y` with `M = M0 + I·Y`, of least total, if any.
///
/// Minimal T-semiflows are handed to the solver as reducible directions, so
/// the search stays finite when the solution set is unbounded.
pub fn pr_member(system: &System, m: &Marking) -> Result<Option<ParikhVector>, BehaviorError> {
    let net = &system.net;
    net.check_marking(m)?;
    let inc = net.incidence();
    let mut lp = LinearModel::new("potential_reachability");
    let ys: Vec<VarId> = (0..net.num_transitions())
        .map(|t| lp.add_var(format!("Y_{}", net.transition_name(t)), true))
        .collect();
    for p in 0..net.num_places() {
        let row: Vec<(VarId, i64)> = ys.iter().map(|&y| (y, inc.get(p, y.0))).filter(|&(_, a)| a != 0).collect();
        let rhs = m[p] as i128 - system.m0[p] as i128;
        if row.is_empty() {
            if rhs != 0 {
                return Ok(None);
            }
            continue;
        }
        let rhs = i64::try_from(rhs).map_err(|_| BehaviorError::Net(crate::net::NetError::Overflow(net.place_name(p).into())))?;
        lp.add_int_constraint(format!("M_{}", net.place_name(p)), &row, Relation::Eq, rhs);
    }
    lp.set_objective(Sense::Minimize, ys.iter().map(|&y| (y, rat(1))).collect());
    if let Ok(flows) = semiflows(net, SemiflowKind::T, 256) {
        for f in flows {
            lp.add_direction(f.support().into_iter().map(|t| (ys[t], f.vector[t])).collect());
        }
    }
    let out = ilp_feasible(&lp, PR_BUDGET).map_err(|e| BehaviorError::Precondition(e.to_string()))?;
    Ok(out.point().map(|point| {
        ParikhVector(point.iter().map(|q| q.to_integer().to_u64().expect("count fits u64")).collect())
    }))
}

/// Markings `M` with `x·M = target`, in lexicographic order, or `None` past `cap`.
fn level_set(x: &[u64], target: u64, cap: usize) -> Option<Vec<Marking>> {
    fn rec(x: &[u64], i: usize, left: u64, cur: &mut Vec<u64>, out: &mut Vec<Marking>, cap: usize) -> bool {
        if i == x.len() {
            if left == 0 {
                out.push(Marking(cur.clone()));
            }
            return out.len() <= cap;
        }
        for k in 0..=left / x[i] {
            cur.push(k);
            let ok = rec(x, i + 1, left - k * x[i], cur, out, cap);
            cur.pop();
            if !ok {
                return false;
            }
        }
        true
    }
    let mut out = Vec::new();
    rec(x, 0, target, &mut Vec::new(), &mut out, cap).then_some(out)
}

/// Every marking below the structural bounds, or `None` if some place is
/// unbounded or the box holds more than `cap` markings.
fn bounded_box(system: &System, cap: usize) -> Option<Vec<Marking>> {
    let ub: Vec<u64> = (0..system.net.num_places())
        .map(|p| bound_of(system, p).upper)
        .collect::<Option<_>>()?;
    let size = ub.iter().try_fold(1usize, |acc, &u| acc.checked_mul(u as usize + 1))?;
    if size > cap {
        return None;
    }
    let mut out = vec![Marking(Vec::new())];
    for &u in &ub {
        out = out
            .into_iter()
            .flat_map(|m| {
                (0..=u).map(move |k| {
                    let mut m = m.clone();
                    m.push(k);
                    m
                })
            })
            .collect();
    }
    Some(out)
}

/// `M0 + I·Y` for every `Y` of total at most `window`, deduplicated.
fn window_markings(system: &System, window: u64, cap: usize) -> Vec<Marking> {
    let inc = system.net.incidence();
    let n = system.net.num_transitions();
    let mut seen: HashSet<Marking> = HashSet::new();
    let mut out = Vec::new();
    let mut y = vec![0u64; n];
    fn rec(
        i: usize,
        left: u64,
        y: &mut Vec<u64>,
        emit: &mut dyn FnMut(&[u64]) -> bool,
    ) -> bool {
        if i == y.len() {
            return emit(y);
        }
        for k in 0..=left {
            y[i] = k;
            if !rec(i + 1, left - k, y, emit) {
                return false;
            }
        }
        y[i] = 0;
        true
    }
    let mut emit = |y: &[u64]| {
        if let Some(m) = inc.shift(&system.m0, y) {
            if seen.insert(m.clone()) {
                out.push(m);
            }
        }
        out.len() < cap
    };
    rec(0, window, &mut y, &mut emit);
    out
}

/// Whether every potentially reachable `M1` shares a reachable marking with `S`.
///
/// When the potentially reachable set is finite it is enumerated exactly: the
/// level set of a conservative vector, or else the box under the structural
/// bounds, filtered by P-semiflows and the state equation. Otherwise only
/// markings `M0 + I·Y` with small `Y` are tried, so the best possible answer
/// is a counterexample.
pub fn initially_directed(system: &System, limits: ExplorationLimits) -> Result<DirectedVerdict, BehaviorError> {
    let net = &system.net;
    let reach = build_rg(system, limits);
    if !reach.is_complete() {
        return Ok(DirectedVerdict::Unknown);
    }
    let exact = match conservativeness(net) {
        Some(x) => {
            let target: u64 = x.iter().zip(system.m0.iter()).map(|(a, b)| a * b).sum();
            level_set(&x, target, limits.max_nodes)
        }
        None => bounded_box(system, limits.max_nodes),
    };
    let complete = exact.is_some();
    let pflows = semiflows(net, SemiflowKind::P, 256).unwrap_or_default();
    let weigh = |v: &[u64], m: &Marking| -> u64 { v.iter().zip(m.iter()).map(|(a, b)| a * b).sum() };
    let candidates = match exact {
        Some(all) => all
            .into_iter()
            .filter(|m| pflows.iter().all(|f| weigh(&f.vector, m) == weigh(&f.vector, &system.m0)))
            .collect(),
        None => window_markings(system, 2 * net.num_transitions() as u64, limits.max_nodes),
    };
    let mut unsure = !complete;
    for m1 in candidates {
        if reach.contains(&m1) {
            continue;
        }
        if complete && pr_member(system, &m1)?.is_none() {
            continue;
        }
        let other = build_rg(&system.with_marking(m1.clone()), limits);
        if other.nodes.iter().any(|m| reach.contains(m)) {
            continue;
        }
        if other.is_complete() {
            return Ok(DirectedVerdict::CounterExample(m1));
        }
        unsure = true;
    }
    Ok(if unsure { DirectedVerdict::Unknown } else { DirectedVerdict::Holds })
}

/// Lifts a deadlocking run of `(N, M0/k)` to `S = (N, M0)`: fires `σ^k` from
/// `M0` and checks that `d` is deadlocked at the end.
pub fn divisibility_deadlock_lift(
    system: &System,
    k: u64,
    sigma: &[Transition],
    d: &BTreeSet<Place>,
) -> Result<bool, BehaviorError> {
    let net = &system.net;
    if k == 0 || system.m0.iter().any(|&x| x % k != 0) {
        return Err(BehaviorError::Precondition(format!("M0 is not a multiple of {k}")));
    }
    let base = Marking(system.m0.iter().map(|&x| x / k).collect());
    let small_end = net.fire_sequence(&base, sigma).map_err(BehaviorError::Infeasible)?;
    let deadlocked = |m: &Marking| {
        is_deadlocked_siphon(net, m, d).map_err(|e| BehaviorError::Precondition(e.to_string()))
    };
    if !deadlocked(&small_end)? {
        return Err(BehaviorError::Precondition("D is not deadlocked after σ".into()));
    }
    let mut m = system.m0.clone();
    for _ in 0..k {
        m = match net.fire_sequence(&m, sigma) {
            Ok(next) => next,
            Err(_) => return Ok(false),
        };
    }
    deadlocked(&m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::behavior::{is_deadlock, oracle_live};
    use crate::fixtures::{fixture, gen_swimming_pool};
    use crate::net::Net;

    #[test]
    fn fig8_potential_deadlock() {
        let s = fixture("fig8").unwrap();
        let m = Marking(vec![0, 0, 2, 1, 0]);
        assert_eq!(pr_member(&s, &m).unwrap(), Some(ParikhVector(vec![2, 0, 0])));
        assert!(is_deadlock(&s.with_marking(m)));
        assert_eq!(pr_member(&s, &s.m0).unwrap(), Some(ParikhVector::zeros(3)));
        // breaks the conservation law of the net
        assert_eq!(pr_member(&s, &Marking(vec![0, 0, 0, 0, 0])).unwrap(), None);
    }

    #[test]
    fn membership_with_cycles() {
        let s = gen_swimming_pool(3, 2, 1);
        let inc = s.net.incidence();
        let y = [2, 1, 1, 1, 1, 1, 0];
        let m = inc.shift(&s.m0, &y).unwrap();
        let got = pr_member(&s, &m).unwrap().unwrap();
        assert_eq!(inc.shift(&s.m0, &got), Some(m));
        assert!(got.total() <= 8);
    }

    #[test]
    fn directedness() {
        let f6 = fixture("fig6").unwrap();
        assert_eq!(initially_directed(&f6, ExplorationLimits::default()).unwrap(), DirectedVerdict::Holds);

        let f7 = fixture("fig7").unwrap();
        assert!(oracle_live(&build_rg(&f7, ExplorationLimits::default()), &f7.net).unwrap());
        let m = f7.net.fire(&f7.m0, f7.net.transition("t0").unwrap()).unwrap();
        let got = initially_directed(&f7.with_marking(m), ExplorationLimits::default()).unwrap();
        assert!(matches!(got, DirectedVerdict::CounterExample(_)), "{got:?}");

        let mut b = Net::builder();
        b.place("p").transition("t").arc("p", "t", 1);
        let dead = System::new(b.build().unwrap(), Marking(vec![0])).unwrap();
        assert_eq!(initially_directed(&dead, ExplorationLimits::default()).unwrap(), DirectedVerdict::Holds);
    }

    #[test]
    fn lift_single_consumer() {
        let mut b = Net::builder();
        b.place("p").transition("t").arc("p", "t", 1);
        let s = System::new(b.build().unwrap(), Marking(vec![3])).unwrap();
        let d = BTreeSet::from([0]);
        assert!(divisibility_deadlock_lift(&s, 3, &s.seq("t"), &d).unwrap());
        assert!(matches!(
            divisibility_deadlock_lift(&s, 2, &s.seq("t"), &d),
            Err(BehaviorError::Precondition(_))
        ));
    }

    #[test]
    fn lift_swimming_pool_deadlock() {
        let small = gen_swimming_pool(2, 1, 1);
        let rg = build_rg(&small, ExplorationLimits::default());
        let q: BTreeSet<Place> = ["Dressed", "Dress", "Cabins", "Bags", "Undress"]
            .iter()
            .map(|p| small.net.place(p).unwrap())
            .collect();
        let target = (0..rg.nodes.len())
            .find(|&i| is_deadlocked_siphon(&small.net, &rg.nodes[i], &q).unwrap())
            .expect("(2,1,1) can empty the siphon");
        let sigma = rg.path(0, target, |_| true).unwrap();
        let big = gen_swimming_pool(4, 2, 2);
        assert!(divisibility_deadlock_lift(&big, 2, &sigma, &q).unwrap());
        assert!(divisibility_deadlock_lift(&small, 1, &sigma, &q).unwrap());
    }
}
