//! Liveness of strongly connected H1S-WMG≤ systems as infeasibility of a
//! single deadlock ILP over the state equation of the gadget-transformed net.

mod theta;

use std::collections::BTreeSet;

use exact_ilp::{ilp_feasible, rat, IlpError, LinearModel, Relation, VarId};
use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::net::{Marking, NetError, ParikhVector, Place, System, Transition};
use crate::structure::{bound_of, classify, is_siphon, semiflows, structurally_bounded, SemiflowKind};

pub use theta::{expand_sequence, reduce_sequence, theta_transform, ThetaPair, ThetaResult};

/// Default branch-and-bound node budget for the deadlock ILP.
pub const DEFAULT_BUDGET: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LivenessError {
    #[error("transition {0} has two or more inputs whose bound exceeds the arc weight")]
    MultipleUnboundedInputs(String),
    #[error("place {0} has no finite structural bound")]
    MissingBound(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("the given set is not a siphon")]
    NotASiphon,
    #[error("sequence is not feasible: {0}")]
    Infeasible(NetError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status")]
pub enum LivenessVerdict {
    Live,
    NonLive {
        deadlock: Marking,
        firing_count: ParikhVector,
    },
    NotApplicable {
        reason: String,
    },
    Inconclusive {
        budget: usize,
    },
}

/// How a transition's non-enabledness was linearized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NonfireShape {
    /// inserted by the transformation
    Gadget,
    /// `M(p) ≤ W(p,t) − 1`
    SingleInput,
    /// every input bounded by its weight: `Σ M(p) ≤ Σ W(p,t) − 1`
    AllBounded,
    /// one input `p'` may exceed its weight
    OneUnbounded { place: Place, bound: u64 },
    /// no inputs: never disabled, the row `0 ≤ −1`
    Source,
}

/// `Σ coef·M(p) ≤ rhs`, stating that `transition` is not enabled.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NonfireConstraint {
    pub transition: Transition,
    pub shape: NonfireShape,
    pub terms: Vec<(Place, i64)>,
    pub rhs: i64,
}

fn to_i64(x: u64, what: &str) -> Result<i64, NetError> {
    i64::try_from(x).map_err(|_| NetError::Overflow(what.to_string()))
}

/// One linear non-fireability constraint per transition of the transformed
/// system, ordered as gadget transitions first, then single-input,
/// all-bounded and one-unbounded transitions, each group by index.
pub fn nonfireability_constraints(
    theta: &ThetaResult,
    bounds: &[u64],
) -> Result<Vec<NonfireConstraint>, LivenessError> {
    let net = &theta.transformed.net;
    let overflow = |e: NetError| LivenessError::NotApplicable(e.to_string());
    let mut out = Vec::with_capacity(net.num_transitions());
    for t in 0..net.num_transitions() {
        let pre = net.pre(t);
        let c = match pre {
            [] => NonfireConstraint {
                transition: t,
                shape: NonfireShape::Source,
                terms: Vec::new(),
                rhs: -1,
            },
            [(p, w)] => NonfireConstraint {
                transition: t,
                shape: NonfireShape::SingleInput,
                terms: vec![(*p, 1)],
                rhs: to_i64(*w, net.place_name(*p)).map_err(overflow)? - 1,
            },
            _ => {
                let big: Vec<(Place, u64)> = pre.iter().copied().filter(|&(p, w)| bounds[p] > w).collect();
                match big.as_slice() {
                    [] => {
                        let total: u64 = pre.iter().map(|&(_, w)| w).sum();
                        NonfireConstraint {
                            transition: t,
                            shape: NonfireShape::AllBounded,
                            terms: pre.iter().map(|&(p, _)| (p, 1)).collect(),
                            rhs: to_i64(total, net.transition_name(t)).map_err(overflow)? - 1,
                        }
                    }
                    [(q, wq)] => {
                        let sb = bounds[*q];
                        let k = to_i64(sb, net.place_name(*q)).map_err(overflow)?;
                        let pi_w: u64 = pre.iter().filter(|(p, _)| p != q).map(|&(_, w)| w).sum();
                        let rhs = sb
                            .checked_mul(pi_w)
                            .and_then(|x| x.checked_add(*wq))
                            .ok_or_else(|| overflow(NetError::Overflow(net.transition_name(t).into())))?;
                        let mut terms: Vec<(Place, i64)> =
                            pre.iter().filter(|(p, _)| p != q).map(|&(p, _)| (p, k)).collect();
                        terms.push((*q, 1));
                        NonfireConstraint {
                            transition: t,
                            shape: NonfireShape::OneUnbounded { place: *q, bound: sb },
                            terms,
                            rhs: to_i64(rhs, net.transition_name(t)).map_err(overflow)? - 1,
                        }
                    }
                    _ => return Err(LivenessError::MultipleUnboundedInputs(net.transition_name(t).into())),
                }
            }
        };
        out.push(c);
    }
    for c in out.iter_mut() {
        if theta.is_new_transition(c.transition) {
            c.shape = NonfireShape::Gadget;
        }
    }
    let rank = |c: &NonfireConstraint| match c.shape {
        NonfireShape::Gadget => 0,
        NonfireShape::Source | NonfireShape::SingleInput => 1,
        NonfireShape::AllBounded => 2,
        NonfireShape::OneUnbounded { .. } => 3,
    };
    out.sort_by_key(|c| (rank(c), c.transition));
    Ok(out)
}

/// The deadlock ILP with the data needed to read its solutions.
#[derive(Clone, Debug)]
pub struct DeadlockIlp {
    pub model: LinearModel,
    pub theta: ThetaResult,
    pub bounds: Vec<u64>,
    pub constraints: Vec<NonfireConstraint>,
}

/// Variables `M_p` for every place, then `Y_t` for every transition, with the
/// state equation `M − I·Y = M0`; minimal T-semiflows become solver directions.
fn state_equation_model(system: &System, name: &str) -> LinearModel {
    let net = &system.net;
    let inc = net.incidence();
    let mut lp = LinearModel::new(name);
    let ms: Vec<VarId> = (0..net.num_places())
        .map(|p| lp.add_var(format!("M_{}", net.place_name(p)), true))
        .collect();
    let ys: Vec<VarId> = (0..net.num_transitions())
        .map(|t| lp.add_var(format!("Y_{}", net.transition_name(t)), true))
        .collect();
    for p in 0..net.num_places() {
        let mut terms = vec![(ms[p], rat(1))];
        terms.extend(
            (0..net.num_transitions())
                .filter(|&t| inc.get(p, t) != 0)
                .map(|t| (ys[t], rat(-inc.get(p, t)))),
        );
        let rhs = rat(i64::try_from(system.m0[p]).unwrap_or(i64::MAX));
        lp.add_constraint(format!("state_{}", net.place_name(p)), terms, Relation::Eq, rhs)
            .comment = Some(format!("state equation {}", net.place_name(p)));
    }
    if let Ok(flows) = semiflows(net, SemiflowKind::T, 256) {
        for f in flows {
            lp.add_direction(f.support().into_iter().map(|t| (ys[t], f.vector[t])).collect());
        }
    }
    lp
}

/// Splits a solver point into `(M, Y)`.
pub fn decode_point(system: &System, point: &[exact_ilp::BigRational]) -> (Marking, ParikhVector) {
    let np = system.net.num_places();
    let int = |q: &exact_ilp::BigRational| q.to_integer().to_u64().expect("non-negative integer");
    (
        Marking(point[..np].iter().map(int).collect()),
        ParikhVector(point[np..].iter().map(int).collect()),
    )
}

/// Names the first violated applicability condition, if any.
pub fn applicability(system: &System) -> Result<(), LivenessError> {
    let net = &system.net;
    let c = classify(net);
    let fail = |why: &str| Err(LivenessError::NotApplicable(why.to_string()));
    if net.num_places() == 0 || net.num_transitions() == 0 {
        return fail("net has no place or no transition");
    }
    if !c.h1s_wmg_le {
        return fail("net is not H1S-WMG≤");
    }
    if !c.strongly_connected {
        return fail("net is not strongly connected");
    }
    if !c.wmg_after_shared_deletion_strongly_connected {
        return fail("deleting the shared place does not leave a strongly connected WMG≤");
    }
    if !structurally_bounded(net) {
        return fail("net is not structurally bounded");
    }
    Ok(())
}

pub fn deadlock_ilp(system: &System) -> Result<DeadlockIlp, LivenessError> {
    applicability(system)?;
    let theta = theta_transform(system);
    let st = &theta.transformed;
    let bounds: Vec<u64> = (0..st.net.num_places())
        .map(|p| bound_of(st, p).upper.ok_or_else(|| LivenessError::MissingBound(st.net.place_name(p).into())))
        .collect::<Result<_, _>>()?;
    let constraints = nonfireability_constraints(&theta, &bounds)?;
    let mut model = state_equation_model(st, "deadlock");
    for c in &constraints {
        let name = st.net.transition_name(c.transition);
        let terms = c.terms.iter().map(|&(p, k)| (VarId(p), rat(k))).collect();
        model
            .add_constraint(format!("nonfire_{name}"), terms, Relation::Le, rat(c.rhs))
            .comment = Some(format!("nonfire {name}"));
    }
    Ok(DeadlockIlp {
        model,
        theta,
        bounds,
        constraints,
    })
}

/// Maps a deadlock of the transformed system back: a token on `p_a` stands
/// for the `W(p,t)` tokens its gadget already took from `p`.
pub fn project_witness(theta: &ThetaResult, m: &Marking, y: &ParikhVector) -> (Marking, ParikhVector) {
    let s = &theta.original;
    let mut orig = Marking(m[..s.net.num_places()].to_vec());
    for g in &theta.pair_map {
        orig[g.p] += s.net.weight_pt(g.p, g.t) * m[g.p_a];
    }
    (orig, ParikhVector(y[..s.net.num_transitions()].to_vec()))
}

pub fn check_liveness(system: &System) -> LivenessVerdict {
    check_liveness_with(system, DEFAULT_BUDGET)
}

pub fn check_liveness_with(system: &System, budget: usize) -> LivenessVerdict {
    let ilp = match deadlock_ilp(system) {
        Ok(ilp) => ilp,
        Err(e) => return LivenessVerdict::NotApplicable { reason: e.to_string() },
    };
    let outcome = match ilp_feasible(&ilp.model, budget) {
        Ok(o) => o,
        Err(IlpError::NodeBudgetExceeded(_)) | Err(IlpError::Verification(_)) => {
            return LivenessVerdict::Inconclusive { budget }
        }
    };
    let Some(point) = outcome.point() else {
        return LivenessVerdict::Live;
    };
    let (m, y) = decode_point(&ilp.theta.transformed, point);
    let (deadlock, firing_count) = project_witness(&ilp.theta, &m, &y);
    let net = &system.net;
    let consistent = net.incidence().shift(&system.m0, &firing_count).as_ref() == Some(&deadlock);
    if consistent && net.is_deadlock(&deadlock) {
        LivenessVerdict::NonLive {
            deadlock,
            firing_count,
        }
    } else {
        LivenessVerdict::Inconclusive { budget }
    }
}

/// State equation plus `M(p) ≤ min W(p,t) − 1` for every place of `d` with outputs.
pub fn siphon_deadlock_ilp(system: &System, d: &BTreeSet<Place>) -> Result<LinearModel, LivenessError> {
    let net = &system.net;
    if !is_siphon(net, d) {
        return Err(LivenessError::NotASiphon);
    }
    let mut model = state_equation_model(system, "siphon_deadlock");
    for &p in d {
        if let Some(w) = net.place_post(p).iter().map(|&(_, w)| w).min() {
            let w = to_i64(w, net.place_name(p)).map_err(|e| LivenessError::NotApplicable(e.to_string()))?;
            model
                .add_int_constraint(format!("empty_{}", net.place_name(p)), &[(VarId(p), 1)], Relation::Le, w - 1)
                .comment = Some(format!("siphon place {}", net.place_name(p)));
        }
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::behavior::{build_rg, oracle_live, ExplorationLimits};
    use crate::fixtures::{fixture, gen_swimming_pool};
    use crate::structure::is_deadlocked_siphon;
    use exact_ilp::Solution;

    fn shapes(ilp: &DeadlockIlp) -> Vec<(String, NonfireShape)> {
        let n = &ilp.theta.transformed.net;
        ilp.constraints
            .iter()
            .map(|c| (n.transition_name(c.transition).to_string(), c.shape))
            .collect()
    }

    #[test]
    fn fig12_listing_shape() {
        let s = fixture("fig12").unwrap();
        let ilp = deadlock_ilp(&s).unwrap();
        let n = &ilp.theta.transformed.net;
        let order: Vec<String> = shapes(&ilp).into_iter().map(|(t, _)| t).collect();
        assert_eq!(
            order,
            ["tp(p1,t6)", "tp(p4,t3)", "tp(p6,t5)", "tp(p8,t5)", "t1", "t2", "t4", "t5", "t3", "t6"]
        );
        let by_name = |t: &str| ilp.constraints.iter().find(|c| n.transition_name(c.transition) == t).unwrap();
        let p = |name: &str| n.place(name).unwrap();
        assert_eq!(by_name("t1").terms, vec![(p("p2"), 1)]);
        assert_eq!(by_name("t1").rhs, 0);
        let t5 = by_name("t5");
        assert_eq!(t5.terms, vec![(p("pa(p6,t5)"), 1), (p("pa(p8,t5)"), 1)]);
        assert_eq!(t5.rhs, 1);
        let t3 = by_name("t3");
        let sb7 = ilp.bounds[p("p7")] as i64;
        assert!(sb7 > 1);
        assert_eq!(t3.terms, vec![(p("pa(p4,t3)"), sb7), (p("p7"), 1)]);
        assert_eq!(t3.rhs, sb7 + 1 - 1);
        let tp1 = by_name("tp(p1,t6)");
        let sb1 = ilp.bounds[p("p1")] as i64;
        assert_eq!(tp1.terms, vec![(p("pb(p1,t6)"), sb1), (p("p1"), 1)]);
        assert_eq!(tp1.rhs, sb1);
        assert_eq!(ilp.model.vars.len(), n.num_places() + n.num_transitions());
    }

    #[test]
    fn swimming_pool_small_instances() {
        for (abc, live) in [((1, 1, 1), true), ((2, 1, 1), false)] {
            let s = gen_swimming_pool(abc.0, abc.1, abc.2);
            let rg = build_rg(&s, ExplorationLimits::default());
            assert_eq!(oracle_live(&rg, &s.net).unwrap(), live);
            match check_liveness(&s) {
                LivenessVerdict::Live => assert!(live),
                LivenessVerdict::NonLive { deadlock, firing_count } => {
                    assert!(!live);
                    assert!(s.net.is_deadlock(&deadlock));
                    assert_eq!(s.net.incidence().shift(&s.m0, &firing_count), Some(deadlock));
                }
                other => panic!("{abc:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn gate_names_the_violation() {
        let f8 = fixture("fig8").unwrap();
        assert!(matches!(check_liveness(&f8), LivenessVerdict::NotApplicable { .. }));
        let f21 = fixture("fig21").unwrap();
        assert_eq!(
            deadlock_ilp(&f21).err(),
            Some(LivenessError::NotApplicable("net is not H1S-WMG≤".into()))
        );
    }

    #[test]
    fn dead_cycle_is_feasible_at_zero() {
        let s = crate::dsl::parse("place a\nplace b\ntrans x\ntrans y\narc a -> x\narc x -> b\narc b -> y\narc y -> a\n").unwrap();
        let ilp = deadlock_ilp(&s).unwrap();
        let out = ilp_feasible(&ilp.model, 100).unwrap();
        let (m, y) = decode_point(&ilp.theta.transformed, out.point().unwrap());
        assert_eq!(m, s.m0);
        assert_eq!(y.total() % 2, 0);
        assert!(matches!(check_liveness(&s), LivenessVerdict::NonLive { .. }));
    }

    #[test]
    fn multiple_unbounded_inputs() {
        // two shared places both feeding t: the transformation leaves them alone
        let s = crate::dsl::parse(
            "place a init 3\nplace b init 3\ntrans t\ntrans u\narc a -> t\narc b -> t\narc a -> u\narc b -> u\n",
        )
        .unwrap();
        let th = theta_transform(&s);
        assert!(th.pair_map.is_empty());
        assert_eq!(
            nonfireability_constraints(&th, &[5, 5]).err(),
            Some(LivenessError::MultipleUnboundedInputs("t".into()))
        );
        let ok = nonfireability_constraints(&th, &[1, 5]).unwrap();
        assert_eq!(ok[0].terms, vec![(0, 5), (1, 1)]);
        assert_eq!(ok[0].rhs, 5);
    }

    #[test]
    fn siphon_ilps() {
        let s = gen_swimming_pool(2, 1, 1);
        let q: BTreeSet<Place> = ["Dressed", "Dress", "Cabins", "Bags", "Undress"]
            .iter()
            .map(|p| s.net.place(p).unwrap())
            .collect();
        let model = siphon_deadlock_ilp(&s, &q).unwrap();
        let out = ilp_feasible(&model, 10_000).unwrap();
        let (m, y) = decode_point(&s, out.point().unwrap());
        assert!(is_deadlocked_siphon(&s.net, &m, &q).unwrap());
        assert_eq!(s.net.incidence().shift(&s.m0, &y), Some(m));

        let f1 = fixture("fig1").unwrap();
        let d: BTreeSet<Place> = [0, 2].into();
        let out = ilp_feasible(&siphon_deadlock_ilp(&f1, &d).unwrap(), 10_000).unwrap();
        assert_eq!(out.solution, Solution::Infeasible);
        assert_eq!(siphon_deadlock_ilp(&f1, &[0].into()).err(), Some(LivenessError::NotASiphon));
    }
}
