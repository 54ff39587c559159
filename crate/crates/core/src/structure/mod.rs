//! Structural analysis: net classes, siphons, semiflows and LP-based bounds.

mod bounds;
mod semiflows;
mod siphons;

use std::collections::BTreeSet;

use petgraph::algo::kosaraju_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;
use thiserror::Error;

use crate::net::{Marking, Net, NetError, Place, System, Transition};

pub use bounds::{conservativeness, consistency, structural_bound_upper, structurally_bounded, StructuralBound};
pub(crate) use bounds::bound_of;
pub use semiflows::{semiflows, Semiflow, SemiflowKind};
pub use siphons::{is_deadlocked_siphon, is_siphon, max_siphon_within, minimal_siphons};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("more than {cap} results; enumeration truncated")]
    Truncated { cap: usize },
    #[error("the given set is not a siphon")]
    NotASiphon,
    #[error("integer overflow during elimination")]
    Overflow,
    #[error(transparent)]
    Net(#[from] NetError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassReport {
    pub unit_weighted: bool,
    pub homogeneous: bool,
    pub choice_free: bool,
    pub wmg_le: bool,
    pub wmg: bool,
    pub marked_graph: bool,
    pub state_machine: bool,
    pub hfc: bool,
    pub hac: bool,
    pub shared_place_count: usize,
    pub h1s: bool,
    pub h1s_wmg_le: bool,
    pub strongly_connected: bool,
    pub wmg_after_shared_deletion_strongly_connected: bool,
}

/// Places with at least two output transitions.
pub fn shared_places(net: &Net) -> Vec<Place> {
    (0..net.num_places())
        .filter(|&p| net.place_post(p).len() >= 2)
        .collect()
}

fn homogeneous(net: &Net) -> bool {
    (0..net.num_places()).all(|p| {
        let out = net.place_post(p);
        out.windows(2).all(|w| w[0].1 == w[1].1)
    })
}

/// For every synchronization (transition with two or more inputs) and every
/// pair of its inputs, the output sets are nested (`equal` asks for equality).
fn choice_condition(net: &Net, equal: bool) -> bool {
    let outs = |p: Place| -> BTreeSet<Transition> { net.place_post(p).iter().map(|&(t, _)| t).collect() };
    (0..net.num_transitions()).all(|t| {
        let pre = net.pre(t);
        if pre.len() < 2 {
            return true;
        }
        pre.iter().enumerate().all(|(i, &(p1, _))| {
            pre[i + 1..].iter().all(|&(p2, _)| {
                let (a, b) = (outs(p1), outs(p2));
                if equal {
                    a == b
                } else {
                    a.is_subset(&b) || b.is_subset(&a)
                }
            })
        })
    })
}

pub fn classify(net: &Net) -> ClassReport {
    let np = net.num_places();
    let unit_weighted = net.arcs().iter().all(|&(_, _, w)| w == 1);
    let homogeneous = homogeneous(net);
    let choice_free = (0..np).all(|p| net.place_post(p).len() <= 1);
    let wmg_le = choice_free && (0..np).all(|p| net.place_pre(p).len() <= 1);
    let wmg = (0..np).all(|p| net.place_pre(p).len() == 1 && net.place_post(p).len() == 1);
    let state_machine = unit_weighted
        && (0..net.num_transitions()).all(|t| net.pre(t).len() == 1 && net.post(t).len() == 1);
    let hfc = homogeneous && choice_condition(net, true);
    let hac = homogeneous && choice_condition(net, false);
    let shared = shared_places(net);
    let h1s = homogeneous && shared.len() <= 1;
    let h1s_wmg_le = h1s
        && (0..np)
            .filter(|p| !shared.contains(p))
            .all(|p| net.place_pre(p).len() <= 1);
    let reduced = delete_places(net, &shared);
    let reduced_class = (0..reduced.num_places())
        .all(|p| reduced.place_pre(p).len() <= 1 && reduced.place_post(p).len() <= 1);
    ClassReport {
        unit_weighted,
        homogeneous,
        choice_free,
        wmg_le,
        wmg,
        marked_graph: wmg && unit_weighted,
        state_machine,
        hfc,
        hac,
        shared_place_count: shared.len(),
        h1s,
        h1s_wmg_le,
        strongly_connected: strongly_connected(net),
        wmg_after_shared_deletion_strongly_connected: reduced_class && strongly_connected(&reduced),
    }
}

/// Strong connectivity of the place/transition graph.
pub fn strongly_connected(net: &Net) -> bool {
    let np = net.num_places();
    let n = np + net.num_transitions();
    if n <= 1 {
        return true;
    }
    let mut g = DiGraph::<(), ()>::with_capacity(n, 0);
    let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for t in 0..net.num_transitions() {
        for &(p, _) in net.pre(t) {
            g.add_edge(nodes[p], nodes[np + t], ());
        }
        for &(p, _) in net.post(t) {
            g.add_edge(nodes[np + t], nodes[p], ());
        }
    }
    kosaraju_scc(&g).len() == 1
}

fn rebuild(net: &Net, keep_place: impl Fn(Place) -> bool, keep_trans: impl Fn(Transition) -> bool) -> Net {
    let mut b = Net::builder();
    for p in (0..net.num_places()).filter(|&p| keep_place(p)) {
        b.place(net.place_name(p));
    }
    for t in (0..net.num_transitions()).filter(|&t| keep_trans(t)) {
        b.transition(net.transition_name(t));
        for &(p, w) in net.pre(t).iter().filter(|(p, _)| keep_place(*p)) {
            b.arc(net.place_name(p), net.transition_name(t), w);
        }
        for &(p, w) in net.post(t).iter().filter(|(p, _)| keep_place(*p)) {
            b.arc(net.transition_name(t), net.place_name(p), w);
        }
    }
    b.build().expect("subnet of a valid net")
}

fn delete_places(net: &Net, gone: &[Place]) -> Net {
    rebuild(net, |p| !gone.contains(&p), |_| true)
}

/// The net without `p` and its arcs; transitions are kept.
pub fn delete_place(net: &Net, p: &str) -> Result<Net, NetError> {
    let p = net.place(p)?;
    Ok(delete_places(net, &[p]))
}

/// P-subsystem induced by `places`: transitions `•P' ∪ P'•`, restricted marking.
pub fn p_subsystem(system: &System, places: &[&str]) -> Result<System, NetError> {
    let net = &system.net;
    let chosen: BTreeSet<Place> = places.iter().map(|p| net.place(p)).collect::<Result<_, _>>()?;
    let touches = |t: Transition| {
        net.pre(t).iter().chain(net.post(t)).any(|(p, _)| chosen.contains(p))
    };
    let sub = rebuild(net, |p| chosen.contains(&p), touches);
    let m0 = Marking(chosen.iter().map(|&p| system.m0[p]).collect());
    System::new(sub, m0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{fixture, gen_emblem, gen_swimming_pool};

    #[test]
    fn fig1_is_a_wmg() {
        let s = fixture("fig1").unwrap();
        let c = classify(&s.net);
        assert!(c.wmg && c.choice_free && c.wmg_le);
        assert!(!c.unit_weighted && !c.marked_graph);
        assert_eq!(c.shared_place_count, 0);
        assert!(c.strongly_connected);
        assert!(shared_places(&s.net).is_empty());
    }

    #[test]
    fn fig4_has_one_shared_place() {
        let s = fixture("fig4").unwrap();
        let c = classify(&s.net);
        assert!(c.h1s);
        let p = s.net.place("p").unwrap();
        assert_eq!(shared_places(&s.net), vec![p]);
        let cf = delete_place(&s.net, "p").unwrap();
        assert!(classify(&cf).choice_free);
        assert_eq!(cf.num_transitions(), 5);
    }

    #[test]
    fn fig21_has_two_shared_places() {
        let s = fixture("fig21").unwrap();
        let c = classify(&s.net);
        assert_eq!(c.shared_place_count, 2);
        assert!(!c.h1s);
        let names: Vec<&str> = shared_places(&s.net).iter().map(|&p| s.net.place_name(p)).collect();
        assert_eq!(names, vec!["p1", "p2"]);
    }

    #[test]
    fn swimming_pool_classes() {
        let s = gen_swimming_pool(2, 1, 1);
        let c = classify(&s.net);
        assert!(c.h1s_wmg_le && c.strongly_connected && c.wmg_after_shared_deletion_strongly_connected);
        assert!(c.unit_weighted && c.homogeneous && !c.choice_free);
        let w = delete_place(&s.net, "Cabins").unwrap();
        let cw = classify(&w);
        assert!(cw.wmg && cw.strongly_connected);
    }

    #[test]
    fn star_and_source() {
        let mut b = Net::builder();
        b.place("p").transitions(&["a", "b", "c"]);
        for t in ["a", "b", "c"] {
            b.arc("p", t, 2);
        }
        let n = b.build().unwrap();
        assert_eq!(shared_places(&n), vec![0]);
        assert!(classify(&n).homogeneous);
        assert!(!strongly_connected(&n));
    }

    #[test]
    fn isolated_place_deletion_keeps_arcs() {
        let s = gen_emblem([1, 0, 0, 0, 0, 1, 0, 0, 0]);
        let text = crate::dsl::to_text(&s) + "place q\n";
        let with_q = crate::dsl::parse(&text).unwrap();
        let back = delete_place(&with_q.net, "q").unwrap();
        assert_eq!(back.arcs(), s.net.arcs());
    }

    #[test]
    fn p_subsystem_of_siphon() {
        let s = gen_swimming_pool(3, 2, 1);
        let q = ["Dressed", "Dress", "Cabins", "Bags", "Undress"];
        let sub = p_subsystem(&s, &q).unwrap();
        assert_eq!(sub.net.num_places(), 5);
        // every transition touching Q except Enter
        assert_eq!(sub.net.num_transitions(), 6);
        let whole: Vec<&str> = s.net.place_names().iter().map(String::as_str).collect();
        assert_eq!(p_subsystem(&s, &whole).unwrap(), s);
        let single = p_subsystem(&s, &["Out"]).unwrap();
        let names: Vec<&str> = single.net.transition_names().iter().map(String::as_str).collect();
        assert_eq!(names, vec!["Enter", "RelK2"]);
    }
}
