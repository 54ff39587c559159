use std::collections::HashSet;

use serde::Serialize;

use crate::net::{FiringSequence, Marking, Net, Place, System, Transition};

use super::LivenessError;

/// One gadget: the arc `(p, t)` rerouted through `t_p`, with `p_a` feeding `t`
/// and `p_b` recording that `t` has consumed the last batch.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThetaPair {
    /// original place and transition (same index in both nets)
    pub p: Place,
    pub t: Transition,
    /// new nodes of the transformed net
    pub p_a: Place,
    pub p_b: Place,
    pub t_p: Transition,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaResult {
    pub original: System,
    /// Original places and transitions keep their indices; new ones follow in pair order.
    pub transformed: System,
    pub pair_map: Vec<ThetaPair>,
}

impl ThetaResult {
    pub fn is_new_transition(&self, t: Transition) -> bool {
        t >= self.original.net.num_transitions()
    }

    /// Gadget whose new transition is `t_p`.
    pub fn pair_of(&self, t_p: Transition) -> Option<&ThetaPair> {
        self.pair_map.iter().find(|g| g.t_p == t_p)
    }
}

fn fresh(taken: &mut HashSet<String>, base: String) -> String {
    let mut name = base;
    while taken.contains(&name) {
        name.push('\'');
    }
    taken.insert(name.clone());
    name
}

/// Applies the gadget to every `(p, t)` with `p• = {t}` and `|•t| ≥ 2`,
/// pairs taken in (place, transition) index order of the original net.
pub fn theta_transform(system: &System) -> ThetaResult {
    let net = &system.net;
    let pairs: Vec<(Place, Transition)> = (0..net.num_places())
        .filter_map(|p| match net.place_post(p) {
            [(t, _)] if net.pre(*t).len() >= 2 => Some((p, *t)),
            _ => None,
        })
        .collect();
    let mut taken: HashSet<String> = net
        .place_names()
        .iter()
        .chain(net.transition_names())
        .cloned()
        .collect();
    let (np, nt) = (net.num_places(), net.num_transitions());
    let mut b = Net::builder();
    b.places(net.place_names()).transitions(net.transition_names());
    let mut names = Vec::new();
    let mut pair_map = Vec::new();
    for (k, &(p, t)) in pairs.iter().enumerate() {
        let (pn, tn) = (net.place_name(p), net.transition_name(t));
        let pa = fresh(&mut taken, format!("pa({pn},{tn})"));
        let pb = fresh(&mut taken, format!("pb({pn},{tn})"));
        let tp = fresh(&mut taken, format!("tp({pn},{tn})"));
        b.place(&pa).place(&pb);
        names.push((pa, pb, tp));
        pair_map.push(ThetaPair {
            p,
            t,
            p_a: np + 2 * k,
            p_b: np + 2 * k + 1,
            t_p: nt + k,
        });
    }
    for (_, _, tp) in &names {
        b.transition(tp);
    }
    for t in 0..nt {
        let tn = net.transition_name(t);
        for &(p, w) in net.pre(t) {
            if !pairs.contains(&(p, t)) {
                b.arc(net.place_name(p), tn, w);
            }
        }
        for &(p, w) in net.post(t) {
            b.arc(tn, net.place_name(p), w);
        }
    }
    for (&(p, t), (pa, pb, tp)) in pairs.iter().zip(&names) {
        let tn = net.transition_name(t);
        b.arc(net.place_name(p), tp, net.weight_pt(p, t));
        b.arc(tp, pa, 1).arc(pa, tn, 1).arc(tn, pb, 1).arc(pb, tp, 1);
    }
    let transformed_net = b.build().expect("gadget names are fresh");
    let mut m0 = system.m0.0.clone();
    for _ in &pairs {
        m0.extend([0, 1]);
    }
    let transformed = System::new(transformed_net, Marking(m0)).expect("marking sized to the net");
    ThetaResult {
        original: system.clone(),
        transformed,
        pair_map,
    }
}

/// Inserts, before every `t`, one firing of each gadget transition feeding `t`.
pub fn expand_sequence(theta: &ThetaResult, alpha: &[Transition]) -> Result<FiringSequence, LivenessError> {
    theta
        .original
        .fire_sequence(alpha)
        .map_err(LivenessError::Infeasible)?;
    let mut out = Vec::new();
    for &t in alpha {
        out.extend(theta.pair_map.iter().filter(|g| g.t == t).map(|g| g.t_p));
        out.push(t);
    }
    Ok(FiringSequence(out))
}

/// Drops each gadget transition's last occurrence when its target does not fire after it.
pub fn reduce_sequence(theta: &ThetaResult, beta: &[Transition]) -> Result<FiringSequence, LivenessError> {
    theta
        .transformed
        .fire_sequence(beta)
        .map_err(LivenessError::Infeasible)?;
    let mut keep = vec![true; beta.len()];
    for g in &theta.pair_map {
        if let Some(i) = beta.iter().rposition(|&u| u == g.t_p) {
            if !beta[i + 1..].contains(&g.t) {
                keep[i] = false;
            }
        }
    }
    Ok(FiringSequence(
        beta.iter().zip(keep).filter(|(_, k)| *k).map(|(&u, _)| u).collect(),
    ))
}
