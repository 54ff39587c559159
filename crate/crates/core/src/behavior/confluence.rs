use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::net::{parikh, residue, residue_by_vector, FiringSequence, Marking, ParikhVector, System, Transition};
use crate::structure::{classify, shared_places};

use super::{BehaviorError, ExplorationLimits};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConfluenceWitness {
    pub sigma: FiringSequence,
    pub m_prime: Marking,
}

/// Shortest sequence over `allowed` transitions from `from` to a marking that
/// enables one of `targets`.
fn enabling_prefix(
    system: &System,
    from: &Marking,
    allowed: &[bool],
    targets: &[Transition],
    limits: ExplorationLimits,
) -> Option<(FiringSequence, Transition)> {
    let net = &system.net;
    let mut prev: HashMap<Marking, Option<(Marking, Transition)>> = HashMap::from([(from.clone(), None)]);
    let mut queue = VecDeque::from([from.clone()]);
    while let Some(m) = queue.pop_front() {
        if let Some(&t) = targets.iter().find(|&&t| net.enabled(&m, t)) {
            let mut seq = Vec::new();
            let mut cur = m;
            while let Some((p, u)) = prev[&cur].clone() {
                seq.push(u);
                cur = p;
            }
            seq.reverse();
            return Some((FiringSequence(seq), t));
        }
        for u in (0..net.num_transitions()).filter(|&u| allowed[u] && net.enabled(&m, u)) {
            let Ok(next) = net.fire(&m, u) else { continue };
            if prev.contains_key(&next) {
                continue;
            }
            if prev.len() >= limits.max_nodes
                || limits.max_token_sum.is_some_and(|k| next.token_sum() > k as u128)
            {
                continue;
            }
            prev.insert(next.clone(), Some((m.clone(), u)));
            queue.push_back(next);
        }
    }
    None
}

/// For `M = M0 + I·Y` in a live H1S-WMG≤ system, a sequence `σ` from `M0`
/// with `P(σ) ≥ Y` such that `σ∸Y` fired from `M` reaches the same marking.
///
/// Built step by step: fire an owed transition when one is enabled, otherwise
/// first fire a shortest prefix of transitions that are neither owed nor
/// outputs of the shared place.
pub fn confluence_witness(
    system: &System,
    y: &ParikhVector,
    limits: ExplorationLimits,
) -> Result<ConfluenceWitness, BehaviorError> {
    let net = &system.net;
    if !classify(net).h1s_wmg_le {
        return Err(BehaviorError::NotApplicable("net is not H1S-WMG≤".into()));
    }
    let n = net.num_transitions();
    if y.len() != n {
        return Err(crate::net::NetError::DimensionMismatch { expected: n, found: y.len() }.into());
    }
    let m = net
        .incidence()
        .shift(&system.m0, y)
        .ok_or_else(|| BehaviorError::Precondition("M0 + I·Y has a negative entry".into()))?;
    let mut choice = vec![false; n];
    for p in shared_places(net) {
        for &(t, _) in net.place_post(p) {
            choice[t] = true;
        }
    }

    let mut rest = y.clone();
    let mut from_m0 = system.m0.clone();
    let mut from_m = m.clone();
    let mut sigma: Vec<Transition> = Vec::new();
    while rest.total() > 0 {
        let owed = rest.support();
        if let Some(&t) = owed.iter().find(|&&t| net.enabled(&from_m0, t)) {
            from_m0 = net.fire(&from_m0, t)?;
            rest[t] -= 1;
            sigma.push(t);
            continue;
        }
        let allowed: Vec<bool> = (0..n).map(|u| rest[u] == 0 && !choice[u]).collect();
        let (prefix, t) = enabling_prefix(system, &from_m0, &allowed, &owed, limits)
            .ok_or(BehaviorError::LivenessSearchExhausted)?;
        from_m0 = net.fire_sequence(&from_m0, &prefix)?;
        from_m = net.fire_sequence(&from_m, &prefix).map_err(BehaviorError::Infeasible)?;
        from_m0 = net.fire(&from_m0, t)?;
        rest[t] -= 1;
        sigma.extend(prefix.iter());
        sigma.push(t);
    }

    // independent replay of both sides
    let end = system.fire_sequence(&sigma)?;
    let rest_seq = residue_by_vector(&sigma, y);
    let end_m = net.fire_sequence(&m, &rest_seq).map_err(BehaviorError::Infeasible)?;
    debug_assert!(parikh(&sigma, n).iter().zip(y.iter()).all(|(a, b)| a >= b));
    if end != end_m || end != from_m0 || end != from_m {
        return Err(BehaviorError::Precondition("replay of the two sides disagrees".into()));
    }
    Ok(ConfluenceWitness {
        sigma: FiringSequence(sigma),
        m_prime: end,
    })
}

/// `τ(σ∸τ)` and `σ(τ∸σ)` are both feasible and reach the same marking.
pub fn check_keller(system: &System, tau: &[Transition], sigma: &[Transition]) -> Result<bool, BehaviorError> {
    system.fire_sequence(tau).map_err(BehaviorError::Infeasible)?;
    system.fire_sequence(sigma).map_err(BehaviorError::Infeasible)?;
    let left: Vec<Transition> = tau.iter().copied().chain(residue(sigma, tau).0).collect();
    let right: Vec<Transition> = sigma.iter().copied().chain(residue(tau, sigma).0).collect();
    match (system.fire_sequence(&left), system.fire_sequence(&right)) {
        (Ok(a), Ok(b)) => Ok(a == b),
        _ => Ok(false),
    }
}
