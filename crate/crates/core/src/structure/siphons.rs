use std::collections::BTreeSet;

use crate::net::{Marking, Net, Place};

use super::StructureError;

/// Non-empty `D` with `•D ⊆ D•`.
pub fn is_siphon(net: &Net, d: &BTreeSet<Place>) -> bool {
    !d.is_empty() && d.iter().all(|&p| feeders_covered(net, p, d))
}

/// Every input transition of `p` takes something from `d`.
fn feeders_covered(net: &Net, p: Place, d: &BTreeSet<Place>) -> bool {
    net.place_pre(p)
        .iter()
        .all(|&(t, _)| net.pre(t).iter().any(|(q, _)| d.contains(q)))
}

/// Largest siphon contained in `set` (possibly empty).
pub fn max_siphon_within(net: &Net, set: &BTreeSet<Place>) -> BTreeSet<Place> {
    let mut d = set.clone();
    loop {
        let bad: Vec<Place> = d.iter().copied().filter(|&p| !feeders_covered(net, p, &d)).collect();
        if bad.is_empty() {
            return d;
        }
        for p in bad {
            d.remove(&p);
        }
    }
}

fn is_minimal(net: &Net, d: &BTreeSet<Place>) -> bool {
    d.iter().all(|p| {
        let mut smaller = d.clone();
        smaller.remove(p);
        max_siphon_within(net, &smaller).is_empty()
    })
}

/// All minimal siphons, each sorted, in discovery order.
///
/// Branching search: grow a set from a seed place, and whenever some input
/// transition of the set takes nothing from it, branch on which of that
/// transition's inputs joins. Earlier alternatives are excluded in later
/// branches, so every minimal siphon is reached from its first place.
pub fn minimal_siphons(net: &Net, cap: usize) -> Result<Vec<BTreeSet<Place>>, StructureError> {
    let mut found: Vec<BTreeSet<Place>> = Vec::new();
    for seed in 0..net.num_places() {
        let d: BTreeSet<Place> = [seed].into();
        let excluded: BTreeSet<Place> = (0..seed).collect();
        grow(net, d, excluded, &mut found, cap)?;
    }
    Ok(found)
}

fn grow(
    net: &Net,
    d: BTreeSet<Place>,
    mut excluded: BTreeSet<Place>,
    found: &mut Vec<BTreeSet<Place>>,
    cap: usize,
) -> Result<(), StructureError> {
    // a superset of a known minimal siphon cannot be minimal
    if found.iter().any(|f| f.is_subset(&d)) {
        return Ok(());
    }
    let open = d.iter().find_map(|&p| {
        net.place_pre(p)
            .iter()
            .map(|&(t, _)| t)
            .find(|&t| !net.pre(t).iter().any(|(q, _)| d.contains(q)))
    });
    match open {
        None => {
            if is_minimal(net, &d) {
                if found.len() == cap {
                    return Err(StructureError::Truncated { cap });
                }
                found.push(d);
            }
            Ok(())
        }
        Some(t) => {
            for &(q, _) in net.pre(t) {
                if excluded.contains(&q) {
                    continue;
                }
                let mut next = d.clone();
                next.insert(q);
                grow(net, next, excluded.clone(), found, cap)?;
                excluded.insert(q);
            }
            Ok(())
        }
    }
}

/// Every place of `d` disables all of its output transitions.
pub fn is_deadlocked_siphon(net: &Net, m: &Marking, d: &BTreeSet<Place>) -> Result<bool, StructureError> {
    if !is_siphon(net, d) {
        return Err(StructureError::NotASiphon);
    }
    Ok(d.iter()
        .all(|&p| net.place_post(p).iter().all(|&(_, w)| m[p] < w)))
}
