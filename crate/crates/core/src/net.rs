//! Weighted nets, markings, firing and sequence arithmetic.
//!
//! Places and transitions are addressed by their index in declaration order.
//! Names are kept for display and for the text format.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Deref, DerefMut};
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

pub type Place = usize;
pub type Transition = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetError {
    #[error("duplicate identifier `{0}`")]
    DuplicateId(String),
    #[error("unknown identifier `{0}`")]
    UnknownId(String),
    #[error("arc {0} -> {1} has weight zero")]
    ZeroWeight(String, String),
    #[error("arc {0} -> {1} must join a place and a transition")]
    BadArc(String, String),
    #[error("arc {0} -> {1} declared twice")]
    DuplicateArc(String, String),
    #[error("weight on {0} -> {1} does not fit in a signed 64-bit integer")]
    WeightTooLarge(String, String),
    #[error("vector has length {found}, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("transition {transition} is not enabled at position {position}")]
    NotEnabled { transition: String, position: usize },
    #[error("token count overflow while firing {0}")]
    Overflow(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Net {
    places: Vec<String>,
    transitions: Vec<String>,
    place_ix: HashMap<String, Place>,
    trans_ix: HashMap<String, Transition>,
    /// per transition, sorted by place
    pre: Vec<Vec<(Place, u64)>>,
    post: Vec<Vec<(Place, u64)>>,
    /// per place, sorted by transition
    place_in: Vec<Vec<(Transition, u64)>>,
    place_out: Vec<Vec<(Transition, u64)>>,
}

#[derive(Clone, Debug, Default)]
pub struct NetBuilder {
    places: Vec<String>,
    transitions: Vec<String>,
    arcs: Vec<(String, String, u64)>,
}

impl NetBuilder {
    pub fn place(&mut self, id: impl Into<String>) -> &mut Self {
        self.places.push(id.into());
        self
    }

    pub fn places<S: AsRef<str>>(&mut self, ids: &[S]) -> &mut Self {
        for id in ids {
            self.place(id.as_ref());
        }
        self
    }

    pub fn transition(&mut self, id: impl Into<String>) -> &mut Self {
        self.transitions.push(id.into());
        self
    }

    pub fn transitions<S: AsRef<str>>(&mut self, ids: &[S]) -> &mut Self {
        for id in ids {
            self.transition(id.as_ref());
        }
        self
    }

    /// Arc from `from` to `to`; one end must be a place, the other a transition.
    pub fn arc(&mut self, from: impl Into<String>, to: impl Into<String>, weight: u64) -> &mut Self {
        self.arcs.push((from.into(), to.into(), weight));
        self
    }

    pub fn build(&self) -> Result<Net, NetError> {
        let mut place_ix = HashMap::new();
        let mut trans_ix = HashMap::new();
        for (i, p) in self.places.iter().enumerate() {
            if place_ix.insert(p.clone(), i).is_some() {
                return Err(NetError::DuplicateId(p.clone()));
            }
        }
        for (i, t) in self.transitions.iter().enumerate() {
            if place_ix.contains_key(t) || trans_ix.insert(t.clone(), i).is_some() {
                return Err(NetError::DuplicateId(t.clone()));
            }
        }
        let np = self.places.len();
        let nt = self.transitions.len();
        let mut pre = vec![Vec::new(); nt];
        let mut post = vec![Vec::new(); nt];
        let mut place_in = vec![Vec::new(); np];
        let mut place_out = vec![Vec::new(); np];
        for (a, b, w) in &self.arcs {
            if *w == 0 {
                return Err(NetError::ZeroWeight(a.clone(), b.clone()));
            }
            if *w > i64::MAX as u64 {
                return Err(NetError::WeightTooLarge(a.clone(), b.clone()));
            }
            let (is_pre, p, t) = match (place_ix.get(a), trans_ix.get(a), place_ix.get(b), trans_ix.get(b)) {
                (Some(&p), _, _, Some(&t)) => (true, p, t),
                (_, Some(&t), Some(&p), _) => (false, p, t),
                (None, None, _, _) => return Err(NetError::UnknownId(a.clone())),
                (_, _, None, None) => return Err(NetError::UnknownId(b.clone())),
                _ => return Err(NetError::BadArc(a.clone(), b.clone())),
            };
            let (tv, pv) = if is_pre {
                (&mut pre[t], &mut place_out[p])
            } else {
                (&mut post[t], &mut place_in[p])
            };
            if tv.iter().any(|&(q, _)| q == p) {
                return Err(NetError::DuplicateArc(a.clone(), b.clone()));
            }
            tv.push((p, *w));
            pv.push((t, *w));
        }
        for v in pre.iter_mut().chain(post.iter_mut()).chain(place_in.iter_mut()).chain(place_out.iter_mut()) {
            v.sort_unstable();
        }
        Ok(Net {
            places: self.places.clone(),
            transitions: self.transitions.clone(),
            place_ix,
            trans_ix,
            pre,
            post,
            place_in,
            place_out,
        })
    }
}

impl Net {
    pub fn builder() -> NetBuilder {
        NetBuilder::default()
    }

    pub fn num_places(&self) -> usize {
        self.places.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions.len()
    }

    pub fn place_names(&self) -> &[String] {
        &self.places
    }

    pub fn transition_names(&self) -> &[String] {
        &self.transitions
    }

    pub fn place_name(&self, p: Place) -> &str {
        &self.places[p]
    }

    pub fn transition_name(&self, t: Transition) -> &str {
        &self.transitions[t]
    }

    pub fn place(&self, id: &str) -> Result<Place, NetError> {
        self.place_ix.get(id).copied().ok_or_else(|| NetError::UnknownId(id.to_string()))
    }

    pub fn transition(&self, id: &str) -> Result<Transition, NetError> {
        self.trans_ix.get(id).copied().ok_or_else(|| NetError::UnknownId(id.to_string()))
    }

    /// Input places of `t` with weights.
    pub fn pre(&self, t: Transition) -> &[(Place, u64)] {
        &self.pre[t]
    }

    /// Output places of `t` with weights.
    pub fn post(&self, t: Transition) -> &[(Place, u64)] {
        &self.post[t]
    }

    /// Input transitions of `p` with weights.
    pub fn place_pre(&self, p: Place) -> &[(Transition, u64)] {
        &self.place_in[p]
    }

    /// Output transitions of `p` with weights.
    pub fn place_post(&self, p: Place) -> &[(Transition, u64)] {
        &self.place_out[p]
    }

    /// W(p, t), zero without an arc.
    pub fn weight_pt(&self, p: Place, t: Transition) -> u64 {
        self.pre[t].iter().find(|&&(q, _)| q == p).map_or(0, |&(_, w)| w)
    }

    /// W(t, p), zero without an arc.
    pub fn weight_tp(&self, t: Transition, p: Place) -> u64 {
        self.post[t].iter().find(|&&(q, _)| q == p).map_or(0, |&(_, w)| w)
    }

    /// All arcs as `(from, to, weight)` names: per transition, inputs then outputs.
    pub fn arcs(&self) -> Vec<(&str, &str, u64)> {
        let mut out = Vec::new();
        for t in 0..self.num_transitions() {
            for &(p, w) in &self.pre[t] {
                out.push((self.place_name(p), self.transition_name(t), w));
            }
            for &(p, w) in &self.post[t] {
                out.push((self.transition_name(t), self.place_name(p), w));
            }
        }
        out
    }

    pub fn incidence(&self) -> IncidenceMatrix {
        let mut rows = vec![vec![0i64; self.num_transitions()]; self.num_places()];
        for t in 0..self.num_transitions() {
            for &(p, w) in &self.pre[t] {
                rows[p][t] -= w as i64;
            }
            for &(p, w) in &self.post[t] {
                rows[p][t] += w as i64;
            }
        }
        IncidenceMatrix { rows }
    }

    pub fn enabled(&self, m: &Marking, t: Transition) -> bool {
        self.pre[t].iter().all(|&(p, w)| m[p] >= w)
    }

    pub fn enabled_transitions(&self, m: &Marking) -> Vec<Transition> {
        (0..self.num_transitions()).filter(|&t| self.enabled(m, t)).collect()
    }

    pub fn is_deadlock(&self, m: &Marking) -> bool {
        (0..self.num_transitions()).all(|t| !self.enabled(m, t))
    }

    pub fn fire(&self, m: &Marking, t: Transition) -> Result<Marking, NetError> {
        self.fire_at(m, t, 0)
    }

    fn fire_at(&self, m: &Marking, t: Transition, position: usize) -> Result<Marking, NetError> {
        if !self.enabled(m, t) {
            return Err(NetError::NotEnabled {
                transition: self.transition_name(t).to_string(),
                position,
            });
        }
        let mut next = m.clone();
        for &(p, w) in &self.pre[t] {
            next[p] -= w;
        }
        for &(p, w) in &self.post[t] {
            next[p] = next[p]
                .checked_add(w)
                .ok_or_else(|| NetError::Overflow(self.transition_name(t).to_string()))?;
        }
        Ok(next)
    }

    /// Fires `seq` from `m`; the error names the first position that is not enabled.
    pub fn fire_sequence(&self, m: &Marking, seq: &[Transition]) -> Result<Marking, NetError> {
        let mut cur = m.clone();
        for (i, &t) in seq.iter().enumerate() {
            cur = self.fire_at(&cur, t, i)?;
        }
        Ok(cur)
    }

    pub fn is_feasible(&self, m: &Marking, seq: &[Transition]) -> bool {
        self.fire_sequence(m, seq).is_ok()
    }

    /// Parses a whitespace separated list of transition names.
    pub fn parse_sequence(&self, text: &str) -> Result<FiringSequence, NetError> {
        text.split_whitespace()
            .map(|s| self.transition(s))
            .collect::<Result<Vec<_>, _>>()
            .map(FiringSequence)
    }

    pub fn format_sequence(&self, seq: &[Transition]) -> String {
        seq.iter()
            .map(|&t| self.transition_name(t))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Marking from `(place, tokens)` pairs, zero elsewhere.
    pub fn marking(&self, tokens: &[(&str, u64)]) -> Result<Marking, NetError> {
        let mut m = Marking::zeros(self.num_places());
        for &(p, k) in tokens {
            m[self.place(p)?] = k;
        }
        Ok(m)
    }

    pub fn check_marking(&self, m: &Marking) -> Result<(), NetError> {
        if m.len() != self.num_places() {
            return Err(NetError::DimensionMismatch {
                expected: self.num_places(),
                found: m.len(),
            });
        }
        Ok(())
    }

    pub fn format_marking(&self, m: &Marking) -> String {
        let parts: Vec<String> = m
            .iter()
            .enumerate()
            .filter(|(_, &k)| k > 0)
            .map(|(p, &k)| {
                if k == 1 {
                    self.place_name(p).to_string()
                } else {
                    format!("{}*{}", k, self.place_name(p))
                }
            })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

/// Place-by-transition matrix with `I(p, t) = W(t, p) - W(p, t)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncidenceMatrix {
    pub rows: Vec<Vec<i64>>,
}

impl IncidenceMatrix {
    pub fn num_places(&self) -> usize {
        self.rows.len()
    }

    pub fn column(&self, t: Transition) -> Vec<i64> {
        self.rows.iter().map(|r| r[t]).collect()
    }

    pub fn get(&self, p: Place, t: Transition) -> i64 {
        self.rows[p][t]
    }

    /// `I . y` in 128-bit arithmetic.
    pub fn apply(&self, y: &[u64]) -> Vec<i128> {
        self.rows
            .iter()
            .map(|r| r.iter().zip(y).map(|(&a, &b)| a as i128 * b as i128).sum())
            .collect()
    }

    /// `m + I . y` when it is a marking (non-negative, fits u64).
    pub fn shift(&self, m: &Marking, y: &[u64]) -> Option<Marking> {
        let d = self.apply(y);
        let v: Option<Vec<u64>> = m
            .iter()
            .zip(d)
            .map(|(&a, b)| u64::try_from(a as i128 + b).ok())
            .collect();
        v.map(Marking)
    }
}

macro_rules! vec_newtype {
    ($(#[$meta:meta])* $name:ident, $elem:ty) => {
        $(#[$meta])*
        #[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
        #[serde(transparent)]
        pub struct $name(pub Vec<$elem>);

        impl Deref for $name {
            type Target = Vec<$elem>;
            fn deref(&self) -> &Vec<$elem> {
                &self.0
            }
        }

        impl DerefMut for $name {
            fn deref_mut(&mut self) -> &mut Vec<$elem> {
                &mut self.0
            }
        }

        impl From<Vec<$elem>> for $name {
            fn from(v: Vec<$elem>) -> Self {
                $name(v)
            }
        }
    };
}

vec_newtype!(
    /// Token count per place.
    Marking,
    u64
);
vec_newtype!(
    /// Occurrence count per transition; also used for arbitrary T-vectors.
    ParikhVector,
    u64
);
vec_newtype!(FiringSequence, Transition);

impl Marking {
    pub fn zeros(n: usize) -> Self {
        Marking(vec![0; n])
    }

    /// Componentwise `self >= other`.
    pub fn covers(&self, other: &Marking) -> bool {
        self.iter().zip(other.iter()).all(|(a, b)| a >= b)
    }

    pub fn token_sum(&self) -> u128 {
        self.iter().map(|&k| k as u128).sum()
    }
}

impl fmt::Display for Marking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, k) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, ")")
    }
}

impl ParikhVector {
    pub fn zeros(n: usize) -> Self {
        ParikhVector(vec![0; n])
    }

    pub fn le(&self, other: &ParikhVector) -> bool {
        self.iter().zip(other.iter()).all(|(a, b)| a <= b)
    }

    pub fn support(&self) -> Vec<Transition> {
        (0..self.len()).filter(|&t| self[t] > 0).collect()
    }

    pub fn total(&self) -> u64 {
        self.iter().sum()
    }

    pub fn scaled(&self, k: u64) -> ParikhVector {
        ParikhVector(self.iter().map(|&x| x * k).collect())
    }
}

/// Parikh vector of `seq` over `n` transitions.
pub fn parikh(seq: &[Transition], n: usize) -> ParikhVector {
    let mut v = ParikhVector::zeros(n);
    for &t in seq {
        v[t] += 1;
    }
    v
}

/// `tau - sigma`: for each occurrence in `sigma` drop the leftmost remaining
/// occurrence of the same transition in `tau`, if any.
pub fn residue(tau: &[Transition], sigma: &[Transition]) -> FiringSequence {
    let mut budget: HashMap<Transition, usize> = HashMap::new();
    for &t in sigma {
        *budget.entry(t).or_default() += 1;
    }
    residue_with(tau, |t| {
        let b = budget.entry(t).or_default();
        if *b > 0 {
            *b -= 1;
            true
        } else {
            false
        }
    })
}

/// `tau - Y`: drops the `Y(t)` leftmost occurrences of every `t`.
pub fn residue_by_vector(tau: &[Transition], y: &[u64]) -> FiringSequence {
    let mut budget = y.to_vec();
    residue_with(tau, |t| {
        let b = budget.get_mut(t);
        match b {
            Some(b) if *b > 0 => {
                *b -= 1;
                true
            }
            _ => false,
        }
    })
}

fn residue_with(tau: &[Transition], mut drop: impl FnMut(Transition) -> bool) -> FiringSequence {
    FiringSequence(tau.iter().copied().filter(|&t| !drop(t)).collect())
}

/// A net with an initial marking. The net is shared so rebasing is cheap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct System {
    pub net: Arc<Net>,
    pub m0: Marking,
}

impl System {
    pub fn new(net: Net, m0: Marking) -> Result<Self, NetError> {
        net.check_marking(&m0)?;
        Ok(System {
            net: Arc::new(net),
            m0,
        })
    }

    /// Same net, other initial marking.
    pub fn with_marking(&self, m: Marking) -> System {
        System {
            net: Arc::clone(&self.net),
            m0: m,
        }
    }

    pub fn fire_sequence(&self, seq: &[Transition]) -> Result<Marking, NetError> {
        self.net.fire_sequence(&self.m0, seq)
    }

    pub fn seq(&self, text: &str) -> FiringSequence {
        self.net
            .parse_sequence(text)
            .unwrap_or_else(|e| panic!("bad sequence `{text}`: {e}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1() -> System {
        let mut b = Net::builder();
        b.places(&["p1", "p2", "p3", "p4"]).transitions(&["t1", "t2", "t3"]);
        b.arc("p3", "t2", 4).arc("p4", "t2", 3).arc("t2", "p1", 2).arc("t2", "p2", 1);
        b.arc("p1", "t1", 1).arc("t1", "p3", 2);
        b.arc("p2", "t3", 1).arc("t3", "p4", 3);
        System::new(b.build().unwrap(), Marking(vec![0, 0, 4, 3])).unwrap()
    }

    #[test]
    fn incidence_column() {
        let s = fig1();
        let t2 = s.net.transition("t2").unwrap();
        assert_eq!(s.net.incidence().column(t2), vec![2, 1, -4, -3]);
    }

    #[test]
    fn firing_a_sequence() {
        let s = fig1();
        let m = s.fire_sequence(&s.seq("t2 t1 t3")).unwrap();
        assert_eq!(m, Marking(vec![1, 0, 2, 3]));
        // state equation agrees
        let y = parikh(&s.seq("t2 t1 t3"), 3);
        assert_eq!(s.net.incidence().shift(&s.m0, &y), Some(m));
    }

    #[test]
    fn not_enabled_reports_position() {
        let s = fig1();
        let err = s.fire_sequence(&s.seq("t2 t3 t3")).unwrap_err();
        assert_eq!(
            err,
            NetError::NotEnabled {
                transition: "t3".into(),
                position: 2
            }
        );
    }

    #[test]
    fn zero_weight_and_duplicates_rejected() {
        let mut b = Net::builder();
        b.place("p").transition("t").arc("p", "t", 0);
        assert!(matches!(b.build(), Err(NetError::ZeroWeight(..))));
        let mut b = Net::builder();
        b.place("x").transition("x");
        assert!(matches!(b.build(), Err(NetError::DuplicateId(_))));
        let mut b = Net::builder();
        b.place("p").place("q").transition("t").arc("p", "q", 1);
        assert!(matches!(b.build(), Err(NetError::BadArc(..))));
    }

    fn letters(s: &str) -> Vec<usize> {
        s.bytes().map(|c| (c - b'a') as usize).collect()
    }

    #[test]
    fn residues() {
        assert_eq!(residue(&letters("acbcacbc"), &letters("abbcb")).0, letters("cacc"));
        assert_eq!(residue(&letters("abbcb"), &letters("acbcacbc")).0, letters("b"));
        assert_eq!(residue_by_vector(&letters("abbcb"), &[1, 1, 0]).0, letters("bcb"));
    }
}
