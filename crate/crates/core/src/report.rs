//! Machine-readable reports with place and transition names instead of indices.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::behavior::{oracle_deadlock_free, oracle_live, oracle_reversible, ReachabilityGraph};
use crate::liveness::LivenessVerdict;
use crate::net::{Marking, Net, ParikhVector, System, Transition};
use crate::reversibility::{ReversibilityVerdict, TSequence};
use crate::structure::{bound_of, ClassReport};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status")]
pub enum LivenessReport {
    Live,
    NonLive {
        deadlock: BTreeMap<String, u64>,
        firing_count: BTreeMap<String, u64>,
    },
    NotApplicable {
        reason: String,
    },
    Inconclusive {
        budget: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status")]
pub enum ReversibilityReport {
    Reversible { t_sequence: Vec<String> },
    NotReversible { reason: String },
    NotApplicable { reason: String },
    Unknown { k_max: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReachReport {
    pub complete: bool,
    pub nodes: usize,
    pub arcs: usize,
    /// `None` when the graph is truncated
    pub live: Option<bool>,
    pub reversible: Option<bool>,
    pub deadlock_free: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundRow {
    pub place: String,
    pub initial: u64,
    pub upper: Option<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub net: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<ClassReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub liveness: Option<LivenessReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_live: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reversibility: Option<ReversibilityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reach: Option<ReachReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Vec<BoundRow>>,
    /// wall-clock milliseconds per analysis step
    pub timings_ms: BTreeMap<String, f64>,
}

impl AnalysisReport {
    pub fn new(net: impl Into<String>) -> Self {
        AnalysisReport {
            net: net.into(),
            ..Default::default()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn named_marking(net: &Net, m: &Marking) -> BTreeMap<String, u64> {
    (0..net.num_places()).map(|p| (net.place_name(p).to_string(), m[p])).collect()
}

/// Non-zero entries only.
pub fn named_vector(net: &Net, y: &ParikhVector) -> BTreeMap<String, u64> {
    (0..net.num_transitions())
        .filter(|&t| y[t] > 0)
        .map(|t| (net.transition_name(t).to_string(), y[t]))
        .collect()
}

pub fn named_sequence(net: &Net, seq: &[Transition]) -> Vec<String> {
    seq.iter().map(|&t| net.transition_name(t).to_string()).collect()
}

/// Converts a verdict after checking its witness once more; a witness that
/// fails the check is reported as inconclusive.
pub fn liveness_report(system: &System, v: &LivenessVerdict) -> LivenessReport {
    let net = &system.net;
    match v {
        LivenessVerdict::Live => LivenessReport::Live,
        LivenessVerdict::NonLive {
            deadlock,
            firing_count,
        } => {
            let replayed = net.incidence().shift(&system.m0, firing_count).as_ref() == Some(deadlock);
            if replayed && net.is_deadlock(deadlock) {
                LivenessReport::NonLive {
                    deadlock: named_marking(net, deadlock),
                    firing_count: named_vector(net, firing_count),
                }
            } else {
                LivenessReport::Inconclusive { budget: 0 }
            }
        }
        LivenessVerdict::NotApplicable { reason } => LivenessReport::NotApplicable { reason: reason.clone() },
        LivenessVerdict::Inconclusive { budget } => LivenessReport::Inconclusive { budget: *budget },
    }
}

pub fn reversibility_report(system: &System, v: &ReversibilityVerdict) -> ReversibilityReport {
    match v {
        ReversibilityVerdict::Reversible { t_sequence } => match TSequence::new(system, &t_sequence.sequence) {
            Ok(_) => ReversibilityReport::Reversible {
                t_sequence: named_sequence(&system.net, &t_sequence.sequence),
            },
            Err(e) => ReversibilityReport::NotApplicable { reason: e.to_string() },
        },
        ReversibilityVerdict::NotReversible { reason } => ReversibilityReport::NotReversible { reason: reason.clone() },
        ReversibilityVerdict::NotApplicable { reason } => ReversibilityReport::NotApplicable { reason: reason.clone() },
        ReversibilityVerdict::Unknown { k_max } => ReversibilityReport::Unknown { k_max: *k_max },
    }
}

pub fn reach_report(rg: &ReachabilityGraph, net: &Net) -> ReachReport {
    ReachReport {
        complete: rg.is_complete(),
        nodes: rg.nodes.len(),
        arcs: rg.arcs.len(),
        live: oracle_live(rg, net).ok(),
        reversible: oracle_reversible(rg).ok(),
        deadlock_free: oracle_deadlock_free(rg).ok(),
    }
}

pub fn bounds_table(system: &System) -> Vec<BoundRow> {
    (0..system.net.num_places())
        .map(|p| BoundRow {
            place: system.net.place_name(p).to_string(),
            initial: system.m0[p],
            upper: bound_of(system, p).upper,
        })
        .collect()
}
