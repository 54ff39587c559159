//! Structural and behavioural analysis of weighted Petri nets, centred on
//! homogeneous nets with at most one shared place.

pub mod behavior;
pub mod cli;
pub mod dsl;
pub mod fixtures;
pub mod liveness;
pub mod net;
pub mod report;
pub mod reversibility;
pub mod structure;
