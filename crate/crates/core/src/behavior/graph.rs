use std::collections::{HashMap, VecDeque};
use std::fmt::Write;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::Serialize;

use crate::net::{FiringSequence, Marking, Net, System, Transition};

use super::BehaviorError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ExplorationLimits {
    pub max_nodes: usize,
    /// Markings whose token sum exceeds this are not expanded.
    pub max_token_sum: Option<u64>,
}

impl Default for ExplorationLimits {
    fn default() -> Self {
        ExplorationLimits {
            max_nodes: 200_000,
            max_token_sum: None,
        }
    }
}

impl ExplorationLimits {
    pub fn nodes(max_nodes: usize) -> Self {
        ExplorationLimits {
            max_nodes: max_nodes.max(1),
            max_token_sum: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RgStatus {
    Complete,
    Truncated(ExplorationLimits),
}

/// Reachability graph explored breadth-first; node 0 is the root.
#[derive(Clone, Debug)]
pub struct ReachabilityGraph {
    pub nodes: Vec<Marking>,
    pub arcs: Vec<(usize, Transition, usize)>,
    pub status: RgStatus,
    index: HashMap<Marking, usize>,
    out: Vec<Vec<usize>>,
}

pub fn build_rg(system: &System, limits: ExplorationLimits) -> ReachabilityGraph {
    let net = &system.net;
    let mut g = ReachabilityGraph {
        nodes: vec![system.m0.clone()],
        arcs: Vec::new(),
        status: RgStatus::Complete,
        index: HashMap::from([(system.m0.clone(), 0)]),
        out: vec![Vec::new()],
    };
    let too_heavy = |m: &Marking| limits.max_token_sum.is_some_and(|k| m.token_sum() > k as u128);
    let mut queue = VecDeque::from([0usize]);
    if too_heavy(&system.m0) {
        g.status = RgStatus::Truncated(limits);
        queue.clear();
    }
    while let Some(i) = queue.pop_front() {
        for t in 0..net.num_transitions() {
            if !net.enabled(&g.nodes[i], t) {
                continue;
            }
            let Ok(next) = net.fire(&g.nodes[i], t) else {
                g.status = RgStatus::Truncated(limits);
                continue;
            };
            let j = match g.index.get(&next) {
                Some(&j) => j,
                None => {
                    if g.nodes.len() >= limits.max_nodes {
                        g.status = RgStatus::Truncated(limits);
                        continue;
                    }
                    let j = g.nodes.len();
                    if too_heavy(&next) {
                        g.status = RgStatus::Truncated(limits);
                    } else {
                        queue.push_back(j);
                    }
                    g.index.insert(next.clone(), j);
                    g.nodes.push(next);
                    g.out.push(Vec::new());
                    j
                }
            };
            g.out[i].push(g.arcs.len());
            g.arcs.push((i, t, j));
        }
    }
    g
}

impl ReachabilityGraph {
    pub fn is_complete(&self) -> bool {
        self.status == RgStatus::Complete
    }

    pub fn root(&self) -> &Marking {
        &self.nodes[0]
    }

    pub fn find(&self, m: &Marking) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn contains(&self, m: &Marking) -> bool {
        self.index.contains_key(m)
    }

    /// Outgoing arcs of node `i` as `(transition, target)`.
    pub fn successors(&self, i: usize) -> impl Iterator<Item = (Transition, usize)> + '_ {
        self.out[i].iter().map(|&a| (self.arcs[a].1, self.arcs[a].2))
    }

    /// Shortest firing sequence from `from` to `to`, restricted to nodes accepted by `inside`.
    pub fn path(&self, from: usize, to: usize, inside: impl Fn(usize) -> bool) -> Option<FiringSequence> {
        self.nearest(from, inside, |j| j == to).map(|(_, seq)| seq)
    }

    /// Breadth-first search from `from` for the closest node satisfying `goal`.
    pub fn nearest(
        &self,
        from: usize,
        inside: impl Fn(usize) -> bool,
        goal: impl Fn(usize) -> bool,
    ) -> Option<(usize, FiringSequence)> {
        let mut prev: HashMap<usize, (usize, Transition)> = HashMap::new();
        let mut queue = VecDeque::from([from]);
        let mut seen = vec![false; self.nodes.len()];
        seen[from] = true;
        while let Some(i) = queue.pop_front() {
            if goal(i) {
                let mut seq = Vec::new();
                let mut cur = i;
                while cur != from {
                    let (p, t) = prev[&cur];
                    seq.push(t);
                    cur = p;
                }
                seq.reverse();
                return Some((i, FiringSequence(seq)));
            }
            for (t, j) in self.successors(i) {
                if !seen[j] && inside(j) {
                    seen[j] = true;
                    prev.insert(j, (i, t));
                    queue.push_back(j);
                }
            }
        }
        None
    }

    /// Strongly connected components; `comp[i]` is the component of node `i`.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut g = DiGraph::<(), ()>::with_capacity(self.nodes.len(), self.arcs.len());
        for _ in &self.nodes {
            g.add_node(());
        }
        for &(a, _, b) in &self.arcs {
            g.add_edge(NodeIndex::new(a), NodeIndex::new(b), ());
        }
        let sccs = tarjan_scc(&g);
        let mut comp = vec![0; self.nodes.len()];
        for (c, members) in sccs.iter().enumerate() {
            for n in members {
                comp[n.index()] = c;
            }
        }
        (comp, sccs.len())
    }

    /// Components without arcs leaving them.
    pub fn bottom_components(&self) -> Vec<Vec<usize>> {
        let (comp, k) = self.components();
        let mut bottom = vec![true; k];
        for &(a, _, b) in &self.arcs {
            if comp[a] != comp[b] {
                bottom[comp[a]] = false;
            }
        }
        let mut groups = vec![Vec::new(); k];
        for (i, &c) in comp.iter().enumerate() {
            groups[c].push(i);
        }
        let mut out: Vec<Vec<usize>> = groups
            .into_iter()
            .enumerate()
            .filter(|(c, _)| bottom[*c])
            .map(|(_, g)| g)
            .collect();
        out.sort();
        out
    }

    fn require_complete(&self) -> Result<(), BehaviorError> {
        if self.is_complete() {
            Ok(())
        } else {
            Err(BehaviorError::TruncatedGraph)
        }
    }

    /// Graphviz text: node labels are marking vectors, arc labels transition ids.
    pub fn to_dot(&self, net: &Net) -> String {
        let mut out = String::from("digraph rg {\n");
        for (i, m) in self.nodes.iter().enumerate() {
            let shape = if i == 0 { ", shape=doublecircle" } else { "" };
            let _ = writeln!(out, "  s{i} [label=\"{m}\"{shape}];");
        }
        for &(a, t, b) in &self.arcs {
            let _ = writeln!(out, "  s{a} -> s{b} [label=\"{}\"];", net.transition_name(t));
        }
        out.push_str("}\n");
        out
    }
}

/// Every bottom component fires every transition.
pub fn oracle_live(rg: &ReachabilityGraph, net: &Net) -> Result<bool, BehaviorError> {
    rg.require_complete()?;
    Ok(rg.bottom_components().iter().all(|members| {
        let mut seen = vec![false; net.num_transitions()];
        for &i in members {
            for (t, _) in rg.successors(i) {
                seen[t] = true;
            }
        }
        seen.iter().all(|&b| b)
    }))
}

pub fn oracle_reversible(rg: &ReachabilityGraph) -> Result<bool, BehaviorError> {
    rg.require_complete()?;
    Ok(rg.components().1 == 1)
}

pub fn oracle_deadlock_free(rg: &ReachabilityGraph) -> Result<bool, BehaviorError> {
    rg.require_complete()?;
    Ok((0..rg.nodes.len()).all(|i| rg.successors(i).next().is_some()))
}

/// Some marking is reachable from every reachable marking.
pub fn oracle_home_state(rg: &ReachabilityGraph) -> Result<bool, BehaviorError> {
    rg.require_complete()?;
    Ok(rg.bottom_components().len() == 1)
}

pub fn is_deadlock(system: &System) -> bool {
    system.net.is_deadlock(&system.m0)
}
