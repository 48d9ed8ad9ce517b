//! The token game: enabledness, firing, firing sequences and bounded
//! exploration of reachable markings.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{MarkedPetriNet, Marking, NodeId, NodeSet, PetriNet};

/// Default number of firing-tree nodes an exhaustive enumeration may visit.
pub const DEFAULT_NODE_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("unknown transition `{0}`")]
    UnknownTransition(NodeId),
    #[error("unknown place `{0}`")]
    UnknownPlace(NodeId),
    #[error("transition `{0}` is not enabled")]
    NotEnabled(NodeId),
    #[error("step {index} (`{transition}`) is not enabled")]
    NotEnabledAt { index: usize, transition: NodeId },
    #[error("the sequence cannot be fired: {0}")]
    InvalidSequence(Box<SemanticsError>),
    #[error("enumeration visited more than {budget} firing-tree nodes")]
    ExplosionCap { budget: usize },
}

/// An ordered list of transition firings; empty for ε.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FiringSequence(pub Vec<NodeId>);

impl FiringSequence {
    pub fn empty() -> Self {
        FiringSequence(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn steps(&self) -> &[NodeId] {
        &self.0
    }
}

impl<S: Into<NodeId>> FromIterator<S> for FiringSequence {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        FiringSequence(iter.into_iter().map(Into::into).collect())
    }
}

impl fmt::Display for FiringSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

pub(crate) fn enabled_dense(net: &PetriNet, tokens: &[u64], t: usize) -> bool {
    net.trans_pre(t)
        .iter()
        .all(|&(p, w)| tokens[p] >= u64::from(w))
}

pub(crate) fn fire_dense(net: &PetriNet, tokens: &[u64], t: usize) -> Vec<u64> {
    let mut next = tokens.to_vec();
    for &(p, w) in net.trans_pre(t) {
        next[p] = next[p]
            .checked_sub(u64::from(w))
            .expect("firing a disabled transition");
    }
    for &(p, w) in net.trans_post(t) {
        next[p] += u64::from(w);
    }
    next
}

fn transition_index(net: &PetriNet, t: &str) -> Result<usize, SemanticsError> {
    net.transition_index(t)
        .ok_or_else(|| SemanticsError::UnknownTransition(NodeId::from(t)))
}

pub(crate) fn place_mask(net: &PetriNet, q: &NodeSet) -> Result<Vec<bool>, SemanticsError> {
    let mut mask = vec![false; net.places().len()];
    for p in q {
        let i = net
            .place_index(p.as_str())
            .ok_or_else(|| SemanticsError::UnknownPlace(p.clone()))?;
        mask[i] = true;
    }
    Ok(mask)
}

/// Whether firing `t` strictly increases some place of the mask.
pub(crate) fn increases_any(net: &PetriNet, t: usize, mask: &[bool]) -> bool {
    net.trans_post(t)
        .iter()
        .any(|&(p, w)| mask[p] && w > net.input_weight(p, t))
}

/// `M[t⟩`: every input place holds at least the arc weight.
pub fn is_enabled(s: &MarkedPetriNet, t: &str) -> Result<bool, SemanticsError> {
    let ti = transition_index(s.net(), t)?;
    Ok(enabled_dense(s.net(), &s.marking().to_dense(s.net()), ti))
}

/// Fires `t` at the net's marking. Places are listed with their new count,
/// zero counts included.
pub fn fire(s: &MarkedPetriNet, t: &str) -> Result<Marking, SemanticsError> {
    let net = s.net();
    let ti = transition_index(net, t)?;
    let tokens = s.marking().to_dense(net);
    if !enabled_dense(net, &tokens, ti) {
        return Err(SemanticsError::NotEnabled(NodeId::from(t)));
    }
    let next = fire_dense(net, &tokens, ti);
    Ok(net.places().iter().cloned().zip(next).collect())
}

/// Fires the whole sequence and returns `M1 … Mn`. The empty sequence yields
/// an empty list.
pub fn fire_sequence(
    s: &MarkedPetriNet,
    seq: &FiringSequence,
) -> Result<Vec<Marking>, SemanticsError> {
    let net = s.net();
    let mut tokens = s.marking().to_dense(net);
    let mut out = Vec::with_capacity(seq.len());
    for (index, t) in seq.steps().iter().enumerate() {
        let ti = transition_index(net, t.as_str())?;
        if !enabled_dense(net, &tokens, ti) {
            return Err(SemanticsError::NotEnabledAt {
                index,
                transition: t.clone(),
            });
        }
        tokens = fire_dense(net, &tokens, ti);
        out.push(
            net.places()
                .iter()
                .cloned()
                .zip(tokens.iter().copied())
                .collect(),
        );
    }
    Ok(out)
}

/// The sequence is fireable and its last step strictly increases some place
/// of `q`.
pub fn is_increasing(
    s: &MarkedPetriNet,
    seq: &FiringSequence,
    q: &NodeSet,
) -> Result<bool, SemanticsError> {
    let markings =
        fire_sequence(s, seq).map_err(|e| SemanticsError::InvalidSequence(Box::new(e)))?;
    let Some(last) = markings.last() else {
        return Ok(false);
    };
    let before = if markings.len() >= 2 {
        markings[markings.len() - 2].clone()
    } else {
        s.marking().clone()
    };
    Ok(q.iter()
        .any(|p| last.get(p.as_str()) > before.get(p.as_str())))
}

/// Every increasing firing sequence of length at most `max_len`, found by
/// exhaustive depth-first search over the firing tree. Children are expanded
/// in transition-id order, so the output is in lexicographic order.
pub fn find_increasing_sequences(
    s: &MarkedPetriNet,
    q: &NodeSet,
    max_len: usize,
    budget: usize,
) -> Result<Vec<FiringSequence>, SemanticsError> {
    let net = s.net();
    let mask = place_mask(net, q)?;
    let mut found = Vec::new();
    let mut visited = 0usize;
    let mut prefix = Vec::with_capacity(max_len);
    let tokens = s.marking().to_dense(net);
    dfs_increasing(
        net,
        &mask,
        &tokens,
        max_len,
        budget,
        &mut visited,
        &mut prefix,
        &mut found,
    )?;
    Ok(found)
}

#[allow(clippy::too_many_arguments)]
fn dfs_increasing(
    net: &PetriNet,
    mask: &[bool],
    tokens: &[u64],
    remaining: usize,
    budget: usize,
    visited: &mut usize,
    prefix: &mut Vec<usize>,
    found: &mut Vec<FiringSequence>,
) -> Result<(), SemanticsError> {
    if remaining == 0 {
        return Ok(());
    }
    for t in 0..net.transitions().len() {
        if !enabled_dense(net, tokens, t) {
            continue;
        }
        *visited += 1;
        if *visited > budget {
            return Err(SemanticsError::ExplosionCap { budget });
        }
        let next = fire_dense(net, tokens, t);
        prefix.push(t);
        if increases_any(net, t, mask) {
            found.push(FiringSequence(
                prefix
                    .iter()
                    .map(|&i| net.transitions()[i].clone())
                    .collect(),
            ));
        }
        dfs_increasing(
            net,
            mask,
            &next,
            remaining - 1,
            budget,
            visited,
            prefix,
            found,
        )?;
        prefix.pop();
    }
    Ok(())
}

/// Keeps exactly the firings of transitions in `r`, in order.
pub fn project_subsequence(seq: &FiringSequence, r: &NodeSet) -> FiringSequence {
    FiringSequence(
        seq.steps()
            .iter()
            .filter(|t| r.contains(*t))
            .cloned()
            .collect(),
    )
}

/// Breadth-first reachability graph, truncated at `state_cap` markings.
#[derive(Clone, Debug)]
pub struct ReachGraph {
    places: Vec<NodeId>,
    transitions: Vec<NodeId>,
    states: Vec<Vec<u64>>,
    edges: Vec<(usize, usize, usize)>,
    parent: Vec<Option<usize>>,
    complete: bool,
}

impl ReachGraph {
    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// `false` when the cap stopped the exploration.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    /// Index of the initial marking.
    pub fn initial(&self) -> usize {
        0
    }

    pub fn marking(&self, state: usize) -> Marking {
        self.places
            .iter()
            .zip(&self.states[state])
            .filter(|(_, &n)| n > 0)
            .map(|(p, &n)| (p.clone(), n))
            .collect()
    }

    /// Token vector of a state over the net's place order.
    pub fn tokens(&self, state: usize) -> &[u64] {
        &self.states[state]
    }

    pub fn places(&self) -> &[NodeId] {
        &self.places
    }

    /// `(from, transition, to)` triples.
    pub fn edges(&self) -> impl Iterator<Item = (usize, &NodeId, usize)> + '_ {
        self.edges
            .iter()
            .map(|&(a, t, b)| (a, &self.transitions[t], b))
    }

    pub(crate) fn raw_edges(&self) -> &[(usize, usize, usize)] {
        &self.edges
    }

    /// Predecessor of a state in the breadth-first tree.
    pub fn parent(&self, state: usize) -> Option<usize> {
        self.parent[state]
    }
}

pub fn reachability_graph(s: &MarkedPetriNet, state_cap: usize) -> ReachGraph {
    let net = s.net();
    let initial = s.marking().to_dense(net);
    let mut graph = ReachGraph {
        places: net.places().to_vec(),
        transitions: net.transitions().to_vec(),
        states: vec![initial.clone()],
        edges: Vec::new(),
        parent: vec![None],
        complete: true,
    };
    let mut seen: HashMap<Vec<u64>, usize> = HashMap::from([(initial, 0)]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for t in 0..net.transitions().len() {
            if !enabled_dense(net, &graph.states[i], t) {
                continue;
            }
            let next = fire_dense(net, &graph.states[i], t);
            let j = match seen.get(&next) {
                Some(&j) => j,
                None => {
                    if graph.states.len() >= state_cap {
                        graph.complete = false;
                        continue;
                    }
                    let j = graph.states.len();
                    seen.insert(next.clone(), j);
                    graph.states.push(next);
                    graph.parent.push(Some(i));
                    queue.push_back(j);
                    j
                }
            };
            graph.edges.push((i, t, j));
        }
    }
    graph
}

/// Outcome of searching for a single firing that increases a criterion place.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IncreaseSearch {
    /// A shortest increasing firing sequence.
    Found(FiringSequence),
    /// The full state space was explored without finding one.
    Impossible,
    /// The state cap was hit first.
    Unknown,
}

/// Breadth-first search for a shortest increasing firing sequence w.r.t. `q`.
/// Places of `q` missing from the net are ignored.
pub fn find_increase(s: &MarkedPetriNet, q: &NodeSet, state_cap: usize) -> IncreaseSearch {
    let net = s.net();
    let mut mask = vec![false; net.places().len()];
    for p in q {
        if let Some(i) = net.place_index(p.as_str()) {
            mask[i] = true;
        }
    }
    let increasing: Vec<usize> = (0..net.transitions().len())
        .filter(|&t| increases_any(net, t, &mask))
        .collect();
    if increasing.is_empty() {
        return IncreaseSearch::Impossible;
    }

    let initial = s.marking().to_dense(net);
    let mut states = vec![initial.clone()];
    let mut parent: Vec<Option<(usize, usize)>> = vec![None];
    let mut seen: HashMap<Vec<u64>, usize> = HashMap::from([(initial, 0)]);
    let mut queue = VecDeque::from([0usize]);
    let mut truncated = false;
    let witness = |parent: &[Option<(usize, usize)>], mut at: usize, last: usize| {
        let mut steps = vec![last];
        while let Some((prev, t)) = parent[at] {
            steps.push(t);
            at = prev;
        }
        steps.reverse();
        FiringSequence(
            steps
                .into_iter()
                .map(|t| net.transitions()[t].clone())
                .collect(),
        )
    };
    while let Some(i) = queue.pop_front() {
        if let Some(&t) = increasing
            .iter()
            .find(|&&t| enabled_dense(net, &states[i], t))
        {
            return IncreaseSearch::Found(witness(&parent, i, t));
        }
        for t in 0..net.transitions().len() {
            if !enabled_dense(net, &states[i], t) {
                continue;
            }
            let next = fire_dense(net, &states[i], t);
            if seen.contains_key(&next) {
                continue;
            }
            if states.len() >= state_cap {
                truncated = true;
                continue;
            }
            seen.insert(next.clone(), states.len());
            states.push(next);
            parent.push(Some((i, t)));
            queue.push_back(states.len() - 1);
        }
    }
    if truncated {
        IncreaseSearch::Unknown
    } else {
        IncreaseSearch::Impossible
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{net_a, net_b, net_dead};
    use crate::model::{node_set, Arc};

    fn seq(ids: &[&str]) -> FiringSequence {
        ids.iter().copied().collect()
    }

    fn m(entries: &[(&str, u64)]) -> Marking {
        entries.iter().copied().collect()
    }

    fn source_feeding_place() -> MarkedPetriNet {
        let net = PetriNet::new("src", ["p"], ["t"], [Arc::new("t", "p")]).unwrap();
        MarkedPetriNet::unmarked(net)
    }

    fn self_loop() -> MarkedPetriNet {
        let net = PetriNet::new(
            "loop",
            ["p"],
            ["t"],
            [Arc::new("p", "t"), Arc::new("t", "p")],
        )
        .unwrap();
        MarkedPetriNet::new(net, m(&[("p", 1)])).unwrap()
    }

    #[test]
    fn enabledness() {
        assert!(is_enabled(&net_a(), "t1").unwrap());
        assert!(!is_enabled(&net_dead(), "t1").unwrap());
        assert!(is_enabled(&source_feeding_place(), "t").unwrap());
        assert_eq!(
            is_enabled(&net_a(), "p1"),
            Err(SemanticsError::UnknownTransition("p1".into()))
        );
    }

    #[test]
    fn firing() {
        assert_eq!(fire(&net_a(), "t1").unwrap(), m(&[("p1", 0), ("p2", 1)]));
        assert_eq!(fire(&self_loop(), "t").unwrap(), m(&[("p", 1)]));
        assert_eq!(
            fire(&net_b(), "t1").unwrap(),
            m(&[("p1", 0), ("p2", 0), ("p3", 1)])
        );
        assert_eq!(
            fire(&net_dead(), "t1"),
            Err(SemanticsError::NotEnabled("t1".into()))
        );
    }

    #[test]
    fn sequences() {
        assert!(fire_sequence(&net_b(), &FiringSequence::empty())
            .unwrap()
            .is_empty());
        assert_eq!(
            fire_sequence(&net_a(), &seq(&["t1"])).unwrap(),
            vec![m(&[("p2", 1)])]
        );
        assert_eq!(
            fire_sequence(&net_a(), &seq(&["t1", "t1"])),
            Err(SemanticsError::NotEnabledAt {
                index: 1,
                transition: "t1".into()
            })
        );
    }

    #[test]
    fn increasing() {
        assert!(is_increasing(&net_a(), &seq(&["t1"]), &node_set(["p2"])).unwrap());
        assert!(!is_increasing(&net_a(), &FiringSequence::empty(), &node_set(["p2"])).unwrap());
        assert!(!is_increasing(&net_b(), &seq(&["t1"]), &node_set(["p1"])).unwrap());
        assert!(matches!(
            is_increasing(&net_dead(), &seq(&["t1"]), &node_set(["p2"])),
            Err(SemanticsError::InvalidSequence(_))
        ));
    }

    #[test]
    fn enumeration() {
        let found =
            find_increasing_sequences(&net_a(), &node_set(["p2"]), 3, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(found, vec![seq(&["t1"])]);
        for len in [0, 1, 5] {
            let found =
                find_increasing_sequences(&net_dead(), &node_set(["p2"]), len, DEFAULT_NODE_BUDGET)
                    .unwrap();
            assert!(found.is_empty());
        }
        let found =
            find_increasing_sequences(&net_b(), &node_set(["p3"]), 1, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(found, vec![seq(&["t1"])]);
    }

    #[test]
    fn enumeration_budget_is_loud() {
        let err = find_increasing_sequences(&source_feeding_place(), &node_set(["p"]), 50, 10)
            .unwrap_err();
        assert_eq!(err, SemanticsError::ExplosionCap { budget: 10 });
    }

    #[test]
    fn projection() {
        let s = seq(&["t1", "t2", "t1"]);
        assert_eq!(
            project_subsequence(&s, &node_set(["t1"])),
            seq(&["t1", "t1"])
        );
        assert!(project_subsequence(&s, &NodeSet::new()).is_empty());
        assert_eq!(project_subsequence(&s, &node_set(["t1", "t2"])), s);
    }

    #[test]
    fn reachability() {
        let g = reachability_graph(&net_a(), 100);
        assert_eq!(
            (g.state_count(), g.edge_count(), g.is_complete()),
            (2, 1, true)
        );
        let g = reachability_graph(&net_dead(), 100);
        assert_eq!(
            (g.state_count(), g.edge_count(), g.is_complete()),
            (1, 0, true)
        );
        let g = reachability_graph(&source_feeding_place(), 10);
        assert!(!g.is_complete());
        assert_eq!(g.state_count(), 10);
        let net = source_feeding_place().net().clone();
        for (a, t, b) in g.edges() {
            let s = MarkedPetriNet::new(net.clone(), g.marking(a)).unwrap();
            assert_eq!(fire(&s, t.as_str()).unwrap(), g.marking(b));
        }
    }

    #[test]
    fn shortest_increase() {
        assert_eq!(
            find_increase(&net_b(), &node_set(["p3"]), 100),
            IncreaseSearch::Found(seq(&["t1"]))
        );
        assert_eq!(
            find_increase(&net_dead(), &node_set(["p2"]), 100),
            IncreaseSearch::Impossible
        );
        assert_eq!(
            find_increase(&self_loop(), &node_set(["p"]), 100),
            IncreaseSearch::Impossible
        );
    }
}
