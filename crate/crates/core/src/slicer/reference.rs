//! Comparison slicers: Rakow's CTL\*₋ₓ and safety slicing (static) and the
//! dependency-graph slicer of Yu et al. (dynamic).

use std::collections::BTreeSet;
use web_time::Instant;

use crate::model::{MarkedPetriNet, NodeId, NodeSet, PetriNet};
use crate::semantics::{find_increase, IncreaseSearch};

use super::minimal::{closed_candidates, MinimalConfig};
use super::{criterion_indices, Algorithm, SliceError, SliceNote, SliceResult};

/// `t` reads `p`: both arcs exist with equal weight, so firing `t` leaves `p` unchanged.
pub fn is_reading(net: &PetriNet, p: &str, t: &str) -> bool {
    match (net.weight(p, t), net.weight(t, p)) {
        (Some(a), Some(b)) => a == b,
        _ => false,
    }
}

/// Structural dependency graph: `x` depends on `y` iff `y ∈ •x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sdg {
    pub nodes: NodeSet,
    /// `(x, y)` pairs.
    pub deps: BTreeSet<(NodeId, NodeId)>,
}

impl Sdg {
    pub fn build(net: &PetriNet) -> Sdg {
        let deps = net
            .arcs()
            .map(|(src, dst, _)| (dst.clone(), src.clone()))
            .collect();
        Sdg {
            nodes: net.nodes(),
            deps,
        }
    }

    /// Everything `from` depends on, transitively, including `from`.
    pub fn backward_reachable(&self, from: &NodeSet) -> NodeSet {
        let mut seen: NodeSet = from.clone();
        let mut stack: Vec<NodeId> = from.iter().cloned().collect();
        while let Some(x) = stack.pop() {
            let lo = (x.clone(), NodeId::new(""));
            for (_, y) in self.deps.range(lo..).take_while(|(a, _)| *a == x) {
                if seen.insert(y.clone()) {
                    stack.push(y.clone());
                }
            }
        }
        seen
    }
}

fn static_result(
    algorithm: Algorithm,
    net: &PetriNet,
    q: &NodeSet,
    nodes: &NodeSet,
    start: Instant,
) -> Result<SliceResult, SliceError> {
    let s = MarkedPetriNet::unmarked(net.clone());
    SliceResult::build(algorithm, &s, q, nodes, start.elapsed())
}

// Adds t and its preset; returns the places that are new.
fn take_transition(
    net: &PetriNet,
    t: usize,
    in_t: &mut [bool],
    in_p: &mut [bool],
    work: &mut Vec<usize>,
) {
    if in_t[t] {
        return;
    }
    in_t[t] = true;
    for &(p, _) in net.trans_pre(t) {
        if !in_p[p] {
            in_p[p] = true;
            work.push(p);
        }
    }
}

fn collect(net: &PetriNet, in_p: &[bool], in_t: &[bool]) -> NodeSet {
    let places = net.places().iter().zip(in_p).filter(|(_, &b)| b);
    let trans = net.transitions().iter().zip(in_t).filter(|(_, &b)| b);
    places.chain(trans).map(|(id, _)| id.clone()).collect()
}

// Transitions connected to p in either direction that change its marking.
fn non_reading(net: &PetriNet, p: usize) -> Vec<usize> {
    let mut out: Vec<usize> = net
        .place_pre(p)
        .iter()
        .chain(net.place_post(p))
        .map(|&(t, _)| t)
        .filter(|&t| net.input_weight(p, t) != net.output_weight(t, p))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Closure of `q` under "add every non-reading transition of a place, with
/// its input places". The marking is ignored.
pub fn slice_rakow_ctl(net: &PetriNet, q: &NodeSet) -> Result<SliceResult, SliceError> {
    let start = Instant::now();
    let qi = criterion_indices(&MarkedPetriNet::unmarked(net.clone()), q)?;
    let mut in_p = vec![false; net.places().len()];
    let mut in_t = vec![false; net.transitions().len()];
    let mut work = qi.clone();
    for &p in &qi {
        in_p[p] = true;
    }
    while let Some(p) = work.pop() {
        for t in non_reading(net, p) {
            take_transition(net, t, &mut in_t, &mut in_p, &mut work);
        }
    }
    static_result(
        Algorithm::RakowCtl,
        net,
        q,
        &collect(net, &in_p, &in_t),
        start,
    )
}

/// Starts from the non-reading transitions of `q` and adds only transitions
/// that can put tokens on places already in the slice. The marking is ignored.
pub fn slice_rakow_safety(net: &PetriNet, q: &NodeSet) -> Result<SliceResult, SliceError> {
    let start = Instant::now();
    let qi = criterion_indices(&MarkedPetriNet::unmarked(net.clone()), q)?;
    let mut in_p = vec![false; net.places().len()];
    let mut in_t = vec![false; net.transitions().len()];
    let mut work = qi.clone();
    for &p in &qi {
        in_p[p] = true;
    }
    let mut seed = Vec::new();
    for &p in &qi {
        for t in non_reading(net, p) {
            take_transition(net, t, &mut in_t, &mut in_p, &mut seed);
        }
    }
    work.extend(seed);
    while let Some(p) = work.pop() {
        let producers: Vec<usize> = net
            .place_pre(p)
            .iter()
            .filter(|&&(t, w)| w > net.input_weight(p, t))
            .map(|&(t, _)| t)
            .collect();
        for t in producers {
            take_transition(net, t, &mut in_t, &mut in_p, &mut work);
        }
    }
    static_result(
        Algorithm::RakowSafety,
        net,
        q,
        &collect(net, &in_p, &in_t),
        start,
    )
}

/// One forward-closed path from `M0` that can increase some criterion place.
///
/// Paths are taken from the part of the dependency graph that `q` depends on,
/// one criterion place at a time. The smallest path that shows an increase
/// wins, ties broken by id. If none does, the smallest path that still holds
/// a criterion place is returned, and otherwise the slice is empty.
pub fn slice_yu(s: &MarkedPetriNet, q: &NodeSet) -> Result<SliceResult, SliceError> {
    let start = Instant::now();
    criterion_indices(s, q)?;
    let config = MinimalConfig::default();
    let reach = Sdg::build(s.net()).backward_reachable(q);
    let local = s.restrict_to(&reach)?;
    let qi = criterion_indices(&local, q)?;
    let candidates = closed_candidates(&local, &qi, config.budget)?;

    let increasing = candidates.iter().find(|c| {
        let sub = local.restrict_to(c).expect("candidate inside the net");
        matches!(
            find_increase(&sub, q, config.state_cap),
            IncreaseSearch::Found(_)
        )
    });
    let fallback = || candidates.iter().find(|c| c.iter().any(|n| q.contains(n)));
    let (nodes, note) = match increasing.or_else(fallback) {
        Some(c) => (c.clone(), None),
        None => (NodeSet::new(), Some(SliceNote::NoContributingCandidate)),
    };
    let mut result = SliceResult::build(Algorithm::Yu, s, q, &nodes, start.elapsed())?;
    result.notes.extend(note);
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{net_a, net_b, net_dead};
    use crate::model::{node_set, Arc, Marking};

    #[test]
    fn reading_examples() {
        let net = PetriNet::new(
            "r",
            ["p", "q"],
            ["t", "u", "v"],
            [
                Arc::new("p", "t"),
                Arc::new("t", "p"),
                Arc::new("p", "u"),
                Arc::weighted("q", "v", 2),
                Arc::new("v", "q"),
            ],
        )
        .unwrap();
        assert!(is_reading(&net, "p", "t"));
        assert!(!is_reading(&net, "p", "u"));
        assert!(!is_reading(&net, "q", "v"));
    }

    #[test]
    fn ctl_examples() {
        let net = net_b().net().clone();
        let r = slice_rakow_ctl(&net, &node_set(["p3"])).unwrap();
        assert_eq!(r.nodes(), net.nodes());
        assert!(slice_rakow_ctl(&net, &NodeSet::new())
            .unwrap()
            .nodes()
            .is_empty());

        let reader = PetriNet::new(
            "reader",
            ["q", "x"],
            ["t"],
            [Arc::new("q", "t"), Arc::new("t", "q"), Arc::new("x", "t")],
        )
        .unwrap();
        let r = slice_rakow_ctl(&reader, &node_set(["q"])).unwrap();
        assert_eq!(r.nodes(), node_set(["q"]));
    }

    #[test]
    fn safety_examples() {
        let net = net_b().net().clone();
        let r = slice_rakow_safety(&net, &node_set(["p3"])).unwrap();
        assert_eq!(r.nodes(), net.nodes());
        assert!(slice_rakow_safety(&net, &NodeSet::new())
            .unwrap()
            .nodes()
            .is_empty());

        let chain = PetriNet::new(
            "c",
            ["p1", "p2", "p3"],
            ["t1", "t2"],
            [
                Arc::new("p1", "t1"),
                Arc::new("t1", "p2"),
                Arc::new("p2", "t2"),
                Arc::new("t2", "p3"),
            ],
        )
        .unwrap();
        let r = slice_rakow_safety(&chain, &node_set(["p3"])).unwrap();
        assert_eq!(r.nodes(), chain.nodes());
    }

    #[test]
    fn safety_skips_pure_consumers_ctl_keeps_them() {
        // t3 only drains p1, so it never raises a token count in the slice.
        let net = PetriNet::new(
            "d",
            ["p1", "q"],
            ["t1", "t3"],
            [
                Arc::new("p1", "t1"),
                Arc::new("t1", "q"),
                Arc::new("p1", "t3"),
            ],
        )
        .unwrap();
        let ctl = slice_rakow_ctl(&net, &node_set(["q"])).unwrap().nodes();
        let safety = slice_rakow_safety(&net, &node_set(["q"])).unwrap().nodes();
        assert_eq!(ctl, node_set(["p1", "t1", "t3", "q"]));
        assert_eq!(safety, node_set(["p1", "t1", "q"]));
    }

    #[test]
    fn yu_examples() {
        let r = slice_yu(&net_b(), &node_set(["p3"])).unwrap();
        assert_eq!(r.nodes(), node_set(["p1", "t1", "p3"]));

        let r = slice_yu(&net_dead(), &node_set(["p2"])).unwrap();
        assert!(r.nodes().is_empty());
        assert_eq!(r.notes, vec![SliceNote::NoContributingCandidate]);

        let r = slice_yu(&net_a(), &node_set(["p1"])).unwrap();
        assert_eq!(r.nodes(), node_set(["p1"]));

        let r = slice_yu(&net_b(), &NodeSet::new()).unwrap();
        assert!(r.nodes().is_empty());
    }

    #[test]
    fn sdg_follows_presets() {
        let g = Sdg::build(net_b().net());
        assert!(g.deps.contains(&("t1".into(), "p1".into())));
        assert!(g.deps.contains(&("p3".into(), "t2".into())));
        assert_eq!(
            g.backward_reachable(&node_set(["t1"])),
            node_set(["p1", "t1"])
        );
        assert_eq!(
            g.backward_reachable(&node_set(["p3"])),
            net_b().net().nodes()
        );
    }

    #[test]
    fn rakow_ignores_the_marking() {
        let net = net_b().net().clone();
        let a = slice_rakow_ctl(&net, &node_set(["p3"]))
            .unwrap()
            .with_marking(&net_b());
        let m: Marking = [("p2", 3)].into_iter().collect();
        let other = MarkedPetriNet::new(net.clone(), m).unwrap();
        let b = slice_rakow_ctl(&net, &node_set(["p3"]))
            .unwrap()
            .with_marking(&other);
        assert_eq!(a.nodes(), b.nodes());
    }
}
