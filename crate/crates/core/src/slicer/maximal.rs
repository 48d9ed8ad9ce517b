//! Maximal contributing slices.

use std::collections::BTreeSet;
use web_time::Instant;

use crate::model::{MarkedPetriNet, Marking, NodeSet, PetriNet};

use super::{criterion_indices, Algorithm, SliceError, SliceResult};

/// `(P_b, T_b)`; every transition's preset lies in `p_b`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BackwardSlice {
    pub p_b: NodeSet,
    pub t_b: NodeSet,
}

/// Dense backward closure. Returns place and transition masks and the
/// number of transitions added.
pub(crate) fn backward_dense(net: &PetriNet, q: &[usize]) -> (Vec<bool>, Vec<bool>, usize) {
    let mut places = vec![false; net.places().len()];
    let mut transitions = vec![false; net.transitions().len()];
    let mut added = 0;
    // Smallest id first; place order is id order.
    let mut work: BTreeSet<usize> = q.iter().copied().collect();
    for &p in q {
        places[p] = true;
    }
    while let Some(p) = work.pop_first() {
        for &(t, _) in net.place_pre(p) {
            if transitions[t] {
                continue;
            }
            transitions[t] = true;
            added += 1;
            for &(i, _) in net.trans_pre(t) {
                if !places[i] {
                    places[i] = true;
                    work.insert(i);
                }
            }
        }
    }
    (places, transitions, added)
}

/// Dense forward closure inside the node set given by the masks, which must be
/// input-closed. Returns place and transition masks and the number of
/// transitions added.
pub(crate) fn forward_dense(
    net: &PetriNet,
    in_p: &[bool],
    in_t: &[bool],
    m0: &[u64],
) -> (Vec<bool>, Vec<bool>, usize) {
    let mut w: Vec<bool> = (0..in_p.len()).map(|p| in_p[p] && m0[p] > 0).collect();
    let mut r = vec![false; in_t.len()];
    let mut added = 0;

    // missing[t]: preset places of t not yet in W; u32::MAX marks "not in T_b".
    let mut missing: Vec<u32> = (0..in_t.len())
        .map(|t| {
            if !in_t[t] {
                return u32::MAX;
            }
            net.trans_pre(t).iter().filter(|&&(p, _)| !w[p]).count() as u32
        })
        .collect();

    // V0: enabled at m0. Ready-but-not-enabled transitions wait for round 1.
    let mut current: Vec<usize> = Vec::new();
    let mut pending: Vec<usize> = Vec::new();
    for t in 0..in_t.len() {
        if missing[t] != 0 {
            continue;
        }
        if net
            .trans_pre(t)
            .iter()
            .all(|&(p, wt)| m0[p] >= u64::from(wt))
        {
            current.push(t);
        } else {
            pending.push(t);
        }
        missing[t] = u32::MAX;
    }

    while !current.is_empty() {
        let mut next = std::mem::take(&mut pending);
        for &t in &current {
            r[t] = true;
            added += 1;
        }
        for &t in &current {
            for &(p, _) in net.trans_post(t) {
                if !in_p[p] || w[p] {
                    continue;
                }
                w[p] = true;
                for &(u, _) in net.place_post(p) {
                    if missing[u] == u32::MAX {
                        continue;
                    }
                    missing[u] -= 1;
                    if missing[u] == 0 {
                        missing[u] = u32::MAX;
                        next.push(u);
                    }
                }
            }
        }
        next.sort_unstable();
        current = next;
    }
    (w, r, added)
}

fn ids(net: &PetriNet, places: &[bool], transitions: &[bool]) -> (NodeSet, NodeSet) {
    let p = net
        .places()
        .iter()
        .zip(places)
        .filter(|(_, &b)| b)
        .map(|(id, _)| id.clone())
        .collect();
    let t = net
        .transitions()
        .iter()
        .zip(transitions)
        .filter(|(_, &b)| b)
        .map(|(id, _)| id.clone())
        .collect();
    (p, t)
}

fn masks(net: &PetriNet, b: &BackwardSlice) -> (Vec<bool>, Vec<bool>) {
    let mut p = vec![false; net.places().len()];
    let mut t = vec![false; net.transitions().len()];
    for id in &b.p_b {
        if let Some(i) = net.place_index(id.as_str()) {
            p[i] = true;
        }
    }
    for id in &b.t_b {
        if let Some(i) = net.transition_index(id.as_str()) {
            t[i] = true;
        }
    }
    (p, t)
}

/// Least set containing `q` closed under "add the producers of a place" and
/// "add the inputs of a transition".
pub fn backward_slice(net: &PetriNet, q: &NodeSet) -> Result<BackwardSlice, SliceError> {
    let qi = criterion_indices(&MarkedPetriNet::unmarked(net.clone()), q)?;
    let (p, t, _) = backward_dense(net, &qi);
    let (p_b, t_b) = ids(net, &p, &t);
    Ok(BackwardSlice { p_b, t_b })
}

/// Forward closure of `b` from the places it marks at `m0`.
pub fn forward_slice(b: &BackwardSlice, net: &PetriNet, m0: &Marking) -> (NodeSet, NodeSet) {
    let (bp, bt) = masks(net, b);
    let (p, t, _) = forward_dense(net, &bp, &bt, &m0.to_dense(net));
    ids(net, &p, &t)
}

/// Backward then forward closure. The result records how many transitions
/// were processed in total, which never exceeds `2·|T|`.
pub fn slice_maximal(s: &MarkedPetriNet, q: &NodeSet) -> Result<SliceResult, SliceError> {
    let start = Instant::now();
    let net = s.net();
    let qi = criterion_indices(s, q)?;
    let (bp, bt, back_visits) = backward_dense(net, &qi);
    let (fp, ft, fwd_visits) = forward_dense(net, &bp, &bt, &s.marking().to_dense(net));
    let visits = back_visits + fwd_visits;
    assert!(
        visits <= 2 * net.transitions().len(),
        "maximal slicer processed {visits} transitions of {}",
        net.transitions().len()
    );
    let (p, t) = ids(net, &fp, &ft);
    let nodes: NodeSet = p.into_iter().chain(t).collect();
    let mut result = SliceResult::build(Algorithm::Maximal, s, q, &nodes, start.elapsed())?;
    result.transition_visits = Some(visits);
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{chain, net_a, net_b, net_dead};
    use crate::model::{node_set, Arc};

    #[test]
    fn backward_examples() {
        let b = backward_slice(net_b().net(), &node_set(["p3"])).unwrap();
        assert_eq!(b.p_b, node_set(["p1", "p2", "p3"]));
        assert_eq!(b.t_b, node_set(["t1", "t2"]));

        let b = backward_slice(net_b().net(), &NodeSet::new()).unwrap();
        assert_eq!(b, BackwardSlice::default());

        let b = backward_slice(net_a().net(), &node_set(["p1"])).unwrap();
        assert_eq!(b.p_b, node_set(["p1"]));
        assert!(b.t_b.is_empty());

        assert_eq!(
            backward_slice(net_a().net(), &node_set(["t1"])),
            Err(SliceError::UnknownPlace("t1".into()))
        );
    }

    #[test]
    fn forward_examples() {
        let s = net_b();
        let b = backward_slice(s.net(), &node_set(["p3"])).unwrap();
        let (p, t) = forward_slice(&b, s.net(), s.marking());
        assert_eq!(p, node_set(["p1", "p3"]));
        assert_eq!(t, node_set(["t1"]));

        let d = net_dead();
        let b = backward_slice(d.net(), &node_set(["p2"])).unwrap();
        let (p, t) = forward_slice(&b, d.net(), d.marking());
        assert!(p.is_empty() && t.is_empty());

        let (p, t) = forward_slice(&BackwardSlice::default(), s.net(), s.marking());
        assert!(p.is_empty() && t.is_empty());
    }

    #[test]
    fn maximal_examples() {
        let r = slice_maximal(&net_b(), &node_set(["p3"])).unwrap();
        assert_eq!(r.nodes(), node_set(["p1", "t1", "p3"]));
        assert_eq!(r.subnet.net().arc_count(), 2);
        assert_eq!(r.subnet.marking().get("p1"), 1);

        let r = slice_maximal(&net_a(), &node_set(["p2"])).unwrap();
        assert_eq!(r.subnet.net(), net_a().net());

        let r = slice_maximal(&net_dead(), &node_set(["p2"])).unwrap();
        assert!(r.subnet.net().is_empty());
    }

    #[test]
    fn source_transitions_seed_the_forward_pass() {
        let net = PetriNet::new(
            "src",
            ["p", "q"],
            ["gen", "t"],
            [Arc::new("gen", "p"), Arc::new("p", "t"), Arc::new("t", "q")],
        )
        .unwrap();
        let s = MarkedPetriNet::unmarked(net);
        let r = slice_maximal(&s, &node_set(["q"])).unwrap();
        assert_eq!(r.nodes(), node_set(["gen", "p", "t", "q"]));
    }

    #[test]
    fn insufficiently_marked_inputs_join_after_the_first_round() {
        // t needs two tokens from p but p holds one; gen refills p.
        let net = PetriNet::new(
            "w",
            ["p", "q", "r"],
            ["gen", "t"],
            [
                Arc::new("r", "gen"),
                Arc::new("gen", "p"),
                Arc::weighted("p", "t", 2),
                Arc::new("t", "q"),
            ],
        )
        .unwrap();
        let s = MarkedPetriNet::new(net, [("p", 1), ("r", 1)].into_iter().collect()).unwrap();
        let r = slice_maximal(&s, &node_set(["q"])).unwrap();
        assert_eq!(r.nodes(), node_set(["gen", "p", "q", "r", "t"]));
    }

    #[test]
    fn long_chain_is_linear() {
        let s = chain(5000);
        let last = s.net().places().last().unwrap().clone();
        let start = Instant::now();
        let r = slice_maximal(&s, &NodeSet::from([last])).unwrap();
        assert!(start.elapsed().as_secs_f64() < 1.0);
        assert_eq!(r.size(), s.net().size());
        assert_eq!(r.transition_visits, Some(2 * 5000));
    }
}
