//! Minimal contributing slices.
//!
//! The backward phase branches on every producer of an unmarked place, so each
//! candidate follows one contributing path per place. Candidates that cannot
//! hold a token are filtered out, the rest are closed forward from `M0`, and
//! the smallest closure that still increases the criterion is returned.

use std::collections::{BTreeSet, HashSet};
use web_time::Instant;

use fixedbitset::FixedBitSet;

use crate::model::{MarkedPetriNet, NodeId, NodeSet, PetriNet};
use crate::semantics::{find_increase, IncreaseSearch};

use super::maximal::{backward_dense, forward_dense};
use super::{criterion_indices, Algorithm, SliceError, SliceNote, SliceResult};

/// Limits on the branching backward search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BranchBudget {
    pub max_candidates: usize,
    pub max_expansions: usize,
}

impl Default for BranchBudget {
    fn default() -> Self {
        BranchBudget {
            max_candidates: 100_000,
            max_expansions: 1_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MinimalConfig {
    pub budget: BranchBudget,
    /// States explored when checking that a candidate increases the criterion.
    pub state_cap: usize,
}

impl Default for MinimalConfig {
    fn default() -> Self {
        MinimalConfig {
            budget: BranchBudget::default(),
            state_cap: 10_000,
        }
    }
}

/// A candidate slice as a mixed node set. Transitions always come with their
/// whole preset.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CandidateSlice {
    pub nodes: NodeSet,
}

// Bit layout of node sets: places first, then transitions.
struct Layout {
    np: usize,
    nt: usize,
}

impl Layout {
    fn of(net: &PetriNet) -> Layout {
        Layout {
            np: net.places().len(),
            nt: net.transitions().len(),
        }
    }

    fn nodes(&self) -> FixedBitSet {
        FixedBitSet::with_capacity(self.np + self.nt)
    }

    fn to_ids(&self, net: &PetriNet, bits: &FixedBitSet) -> NodeSet {
        bits.ones()
            .map(|i| {
                if i < self.np {
                    net.places()[i].clone()
                } else {
                    net.transitions()[i - self.np].clone()
                }
            })
            .collect()
    }

    fn bits_of(&self, net: &PetriNet, ids: &NodeSet) -> FixedBitSet {
        let mut bits = self.nodes();
        for id in ids {
            if let Some(p) = net.place_index(id.as_str()) {
                bits.insert(p);
            } else if let Some(t) = net.transition_index(id.as_str()) {
                bits.insert(self.np + t);
            }
        }
        bits
    }

    fn split(&self, bits: &FixedBitSet) -> (Vec<bool>, Vec<bool>) {
        let mut p = vec![false; self.np];
        let mut t = vec![false; self.nt];
        for i in bits.ones() {
            if i < self.np {
                p[i] = true;
            } else {
                t[i - self.np] = true;
            }
        }
        (p, t)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct State {
    work: FixedBitSet,
    done: FixedBitSet,
    nodes: FixedBitSet,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum CriterionRule {
    /// Every place follows the three branches.
    AsWritten,
    /// Criterion places are expanded through the transitions that increase
    /// them, even when marked, and stop only when there are none.
    RequireIncrease,
}

fn branch_search(
    net: &PetriNet,
    m0: &[u64],
    q: &[usize],
    rule: CriterionRule,
    budget: BranchBudget,
    results: &mut BTreeSet<FixedBitSet>,
) -> Result<(), SliceError> {
    let layout = Layout::of(net);
    let mut criterion = FixedBitSet::with_capacity(layout.np);
    let mut initial = State {
        work: FixedBitSet::with_capacity(layout.np),
        done: FixedBitSet::with_capacity(layout.np),
        nodes: layout.nodes(),
    };
    for &p in q {
        initial.work.insert(p);
        criterion.insert(p);
    }
    let mut seen: HashSet<State> = HashSet::new();
    let mut stack = vec![initial];
    let mut expansions = 0usize;
    let exceeded = |expansions, results: &BTreeSet<FixedBitSet>| SliceError::BranchBudgetExceeded {
        expansions,
        candidates: results.len(),
    };

    while let Some(st) = stack.pop() {
        expansions += 1;
        if expansions > budget.max_expansions {
            return Err(exceeded(expansions, results));
        }
        let Some(p) = st.work.ones().next() else {
            results.insert(st.nodes);
            if results.len() > budget.max_candidates {
                return Err(exceeded(expansions, results));
            }
            continue;
        };
        let mut done = st.done.clone();
        done.insert(p);
        let mut nodes = st.nodes.clone();
        nodes.insert(p);

        let producers: Vec<usize> = if rule == CriterionRule::RequireIncrease && criterion[p] {
            net.place_pre(p)
                .iter()
                .filter(|&&(t, w)| w > net.input_weight(p, t))
                .map(|&(t, _)| t)
                .collect()
        } else if m0[p] > 0 || net.place_pre(p).is_empty() {
            Vec::new()
        } else {
            net.place_pre(p).iter().map(|&(t, _)| t).collect()
        };

        let mut push = |work: FixedBitSet, nodes: FixedBitSet| {
            let next = State {
                work,
                done: done.clone(),
                nodes,
            };
            if seen.insert(next.clone()) {
                stack.push(next);
            }
        };
        if producers.is_empty() {
            let mut work = st.work.clone();
            work.difference_with(&done);
            push(work, nodes);
        } else {
            for &t in producers.iter().rev() {
                let mut work = st.work.clone();
                for &(i, _) in net.trans_pre(t) {
                    work.insert(i);
                }
                work.difference_with(&done);
                let mut with_t = nodes.clone();
                with_t.insert(layout.np + t);
                push(work, with_t);
            }
        }
    }
    Ok(())
}

/// All candidate slices produced by the branching backward search from `q`,
/// following the three branches as written.
pub fn backward_slices_all(
    s: &MarkedPetriNet,
    q: &NodeSet,
    budget: BranchBudget,
) -> Result<BTreeSet<CandidateSlice>, SliceError> {
    let net = s.net();
    let qi = criterion_indices(s, q)?;
    let mut found = BTreeSet::new();
    branch_search(
        net,
        &s.marking().to_dense(net),
        &qi,
        CriterionRule::AsWritten,
        budget,
        &mut found,
    )?;
    let layout = Layout::of(net);
    Ok(found
        .iter()
        .map(|bits| CandidateSlice {
            nodes: layout.to_ids(net, bits),
        })
        .collect())
}

fn admissible(net: &PetriNet, m0: &[u64], layout: &Layout, bits: &FixedBitSet) -> bool {
    let mut has_source = false;
    for i in bits.ones() {
        if i < layout.np {
            let dead = m0[i] == 0 && net.place_pre(i).is_empty();
            if dead {
                return false;
            }
            has_source |= m0[i] > 0;
        } else {
            has_source |= net.trans_pre(i - layout.np).is_empty();
        }
    }
    has_source
}

/// Keeps candidates that hold a token or a source transition and contain no
/// unmarked place without producers.
pub fn filter_slices(
    s: &MarkedPetriNet,
    cands: &BTreeSet<CandidateSlice>,
) -> BTreeSet<CandidateSlice> {
    let net = s.net();
    let layout = Layout::of(net);
    let m0 = s.marking().to_dense(net);
    cands
        .iter()
        .filter(|c| admissible(net, &m0, &layout, &layout.bits_of(net, &c.nodes)))
        .cloned()
        .collect()
}

fn close_bits(net: &PetriNet, m0: &[u64], layout: &Layout, bits: &FixedBitSet) -> FixedBitSet {
    let (p, t) = layout.split(bits);
    let (fp, ft, _) = forward_dense(net, &p, &t, m0);
    let mut out = layout.nodes();
    for (i, _) in fp.iter().enumerate().filter(|(_, &b)| b) {
        out.insert(i);
    }
    for (i, _) in ft.iter().enumerate().filter(|(_, &b)| b) {
        out.insert(layout.np + i);
    }
    out
}

/// Forward closure of a candidate from its places marked at `M0`.
pub fn forward_close(s: &MarkedPetriNet, cand: &CandidateSlice) -> NodeSet {
    let net = s.net();
    let layout = Layout::of(net);
    let m0 = s.marking().to_dense(net);
    let bits = close_bits(net, &m0, &layout, &layout.bits_of(net, &cand.nodes));
    layout.to_ids(net, &bits)
}

/// Forward-closed candidates for each single criterion place, smallest first,
/// ties broken by the sorted id list.
pub(crate) fn closed_candidates(
    s: &MarkedPetriNet,
    qi: &[usize],
    budget: BranchBudget,
) -> Result<Vec<NodeSet>, SliceError> {
    let net = s.net();
    let layout = Layout::of(net);
    let m0 = s.marking().to_dense(net);
    let mut found = BTreeSet::new();
    for &q in qi {
        branch_search(
            net,
            &m0,
            &[q],
            CriterionRule::RequireIncrease,
            budget,
            &mut found,
        )?;
    }
    let closed: BTreeSet<FixedBitSet> = found
        .iter()
        .filter(|bits| admissible(net, &m0, &layout, bits))
        .map(|bits| close_bits(net, &m0, &layout, bits))
        .collect();
    let mut out: Vec<(usize, Vec<NodeId>, NodeSet)> = closed
        .iter()
        .map(|bits| {
            let ids = layout.to_ids(net, bits);
            (ids.len(), ids.iter().cloned().collect(), ids)
        })
        .collect();
    out.sort();
    Ok(out.into_iter().map(|(_, _, ids)| ids).collect())
}

/// The smallest forward-closed contributing candidate, with default limits.
pub fn slice_minimal(s: &MarkedPetriNet, q: &NodeSet) -> Result<SliceResult, SliceError> {
    slice_minimal_with(s, q, MinimalConfig::default())
}

pub fn slice_minimal_with(
    s: &MarkedPetriNet,
    q: &NodeSet,
    config: MinimalConfig,
) -> Result<SliceResult, SliceError> {
    let start = Instant::now();
    let net = s.net();
    let qi = criterion_indices(s, q)?;
    let candidates = closed_candidates(s, &qi, config.budget)?;

    let mut notes = Vec::new();
    if !net.is_ordinary() {
        notes.push(SliceNote::MinimalityNotGuaranteed);
    }

    let shows_increase = |nodes: &NodeSet| -> IncreaseSearch {
        let sub = s
            .restrict_to(nodes)
            .expect("candidate nodes belong to the net");
        find_increase(&sub, q, config.state_cap)
    };

    let chosen = candidates
        .iter()
        .find(|c| matches!(shows_increase(c), IncreaseSearch::Found(_)))
        .cloned();
    let nodes = match chosen {
        Some(c) => c,
        None => {
            let (bp, bt, _) = backward_dense(net, &qi);
            let (fp, ft, _) = forward_dense(net, &bp, &bt, &s.marking().to_dense(net));
            let layout = Layout::of(net);
            let mut bits = layout.nodes();
            fp.iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .for_each(|(i, _)| bits.insert(i));
            ft.iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .for_each(|(i, _)| bits.insert(layout.np + i));
            let maximal = layout.to_ids(net, &bits);
            match shows_increase(&maximal) {
                IncreaseSearch::Found(_) | IncreaseSearch::Unknown => {
                    notes.push(SliceNote::FellBackToMaximal);
                    maximal
                }
                IncreaseSearch::Impossible => match candidates.first() {
                    Some(c) => c.clone(),
                    None => {
                        notes.push(SliceNote::NoContributingCandidate);
                        NodeSet::new()
                    }
                },
            }
        }
    };
    let mut result = SliceResult::build(Algorithm::Minimal, s, q, &nodes, start.elapsed())?;
    result.notes = notes;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{net_a, net_b, net_dead, ring};
    use crate::model::{node_set, Arc, Marking};

    fn cand<const N: usize>(ids: [&str; N]) -> CandidateSlice {
        CandidateSlice {
            nodes: node_set(ids),
        }
    }

    #[test]
    fn backward_examples() {
        let c = backward_slices_all(&net_b(), &node_set(["p3"]), BranchBudget::default()).unwrap();
        assert_eq!(
            c,
            BTreeSet::from([cand(["p3", "t1", "p1"]), cand(["p3", "t2", "p2"])])
        );
        let c = backward_slices_all(&net_b(), &NodeSet::new(), BranchBudget::default()).unwrap();
        assert_eq!(c, BTreeSet::from([cand([])]));
        let c = backward_slices_all(&net_a(), &node_set(["p1"]), BranchBudget::default()).unwrap();
        assert_eq!(c, BTreeSet::from([cand(["p1"])]));
    }

    #[test]
    fn filter_examples() {
        let s = net_b();
        let all = BTreeSet::from([cand(["p3", "t1", "p1"]), cand(["p3", "t2", "p2"])]);
        assert_eq!(
            filter_slices(&s, &all),
            BTreeSet::from([cand(["p3", "t1", "p1"])])
        );
        assert!(filter_slices(&s, &BTreeSet::from([cand([])])).is_empty());

        let net = PetriNet::new("g", ["p"], ["gen"], [Arc::new("gen", "p")]).unwrap();
        let g = MarkedPetriNet::unmarked(net);
        let c = BTreeSet::from([cand(["gen", "p"])]);
        assert_eq!(filter_slices(&g, &c), c);
    }

    #[test]
    fn forward_examples() {
        let s = net_b();
        assert_eq!(
            forward_close(&s, &cand(["p3", "t1", "p1"])),
            node_set(["p1", "t1", "p3"])
        );
        assert!(forward_close(&s, &cand([])).is_empty());
        assert!(forward_close(&s, &cand(["p2", "t2", "p3"])).is_empty());
    }

    #[test]
    fn minimal_examples() {
        let r = slice_minimal(&net_b(), &node_set(["p3"])).unwrap();
        assert_eq!(r.nodes(), node_set(["p1", "t1", "p3"]));
        assert!(r.notes.is_empty());

        let r = slice_minimal(&net_dead(), &node_set(["p2"])).unwrap();
        assert!(r.subnet.net().is_empty());
        assert_eq!(r.notes, vec![SliceNote::NoContributingCandidate]);

        let r = slice_minimal(&net_a(), &node_set(["p1"])).unwrap();
        assert_eq!(r.nodes(), node_set(["p1"]));

        let r = slice_minimal(&ring(), &node_set(["p2"])).unwrap();
        assert_eq!(r.nodes(), node_set(["p1", "t1", "p2"]));

        assert!(matches!(
            slice_minimal(&net_b(), &node_set(["nope"])),
            Err(SliceError::UnknownPlace(_))
        ));
    }

    #[test]
    fn marked_criterion_place_keeps_its_producer() {
        // p1(1) → t1 → q(1): {q} alone would lose the increase by t1.
        let net = PetriNet::new(
            "m",
            ["p1", "q"],
            ["t1"],
            [Arc::new("p1", "t1"), Arc::new("t1", "q")],
        )
        .unwrap();
        let m: Marking = [("p1", 1), ("q", 1)].into_iter().collect();
        let s = MarkedPetriNet::new(net, m).unwrap();
        let r = slice_minimal(&s, &node_set(["q"])).unwrap();
        assert_eq!(r.nodes(), node_set(["p1", "t1", "q"]));
    }

    #[test]
    fn weighted_nets_are_flagged() {
        let net = PetriNet::new(
            "w",
            ["p", "q"],
            ["t"],
            [Arc::weighted("p", "t", 2), Arc::new("t", "q")],
        )
        .unwrap();
        let s = MarkedPetriNet::new(net, [("p", 2)].into_iter().collect()).unwrap();
        let r = slice_minimal(&s, &node_set(["q"])).unwrap();
        assert_eq!(r.nodes(), node_set(["p", "t", "q"]));
        assert!(r.notes.contains(&SliceNote::MinimalityNotGuaranteed));
    }

    #[test]
    fn budget_is_enforced() {
        let tiny = BranchBudget {
            max_candidates: 1,
            max_expansions: 1_000,
        };
        assert!(matches!(
            backward_slices_all(&net_b(), &node_set(["p3"]), tiny),
            Err(SliceError::BranchBudgetExceeded { .. })
        ));
    }
}
