//! Brute-force checkers for slice validity, maximality and minimality.
//!
//! Everything here is written against the public net API only, with its own
//! marking type and firing rule, so a bug in the slicers or in
//! [`crate::semantics`] cannot hide itself.
//!
//! A transition of a candidate subnet may fire only when the candidate keeps
//! its whole original preset and those places hold enough tokens. Output
//! arcs to places outside the candidate are dropped.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use thiserror::Error;

use crate::model::{MarkedPetriNet, NodeId, NodeSet, PetriNet};

/// Sequence length used by the test suites.
pub const DEFAULT_DEPTH: usize = 6;
/// Largest `|P| + |T|` accepted by [`brute_force_min_slice`].
pub const BRUTE_FORCE_CEILING: usize = 12;
/// Search nodes visited while enumerating firing sequences.
pub const SEQUENCE_BUDGET: usize = 500_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("sequence enumeration exceeded {budget} steps")]
    ExplosionCap { budget: usize },
    #[error("net has {size} nodes, above the brute-force ceiling of {ceiling}")]
    TooLarge { size: usize, ceiling: usize },
}

type Tokens = BTreeMap<String, u64>;

struct Flow {
    pre: BTreeMap<String, Vec<(String, u64)>>,
    post: BTreeMap<String, Vec<(String, u64)>>,
    transitions: Vec<String>,
}

impl Flow {
    fn of(net: &PetriNet) -> Flow {
        let mut pre: BTreeMap<String, Vec<(String, u64)>> = BTreeMap::new();
        let mut post: BTreeMap<String, Vec<(String, u64)>> = BTreeMap::new();
        let transitions: Vec<String> = net
            .transitions()
            .iter()
            .map(|t| t.as_str().to_owned())
            .collect();
        for t in &transitions {
            pre.insert(t.clone(), Vec::new());
            post.insert(t.clone(), Vec::new());
        }
        for (a, b, w) in net.arcs() {
            let (a, b, w) = (a.as_str().to_owned(), b.as_str().to_owned(), u64::from(w));
            if let Some(list) = pre.get_mut(&b) {
                list.push((a, w));
            } else if let Some(list) = post.get_mut(&a) {
                list.push((b, w));
            }
        }
        Flow {
            pre,
            post,
            transitions,
        }
    }

    /// Fires `t` inside the place set `keep`; `None` if it cannot fire there.
    fn step(&self, m: &Tokens, t: &str, keep: &BTreeSet<String>) -> Option<Tokens> {
        let mut next = m.clone();
        for (p, w) in &self.pre[t] {
            if !keep.contains(p) {
                return None;
            }
            let have = next.get(p).copied().unwrap_or(0);
            if have < *w {
                return None;
            }
            next.insert(p.clone(), have - w);
        }
        for (p, w) in &self.post[t] {
            if keep.contains(p) {
                *next.entry(p.clone()).or_insert(0) += w;
            }
        }
        Some(next)
    }
}

fn tokens_of(s: &MarkedPetriNet, keep: &BTreeSet<String>) -> Tokens {
    s.marking()
        .iter()
        .filter(|(p, n)| *n > 0 && keep.contains(p.as_str()))
        .map(|(p, n)| (p.as_str().to_owned(), n))
        .collect()
}

fn grew(before: &Tokens, after: &Tokens, q: &BTreeSet<String>) -> bool {
    q.iter()
        .any(|p| after.get(p).copied().unwrap_or(0) > before.get(p).copied().unwrap_or(0))
}

/// Every firing sequence of `s` of length `1..=depth` whose last step
/// increases some place of `q`, as transition indices.
fn increasing_sequences(
    s: &MarkedPetriNet,
    q: &BTreeSet<String>,
    depth: usize,
) -> Result<Vec<Vec<usize>>, OracleError> {
    let flow = Flow::of(s.net());
    let all: BTreeSet<String> = s
        .net()
        .places()
        .iter()
        .map(|p| p.as_str().to_owned())
        .collect();
    let mut out = Vec::new();
    let mut visited = 0usize;
    let mut stack: Vec<(Tokens, Vec<usize>)> = vec![(tokens_of(s, &all), Vec::new())];
    while let Some((m, seq)) = stack.pop() {
        if seq.len() == depth {
            continue;
        }
        for (i, t) in flow.transitions.iter().enumerate() {
            let Some(next) = flow.step(&m, t, &all) else {
                continue;
            };
            visited += 1;
            if visited > SEQUENCE_BUDGET {
                return Err(OracleError::ExplosionCap {
                    budget: SEQUENCE_BUDGET,
                });
            }
            let mut longer = seq.clone();
            longer.push(i);
            if grew(&m, &next, q) {
                out.push(longer.clone());
            }
            stack.push((next, longer));
        }
    }
    Ok(out)
}

fn subsequences(seq: &[usize]) -> BTreeSet<Vec<usize>> {
    (1u32..(1 << seq.len()))
        .map(|mask| {
            seq.iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &t)| t)
                .collect()
        })
        .collect()
}

// Does `seq` (indices into the original transitions) fire from the
// candidate's restricted marking and end with an increase of `q`?
fn increasing_in(
    flow: &Flow,
    start: &Tokens,
    keep: &BTreeSet<String>,
    q: &BTreeSet<String>,
    seq: &[usize],
) -> bool {
    let mut m = start.clone();
    for (k, &t) in seq.iter().enumerate() {
        let Some(next) = flow.step(&m, &flow.transitions[t], keep) else {
            return false;
        };
        if k + 1 == seq.len() {
            return grew(&m, &next, q);
        }
        m = next;
    }
    false
}

struct Candidate<'a> {
    flow: Flow,
    keep: BTreeSet<String>,
    start: Tokens,
    q: BTreeSet<String>,
    transitions: HashSet<&'a str>,
}

impl<'a> Candidate<'a> {
    fn new(s: &MarkedPetriNet, q: &NodeSet, cand: &'a PetriNet) -> Candidate<'a> {
        let keep: BTreeSet<String> = cand
            .places()
            .iter()
            .map(|p| p.as_str().to_owned())
            .collect();
        Candidate {
            flow: Flow::of(s.net()),
            start: tokens_of(s, &keep),
            q: q.iter()
                .filter(|p| keep.contains(p.as_str()))
                .map(|p| p.as_str().to_owned())
                .collect(),
            keep,
            transitions: cand.transitions().iter().map(|t| t.as_str()).collect(),
        }
    }

    fn contains_all(&self, seq: &[usize]) -> bool {
        seq.iter()
            .all(|&t| self.transitions.contains(self.flow.transitions[t].as_str()))
    }

    fn accepts(&self, seq: &[usize]) -> bool {
        self.contains_all(seq) && increasing_in(&self.flow, &self.start, &self.keep, &self.q, seq)
    }
}

fn place_ids(q: &NodeSet) -> BTreeSet<String> {
    q.iter().map(|p| p.as_str().to_owned()).collect()
}

/// A subnet `cand` of `s` is a valid slice when `s` has no increasing
/// sequence up to `depth`, or when some subsequence of one of them is an
/// increasing firing sequence of `cand` from `M0` restricted to its places.
pub fn is_valid_slice(
    s: &MarkedPetriNet,
    q: &NodeSet,
    cand: &PetriNet,
    depth: usize,
) -> Result<bool, OracleError> {
    if !cand.is_subnet_of(s.net()) {
        return Ok(false);
    }
    let seqs = increasing_sequences(s, &place_ids(q), depth)?;
    if seqs.is_empty() {
        return Ok(true);
    }
    let c = Candidate::new(s, q, cand);
    let mut tried = HashSet::new();
    for seq in &seqs {
        for sub in subsequences(seq) {
            if tried.insert(sub.clone()) && c.accepts(&sub) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Like [`is_valid_slice`] but every increasing sequence of `s` must keep a
/// subsequence that increases `q` in `cand`.
pub fn is_maximal_slice(
    s: &MarkedPetriNet,
    q: &NodeSet,
    cand: &PetriNet,
    depth: usize,
) -> Result<bool, OracleError> {
    if !cand.is_subnet_of(s.net()) {
        return Ok(false);
    }
    let seqs = increasing_sequences(s, &place_ids(q), depth)?;
    let c = Candidate::new(s, q, cand);
    let mut verdict: HashMap<Vec<usize>, bool> = HashMap::new();
    for seq in &seqs {
        let ok = subsequences(seq).into_iter().any(|sub| {
            *verdict
                .entry(sub.clone())
                .or_insert_with(|| c.accepts(&sub))
        });
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The smallest valid slice, searching all induced subnets by size and then
/// by sorted id list. Returns its size and the subnet.
pub fn brute_force_min_slice(
    s: &MarkedPetriNet,
    q: &NodeSet,
    depth: usize,
) -> Result<(usize, PetriNet), OracleError> {
    let net = s.net();
    let size = net.size();
    if size > BRUTE_FORCE_CEILING {
        return Err(OracleError::TooLarge {
            size,
            ceiling: BRUTE_FORCE_CEILING,
        });
    }
    let seqs = increasing_sequences(s, &place_ids(q), depth)?;
    let empty = || net.induced(&NodeSet::new()).expect("empty set is a subset");
    if seqs.is_empty() {
        return Ok((0, empty()));
    }

    // Distinct subsequences grouped by the transitions they use.
    let flow = Flow::of(net);
    let mut by_mask: BTreeMap<u64, Vec<Vec<usize>>> = BTreeMap::new();
    let mut seen = HashSet::new();
    for seq in &seqs {
        for sub in subsequences(seq) {
            if seen.insert(sub.clone()) {
                let mask = sub.iter().fold(0u64, |m, &t| m | (1 << t));
                by_mask.entry(mask).or_default().push(sub);
            }
        }
    }

    let ids: Vec<NodeId> = net.nodes().into_iter().collect();
    let q_ids = place_ids(q);
    for k in 0..=size {
        for combo in Combinations::new(ids.len(), k) {
            let nodes: NodeSet = combo.iter().map(|&i| ids[i].clone()).collect();
            let keep: BTreeSet<String> = nodes
                .iter()
                .filter(|n| net.is_place(n.as_str()))
                .map(|n| n.as_str().to_owned())
                .collect();
            let tmask = flow
                .transitions
                .iter()
                .enumerate()
                .filter(|(_, t)| nodes.contains(t.as_str()))
                .fold(0u64, |m, (i, _)| m | (1 << i));
            let start = tokens_of(s, &keep);
            let hit = by_mask
                .iter()
                .filter(|(&m, _)| m & !tmask == 0)
                .flat_map(|(_, subs)| subs)
                .any(|sub| increasing_in(&flow, &start, &keep, &q_ids, sub));
            if hit {
                let witness = net.induced(&nodes).expect("nodes come from the net");
                return Ok((k, witness));
            }
        }
    }
    unreachable!("the whole net replays its own increasing sequences")
}

/// k-subsets of `0..n` in lexicographic order.
struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Combinations {
        Combinations {
            n,
            current: (k <= n).then(|| (0..k).collect()),
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let k = out.len();
        let mut c = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if c[i] < self.n - k + i {
                c[i] += 1;
                for j in i + 1..k {
                    c[j] = c[j - 1] + 1;
                }
                self.current = Some(c);
                break;
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{net_b, net_dead};
    use crate::model::node_set;

    fn sub(s: &MarkedPetriNet, ids: &[&str]) -> PetriNet {
        s.net().induced(&node_set(ids.iter().copied())).unwrap()
    }

    #[test]
    fn validity_examples() {
        let b = net_b();
        let q = node_set(["p3"]);
        assert!(is_valid_slice(&b, &q, &sub(&b, &["p1", "t1", "p3"]), 4).unwrap());
        assert!(!is_valid_slice(&b, &q, &sub(&b, &["p3"]), 4).unwrap());
        let d = net_dead();
        assert!(is_valid_slice(&d, &node_set(["p2"]), &sub(&d, &[]), 4).unwrap());
    }

    #[test]
    fn brute_force_examples() {
        let b = net_b();
        let (n, w) = brute_force_min_slice(&b, &node_set(["p3"]), 4).unwrap();
        assert_eq!(n, 3);
        assert_eq!(w.nodes(), node_set(["p1", "t1", "p3"]));

        let (n, w) = brute_force_min_slice(&net_dead(), &node_set(["p2"]), 4).unwrap();
        assert_eq!((n, w.size()), (0, 0));

        let (n, _) = brute_force_min_slice(&b, &NodeSet::new(), 4).unwrap();
        assert_eq!(n, 0);

        let big = crate::fixtures::chain(6);
        assert!(matches!(
            brute_force_min_slice(&big, &NodeSet::new(), 4),
            Err(OracleError::TooLarge { size: 13, .. })
        ));
    }

    #[test]
    fn maximality_examples() {
        let b = net_b();
        let q = node_set(["p3"]);
        assert!(is_maximal_slice(&b, &q, &sub(&b, &["p1", "t1", "p3"]), 4).unwrap());
        assert!(!is_maximal_slice(&b, &q, &sub(&b, &["p3"]), 4).unwrap());
        let d = net_dead();
        assert!(is_maximal_slice(&d, &node_set(["p2"]), &sub(&d, &["p1"]), 4).unwrap());
    }

    #[test]
    fn non_subnets_are_rejected() {
        let b = net_b();
        let other = crate::fixtures::net_a().net().clone();
        assert!(!is_valid_slice(&b, &node_set(["p3"]), &other, 4).unwrap());
    }

    #[test]
    fn combinations_are_lexicographic() {
        let all: Vec<Vec<usize>> = Combinations::new(4, 2).collect();
        assert_eq!(
            all,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert_eq!(Combinations::new(3, 0).count(), 1);
        assert_eq!(Combinations::new(2, 3).count(), 0);
    }
}
