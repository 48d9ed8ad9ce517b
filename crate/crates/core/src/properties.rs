//! Structural and behavioural net properties, and how they survive slicing.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::model::{MarkedPetriNet, Marking, NodeId, PetriNet};
use crate::semantics::{enabled_dense, fire_dense, reachability_graph, ReachGraph};
use crate::slicer::SliceResult;

/// Markings explored before a behavioural check gives up.
pub const DEFAULT_STATE_CAP: usize = 50_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PropertyId {
    FreeChoice,
    RestrictedFreeChoice,
    AsymmetricChoice,
    Pure,
    Homogeneous,
    Plain,
    ConflictFree,
    OutputNonbranching,
    TNet,
    SNet,
    StronglyConnected,
    WeaklyConnected,
    Bounded,
    KBounded(u64),
    Safe,
    Persistent,
    DeadlockFree,
    Reversible,
}

impl PropertyId {
    pub const STRUCTURAL: [PropertyId; 12] = [
        PropertyId::FreeChoice,
        PropertyId::RestrictedFreeChoice,
        PropertyId::AsymmetricChoice,
        PropertyId::Pure,
        PropertyId::Homogeneous,
        PropertyId::Plain,
        PropertyId::ConflictFree,
        PropertyId::OutputNonbranching,
        PropertyId::TNet,
        PropertyId::SNet,
        PropertyId::StronglyConnected,
        PropertyId::WeaklyConnected,
    ];

    /// Behavioural properties, with `k_bounded` at `k = 2` as a representative.
    pub const BEHAVIOURAL: [PropertyId; 6] = [
        PropertyId::Bounded,
        PropertyId::KBounded(2),
        PropertyId::Safe,
        PropertyId::Persistent,
        PropertyId::DeadlockFree,
        PropertyId::Reversible,
    ];

    /// Properties a maximal or minimal slice keeps whenever the original net has them.
    pub fn preserved_by_slicing(self) -> bool {
        !matches!(
            self,
            PropertyId::StronglyConnected
                | PropertyId::WeaklyConnected
                | PropertyId::DeadlockFree
                | PropertyId::Reversible
        )
    }

    pub fn is_structural(self) -> bool {
        !self.is_behavioural()
    }

    pub fn is_behavioural(self) -> bool {
        matches!(
            self,
            PropertyId::Bounded
                | PropertyId::KBounded(_)
                | PropertyId::Safe
                | PropertyId::Persistent
                | PropertyId::DeadlockFree
                | PropertyId::Reversible
        )
    }

    fn tag(self) -> &'static str {
        match self {
            PropertyId::FreeChoice => "free_choice",
            PropertyId::RestrictedFreeChoice => "restricted_free_choice",
            PropertyId::AsymmetricChoice => "asymmetric_choice",
            PropertyId::Pure => "pure",
            PropertyId::Homogeneous => "homogeneous",
            PropertyId::Plain => "plain",
            PropertyId::ConflictFree => "conflict_free",
            PropertyId::OutputNonbranching => "output_nonbranching",
            PropertyId::TNet => "t_net",
            PropertyId::SNet => "s_net",
            PropertyId::StronglyConnected => "strongly_connected",
            PropertyId::WeaklyConnected => "weakly_connected",
            PropertyId::Bounded => "bounded",
            PropertyId::KBounded(_) => "k_bounded",
            PropertyId::Safe => "safe",
            PropertyId::Persistent => "persistent",
            PropertyId::DeadlockFree => "deadlock_free",
            PropertyId::Reversible => "reversible",
        }
    }
}

impl fmt::Display for PropertyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropertyId::KBounded(k) => write!(f, "k_bounded({k})"),
            other => f.write_str(other.tag()),
        }
    }
}

impl Serialize for PropertyId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PropertyError {
    #[error("unknown property `{0}`")]
    Unknown(String),
    #[error("`{0}` is not a structural property")]
    NotStructural(PropertyId),
    #[error("`{0}` is not a behavioural property")]
    NotBehavioural(PropertyId),
}

impl FromStr for PropertyId {
    type Err = PropertyError;

    /// Accepts the tags of [`fmt::Display`]; `k_bounded(k)` also as `k_bounded:k`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let unknown = || PropertyError::Unknown(s.to_owned());
        if let Some(rest) = s.strip_prefix("k_bounded") {
            let k = rest
                .strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .or_else(|| rest.strip_prefix(':'))
                .ok_or_else(unknown)?;
            return k
                .trim()
                .parse()
                .map(PropertyId::KBounded)
                .map_err(|_| unknown());
        }
        PropertyId::STRUCTURAL
            .into_iter()
            .chain(PropertyId::BEHAVIOURAL)
            .find(|p| !matches!(p, PropertyId::KBounded(_)) && p.tag() == s)
            .ok_or_else(unknown)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Holds,
    Fails,
    Unknown,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Holds => "holds",
            Outcome::Fails => "fails",
            Outcome::Unknown => "unknown",
        })
    }
}

/// Evidence for a failed check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// The nodes that break a structural rule.
    Nodes(Vec<NodeId>),
    /// A reachable marking, with a smaller reachable marking it strictly covers
    /// when the witness is for unboundedness.
    Marking {
        marking: Marking,
        covered: Option<Marking>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyVerdict {
    pub property: PropertyId,
    pub outcome: Outcome,
    pub witness: Option<Witness>,
}

impl PropertyVerdict {
    fn holds(property: PropertyId) -> Self {
        PropertyVerdict {
            property,
            outcome: Outcome::Holds,
            witness: None,
        }
    }

    fn fails(property: PropertyId, witness: Witness) -> Self {
        PropertyVerdict {
            property,
            outcome: Outcome::Fails,
            witness: Some(witness),
        }
    }

    fn undecided(property: PropertyId, complete: bool) -> Self {
        PropertyVerdict {
            property,
            outcome: if complete {
                Outcome::Holds
            } else {
                Outcome::Unknown
            },
            witness: None,
        }
    }
}

fn nodes<'a>(ids: impl IntoIterator<Item = &'a NodeId>) -> Witness {
    Witness::Nodes(ids.into_iter().cloned().collect())
}

fn pre_set(net: &PetriNet, t: usize) -> Vec<usize> {
    net.trans_pre(t).iter().map(|&(p, _)| p).collect()
}

fn post_of(net: &PetriNet, p: usize) -> Vec<usize> {
    net.place_post(p).iter().map(|&(t, _)| t).collect()
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.binary_search(x).is_ok())
}

fn intersects(a: &[usize], b: &[usize]) -> bool {
    a.iter().any(|x| b.binary_search(x).is_ok())
}

/// Decides a structural property from the flow relation alone.
pub fn check_structural(
    net: &PetriNet,
    prop: PropertyId,
) -> Result<PropertyVerdict, PropertyError> {
    if !prop.is_structural() {
        return Err(PropertyError::NotStructural(prop));
    }
    let places = net.places();
    let trans = net.transitions();
    let np = places.len();
    let nt = trans.len();
    let found: Option<Witness> = match prop {
        PropertyId::FreeChoice => (0..np).find_map(|p| {
            let out = post_of(net, p);
            out.iter().enumerate().find_map(|(i, &t)| {
                out[i + 1..]
                    .iter()
                    .find(|&&u| pre_set(net, t) != pre_set(net, u))
                    .map(|&u| nodes([&places[p], &trans[t], &trans[u]]))
            })
        }),
        PropertyId::RestrictedFreeChoice => (0..np).find_map(|p| {
            let out = post_of(net, p);
            if out.len() < 2 {
                return None;
            }
            out.iter()
                .find(|&&t| pre_set(net, t) != [p])
                .map(|&t| nodes([&places[p], &trans[t]]))
        }),
        PropertyId::AsymmetricChoice => (0..np).find_map(|p| {
            let a = post_of(net, p);
            (p + 1..np).find_map(|r| {
                let b = post_of(net, r);
                let ordered = is_subset(&a, &b) || is_subset(&b, &a);
                (intersects(&a, &b) && !ordered).then(|| nodes([&places[p], &places[r]]))
            })
        }),
        PropertyId::Pure => (0..nt).find_map(|t| {
            net.trans_pre(t)
                .iter()
                .find(|&&(p, _)| net.output_weight(t, p) > 0)
                .map(|&(p, _)| nodes([&places[p], &trans[t]]))
        }),
        PropertyId::Homogeneous => (0..np).find_map(|p| {
            let out = net.place_post(p);
            let &(t0, w0) = out.first()?;
            out.iter()
                .find(|&&(_, w)| w != w0)
                .map(|&(t, _)| nodes([&places[p], &trans[t0], &trans[t]]))
        }),
        PropertyId::Plain => net
            .arcs()
            .find(|&(_, _, w)| w > 1)
            .map(|(a, b, _)| nodes([a, b])),
        PropertyId::ConflictFree => (0..np).find_map(|p| {
            let out = net.place_post(p);
            if out.len() < 2 {
                return None;
            }
            out.iter()
                .find(|&&(t, _)| net.output_weight(t, p) == 0)
                .map(|&(t, _)| nodes([&places[p], &trans[t]]))
        }),
        PropertyId::OutputNonbranching => (0..np)
            .find(|&p| net.place_post(p).len() > 1)
            .map(|p| nodes([&places[p]])),
        PropertyId::TNet => (0..np)
            .find(|&p| net.place_pre(p).len() > 1 || net.place_post(p).len() > 1)
            .map(|p| nodes([&places[p]])),
        PropertyId::SNet => (0..nt)
            .find(|&t| net.trans_pre(t).len() > 1 || net.trans_post(t).len() > 1)
            .map(|t| nodes([&trans[t]])),
        PropertyId::StronglyConnected => unreached(net, true),
        PropertyId::WeaklyConnected => unreached(net, false),
        _ => unreachable!("behavioural properties are rejected above"),
    };
    Ok(match found {
        Some(w) => PropertyVerdict::fails(prop, w),
        None => PropertyVerdict::holds(prop),
    })
}

// Dense node numbering: places then transitions.
fn neighbours(net: &PetriNet, v: usize, forward: bool) -> Vec<usize> {
    let np = net.places().len();
    let list = match (v < np, forward) {
        (true, true) => net.place_post(v),
        (true, false) => net.place_pre(v),
        (false, true) => net.trans_post(v - np),
        (false, false) => net.trans_pre(v - np),
    };
    let offset = if v < np { np } else { 0 };
    list.iter().map(|&(i, _)| i + offset).collect()
}

fn reach(net: &PetriNet, directions: &[bool]) -> Vec<bool> {
    let n = net.size();
    let mut seen = vec![false; n];
    if n == 0 {
        return seen;
    }
    seen[0] = true;
    let mut queue = VecDeque::from([0]);
    while let Some(v) = queue.pop_front() {
        for &d in directions {
            for u in neighbours(net, v, d) {
                if !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
    }
    seen
}

// First node not connected to node 0, or None when connected.
fn unreached(net: &PetriNet, strong: bool) -> Option<Witness> {
    let id = |v: usize| {
        let np = net.places().len();
        if v < np {
            net.places()[v].clone()
        } else {
            net.transitions()[v - np].clone()
        }
    };
    let checks: Vec<Vec<bool>> = if strong {
        vec![reach(net, &[true]), reach(net, &[false])]
    } else {
        vec![reach(net, &[true, false])]
    };
    checks.iter().find_map(|seen| {
        seen.iter()
            .position(|&b| !b)
            .map(|v| Witness::Nodes(vec![id(0), id(v)]))
    })
}

/// Decides a behavioural property on the reachability graph, explored up to
/// `state_cap` markings. Open verdicts are [`Outcome::Unknown`].
pub fn check_behavioural(
    s: &MarkedPetriNet,
    prop: PropertyId,
    state_cap: usize,
) -> Result<PropertyVerdict, PropertyError> {
    if !prop.is_behavioural() {
        return Err(PropertyError::NotBehavioural(prop));
    }
    let g = reachability_graph(s, state_cap);
    Ok(decide(s.net(), &g, prop))
}

fn decide(net: &PetriNet, g: &ReachGraph, prop: PropertyId) -> PropertyVerdict {
    let complete = g.is_complete();
    let marking_witness = |i: usize| Witness::Marking {
        marking: g.marking(i),
        covered: None,
    };
    match prop {
        PropertyId::Bounded => match strict_cover(g) {
            Some(w) => PropertyVerdict::fails(prop, w),
            None => PropertyVerdict::undecided(prop, complete),
        },
        PropertyId::KBounded(_) | PropertyId::Safe => {
            let k = if let PropertyId::KBounded(k) = prop {
                k
            } else {
                1
            };
            if let Some(i) = (0..g.state_count()).find(|&i| g.tokens(i).iter().any(|&n| n > k)) {
                return PropertyVerdict::fails(prop, marking_witness(i));
            }
            match strict_cover(g) {
                Some(w) => PropertyVerdict::fails(prop, w),
                None => PropertyVerdict::undecided(prop, complete),
            }
        }
        PropertyId::DeadlockFree => {
            let nt = net.transitions().len();
            match (0..g.state_count())
                .find(|&i| !(0..nt).any(|t| enabled_dense(net, g.tokens(i), t)))
            {
                Some(i) => PropertyVerdict::fails(prop, marking_witness(i)),
                None => PropertyVerdict::undecided(prop, complete),
            }
        }
        PropertyId::Persistent => match non_persistent(net, g) {
            Some(w) => PropertyVerdict::fails(prop, w),
            None => PropertyVerdict::undecided(prop, complete),
        },
        PropertyId::Reversible => {
            if !complete {
                return PropertyVerdict::undecided(prop, false);
            }
            match stuck_away_from_initial(g) {
                Some(i) => PropertyVerdict::fails(prop, marking_witness(i)),
                None => PropertyVerdict::holds(prop),
            }
        }
        _ => unreachable!("structural properties are rejected by the caller"),
    }
}

// A state that strictly covers one of its breadth-first ancestors proves
// unboundedness: the path between them can be repeated forever.
fn strict_cover(g: &ReachGraph) -> Option<Witness> {
    for i in 0..g.state_count() {
        let m = g.tokens(i);
        let mut a = g.parent(i);
        while let Some(j) = a {
            let anc = g.tokens(j);
            if anc.iter().zip(m).all(|(x, y)| x <= y) && anc != m {
                return Some(Witness::Marking {
                    marking: g.marking(i),
                    covered: Some(g.marking(j)),
                });
            }
            a = g.parent(j);
        }
    }
    None
}

fn non_persistent(net: &PetriNet, g: &ReachGraph) -> Option<Witness> {
    let nt = net.transitions().len();
    for i in 0..g.state_count() {
        let m = g.tokens(i);
        let enabled: Vec<usize> = (0..nt).filter(|&t| enabled_dense(net, m, t)).collect();
        for &t in &enabled {
            let after = fire_dense(net, m, t);
            if let Some(&u) = enabled
                .iter()
                .find(|&&u| u != t && !enabled_dense(net, &after, u))
            {
                let trans = net.transitions();
                let mut ids = vec![trans[t].clone(), trans[u].clone()];
                ids.extend(g.marking(i).iter().map(|(p, _)| p.clone()));
                return Some(Witness::Nodes(ids));
            }
        }
    }
    None
}

fn stuck_away_from_initial(g: &ReachGraph) -> Option<usize> {
    let n = g.state_count();
    let mut back: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, _, b) in g.raw_edges() {
        back[b].push(a);
    }
    let mut seen = vec![false; n];
    seen[g.initial()] = true;
    let mut queue = VecDeque::from([g.initial()]);
    while let Some(v) = queue.pop_front() {
        for &u in &back[v] {
            if !seen[u] {
                seen[u] = true;
                queue.push_back(u);
            }
        }
    }
    seen.iter().position(|&b| !b)
}

/// Either kind of property, with the default state cap for behavioural ones.
pub fn check(s: &MarkedPetriNet, prop: PropertyId) -> PropertyVerdict {
    if prop.is_structural() {
        check_structural(s.net(), prop).expect("structural")
    } else {
        check_behavioural(s, prop, DEFAULT_STATE_CAP).expect("behavioural")
    }
}

/// One line of a preservation report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Preservation {
    pub property: PropertyId,
    pub original: Outcome,
    pub slice: Outcome,
}

impl Preservation {
    /// `false` only when the original has the property and the slice is not
    /// known to have it.
    pub fn kept(&self) -> bool {
        !(self.original == Outcome::Holds && self.slice != Outcome::Holds)
    }
}

pub fn preservation_report(
    original: &MarkedPetriNet,
    slice: &SliceResult,
    props: &[PropertyId],
) -> Vec<Preservation> {
    props
        .iter()
        .map(|&p| Preservation {
            property: p,
            original: check(original, p).outcome,
            slice: check(&slice.subnet, p).outcome,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{net_a, net_b, ring};
    use crate::model::{node_set, Arc};
    use crate::slicer::{slice_minimal, Algorithm};

    fn self_loop() -> PetriNet {
        PetriNet::new(
            "loop",
            ["p"],
            ["t"],
            [Arc::new("p", "t"), Arc::new("t", "p")],
        )
        .unwrap()
    }

    #[test]
    fn structural_examples() {
        let v = check_structural(net_a().net(), PropertyId::Pure).unwrap();
        assert_eq!(v.outcome, Outcome::Holds);
        let v = check_structural(&self_loop(), PropertyId::Pure).unwrap();
        assert_eq!(v.outcome, Outcome::Fails);
        assert_eq!(
            v.witness,
            Some(Witness::Nodes(vec!["p".into(), "t".into()]))
        );
        let empty = PetriNet::empty("e");
        for p in PropertyId::STRUCTURAL {
            assert_eq!(
                check_structural(&empty, p).unwrap().outcome,
                Outcome::Holds,
                "{p}"
            );
        }
        assert_eq!(
            check_structural(&empty, PropertyId::Safe),
            Err(PropertyError::NotStructural(PropertyId::Safe))
        );
    }

    #[test]
    fn choice_properties() {
        // p feeds t and u; u also needs r.
        let net = PetriNet::new(
            "c",
            ["p", "r"],
            ["t", "u"],
            [Arc::new("p", "t"), Arc::new("p", "u"), Arc::new("r", "u")],
        )
        .unwrap();
        let outcome = |p| check_structural(&net, p).unwrap().outcome;
        assert_eq!(outcome(PropertyId::FreeChoice), Outcome::Fails);
        assert_eq!(outcome(PropertyId::RestrictedFreeChoice), Outcome::Fails);
        // p• = {t,u} ⊇ r• = {u}.
        assert_eq!(outcome(PropertyId::AsymmetricChoice), Outcome::Holds);
        assert_eq!(outcome(PropertyId::OutputNonbranching), Outcome::Fails);
        assert_eq!(outcome(PropertyId::ConflictFree), Outcome::Fails);
        assert_eq!(outcome(PropertyId::SNet), Outcome::Fails);
        assert_eq!(outcome(PropertyId::TNet), Outcome::Fails);
        assert_eq!(outcome(PropertyId::Homogeneous), Outcome::Holds);
        assert_eq!(outcome(PropertyId::Plain), Outcome::Holds);
    }

    #[test]
    fn connectivity() {
        let r = ring();
        let strongly = |n: &PetriNet| {
            check_structural(n, PropertyId::StronglyConnected)
                .unwrap()
                .outcome
        };
        assert_eq!(strongly(r.net()), Outcome::Holds);
        assert_eq!(strongly(net_a().net()), Outcome::Fails);
        let weakly = |n: &PetriNet| {
            check_structural(n, PropertyId::WeaklyConnected)
                .unwrap()
                .outcome
        };
        assert_eq!(weakly(net_b().net()), Outcome::Holds);
        let isolated = PetriNet::new("i", ["p", "x"], ["t"], [Arc::new("p", "t")]).unwrap();
        assert_eq!(weakly(&isolated), Outcome::Fails);
    }

    #[test]
    fn behavioural_examples() {
        let v = check_behavioural(&net_a(), PropertyId::Safe, 100).unwrap();
        assert_eq!(v.outcome, Outcome::Holds);

        let source = PetriNet::new("src", ["p"], ["t"], [Arc::new("t", "p")]).unwrap();
        let s = MarkedPetriNet::unmarked(source);
        let v = check_behavioural(&s, PropertyId::Bounded, 100).unwrap();
        assert_eq!(v.outcome, Outcome::Fails);
        assert!(matches!(
            v.witness,
            Some(Witness::Marking {
                covered: Some(_),
                ..
            })
        ));
        let v = check_behavioural(&s, PropertyId::Persistent, 100).unwrap();
        assert_eq!(v.outcome, Outcome::Unknown);

        assert_eq!(
            check_behavioural(&net_a(), PropertyId::DeadlockFree, 100)
                .unwrap()
                .outcome,
            Outcome::Fails
        );
        assert_eq!(
            check_behavioural(&ring(), PropertyId::Reversible, 100)
                .unwrap()
                .outcome,
            Outcome::Holds
        );
        assert_eq!(
            check_behavioural(&net_a(), PropertyId::Reversible, 100)
                .unwrap()
                .outcome,
            Outcome::Fails
        );
        assert!(check_behavioural(&net_a(), PropertyId::Pure, 100).is_err());
    }

    #[test]
    fn persistence_detects_conflicts() {
        let net = PetriNet::new(
            "conflict",
            ["p", "a", "b"],
            ["t", "u"],
            [
                Arc::new("p", "t"),
                Arc::new("p", "u"),
                Arc::new("t", "a"),
                Arc::new("u", "b"),
            ],
        )
        .unwrap();
        let s = MarkedPetriNet::new(net, [("p", 1)].into_iter().collect()).unwrap();
        assert_eq!(
            check_behavioural(&s, PropertyId::Persistent, 100)
                .unwrap()
                .outcome,
            Outcome::Fails
        );
    }

    #[test]
    fn parse_tags() {
        for p in PropertyId::STRUCTURAL
            .into_iter()
            .chain(PropertyId::BEHAVIOURAL)
        {
            assert_eq!(p.to_string().parse::<PropertyId>().unwrap(), p);
        }
        assert_eq!(
            "k_bounded:7".parse::<PropertyId>().unwrap(),
            PropertyId::KBounded(7)
        );
        assert!("lola:EF DEADLOCK".parse::<PropertyId>().is_err());
    }

    #[test]
    fn ring_loses_strong_connectivity() {
        let s = ring();
        let slice = slice_minimal(&s, &node_set(["p2"])).unwrap();
        assert_eq!(slice.algorithm, Algorithm::Minimal);
        let report = preservation_report(
            &s,
            &slice,
            &[PropertyId::StronglyConnected, PropertyId::Pure],
        );
        assert_eq!(report[0].original, Outcome::Holds);
        assert_eq!(report[0].slice, Outcome::Fails);
        assert!(!report[0].kept());
        assert!(report[1].kept());
        assert!(preservation_report(&s, &slice, &[]).is_empty());
    }
}
