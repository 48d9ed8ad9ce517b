//! Place/transition nets, markings and subnets.
//!
//! A [`PetriNet`] is immutable once built. Places and transitions are kept in
//! sorted id order, and every node gets a dense index in that order so the
//! slicers and the token game can work on plain vectors. The public surface
//! speaks [`NodeId`]s only.

use std::borrow::Borrow;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Identifier of a place or a transition, exactly as read from the model.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(id: impl Into<String>) -> Self {
        NodeId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_owned())
    }
}

impl From<String> for NodeId {
    fn from(s: String) -> Self {
        NodeId(s)
    }
}

impl Borrow<str> for NodeId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

/// A set of node ids, possibly mixing places and transitions.
pub type NodeSet = BTreeSet<NodeId>;

/// Builds a [`NodeSet`] from string-like ids.
pub fn node_set<I, S>(ids: I) -> NodeSet
where
    I: IntoIterator<Item = S>,
    S: Into<NodeId>,
{
    ids.into_iter().map(Into::into).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Place,
    Transition,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Node {
    Place(usize),
    Transition(usize),
}

/// An arc as given to [`PetriNet::new`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arc {
    pub source: NodeId,
    pub target: NodeId,
    pub weight: u32,
}

impl Arc {
    /// Arc with the default weight 1.
    pub fn new(source: impl Into<NodeId>, target: impl Into<NodeId>) -> Self {
        Arc::weighted(source, target, 1)
    }

    pub fn weighted(source: impl Into<NodeId>, target: impl Into<NodeId>, weight: u32) -> Self {
        Arc {
            source: source.into(),
            target: target.into(),
            weight,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("`{0}` is declared both as a place and as a transition")]
    OverlappingIds(NodeId),
    #[error("`{0}` is declared twice")]
    DuplicateNode(NodeId),
    #[error("arc {from} -> {to} has an undeclared endpoint")]
    DanglingArc { from: NodeId, to: NodeId },
    #[error("arc {from} -> {to} does not connect a place and a transition")]
    BadArcDirection { from: NodeId, to: NodeId },
    #[error("arc {from} -> {to} has weight 0")]
    ZeroWeight { from: NodeId, to: NodeId },
    #[error("arc {from} -> {to} is declared twice")]
    DuplicateArc { from: NodeId, to: NodeId },
    #[error("unknown node `{0}`")]
    UnknownNode(NodeId),
    #[error("`{0}` is not a node of the right kind in the original net")]
    NotASubset(NodeId),
    #[error("marking refers to `{0}`, which is not a place of the net")]
    MarkingOutsideNet(NodeId),
}

/// Weighted adjacency lists over dense indices.
#[derive(Clone, Debug, Default)]
struct Adjacency {
    place_pre: Vec<Vec<(usize, u32)>>,
    place_post: Vec<Vec<(usize, u32)>>,
    trans_pre: Vec<Vec<(usize, u32)>>,
    trans_post: Vec<Vec<(usize, u32)>>,
}

/// A place/transition net `(P, T, F)`.
///
/// Empty nets are legal values: slices may be empty. The non-emptiness of
/// `P ∪ T` is checked when a model is read from PNML.
#[derive(Clone)]
pub struct PetriNet {
    name: String,
    places: Vec<NodeId>,
    transitions: Vec<NodeId>,
    index: HashMap<NodeId, Node>,
    arcs: BTreeMap<(NodeId, NodeId), u32>,
    adj: Adjacency,
}

impl PartialEq for PetriNet {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.places == other.places
            && self.transitions == other.transitions
            && self.arcs == other.arcs
    }
}

impl Eq for PetriNet {}

impl fmt::Debug for PetriNet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PetriNet")
            .field("name", &self.name)
            .field("places", &self.places)
            .field("transitions", &self.transitions)
            .field("arcs", &self.arcs)
            .finish()
    }
}

impl PetriNet {
    /// Validates and builds a net.
    pub fn new<P, T>(
        name: impl Into<String>,
        places: P,
        transitions: T,
        arcs: impl IntoIterator<Item = Arc>,
    ) -> Result<PetriNet, ModelError>
    where
        P: IntoIterator,
        P::Item: Into<NodeId>,
        T: IntoIterator,
        T::Item: Into<NodeId>,
    {
        let mut place_set = BTreeSet::new();
        for p in places {
            let p = p.into();
            if let Some(dup) = place_set.replace(p) {
                return Err(ModelError::DuplicateNode(dup));
            }
        }
        let mut trans_set = BTreeSet::new();
        for t in transitions {
            let t = t.into();
            if place_set.contains(&t) {
                return Err(ModelError::OverlappingIds(t));
            }
            if let Some(dup) = trans_set.replace(t) {
                return Err(ModelError::DuplicateNode(dup));
            }
        }

        let places: Vec<NodeId> = place_set.into_iter().collect();
        let transitions: Vec<NodeId> = trans_set.into_iter().collect();
        let mut index = HashMap::with_capacity(places.len() + transitions.len());
        for (i, p) in places.iter().enumerate() {
            index.insert(p.clone(), Node::Place(i));
        }
        for (i, t) in transitions.iter().enumerate() {
            index.insert(t.clone(), Node::Transition(i));
        }

        let mut flow = BTreeMap::new();
        for Arc {
            source,
            target,
            weight,
        } in arcs
        {
            let (Some(&s), Some(&t)) = (index.get(&source), index.get(&target)) else {
                return Err(ModelError::DanglingArc {
                    from: source,
                    to: target,
                });
            };
            let bipartite = matches!(
                (s, t),
                (Node::Place(_), Node::Transition(_)) | (Node::Transition(_), Node::Place(_))
            );
            if !bipartite {
                return Err(ModelError::BadArcDirection {
                    from: source,
                    to: target,
                });
            }
            if weight == 0 {
                return Err(ModelError::ZeroWeight {
                    from: source,
                    to: target,
                });
            }
            let key = (source, target);
            if flow.contains_key(&key) {
                let (source, target) = key;
                return Err(ModelError::DuplicateArc {
                    from: source,
                    to: target,
                });
            }
            flow.insert(key, weight);
        }

        Ok(Self::assemble(
            name.into(),
            places,
            transitions,
            index,
            flow,
        ))
    }

    /// The empty net.
    pub fn empty(name: impl Into<String>) -> PetriNet {
        Self::assemble(
            name.into(),
            Vec::new(),
            Vec::new(),
            HashMap::new(),
            BTreeMap::new(),
        )
    }

    fn assemble(
        name: String,
        places: Vec<NodeId>,
        transitions: Vec<NodeId>,
        index: HashMap<NodeId, Node>,
        arcs: BTreeMap<(NodeId, NodeId), u32>,
    ) -> PetriNet {
        let mut adj = Adjacency {
            place_pre: vec![Vec::new(); places.len()],
            place_post: vec![Vec::new(); places.len()],
            trans_pre: vec![Vec::new(); transitions.len()],
            trans_post: vec![Vec::new(); transitions.len()],
        };
        // BTreeMap order keeps every adjacency list sorted by neighbour id.
        for ((s, t), &w) in &arcs {
            match (index[s], index[t]) {
                (Node::Place(p), Node::Transition(tr)) => {
                    adj.place_post[p].push((tr, w));
                    adj.trans_pre[tr].push((p, w));
                }
                (Node::Transition(tr), Node::Place(p)) => {
                    adj.trans_post[tr].push((p, w));
                    adj.place_pre[p].push((tr, w));
                }
                _ => unreachable!("validated bipartite"),
            }
        }
        for list in adj
            .place_pre
            .iter_mut()
            .chain(adj.place_post.iter_mut())
            .chain(adj.trans_pre.iter_mut())
            .chain(adj.trans_post.iter_mut())
        {
            list.sort_unstable();
        }
        PetriNet {
            name,
            places,
            transitions,
            index,
            arcs,
            adj,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Same net under another name.
    pub fn renamed(&self, name: impl Into<String>) -> PetriNet {
        let mut net = self.clone();
        net.name = name.into();
        net
    }

    /// Places in sorted id order.
    pub fn places(&self) -> &[NodeId] {
        &self.places
    }

    /// Transitions in sorted id order.
    pub fn transitions(&self) -> &[NodeId] {
        &self.transitions
    }

    /// Arcs as `(source, target, weight)` in sorted `(source, target)` order.
    pub fn arcs(&self) -> impl Iterator<Item = (&NodeId, &NodeId, u32)> + '_ {
        self.arcs.iter().map(|((s, t), &w)| (s, t, w))
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    /// `F(x, y)`, or `None` when the pair is not in the flow relation.
    pub fn weight(&self, source: &str, target: &str) -> Option<u32> {
        // Lookups by &str need an owned key for the tuple map.
        self.arcs
            .get(&(NodeId::from(source), NodeId::from(target)))
            .copied()
    }

    pub fn kind(&self, id: &str) -> Option<NodeKind> {
        self.index.get(id).map(|n| match n {
            Node::Place(_) => NodeKind::Place,
            Node::Transition(_) => NodeKind::Transition,
        })
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    pub fn is_place(&self, id: &str) -> bool {
        self.kind(id) == Some(NodeKind::Place)
    }

    pub fn is_transition(&self, id: &str) -> bool {
        self.kind(id) == Some(NodeKind::Transition)
    }

    /// `|P| + |T|`.
    pub fn size(&self) -> usize {
        self.places.len() + self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.size() == 0
    }

    /// All arc weights are 1.
    pub fn is_ordinary(&self) -> bool {
        self.arcs.values().all(|&w| w == 1)
    }

    /// All places and transitions.
    pub fn nodes(&self) -> NodeSet {
        self.places
            .iter()
            .chain(self.transitions.iter())
            .cloned()
            .collect()
    }

    /// `•x`: the input transitions of a place, or the input places of a transition.
    pub fn preset(&self, id: &str) -> Result<NodeSet, ModelError> {
        Ok(match self.node(id)? {
            Node::Place(p) => self.ids_of_transitions(&self.adj.place_pre[p]),
            Node::Transition(t) => self.ids_of_places(&self.adj.trans_pre[t]),
        })
    }

    /// `x•`: the output transitions of a place, or the output places of a transition.
    pub fn postset(&self, id: &str) -> Result<NodeSet, ModelError> {
        Ok(match self.node(id)? {
            Node::Place(p) => self.ids_of_transitions(&self.adj.place_post[p]),
            Node::Transition(t) => self.ids_of_places(&self.adj.trans_post[t]),
        })
    }

    /// Pointwise union of presets.
    pub fn preset_of<'a>(
        &self,
        ids: impl IntoIterator<Item = &'a NodeId>,
    ) -> Result<NodeSet, ModelError> {
        let mut out = NodeSet::new();
        for id in ids {
            out.extend(self.preset(id.as_str())?);
        }
        Ok(out)
    }

    /// Pointwise union of postsets.
    pub fn postset_of<'a>(
        &self,
        ids: impl IntoIterator<Item = &'a NodeId>,
    ) -> Result<NodeSet, ModelError> {
        let mut out = NodeSet::new();
        for id in ids {
            out.extend(self.postset(id.as_str())?);
        }
        Ok(out)
    }

    /// The subnet induced by the given places and transitions: the flow is the
    /// original flow restricted to pairs with both endpoints retained.
    pub fn subnet(&self, places: &NodeSet, transitions: &NodeSet) -> Result<PetriNet, ModelError> {
        for p in places {
            if !self.is_place(p.as_str()) {
                return Err(ModelError::NotASubset(p.clone()));
            }
        }
        for t in transitions {
            if !self.is_transition(t.as_str()) {
                return Err(ModelError::NotASubset(t.clone()));
            }
        }
        Ok(self.restrict(places, transitions))
    }

    /// Like [`PetriNet::subnet`] but takes one mixed node set.
    pub fn induced(&self, nodes: &NodeSet) -> Result<PetriNet, ModelError> {
        let mut places = NodeSet::new();
        let mut transitions = NodeSet::new();
        for n in nodes {
            match self.kind(n.as_str()) {
                Some(NodeKind::Place) => places.insert(n.clone()),
                Some(NodeKind::Transition) => transitions.insert(n.clone()),
                None => return Err(ModelError::NotASubset(n.clone())),
            };
        }
        Ok(self.restrict(&places, &transitions))
    }

    pub(crate) fn restrict(&self, places: &NodeSet, transitions: &NodeSet) -> PetriNet {
        let places_v: Vec<NodeId> = places.iter().cloned().collect();
        let trans_v: Vec<NodeId> = transitions.iter().cloned().collect();
        let mut index = HashMap::with_capacity(places_v.len() + trans_v.len());
        for (i, p) in places_v.iter().enumerate() {
            index.insert(p.clone(), Node::Place(i));
        }
        for (i, t) in trans_v.iter().enumerate() {
            index.insert(t.clone(), Node::Transition(i));
        }
        let mut arcs = BTreeMap::new();
        for t in &trans_v {
            let Some(Node::Transition(orig)) = self.index.get(t).copied() else {
                continue;
            };
            for &(p, w) in &self.adj.trans_pre[orig] {
                let pid = &self.places[p];
                if places.contains(pid) {
                    arcs.insert((pid.clone(), t.clone()), w);
                }
            }
            for &(p, w) in &self.adj.trans_post[orig] {
                let pid = &self.places[p];
                if places.contains(pid) {
                    arcs.insert((t.clone(), pid.clone()), w);
                }
            }
        }
        Self::assemble(self.name.clone(), places_v, trans_v, index, arcs)
    }

    /// `self ⊆ net`: node sets are subsets and the flow of `self` is exactly
    /// the flow of `net` restricted to the retained nodes. Names are ignored.
    pub fn is_subnet_of(&self, net: &PetriNet) -> bool {
        let places_ok = self.places.iter().all(|p| net.is_place(p.as_str()));
        let trans_ok = self
            .transitions
            .iter()
            .all(|t| net.is_transition(t.as_str()));
        if !(places_ok && trans_ok) {
            return false;
        }
        let places: NodeSet = self.places.iter().cloned().collect();
        let transitions: NodeSet = self.transitions.iter().cloned().collect();
        net.restrict(&places, &transitions).arcs == self.arcs
    }

    fn node(&self, id: &str) -> Result<Node, ModelError> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| ModelError::UnknownNode(NodeId::from(id)))
    }

    fn ids_of_places(&self, list: &[(usize, u32)]) -> NodeSet {
        list.iter().map(|&(i, _)| self.places[i].clone()).collect()
    }

    fn ids_of_transitions(&self, list: &[(usize, u32)]) -> NodeSet {
        list.iter()
            .map(|&(i, _)| self.transitions[i].clone())
            .collect()
    }

    // Dense-index accessors used by the algorithms.

    pub(crate) fn place_index(&self, id: &str) -> Option<usize> {
        match self.index.get(id) {
            Some(Node::Place(i)) => Some(*i),
            _ => None,
        }
    }

    pub(crate) fn transition_index(&self, id: &str) -> Option<usize> {
        match self.index.get(id) {
            Some(Node::Transition(i)) => Some(*i),
            _ => None,
        }
    }

    pub(crate) fn place_pre(&self, p: usize) -> &[(usize, u32)] {
        &self.adj.place_pre[p]
    }

    pub(crate) fn place_post(&self, p: usize) -> &[(usize, u32)] {
        &self.adj.place_post[p]
    }

    pub(crate) fn trans_pre(&self, t: usize) -> &[(usize, u32)] {
        &self.adj.trans_pre[t]
    }

    pub(crate) fn trans_post(&self, t: usize) -> &[(usize, u32)] {
        &self.adj.trans_post[t]
    }

    /// `F(p, t)` over dense indices, 0 when absent.
    pub(crate) fn input_weight(&self, p: usize, t: usize) -> u32 {
        lookup(&self.adj.trans_pre[t], p)
    }

    /// `F(t, p)` over dense indices, 0 when absent.
    pub(crate) fn output_weight(&self, t: usize, p: usize) -> u32 {
        lookup(&self.adj.trans_post[t], p)
    }
}

fn lookup(list: &[(usize, u32)], key: usize) -> u32 {
    list.binary_search_by_key(&key, |&(i, _)| i)
        .map(|pos| list[pos].1)
        .unwrap_or(0)
}

/// Token counts per place. Places without an entry hold 0 tokens.
///
/// Equality is extensional with absent = 0, so `{p1: 0}` equals `{}`.
/// [`Marking::is_defined`] still tells the two apart, which is what
/// restriction `M|Q` needs.
#[derive(Clone, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Marking(BTreeMap<NodeId, u64>);

impl Marking {
    pub fn new() -> Self {
        Marking(BTreeMap::new())
    }

    pub fn get(&self, place: &str) -> u64 {
        self.0.get(place).copied().unwrap_or(0)
    }

    pub fn set(&mut self, place: impl Into<NodeId>, tokens: u64) {
        self.0.insert(place.into(), tokens);
    }

    pub fn is_defined(&self, place: &str) -> bool {
        self.0.contains_key(place)
    }

    /// Entries in id order, zero entries included.
    pub fn iter(&self) -> impl Iterator<Item = (&NodeId, u64)> + '_ {
        self.0.iter().map(|(p, &n)| (p, n))
    }

    /// Places carrying at least one token.
    pub fn marked_places(&self) -> NodeSet {
        self.0
            .iter()
            .filter(|(_, &n)| n > 0)
            .map(|(p, _)| p.clone())
            .collect()
    }

    pub fn total_tokens(&self) -> u64 {
        self.0.values().sum()
    }

    /// `M|Q`: entries for places in `q` only; zero entries stay defined.
    pub fn restrict(&self, q: &NodeSet) -> Marking {
        Marking(
            self.0
                .iter()
                .filter(|(p, _)| q.contains(*p))
                .map(|(p, &n)| (p.clone(), n))
                .collect(),
        )
    }

    pub fn defined_places(&self) -> impl Iterator<Item = &NodeId> + '_ {
        self.0.keys()
    }

    /// Dense vector over `net`'s place order.
    pub(crate) fn to_dense(&self, net: &PetriNet) -> Vec<u64> {
        net.places().iter().map(|p| self.get(p.as_str())).collect()
    }
}

impl PartialEq for Marking {
    fn eq(&self, other: &Self) -> bool {
        let nonzero = |m: &Marking| -> Vec<(NodeId, u64)> {
            m.0.iter()
                .filter(|(_, &n)| n > 0)
                .map(|(p, &n)| (p.clone(), n))
                .collect()
        };
        nonzero(self) == nonzero(other)
    }
}

impl Eq for Marking {}

impl fmt::Debug for Marking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.0.iter()).finish()
    }
}

impl<K: Into<NodeId>> FromIterator<(K, u64)> for Marking {
    fn from_iter<I: IntoIterator<Item = (K, u64)>>(iter: I) -> Self {
        Marking(iter.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }
}

/// A net together with a marking whose keys are places of the net.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedPetriNet {
    net: PetriNet,
    marking: Marking,
}

impl MarkedPetriNet {
    pub fn new(net: PetriNet, marking: Marking) -> Result<Self, ModelError> {
        if let Some(p) = marking.defined_places().find(|p| !net.is_place(p.as_str())) {
            return Err(ModelError::MarkingOutsideNet(p.clone()));
        }
        Ok(MarkedPetriNet { net, marking })
    }

    /// Net with the all-zero marking.
    pub fn unmarked(net: PetriNet) -> Self {
        MarkedPetriNet {
            net,
            marking: Marking::new(),
        }
    }

    pub fn net(&self) -> &PetriNet {
        &self.net
    }

    pub fn marking(&self) -> &Marking {
        &self.marking
    }

    pub fn into_parts(self) -> (PetriNet, Marking) {
        (self.net, self.marking)
    }

    /// The induced subnet over `nodes` with the marking restricted to its places.
    pub fn restrict_to(&self, nodes: &NodeSet) -> Result<MarkedPetriNet, ModelError> {
        let net = self.net.induced(nodes)?;
        let places: NodeSet = net.places().iter().cloned().collect();
        let marking = self.marking.restrict(&places);
        Ok(MarkedPetriNet { net, marking })
    }
}

/// Counts used in reports: places, transitions, arcs and tokens.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetSizes {
    pub places: usize,
    pub transitions: usize,
    pub arcs: usize,
    pub tokens: u64,
}

impl NetSizes {
    pub fn of(s: &MarkedPetriNet) -> Self {
        NetSizes {
            places: s.net.places().len(),
            transitions: s.net.transitions().len(),
            arcs: s.net.arc_count(),
            tokens: s.marking.total_tokens(),
        }
    }

    /// `|P| + |T|`.
    pub fn total(&self) -> usize {
        self.places + self.transitions
    }
}
