//! The five slicers and the report type they share.
//!
//! * [`maximal`]: backward closure to the criterion, then forward closure from
//!   the initially marked part. Keeps every contributing computation.
//! * [`minimal`]: branching backward exploration of contributing paths, then
//!   the smallest forward-closed candidate that still increases the criterion.
//! * [`reference`]: Rakow's CTL\*₋ₓ and safety slicing, and the Yu et al.
//!   dependency-graph slicer.

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{MarkedPetriNet, Marking, ModelError, NetSizes, NodeId, NodeSet};

pub mod maximal;
pub mod minimal;
pub mod reference;

pub use maximal::{backward_slice, forward_slice, slice_maximal, BackwardSlice};
pub use minimal::{
    backward_slices_all, filter_slices, forward_close, slice_minimal, slice_minimal_with,
    BranchBudget, CandidateSlice, MinimalConfig,
};
pub use reference::{is_reading, slice_rakow_ctl, slice_rakow_safety, slice_yu, Sdg};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SliceError {
    #[error("`{0}` is not a place of the net")]
    UnknownPlace(NodeId),
    #[error(
        "backward branching exceeded its budget ({expansions} expansions, {candidates} candidates)"
    )]
    BranchBudgetExceeded {
        expansions: usize,
        candidates: usize,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// The slicing algorithms, numbered as in the CLI's output files.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Minimal,
    Maximal,
    RakowCtl,
    Yu,
    RakowSafety,
}

impl Algorithm {
    /// All algorithms in report order.
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Minimal,
        Algorithm::Maximal,
        Algorithm::RakowCtl,
        Algorithm::Yu,
        Algorithm::RakowSafety,
    ];

    /// The `<N>` in `output/<NAME>_<N>.pnml`.
    pub fn output_number(self) -> usize {
        match self {
            Algorithm::Minimal => 1,
            Algorithm::Maximal => 2,
            Algorithm::RakowCtl => 3,
            Algorithm::Yu => 4,
            Algorithm::RakowSafety => 5,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Algorithm::Minimal => "minimal",
            Algorithm::Maximal => "maximal",
            Algorithm::RakowCtl => "rakow_ctl",
            Algorithm::Yu => "yu",
            Algorithm::RakowSafety => "rakow_safety",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            Algorithm::Minimal => "Minimal slicing",
            Algorithm::Maximal => "Maximal slicing",
            Algorithm::RakowCtl => "Rakow's CTL slicing",
            Algorithm::Yu => "Yu et al's slicing",
            Algorithm::RakowSafety => "Rakow's safety slicing",
        }
    }

    /// Comparison slicers reconstructed from published descriptions.
    pub fn is_reference(self) -> bool {
        matches!(
            self,
            Algorithm::RakowCtl | Algorithm::Yu | Algorithm::RakowSafety
        )
    }

    /// Whether the initial marking is taken into account.
    pub fn is_dynamic(self) -> bool {
        !matches!(self, Algorithm::RakowCtl | Algorithm::RakowSafety)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown algorithm `{0}` (expected minimal, maximal, rakow_ctl, yu or rakow_safety)")]
pub struct UnknownAlgorithm(pub String);

impl FromStr for Algorithm {
    type Err = UnknownAlgorithm;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        Algorithm::ALL
            .into_iter()
            .find(|a| a.tag().eq_ignore_ascii_case(s) || a.output_number().to_string() == s)
            .ok_or_else(|| UnknownAlgorithm(s.to_owned()))
    }
}

/// `⟨M0, Q⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlicingCriterion {
    pub m0: Marking,
    pub q: NodeSet,
}

/// Something worth reporting about how a slice was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SliceNote {
    /// No candidate survived filtering; the slice is empty.
    NoContributingCandidate,
    /// The net has weighted arcs, so the minimal slicer's size is not a proven minimum.
    MinimalityNotGuaranteed,
    /// No candidate could be shown to increase the criterion; the maximal slice was returned.
    FellBackToMaximal,
}

impl fmt::Display for SliceNote {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SliceNote::NoContributingCandidate => {
                "no contributing candidate survived filtering; the slice is empty"
            }
            SliceNote::MinimalityNotGuaranteed => {
                "the net is not ordinary; minimality is not guaranteed"
            }
            SliceNote::FellBackToMaximal => {
                "no candidate provably increases the criterion; returned the maximal slice"
            }
        })
    }
}

/// Per-dimension reduction in percent.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Reduction {
    pub places: f64,
    pub transitions: f64,
    pub arcs: f64,
    pub tokens: f64,
    /// Over `|P| + |T|`.
    pub total: f64,
}

/// `100·(before − after)/before`, 0 when `before` is 0.
pub fn reduction_pct(before: u64, after: u64) -> f64 {
    if before == 0 {
        0.0
    } else {
        100.0 * (before as f64 - after as f64) / before as f64
    }
}

/// The same percentage rounded half-up to two decimals, computed exactly.
pub fn format_reduction(before: u64, after: u64) -> String {
    if before == 0 {
        return "0.00".to_owned();
    }
    // hundredths = round(10000·(b − a)/b), half-up.
    let num = 10_000u128 * u128::from(before - after.min(before));
    let b = u128::from(before);
    let hundredths = (2 * num + b) / (2 * b);
    format!("{}.{:02}", hundredths / 100, hundredths % 100)
}

/// A slice together with its provenance.
#[derive(Clone, Debug)]
pub struct SliceResult {
    pub algorithm: Algorithm,
    /// The extracted subnet with `M0` restricted to its places.
    pub subnet: MarkedPetriNet,
    pub criterion: SlicingCriterion,
    pub before: NetSizes,
    pub after: NetSizes,
    pub runtime: Duration,
    /// Transitions processed by the maximal slicer, when instrumented.
    pub transition_visits: Option<usize>,
    pub notes: Vec<SliceNote>,
}

impl SliceResult {
    pub(crate) fn build(
        algorithm: Algorithm,
        original: &MarkedPetriNet,
        q: &NodeSet,
        nodes: &NodeSet,
        runtime: Duration,
    ) -> Result<SliceResult, SliceError> {
        let subnet = original.restrict_to(nodes)?;
        Ok(SliceResult {
            algorithm,
            before: NetSizes::of(original),
            after: NetSizes::of(&subnet),
            subnet,
            criterion: SlicingCriterion {
                m0: original.marking().clone(),
                q: q.clone(),
            },
            runtime,
            transition_visits: None,
            notes: Vec::new(),
        })
    }

    /// All places and transitions of the slice.
    pub fn nodes(&self) -> NodeSet {
        self.subnet.net().nodes()
    }

    pub fn size(&self) -> usize {
        self.subnet.net().size()
    }

    pub fn reduction(&self) -> Reduction {
        let (b, a) = (self.before, self.after);
        Reduction {
            places: reduction_pct(b.places as u64, a.places as u64),
            transitions: reduction_pct(b.transitions as u64, a.transitions as u64),
            arcs: reduction_pct(b.arcs as u64, a.arcs as u64),
            tokens: reduction_pct(b.tokens, a.tokens),
            total: reduction_pct(b.total() as u64, a.total() as u64),
        }
    }

    /// Total reduction as printed in reports, e.g. `"40.00"`.
    pub fn reduction_label(&self) -> String {
        format_reduction(self.before.total() as u64, self.after.total() as u64)
    }

    pub fn runtime_ms(&self) -> f64 {
        self.runtime.as_secs_f64() * 1000.0
    }
}

/// Places of `q` as dense indices, rejecting ids that are not places.
pub(crate) fn criterion_indices(s: &MarkedPetriNet, q: &NodeSet) -> Result<Vec<usize>, SliceError> {
    q.iter()
        .map(|p| {
            s.net()
                .place_index(p.as_str())
                .ok_or_else(|| SliceError::UnknownPlace(p.clone()))
        })
        .collect()
}

/// Runs one algorithm with default settings.
pub fn slice(
    algorithm: Algorithm,
    s: &MarkedPetriNet,
    q: &NodeSet,
) -> Result<SliceResult, SliceError> {
    match algorithm {
        Algorithm::Minimal => slice_minimal(s, q),
        Algorithm::Maximal => slice_maximal(s, q),
        Algorithm::RakowCtl => slice_rakow_ctl(s.net(), q).map(|r| r.with_marking(s)),
        Algorithm::Yu => slice_yu(s, q),
        Algorithm::RakowSafety => slice_rakow_safety(s.net(), q).map(|r| r.with_marking(s)),
    }
}

impl SliceResult {
    /// Re-attaches `s`'s marking to a slice computed on the bare net.
    pub fn with_marking(mut self, s: &MarkedPetriNet) -> SliceResult {
        let places: NodeSet = self.subnet.net().places().iter().cloned().collect();
        let marking = s.marking().restrict(&places);
        let net = self.subnet.net().clone();
        self.subnet = MarkedPetriNet::new(net, marking).expect("restricted marking fits");
        self.before = NetSizes::of(s);
        self.after = NetSizes::of(&self.subnet);
        self.criterion.m0 = s.marking().clone();
        self
    }
}
