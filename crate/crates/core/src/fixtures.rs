//! Small hand-built nets used by tests, the CLI golden files and the demo.

use crate::model::{Arc, MarkedPetriNet, Marking, PetriNet};

fn marked(net: PetriNet, tokens: &[(&str, u64)]) -> MarkedPetriNet {
    let marking: Marking = tokens.iter().map(|&(p, n)| (p, n)).collect();
    MarkedPetriNet::new(net, marking).expect("fixture marking fits its net")
}

/// `p1 → t1 → p2`, with one token in `p1`.
pub fn net_a() -> MarkedPetriNet {
    let net = PetriNet::new(
        "NetA",
        ["p1", "p2"],
        ["t1"],
        [Arc::new("p1", "t1"), Arc::new("t1", "p2")],
    )
    .expect("valid fixture");
    marked(net, &[("p1", 1)])
}

/// `p1 → t1 → p3` and `p2 → t2 → p3`, with one token in `p1`.
pub fn net_b() -> MarkedPetriNet {
    let net = PetriNet::new(
        "NetB",
        ["p1", "p2", "p3"],
        ["t1", "t2"],
        [
            Arc::new("p1", "t1"),
            Arc::new("t1", "p3"),
            Arc::new("p2", "t2"),
            Arc::new("t2", "p3"),
        ],
    )
    .expect("valid fixture");
    marked(net, &[("p1", 1)])
}

/// `p1 → t1 → p2` without any token.
pub fn net_dead() -> MarkedPetriNet {
    let net = net_a().net().renamed("NetDead");
    MarkedPetriNet::unmarked(net)
}

/// The strongly connected ring `p1 → t1 → p2 → t2 → p1` with one token in `p1`.
///
/// The minimal slice for `{p2}` is `p1 → t1 → p2`, which is not strongly
/// connected any more.
pub fn ring() -> MarkedPetriNet {
    let net = PetriNet::new(
        "Ring",
        ["p1", "p2"],
        ["t1", "t2"],
        [
            Arc::new("p1", "t1"),
            Arc::new("t1", "p2"),
            Arc::new("p2", "t2"),
            Arc::new("t2", "p1"),
        ],
    )
    .expect("valid fixture");
    marked(net, &[("p1", 1)])
}

/// A linear chain `p0 → t0 → p1 → … → t{n-1} → pn` with one token in `p0`.
/// Ids are zero-padded so that id order follows the chain.
pub fn chain(transitions: usize) -> MarkedPetriNet {
    let width = transitions.to_string().len().max(1);
    let place = |i: usize| format!("p{i:0width$}");
    let trans = |i: usize| format!("t{i:0width$}");
    let places: Vec<String> = (0..=transitions).map(place).collect();
    let trs: Vec<String> = (0..transitions).map(trans).collect();
    let arcs = (0..transitions).flat_map(|i| {
        [
            Arc::new(place(i), trans(i)),
            Arc::new(trans(i), place(i + 1)),
        ]
    });
    let net = PetriNet::new(format!("chain{transitions}"), places, trs, arcs).expect("valid chain");
    let first = place(0);
    marked(net, &[(first.as_str(), 1)])
}
