//! LoLA low-level net format (export only).

use std::fmt::Write as _;

use super::{transliterate, IoError};
use crate::model::MarkedPetriNet;

// Characters with a meaning in LoLA's net grammar.
fn lola_id(id: &str) -> String {
    id.chars()
        .map(|c| {
            if c.is_whitespace() || ",;:(){}\"'/".contains(c) {
                '_'
            } else {
                c
            }
        })
        .collect()
}

pub fn export_lola(s: &MarkedPetriNet) -> Result<String, IoError> {
    let net = s.net();
    let names = transliterate(
        net.places()
            .iter()
            .chain(net.transitions())
            .map(|n| n.as_str()),
        lola_id,
    )?;
    let name = |id: &str| names[id].clone();
    let list = |items: Vec<String>| items.join(", ");

    let mut out = String::new();
    let places: Vec<String> = net.places().iter().map(|p| name(p.as_str())).collect();
    let _ = writeln!(out, "PLACE {};\n", list(places));
    let marked: Vec<String> = net
        .places()
        .iter()
        .filter_map(|p| {
            let n = s.marking().get(p.as_str());
            (n > 0).then(|| format!("{}: {n}", name(p.as_str())))
        })
        .collect();
    let _ = writeln!(out, "MARKING {};", list(marked));
    for t in net.transitions() {
        let arcs = |set: crate::model::NodeSet, inbound: bool| -> Vec<String> {
            set.iter()
                .map(|p| {
                    let w = if inbound {
                        net.weight(p.as_str(), t.as_str())
                    } else {
                        net.weight(t.as_str(), p.as_str())
                    };
                    format!("{}: {}", name(p.as_str()), w.unwrap_or(0))
                })
                .collect()
        };
        let consume = arcs(net.preset(t.as_str()).expect("own transition"), true);
        let produce = arcs(net.postset(t.as_str()).expect("own transition"), false);
        let _ = write!(
            out,
            "\nTRANSITION {}\n  CONSUME {};\n  PRODUCE {};\n",
            name(t.as_str()),
            list(consume),
            list(produce)
        );
    }
    Ok(out)
}
