//! APT's labelled P/T net format (export only).

use std::fmt::Write as _;

use super::{transliterate, IoError};
use crate::model::MarkedPetriNet;

// APT identifiers are letters, digits and underscores, not starting with a digit.
fn apt_id(id: &str) -> String {
    let mut out: String = id
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect();
    if out.is_empty() || out.starts_with(|c: char| c.is_ascii_digit()) {
        out.insert(0, '_');
    }
    out
}

fn multiset(items: impl IntoIterator<Item = (String, u64)>) -> String {
    let parts: Vec<String> = items
        .into_iter()
        .map(|(p, n)| if n == 1 { p } else { format!("{n}*{p}") })
        .collect();
    format!("{{{}}}", parts.join(", "))
}

pub fn export_apt(s: &MarkedPetriNet) -> Result<String, IoError> {
    let net = s.net();
    let names = transliterate(
        net.places()
            .iter()
            .chain(net.transitions())
            .map(|n| n.as_str()),
        apt_id,
    )?;
    let name = |id: &str| names[id].clone();

    let mut out = String::new();
    let _ = writeln!(out, ".name \"{}\"", net.name().replace('"', "'"));
    out.push_str(".type LPN\n\n.places\n");
    for p in net.places() {
        let _ = writeln!(out, "{}", name(p.as_str()));
    }
    out.push_str("\n.transitions\n");
    for t in net.transitions() {
        let _ = writeln!(out, "{}[label=\"{}\"]", name(t.as_str()), name(t.as_str()));
    }
    out.push_str("\n.flows\n");
    for t in net.transitions() {
        let pre = net.preset(t.as_str()).expect("own transition");
        let post = net.postset(t.as_str()).expect("own transition");
        let consume = pre.iter().map(|p| {
            let w = net.weight(p.as_str(), t.as_str()).unwrap_or(0);
            (name(p.as_str()), u64::from(w))
        });
        let produce = post.iter().map(|p| {
            let w = net.weight(t.as_str(), p.as_str()).unwrap_or(0);
            (name(p.as_str()), u64::from(w))
        });
        let _ = writeln!(
            out,
            "{}: {} -> {}",
            name(t.as_str()),
            multiset(consume),
            multiset(produce)
        );
    }
    let marked = net.places().iter().filter_map(|p| {
        let n = s.marking().get(p.as_str());
        (n > 0).then(|| (name(p.as_str()), n))
    });
    let _ = writeln!(out, "\n.initial_marking {}", multiset(marked));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::net_a;
    use crate::model::{Arc, PetriNet};

    #[test]
    fn net_a_export() {
        let text = export_apt(&net_a()).unwrap();
        assert!(text.starts_with(".name \"NetA\"\n.type LPN\n"));
        assert!(text.contains(".places\np1\np2\n"));
        assert!(text.contains("t1: {p1} -> {p2}\n"));
        assert!(text.contains(".initial_marking {p1}\n"));
    }

    #[test]
    fn weights_and_names() {
        let net = PetriNet::new("w", ["1p"], ["t-x"], [Arc::weighted("t-x", "1p", 3)]).unwrap();
        let text =
            export_apt(&MarkedPetriNet::new(net, [("1p", 2)].into_iter().collect()).unwrap())
                .unwrap();
        assert!(text.contains("t_x: {} -> {3*_1p}"));
        assert!(text.contains(".initial_marking {2*_1p}"));
    }
}
