//! Graphviz rendering.

use std::fmt::Write as _;

use crate::model::{MarkedPetriNet, NodeSet};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Places are circles labelled with their tokens (ids as external labels),
/// transitions are boxes. Arcs of weight above 1 carry the weight. Nodes in
/// `highlight` are shaded.
pub fn export_dot(s: &MarkedPetriNet, highlight: Option<&NodeSet>) -> String {
    let net = s.net();
    let lit = |id: &str| highlight.is_some_and(|h| h.contains(id));
    let style = |id: &str| {
        if lit(id) {
            ", style=filled, fillcolor=gray80"
        } else {
            ""
        }
    };
    let mut out = format!("digraph {} {{\n", quote(net.name()));
    for p in net.places() {
        let tokens = s.marking().get(p.as_str());
        let label = if tokens == 0 {
            String::new()
        } else {
            tokens.to_string()
        };
        let _ = writeln!(
            out,
            "  {} [shape=circle, label={}, xlabel={}{}];",
            quote(p.as_str()),
            quote(&label),
            quote(p.as_str()),
            style(p.as_str())
        );
    }
    for t in net.transitions() {
        let _ = writeln!(
            out,
            "  {} [shape=box, label={}{}];",
            quote(t.as_str()),
            quote(t.as_str()),
            style(t.as_str())
        );
    }
    for (a, b, w) in net.arcs() {
        let label = if w > 1 {
            format!(" [label=\"{w}\"]")
        } else {
            String::new()
        };
        let _ = writeln!(
            out,
            "  {} -> {}{};",
            quote(a.as_str()),
            quote(b.as_str()),
            label
        );
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::net_a;
    use crate::model::{node_set, PetriNet};

    #[test]
    fn net_a_shape() {
        let dot = export_dot(&net_a(), None);
        assert_eq!(dot.matches("shape=circle").count(), 2);
        assert_eq!(dot.matches("shape=box").count(), 1);
        assert_eq!(dot.matches(" -> ").count(), 2);
        assert!(dot.contains("\"p1\" [shape=circle, label=\"1\""));
        assert!(!dot.contains("style"));
    }

    #[test]
    fn empty_and_highlighted() {
        let empty = MarkedPetriNet::unmarked(PetriNet::empty("E"));
        assert_eq!(export_dot(&empty, None), "digraph \"E\" {\n}\n");
        let dot = export_dot(&net_a(), Some(&node_set(["t1"])));
        assert_eq!(dot.matches("style=filled").count(), 1);
        assert!(!export_dot(&net_a(), Some(&NodeSet::new())).contains("style"));
    }
}
