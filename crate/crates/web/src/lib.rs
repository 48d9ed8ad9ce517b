//! Browser demo: slice a PNML net and draw the result. See `www/index.html`.
//!
//! The exported functions take and return strings so the page needs no glue
//! beyond what `wasm-bindgen --target web` generates.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use serde::Serialize;
use wasm_bindgen::prelude::*;

use pnslice::io::{export_dot, parse_pnml, write_pnml};
use pnslice::slicer::{slice, Algorithm};
use pnslice::{fixtures, generate, MarkedPetriNet, NodeId, NodeKind, NodeSet};

#[derive(Serialize)]
struct Outcome {
    net: String,
    algorithm: &'static str,
    nodes: Vec<String>,
    reduction: String,
    notes: Vec<String>,
    svg: String,
    dot: String,
    pnml: String,
}

fn parse_criterion(s: &MarkedPetriNet, text: &str) -> Result<NodeSet, String> {
    let q: NodeSet = text
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(NodeId::new)
        .collect();
    match q.iter().find(|p| !s.net().is_place(p.as_str())) {
        Some(p) => Err(format!("`{p}` is not a place of the net")),
        None => Ok(q),
    }
}

/// Slices `pnml` and returns a JSON object with the kept nodes, the reduction
/// label, notes, an SVG drawing of the whole net with the slice highlighted,
/// and the slice as DOT and PNML.
pub fn slice_json(pnml: &str, criterion: &str, algorithm: &str) -> Result<String, String> {
    let s = parse_pnml(pnml.as_bytes()).map_err(|e| e.to_string())?;
    let q = parse_criterion(&s, criterion)?;
    let a: Algorithm = algorithm.parse().map_err(|e| format!("{e}"))?;
    let r = slice(a, &s, &q).map_err(|e| e.to_string())?;
    let kept = r.nodes();
    let out = Outcome {
        net: s.net().name().to_owned(),
        algorithm: a.display_name(),
        nodes: kept.iter().map(|n| n.as_str().to_owned()).collect(),
        reduction: r.reduction_label(),
        notes: r.notes.iter().map(ToString::to_string).collect(),
        svg: svg(&s, &kept, &q),
        dot: export_dot(&r.subnet, Some(&q)),
        pnml: write_pnml(&r.subnet),
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

/// One bundled example net as PNML: `net_a`, `net_b`, `ring`, or a desk
/// corpus net by name such as `mutex8`.
pub fn example(name: &str) -> Result<String, String> {
    let s = match name {
        "net_a" => fixtures::net_a(),
        "net_b" => fixtures::net_b(),
        "net_dead" => fixtures::net_dead(),
        "ring" => fixtures::ring(),
        other => generate::desk_corpus()
            .into_iter()
            .find(|s| s.net().name() == other)
            .ok_or_else(|| format!("no example named `{other}`"))?,
    };
    Ok(write_pnml(&s))
}

const COL: f64 = 90.0;
const ROW: f64 = 60.0;
const MARGIN: f64 = 40.0;

/// Layered drawing: nodes are ranked by breadth-first distance from the
/// marked places and sources, then stacked in columns.
fn layers(s: &MarkedPetriNet) -> BTreeMap<NodeId, (usize, usize)> {
    let net = s.net();
    let mut rank: BTreeMap<NodeId, usize> = BTreeMap::new();
    let mut queue = VecDeque::new();
    let seed = |id: &NodeId, queue: &mut VecDeque<NodeId>, rank: &mut BTreeMap<NodeId, usize>| {
        if !rank.contains_key(id) {
            rank.insert(id.clone(), 0);
            queue.push_back(id.clone());
        }
    };
    for p in s.marking().marked_places() {
        seed(&p, &mut queue, &mut rank);
    }
    for t in net.transitions() {
        if net
            .preset(t.as_str())
            .map(|p| p.is_empty())
            .unwrap_or(false)
        {
            seed(t, &mut queue, &mut rank);
        }
    }
    let all: Vec<NodeId> = net
        .places()
        .iter()
        .chain(net.transitions())
        .cloned()
        .collect();
    let mut next_unranked = all.iter();
    loop {
        while let Some(id) = queue.pop_front() {
            let r = rank[&id];
            for succ in net.postset(id.as_str()).unwrap_or_default() {
                if !rank.contains_key(&succ) {
                    rank.insert(succ.clone(), r + 1);
                    queue.push_back(succ);
                }
            }
        }
        match next_unranked.find(|id| !rank.contains_key(*id)) {
            Some(id) => seed(id, &mut queue, &mut rank),
            None => break,
        }
    }
    let mut rows: BTreeMap<usize, usize> = BTreeMap::new();
    rank.into_iter()
        .map(|(id, r)| {
            let row = rows.entry(r).or_default();
            *row += 1;
            (id, (r, *row - 1))
        })
        .collect()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// SVG of `s` with `kept` drawn solid and everything else faded.
pub fn svg(s: &MarkedPetriNet, kept: &NodeSet, q: &NodeSet) -> String {
    let net = s.net();
    let pos = layers(s);
    let xy = |id: &NodeId| {
        let (c, r) = pos[id];
        (MARGIN + c as f64 * COL, MARGIN + r as f64 * ROW)
    };
    let cols = pos.values().map(|&(c, _)| c + 1).max().unwrap_or(0);
    let rows = pos.values().map(|&(_, r)| r + 1).max().unwrap_or(0);
    let (w, h) = (
        2.0 * MARGIN + cols as f64 * COL,
        2.0 * MARGIN + rows as f64 * ROW,
    );
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" font-family=\"sans-serif\" font-size=\"11\">\n\
         <defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" markerWidth=\"6\" markerHeight=\"6\" orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\"/></marker></defs>\n"
    );
    let opacity = |a: &NodeId, b: Option<&NodeId>| {
        if kept.contains(a) && b.is_none_or(|b| kept.contains(b)) {
            "1"
        } else {
            "0.2"
        }
    };
    for (from, to, weight) in net.arcs() {
        let ((x1, y1), (x2, y2)) = (xy(from), xy(to));
        let (dx, dy) = (x2 - x1, y2 - y1);
        let len = (dx * dx + dy * dy).sqrt().max(1.0);
        let (ux, uy) = (dx / len * 16.0, dy / len * 16.0);
        let _ = writeln!(
            out,
            "<line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"black\" marker-end=\"url(#arrow)\" opacity=\"{}\"/>",
            x1 + ux,
            y1 + uy,
            x2 - ux,
            y2 - uy,
            opacity(from, Some(to))
        );
        if weight > 1 {
            let _ = writeln!(
                out,
                "<text x=\"{:.1}\" y=\"{:.1}\">{weight}</text>",
                x1 + dx / 2.0,
                y1 + dy / 2.0 - 3.0
            );
        }
    }
    for id in net.places().iter().chain(net.transitions()) {
        let (x, y) = xy(id);
        let op = opacity(id, None);
        match net.kind(id.as_str()) {
            Some(NodeKind::Place) => {
                let fill = if q.contains(id) { "#ffd28a" } else { "white" };
                let _ = writeln!(
                    out,
                    "<circle cx=\"{x}\" cy=\"{y}\" r=\"15\" fill=\"{fill}\" stroke=\"black\" opacity=\"{op}\"/>"
                );
                let tokens = s.marking().get(id.as_str());
                if tokens > 0 {
                    let _ = writeln!(out, "<text x=\"{x}\" y=\"{}\" text-anchor=\"middle\" opacity=\"{op}\">{tokens}</text>", y + 4.0);
                }
            }
            _ => {
                let _ = writeln!(
                    out,
                    "<rect x=\"{}\" y=\"{}\" width=\"10\" height=\"30\" fill=\"black\" opacity=\"{op}\"/>",
                    x - 5.0,
                    y - 15.0
                );
            }
        }
        let _ = writeln!(
            out,
            "<text x=\"{x}\" y=\"{}\" text-anchor=\"middle\" opacity=\"{op}\">{}</text>",
            y + 28.0,
            escape(id.as_str())
        );
    }
    out.push_str("</svg>\n");
    out
}

#[wasm_bindgen]
pub fn slice_net(pnml: &str, criterion: &str, algorithm: &str) -> Result<String, JsValue> {
    slice_json(pnml, criterion, algorithm).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn example_net(name: &str) -> Result<String, JsValue> {
    example(name).map_err(|e| JsValue::from_str(&e))
}

/// Display names of the algorithms, tab-separated as `tag\tname` lines.
#[wasm_bindgen]
pub fn algorithms() -> String {
    Algorithm::ALL
        .iter()
        .map(|a| format!("{}\t{}", a.tag(), a.display_name()))
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slices_net_b() {
        let pnml = example("net_b").unwrap();
        let out: serde_json::Value =
            serde_json::from_str(&slice_json(&pnml, "p3", "minimal").unwrap()).unwrap();
        assert_eq!(out["nodes"], serde_json::json!(["p1", "p3", "t1"]));
        assert_eq!(out["reduction"], "40.00");
        assert!(out["svg"].as_str().unwrap().starts_with("<svg"));
        assert!(out["dot"].as_str().unwrap().starts_with("digraph"));
    }

    #[test]
    fn errors_are_messages() {
        let pnml = example("net_b").unwrap();
        assert!(slice_json(&pnml, "zz", "minimal")
            .unwrap_err()
            .contains("zz"));
        assert!(slice_json(&pnml, "p3", "fastest").is_err());
        assert!(slice_json("<pnml", "p3", "minimal").is_err());
        assert!(example("nope").is_err());
    }

    #[test]
    fn every_node_is_drawn() {
        for name in ["ring", "mutex8", "workflow4x6"] {
            let s = parse_pnml(example(name).unwrap().as_bytes()).unwrap();
            let picture = svg(&s, &s.net().nodes(), &NodeSet::new());
            let shapes = picture.matches("<circle").count() + picture.matches("<rect").count();
            assert_eq!(shapes, s.net().size(), "{name}");
        }
    }
}
