//! PNML for place/transition nets, 2009 grammar.
//!
//! Pages are flattened. Graphics are skipped silently; tool-specific data and
//! any other unknown element is skipped with a warning.

use std::collections::HashSet;
use std::fmt::Write as _;

use log::warn;
use roxmltree::{Document, Node};

use super::IoError;
use crate::model::{Arc, MarkedPetriNet, Marking, PetriNet};

pub const PNML_NAMESPACE: &str = "http://www.pnml.org/version-2009/grammar/pnml";
pub const PTNET_TYPE: &str = "http://www.pnml.org/version-2009/grammar/ptnet";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Accept a net without places and transitions, as written for empty slices.
    pub allow_empty: bool,
}

/// Reads the first net of a PNML document.
pub fn parse_pnml(bytes: &[u8]) -> Result<MarkedPetriNet, IoError> {
    parse_pnml_with(bytes, ParseOptions::default())
}

pub fn parse_pnml_with(bytes: &[u8], options: ParseOptions) -> Result<MarkedPetriNet, IoError> {
    let text = std::str::from_utf8(bytes).map_err(|e| IoError::MalformedXml(e.to_string()))?;
    let doc = Document::parse(text).map_err(|e| IoError::MalformedXml(e.to_string()))?;
    let root = doc.root_element();
    if root.tag_name().name() != "pnml" {
        return Err(IoError::NotAPtNet(format!(
            "root element is <{}>, expected <pnml>",
            root.tag_name().name()
        )));
    }
    if root.tag_name().namespace() != Some(PNML_NAMESPACE) {
        warn!("PNML root is not in the 2009 grammar namespace; reading it anyway");
    }
    let mut nets = root.children().filter(|n| n.has_tag_name_local("net"));
    let net = nets
        .next()
        .ok_or_else(|| IoError::NotAPtNet("no <net> element".to_owned()))?;
    if nets.next().is_some() {
        warn!("PNML document holds several nets; only the first is read");
    }
    match net.attribute("type") {
        Some(t) if t.trim_end_matches('#').ends_with("ptnet") => {}
        Some(t) => return Err(IoError::NotAPtNet(format!("net type `{t}`"))),
        None => warn!("net has no type attribute; assuming a P/T net"),
    }

    let name = net
        .children()
        .find(|n| n.has_tag_name_local("name"))
        .and_then(label_text)
        .or_else(|| net.attribute("id").map(str::to_owned))
        .unwrap_or_default();

    let mut content = Content::default();
    for child in net.children().filter(Node::is_element) {
        match child.tag_name().name() {
            "page" => content.read_page(child)?,
            "name" | "graphics" => {}
            other => warn!("skipping <{other}> in <net>"),
        }
    }

    if content.places.is_empty() && content.transitions.is_empty() && !options.allow_empty {
        return Err(IoError::EmptyNet);
    }
    let pn = PetriNet::new(name, content.places, content.transitions, content.arcs)?;
    Ok(MarkedPetriNet::new(pn, content.marking)?)
}

trait LocalName {
    fn has_tag_name_local(&self, name: &str) -> bool;
}

impl LocalName for Node<'_, '_> {
    fn has_tag_name_local(&self, name: &str) -> bool {
        self.is_element() && self.tag_name().name() == name
    }
}

/// Text of `<x><text>…</text></x>`.
fn label_text(node: Node) -> Option<String> {
    node.children()
        .find(|n| n.has_tag_name_local("text"))
        .and_then(|t| t.text())
        .map(|s| s.trim().to_owned())
}

/// Numbers may carry a tool prefix such as `Default,2`.
fn number(node: Node, element: &str) -> Result<u64, IoError> {
    let text = label_text(node).unwrap_or_default();
    let value = text.rsplit(',').next().unwrap_or("").trim();
    value.parse().map_err(|_| IoError::BadNumber {
        element: element.to_owned(),
        text: text.clone(),
    })
}

#[derive(Default)]
struct Content {
    places: Vec<String>,
    transitions: Vec<String>,
    arcs: Vec<Arc>,
    marking: Marking,
}

fn required_id(node: Node) -> Result<String, IoError> {
    node.attribute("id")
        .map(str::to_owned)
        .ok_or_else(|| IoError::NotAPtNet(format!("<{}> without an id", node.tag_name().name())))
}

impl Content {
    fn read_page(&mut self, page: Node) -> Result<(), IoError> {
        for node in page.children().filter(Node::is_element) {
            match node.tag_name().name() {
                "page" => self.read_page(node)?,
                "place" => {
                    let id = required_id(node)?;
                    for child in node.children().filter(Node::is_element) {
                        match child.tag_name().name() {
                            "initialMarking" => {
                                let n = number(child, "initialMarking")?;
                                if n > 0 {
                                    self.marking.set(id.as_str(), n);
                                }
                            }
                            "name" | "graphics" => {}
                            other => warn!("skipping <{other}> in place `{id}`"),
                        }
                    }
                    self.places.push(id);
                }
                "transition" => {
                    let id = required_id(node)?;
                    for child in node.children().filter(Node::is_element) {
                        match child.tag_name().name() {
                            "name" | "graphics" => {}
                            other => warn!("skipping <{other}> in transition `{id}`"),
                        }
                    }
                    self.transitions.push(id);
                }
                "arc" => {
                    let get = |attr: &str| {
                        node.attribute(attr).map(str::to_owned).ok_or_else(|| {
                            IoError::NotAPtNet(format!("<arc> without a {attr} attribute"))
                        })
                    };
                    let (source, target) = (get("source")?, get("target")?);
                    let mut weight = 1u64;
                    for child in node.children().filter(Node::is_element) {
                        match child.tag_name().name() {
                            "inscription" => weight = number(child, "inscription")?,
                            "graphics" => {}
                            other => warn!("skipping <{other}> in arc {source} -> {target}"),
                        }
                    }
                    let weight = u32::try_from(weight).map_err(|_| IoError::BadNumber {
                        element: "inscription".to_owned(),
                        text: weight.to_string(),
                    })?;
                    self.arcs.push(Arc::weighted(source, target, weight));
                }
                "name" | "graphics" => {}
                other => warn!("skipping <{other}> in <page>"),
            }
        }
        Ok(())
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

// A fresh id, reserved so that later calls avoid it too.
fn fresh(taken: &mut HashSet<String>, base: &str) -> String {
    let mut id = base.to_owned();
    while taken.contains(&id) {
        id.insert(0, '_');
    }
    taken.insert(id.clone());
    id
}

/// Canonical PNML: ids in sorted order, weight-1 inscriptions and zero
/// markings left out. The net name doubles as the net id.
pub fn write_pnml(s: &MarkedPetriNet) -> String {
    let net = s.net();
    let mut taken: HashSet<String> = net
        .places()
        .iter()
        .chain(net.transitions())
        .map(|n| n.as_str().to_owned())
        .collect();
    let name = net.name();
    let net_id = fresh(&mut taken, if name.is_empty() { "net" } else { name });
    let page_id = fresh(&mut taken, "page0");

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(out, "<pnml xmlns=\"{PNML_NAMESPACE}\">");
    let _ = writeln!(
        out,
        "  <net id=\"{}\" type=\"{PTNET_TYPE}\">",
        escape(&net_id)
    );
    let _ = writeln!(
        out,
        "    <name>\n      <text>{}</text>\n    </name>",
        escape(name)
    );
    let _ = writeln!(out, "    <page id=\"{}\">", escape(&page_id));
    for p in net.places() {
        let tokens = s.marking().get(p.as_str());
        if tokens == 0 {
            let _ = writeln!(out, "      <place id=\"{}\"/>", escape(p.as_str()));
        } else {
            let _ = writeln!(
                out,
                "      <place id=\"{}\">\n        <initialMarking>\n          <text>{tokens}</text>\n        </initialMarking>\n      </place>",
                escape(p.as_str())
            );
        }
    }
    for t in net.transitions() {
        let _ = writeln!(out, "      <transition id=\"{}\"/>", escape(t.as_str()));
    }
    for (i, (a, b, w)) in net.arcs().enumerate() {
        let head = format!(
            "      <arc id=\"{}\" source=\"{}\" target=\"{}\"",
            escape(&fresh(&mut taken, &format!("arc{}", i + 1))),
            escape(a.as_str()),
            escape(b.as_str())
        );
        if w == 1 {
            let _ = writeln!(out, "{head}/>");
        } else {
            let _ = writeln!(
                out,
                "{head}>\n        <inscription>\n          <text>{w}</text>\n        </inscription>\n      </arc>"
            );
        }
    }
    out.push_str("    </page>\n  </net>\n</pnml>\n");
    out
}
