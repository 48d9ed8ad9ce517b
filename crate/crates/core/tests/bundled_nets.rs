//! The PNML files under `corpus/` and `fixtures/` are regenerated by
//! `cargo run -p pnslice --example write_corpus`; they must not drift.

use std::fs;
use std::path::Path;

use pnslice::fixtures;
use pnslice::generate::desk_corpus;
use pnslice::io::{parse_pnml, write_pnml};
use pnslice::MarkedPetriNet;

fn root() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../.."))
}

fn assert_file(dir: &str, file: &str, s: &MarkedPetriNet) {
    let path = root().join(dir).join(file);
    let text = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(text, write_pnml(s), "{} is stale", path.display());
    assert_eq!(&parse_pnml(text.as_bytes()).unwrap(), s);
}

#[test]
fn corpus_matches_generators() {
    let nets = desk_corpus();
    assert_eq!(nets.len(), 5);
    for s in &nets {
        assert_file("corpus", &format!("{}.pnml", s.net().name()), s);
    }
    let on_disk = fs::read_dir(root().join("corpus")).unwrap().count();
    assert_eq!(on_disk, nets.len());
}

#[test]
fn fixtures_match() {
    assert_file("fixtures", "net_a.pnml", &fixtures::net_a());
    assert_file("fixtures", "net_b.pnml", &fixtures::net_b());
    assert_file("fixtures", "net_dead.pnml", &fixtures::net_dead());
    assert_file("fixtures", "ring.pnml", &fixtures::ring());
}
