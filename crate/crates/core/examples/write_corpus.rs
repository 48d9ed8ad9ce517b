//! Regenerates `corpus/` and `fixtures/` at the workspace root.
//!
//! cargo run -p pnslice --example write_corpus

use std::fs;
use std::path::Path;

use pnslice::fixtures;
use pnslice::generate::desk_corpus;
use pnslice::io::write_pnml;
use pnslice::MarkedPetriNet;

fn write_all(dir: &Path, nets: &[(String, MarkedPetriNet)]) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    for (file, s) in nets {
        fs::write(dir.join(file), write_pnml(s))?;
    }
    Ok(())
}

fn main() -> std::io::Result<()> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    let corpus: Vec<_> = desk_corpus()
        .into_iter()
        .map(|s| (format!("{}.pnml", s.net().name()), s))
        .collect();
    write_all(&root.join("corpus"), &corpus)?;
    let fixed = [
        ("net_a", fixtures::net_a()),
        ("net_b", fixtures::net_b()),
        ("net_dead", fixtures::net_dead()),
        ("ring", fixtures::ring()),
    ]
    .map(|(f, s)| (format!("{f}.pnml"), s));
    write_all(&root.join("fixtures"), &fixed)?;
    println!(
        "wrote {} corpus nets and {} fixtures",
        corpus.len(),
        fixed.len()
    );
    Ok(())
}
