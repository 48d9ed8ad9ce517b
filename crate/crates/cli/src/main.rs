//! `pn_slicer`: slice a PNML net, benchmark a corpus or check a slice with
//! the brute-force oracles.

use std::env;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::Parser;
use serde::Serialize;

use pnslice::bench::{run_bench, BenchConfig};
use pnslice::io::{export_dot, parse_pnml, write_pnml};
use pnslice::oracles::{self, BRUTE_FORCE_CEILING};
use pnslice::properties::{preservation_report, PropertyId};
use pnslice::slicer::{slice, Algorithm, SliceError, SliceResult};
use pnslice::{MarkedPetriNet, NetSizes, NodeId, NodeSet};

const OUTPUT_ENV: &str = "PN_SLICER_OUTPUT";

/// Exit codes.
const EXIT_INPUT: u8 = 1;
const EXIT_UNKNOWN_PLACE: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_VERIFY_FAIL: u8 = 4;

#[derive(Debug)]
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn new(code: u8, error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code,
            error: error.into(),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Failure::new(EXIT_INPUT, error)
    }
}

fn slice_failure(e: SliceError) -> Failure {
    let code = match e {
        SliceError::UnknownPlace(_) => EXIT_UNKNOWN_PLACE,
        SliceError::BranchBudgetExceeded { .. } => EXIT_BUDGET,
        SliceError::Model(_) => EXIT_INPUT,
    };
    Failure::new(code, e)
}

#[derive(Parser, Debug)]
#[command(
    name = "pn_slicer",
    version,
    about = "Slice a PNML Petri net with respect to a set of places",
    after_help = "Other forms:\n  pn_slicer bench DIR [--runs N] [--seed S]\n  pn_slicer verify FILE CRITERION ALGORITHM [--depth D]"
)]
struct SliceArgs {
    /// PNML file of a P/T net.
    file: PathBuf,
    /// Comma-separated place ids, e.g. "P6,P9".
    criterion: String,
    /// One algorithm (minimal, maximal, rakow_ctl, yu, rakow_safety or 1-5),
    /// or a comma-separated list of properties the slices must keep.
    selector: Option<String>,
    /// Also write a JSON report.
    #[arg(long)]
    json: bool,
    /// Where slices are written [default: $PN_SLICER_OUTPUT or ./output].
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Parser, Debug)]
#[command(
    name = "pn_slicer bench",
    about = "Slice every net of a directory with random criteria"
)]
struct BenchArgs {
    dir: PathBuf,
    #[arg(long, default_value_t = 20)]
    runs: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Parser, Debug)]
#[command(
    name = "pn_slicer verify",
    about = "Check a slice against the brute-force oracles"
)]
struct VerifyArgs {
    file: PathBuf,
    criterion: String,
    algorithm: Algorithm,
    #[arg(long, default_value_t = oracles::DEFAULT_DEPTH)]
    depth: usize,
}

fn output_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| env::var_os(OUTPUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("output"))
}

fn load(path: &Path) -> Result<MarkedPetriNet, Failure> {
    let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_pnml(&bytes).map_err(|e| Failure::new(EXIT_INPUT, anyhow!("{}: {e}", path.display())))
}

fn parse_criterion(s: &MarkedPetriNet, text: &str) -> Result<NodeSet, Failure> {
    let ids: Vec<&str> = text
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .collect();
    if ids.is_empty() {
        return Err(Failure::new(
            EXIT_INPUT,
            anyhow!("the slicing criterion is empty"),
        ));
    }
    if let Some(bad) = ids.iter().find(|p| !s.net().is_place(p)) {
        return Err(slice_failure(SliceError::UnknownPlace(NodeId::new(*bad))));
    }
    Ok(ids.into_iter().map(NodeId::new).collect())
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "net".to_owned())
}

fn label(a: Algorithm) -> String {
    if a.is_reference() {
        format!("{} [reference]", a.display_name())
    } else {
        a.display_name().to_owned()
    }
}

enum Selector {
    One(Algorithm),
    All(Vec<PropertyId>),
}

fn parse_selector(text: Option<&str>) -> Result<Selector, Failure> {
    let Some(text) = text else {
        return Ok(Selector::All(Vec::new()));
    };
    if let Ok(a) = text.parse::<Algorithm>() {
        return Ok(Selector::One(a));
    }
    let props = text
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| match p {
            // The LoLA deadlock query is answered by the built-in checker.
            "lola:EF DEADLOCK" | "lola:AG NOT DEADLOCK" => Ok(PropertyId::DeadlockFree),
            other => other.parse::<PropertyId>(),
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::new(EXIT_INPUT, e))?;
    Ok(Selector::All(props))
}

#[derive(Serialize)]
struct JsonNet<'a> {
    name: &'a str,
    places: usize,
    transitions: usize,
    arcs: usize,
    tokens: u64,
}

#[derive(Serialize)]
struct JsonResult {
    algorithm: Algorithm,
    sizes_before: NetSizes,
    sizes_after: NetSizes,
    reduction_pct: pnslice::slicer::Reduction,
    runtime_ms: f64,
    output_file: String,
    warnings: Vec<String>,
    reference: bool,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    tool_version: &'static str,
    net: JsonNet<'a>,
    criterion: Vec<String>,
    results: Vec<JsonResult>,
}

fn run_slice(args: SliceArgs) -> Result<(), Failure> {
    let s = load(&args.file)?;
    println!("Petri net named {} successfully read.", s.net().name());
    let q = parse_criterion(&s, &args.criterion)?;
    let listed: Vec<&str> = q.iter().map(NodeId::as_str).collect();
    println!("Slicing criterion: [{}]", listed.join(", "));

    let selector = parse_selector(args.selector.as_deref())?;
    let algorithms = match &selector {
        Selector::One(a) => vec![*a],
        Selector::All(_) => Algorithm::ALL.to_vec(),
    };
    let out_dir = output_dir(args.output_dir);
    fs::create_dir_all(&out_dir).with_context(|| format!("cannot create {}", out_dir.display()))?;
    let stem = file_stem(&args.file);

    let mut results = Vec::new();
    for a in algorithms {
        let r: SliceResult = slice(a, &s, &q).map_err(slice_failure)?;
        if let Selector::All(props) = &selector {
            let report = preservation_report(&s, &r, props);
            if let Some(lost) = report.iter().find(|row| !row.kept()) {
                log::info!("{} drops {}", a.display_name(), lost.property);
                continue;
            }
        }
        let base = out_dir.join(format!("{stem}_{}", a.output_number()));
        let pnml = base.with_extension("pnml");
        fs::write(&pnml, write_pnml(&r.subnet))
            .with_context(|| format!("cannot write {}", pnml.display()))?;
        fs::write(base.with_extension("dot"), export_dot(&r.subnet, Some(&q)))
            .with_context(|| format!("cannot write {}", base.display()))?;
        println!(
            "{}.- {} -> Reduction: {} %",
            a.output_number(),
            label(a),
            r.reduction_label()
        );
        for note in &r.notes {
            println!("   note: {note}");
        }
        results.push(JsonResult {
            algorithm: a,
            sizes_before: r.before,
            sizes_after: r.after,
            reduction_pct: r.reduction(),
            runtime_ms: r.runtime_ms(),
            output_file: pnml.display().to_string(),
            warnings: r.notes.iter().map(ToString::to_string).collect(),
            reference: a.is_reference(),
        });
    }

    if args.json {
        let sizes = NetSizes::of(&s);
        let report = JsonReport {
            tool_version: env!("CARGO_PKG_VERSION"),
            net: JsonNet {
                name: s.net().name(),
                places: sizes.places,
                transitions: sizes.transitions,
                arcs: sizes.arcs,
                tokens: sizes.tokens,
            },
            criterion: q.iter().map(|p| p.as_str().to_owned()).collect(),
            results,
        };
        let path = out_dir.join(format!("{stem}_report.json"));
        let text = serde_json::to_string_pretty(&report).context("cannot encode the report")?;
        fs::write(&path, text + "\n")
            .with_context(|| format!("cannot write {}", path.display()))?;
        println!("JSON report written to {}", path.display());
    }
    Ok(())
}

fn run_bench_cmd(args: BenchArgs) -> Result<(), Failure> {
    let mut paths: Vec<PathBuf> = fs::read_dir(&args.dir)
        .with_context(|| format!("cannot list {}", args.dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| matches!(p.extension().and_then(|e| e.to_str()), Some("pnml" | "xml")))
        .collect();
    paths.sort();
    let mut nets = Vec::new();
    for p in &paths {
        match load(p) {
            Ok(s) => nets.push(s),
            Err(f) => log::warn!("skipping {}: {}", p.display(), f.error),
        }
    }
    let cfg = BenchConfig {
        runs_per_net: args.runs,
        seed: args.seed,
        ..BenchConfig::default()
    };
    let report = run_bench(&nets, &cfg).map_err(|e| Failure::new(EXIT_INPUT, e))?;
    let out_dir = output_dir(args.output_dir);
    fs::create_dir_all(&out_dir).with_context(|| format!("cannot create {}", out_dir.display()))?;
    fs::write(out_dir.join("stats.tsv"), report.stats_tsv()).context("cannot write stats.tsv")?;
    fs::write(out_dir.join("timings.tsv"), report.timings_tsv())
        .context("cannot write timings.tsv")?;
    println!(
        "{} nets, {} criteria each, seed {}",
        nets.len(),
        cfg.runs_per_net,
        cfg.seed
    );
    print!("{}", report.text_table());
    println!(
        "Statistics written to {}",
        out_dir.join("stats.tsv").display()
    );
    Ok(())
}

fn run_verify(args: VerifyArgs) -> Result<(), Failure> {
    let s = load(&args.file)?;
    let q = parse_criterion(&s, &args.criterion)?;
    if s.net().size() > BRUTE_FORCE_CEILING {
        return Err(Failure::new(
            EXIT_BUDGET,
            oracles::OracleError::TooLarge {
                size: s.net().size(),
                ceiling: BRUTE_FORCE_CEILING,
            },
        ));
    }
    let oracle = |e: oracles::OracleError| Failure::new(EXIT_BUDGET, e);
    let r = slice(args.algorithm, &s, &q).map_err(slice_failure)?;
    let nodes: Vec<String> = r.nodes().iter().map(|n| n.to_string()).collect();
    println!(
        "{} slice: {{{}}}",
        args.algorithm.display_name(),
        nodes.join(", ")
    );

    let mut checks = vec![(
        "valid",
        oracles::is_valid_slice(&s, &q, r.subnet.net(), args.depth).map_err(oracle)?,
        String::new(),
    )];
    match args.algorithm {
        Algorithm::Maximal => checks.push((
            "maximal",
            oracles::is_maximal_slice(&s, &q, r.subnet.net(), args.depth).map_err(oracle)?,
            String::new(),
        )),
        Algorithm::Minimal => {
            let (best, witness) =
                oracles::brute_force_min_slice(&s, &q, args.depth).map_err(oracle)?;
            let ids: Vec<String> = witness.nodes().iter().map(|n| n.to_string()).collect();
            checks.push((
                "minimal-size-match",
                best == r.size(),
                format!(" (brute force: {best} nodes, {{{}}})", ids.join(", ")),
            ));
        }
        _ => {}
    }
    let passed = checks.iter().all(|(_, ok, _)| *ok);
    for (name, ok, detail) in &checks {
        println!("{} {name}{detail}", if *ok { "PASS" } else { "FAIL" });
    }
    if passed {
        Ok(())
    } else {
        Err(Failure::new(
            EXIT_VERIFY_FAIL,
            anyhow!("verification failed"),
        ))
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // Accept the single-dash `-json` spelling.
    let args: Vec<String> = env::args()
        .map(|a| if a == "-json" { "--json".to_owned() } else { a })
        .collect();
    let outcome = match args.get(1).map(String::as_str) {
        Some("bench") => match BenchArgs::try_parse_from(&args[1..]) {
            Ok(a) => run_bench_cmd(a),
            Err(e) => e.exit(),
        },
        Some("verify") => match VerifyArgs::try_parse_from(&args[1..]) {
            Ok(a) => run_verify(a),
            Err(e) => e.exit(),
        },
        _ => match SliceArgs::try_parse_from(&args) {
            Ok(a) => run_slice(a),
            Err(e) => e.exit(),
        },
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
