use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pn_slicer"))
        .args(args)
        .env("PN_SLICER_OUTPUT", out)
        .env_remove("RUST_LOG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn net_b_report_and_files() {
    let dir = tempfile::tempdir().unwrap();
    let net = fixture("net_b.pnml");
    let o = run(&[net.to_str().unwrap(), "p3"], dir.path());
    assert!(o.status.success());
    assert_eq!(
        stdout(&o),
        "Petri net named NetB successfully read.\n\
         Slicing criterion: [p3]\n\
         1.- Minimal slicing -> Reduction: 40.00 %\n\
         2.- Maximal slicing -> Reduction: 40.00 %\n\
         3.- Rakow's CTL slicing [reference] -> Reduction: 0.00 %\n\
         4.- Yu et al's slicing [reference] -> Reduction: 40.00 %\n\
         5.- Rakow's safety slicing [reference] -> Reduction: 0.00 %\n"
    );
    for n in 1..=5 {
        assert!(dir.path().join(format!("net_b_{n}.pnml")).exists());
        assert!(dir.path().join(format!("net_b_{n}.dot")).exists());
    }
    let minimal = fs::read_to_string(dir.path().join("net_b_1.pnml")).unwrap();
    assert!(minimal.contains("id=\"t1\"") && !minimal.contains("id=\"t2\""));
}

#[test]
fn single_algorithm_by_number_or_tag() {
    let dir = tempfile::tempdir().unwrap();
    let net = fixture("net_b.pnml");
    for sel in ["2", "maximal"] {
        let o = run(&[net.to_str().unwrap(), "p3", sel], dir.path());
        assert!(o.status.success());
        let lines: Vec<String> = stdout(&o).lines().skip(2).map(str::to_owned).collect();
        assert_eq!(lines, ["2.- Maximal slicing -> Reduction: 40.00 %"]);
    }
}

#[test]
fn json_report_on_dead_net() {
    let dir = tempfile::tempdir().unwrap();
    let net = fixture("net_dead.pnml");
    let o = run(
        &[net.to_str().unwrap(), "p2", "minimal", "-json"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("1.- Minimal slicing -> Reduction: 100.00 %"));
    let text = fs::read_to_string(dir.path().join("net_dead_report.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["net"]["name"], "NetDead");
    assert_eq!(v["criterion"], serde_json::json!(["p2"]));
    let r = &v["results"][0];
    assert_eq!(r["algorithm"], "minimal");
    assert_eq!(r["sizes_after"]["places"], 0);
    assert_eq!(r["reduction_pct"]["total"], 100.0);
    assert_eq!(r["reference"], false);
    assert_eq!(
        r["warnings"][0],
        "no contributing candidate survived filtering; the slice is empty"
    );
}

#[test]
fn property_filter_drops_slices() {
    let dir = tempfile::tempdir().unwrap();
    let net = fixture("ring.pnml");
    let o = run(
        &[net.to_str().unwrap(), "p2", "strongly_connected"],
        dir.path(),
    );
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(!text.contains("1.- Minimal"));
    assert!(text.contains("2.- Maximal slicing"));
    assert!(!dir.path().join("ring_1.pnml").exists());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let net = fixture("net_b.pnml");
    let net = net.to_str().unwrap();
    assert_eq!(run(&[net, "nope"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&[net, "t1"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&[net, " , "], dir.path()).status.code(), Some(1));
    assert_eq!(
        run(&[net, "p3", "no_such_property"], dir.path())
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&["/no/such/file.pnml", "p1"], dir.path()).status.code(),
        Some(1)
    );
    let bad = dir.path().join("bad.pnml");
    fs::write(&bad, "<pnml><net").unwrap();
    assert_eq!(
        run(&[bad.to_str().unwrap(), "p1"], dir.path())
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn verify_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let net = fixture("net_b.pnml");
    let o = run(
        &["verify", net.to_str().unwrap(), "p3", "minimal"],
        dir.path(),
    );
    assert!(o.status.success());
    assert!(stdout(&o).contains("PASS minimal-size-match"));
    let o = run(
        &[
            "verify",
            net.to_str().unwrap(),
            "p3",
            "maximal",
            "--depth",
            "4",
        ],
        dir.path(),
    );
    assert!(o.status.success());
    assert!(stdout(&o).contains("PASS maximal"));

    let corpus = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus/mutex8.pnml");
    let o = run(
        &["verify", corpus.to_str().unwrap(), "crit0", "minimal"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn bench_is_deterministic() {
    let corpus = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = run(
            &["bench", corpus.to_str().unwrap(), "--runs", "5"],
            d.path(),
        );
        assert!(o.status.success());
        assert!(stdout(&o).contains("Time (ms)"));
    }
    let sa = fs::read(a.path().join("stats.tsv")).unwrap();
    let sb = fs::read(b.path().join("stats.tsv")).unwrap();
    assert_eq!(sa, sb);

    let empty = tempfile::tempdir().unwrap();
    let o = run(&["bench", empty.path().to_str().unwrap()], a.path());
    assert_eq!(o.status.code(), Some(1));
}
