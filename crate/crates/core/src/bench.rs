//! Benchmark harness: random criteria over a corpus, every algorithm per
//! criterion, aggregated per algorithm.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::generate::random_criterion;
use crate::model::{MarkedPetriNet, NetSizes, NodeSet};
use crate::slicer::{slice, Algorithm};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchConfig {
    pub runs_per_net: usize,
    pub min_criterion: usize,
    pub max_criterion: usize,
    pub seed: u64,
    pub algorithms: Vec<Algorithm>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            runs_per_net: 20,
            min_criterion: 1,
            max_criterion: 5,
            seed: 42,
            algorithms: Algorithm::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BenchError {
    #[error("nothing to run: no nets or zero runs per net")]
    NoInputs,
}

/// One algorithm on one criterion.
#[derive(Clone, Debug)]
pub struct BenchRun {
    pub net: String,
    pub run: usize,
    pub criterion: NodeSet,
    pub algorithm: Algorithm,
    pub outcome: Result<(NetSizes, NetSizes), String>,
    pub runtime_ms: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlgorithmStats {
    pub algorithm: Algorithm,
    pub completed: usize,
    pub failed: usize,
    /// Share of completed runs whose slice has fewer places, in percent.
    pub places_reduced: f64,
    pub tokens_reduced: f64,
    pub arcs_reduced: f64,
    pub transitions_reduced: f64,
    /// Mean of `|slice| / |net|` over `|P| + |T|`, in percent.
    pub mean_relative_size: f64,
    pub mean_runtime_ms: f64,
}

#[derive(Clone, Debug)]
pub struct BenchReport {
    pub runs: Vec<BenchRun>,
    pub stats: Vec<AlgorithmStats>,
}

pub fn run_bench(nets: &[MarkedPetriNet], cfg: &BenchConfig) -> Result<BenchReport, BenchError> {
    if nets.is_empty() || cfg.runs_per_net == 0 || cfg.algorithms.is_empty() {
        return Err(BenchError::NoInputs);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut runs = Vec::new();
    for s in nets {
        for run in 0..cfg.runs_per_net {
            let q = random_criterion(&mut rng, s.net(), cfg.min_criterion, cfg.max_criterion);
            for &algorithm in &cfg.algorithms {
                let (outcome, runtime_ms) = match slice(algorithm, s, &q) {
                    Ok(r) => (Ok((r.before, r.after)), r.runtime_ms()),
                    Err(e) => (Err(e.to_string()), 0.0),
                };
                runs.push(BenchRun {
                    net: s.net().name().to_owned(),
                    run,
                    criterion: q.clone(),
                    algorithm,
                    outcome,
                    runtime_ms,
                });
            }
        }
    }
    let stats = cfg
        .algorithms
        .iter()
        .map(|&a| aggregate(a, &runs))
        .collect();
    Ok(BenchReport { runs, stats })
}

fn percent(count: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        100.0 * count as f64 / total as f64
    }
}

fn aggregate(algorithm: Algorithm, runs: &[BenchRun]) -> AlgorithmStats {
    let mine: Vec<&BenchRun> = runs.iter().filter(|r| r.algorithm == algorithm).collect();
    let done: Vec<(&NetSizes, &NetSizes, f64)> = mine
        .iter()
        .filter_map(|r| r.outcome.as_ref().ok().map(|(b, a)| (b, a, r.runtime_ms)))
        .collect();
    let n = done.len();
    let count =
        |f: &dyn Fn(&NetSizes, &NetSizes) -> bool| done.iter().filter(|(b, a, _)| f(b, a)).count();
    let rel: f64 = done
        .iter()
        .map(|(b, a, _)| {
            if b.total() == 0 {
                100.0
            } else {
                100.0 * a.total() as f64 / b.total() as f64
            }
        })
        .sum();
    AlgorithmStats {
        algorithm,
        completed: n,
        failed: mine.len() - n,
        places_reduced: percent(count(&|b, a| a.places < b.places), n),
        tokens_reduced: percent(count(&|b, a| a.tokens < b.tokens), n),
        arcs_reduced: percent(count(&|b, a| a.arcs < b.arcs), n),
        transitions_reduced: percent(count(&|b, a| a.transitions < b.transitions), n),
        mean_relative_size: if n == 0 { 0.0 } else { rel / n as f64 },
        mean_runtime_ms: if n == 0 {
            0.0
        } else {
            done.iter().map(|(_, _, t)| t).sum::<f64>() / n as f64
        },
    }
}

impl BenchReport {
    pub fn stats_for(&self, algorithm: Algorithm) -> Option<&AlgorithmStats> {
        self.stats.iter().find(|s| s.algorithm == algorithm)
    }

    fn header(&self) -> String {
        let mut h = "metric".to_owned();
        for s in &self.stats {
            h.push('\t');
            h.push_str(s.algorithm.tag());
        }
        h
    }

    /// Deterministic statistics as tab-separated values. Runtimes are kept out
    /// so that equal seeds give byte-identical files.
    pub fn stats_tsv(&self) -> String {
        type Row = (&'static str, fn(&AlgorithmStats) -> String);
        let rows: [Row; 7] = [
            ("num_places", |s| format!("{:.2}", s.places_reduced)),
            ("num_tokens", |s| format!("{:.2}", s.tokens_reduced)),
            ("num_arcs", |s| format!("{:.2}", s.arcs_reduced)),
            ("num_transitions", |s| {
                format!("{:.2}", s.transitions_reduced)
            }),
            ("size", |s| format!("{:.2}", s.mean_relative_size)),
            ("completed", |s| s.completed.to_string()),
            ("failed", |s| s.failed.to_string()),
        ];
        let mut out = self.header();
        out.push('\n');
        for (name, cell) in rows {
            out.push_str(name);
            for s in &self.stats {
                out.push('\t');
                out.push_str(&cell(s));
            }
            out.push('\n');
        }
        out
    }

    /// Mean runtime per algorithm as tab-separated values.
    pub fn timings_tsv(&self) -> String {
        let mut out = self.header();
        out.push_str("\ntime_ms");
        for s in &self.stats {
            let _ = write!(out, "\t{:.3}", s.mean_runtime_ms);
        }
        out.push('\n');
        out
    }

    /// The table printed by the CLI.
    pub fn text_table(&self) -> String {
        let mut out = format!("{:<28}", "");
        for s in &self.stats {
            let _ = write!(out, "{:>14}", s.algorithm.tag());
        }
        out.push('\n');
        let mut row = |label: &str, cell: &dyn Fn(&AlgorithmStats) -> String| {
            let _ = write!(out, "{label:<28}");
            for s in &self.stats {
                let _ = write!(out, "{:>14}", cell(s));
            }
            out.push('\n');
        };
        row("num_places (% reduced)", &|s| {
            format!("{:.0}%", s.places_reduced)
        });
        row("num_tokens (% reduced)", &|s| {
            format!("{:.0}%", s.tokens_reduced)
        });
        row("num_arcs (% reduced)", &|s| {
            format!("{:.0}%", s.arcs_reduced)
        });
        row("num_transitions (% reduced)", &|s| {
            format!("{:.0}%", s.transitions_reduced)
        });
        row("Size (w.r.t. original)", &|s| {
            format!("{:.0}%", s.mean_relative_size)
        });
        row("Time (ms)", &|s| format!("{:.2}", s.mean_runtime_ms));
        row("completed / failed", &|s| {
            format!("{}/{}", s.completed, s.failed)
        });
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{net_b, ring};

    #[test]
    fn no_inputs() {
        let cfg = BenchConfig {
            runs_per_net: 0,
            ..BenchConfig::default()
        };
        assert_eq!(
            run_bench(&[net_b()], &cfg).unwrap_err(),
            BenchError::NoInputs
        );
        assert_eq!(
            run_bench(&[], &BenchConfig::default()).unwrap_err(),
            BenchError::NoInputs
        );
    }

    #[test]
    fn tiny_bench_is_deterministic() {
        let nets = [net_b(), ring()];
        let cfg = BenchConfig {
            runs_per_net: 5,
            ..BenchConfig::default()
        };
        let a = run_bench(&nets, &cfg).unwrap();
        let b = run_bench(&nets, &cfg).unwrap();
        assert_eq!(a.stats_tsv(), b.stats_tsv());
        assert_eq!(a.runs.len(), 2 * 5 * 5);
        let tsv = a.stats_tsv();
        assert!(tsv.starts_with("metric\tminimal\tmaximal\trakow_ctl\tyu\trakow_safety\n"));
        assert_eq!(tsv.lines().count(), 8);
        assert!(a.text_table().contains("Time (ms)"));
    }
}
