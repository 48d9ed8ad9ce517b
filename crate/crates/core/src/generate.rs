//! Random nets for the test suites and parametric net families for the desk
//! benchmark corpus.

use rand::seq::index::sample;
use rand::Rng;

use crate::model::{Arc, MarkedPetriNet, Marking, NodeSet, PetriNet};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomNetConfig {
    pub max_places: usize,
    pub max_transitions: usize,
    /// Chance of each possible arc, in both directions independently.
    pub arc_probability: f64,
    pub max_weight: u32,
    /// Upper bound on the total number of initial tokens.
    pub max_tokens: u64,
}

impl Default for RandomNetConfig {
    fn default() -> Self {
        RandomNetConfig {
            max_places: 8,
            max_transitions: 8,
            arc_probability: 0.25,
            max_weight: 2,
            max_tokens: 3,
        }
    }
}

impl RandomNetConfig {
    /// Nets with unit weights and at most `nodes` places and transitions in total.
    pub fn ordinary_small(nodes: usize) -> Self {
        RandomNetConfig {
            max_places: nodes / 2,
            max_transitions: nodes - nodes / 2,
            max_weight: 1,
            ..RandomNetConfig::default()
        }
    }
}

/// A random marked net with places `p0…` and transitions `t0…`.
pub fn random_net<R: Rng + ?Sized>(
    rng: &mut R,
    name: &str,
    cfg: &RandomNetConfig,
) -> MarkedPetriNet {
    let np = rng.gen_range(1..=cfg.max_places.max(1));
    let nt = rng.gen_range(1..=cfg.max_transitions.max(1));
    let places: Vec<String> = (0..np).map(|i| format!("p{i}")).collect();
    let transitions: Vec<String> = (0..nt).map(|i| format!("t{i}")).collect();
    let mut arcs = Vec::new();
    for p in &places {
        for t in &transitions {
            if rng.gen_bool(cfg.arc_probability) {
                arcs.push(Arc::weighted(
                    p.as_str(),
                    t.as_str(),
                    rng.gen_range(1..=cfg.max_weight),
                ));
            }
            if rng.gen_bool(cfg.arc_probability) {
                arcs.push(Arc::weighted(
                    t.as_str(),
                    p.as_str(),
                    rng.gen_range(1..=cfg.max_weight),
                ));
            }
        }
    }
    let net = PetriNet::new(name, places, transitions, arcs).expect("generated net is well formed");
    let marking = random_marking(rng, &net, cfg.max_tokens);
    MarkedPetriNet::new(net, marking).expect("marking over own places")
}

/// Between 0 and `max_tokens` tokens in total, spread over random places.
pub fn random_marking<R: Rng + ?Sized>(rng: &mut R, net: &PetriNet, max_tokens: u64) -> Marking {
    let mut m = Marking::new();
    if net.places().is_empty() {
        return m;
    }
    for _ in 0..rng.gen_range(0..=max_tokens) {
        let p = &net.places()[rng.gen_range(0..net.places().len())];
        let n = m.get(p.as_str());
        m.set(p.clone(), n + 1);
    }
    m
}

/// `k` distinct places, `k` drawn uniformly from `min..=max` and capped at `|P|`.
pub fn random_criterion<R: Rng + ?Sized>(
    rng: &mut R,
    net: &PetriNet,
    min: usize,
    max: usize,
) -> NodeSet {
    let np = net.places().len();
    if np == 0 {
        return NodeSet::new();
    }
    let k = rng.gen_range(min.min(np)..=max.min(np));
    sample(rng, np, k)
        .into_iter()
        .map(|i| net.places()[i].clone())
        .collect()
}

fn build(
    name: &str,
    places: Vec<String>,
    transitions: Vec<String>,
    arcs: Vec<Arc>,
    tokens: &[String],
) -> MarkedPetriNet {
    let net = PetriNet::new(name, places, transitions, arcs).expect("well-formed family member");
    let mut m = Marking::new();
    for p in tokens {
        let n = m.get(p);
        m.set(p.as_str(), n + 1);
    }
    MarkedPetriNet::new(net, m).expect("marking over own places")
}

/// Dining philosophers with `n` seats: each philosopher thinks, takes both
/// forks and eats, then puts them back.
pub fn dining_philosophers(n: usize) -> MarkedPetriNet {
    let mut places = Vec::new();
    let mut transitions = Vec::new();
    let mut arcs = Vec::new();
    let mut tokens = Vec::new();
    for i in 0..n {
        let (think, eat, fork) = (format!("think{i}"), format!("eat{i}"), format!("fork{i}"));
        let right = format!("fork{}", (i + 1) % n);
        let (take, put) = (format!("take{i}"), format!("put{i}"));
        arcs.extend([
            Arc::new(think.as_str(), take.as_str()),
            Arc::new(fork.as_str(), take.as_str()),
            Arc::new(right.as_str(), take.as_str()),
            Arc::new(take.as_str(), eat.as_str()),
            Arc::new(eat.as_str(), put.as_str()),
            Arc::new(put.as_str(), think.as_str()),
            Arc::new(put.as_str(), fork.as_str()),
            Arc::new(put.as_str(), right.as_str()),
        ]);
        tokens.extend([think.clone(), fork.clone()]);
        places.extend([think, eat, fork]);
        transitions.extend([take, put]);
    }
    build(
        &format!("philosophers{n}"),
        places,
        transitions,
        arcs,
        &tokens,
    )
}

/// A producer feeding a consumer through `stages` bounded buffers of the
/// given capacity.
pub fn producer_consumer(stages: usize, capacity: usize) -> MarkedPetriNet {
    let mut places = vec!["ready".to_owned(), "done".to_owned()];
    let mut transitions = vec!["produce".to_owned(), "consume".to_owned()];
    let mut arcs = vec![Arc::new("ready", "produce"), Arc::new("produce", "ready")];
    let mut tokens = vec!["ready".to_owned()];
    let mut prev = "produce".to_owned();
    for s in 0..stages {
        let (buf, free, mv) = (format!("buf{s}"), format!("free{s}"), format!("move{s}"));
        arcs.extend([
            Arc::new(prev.as_str(), buf.as_str()),
            Arc::new(free.as_str(), prev.as_str()),
            Arc::new(buf.as_str(), mv.as_str()),
            Arc::new(mv.as_str(), free.as_str()),
        ]);
        tokens.extend(std::iter::repeat_n(free.clone(), capacity));
        places.extend([buf, free]);
        transitions.push(mv.clone());
        prev = mv;
    }
    arcs.extend([Arc::new(prev.as_str(), "done"), Arc::new("done", "consume")]);
    build(
        &format!("prodcons{stages}"),
        places,
        transitions,
        arcs,
        &tokens,
    )
}

/// `n` processes competing for one critical section guarded by a lock.
pub fn mutex(n: usize) -> MarkedPetriNet {
    let mut places = vec!["lock".to_owned()];
    let mut transitions = Vec::new();
    let mut arcs = Vec::new();
    let mut tokens = vec!["lock".to_owned()];
    for i in 0..n {
        let (idle, wait, crit) = (format!("idle{i}"), format!("wait{i}"), format!("crit{i}"));
        let (req, enter, leave) = (format!("req{i}"), format!("enter{i}"), format!("leave{i}"));
        arcs.extend([
            Arc::new(idle.as_str(), req.as_str()),
            Arc::new(req.as_str(), wait.as_str()),
            Arc::new(wait.as_str(), enter.as_str()),
            Arc::new("lock", enter.as_str()),
            Arc::new(enter.as_str(), crit.as_str()),
            Arc::new(crit.as_str(), leave.as_str()),
            Arc::new(leave.as_str(), idle.as_str()),
            Arc::new(leave.as_str(), "lock"),
        ]);
        tokens.push(idle.clone());
        places.extend([idle, wait, crit]);
        transitions.extend([req, enter, leave]);
    }
    build(&format!("mutex{n}"), places, transitions, arcs, &tokens)
}

/// A document workflow: `branches` parallel review lanes of `depth` steps,
/// with an alternative fast track, joined before archiving.
pub fn workflow(branches: usize, depth: usize) -> MarkedPetriNet {
    let mut places = vec![
        "start".to_owned(),
        "joined".to_owned(),
        "archived".to_owned(),
    ];
    let mut transitions = vec![
        "split".to_owned(),
        "join".to_owned(),
        "archive".to_owned(),
        "fast".to_owned(),
    ];
    let mut arcs = vec![
        Arc::new("start", "split"),
        Arc::new("start", "fast"),
        Arc::new("fast", "joined"),
        Arc::new("join", "joined"),
        Arc::new("joined", "archive"),
        Arc::new("archive", "archived"),
    ];
    for b in 0..branches {
        let mut prev = "split".to_owned();
        for d in 0..depth {
            let (p, t) = (format!("s{b}_{d}"), format!("r{b}_{d}"));
            arcs.extend([
                Arc::new(prev.as_str(), p.as_str()),
                Arc::new(p.as_str(), t.as_str()),
            ]);
            places.push(p);
            transitions.push(t.clone());
            prev = t;
        }
        let end = format!("e{b}");
        arcs.extend([
            Arc::new(prev.as_str(), end.as_str()),
            Arc::new(end.as_str(), "join"),
        ]);
        places.push(end);
    }
    build(
        &format!("workflow{branches}x{depth}"),
        places,
        transitions,
        arcs,
        &["start".to_owned()],
    )
}

/// A token ring of `n` stations, each of which can work while holding the token.
pub fn token_ring(n: usize) -> MarkedPetriNet {
    let mut places = Vec::new();
    let mut transitions = Vec::new();
    let mut arcs = Vec::new();
    for i in 0..n {
        let (has, busy, out) = (format!("has{i}"), format!("busy{i}"), format!("out{i}"));
        let (pass, work, finish) = (format!("pass{i}"), format!("work{i}"), format!("finish{i}"));
        let next = format!("has{}", (i + 1) % n);
        arcs.extend([
            Arc::new(has.as_str(), pass.as_str()),
            Arc::new(pass.as_str(), next.as_str()),
            Arc::new(has.as_str(), work.as_str()),
            Arc::new(work.as_str(), busy.as_str()),
            Arc::new(busy.as_str(), finish.as_str()),
            Arc::new(finish.as_str(), has.as_str()),
            Arc::new(finish.as_str(), out.as_str()),
        ]);
        places.extend([has, busy, out]);
        transitions.extend([pass, work, finish]);
    }
    build(
        &format!("ring{n}"),
        places,
        transitions,
        arcs,
        &["has0".to_owned()],
    )
}

/// The five nets of the bundled benchmark corpus.
pub fn desk_corpus() -> Vec<MarkedPetriNet> {
    vec![
        dining_philosophers(5),
        producer_consumer(6, 2),
        mutex(8),
        workflow(4, 6),
        token_ring(20),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_nets_respect_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let cfg = RandomNetConfig::default();
        for i in 0..200 {
            let s = random_net(&mut rng, &format!("r{i}"), &cfg);
            assert!((1..=8).contains(&s.net().places().len()));
            assert!((1..=8).contains(&s.net().transitions().len()));
            assert!(s.marking().total_tokens() <= 3);
            assert!(s.net().arcs().all(|(_, _, w)| (1..=2).contains(&w)));
        }
        let small = RandomNetConfig::ordinary_small(10);
        for i in 0..100 {
            let s = random_net(&mut rng, &format!("o{i}"), &small);
            assert!(s.net().size() <= 10);
            assert!(s.net().is_ordinary());
        }
    }

    #[test]
    fn criteria_are_distinct_places() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = dining_philosophers(3);
        for _ in 0..50 {
            let q = random_criterion(&mut rng, s.net(), 1, 5);
            assert!((1..=5).contains(&q.len()));
            assert!(q.iter().all(|p| s.net().is_place(p.as_str())));
        }
    }

    #[test]
    fn corpus_sizes() {
        for s in desk_corpus() {
            let n = s.net().size();
            assert!((20..=200).contains(&n), "{} has {n} nodes", s.net().name());
            assert!(s.net().is_ordinary());
        }
    }
}
