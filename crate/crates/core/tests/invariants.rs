use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pnslice::generate::{random_criterion, random_net, RandomNetConfig};
use pnslice::io::{parse_pnml_with, write_pnml, ParseOptions};
use pnslice::properties::{check_structural, Outcome, PropertyId};
use pnslice::semantics::{find_increasing_sequences, fire_sequence, is_increasing};
use pnslice::slicer::{format_reduction, slice, slice_maximal, slice_minimal, Algorithm};
use pnslice::{MarkedPetriNet, NodeSet};

fn instance(seed: u64, weight: u32) -> (MarkedPetriNet, NodeSet) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = RandomNetConfig {
        max_weight: weight,
        ..RandomNetConfig::default()
    };
    let s = random_net(&mut rng, "n", &cfg);
    let q = random_criterion(&mut rng, s.net(), 1, 3);
    (s, q)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn every_slice_is_a_subnet(seed in any::<u64>(), w in 1u32..=2) {
        let (s, q) = instance(seed, w);
        for a in Algorithm::ALL {
            let r = slice(a, &s, &q).unwrap();
            prop_assert!(r.subnet.net().is_subnet_of(s.net()), "{}", a.tag());
            prop_assert!(r.after.total() <= r.before.total());
            for (p, n) in r.subnet.marking().iter() {
                prop_assert_eq!(n, s.marking().get(p.as_str()));
            }
        }
    }

    #[test]
    fn maximal_visits_each_transition_at_most_twice(seed in any::<u64>(), w in 1u32..=2) {
        let (s, q) = instance(seed, w);
        let r = slice_maximal(&s, &q).unwrap();
        prop_assert!(r.transition_visits.unwrap() <= 2 * s.net().transitions().len());
    }

    #[test]
    fn minimal_is_inside_maximal(seed in any::<u64>(), w in 1u32..=2) {
        let (s, q) = instance(seed, w);
        let min = slice_minimal(&s, &q).unwrap();
        let max = slice_maximal(&s, &q).unwrap();
        prop_assert!(min.nodes().is_subset(&max.nodes()));
    }

    #[test]
    fn safety_slice_is_inside_ctl_slice(seed in any::<u64>(), w in 1u32..=2) {
        let (s, q) = instance(seed, w);
        let safety = slice(Algorithm::RakowSafety, &s, &q).unwrap();
        let ctl = slice(Algorithm::RakowCtl, &s, &q).unwrap();
        prop_assert!(safety.nodes().is_subset(&ctl.nodes()));
    }

    #[test]
    fn increasing_sequences_fire_and_increase(seed in any::<u64>(), w in 1u32..=2) {
        let (s, q) = instance(seed, w);
        let seqs = find_increasing_sequences(&s, &q, 4, 100_000).unwrap();
        for seq in &seqs {
            prop_assert_eq!(fire_sequence(&s, seq).unwrap().len(), seq.len());
            prop_assert!(is_increasing(&s, seq, &q).unwrap());
        }
    }

    #[test]
    fn pnml_round_trip(seed in any::<u64>(), w in 1u32..=2) {
        let (s, q) = instance(seed, w);
        let back = parse_pnml_with(write_pnml(&s).as_bytes(), ParseOptions::default()).unwrap();
        prop_assert_eq!(&back, &s);
        let r = slice_maximal(&s, &q).unwrap();
        let opts = ParseOptions { allow_empty: true };
        let back = parse_pnml_with(write_pnml(&r.subnet).as_bytes(), opts).unwrap();
        prop_assert_eq!(back, r.subnet);
    }

    #[test]
    fn structural_properties_survive_slicing(seed in any::<u64>(), w in 1u32..=2) {
        let (s, q) = instance(seed, w);
        let slices = [slice_maximal(&s, &q).unwrap(), slice_minimal(&s, &q).unwrap()];
        for p in PropertyId::STRUCTURAL.into_iter().filter(|p| p.preserved_by_slicing()) {
            if check_structural(s.net(), p).unwrap().outcome != Outcome::Holds {
                continue;
            }
            for r in &slices {
                prop_assert_eq!(check_structural(r.subnet.net(), p).unwrap().outcome, Outcome::Holds,
                    "{} lost by {}", p, r.algorithm.tag());
            }
        }
    }

    #[test]
    fn reduction_label_is_the_rounded_ratio(before in 1u64..100_000, frac in 0.0f64..=1.0) {
        let after = (before as f64 * frac) as u64;
        let label = format_reduction(before, after);
        let (whole, cents) = label.split_once('.').unwrap();
        prop_assert_eq!(cents.len(), 2);
        let shown: f64 = label.parse().unwrap();
        let exact = 100.0 * (before - after) as f64 / before as f64;
        prop_assert!((shown - exact).abs() <= 0.005 + 1e-9, "{} vs {}", label, exact);
        prop_assert!(!whole.is_empty());
    }
}
