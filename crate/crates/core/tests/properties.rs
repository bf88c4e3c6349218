use proptest::prelude::*;
use rand::SeedableRng;
use udlab::adversaries::{HonestQcp, SimulatedDecryptionOracle, SplitFlipAttack};
use udlab::bbf::{self, BbfDescriptor, BbfFamily};
use udlab::bits::BitString;
use udlab::games::*;
use udlab::qcp::{self, BackendTag, QcpError, ResourceLedger};
use udlab::quantum::{self, Subspace};
use udlab::schemes::{self, Ciphertext, MessageSupport};
use udlab::signatures::{self, SigSchemeTag};
use udlab::stats::chi_square_homogeneity;

fn bits(max: usize) -> impl Strategy<Value = BitString> {
    proptest::collection::vec(any::<bool>(), 0..max).prop_map(BitString::from)
}

fn rng(seed: u64) -> TrialRng {
    TrialRng::seed_from_u64(seed)
}

proptest! {
    #[test]
    fn bitstrings_survive_packing_and_text(b in bits(200)) {
        prop_assert_eq!(BitString::from_packed(&b.to_packed(), b.len()), Some(b.clone()));
        prop_assert_eq!(b.to_string().parse::<BitString>().unwrap(), b);
    }

    #[test]
    fn descriptors_survive_serialization(seed in any::<u64>(), len in 1usize..40, x_seed in any::<u64>()) {
        let f = bbf::sample(BbfFamily::KeyedMix, len, &mut rng(seed)).unwrap();
        let g = BbfDescriptor::from_bytes(&f.to_bytes()).unwrap();
        prop_assert_eq!(f.input_len(), len.max(8));
        let x = BitString::random(f.input_len(), &mut rng(x_seed));
        prop_assert_eq!(f.eval(&x).unwrap(), g.eval(&x).unwrap());
        prop_assert_eq!(g.to_bytes(), f.to_bytes());
    }

    #[test]
    fn paired_functions_dispatch_on_the_first_bit(seed in any::<u64>(), len in 1usize..30, x_seed in any::<u64>()) {
        let mut r = rng(seed);
        let f0 = bbf::sample(BbfFamily::KeyedMix, len, &mut r).unwrap();
        let f1 = bbf::sample(BbfFamily::KeyedMix, len, &mut r).unwrap();
        let f = bbf::pair_compose(f0.clone(), f1.clone()).unwrap();
        let x = BitString::random(f0.input_len(), &mut rng(x_seed));
        prop_assert_eq!(f.eval(&x.prepend(false)).unwrap(), f0.eval(&x).unwrap());
        prop_assert_eq!(f.eval(&x.prepend(true)).unwrap(), f1.eval(&x).unwrap());
    }

    #[test]
    fn subspace_duality(n in 1usize..9, gens in proptest::collection::vec(any::<u32>(), 0..6)) {
        let a = Subspace::from_indices(n, gens.iter().map(|g| g & ((1 << n) - 1))).unwrap();
        let d = a.dual();
        prop_assert_eq!(a.dim() + d.dim(), n);
        prop_assert_eq!(d.dual(), a.clone());
        for x in a.element_indices() {
            for y in d.element_indices() {
                prop_assert_eq!((x & y).count_ones() % 2, 0);
            }
        }
        prop_assert_eq!(Subspace::from_bytes(&a.to_bytes()).unwrap(), a);
    }

    #[test]
    fn hadamard_maps_subspace_states_to_dual_states(n in 1usize..8, seed in any::<u64>()) {
        let mut r = rng(seed);
        let dim = (seed as usize) % (n + 1);
        let a = quantum::random_subspace(n, dim, &mut r).unwrap();
        let h = quantum::hadamard_all(&quantum::subspace_state(&a).unwrap());
        let f = quantum::fidelity(&h, &quantum::subspace_state(&a.dual()).unwrap()).unwrap();
        prop_assert!(f >= 1.0 - 1e-9);
    }

    #[test]
    fn splitting_is_linear_in_the_ledger(seed in any::<u64>(), len in 2usize..20) {
        let mut r = rng(seed);
        let mut ledger = ResourceLedger::new();
        let f = qcp::sample_function(BackendTag::SplitPair, BbfFamily::KeyedMix, len, &mut r).unwrap();
        let p = qcp::protect(BackendTag::SplitPair, &f, &mut ledger, &mut r).unwrap();
        let alias = qcp::hooks::forge_alias(&p);
        prop_assert_eq!(ledger.live_count(), 1);
        let (h0, h1) = qcp::split_pair(&mut ledger, p).unwrap();
        prop_assert_eq!(ledger.live_count(), 2);
        let x = BitString::random(f.input_len(), &mut r);
        prop_assert!(matches!(qcp::eval_program(&ledger, &alias, &x), Err(QcpError::DeadHandle(_))));
        let half = if x.get(0) { &h1 } else { &h0 };
        let other = if x.get(0) { &h0 } else { &h1 };
        prop_assert_eq!(qcp::eval_program(&ledger, half, &x).unwrap(), f.eval(&x).unwrap());
        prop_assert!(matches!(qcp::eval_program(&ledger, other, &x), Err(QcpError::OutOfDomain)));
        prop_assert!(qcp::split_pair(&mut ledger, alias).is_err());
        prop_assert_eq!(ledger.live_count(), 2);
    }

    #[test]
    fn simulated_oracle_answers_exactly_what_it_logged(entries in proptest::collection::vec((bits(12), any::<bool>()), 1..10)) {
        let mut sim = SimulatedDecryptionOracle::new();
        let cts: Vec<Ciphertext> = entries
            .iter()
            .map(|(r, beta)| Ciphertext::Bit(schemes::BitCipher::new(r.clone(), *beta)))
            .collect();
        for (i, c) in cts.iter().enumerate().skip(1) {
            sim.record(c, &BitString::from_u64(i as u64, 8));
        }
        let first_logged = cts.iter().skip(1).any(|c| c == &cts[0]);
        prop_assert_eq!(sim.answer(&cts[0]).is_some(), first_logged);
        for c in cts.iter().skip(1) {
            prop_assert!(sim.answer(c).is_some());
        }
    }

    #[test]
    fn chi_square_accepts_identical_samples(counts in proptest::collection::vec(0u64..500, 2..12)) {
        prop_assume!(counts.iter().filter(|&&c| c > 0).count() >= 2);
        let chi = chi_square_homogeneity(&counts, &counts);
        prop_assert!(chi.statistic.abs() < 1e-9);
        prop_assert!(chi.p_value > 0.999);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn schemes_round_trip(idx in 0usize..12, seed in any::<u64>(), len in 1usize..9) {
        let backend = BackendTag::ALL[(seed % 3) as usize];
        let specs = [
            "ud1_cpa", "extend(ud1_cpa)", "decouple_bit(ud1_cpa)", "extend(decouple_bit(ud1_cpa))",
            "decouple_general(ud1_cpa)", "decouple_general(extend(ud1_cpa))",
            "wrap_cca2_bit(decouple_bit(ud1_cpa),malleable)", "wrap_cca2_full(ud1_cpa,malleable)",
            "wrap_cca2_full(ud1_cpa,lamport_merkle)", "underlying(ud1_cpa)", "se_bbf", "se_bbf(keyed_mix)",
        ];
        let scheme = schemes::parse_scheme(specs[idx], backend).unwrap();
        let mut r = rng(seed);
        let key = scheme.key_gen(32, &mut r).unwrap();
        let len = if scheme.message_support() == MessageSupport::BitOnly { 1 } else { len };
        let m = BitString::random(len, &mut r);
        let c = scheme.encrypt(&key, &m, &mut r).unwrap();
        let parsed = Ciphertext::from_bytes(&c.to_bytes()).unwrap();
        prop_assert_eq!(&parsed, &c);
        prop_assert_eq!(scheme.decrypt_key(&key, &parsed).unwrap(), Some(m.clone()));
        if !specs[idx].starts_with("underlying") && !specs[idx].starts_with("se_bbf") {
            let mut ledger = ResourceLedger::new();
            let d = scheme.dec_gen(&key, &mut ledger, &mut r).unwrap();
            prop_assert_eq!(scheme.decrypt_q(&ledger, &d, &c).unwrap(), Some(m));
        }
    }

    #[test]
    fn corrupted_ciphertext_bytes_never_panic(seed in any::<u64>(), pos in any::<usize>(), mask in 1u8..) {
        let scheme = schemes::parse_scheme("wrap_cca2_full(ud1_cpa,malleable)", BackendTag::IdealToken).unwrap();
        let mut r = rng(seed);
        let key = scheme.key_gen(16, &mut r).unwrap();
        let mut bytes = scheme.encrypt(&key, &"0110".parse().unwrap(), &mut r).unwrap().to_bytes();
        let i = pos % bytes.len();
        bytes[i] ^= mask;
        let _ = schemes::decrypt_bytes(scheme.as_ref(), &key, &bytes);
    }

    #[test]
    fn signatures_verify_and_bind_the_message(seed in any::<[u8; 16]>(), msg in proptest::collection::vec(any::<u8>(), 0..40)) {
        for scheme in [SigSchemeTag::Malleable, SigSchemeTag::LamportMerkle] {
            let kp = signatures::keypair_from_seed(scheme, seed);
            let sig = signatures::sign(&kp, &msg).unwrap();
            prop_assert!(signatures::verify(kp.public(), &msg, &sig));
            if scheme == SigSchemeTag::LamportMerkle {
                let mut other = msg.clone();
                other.push(1);
                prop_assert!(!signatures::verify(kp.public(), &other, &sig));
            }
        }
    }

    #[test]
    fn reports_are_consistent_and_reproducible(seed in any::<u64>(), n in 1usize..4, k in 0usize..4, trials in 1u64..60) {
        let cfg = QcpGameConfig::new(BackendTag::IdealToken, n, k, RunOptions::new(trials, seed));
        let r = run_flip_qcp(&cfg, &HonestQcp).unwrap();
        prop_assert_eq!(r.histogram.len(), n + k + 1);
        prop_assert_eq!(r.histogram.iter().sum::<u64>(), trials);
        let mean = r.histogram.iter().enumerate().map(|(s, c)| s as f64 * *c as f64).sum::<f64>() / trials as f64;
        prop_assert!((mean - r.mean).abs() < 1e-12);
        prop_assert!(r.records.iter().all(|t| t.live == n + k && t.wins.len() == n + k));
        // Holders of the real programs always answer correctly.
        prop_assert!(r.records.iter().all(|t| t.wins[..n].iter().all(|&w| w)));
        let bound = r.threshold + r.slack;
        let expected = if r.mean - r.ci.half_width > bound {
            Verdict::ExceedsBound
        } else if r.mean + r.ci.half_width <= bound {
            Verdict::WithinBound
        } else {
            Verdict::Inconclusive
        };
        prop_assert_eq!(r.verdict, expected);
        prop_assert_eq!(r.to_json(), run_flip_qcp(&cfg, &HonestQcp).unwrap().to_json());
    }

    #[test]
    fn split_attack_holders_never_exceed_the_pair(seed in any::<u64>(), q in 1usize..5) {
        let cfg = QcpGameConfig::new(BackendTag::SplitPair, 1, 1, RunOptions::new(30, seed));
        let r = run_flip_qcp(&cfg, &SplitFlipAttack { q }).unwrap();
        prop_assert!(r.records.iter().all(|t| t.live == 2));
    }
}
