use std::cmp::Ordering;

use num_bigint::BigInt;
use proptest::prelude::*;

use powcirc::baumslag::wp_baumslag;
use powcirc::exchange::{export_json, import_json, NamedCircuit};
use powcirc::higman::wp_higman;
use powcirc::oracle::{
    eval_exact, gen_random_circuit, gen_random_power_circuit, gen_trivial_baumslag,
    gen_trivial_higman, is_power_circuit_exact, wp_baumslag_reference, wp_higman_reference, Dyadic,
    RefVerdict, DEFAULT_EXP_CAP,
};
use powcirc::sdp::{pair_value, wp_sdp, Instr, SdpOutcome, SdpProgram};
use powcirc::word::{BGen, BaumslagWord, HGen, HigmanWord, Verdict};
use powcirc::{CircuitError, Gap, Marking, PowerCircuit, TreeRep};

const BUDGET: u64 = 1 << 12;

fn values(c: &PowerCircuit) -> Option<Vec<Dyadic>> {
    c.marking_ids()
        .into_iter()
        .map(|h| eval_exact(c, c.marking(h), BUDGET).value().cloned())
        .collect()
}

fn value(c: &PowerCircuit, m: &Marking) -> Option<Dyadic> {
    eval_exact(c, m, BUDGET).value().cloned()
}

fn circuit_params() -> impl Strategy<Value = (u64, usize, f64)> {
    (any::<u64>(), 1usize..=12, 0.0f64..=0.5)
}

fn baumslag_word(max: usize) -> impl Strategy<Value = BaumslagWord> {
    prop::collection::vec((0u8..3, prop::bool::ANY), 0..=max).prop_map(|v| {
        let mut w = BaumslagWord::new();
        for (g, inv) in v {
            let g = [BGen::A, BGen::T, BGen::B][g as usize];
            w.push(g, if inv { -1 } else { 1 });
        }
        w
    })
}

fn higman_word(max: usize) -> impl Strategy<Value = HigmanWord> {
    prop::collection::vec((1u8..=4, prop::bool::ANY), 0..=max).prop_map(|v| {
        let mut w = HigmanWord::new();
        for (g, inv) in v {
            w.push(HGen(g), if inv { -1 } else { 1 });
        }
        w
    })
}

fn agree(ours: Verdict, reference: RefVerdict) -> bool {
    match reference {
        RefVerdict::CapExceeded => true,
        RefVerdict::Trivial => ours == Verdict::Trivial,
        RefVerdict::Nontrivial => ours == Verdict::Nontrivial,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn graph_arithmetic_preserves_values((seed, n, d) in circuit_params()) {
        let mut c = gen_random_power_circuit(seed, n, d);
        let hs = c.marking_ids();
        let m = c.marking(hs[0]).clone();
        let k = c.marking(*hs.last().unwrap()).clone();
        let (Some(vm), Some(vk)) = (value(&c, &m), value(&c, &k)) else { return Ok(()) };
        let neg = m.negate();
        prop_assert_eq!(value(&c, &neg), Some(-&vm));
        let cl = c.clone_marking(&m).unwrap();
        prop_assert_eq!(value(&c, &cl), Some(vm.clone()));
        let sum = c.add_markings(&m, &k).unwrap();
        prop_assert_eq!(value(&c, &sum), Some(&vm + &vk));
        // 2^{e(x)} for a small non-negative x
        if let Some(e) = vk.to_i64().filter(|e| (0..64).contains(e)) {
            let u = c.clone_marking(&m).unwrap();
            let x = c.clone_marking(&k).unwrap();
            let p = c.mul_pow2(&u, &x).unwrap();
            prop_assert_eq!(value(&c, &p), Some(vm.mul_pow2(e)));
        }
        prop_assert!(c.is_acyclic());
    }

    #[test]
    fn make_tree_is_sound((seed, n, d) in circuit_params(), power in prop::bool::ANY) {
        let c = if power { gen_random_power_circuit(seed, n, d) } else { gen_random_circuit(seed, n, d) };
        let before = values(&c);
        let exact = is_power_circuit_exact(&c, BUDGET);
        let nodes = c.node_count();
        match TreeRep::make_tree(c) {
            Ok((t, _)) => {
                prop_assert_ne!(exact, Some(false));
                prop_assert!(t.circuit().node_count() <= 3 * nodes);
                prop_assert!(t.validate().is_ok());
                if let Some(b) = before {
                    prop_assert_eq!(values(t.circuit()), Some(b));
                }
            }
            Err(CircuitError::NotAPowerCircuit) => prop_assert_ne!(exact, Some(true)),
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn compare_matches_values((seed, n, d) in circuit_params()) {
        let (t, _) = TreeRep::make_tree(gen_random_power_circuit(seed, n, d)).unwrap();
        let c = t.circuit();
        let ms: Vec<Marking> = c.marking_ids().into_iter().map(|h| c.marking(h).clone()).collect();
        for a in &ms {
            for b in &ms {
                let (Some(va), Some(vb)) = (value(c, a), value(c, b)) else { continue };
                let (ord, gap) = t.compare(a, b).unwrap();
                prop_assert_eq!(ord, va.cmp(&vb));
                let diff = (&va - &vb).abs();
                let want = match ord {
                    Ordering::Equal => Gap::NotApplicable,
                    _ if diff == Dyadic::from_int(1) => Gap::DiffOne,
                    _ => Gap::DiffAtLeastTwo,
                };
                prop_assert_eq!(gap, want);
            }
        }
    }

    #[test]
    fn json_round_trip((seed, n, d) in circuit_params()) {
        let nc = NamedCircuit::with_default_names(gen_random_circuit(seed, n, d));
        let a = export_json(&nc);
        prop_assert_eq!(export_json(&import_json(&a).unwrap()), a);
    }

    #[test]
    fn sdp_mul_is_associative(lits in prop::collection::vec((-20i64..20, -6i64..6), 3)) {
        let l = |i: usize| SdpProgram::lit(lits[i].0, lits[i].1);
        let left = SdpProgram { instrs: vec![l(0), l(1), Instr::Mul, l(2), Instr::Mul] };
        let right = SdpProgram { instrs: vec![l(0), l(1), l(2), Instr::Mul, Instr::Mul] };
        let eval = |p: &SdpProgram| {
            let (s, out) = wp_sdp(p).unwrap();
            let SdpOutcome::Value(t) = out else { panic!("no swap, always defined") };
            pair_value(&s, &t, BUDGET).unwrap()
        };
        prop_assert_eq!(eval(&left), eval(&right));
    }

    #[test]
    fn sdp_swap_domain(r in -30i64..30, m in -6i64..6, s in -30i64..30) {
        // (r, m)(s, 0) has first component r + 2^m s
        let p = SdpProgram { instrs: vec![SdpProgram::lit(r, m), SdpProgram::lit(s, 0), Instr::Mul, Instr::Swap] };
        let first = &Dyadic::from_int(r) + &Dyadic::from_int(s).mul_pow2(m);
        let (store, out) = wp_sdp(&p).unwrap();
        match out {
            SdpOutcome::Undefined => prop_assert!(!first.is_integer()),
            SdpOutcome::Value(t) => {
                let (a, b) = pair_value(&store, &t, BUDGET).unwrap();
                prop_assert_eq!(a, Dyadic::from_int(m));
                prop_assert_eq!(b, first);
            }
        }
    }

    #[test]
    fn baumslag_agrees_with_reference(w in baumslag_word(16)) {
        let (v, _) = wp_baumslag(&w).unwrap();
        prop_assert!(agree(v, wp_baumslag_reference(&w, DEFAULT_EXP_CAP)), "{}", w);
        let ww = w.clone().concat(&w.inverse());
        prop_assert_eq!(wp_baumslag(&ww.reduced()).unwrap().0, Verdict::Trivial);
    }

    #[test]
    fn higman_agrees_with_reference(w in higman_word(10)) {
        let (v, st) = wp_higman(&w).unwrap();
        prop_assert!(agree(v, wp_higman_reference(&w, DEFAULT_EXP_CAP)), "{}", w);
        prop_assert!(st.membership_tests <= 2 * st.triples.max(1) as u64);
    }

    #[test]
    fn relator_products_are_trivial(seed in any::<u64>(), len in 0usize..=200) {
        prop_assert_eq!(wp_baumslag(&gen_trivial_baumslag(seed, len)).unwrap().0, Verdict::Trivial);
        prop_assert_eq!(wp_higman(&gen_trivial_higman(seed, len)).unwrap().0, Verdict::Trivial);
    }
}

#[test]
fn literal_values_round_trip() {
    let mut s = powcirc::TripleStore::new();
    for (u, x, k) in [(0, 0, 0), (5, -3, 2), (-6, 0, 7), (123456789, -40, 40)] {
        let t = s
            .literal(&BigInt::from(u), &BigInt::from(x), &BigInt::from(k), 0)
            .unwrap();
        let c = s.circuit();
        let v = |m: &Marking| eval_exact(c, m, BUDGET).value().unwrap().to_i64().unwrap();
        assert_eq!((v(s.u(&t)), v(s.x(&t)), v(s.k(&t))), (u, x, k));
    }
    s.tree().validate().unwrap();
}
