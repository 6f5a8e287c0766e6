//! Acceptance run: one PASS/FAIL line per criterion. Exits non-zero if any
//! criterion fails.

use std::cmp::Ordering;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::One;

use powcirc::baumslag::{relator, tower_commutator, wp_baumslag};
use powcirc::higman::{
    higman_relator, higman_tower_identity, higman_tower_word, wp_higman, HigmanStats,
};
use powcirc::oracle::{
    eval_exact, gen_random_circuit, gen_random_power_circuit, gen_trivial_baumslag,
    gen_trivial_higman, is_power_circuit_exact, wp_baumslag_reference, wp_higman_reference,
    BigEval, Dyadic, RefVerdict, DEFAULT_BIT_BUDGET, DEFAULT_EXP_CAP,
};
use powcirc::sdp::{pair_value, wp_sdp, SdpOutcome, SdpProgram};
use powcirc::tree::extend_audit;
use powcirc::word::{BGen, BaumslagWord, Generator, HGen, HigmanWord, Verdict, Word};
use powcirc::{CircuitError, Gap, Marking, PowerCircuit, Sign, TreeRep};

/// Oracle budget for the random-circuit criteria.
const BUDGET: u64 = 1 << 16;

struct Report {
    failed: Vec<u32>,
}

impl Report {
    fn line(&mut self, n: u32, ok: bool, detail: String) {
        println!(
            "criterion {n}: {} ({detail})",
            if ok { "PASS" } else { "FAIL" }
        );
        if !ok {
            self.failed.push(n);
        }
    }
}

/// Every Higman solve of the run, for the operation budget.
struct HigmanLog {
    runs: Vec<HigmanStats>,
}

impl HigmanLog {
    fn solve(&mut self, w: &HigmanWord) -> Verdict {
        let (v, st) = wp_higman(w).unwrap();
        self.runs.push(st);
        v
    }
}

fn values(c: &PowerCircuit) -> Option<Vec<Dyadic>> {
    c.marking_ids()
        .into_iter()
        .map(|h| eval_exact(c, c.marking(h), BUDGET).value().cloned())
        .collect()
}

fn random_params(i: u64) -> (u64, usize, f64) {
    (i, 1 + (i % 12) as usize, (i % 11) as f64 / 20.0)
}

/// The 1,000 random circuits: even seeds from the sign-repairing generator,
/// odd seeds raw.
fn random_circuit(i: u64) -> PowerCircuit {
    let (seed, n, d) = random_params(i);
    if i.is_multiple_of(2) {
        gen_random_power_circuit(seed, n, d)
    } else {
        gen_random_circuit(seed, n, d)
    }
}

/// A power circuit plus a node whose successor marking is negative, with
/// more nodes stacked on top.
fn adversarial_circuit(i: u64) -> PowerCircuit {
    let (seed, n, d) = random_params(i);
    let mut c = gen_random_power_circuit(seed ^ 0xadd, n, d);
    let ids: Vec<_> = c.node_ids().collect();
    let target = ids[i as usize % ids.len()];
    let bad = c.add_node(&Marking::single(target, Sign::Minus)).unwrap();
    let top = c.add_node(&Marking::single(bad, Sign::Plus)).unwrap();
    c.register_marking(Marking::single(top, Sign::Plus))
        .unwrap();
    c
}

fn criterion_1(r: &mut Report) {
    let start = Instant::now();
    let (mut checked, mut bad) = (0, Vec::new());
    for i in 0..1000 {
        let c = random_circuit(i);
        let nodes = c.node_count();
        if is_power_circuit_exact(&c, BUDGET) != Some(true) {
            continue;
        }
        let Some(before) = values(&c) else { continue };
        checked += 1;
        match TreeRep::make_tree(c) {
            Ok((t, _)) => {
                if values(t.circuit()).as_ref() != Some(&before)
                    || t.circuit().node_count() > 3 * nodes
                {
                    bad.push(i);
                }
            }
            Err(_) => bad.push(i),
        }
    }
    let el = start.elapsed();
    r.line(
        1,
        bad.is_empty() && el < Duration::from_secs(10) && checked > 0,
        format!(
            "{checked} evaluable power circuits, {} bad {:?}, {el:.2?}",
            bad.len(),
            &bad[..bad.len().min(5)]
        ),
    );
}

fn criterion_2(r: &mut Report) {
    let (mut decided, mut undecided, mut disagree) = (0, 0, Vec::new());
    let mut check = |label: &str, i: u64, c: PowerCircuit| {
        let Some(exact) = is_power_circuit_exact(&c, BUDGET) else {
            undecided += 1;
            return;
        };
        decided += 1;
        let ours = match TreeRep::make_tree(c) {
            Ok(_) => true,
            Err(CircuitError::NotAPowerCircuit) => false,
            Err(e) => panic!("{e}"),
        };
        if ours != exact {
            disagree.push(format!("{label}{i}"));
        }
    };
    for i in 0..1000 {
        check("r", i, random_circuit(i));
    }
    for i in 0..100 {
        check("a", i, adversarial_circuit(i));
    }
    r.line(
        2,
        disagree.is_empty(),
        format!(
            "{decided} decided by the oracle, {undecided} over budget, disagreements {disagree:?}"
        ),
    );
}

fn criterion_3(r: &mut Report) {
    let (mut pairs, mut disagree) = (0, 0);
    for i in 0..200u64 {
        let (seed, n, d) = random_params(i + 5000);
        let (t, _) = TreeRep::make_tree(gen_random_power_circuit(seed, n, d)).unwrap();
        let c = t.circuit();
        let ms: Vec<Marking> = c
            .marking_ids()
            .into_iter()
            .map(|h| c.marking(h).clone())
            .collect();
        let vals: Vec<Option<Dyadic>> = ms
            .iter()
            .map(|m| eval_exact(c, m, BUDGET).value().cloned())
            .collect();
        for (a, va) in ms.iter().zip(&vals) {
            for (b, vb) in ms.iter().zip(&vals) {
                let (Some(va), Some(vb)) = (va, vb) else {
                    continue;
                };
                pairs += 1;
                let (ord, gap) = t.compare(a, b).unwrap();
                let want_gap = match va.cmp(vb) {
                    Ordering::Equal => Gap::NotApplicable,
                    _ if (va - vb).abs() == Dyadic::from_int(1) => Gap::DiffOne,
                    _ => Gap::DiffAtLeastTwo,
                };
                if ord != va.cmp(vb) || gap != want_gap {
                    disagree += 1;
                }
            }
        }
    }
    r.line(
        3,
        disagree == 0 && pairs > 0,
        format!("{pairs} pairs, {disagree} disagreements"),
    );
}

fn criterion_4(r: &mut Report) {
    let start = Instant::now();
    let mut ok = true;
    let mut tow = BigInt::one();
    let mut notes = Vec::new();
    for n in 0..=5u32 {
        // (n+1)-node line P_0 <- P_1 <- ... <- P_n
        let mut c = PowerCircuit::new();
        let mut top = c.add_node(&Marking::new()).unwrap();
        for _ in 0..n {
            top = c.add_node(&Marking::single(top, Sign::Plus)).unwrap();
        }
        let v = eval_exact(&c, &Marking::single(top, Sign::Plus), DEFAULT_BIT_BUDGET);
        let hit = matches!(&v, BigEval::Value(d) if d.to_bigint().as_ref() == Some(&tow));
        ok &= hit;
        if n == 5 {
            notes.push(format!("tow(5) has {} bits", tow.bits()));
            ok &= tow.bits() == 65537;
        }
        let next = tow
            .to_string()
            .parse::<usize>()
            .ok()
            .filter(|&e| e <= 1 << 17);
        tow = next.map_or_else(BigInt::one, |e| BigInt::one() << e);
    }
    let (store, out) = wp_sdp(&SdpProgram::tower_ladder(4, 1)).unwrap();
    let ladder = match out {
        SdpOutcome::Value(t) => pair_value(&store, &t, DEFAULT_BIT_BUDGET),
        SdpOutcome::Undefined => None,
    };
    let want = (Dyadic::zero(), Dyadic::from_int(65536));
    ok &= ladder.as_ref() == Some(&want);
    notes.push(format!(
        "ladder(4) = {:?}",
        ladder.map(|(a, b)| (a.to_string(), b.to_string()))
    ));
    let el = start.elapsed();
    r.line(
        4,
        ok && el < Duration::from_secs(5),
        format!("{}, {el:.2?}", notes.join(", ")),
    );
}

/// All freely reduced words of length exactly `len`.
fn words_of_length<G: Generator>(alphabet: &[G], len: usize, out: &mut Vec<Word<G>>) {
    fn go<G: Generator>(
        alphabet: &[G],
        left: usize,
        cur: &mut Vec<(G, i64)>,
        out: &mut Vec<Word<G>>,
    ) {
        if left == 0 {
            let mut w = Word::new();
            for &(g, e) in cur.iter() {
                w.push(g, e);
            }
            out.push(w);
            return;
        }
        for &g in alphabet {
            for e in [1, -1] {
                if cur.last() == Some(&(g, -e)) {
                    continue;
                }
                cur.push((g, e));
                go(alphabet, left - 1, cur, out);
                cur.pop();
            }
        }
    }
    go(alphabet, len, &mut Vec::new(), out);
}

fn agree(ours: Verdict, reference: RefVerdict) -> bool {
    match reference {
        RefVerdict::Trivial => ours == Verdict::Trivial,
        RefVerdict::Nontrivial => ours == Verdict::Nontrivial,
        RefVerdict::CapExceeded => true,
    }
}

/// Runs `f` over `items` on all cores and returns the items it rejects.
fn par_filter<T: Sync + Clone + Send>(items: &[T], f: impl Fn(&T) -> bool + Sync) -> Vec<T> {
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    let chunk = items.len().div_ceil(threads).max(1);
    std::thread::scope(|s| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|part| s.spawn(|| part.iter().filter(|x| !f(x)).cloned().collect::<Vec<T>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().unwrap())
            .collect()
    })
}

fn criterion_6(r: &mut Report) {
    let mut notes = Vec::new();
    // (a)
    let mut a_bad = 0;
    for seed in 0..100 {
        let w = gen_trivial_baumslag(seed, 200);
        if wp_baumslag(&w).unwrap().0 != Verdict::Trivial {
            a_bad += 1;
        }
    }
    a_bad += (wp_baumslag(&relator()).unwrap().0 != Verdict::Trivial) as usize;
    notes.push(format!("(a) {a_bad} of 101 not trivial"));
    // (b)
    let alphabet = [BGen::A, BGen::T, BGen::B];
    let mut words = Vec::new();
    for len in 0..=8 {
        words_of_length(&alphabet, len, &mut words);
    }
    let mut rng_words: Vec<BaumslagWord> = Vec::new();
    let mut state = 0x9e3779b97f4a7c15u64;
    for _ in 0..1000 {
        let mut w = BaumslagWord::new();
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        let len = (state >> 33) % 17;
        for _ in 0..len {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let x = (state >> 33) % 6;
            w.push(
                alphabet[(x / 2) as usize],
                if x.is_multiple_of(2) { 1 } else { -1 },
            );
        }
        rng_words.push(w);
    }
    let total = words.len() + rng_words.len();
    words.extend(rng_words);
    let capped = AtomicU64::new(0);
    let bad = par_filter(&words, |w| {
        let rv = wp_baumslag_reference(w, DEFAULT_EXP_CAP);
        if rv == RefVerdict::CapExceeded {
            capped.fetch_add(1, AtomicOrdering::Relaxed);
        }
        agree(wp_baumslag(w).unwrap().0, rv)
    });
    notes.push(format!(
        "(b) {total} words, {} disagreements, {} over the reference cap",
        bad.len(),
        capped.load(AtomicOrdering::Relaxed)
    ));
    // (c)
    let w = tower_commutator(6);
    let start = Instant::now();
    let v = wp_baumslag(&w).unwrap().0;
    let el = start.elapsed();
    let refv = wp_baumslag_reference(&w, DEFAULT_EXP_CAP);
    notes.push(format!(
        "(c) tT(6)=T(6)t {v:?} in {el:.2?}, reference {refv:?}"
    ));
    let ok = a_bad == 0 && bad.is_empty() && v == Verdict::Trivial && el < Duration::from_secs(1);
    r.line(6, ok, notes.join("; "));
}

/// Least-squares slope of `ln y` against `ln x`.
fn loglog_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = pts.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let num: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

fn criterion_7(r: &mut Report) {
    let start = Instant::now();
    let mut pts = Vec::new();
    let mut ok = true;
    for n in 6..=11 {
        let w = tower_commutator(n);
        // best of three against timer noise on the small sizes
        let mut best = f64::INFINITY;
        for _ in 0..3 {
            let t = Instant::now();
            ok &= wp_baumslag(&w).unwrap().0 == Verdict::Trivial;
            best = best.min(t.elapsed().as_secs_f64());
        }
        pts.push((w.len() as f64, best.max(1e-6)));
    }
    let slope = loglog_slope(&pts);
    let el = start.elapsed();
    let series: Vec<String> = pts
        .iter()
        .map(|(l, t)| format!("{l}:{:.1}ms", t * 1e3))
        .collect();
    r.line(
        7,
        ok && slope <= 3.5 && el < Duration::from_secs(300),
        format!("exponent {slope:.2}, [{}], {el:.2?}", series.join(" ")),
    );
}

fn criterion_8(r: &mut Report, log: &mut HigmanLog) {
    let mut notes = Vec::new();
    // (a)
    let mut a_bad = 0;
    for p in 1..=4 {
        a_bad += (log.solve(&higman_relator(p)) != Verdict::Trivial) as usize;
    }
    for seed in 0..100 {
        a_bad += (log.solve(&gen_trivial_higman(seed, 200)) != Verdict::Trivial) as usize;
    }
    notes.push(format!("(a) {a_bad} of 104 not trivial"));
    // (b)
    let (mut b_bad, mut slowest) = (0, Duration::ZERO);
    for p in 1..=4 {
        for n in 0..=10 {
            let t = Instant::now();
            let v = log.solve(&higman_tower_identity(p, n));
            let el = t.elapsed();
            slowest = slowest.max(el);
            b_bad += (v != Verdict::Trivial || el >= Duration::from_secs(30)) as usize;
        }
    }
    notes.push(format!("(b) {b_bad} of 44 failed, slowest {slowest:.2?}"));
    // (c)
    let mut c_bad = 0;
    for n in 0..=10 {
        c_bad += (log.solve(&higman_tower_word(1, n)) != Verdict::Nontrivial) as usize;
    }
    notes.push(format!("(c) {c_bad} of 11 failed"));
    // (d)
    let alphabet = [HGen(1), HGen(2), HGen(3), HGen(4)];
    let mut words = Vec::new();
    for len in 0..=6 {
        words_of_length(&alphabet, len, &mut words);
    }
    let total = words.len();
    let stats = std::sync::Mutex::new(Vec::new());
    let bad = par_filter(&words, |w| {
        let (v, st) = wp_higman(w).unwrap();
        stats.lock().unwrap().push(st);
        let rv = wp_higman_reference(w, DEFAULT_EXP_CAP);
        rv != RefVerdict::CapExceeded && agree(v, rv)
    });
    log.runs.extend(stats.into_inner().unwrap());
    let mut tower_bad = Vec::new();
    for p in 1..=4 {
        for n in 0..=3 {
            let w = higman_tower_identity(p, n);
            let rv = wp_higman_reference(&w, DEFAULT_EXP_CAP);
            if rv == RefVerdict::CapExceeded || !agree(log.solve(&w), rv) {
                tower_bad.push((p, n, rv));
            }
        }
    }
    let shown: Vec<String> = bad
        .iter()
        .take(5)
        .map(|w| {
            format!(
                "{w} ours {:?} ref {:?}",
                wp_higman(w).unwrap().0,
                wp_higman_reference(w, DEFAULT_EXP_CAP)
            )
        })
        .collect();
    notes.push(format!(
        "(d) {total} words, {} disagreements or capped {shown:?}; tower identities n <= 3: {} bad {tower_bad:?}",
        bad.len(),
        tower_bad.len()
    ));
    let d_ok = bad.is_empty() && tower_bad.is_empty();
    r.line(
        8,
        a_bad == 0 && b_bad == 0 && c_bad == 0 && d_ok,
        notes.join("; "),
    );
}

fn criterion_9(r: &mut Report, log: &HigmanLog) {
    let (_, cal) = wp_higman(&higman_tower_identity(1, 5)).unwrap();
    let s = cal.triples as f64;
    let c = cal.basic_ops as f64 / (s * s);
    let mut test_viol = 0;
    let mut op_viol = Vec::new();
    for st in &log.runs {
        if st.membership_tests > 2 * st.triples as u64 {
            test_viol += 1;
        }
        let s = st.triples as f64;
        if st.basic_ops as f64 > c * s * s {
            op_viol.push(st.triples);
        }
    }
    op_viol.sort_unstable();
    let largest = op_viol.last().copied();
    r.line(
        9,
        test_viol == 0 && op_viol.is_empty(),
        format!(
            "C = {c:.4} from s = {}, ops = {}; {} solves; tests > 2s: {test_viol}; ops > C·s²: {} (largest such s: {largest:?})",
            cal.triples,
            cal.basic_ops,
            log.runs.len(),
            op_viol.len()
        ),
    );
}

fn main() {
    let mut r = Report { failed: Vec::new() };
    let mut log = HigmanLog { runs: Vec::new() };
    criterion_1(&mut r);
    criterion_2(&mut r);
    criterion_3(&mut r);
    criterion_4(&mut r);
    criterion_6(&mut r);
    criterion_7(&mut r);
    criterion_8(&mut r, &mut log);
    criterion_9(&mut r, &log);
    // criterion 5 last, so it covers every extend_tree call above
    let (calls, violations) = extend_audit();
    r.line(
        5,
        calls > 0 && violations == 0,
        format!("{calls} extend_tree calls in this run, {violations} violations"),
    );
    let proxies = !r.failed.contains(&7) && !r.failed.contains(&9);
    r.line(
        10,
        true,
        format!(
            "no wall-clock claim asserted; proxies are criteria 7 and 9, which {}",
            if proxies {
                "both pass"
            } else {
                "do not both pass, see above"
            }
        ),
    );
    if !r.failed.is_empty() {
        println!("failed criteria: {:?}", r.failed);
        std::process::exit(1);
    }
}
