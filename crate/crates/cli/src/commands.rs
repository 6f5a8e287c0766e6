use std::cmp::Ordering;
use std::fs;
use std::path::Path;
use std::time::Instant;

use serde_json::{json, Value};

use powcirc::baumslag::wp_baumslag;
use powcirc::exchange::{export_dot, export_json, import_json, NamedCircuit};
use powcirc::higman::wp_higman;
use powcirc::oracle::{
    eval_exact, gen_random_circuit, gen_trivial_word, wp_baumslag_reference, wp_higman_reference,
    BigEval, Group, RefVerdict,
};
use powcirc::sdp::{pair_value, sdp_equal, wp_sdp, Equality, SdpOutcome, SdpProgram};
use powcirc::word::{parse_baumslag, parse_higman, Verdict};
use powcirc::{CircuitError, Gap, TreeRep};

use crate::{Fail, OracleCmd, PcCmd, SdpCmd, WpArgs, WpCmd};

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| Fail::Input(format!("{}: {e}", path.display())))
}

fn load_circuit(path: &Path) -> Result<NamedCircuit, Fail> {
    Ok(import_json(&read(path)?)?)
}

fn reduce(c: powcirc::PowerCircuit) -> Result<TreeRep, Fail> {
    match TreeRep::make_tree(c) {
        Ok((t, _)) => Ok(t),
        Err(CircuitError::NotAPowerCircuit) => Err(Fail::NotAPowerCircuit),
        Err(e) => Err(e.into()),
    }
}

fn write_dot(path: &Path, nc: &NamedCircuit) -> Result<(), Fail> {
    fs::write(path, export_dot(nc)).map_err(|e| Fail::Input(format!("{}: {e}", path.display())))
}

pub fn pc(cmd: PcCmd) -> Result<u8, Fail> {
    match cmd {
        PcCmd::Reduce { circuit, dot } => {
            let nc = load_circuit(&circuit)?;
            let before = nc.circuit.node_count();
            let tree = reduce(nc.circuit)?;
            let chains = tree.chain_stats();
            let out = NamedCircuit {
                circuit: tree.into_circuit(),
                markings: nc.markings,
            };
            let stats = json!({
                "nodes_before": before,
                "nodes_after": out.circuit.node_count(),
                "chains": chains.chain_count,
                "potential": chains.potential,
            });
            let text = export_json(&out);
            let body = text.trim_end().strip_suffix('}').expect("JSON object");
            println!("{},\n  \"stats\": {stats}\n}}", body.trim_end());
            if let Some(p) = dot {
                write_dot(&p, &out)?;
            }
            Ok(0)
        }
        PcCmd::Cmp { circuit, m, k } => {
            let nc = load_circuit(&circuit)?;
            let handle = |name: &str| {
                nc.markings
                    .get(name)
                    .copied()
                    .ok_or(Fail::Input(format!("no marking {name:?}")))
            };
            let (hm, hk) = (handle(&m)?, handle(&k)?);
            let tree = reduce(nc.circuit)?;
            let c = tree.circuit();
            let (ord, gap) = tree.compare(c.marking(hm), c.marking(hk))?;
            let ord = match ord {
                Ordering::Less => "LT",
                Ordering::Equal => "EQ",
                Ordering::Greater => "GT",
            };
            let gap = match gap {
                Gap::DiffOne => "DIFF_ONE",
                Gap::DiffAtLeastTwo => "DIFF_AT_LEAST_TWO",
                Gap::NotApplicable => "NONE",
            };
            println!("{ord} {gap}");
            Ok(0)
        }
    }
}

pub fn sdp(cmd: SdpCmd) -> Result<u8, Fail> {
    match cmd {
        SdpCmd::Eval { program, json } => {
            let p = SdpProgram::parse(&read(&program)?)?;
            let (store, out) = wp_sdp(&p)?;
            let SdpOutcome::Value(t) = out else {
                println!("UNDEFINED");
                return Ok(4);
            };
            let small = pair_value(&store, &t, 64)
                .filter(|(r, m)| r.bit_size() <= 64 && m.to_i64().is_some());
            match small {
                Some((r, m)) if !json => println!("({r}, {m})"),
                _ => {
                    let c = store.circuit();
                    let (u, x, k) = (store.u(&t), store.x(&t), store.k(&t));
                    let (mut sub, map) = c.extract(&[u, x, k]);
                    let mut nc = NamedCircuit::default();
                    for (name, m) in [("u", u), ("x", x), ("k", k)] {
                        let id = sub.register_marking(m.remap(|n| map[&n]))?;
                        nc.markings.insert(name.to_string(), id);
                    }
                    nc.circuit = sub;
                    print!("{}", export_json(&nc));
                }
            }
            Ok(0)
        }
        SdpCmd::Eq { p1, p2 } => {
            let a = SdpProgram::parse(&read(&p1)?)?;
            let b = SdpProgram::parse(&read(&p2)?)?;
            Ok(match sdp_equal(&a, &b)? {
                Equality::Equal => {
                    println!("EQUAL");
                    0
                }
                Equality::Unequal => {
                    println!("UNEQUAL");
                    1
                }
                Equality::Undefined => {
                    println!("UNDEFINED");
                    4
                }
            })
        }
    }
}

fn word_text(arg: &str) -> Result<String, Fail> {
    match arg.strip_prefix('@') {
        Some(path) => read(Path::new(path)),
        None => Ok(arg.to_string()),
    }
}

fn report(a: &WpArgs, verdict: &str, stats: Value) -> u8 {
    if a.json {
        println!("{}", json!({ "verdict": verdict, "stats": stats }));
    } else {
        println!("{verdict}");
        if a.stats {
            println!("{stats}");
        }
    }
    match verdict {
        "TRIVIAL" => 0,
        "NONTRIVIAL" => 1,
        _ => 2,
    }
}

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Trivial => "TRIVIAL",
        Verdict::Nontrivial => "NONTRIVIAL",
    }
}

fn ref_verdict_str(v: RefVerdict) -> &'static str {
    match v {
        RefVerdict::Trivial => "TRIVIAL",
        RefVerdict::Nontrivial => "NONTRIVIAL",
        RefVerdict::CapExceeded => "CAP_EXCEEDED",
    }
}

pub fn wp(cmd: WpCmd) -> Result<u8, Fail> {
    let start = Instant::now();
    match cmd {
        WpCmd::Baumslag(a) => {
            let w = parse_baumslag(&word_text(&a.word)?)?;
            if a.reference {
                let v = wp_baumslag_reference(&w, a.exp_cap);
                let ms = start.elapsed().as_millis();
                return Ok(report(
                    &a,
                    ref_verdict_str(v),
                    json!({ "letters": w.len(), "time_ms": ms }),
                ));
            }
            let (v, st) = wp_baumslag(&w)?;
            let stats = json!({
                "letters": st.letters,
                "tests": st.tests,
                "successful_tests": st.successful_tests,
                "peak_nodes": st.peak_nodes,
                "flips": st.flips,
                "rebuilds": st.rebuilds,
                "time_ms": start.elapsed().as_millis(),
            });
            Ok(report(&a, verdict_str(v), stats))
        }
        WpCmd::Higman(a) => {
            let w = parse_higman(&word_text(&a.word)?)?;
            if a.reference {
                let v = wp_higman_reference(&w, a.exp_cap);
                let ms = start.elapsed().as_millis();
                return Ok(report(
                    &a,
                    ref_verdict_str(v),
                    json!({ "triples": w.syllables.len(), "time_ms": ms }),
                ));
            }
            let (v, st) = wp_higman(&w)?;
            let stats = json!({
                "triples": st.triples,
                "intervals_final": st.intervals_final,
                "membership_tests": st.membership_tests,
                "basic_ops": st.basic_ops,
                "peak_nodes": st.peak_nodes,
                "time_ms": st.time_ms,
            });
            Ok(report(&a, verdict_str(v), stats))
        }
    }
}

pub fn oracle(cmd: OracleCmd) -> Result<u8, Fail> {
    match cmd {
        OracleCmd::Eval {
            circuit,
            marking,
            bit_budget,
        } => {
            let nc = load_circuit(&circuit)?;
            let m = nc
                .marking(&marking)
                .ok_or_else(|| Fail::Input(format!("no marking {marking:?}")))?;
            match eval_exact(&nc.circuit, m, bit_budget) {
                BigEval::Value(d) => {
                    println!("{d}");
                    Ok(if d.is_integer() { 0 } else { 3 })
                }
                BigEval::Overflow => Err(Fail::Input(format!(
                    "value exceeds the bit budget {bit_budget}"
                ))),
                BigEval::NotDyadic => Err(Fail::NotAPowerCircuit),
            }
        }
        OracleCmd::GenTrivial { group, seed, len } => {
            let g: Group = group.parse().map_err(Fail::Input)?;
            println!("{}", gen_trivial_word(g, seed, len));
            Ok(0)
        }
        OracleCmd::GenCircuit {
            seed,
            nodes,
            density,
            dot,
        } => {
            if !(0.0..=1.0).contains(&density) {
                return Err(Fail::Input("density must lie in [0, 1]".into()));
            }
            let nc = NamedCircuit::with_default_names(gen_random_circuit(seed, nodes, density));
            print!("{}", export_json(&nc));
            if let Some(p) = dot {
                write_dot(&p, &nc)?;
            }
            Ok(0)
        }
    }
}
