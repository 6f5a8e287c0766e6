//! CSV timing series. Columns: `size,time_ms,peak_nodes,ops` where `ops` is
//! the number of pinch tests (Baumslag), basic operations (Higman) or nodes
//! integrated by the reduction (maketree, on random power circuits).

use std::time::Instant;

use powcirc::baumslag::{tower_commutator, wp_baumslag};
use powcirc::higman::{higman_tower_identity, wp_higman};
use powcirc::oracle::gen_random_power_circuit;
use powcirc::{CircuitError, TreeRep};

use crate::{BenchArgs, Fail};

pub fn run(a: &BenchArgs) -> Result<u8, Fail> {
    let family = a.family.as_str();
    if !matches!(
        family,
        "baumslag-tower-commutator" | "higman-tower-identity" | "maketree-random"
    ) {
        return Err(Fail::Input(format!("unknown bench family {family:?}")));
    }
    println!("size,time_ms,peak_nodes,ops");
    for &n in &a.bench_sizes {
        let start = Instant::now();
        let (peak, ops) = match family {
            "baumslag-tower-commutator" => {
                let (_, st) = wp_baumslag(&tower_commutator(n))?;
                (st.peak_nodes, st.tests)
            }
            "higman-tower-identity" => {
                let (_, st) = wp_higman(&higman_tower_identity(1, n))?;
                (st.peak_nodes, st.basic_ops)
            }
            _ => {
                // about three arcs per node
                let density = (3.0 / n.max(1) as f64).min(0.5);
                let c =
                    gen_random_power_circuit(a.seed.wrapping_add(n as u64), n as usize, density);
                match TreeRep::make_tree(c) {
                    Ok((t, rep)) => (t.len(), rep.integrated as u64),
                    Err(CircuitError::NotAPowerCircuit) => (0, 0),
                    Err(e) => return Err(e.into()),
                }
            }
        };
        println!("{n},{},{peak},{ops}", start.elapsed().as_millis());
    }
    Ok(0)
}
