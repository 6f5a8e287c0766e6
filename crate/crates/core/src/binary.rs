//! Integers written over the binary basis P_0, ..., P_l with e(P_i) = 2^i.

use num_bigint::{BigInt, Sign as BigSign};

use crate::circuit::PowerCircuit;
use crate::marking::{Marking, NodeId, Sign};

/// Adds nodes P_0..P_{bits-1} of values 2^0..2^{bits-1}. Each Λ_{P_i} is the
/// binary expansion of `i` over the earlier nodes, so the circuit has
/// O(bits) nodes and O(bits · log bits) arcs.
pub fn binary_basis(c: &mut PowerCircuit, bits: u64) -> Vec<NodeId> {
    let mut basis: Vec<NodeId> = Vec::with_capacity(bits as usize);
    for i in 0..bits {
        let succ = expand_u64(&basis, i);
        basis.push(c.add_node(&succ).expect("basis nodes exist"));
    }
    basis
}

fn expand_u64(basis: &[NodeId], mut i: u64) -> Marking {
    let mut m = Marking::new();
    let mut j = 0;
    while i > 0 {
        if i & 1 == 1 {
            m.set(basis[j], Some(Sign::Plus));
        }
        i >>= 1;
        j += 1;
    }
    m
}

/// The plain binary expansion of `n` over `basis`; `basis` must have at
/// least `n.bits()` nodes.
pub fn binary_marking(basis: &[NodeId], n: &BigInt) -> Marking {
    let sign = if n.sign() == BigSign::Minus {
        Sign::Minus
    } else {
        Sign::Plus
    };
    let mag = n.magnitude();
    (0..mag.bits())
        .filter(|&i| mag.bit(i))
        .map(|i| (basis[i as usize], sign))
        .collect()
}

/// Builds all `values` over one shared basis in `c`.
pub fn integers_over_basis(c: &mut PowerCircuit, values: &[&BigInt]) -> Vec<Marking> {
    let bits = values.iter().map(|v| v.bits()).max().unwrap_or(0);
    let basis = binary_basis(c, bits);
    values.iter().map(|v| binary_marking(&basis, v)).collect()
}
