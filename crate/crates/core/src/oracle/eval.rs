//! Exact bottom-up evaluation of circuits, independent of the reduction code.

use std::collections::HashMap;

use num_traits::{Signed, ToPrimitive};

use super::dyadic::Dyadic;
use crate::circuit::PowerCircuit;
use crate::marking::{Marking, NodeId};

/// Default cap on the magnitude of any node exponent `e(Λ_P)`.
pub const DEFAULT_BIT_BUDGET: u64 = 1 << 20;

/// Result of an exact evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BigEval {
    Value(Dyadic),
    /// Some node exponent exceeded the bit budget.
    Overflow,
    /// Some node has a non-integral exponent, so its value is irrational.
    NotDyadic,
}

impl BigEval {
    pub fn value(&self) -> Option<&Dyadic> {
        match self {
            BigEval::Value(d) => Some(d),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum NodeVal {
    Pow2(i64),
    Overflow,
    NotDyadic,
}

/// Memoizing evaluator. Memoization is invisible: results depend only on the circuit.
pub struct Evaluator<'a> {
    circuit: &'a PowerCircuit,
    budget: u64,
    memo: HashMap<NodeId, NodeVal>,
}

impl<'a> Evaluator<'a> {
    pub fn new(circuit: &'a PowerCircuit, budget: u64) -> Self {
        Evaluator {
            circuit,
            budget,
            memo: HashMap::new(),
        }
    }

    fn node_val(&mut self, root: NodeId) -> NodeVal {
        if let Some(&v) = self.memo.get(&root) {
            return v;
        }
        // Iterative post-order so deep lines do not overflow the stack.
        let mut stack = vec![(root, false)];
        while let Some((n, expanded)) = stack.pop() {
            if self.memo.contains_key(&n) {
                continue;
            }
            if !expanded {
                stack.push((n, true));
                for t in self.circuit.succ(n).nodes() {
                    if !self.memo.contains_key(&t) {
                        stack.push((t, false));
                    }
                }
                continue;
            }
            let v = match self.sum(self.circuit.succ(n)) {
                BigEval::Overflow => NodeVal::Overflow,
                BigEval::NotDyadic => NodeVal::NotDyadic,
                BigEval::Value(d) => {
                    if !d.is_integer() {
                        NodeVal::NotDyadic
                    } else {
                        let i = d.to_bigint().unwrap();
                        if i.abs().to_u64().is_none_or(|a| a > self.budget) {
                            NodeVal::Overflow
                        } else {
                            NodeVal::Pow2(i.to_i64().unwrap())
                        }
                    }
                }
            };
            self.memo.insert(n, v);
        }
        self.memo[&root]
    }

    /// Sum over a marking whose nodes are all memoized.
    fn sum(&self, m: &Marking) -> BigEval {
        let mut acc = Dyadic::zero();
        let mut not_dyadic = false;
        for (n, s) in m.iter() {
            match self.memo[&n] {
                NodeVal::Overflow => return BigEval::Overflow,
                NodeVal::NotDyadic => not_dyadic = true,
                NodeVal::Pow2(e) => {
                    let term = Dyadic::pow2(e);
                    acc = if s.to_i64() > 0 {
                        &acc + &term
                    } else {
                        &acc - &term
                    };
                }
            }
        }
        if not_dyadic {
            BigEval::NotDyadic
        } else {
            BigEval::Value(acc)
        }
    }

    pub fn node(&mut self, n: NodeId) -> BigEval {
        match self.node_val(n) {
            NodeVal::Pow2(e) => BigEval::Value(Dyadic::pow2(e)),
            NodeVal::Overflow => BigEval::Overflow,
            NodeVal::NotDyadic => BigEval::NotDyadic,
        }
    }

    pub fn marking(&mut self, m: &Marking) -> BigEval {
        for n in m.nodes() {
            self.node_val(n);
        }
        self.sum(m)
    }

    /// `e(Λ_P)`.
    pub fn exponent(&mut self, n: NodeId) -> BigEval {
        let succ = self.circuit.succ(n);
        for t in succ.nodes() {
            self.node_val(t);
        }
        self.sum(succ)
    }
}

/// `e(M)` computed exactly, or `Overflow` if some exponent exceeds `bit_budget`.
pub fn eval_exact(circuit: &PowerCircuit, m: &Marking, bit_budget: u64) -> BigEval {
    Evaluator::new(circuit, bit_budget).marking(m)
}

/// Whether every node value is a positive integer (equivalently every
/// `e(Λ_P) >= 0`). `None` when the budget prevents a decision.
pub fn is_power_circuit_exact(circuit: &PowerCircuit, bit_budget: u64) -> Option<bool> {
    let mut ev = Evaluator::new(circuit, bit_budget);
    let mut unknown = false;
    for n in circuit.node_ids() {
        match ev.node_val(n) {
            NodeVal::Pow2(e) if e < 0 => return Some(false),
            NodeVal::NotDyadic => return Some(false),
            NodeVal::Overflow => unknown = true,
            NodeVal::Pow2(_) => {}
        }
    }
    if unknown {
        None
    } else {
        Some(true)
    }
}
