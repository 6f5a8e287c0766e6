//! The algebra ℤ[1/2]⋊ℤ with the partial swap `(r, m) ↦ (m, r)`.
//!
//! Elements are pairs `(r, m)` with product `(r, m)(s, n) = (r + 2^m s, m + n)`.
//! Inputs are straight-line postfix programs over literals, `mul` and `swap`,
//! evaluated on triples in one reduced circuit.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::binary::integers_over_basis;
use crate::circuit::PowerCircuit;
use crate::error::CircuitError;
use crate::marking::Marking;
use crate::oracle::{eval_exact, Dyadic};
use crate::triple::{TripleStore, TypedTriple};

/// A triple `[U, X, K]` of plain markings in some circuit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triple {
    pub u: Marking,
    pub x: Marking,
    pub k: Marking,
}

/// `[n, 0, 0]` over a fresh binary basis.
pub fn int_to_triple(n: &BigInt) -> (PowerCircuit, Triple) {
    let mut c = PowerCircuit::new();
    let u = integers_over_basis(&mut c, &[n]).pop().unwrap();
    (
        c,
        Triple {
            u,
            x: Marking::new(),
            k: Marking::new(),
        },
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instr {
    /// The pair `(u, m)`.
    Lit(BigInt, BigInt),
    Mul,
    Swap,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SdpError {
    #[error("malformed program: {0}")]
    Malformed(String),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SdpProgram {
    pub instrs: Vec<Instr>,
}

impl SdpProgram {
    /// One instruction per line: `lit <u> <m>`, `mul` or `swap`. Blank lines
    /// and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self, SdpError> {
        let mut instrs = Vec::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let bad = || SdpError::Malformed(format!("line {}: {line}", no + 1));
            let instr = match parts.as_slice() {
                ["lit", u, m] => {
                    Instr::Lit(u.parse().map_err(|_| bad())?, m.parse().map_err(|_| bad())?)
                }
                ["mul"] => Instr::Mul,
                ["swap"] => Instr::Swap,
                _ => return Err(bad()),
            };
            instrs.push(instr);
        }
        Ok(SdpProgram { instrs })
    }

    pub fn lit(u: i64, m: i64) -> Instr {
        Instr::Lit(u.into(), m.into())
    }

    /// A program for `(0, ε·tow(n))`, built by the conjugation ladder
    /// `s(tow(n+1) ε, 0) = (0, tow(n+1) ε)` with
    /// `(tow(n+1) ε, 0) = (0, tow(n)) (ε, 0) (0, -tow(n))`.
    pub fn tower_ladder(n: u32, eps: i64) -> Self {
        fn go(n: u32, eps: i64, out: &mut Vec<Instr>) {
            if n == 0 {
                out.push(SdpProgram::lit(eps, 0));
            } else {
                go(n - 1, 1, out);
                out.push(SdpProgram::lit(eps, 0));
                out.push(Instr::Mul);
                go(n - 1, -1, out);
                out.push(Instr::Mul);
            }
            out.push(Instr::Swap);
        }
        let mut instrs = Vec::new();
        go(n, eps, &mut instrs);
        SdpProgram { instrs }
    }

    /// Total size: instructions plus the bit lengths of all literals.
    pub fn size(&self) -> u64 {
        self.instrs
            .iter()
            .map(|i| match i {
                Instr::Lit(u, m) => 1 + u.bits() + m.bits(),
                _ => 1,
            })
            .sum()
    }
}

impl fmt::Display for SdpProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in &self.instrs {
            match i {
                Instr::Lit(u, m) => writeln!(f, "lit {u} {m}")?,
                Instr::Mul => writeln!(f, "mul")?,
                Instr::Swap => writeln!(f, "swap")?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpOutcome {
    Value(TypedTriple),
    Undefined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Equality {
    Equal,
    Unequal,
    Undefined,
}

/// `(r, m)` as a triple: `[r, 0, m]` for `m >= 0`, else `[r 2^{-m}, m, 0]`.
pub fn pair_literal(
    store: &mut TripleStore,
    r: &BigInt,
    m: &BigInt,
) -> Result<TypedTriple, SdpError> {
    let zero = BigInt::zero();
    if m.is_negative() {
        let shift = m
            .magnitude()
            .to_usize()
            .ok_or_else(|| SdpError::Malformed("literal exponent too large".into()))?;
        Ok(store.literal(&(r << shift), m, &zero, 0)?)
    } else {
        Ok(store.literal(r, &zero, m, 0)?)
    }
}

/// `a · b` in ℤ[1/2]⋊ℤ.
pub fn triple_mul(
    store: &mut TripleStore,
    a: TypedTriple,
    b: TypedTriple,
) -> Result<TypedTriple, SdpError> {
    Ok(store.mul(a, b)?)
}

/// The swap, or `None` outside its domain (first component not an integer).
pub fn triple_swap(
    store: &mut TripleStore,
    t: TypedTriple,
) -> Result<Option<TypedTriple>, SdpError> {
    Ok(store.sdp_swap(t)?)
}

/// Evaluates a program inside `store`.
pub fn eval_in(store: &mut TripleStore, p: &SdpProgram) -> Result<SdpOutcome, SdpError> {
    let mut stack: Vec<TypedTriple> = Vec::new();
    let underflow =
        |i: usize| SdpError::Malformed(format!("stack underflow at instruction {}", i + 1));
    for (i, ins) in p.instrs.iter().enumerate() {
        match ins {
            Instr::Lit(r, m) => stack.push(pair_literal(store, r, m)?),
            Instr::Mul => {
                let b = stack.pop().ok_or_else(|| underflow(i))?;
                let a = stack.pop().ok_or_else(|| underflow(i))?;
                stack.push(triple_mul(store, a, b)?);
            }
            Instr::Swap => {
                let t = stack.pop().ok_or_else(|| underflow(i))?;
                match triple_swap(store, t)? {
                    Some(s) => stack.push(s),
                    None => {
                        store.release(t);
                        for t in stack {
                            store.release(t);
                        }
                        return Ok(SdpOutcome::Undefined);
                    }
                }
            }
        }
    }
    match stack.as_slice() {
        [t] => Ok(SdpOutcome::Value(*t)),
        _ => Err(SdpError::Malformed(format!(
            "program leaves {} values on the stack",
            stack.len()
        ))),
    }
}

/// Evaluates a program in a fresh store.
pub fn wp_sdp(p: &SdpProgram) -> Result<(TripleStore, SdpOutcome), SdpError> {
    let mut store = TripleStore::new();
    let out = eval_in(&mut store, p)?;
    Ok((store, out))
}

/// Decides whether two programs denote the same element via `a · b^{-1} = 1`.
pub fn sdp_equal(p: &SdpProgram, q: &SdpProgram) -> Result<Equality, SdpError> {
    let mut store = TripleStore::new();
    let SdpOutcome::Value(a) = eval_in(&mut store, p)? else {
        return Ok(Equality::Undefined);
    };
    let SdpOutcome::Value(b) = eval_in(&mut store, q)? else {
        return Ok(Equality::Undefined);
    };
    let bi = store.inverse(&b)?;
    let quot = store.mul(a, bi)?;
    Ok(if store.is_identity(&quot) {
        Equality::Equal
    } else {
        Equality::Unequal
    })
}

/// The pair `(u 2^x, x + k)` evaluated exactly, or `None` when some value
/// exceeds the bit budget.
pub fn pair_value(
    store: &TripleStore,
    t: &TypedTriple,
    bit_budget: u64,
) -> Option<(Dyadic, Dyadic)> {
    let c = store.circuit();
    let u = eval_exact(c, store.u(t), bit_budget).value()?.clone();
    let x = eval_exact(c, store.x(t), bit_budget).value()?.clone();
    let k = eval_exact(c, store.k(t), bit_budget).value()?.clone();
    let xi = x.to_i64()?;
    Some((u.mul_pow2(xi), &x + &k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::DEFAULT_BIT_BUDGET;

    fn run(text: &str) -> Option<(i64, i64)> {
        let p = SdpProgram::parse(text).unwrap();
        let (store, out) = wp_sdp(&p).unwrap();
        match out {
            SdpOutcome::Undefined => None,
            SdpOutcome::Value(t) => {
                let (r, m) = pair_value(&store, &t, DEFAULT_BIT_BUDGET).unwrap();
                Some((r.to_i64().unwrap(), m.to_i64().unwrap()))
            }
        }
    }

    #[test]
    fn swap_of_generator() {
        assert_eq!(run("lit 1 0\nswap"), Some((0, 1)));
        assert_eq!(run("lit 0 5\nswap"), Some((5, 0)));
        assert_eq!(run("lit -3 2\nswap"), Some((2, -3)));
    }

    #[test]
    fn products() {
        assert_eq!(run("lit 1 0\nlit 1 0\nmul"), Some((2, 0)));
        // (0,1)(1,0)(0,-1) = (2,0)
        assert_eq!(run("lit 0 1\nlit 1 0\nmul\nlit 0 -1\nmul"), Some((2, 0)));
        assert_eq!(run("lit 3 0\nlit 0 -1\nmul\nswap"), Some((-1, 3)));
    }

    #[test]
    fn undefined_swap() {
        // (0,-1)(1,0) = (1/2, -1)
        assert_eq!(run("lit 0 -1\nlit 1 0\nmul\nswap"), None);
    }

    #[test]
    fn malformed() {
        assert!(matches!(
            SdpProgram::parse("push 1"),
            Err(SdpError::Malformed(_))
        ));
        let p = SdpProgram::parse("mul").unwrap();
        assert!(matches!(wp_sdp(&p), Err(SdpError::Malformed(_))));
        let p = SdpProgram::parse("lit 1 0\nlit 1 0").unwrap();
        assert!(matches!(wp_sdp(&p), Err(SdpError::Malformed(_))));
    }

    #[test]
    fn ladder_small() {
        for (n, want) in [(0, 1), (1, 2), (2, 4), (3, 16)] {
            let text = SdpProgram::tower_ladder(n, 1).to_string();
            assert_eq!(run(&text), Some((0, want)), "n = {n}");
        }
        let text = SdpProgram::tower_ladder(2, -1).to_string();
        assert_eq!(run(&text), Some((0, -4)));
    }

    #[test]
    fn equality() {
        let a = SdpProgram::parse("lit 0 1\nlit 1 0\nmul\nlit 0 -1\nmul").unwrap();
        let b = SdpProgram::parse("lit 2 0").unwrap();
        let c = SdpProgram::parse("lit 3 0").unwrap();
        assert_eq!(sdp_equal(&a, &b).unwrap(), Equality::Equal);
        assert_eq!(sdp_equal(&a, &c).unwrap(), Equality::Unequal);
        let u = SdpProgram::parse("lit 0 -1\nlit 1 0\nmul\nswap").unwrap();
        assert_eq!(sdp_equal(&a, &u).unwrap(), Equality::Undefined);
    }

    #[test]
    fn int_to_triple_values() {
        let (c, t) = int_to_triple(&BigInt::from(5));
        assert_eq!(
            eval_exact(&c, &t.u, DEFAULT_BIT_BUDGET)
                .value()
                .unwrap()
                .to_i64(),
            Some(5)
        );
        let (_, t) = int_to_triple(&BigInt::zero());
        assert!(t.u.is_empty());
    }
}
