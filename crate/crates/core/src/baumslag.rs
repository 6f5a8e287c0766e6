//! Word problem of the Baumslag group `⟨a, b | b a b⁻¹ a b a⁻¹ b⁻¹ = a²⟩`.
//!
//! With `t = b a b⁻¹` the group is an HNN extension of `BS(1,2) = ⟨a, t |
//! t a t⁻¹ = a²⟩ ≅ ℤ[1/2]⋊ℤ` with stable letter `b`, conjugating `⟨a⟩` to
//! `⟨t⟩`. Elements of the base group are triples `[u,x,k] = t^x a^u t^k`.
//!
//! Every triple lives in its own connected part of one arena circuit and
//! satisfies
//!   i)   U, X, K have pairwise disjoint supports,
//!   ii)  U is a source,
//!   iii) every arc into σ(X) ∪ σ(K) starts in σ(U),
//!   iv)  arcs from U to X carry the sign opposite to the X-sign of their target,
//!
//! so multiplication only adds arcs and never clones. Pinch tests reduce a
//! copy of one triple's part and throw the copy away.

use std::cmp::Ordering;
use std::collections::HashMap;

use num_bigint::BigInt;

use crate::binary::integers_over_basis;
use crate::circuit::PowerCircuit;
use crate::error::Result;
use crate::marking::{Marking, NodeId};
use crate::tree::TreeRep;
pub use crate::word::Verdict;
use crate::word::{BGen, BaumslagWord};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BTriple {
    pub u: Marking,
    pub x: Marking,
    pub k: Marking,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BaumslagStats {
    pub letters: u64,
    pub tests: u64,
    pub successful_tests: u64,
    pub peak_nodes: usize,
    /// Successful `b T b⁻¹` pinches realized by flipping the U→X arcs.
    pub flips: u64,
    /// Successful `b T b⁻¹` pinches that rebuilt `u 2^x` from the reduced copy.
    pub rebuilds: u64,
}

/// A reduced copy of one triple.
struct Reduced {
    tree: TreeRep,
    u: Marking,
    x: Marking,
    k: Marking,
    /// Arena node to node of the reduced copy.
    map: HashMap<NodeId, NodeId>,
}

#[derive(Debug, Default)]
pub struct BaumslagSolver {
    circuit: PowerCircuit,
    head: BTriple,
    /// Stable letter sign and the triple following it.
    stack: Vec<(i8, BTriple)>,
    stats: BaumslagStats,
}

impl BaumslagSolver {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn stats(&self) -> BaumslagStats {
        self.stats
    }

    pub fn circuit(&self) -> &PowerCircuit {
        &self.circuit
    }

    /// The current segments: leading triple, then `(b^{±1}, triple)` pairs.
    pub fn segments(&self) -> (&BTriple, &[(i8, BTriple)]) {
        (&self.head, &self.stack)
    }

    fn top(&mut self) -> &mut BTriple {
        match self.stack.last_mut() {
            Some((_, t)) => t,
            None => &mut self.head,
        }
    }

    /// A source marking of value `n`.
    fn source_int(&mut self, n: i64) -> Marking {
        let m = integers_over_basis(&mut self.circuit, &[&BigInt::from(n)])
            .pop()
            .unwrap();
        self.circuit.clone_marking(&m).expect("fresh basis")
    }

    fn letter_triple(&mut self, g: BGen, e: i64) -> BTriple {
        let m = self.source_int(e);
        match g {
            BGen::A => BTriple {
                u: m,
                ..Default::default()
            },
            BGen::T if e < 0 => BTriple {
                x: m,
                ..Default::default()
            },
            BGen::T => BTriple {
                k: m,
                ..Default::default()
            },
            BGen::B => unreachable!(),
        }
    }

    /// `[u,x,k]·[v,y,l] = [u 2^{-y} + v 2^k, x+y, k+l]` by adding arcs U→Y
    /// and V→K only.
    fn mul(&mut self, a: BTriple, b: BTriple) -> BTriple {
        for p in a.u.nodes() {
            for (q, s) in b.x.iter() {
                self.circuit
                    .add_arc_unchecked(p, q, -s)
                    .expect("disjoint parts");
            }
        }
        for p in b.u.nodes() {
            for (q, s) in a.k.iter() {
                self.circuit
                    .add_arc_unchecked(p, q, s)
                    .expect("disjoint parts");
            }
        }
        BTriple {
            u: a.u.disjoint_union(&b.u),
            x: a.x.disjoint_union(&b.x),
            k: a.k.disjoint_union(&b.k),
        }
    }

    fn mul_into_top(&mut self, t: BTriple) {
        let top = std::mem::take(self.top());
        let prod = self.mul(top, t);
        *self.top() = prod;
    }

    fn reduce_copy(&self, t: &BTriple) -> Result<Reduced> {
        let (mut copy, map) = self.circuit.extract(&[&t.u, &t.x, &t.k]);
        let hu = copy.register_marking(t.u.remap(|n| map[&n]))?;
        let hx = copy.register_marking(t.x.remap(|n| map[&n]))?;
        let hk = copy.register_marking(t.k.remap(|n| map[&n]))?;
        let (tree, report) = TreeRep::make_tree(copy)?;
        let c = tree.circuit();
        let (u, x, k) = (
            c.marking(hu).clone(),
            c.marking(hx).clone(),
            c.marking(hk).clone(),
        );
        let map = map
            .into_iter()
            .map(|(a, b)| (a, report.node_map[&b]))
            .collect();
        Ok(Reduced { tree, u, x, k, map })
    }

    /// Processes one letter `g^{±1}` (or a syllable for `a`, `t`).
    pub fn push(&mut self, g: BGen, e: i64) -> Result<()> {
        if e == 0 {
            return Ok(());
        }
        self.stats.letters += e.unsigned_abs();
        match g {
            BGen::B => {
                for _ in 0..e.unsigned_abs() {
                    self.push_stable(e.signum() as i8)?;
                }
            }
            _ => {
                let t = self.letter_triple(g, e);
                self.mul_into_top(t);
            }
        }
        self.stats.peak_nodes = self.stats.peak_nodes.max(self.circuit.node_count());
        Ok(())
    }

    fn push_stable(&mut self, e: i8) -> Result<()> {
        let pinched = match self.stack.last() {
            Some(&(f, _)) if f == -e => {
                let (_, t) = self.stack.pop().unwrap();
                self.stats.tests += 1;
                let res = if f > 0 {
                    self.pinch_a_power(&t)?
                } else {
                    self.pinch_t_power(&t)?
                };
                match res {
                    Some(r) => {
                        self.stats.successful_tests += 1;
                        self.mul_into_top(r);
                        true
                    }
                    None => {
                        self.stack.push((f, t));
                        false
                    }
                }
            }
            _ => false,
        };
        if !pinched {
            self.stack.push((e, BTriple::default()));
        }
        Ok(())
    }

    /// `b⁻¹ t^m b = a^m`: succeeds iff `u = 0`; the result is `[X ∪ K, 0, 0]`.
    fn pinch_t_power(&mut self, t: &BTriple) -> Result<Option<BTriple>> {
        let r = self.reduce_copy(t)?;
        if !r.u.is_empty() {
            return Ok(None);
        }
        for p in t.u.nodes() {
            self.circuit.remove_node(p)?;
        }
        let u = t.x.disjoint_union(&t.k);
        debug_assert!(self.circuit.is_source(&u));
        Ok(Some(BTriple {
            u,
            ..Default::default()
        }))
    }

    /// `b a^z b⁻¹ = t^z`: succeeds iff `x + k = 0` and `z = u 2^x ∈ ℤ`.
    fn pinch_a_power(&mut self, t: &BTriple) -> Result<Option<BTriple>> {
        let r = self.reduce_copy(t)?;
        if r.x != r.k.negate() {
            return Ok(None);
        }
        let Some(low) = r.tree.lowest_node(&r.u) else {
            return Ok(Some(BTriple::default()));
        };
        let neg_x = r.x.negate();
        let at_least = |n: NodeId| {
            r.tree
                .compare(r.tree.circuit().succ(n), &neg_x)
                .map(|(o, _)| o != Ordering::Less)
        };
        if !at_least(low)? {
            return Ok(None);
        }
        let positive = r.tree.sign_of(&r.u)? > 0;
        // Flipping U→X to the complement of the existing arcs (with the X
        // signs) multiplies every node of U by 2^x. That is only sound when
        // every single node stays integral.
        let mut all_integral = true;
        for p in t.u.nodes() {
            if !at_least(r.map[&p])? {
                all_integral = false;
                break;
            }
        }
        let z = if all_integral {
            self.stats.flips += 1;
            for p in t.u.nodes() {
                for (q, s) in t.x.iter() {
                    if self.circuit.remove_arc(p, q)?.is_none() {
                        self.circuit.add_arc_unchecked(p, q, s)?;
                    }
                }
            }
            t.u.clone()
        } else {
            self.stats.rebuilds += 1;
            let mut tree = r.tree;
            let c = tree.circuit_mut();
            let v = c.clone_marking(&r.u)?;
            let z = c.mul_pow2(&v, &r.x)?;
            let (part, map) = c.extract(&[&z]);
            let (amap, _) = self.circuit.absorb(&part);
            z.remap(|n| amap[&map[&n]])
        };
        Ok(Some(if positive {
            BTriple {
                k: z,
                ..Default::default()
            }
        } else {
            BTriple {
                x: z,
                ..Default::default()
            }
        }))
    }

    /// Decides triviality of everything pushed so far.
    pub fn verdict(&self) -> Result<Verdict> {
        if !self.stack.is_empty() {
            return Ok(Verdict::Nontrivial);
        }
        let r = self.reduce_copy(&self.head)?;
        Ok(if r.u.is_empty() && r.x == r.k.negate() {
            Verdict::Trivial
        } else {
            Verdict::Nontrivial
        })
    }

    /// Checks invariants i)–iv) for every segment.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let c = &self.circuit;
        let all = std::iter::once(&self.head).chain(self.stack.iter().map(|(_, t)| t));
        for (i, t) in all.enumerate() {
            if !(t.u.is_disjoint(&t.x) && t.u.is_disjoint(&t.k) && t.x.is_disjoint(&t.k)) {
                return Err(format!("segment {i}: supports overlap"));
            }
            if !c.is_source(&t.u) {
                return Err(format!("segment {i}: U is not a source"));
            }
            let mut from_u: HashMap<NodeId, u32> = HashMap::new();
            for p in t.u.nodes() {
                for (q, s) in c.succ(p).iter() {
                    *from_u.entry(q).or_default() += 1;
                    if let Some(xs) = t.x.get(q) {
                        if s != -xs {
                            return Err(format!("segment {i}: arc {p}->{q} has the X sign"));
                        }
                    }
                }
            }
            for q in t.x.nodes().chain(t.k.nodes()) {
                if c.in_degree(q) != from_u.get(&q).copied().unwrap_or(0) {
                    return Err(format!("segment {i}: {q} has an arc from outside U"));
                }
            }
        }
        Ok(())
    }
}

/// Decides whether `w` is trivial.
pub fn wp_baumslag(w: &BaumslagWord) -> Result<(Verdict, BaumslagStats)> {
    let mut s = BaumslagSolver::new();
    for &(g, e) in &w.syllables {
        s.push(g, e)?;
    }
    let v = s.verdict()?;
    Ok((v, s.stats()))
}

/// Britton reduction only: the segments after processing `w`.
pub fn britton_reduce(w: &BaumslagWord) -> Result<BaumslagSolver> {
    let mut s = BaumslagSolver::new();
    for &(g, e) in &w.syllables {
        s.push(g, e)?;
    }
    Ok(s)
}

/// `T(0) = t`, `T(n+1) = b T(n) a T(n)⁻¹ b⁻¹`; equal to `t^{tow(n)}`.
pub fn tower_word(n: u32) -> BaumslagWord {
    let mut w = BaumslagWord::letter(BGen::T, 1);
    for _ in 0..n {
        let inv = w.inverse();
        let mut next = BaumslagWord::letter(BGen::B, 1);
        next.append(&w);
        next.push(BGen::A, 1);
        next.append(&inv);
        next.push(BGen::B, -1);
        w = next;
    }
    w
}

/// `t T(n) t⁻¹ T(n)⁻¹`, trivial for every `n`.
pub fn tower_commutator(n: u32) -> BaumslagWord {
    let tn = tower_word(n);
    BaumslagWord::letter(BGen::T, 1)
        .concat(&tn)
        .concat(&BaumslagWord::letter(BGen::T, -1))
        .concat(&tn.inverse())
}

/// The defining relator `b a b⁻¹ a b a⁻¹ b⁻¹ a⁻²`.
pub fn relator() -> BaumslagWord {
    crate::word::parse_baumslag("bab^-1ab a^-1b^-1a^-2").unwrap()
}
