//! Word problem of Higman's group
//! `H₄ = ⟨a₁..a₄ | a_p a_{p-1} a_p⁻¹ = a_{p-1}²⟩` (indices mod 4).
//!
//! `H₄ = G₁₂₃ ∗_{F₁₃} G₃₄₁` where `G₁₂₃ = G₁₂ ∗_{G₂} G₂₃` and `F₁₃ = ⟨a₁, a₃⟩`
//! is free. Each `G_{p,p+1}` is a copy of ℤ[1/2]⋊ℤ whose elements are typed
//! triples. Triples are grouped into intervals of one factor of the
//! amalgam; a separator sweeps the interval list, joining neighbours whose
//! factors lie in `F₁₃`, until the list is Britton-reduced or a single
//! interval is left.

use std::time::Instant;

use num_bigint::BigInt;

use crate::error::Result;
use crate::triple::{TripleStore, TypedTriple};
pub use crate::word::Verdict;
use crate::word::{HGen, HigmanWord};

/// A run of triples of types `(b, b+1)` ("low") and `(b+1, b+2)` ("high"),
/// with `b` the type index 0 (for `G₁₂₃`) or 2 (for `G₃₄₁`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub base: u8,
    pub items: Vec<TypedTriple>,
}

impl Interval {
    fn of(t: TypedTriple) -> Self {
        Interval {
            base: t.ty & 2,
            items: vec![t],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    No,
    Yes { is_identity: bool },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct HigmanStats {
    /// Number s of triples in the input.
    pub triples: usize,
    pub intervals_final: usize,
    pub membership_tests: u64,
    pub basic_ops: u64,
    pub peak_nodes: usize,
    /// Largest ω seen; sampled after each membership test only when tracking.
    pub peak_weight: usize,
    pub initial_weight: usize,
    pub time_ms: u128,
}

/// The main data structure: one reduced circuit, the interval list and
/// the separator.
#[derive(Debug, Default)]
pub struct HigmanSolver {
    store: TripleStore,
    intervals: Vec<Interval>,
    separator: usize,
    tests: u64,
    /// Sample ω after every membership test (costs a pass over all triples).
    pub track_weight: bool,
    peak_weight: usize,
}

impl HigmanSolver {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn store(&self) -> &TripleStore {
        &self.store
    }

    pub fn store_mut(&mut self) -> &mut TripleStore {
        &mut self.store
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn separator(&self) -> usize {
        self.separator
    }

    /// Appends the generator power `a_p^e` as `[e,0,0]_{(p,p+1)}`.
    pub fn push_letter(&mut self, g: HGen, e: i64) -> Result<()> {
        let zero = BigInt::from(0);
        let t = self
            .store
            .literal(&BigInt::from(e), &zero, &zero, g.0 - 1)?;
        self.push_triple(t);
        Ok(())
    }

    /// Appends a triple already in the store as its own interval.
    pub fn push_triple(&mut self, t: TypedTriple) {
        self.intervals.push(Interval::of(t));
    }

    /// ω: total support size of all triples.
    pub fn weight(&self) -> usize {
        self.intervals
            .iter()
            .flat_map(|iv| &iv.items)
            .map(|t| self.store.weight(t))
            .sum()
    }

    fn in_g2(&self, t: &TypedTriple, base: u8) -> Result<bool> {
        Ok(if t.ty == base {
            self.store.u_is_zero(t)
        } else {
            self.store.exponent_sum_is_zero(t) && self.store.low_splittable(t)?
        })
    }

    /// Rewrites an element of the amalgamated `G₂` into the other type of
    /// the interval.
    fn swap_g2(&mut self, t: TypedTriple, base: u8) -> Result<TypedTriple> {
        if t.ty == base {
            self.store.swap_up(t)
        } else {
            // [u,x,k] with x+k = 0 is [u 2^x,0,0]·[0,x,k] and the right factor is 1
            let (left, right) = self.store.split_low(t)?.expect("element of G₂ splits");
            self.store.release(right);
            self.store.swap_down(left)
        }
    }

    /// Merges same-type neighbours and removes factors in `G₂`, leaving an
    /// alternating sequence none of whose members lies in `G₂` (unless it has
    /// a single member).
    fn britton_reduce(&mut self, items: Vec<TypedTriple>, base: u8) -> Result<Vec<TypedTriple>> {
        let mut stack: Vec<TypedTriple> = Vec::with_capacity(items.len());
        for t in items {
            let mut cur = t;
            loop {
                let Some(&top) = stack.last() else {
                    stack.push(cur);
                    break;
                };
                if top.ty == cur.ty {
                    stack.pop();
                    cur = self.store.mul(top, cur)?;
                } else if self.in_g2(&cur, base)? {
                    cur = self.swap_g2(cur, base)?;
                } else if self.in_g2(&top, base)? {
                    stack.pop();
                    let s = self.swap_g2(top, base)?;
                    cur = self.store.mul(s, cur)?;
                } else {
                    stack.push(cur);
                    break;
                }
            }
        }
        Ok(stack)
    }

    /// Tests whether interval `idx` lies in `F₁₃`. The interval keeps its
    /// value; on "yes" it is left as a product of powers of the two free
    /// generators, ready for [`swap_interval`](Self::swap_interval).
    pub fn membership_f(&mut self, idx: usize) -> Result<Membership> {
        self.tests += 1;
        let base = self.intervals[idx].base;
        let items = std::mem::take(&mut self.intervals[idx].items);
        let mut seq = self.britton_reduce(items, base)?;
        let res = self.factor_free(&mut seq, base);
        self.intervals[idx].items = seq;
        if self.track_weight {
            self.peak_weight = self.peak_weight.max(self.weight());
        }
        res
    }

    /// Runs the `h`-sequence: `h₀ = 1`, `h_{j-1} g_j = g'_j h_j` with
    /// `g'_j` a power of a free generator and `h_j ∈ G₂`, and `h_t = 1`.
    fn factor_free(&mut self, seq: &mut [TypedTriple], base: u8) -> Result<Membership> {
        let t = seq.len();
        let mut h: Option<TypedTriple> = None;
        #[allow(clippy::needless_range_loop)] // seq[j] is rewritten in place
        for j in 0..t {
            let cur = match h.take() {
                Some(h) => self.store.mul(h, seq[j])?,
                None => seq[j],
            };
            let low = cur.ty == base;
            let split = if low {
                self.store.split_low(cur)?
            } else {
                self.store.split_high(cur)?
            };
            let Some((left, right)) = split else {
                seq[j] = cur;
                return Ok(Membership::No);
            };
            // in both cases left is a power of a free generator and right lies in G₂
            seq[j] = left;
            if j + 1 == t {
                let rest_trivial = if low {
                    self.store.exponent_sum_is_zero(&right)
                } else {
                    self.store.u_is_zero(&right)
                };
                if !rest_trivial {
                    seq[j] = self.store.mul(left, right)?;
                    return Ok(Membership::No);
                }
                self.store.release(right);
            } else {
                h = Some(if low {
                    self.store.swap_up(right)?
                } else {
                    self.store.swap_down(right)?
                });
            }
        }
        let is_identity = match seq {
            [] => true,
            [g] => self.store.is_identity(g),
            _ => false,
        };
        Ok(Membership::Yes { is_identity })
    }

    /// Rewrites an interval in factored form (after a "yes") into the other
    /// factor of the amalgam.
    pub fn swap_interval(&mut self, idx: usize) -> Result<()> {
        let base = self.intervals[idx].base;
        let items = std::mem::take(&mut self.intervals[idx].items);
        let mut out = Vec::with_capacity(items.len());
        for g in items {
            // low: [z,0,0] = a_b^z; high: [0,x,k] = a_{b+2}^{x+k}
            out.push(if g.ty == base {
                self.store.swap_down(g)?
            } else {
                self.store.swap_up(g)?
            });
        }
        self.intervals[idx] = Interval {
            base: (base + 2) % 4,
            items: out,
        };
        Ok(())
    }

    fn join_into_next(&mut self, i: usize) {
        let first = self.intervals.remove(i);
        let next = &mut self.intervals[i];
        debug_assert_eq!(first.base, next.base);
        let mut items = first.items;
        items.append(&mut next.items);
        next.items = items;
    }

    fn join_into_prev(&mut self, i: usize) {
        let second = self.intervals.remove(i);
        let prev = &mut self.intervals[i - 1];
        debug_assert_eq!(second.base, prev.base);
        prev.items.extend(second.items);
    }

    /// Runs the separator loop and decides triviality.
    pub fn solve(&mut self) -> Result<Verdict> {
        loop {
            let t = self.intervals.len();
            let f = self.separator;
            debug_assert!(self.separator_invariants_hold());
            if f == 0 {
                if t <= 1 {
                    break;
                }
                match self.membership_f(0)? {
                    Membership::No => self.separator = 1,
                    Membership::Yes { .. } => {
                        if self.intervals[0].base != self.intervals[1].base {
                            self.swap_interval(0)?;
                        }
                        self.join_into_next(0);
                    }
                }
            } else if f == t {
                break;
            } else if self.intervals[f - 1].base == self.intervals[f].base {
                self.join_into_prev(f);
                self.separator -= 1;
            } else {
                match self.membership_f(f)? {
                    Membership::No => self.separator += 1,
                    Membership::Yes { .. } => {
                        self.swap_interval(f)?;
                        self.join_into_prev(f);
                        self.separator -= 1;
                    }
                }
            }
        }
        let t = self.intervals.len();
        if self.separator >= 1 {
            return Ok(Verdict::Nontrivial);
        }
        if t == 0 {
            return Ok(Verdict::Trivial);
        }
        Ok(match self.membership_f(0)? {
            Membership::Yes { is_identity: true } => Verdict::Trivial,
            _ => Verdict::Nontrivial,
        })
    }

    /// Intervals left of the separator are non-empty and alternate in type.
    fn separator_invariants_hold(&self) -> bool {
        let left = &self.intervals[..self.separator];
        left.iter().all(|iv| !iv.items.is_empty())
            && left.windows(2).all(|w| w[0].base != w[1].base)
    }

    pub fn membership_tests(&self) -> u64 {
        self.tests
    }
}

/// Decides whether `w` is trivial in `H₄`.
pub fn wp_higman(w: &HigmanWord) -> Result<(Verdict, HigmanStats)> {
    wp_higman_with(w, false)
}

/// As [`wp_higman`]; with `track_weight` the stats carry the peak ω.
pub fn wp_higman_with(w: &HigmanWord, track_weight: bool) -> Result<(Verdict, HigmanStats)> {
    let start = Instant::now();
    let mut s = HigmanSolver::new();
    s.track_weight = track_weight;
    for &(g, e) in &w.syllables {
        s.push_letter(g, e)?;
    }
    let triples = s.intervals.len();
    let initial_weight = s.weight();
    let ops_before = s.store.stats().basic_ops;
    s.peak_weight = initial_weight;
    let v = s.solve()?;
    let st = s.store.stats();
    Ok((
        v,
        HigmanStats {
            triples,
            intervals_final: s.intervals.len(),
            membership_tests: s.tests,
            basic_ops: st.basic_ops - ops_before,
            peak_nodes: st.peak_nodes,
            peak_weight: s.peak_weight.max(s.weight()),
            initial_weight,
            time_ms: start.elapsed().as_millis(),
        },
    ))
}

/// `w(p, 0) = a_p`, `w(p-1, i+1) = w(p, i) a_{p-1} w(p, i)⁻¹`; equal to `a_p^{tow(n)}`.
pub fn higman_tower_word(p: u8, n: u32) -> HigmanWord {
    fn go(p: u8, n: u32) -> HigmanWord {
        if n == 0 {
            return HigmanWord::letter(HGen(p), 1);
        }
        let q = p % 4 + 1;
        let inner = go(q, n - 1);
        let mut w = inner.clone();
        w.push(HGen(p), 1);
        w.append(&inner.inverse());
        w
    }
    go(p, n)
}

/// `a_{p+1} w(p,n) a_{p+1}⁻¹ w(p,n)⁻²`, trivial for every `p` and `n`.
pub fn higman_tower_identity(p: u8, n: u32) -> HigmanWord {
    let q = p % 4 + 1;
    let w = higman_tower_word(p, n);
    let inv = w.inverse();
    HigmanWord::letter(HGen(q), 1)
        .concat(&w)
        .concat(&HigmanWord::letter(HGen(q), -1))
        .concat(&inv)
        .concat(&inv)
}

/// The relator `a_p a_{p-1} a_p⁻¹ a_{p-1}⁻²`.
pub fn higman_relator(p: u8) -> HigmanWord {
    let q = (p + 2) % 4 + 1;
    let mut w = HigmanWord::letter(HGen(p), 1);
    w.push(HGen(q), 1);
    w.push(HGen(p), -1);
    w.push(HGen(q), -2);
    w
}
