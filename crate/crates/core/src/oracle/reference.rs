//! Reference word problem solvers over explicit numbers.
//!
//! Same control flow as the circuit solvers, but every element of ℤ[1/2]⋊ℤ
//! is an exact pair `(r, m)` standing for `a^r t^m`. Independence from the
//! circuit code is at the arithmetic layer only: the Higman reference runs
//! the same interval/separator algorithm, since no simpler decision
//! procedure exists.

use super::dyadic::Dyadic;
use crate::word::{BGen, BaumslagWord, HigmanWord};

/// Default cap, in bits, on any number the reference solvers write out.
pub const DEFAULT_EXP_CAP: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefVerdict {
    Trivial,
    Nontrivial,
    CapExceeded,
}

#[derive(Debug)]
struct CapExceeded;

type R<T> = Result<T, CapExceeded>;

/// `(r, m)` in ℤ[1/2]⋊ℤ with `(r, m)(s, n) = (r + 2^m s, m + n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pair {
    pub r: Dyadic,
    pub m: i64,
}

impl Pair {
    pub fn one() -> Self {
        Pair {
            r: Dyadic::zero(),
            m: 0,
        }
    }

    pub fn new(r: impl Into<Dyadic>, m: i64) -> Self {
        Pair { r: r.into(), m }
    }

    pub fn is_one(&self) -> bool {
        self.r.is_zero() && self.m == 0
    }

    fn check(self, cap: u64) -> R<Self> {
        if self.r.bit_size() > cap {
            Err(CapExceeded)
        } else {
            Ok(self)
        }
    }

    fn mul(&self, o: &Pair, cap: u64) -> R<Pair> {
        // only a shift that writes out bits counts against the cap
        if !o.r.is_zero() && self.m.unsigned_abs() > cap {
            return Err(CapExceeded);
        }
        let m = self.m.checked_add(o.m).ok_or(CapExceeded)?;
        Pair {
            r: &self.r + &o.r.mul_pow2(self.m),
            m,
        }
        .check(cap)
    }

    /// `r` as an integer exponent, if it is one and fits in an `i64`.
    fn r_int(&self) -> R<Option<i64>> {
        if !self.r.is_integer() {
            return Ok(None);
        }
        self.r.to_i64().map(Some).ok_or(CapExceeded)
    }
}

/// Britton reduction for the Baumslag group with `t = b a b⁻¹`:
/// `b⁻¹ t^m b = a^m` and `b a^r b⁻¹ = t^r` for integral `r`.
pub fn wp_baumslag_reference(w: &BaumslagWord, exp_cap: u64) -> RefVerdict {
    match baumslag_run(w, exp_cap) {
        Ok(true) => RefVerdict::Trivial,
        Ok(false) => RefVerdict::Nontrivial,
        Err(CapExceeded) => RefVerdict::CapExceeded,
    }
}

fn baumslag_run(w: &BaumslagWord, cap: u64) -> R<bool> {
    // (base element before the stable letter, its sign)
    let mut stack: Vec<(Pair, i64)> = Vec::new();
    let mut g = Pair::one();
    for (letter, e) in w.letters() {
        match letter {
            BGen::A => g = g.mul(&Pair::new(e, 0), cap)?,
            BGen::T => g = g.mul(&Pair::new(0, e), cap)?,
            BGen::B => {
                let pinch = match stack.last() {
                    Some(&(_, prev)) if prev == -e => {
                        if e == 1 {
                            // b⁻¹ g b with g = t^m
                            g.r.is_zero().then(|| Pair::new(g.m, 0))
                        } else if g.m == 0 {
                            // b g b⁻¹ with g = a^r, r ∈ ℤ
                            g.r_int()?.map(|r| Pair::new(0, r))
                        } else {
                            None
                        }
                    }
                    _ => None,
                };
                match pinch {
                    Some(p) => {
                        let (before, _) = stack.pop().unwrap();
                        g = before.mul(&p, cap)?;
                    }
                    None => stack.push((std::mem::replace(&mut g, Pair::one()), e)),
                }
            }
        }
    }
    Ok(stack.is_empty() && g.is_one())
}

/// A pair of type `p` (index 0..4) stands for `a_{p+1}^r a_{p+2}^m` (generator
/// indices mod 4).
#[derive(Debug, Clone)]
struct TPair {
    p: Pair,
    ty: u8,
}

struct HigmanRef {
    cap: u64,
    intervals: Vec<(u8, Vec<TPair>)>,
}

impl HigmanRef {
    fn mul(&self, a: &TPair, b: &TPair) -> R<TPair> {
        debug_assert_eq!(a.ty, b.ty);
        Ok(TPair {
            p: a.p.mul(&b.p, self.cap)?,
            ty: a.ty,
        })
    }

    /// The exponent `z` when the element is `a_{b+2}^z`.
    fn g2_power(&self, t: &TPair, base: u8) -> R<Option<i64>> {
        if t.ty == base {
            Ok(t.p.r.is_zero().then_some(t.p.m))
        } else if t.p.m == 0 {
            t.p.r_int()
        } else {
            Ok(None)
        }
    }

    fn as_type(z: i64, ty: u8, base: u8) -> TPair {
        TPair {
            p: if ty == base {
                Pair::new(0, z)
            } else {
                Pair::new(z, 0)
            },
            ty,
        }
    }

    fn britton(&self, items: Vec<TPair>, base: u8) -> R<Vec<TPair>> {
        let mut stack: Vec<TPair> = Vec::new();
        for mut cur in items {
            loop {
                let Some(top) = stack.last() else {
                    stack.push(cur);
                    break;
                };
                if top.ty == cur.ty {
                    cur = self.mul(top, &cur)?;
                    stack.pop();
                } else if let Some(z) = self.g2_power(&cur, base)? {
                    cur = Self::as_type(z, top.ty, base);
                } else if let Some(z) = self.g2_power(top, base)? {
                    cur = self.mul(&Self::as_type(z, cur.ty, base), &cur)?;
                    stack.pop();
                } else {
                    stack.push(cur);
                    break;
                }
            }
        }
        Ok(stack)
    }

    /// `Some(is_identity)` when the interval lies in `F₁₃`; on success the
    /// items are rewritten as powers of the free generators.
    fn membership(&mut self, idx: usize) -> R<Option<bool>> {
        let base = self.intervals[idx].0;
        let items = std::mem::take(&mut self.intervals[idx].1);
        let mut seq = self.britton(items, base)?;
        let t = seq.len();
        let mut h = 0i64;
        for j in 0..t {
            let low = seq[j].ty == base;
            let hp = Self::as_type(h, seq[j].ty, base);
            let cur = self.mul(&hp, &seq[j])?;
            // low: a_{b+1}^r a_{b+2}^m; high: a_{b+2}^r a_{b+3}^m = a_{b+3}^m a_{b+2}^{r 2^{-m}}
            let split = if low {
                cur.p.r_int()?.map(|r| (Pair::new(r, 0), cur.p.m))
            } else {
                let scaled = Pair::new(cur.p.r.mul_pow2(-cur.p.m), 0);
                scaled.r_int()?.map(|r| (Pair::new(0, cur.p.m), r))
            };
            match split {
                Some((free, rest)) if j + 1 < t || rest == 0 => {
                    seq[j] = TPair {
                        p: free,
                        ty: cur.ty,
                    };
                    h = rest;
                }
                _ => {
                    seq[j] = cur;
                    self.intervals[idx].1 = seq;
                    return Ok(None);
                }
            }
        }
        self.intervals[idx].1 = seq.clone();
        Ok(Some(match seq.as_slice() {
            [] => true,
            [g] => g.p.is_one(),
            _ => false,
        }))
    }

    fn swap(&mut self, idx: usize) {
        let (base, items) = &mut self.intervals[idx];
        let b = *base;
        for it in items.iter_mut() {
            *it = if it.ty == b {
                // a_{b+1}^r is the high generator a_{b'+3} of the other factor
                TPair {
                    p: Pair::new(0, it.p.r.to_i64().expect("free power")),
                    ty: (b + 3) % 4,
                }
            } else {
                TPair {
                    p: Pair::new(it.p.m, 0),
                    ty: (b + 2) % 4,
                }
            };
        }
        *base = (b + 2) % 4;
    }

    fn join(&mut self, i: usize) {
        let (_, second) = self.intervals.remove(i + 1);
        self.intervals[i].1.extend(second);
    }

    fn run(&mut self) -> R<bool> {
        let mut f = 0usize;
        loop {
            let t = self.intervals.len();
            if f == 0 {
                if t <= 1 {
                    break;
                }
                if self.membership(0)?.is_some() {
                    if self.intervals[0].0 != self.intervals[1].0 {
                        self.swap(0);
                    }
                    self.join(0);
                } else {
                    f = 1;
                }
            } else if f == t {
                break;
            } else if self.intervals[f - 1].0 == self.intervals[f].0 {
                self.join(f - 1);
                f -= 1;
            } else if self.membership(f)?.is_some() {
                self.swap(f);
                self.join(f - 1);
                f -= 1;
            } else {
                f += 1;
            }
        }
        if f >= 1 {
            return Ok(false);
        }
        if self.intervals.is_empty() {
            return Ok(true);
        }
        Ok(self.membership(0)? == Some(true))
    }
}

/// Higman's group over explicit pairs; letter `a_p^e` is `(e, 0)` of type `p-1`.
pub fn wp_higman_reference(w: &HigmanWord, exp_cap: u64) -> RefVerdict {
    let mut h = HigmanRef {
        cap: exp_cap,
        intervals: w
            .syllables
            .iter()
            .map(|&(g, e)| {
                let ty = g.0 - 1;
                (
                    ty & 2,
                    vec![TPair {
                        p: Pair::new(e, 0),
                        ty,
                    }],
                )
            })
            .collect(),
    };
    match h.run() {
        Ok(true) => RefVerdict::Trivial,
        Ok(false) => RefVerdict::Nontrivial,
        Err(CapExceeded) => RefVerdict::CapExceeded,
    }
}
