//! Triples `[U, X, K]` of markings in one reduced circuit.
//!
//! A triple of type `(p, p+1)` stands for `a_{p+1}^x a_p^u a_{p+1}^k`, which
//! is the pair `(u 2^x, x + k)` of ℤ[1/2]⋊ℤ when read in the group generated
//! by `a_p, a_{p+1}`. All operations build their results from clones, then
//! call `extend_tree` so the circuit stays in tree representation.

use std::cmp::Ordering;

use num_bigint::BigInt;

use crate::binary::integers_over_basis;
use crate::circuit::{MarkingId, PowerCircuit};
use crate::error::{CircuitError, Result};
use crate::marking::Marking;
use crate::tree::TreeRep;

/// Type index `p` in 0..4 stands for the pair `(p+1, p+2)` of generator
/// indices `1..=4`, i.e. index 0 is type (1,2) and index 3 is type (4,1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TypedTriple {
    pub u: MarkingId,
    pub x: MarkingId,
    pub k: MarkingId,
    pub ty: u8,
}

/// Counters for basic operations and circuit growth.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StoreStats {
    pub basic_ops: u64,
    pub extend_calls: u64,
    pub peak_nodes: usize,
}

#[derive(Debug, Default)]
pub struct TripleStore {
    tree: TreeRep,
    stats: StoreStats,
}

impl TripleStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn tree(&self) -> &TreeRep {
        &self.tree
    }

    pub fn circuit(&self) -> &PowerCircuit {
        self.tree.circuit()
    }

    pub fn stats(&self) -> StoreStats {
        self.stats
    }

    pub fn u(&self, t: &TypedTriple) -> &Marking {
        self.circuit().marking(t.u)
    }

    pub fn x(&self, t: &TypedTriple) -> &Marking {
        self.circuit().marking(t.x)
    }

    pub fn k(&self, t: &TypedTriple) -> &Marking {
        self.circuit().marking(t.k)
    }

    /// ω(T) = |σ(U)| + |σ(X)| + |σ(K)|.
    pub fn weight(&self, t: &TypedTriple) -> usize {
        self.u(t).len() + self.x(t).len() + self.k(t).len()
    }

    /// Registers triples built from markings of the circuit and restores the
    /// tree representation once for all of them.
    fn finish_all<const N: usize>(
        &mut self,
        parts: [(Marking, Marking, Marking, u8); N],
    ) -> Result<[TypedTriple; N]> {
        let c = self.tree.circuit_mut();
        let mut out = Vec::with_capacity(N);
        let mut handles = Vec::with_capacity(3 * N);
        for (u, x, k, ty) in parts {
            let t = TypedTriple {
                u: c.register_marking(u)?,
                x: c.register_marking(x)?,
                k: c.register_marking(k)?,
                ty: ty % 4,
            };
            handles.extend([t.u, t.x, t.k]);
            out.push(t);
        }
        self.tree.extend_tree(&handles)?;
        self.stats.extend_calls += 1;
        self.stats.peak_nodes = self.stats.peak_nodes.max(self.circuit().node_count());
        Ok(out.try_into().unwrap())
    }

    fn finish(&mut self, u: Marking, x: Marking, k: Marking, ty: u8) -> Result<TypedTriple> {
        Ok(self.finish_all([(u, x, k, ty)])?[0])
    }

    pub fn release(&mut self, t: TypedTriple) {
        let c = self.tree.circuit_mut();
        for h in [t.u, t.x, t.k] {
            c.release_marking(h).expect("triple handles are live");
        }
    }

    /// `[u, x, k]` of the given type, written over a fresh binary basis and
    /// merged into the reduced circuit. Requires `x <= 0 <= k`.
    pub fn literal(&mut self, u: &BigInt, x: &BigInt, k: &BigInt, ty: u8) -> Result<TypedTriple> {
        if x.sign() == num_bigint::Sign::Plus || k.sign() == num_bigint::Sign::Minus {
            return Err(CircuitError::PreconditionViolated(
                "literal needs x <= 0 <= k",
            ));
        }
        let mut tmp = PowerCircuit::new();
        let ms = integers_over_basis(&mut tmp, &[u, x, k]);
        let (map, _) = self.tree.circuit_mut().absorb(&tmp);
        let [mu, mx, mk]: [Marking; 3] = ms
            .into_iter()
            .map(|m| m.remap(|n| map[&n]))
            .collect::<Vec<_>>()
            .try_into()
            .unwrap();
        self.finish(mu, mx, mk, ty)
    }

    pub fn identity(&mut self, ty: u8) -> Result<TypedTriple> {
        self.finish(Marking::new(), Marking::new(), Marking::new(), ty)
    }

    /// Raw marking of value `e(m) · 2^{e(e)}` built from clones. The caller
    /// guarantees every node of the result has an integral value.
    fn scaled(&mut self, m: &Marking, e: &Marking) -> Result<Marking> {
        if e.is_empty() || m.is_empty() {
            return Ok(m.clone());
        }
        let c = self.tree.circuit_mut();
        let v = c.clone_marking(m)?;
        c.mul_pow2(&v, e)
    }

    fn add(&mut self, a: &Marking, b: &Marking) -> Result<Marking> {
        self.tree.circuit_mut().add_markings(a, b)
    }

    /// Multiplication (same type):
    /// `[u,x,k]·[v,y,l] = [u 2^{-y} + v 2^k, x+y, k+l]`. Consumes both.
    pub fn mul(&mut self, a: TypedTriple, b: TypedTriple) -> Result<TypedTriple> {
        if a.ty != b.ty {
            return Err(CircuitError::PreconditionViolated(
                "multiplying triples of different types",
            ));
        }
        let (u, x, k) = (self.u(&a).clone(), self.x(&a).clone(), self.k(&a).clone());
        let (v, y, l) = (self.u(&b).clone(), self.x(&b).clone(), self.k(&b).clone());
        let u1 = self.scaled(&u, &y.negate())?;
        let v1 = self.scaled(&v, &k)?;
        let nu = self.add(&u1, &v1)?;
        let nx = self.add(&x, &y)?;
        let nk = self.add(&k, &l)?;
        let t = self.finish(nu, nx, nk, a.ty)?;
        self.release(a);
        self.release(b);
        self.stats.basic_ops += 1;
        Ok(t)
    }

    /// `[0,x,k]_{(p,p+1)} = [x+k,0,0]_{(p+1,p+2)}`. Consumes `t`.
    pub fn swap_up(&mut self, t: TypedTriple) -> Result<TypedTriple> {
        if !self.u(&t).is_empty() {
            return Err(CircuitError::PreconditionViolated("swap up needs u = 0"));
        }
        let (x, k) = (self.x(&t).clone(), self.k(&t).clone());
        let s = self.add(&x, &k)?;
        let r = self.finish(s, Marking::new(), Marking::new(), t.ty + 1)?;
        self.release(t);
        self.stats.basic_ops += 1;
        Ok(r)
    }

    /// `[z,0,0]_{(p+1,p+2)}` becomes `[0,0,z]_{(p,p+1)}` for `z >= 0` and
    /// `[0,z,0]_{(p,p+1)}` for `z < 0`. Consumes `t`.
    pub fn swap_down(&mut self, t: TypedTriple) -> Result<TypedTriple> {
        if !self.x(&t).is_empty() || !self.k(&t).is_empty() {
            return Err(CircuitError::PreconditionViolated(
                "swap down needs x = k = 0",
            ));
        }
        let z = self.u(&t).clone();
        let ty = t.ty + 3;
        let r = if self.tree.sign_of(&z)? >= 0 {
            self.finish(Marking::new(), Marking::new(), z, ty)?
        } else {
            self.finish(Marking::new(), z, Marking::new(), ty)?
        };
        self.release(t);
        self.stats.basic_ops += 1;
        Ok(r)
    }

    /// Whether `u · 2^{e(e)}` is an integer. For compact `U` the 2-adic
    /// valuation of `u` is the exponent of its least significant node.
    pub fn scales_to_integer(&self, u: &Marking, e: &Marking) -> Result<bool> {
        let Some(low) = self.tree.lowest_node(u) else {
            return Ok(true);
        };
        let lambda = self.circuit().succ(low);
        Ok(self.tree.compare(lambda, &e.negate())?.0 != Ordering::Less)
    }

    /// `u 2^x ∈ ℤ`.
    pub fn low_splittable(&self, t: &TypedTriple) -> Result<bool> {
        self.scales_to_integer(self.u(t), self.x(t))
    }

    /// `u 2^{-k} ∈ ℤ`.
    pub fn high_splittable(&self, t: &TypedTriple) -> Result<bool> {
        self.scales_to_integer(self.u(t), &self.k(t).negate())
    }

    /// `[u,x,k] = [u 2^x,0,0]·[0,x,k]` when `u 2^x ∈ ℤ`. Consumes `t`.
    pub fn split_low(&mut self, t: TypedTriple) -> Result<Option<(TypedTriple, TypedTriple)>> {
        if !self.low_splittable(&t)? {
            return Ok(None);
        }
        let (u, x, k) = (self.u(&t).clone(), self.x(&t).clone(), self.k(&t).clone());
        let z = self.scaled(&u, &x)?;
        let [left, right] = self.finish_all([
            (z, Marking::new(), Marking::new(), t.ty),
            (Marking::new(), x, k, t.ty),
        ])?;
        self.release(t);
        self.stats.basic_ops += 1;
        Ok(Some((left, right)))
    }

    /// `[u,x,k] = [0,x,k]·[u 2^{-k},0,0]` when `u 2^{-k} ∈ ℤ`. Consumes `t`.
    pub fn split_high(&mut self, t: TypedTriple) -> Result<Option<(TypedTriple, TypedTriple)>> {
        if !self.high_splittable(&t)? {
            return Ok(None);
        }
        let (u, x, k) = (self.u(&t).clone(), self.x(&t).clone(), self.k(&t).clone());
        let z = self.scaled(&u, &k.negate())?;
        let [left, right] = self.finish_all([
            (Marking::new(), x, k, t.ty),
            (z, Marking::new(), Marking::new(), t.ty),
        ])?;
        self.release(t);
        self.stats.basic_ops += 1;
        Ok(Some((left, right)))
    }

    /// `[u,x,k]^{-1} = [-u,-k,-x]`. Does not consume `t`.
    pub fn inverse(&mut self, t: &TypedTriple) -> Result<TypedTriple> {
        let (u, x, k) = (self.u(t).negate(), self.x(t).negate(), self.k(t).negate());
        self.finish(u, k, x, t.ty)
    }

    /// Independent copy of `t` (shares nodes, not handles).
    pub fn duplicate(&mut self, t: &TypedTriple) -> Result<TypedTriple> {
        let (u, x, k) = (self.u(t).clone(), self.x(t).clone(), self.k(t).clone());
        self.finish(u, x, k, t.ty)
    }

    /// The element `a_p^r a_{p+1}^m` of ℤ[1/2]⋊ℤ with `r = u 2^x` and
    /// `m = x + k`, swapped to `(m, r)`. `None` when `r ∉ ℤ`. Consumes `t`
    /// on success.
    pub fn sdp_swap(&mut self, t: TypedTriple) -> Result<Option<TypedTriple>> {
        if !self.low_splittable(&t)? {
            return Ok(None);
        }
        let (u, x, k) = (self.u(&t).clone(), self.x(&t).clone(), self.k(&t).clone());
        let z = self.scaled(&u, &x)?;
        let m = self.add(&x, &k)?;
        let r = if self.tree.sign_of(&u)? >= 0 {
            self.finish(m, Marking::new(), z, t.ty)?
        } else {
            // (m, z) with z < 0 is [m 2^{-z}, z, 0]
            let nz = z.negate();
            let c = self.tree.circuit_mut();
            let mc = c.clone_marking(&m)?;
            let zc = c.clone_marking(&nz)?;
            let scaled = c.mul_pow2(&mc, &zc)?;
            self.finish(scaled, z, Marking::new(), t.ty)?
        };
        self.release(t);
        self.stats.basic_ops += 1;
        Ok(Some(r))
    }

    /// `u = 0`.
    pub fn u_is_zero(&self, t: &TypedTriple) -> bool {
        self.u(t).is_empty()
    }

    /// `x + k = 0`. Leaves are unique per value, so this is syntactic.
    pub fn exponent_sum_is_zero(&self, t: &TypedTriple) -> bool {
        *self.x(t) == self.k(t).negate()
    }

    /// The triple denotes the identity.
    pub fn is_identity(&self, t: &TypedTriple) -> bool {
        self.u_is_zero(t) && self.exponent_sum_is_zero(t)
    }
}
