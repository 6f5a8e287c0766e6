//! Tree representation of a power circuit and the reduction procedures.
//!
//! The reduced part Γ of the circuit is kept as a list of nodes sorted
//! strictly by value together with, for every node, a pointer to the node of
//! twice its value (the doubling bit vector in pointer form). Every successor
//! marking of a node in Γ and every registered marking is kept *compact*: no
//! two marked nodes have values in ratio 1 or 2. Compact markings are
//! non-adjacent signed-digit expansions, hence unique per value, and compare
//! most-significant-node first.
//!
//! Nodes of the circuit that are not (yet) in Γ are *pending*. They are
//! integrated by [`TreeRep::extend_tree`], which maps each pending node onto
//! a node of Γ with equal value, creating nodes where needed.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use crate::circuit::{MarkingId, PowerCircuit};
use crate::error::{CircuitError, Result};
use crate::marking::{Marking, NodeId, Sign};

const NOT_IN_GAMMA: usize = usize::MAX;

static EXTEND_CALLS: AtomicU64 = AtomicU64::new(0);
static BOUND_VIOLATIONS: AtomicU64 = AtomicU64::new(0);

/// Process-wide count of `extend_tree` calls and of calls that broke the
/// size bound or the potential bound `pot <= |Γ|²`.
pub fn extend_audit() -> (u64, u64) {
    (
        EXTEND_CALLS.load(AtomicOrdering::Relaxed),
        BOUND_VIOLATIONS.load(AtomicOrdering::Relaxed),
    )
}

/// Whether two compared values differ by exactly one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gap {
    DiffOne,
    DiffAtLeastTwo,
    /// The values are equal.
    NotApplicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainStats {
    /// c(Π): number of maximal chains.
    pub chain_count: usize,
    /// pot(Π) = c(Π) · |Γ|.
    pub potential: usize,
}

/// Bookkeeping returned by [`TreeRep::extend_tree`].
#[derive(Debug, Clone, Default)]
pub struct ExtendReport {
    /// Each integrated node and the node of Γ' with the same value.
    pub node_map: HashMap<NodeId, NodeId>,
    pub gamma_before: usize,
    pub gamma_after: usize,
    pub integrated: usize,
    /// Nodes of Γ in listed markings that were not leaves. Callers that skip
    /// cloning such markings would otherwise have passed these nodes as
    /// pending copies, so they count towards |U| in the size bound.
    pub uncloned: usize,
    pub chains_before: usize,
    pub chains_after: usize,
}

impl ExtendReport {
    /// |Γ'| <= |Γ| + 3|U| + (c(Π) - c(Π')) with |U| = integrated + uncloned.
    pub fn size_bound_holds(&self) -> bool {
        let u = (self.integrated + self.uncloned) as i64;
        self.gamma_after as i64
            <= self.gamma_before as i64 + 3 * u + self.chains_before as i64
                - self.chains_after as i64
    }
}

#[derive(Debug, Clone)]
pub struct TreeRep {
    circuit: PowerCircuit,
    order: Vec<NodeId>,
    pos: Vec<usize>,
    dbl: Vec<Option<NodeId>>,
    by_exponent: HashMap<Marking, NodeId>,
    one: Option<NodeId>,
    /// Number of maximal chains, kept up to date by insertion.
    chains: usize,
    /// Ids below this bound are either in Γ or were already deleted.
    watermark: usize,
}

impl Default for TreeRep {
    fn default() -> Self {
        Self::new(PowerCircuit::new())
    }
}

impl TreeRep {
    /// Wraps a circuit with an empty Γ; all of its nodes are pending.
    pub fn new(circuit: PowerCircuit) -> Self {
        TreeRep {
            circuit,
            order: Vec::new(),
            pos: Vec::new(),
            dbl: Vec::new(),
            by_exponent: HashMap::new(),
            one: None,
            chains: 0,
            watermark: 0,
        }
    }

    /// MakeTree: reduce a whole circuit, rewriting all registered markings in place.
    ///
    /// Fails with [`CircuitError::NotAPowerCircuit`] when some node value is not an integer.
    pub fn make_tree(circuit: PowerCircuit) -> Result<(TreeRep, ExtendReport)> {
        let mut t = TreeRep::new(circuit);
        let handles = t.circuit.marking_ids();
        let report = t.extend_tree(&handles)?;
        Ok((t, report))
    }

    pub fn circuit(&self) -> &PowerCircuit {
        &self.circuit
    }

    pub fn into_circuit(self) -> PowerCircuit {
        self.circuit
    }

    /// Mutable access for operations that only create new (pending) nodes
    /// and manage markings. Arcs out of Γ must not be touched.
    pub(crate) fn circuit_mut(&mut self) -> &mut PowerCircuit {
        &mut self.circuit
    }

    /// |Γ|.
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Γ sorted by increasing value.
    pub fn order(&self) -> &[NodeId] {
        &self.order
    }

    pub fn in_gamma(&self, n: NodeId) -> bool {
        self.position(n).is_some()
    }

    pub fn position(&self, n: NodeId) -> Option<usize> {
        match self.pos.get(n.index()) {
            Some(&p) if p != NOT_IN_GAMMA => Some(p),
            _ => None,
        }
    }

    fn pos_of(&self, n: NodeId) -> usize {
        self.pos[n.index()]
    }

    /// The node of value 1, if present.
    pub fn value_one(&self) -> Option<NodeId> {
        self.one
    }

    /// The node with twice the value of `n`, if present.
    pub fn double_of(&self, n: NodeId) -> Option<NodeId> {
        self.dbl.get(n.index()).copied().flatten()
    }

    /// b(i) = 1 iff e(P_{i+1}) = 2 e(P_i), for consecutive nodes of Γ.
    pub fn doubling_bits(&self) -> Vec<bool> {
        self.order
            .windows(2)
            .map(|w| self.double_of(w[0]) == Some(w[1]))
            .collect()
    }

    pub fn chain_stats(&self) -> ChainStats {
        ChainStats {
            chain_count: self.chains,
            potential: self.chains * self.order.len(),
        }
    }

    fn starts_chain(&self, i: usize) -> bool {
        i == 0 || self.double_of(self.order[i - 1]) != Some(self.order[i])
    }

    /// Nodes created since the last [`extend_tree`](Self::extend_tree).
    pub fn pending_nodes(&self) -> Vec<NodeId> {
        (self.watermark..self.circuit.id_bound())
            .map(|i| NodeId(i as u32))
            .filter(|&n| self.circuit.contains(n) && !self.in_gamma(n))
            .collect()
    }

    fn grow_index(&mut self) {
        let need = self.circuit.id_bound();
        if self.pos.len() < need {
            self.pos.resize(need, NOT_IN_GAMMA);
            self.dbl.resize(need, None);
        }
    }

    /// Compact and supported in Γ.
    pub fn is_leaf(&self, m: &Marking) -> bool {
        let mut ps: Vec<usize> = Vec::with_capacity(m.len());
        for n in m.nodes() {
            match self.position(n) {
                Some(p) => ps.push(p),
                None => return false,
            }
        }
        ps.sort_unstable();
        ps.windows(2).all(|w| {
            let (lo, hi) = (self.order[w[0]], self.order[w[1]]);
            self.double_of(lo) != Some(hi)
        })
    }

    fn check_leaf(&self, m: &Marking) -> Result<()> {
        if self.is_leaf(m) {
            Ok(())
        } else {
            Err(CircuitError::NotALeaf)
        }
    }

    /// Compares e(K) and e(M) for two leaves in O(|σ(K)| + |σ(M)|) after sorting.
    pub fn compare(&self, k: &Marking, m: &Marking) -> Result<(Ordering, Gap)> {
        self.check_leaf(k)?;
        self.check_leaf(m)?;
        Ok(self.compare_unchecked(k, m))
    }

    fn compare_unchecked(&self, k: &Marking, m: &Marking) -> (Ordering, Gap) {
        let mut terms: Vec<(usize, i64)> = Vec::with_capacity(k.len() + m.len());
        terms.extend(k.iter().map(|(n, s)| (self.pos_of(n), s.to_i64())));
        terms.extend(m.iter().map(|(n, s)| (self.pos_of(n), -s.to_i64())));
        terms.sort_unstable_by_key(|t| std::cmp::Reverse(t.0));
        // Walk from the most significant position down, keeping the
        // difference as c * e(current). Once |c| >= 3 the remaining lower
        // terms (bounded by 4/3 e(current)) cannot change the sign nor bring
        // the difference down to 1.
        let mut c: i64 = 0;
        let mut prev: Option<usize> = None;
        let mut i = 0;
        while i < terms.len() {
            let p = terms[i].0;
            let mut d = 0;
            while i < terms.len() && terms[i].0 == p {
                d += terms[i].1;
                i += 1;
            }
            if d == 0 {
                continue;
            }
            if let Some(pp) = prev {
                if c != 0 {
                    let doubling =
                        pp == p + 1 && self.double_of(self.order[p]) == Some(self.order[pp]);
                    c *= if doubling { 2 } else { 4 };
                }
            }
            c += d;
            prev = Some(p);
            if c.abs() >= 3 {
                return (c.cmp(&0), Gap::DiffAtLeastTwo);
            }
        }
        match c.cmp(&0) {
            Ordering::Equal => (Ordering::Equal, Gap::NotApplicable),
            ord => {
                let lowest = self.order[prev.unwrap()];
                let gap = if c.abs() == 1 && Some(lowest) == self.one {
                    Gap::DiffOne
                } else {
                    Gap::DiffAtLeastTwo
                };
                (ord, gap)
            }
        }
    }

    /// Sign of e(M) for a leaf: the sign of its most significant node.
    pub fn sign_of(&self, m: &Marking) -> Result<i32> {
        self.check_leaf(m)?;
        Ok(self.sign_unchecked(m))
    }

    fn sign_unchecked(&self, m: &Marking) -> i32 {
        m.iter()
            .max_by_key(|(n, _)| self.pos_of(*n))
            .map_or(0, |(_, s)| s.to_i64() as i32)
    }

    /// The least significant node of a leaf.
    pub fn lowest_node(&self, m: &Marking) -> Option<NodeId> {
        m.nodes().min_by_key(|&n| self.pos_of(n))
    }

    /// Inserts a node with successor marking `leaf`, or returns the existing
    /// node of value `2^{e(leaf)}`.
    pub fn insert_node(&mut self, leaf: &Marking) -> Result<NodeId> {
        self.check_leaf(leaf)?;
        Ok(self.insert_node_unchecked(leaf))
    }

    fn insert_node_unchecked(&mut self, leaf: &Marking) -> NodeId {
        if let Some(&n) = self.by_exponent.get(leaf) {
            return n;
        }
        let idx = self.order.partition_point(|&n| {
            self.compare_unchecked(self.circuit.succ(n), leaf).0 == Ordering::Less
        });
        let id = self.circuit.add_node(leaf).expect("leaf nodes exist");
        self.grow_index();
        self.order.insert(idx, id);
        for (i, &n) in self.order.iter().enumerate().skip(idx) {
            self.pos[n.index()] = i;
        }
        self.by_exponent.insert(leaf.clone(), id);
        if leaf.is_empty() {
            self.one = Some(id);
        }
        if idx > 0 {
            let pred = self.order[idx - 1];
            debug_assert!(self
                .double_of(pred)
                .is_none_or(|d| d != self.order.get(idx + 1).copied().unwrap_or(d)));
            let linked = self.is_successor_exponent(self.circuit.succ(pred), leaf);
            self.dbl[pred.index()] = linked.then_some(id);
        }
        let has_next = idx + 1 < self.order.len();
        if has_next {
            let next = self.order[idx + 1];
            let linked = self.is_successor_exponent(leaf, self.circuit.succ(next));
            self.dbl[id.index()] = linked.then_some(next);
        }
        // `next` started a chain before (nothing fits between two doubling nodes)
        self.chains = self.chains - has_next as usize
            + self.starts_chain(idx) as usize
            + (has_next && self.starts_chain(idx + 1)) as usize;
        id
    }

    /// e(b) = e(a) + 1 for two leaves.
    fn is_successor_exponent(&self, a: &Marking, b: &Marking) -> bool {
        self.compare_unchecked(b, a) == (Ordering::Greater, Gap::DiffOne)
    }

    fn ensure_one(&mut self) -> NodeId {
        match self.one {
            Some(n) => n,
            None => self.insert_node_unchecked(&Marking::new()),
        }
    }

    /// Creates (or finds) the node of value 2·e(p).
    fn create_double(&mut self, p: NodeId) -> NodeId {
        if let Some(d) = self.double_of(p) {
            return d;
        }
        let succ = self.circuit.succ(p).clone();
        let one = self.ensure_one();
        let mut coeffs: Vec<(NodeId, i64)> = succ.iter().map(|(n, s)| (n, s.to_i64())).collect();
        coeffs.push((one, 1));
        let inc = self
            .normalize(coeffs, true)
            .expect("growing normalization cannot fail");
        self.insert_node_unchecked(&inc)
    }

    /// Rewrites an integer combination of Γ-nodes into the compact marking of
    /// the same value (non-adjacent form along doubling chains).
    ///
    /// With `grow == false` no nodes are created and a carry past the top of a
    /// chain is an error; with `grow == true` the missing doubles are inserted.
    fn normalize(&mut self, mut coeffs: Vec<(NodeId, i64)>, grow: bool) -> Result<Marking> {
        coeffs.sort_unstable_by_key(|(n, _)| self.pos_of(*n));
        let mut rem: Vec<(NodeId, i64)> = Vec::with_capacity(coeffs.len());
        for (n, c) in coeffs {
            match rem.last_mut() {
                Some(last) if last.0 == n => last.1 += c,
                _ => rem.push((n, c)),
            }
        }
        let mut out = Marking::new();
        let mut carry: Option<(NodeId, i64)> = None;
        let mut i = 0;
        loop {
            let (p, c) = match carry.take() {
                Some((d, cr)) => {
                    if i < rem.len() && rem[i].0 == d {
                        i += 1;
                        (d, cr + rem[i - 1].1)
                    } else {
                        (d, cr)
                    }
                }
                None => {
                    if i >= rem.len() {
                        break;
                    }
                    i += 1;
                    rem[i - 1]
                }
            };
            if c == 0 {
                continue;
            }
            let dp = self.double_of(p);
            let next_coeff = match dp {
                Some(d) if i < rem.len() && rem[i].0 == d => rem[i].1,
                _ => 0,
            };
            let digit = if c % 2 == 0 {
                0
            } else if (c + 2 * next_coeff).rem_euclid(4) == 1 {
                1
            } else {
                -1
            };
            if let Some(s) = Sign::from_i64(digit) {
                out.set(p, Some(s));
            }
            let cr = (c - digit) / 2;
            if cr != 0 {
                let d = match dp {
                    Some(d) => d,
                    None if grow => self.create_double(p),
                    None => {
                        return Err(CircuitError::PreconditionViolated(
                            "carry runs past the top of a chain",
                        ))
                    }
                };
                carry = Some((d, cr));
            }
        }
        Ok(out)
    }

    /// Makes a marking over Γ compact without creating nodes.
    ///
    /// Requires that every chain through a marked node ends in an unmarked
    /// node, so carries always find room.
    pub fn compactify(&mut self, raw: &Marking) -> Result<Marking> {
        self.check_gamma(raw)?;
        self.normalize(raw.iter().map(|(n, s)| (n, s.to_i64())).collect(), false)
    }

    /// Like [`compactify`](Self::compactify) but inserts missing doubles on demand.
    pub fn compactify_growing(&mut self, coeffs: Vec<(NodeId, i64)>) -> Result<Marking> {
        for &(n, _) in &coeffs {
            if !self.in_gamma(n) {
                return Err(CircuitError::NotALeaf);
            }
        }
        self.normalize(coeffs, true)
    }

    fn check_gamma(&self, m: &Marking) -> Result<()> {
        if m.nodes().all(|n| self.in_gamma(n)) {
            Ok(())
        } else {
            Err(CircuitError::NotALeaf)
        }
    }

    /// A (not necessarily compact) marking of value e(M) + 1 with support at
    /// most |σ(M)| + 1. Creates the nodes of value 1 and 2 if required.
    pub fn increment_leaf(&mut self, m: &Marking) -> Result<Marking> {
        self.check_leaf(m)?;
        let p0 = self.ensure_one();
        let mut out = m.clone();
        match m.get(p0) {
            Some(Sign::Minus) => out.set(p0, None),
            None => out.set(p0, Some(Sign::Plus)),
            Some(Sign::Plus) => {
                let p1 = self.create_double(p0);
                out.set(p0, None);
                debug_assert!(
                    out.get(p1).is_none(),
                    "compact marking cannot mark both 1 and 2"
                );
                out.set(p1, Some(Sign::Plus));
            }
        }
        Ok(out)
    }

    /// Inserts (or finds) a joker: the last node of the maximal chain starting
    /// at the value-1 node that is used by no marking and is not the value-1
    /// node itself.
    pub fn create_joker(&mut self) -> NodeId {
        let mut top = self.ensure_one();
        loop {
            while let Some(d) = self.double_of(top) {
                top = d;
            }
            let unused = self.circuit.in_degree(top) == 0 && self.circuit.marking_refs(top) == 0;
            if Some(top) != self.one && unused {
                return top;
            }
            top = self.create_double(top);
        }
    }

    /// ExtendTree: integrates all pending nodes into Γ.
    ///
    /// Pending nodes are processed bottom-up; each is mapped to the node of Γ
    /// with the same value (created if absent). The listed markings are then
    /// rewritten to compact markings over Γ of equal value and no larger
    /// support, and the pending nodes are deleted. Every registered marking
    /// that references a pending node must be listed.
    ///
    /// Returns [`CircuitError::NotAPowerCircuit`] if some pending node has a
    /// negative exponent; Γ then stays a valid tree representation but the
    /// pending nodes are left in place.
    pub fn extend_tree(&mut self, markings: &[MarkingId]) -> Result<ExtendReport> {
        self.grow_index();
        let pending = self.pending_nodes();
        let stats = self.chain_stats();
        let mut report = ExtendReport {
            gamma_before: self.len(),
            integrated: pending.len(),
            chains_before: stats.chain_count,
            ..Default::default()
        };
        let bottom_up = self.circuit.bottom_up_order_of(pending.iter().copied());
        debug_assert_eq!(
            bottom_up.len(),
            pending.len(),
            "pending part must be acyclic"
        );
        for &q in &bottom_up {
            let coeffs = self.resolve(self.circuit.succ(q), &report.node_map);
            let leaf = self.normalize(coeffs, true)?;
            if self.sign_unchecked(&leaf) < 0 {
                return Err(CircuitError::NotAPowerCircuit);
            }
            let p = self.insert_node_unchecked(&leaf);
            report.node_map.insert(q, p);
        }
        for &h in markings {
            let m = self.circuit.try_marking(h)?;
            if self.is_leaf(m) {
                continue;
            }
            report.uncloned += m.nodes().filter(|&n| self.in_gamma(n)).count();
            let coeffs = self.resolve(m, &report.node_map);
            let leaf = self.normalize(coeffs, true)?;
            self.circuit.replace_marking(h, leaf)?;
        }
        for &q in bottom_up.iter().rev() {
            self.circuit.remove_node(q).map_err(|e| match e {
                CircuitError::NodeInUse(_) => CircuitError::PreconditionViolated(
                    "an unlisted marking references a pending node",
                ),
                e => e,
            })?;
        }
        self.watermark = self.circuit.id_bound();
        report.gamma_after = self.len();
        let stats = self.chain_stats();
        report.chains_after = stats.chain_count;
        EXTEND_CALLS.fetch_add(1, AtomicOrdering::Relaxed);
        let holds = report.size_bound_holds() && stats.potential <= self.len() * self.len();
        if !holds {
            BOUND_VIOLATIONS.fetch_add(1, AtomicOrdering::Relaxed);
        }
        debug_assert!(
            holds,
            "extend_tree bound: |Γ| {} -> {}, |U| {}+{}, chains {} -> {}, pot {}",
            report.gamma_before,
            report.gamma_after,
            report.integrated,
            report.uncloned,
            report.chains_before,
            report.chains_after,
            stats.potential
        );
        Ok(report)
    }

    fn resolve(&self, m: &Marking, map: &HashMap<NodeId, NodeId>) -> Vec<(NodeId, i64)> {
        m.iter()
            .map(|(n, s)| {
                let t = if self.in_gamma(n) { n } else { map[&n] };
                (t, s.to_i64())
            })
            .collect()
    }

    /// Checks the structural invariants: strict order, correct doubling
    /// pointers, compact successor markings and exponent index. O(|Γ|²).
    pub fn validate(&self) -> std::result::Result<(), String> {
        for (i, w) in self.order.windows(2).enumerate() {
            let (a, b) = (self.circuit.succ(w[0]), self.circuit.succ(w[1]));
            let (ord, gap) = self.compare_unchecked(b, a);
            if ord != Ordering::Greater {
                return Err(format!("order violated at {i}"));
            }
            let is_double = gap == Gap::DiffOne;
            if is_double != (self.double_of(w[0]) == Some(w[1])) {
                return Err(format!("doubling pointer wrong at {i}"));
            }
        }
        let counted = (0..self.order.len())
            .filter(|&i| self.starts_chain(i))
            .count();
        if counted != self.chains {
            return Err(format!(
                "chain count {} but {} chain starts",
                self.chains, counted
            ));
        }
        if let Some(&last) = self.order.last() {
            if self.double_of(last).is_some() {
                return Err("top node has a double pointer".into());
            }
        }
        for &n in &self.order {
            let s = self.circuit.succ(n);
            if !self.is_leaf(s) {
                return Err(format!("successor marking of {n} is not a leaf"));
            }
            if self.by_exponent.get(s) != Some(&n) {
                return Err(format!("exponent index stale for {n}"));
            }
            if self.sign_unchecked(s) < 0 {
                return Err(format!("node {n} has negative exponent"));
            }
        }
        Ok(())
    }
}
