//! The raw power-circuit DAG and the arithmetic that works on the graph
//! representation: cloning, addition of markings, multiplication by `2^x`.
//!
//! A node `P` evaluates to `2^{e(Λ_P)}` where `Λ_P` is the marking formed by
//! its outgoing arcs; a marking evaluates to the signed sum of its nodes.
//! Nothing here checks that values are integers; see [`crate::tree`].

use std::collections::{HashMap, HashSet};

use crate::error::{CircuitError, Result};
use crate::marking::{Marking, NodeId, Sign};

/// Handle of a marking owned by a circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MarkingId(pub u32);

#[derive(Debug, Clone, Default)]
struct Node {
    succ: Marking,
    in_degree: u32,
    marking_refs: u32,
}

/// A DAG with arc signs in `{-1, +1}` plus a set of owned markings.
///
/// Node deletion is explicit and only allowed for nodes that are neither the
/// target of an arc nor part of a registered marking.
#[derive(Debug, Clone, Default)]
pub struct PowerCircuit {
    nodes: Vec<Option<Node>>,
    markings: Vec<Option<Marking>>,
    live: usize,
    arcs: usize,
}

impl PowerCircuit {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node_count(&self) -> usize {
        self.live
    }

    pub fn arc_count(&self) -> usize {
        self.arcs
    }

    /// One past the largest id ever handed out. New nodes get ids `>= id_bound()`.
    pub fn id_bound(&self) -> usize {
        self.nodes.len()
    }

    pub fn contains(&self, node: NodeId) -> bool {
        matches!(self.nodes.get(node.index()), Some(Some(_)))
    }

    fn node(&self, id: NodeId) -> Result<&Node> {
        self.nodes
            .get(id.index())
            .and_then(Option::as_ref)
            .ok_or(CircuitError::UnknownNode(id))
    }

    fn node_mut(&mut self, id: NodeId) -> Result<&mut Node> {
        self.nodes
            .get_mut(id.index())
            .and_then(Option::as_mut)
            .ok_or(CircuitError::UnknownNode(id))
    }

    /// Live node ids in ascending order.
    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.is_some())
            .map(|(i, _)| NodeId(i as u32))
    }

    /// Λ_P, the successor marking of `node`. Panics on unknown nodes.
    pub fn succ(&self, node: NodeId) -> &Marking {
        &self.node(node).expect("succ of unknown node").succ
    }

    pub fn in_degree(&self, node: NodeId) -> u32 {
        self.node(node).map(|n| n.in_degree).unwrap_or(0)
    }

    /// Number of registered markings containing `node`.
    pub fn marking_refs(&self, node: NodeId) -> u32 {
        self.node(node).map(|n| n.marking_refs).unwrap_or(0)
    }

    pub fn check_marking(&self, m: &Marking) -> Result<()> {
        for n in m.nodes() {
            self.node(n)?;
        }
        Ok(())
    }

    /// Adds a node `P` with `Λ_P = succ`. The new node has no incoming arcs.
    pub fn add_node(&mut self, succ: &Marking) -> Result<NodeId> {
        self.check_marking(succ)?;
        let id = NodeId(self.nodes.len() as u32);
        for t in succ.nodes() {
            self.node_mut(t)?.in_degree += 1;
        }
        self.arcs += succ.len();
        self.nodes.push(Some(Node {
            succ: succ.clone(),
            in_degree: 0,
            marking_refs: 0,
        }));
        self.live += 1;
        Ok(id)
    }

    /// Inserts a node under a caller-chosen id. Arcs are added separately.
    pub(crate) fn insert_leaf_with_id(&mut self, id: NodeId) -> Result<()> {
        if self.contains(id) {
            return Err(CircuitError::DuplicateNode(id));
        }
        if self.nodes.len() <= id.index() {
            self.nodes.resize_with(id.index() + 1, || None);
        }
        self.nodes[id.index()] = Some(Node::default());
        self.live += 1;
        Ok(())
    }

    /// Adds the arc `from -> to` without a cycle check.
    pub(crate) fn add_arc_unchecked(&mut self, from: NodeId, to: NodeId, sign: Sign) -> Result<()> {
        self.node(to)?;
        let n = self.node_mut(from)?;
        if n.succ.contains(to) {
            return Err(CircuitError::DuplicateArc(from, to));
        }
        n.succ.set(to, Some(sign));
        self.node_mut(to)?.in_degree += 1;
        self.arcs += 1;
        Ok(())
    }

    /// Adds the arc `from -> to`, refusing to close a cycle.
    pub fn add_arc(&mut self, from: NodeId, to: NodeId, sign: Sign) -> Result<()> {
        self.node(from)?;
        self.node(to)?;
        if from == to || self.reaches(to, from) {
            return Err(CircuitError::Cycle(from, to));
        }
        self.add_arc_unchecked(from, to, sign)
    }

    pub fn remove_arc(&mut self, from: NodeId, to: NodeId) -> Result<Option<Sign>> {
        let n = self.node_mut(from)?;
        let old = n.succ.get(to);
        if old.is_some() {
            n.succ.set(to, None);
            self.node_mut(to)?.in_degree -= 1;
            self.arcs -= 1;
        }
        Ok(old)
    }

    fn reaches(&self, from: NodeId, target: NodeId) -> bool {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![from];
        while let Some(n) = stack.pop() {
            if n == target {
                return true;
            }
            if std::mem::replace(&mut seen[n.index()], true) {
                continue;
            }
            stack.extend(self.succ(n).nodes());
        }
        false
    }

    /// Deletes a node that is not referenced by any arc or registered marking.
    pub fn remove_node(&mut self, id: NodeId) -> Result<()> {
        let n = self.node(id)?;
        if n.in_degree > 0 || n.marking_refs > 0 {
            return Err(CircuitError::NodeInUse(id));
        }
        let succ = self.nodes[id.index()].take().unwrap().succ;
        for t in succ.nodes() {
            self.node_mut(t)?.in_degree -= 1;
        }
        self.arcs -= succ.len();
        self.live -= 1;
        Ok(())
    }

    /// Clones `P`: a fresh node with the same successor marking and no incoming arcs.
    pub fn clone_node(&mut self, p: NodeId) -> Result<NodeId> {
        let succ = self.node(p)?.succ.clone();
        self.add_node(&succ)
    }

    /// Clones every node of σ(M). The result is a source with the same value.
    pub fn clone_marking(&mut self, m: &Marking) -> Result<Marking> {
        self.check_marking(m)?;
        m.iter()
            .map(|(n, s)| Ok((self.clone_node(n)?, s)))
            .collect()
    }

    /// `M + K`. Nodes carrying coefficient ±2 are cloned, and both the node
    /// and its clone are marked with ±1.
    pub fn add_markings(&mut self, m: &Marking, k: &Marking) -> Result<Marking> {
        self.check_marking(m)?;
        self.check_marking(k)?;
        let mut out = m.clone();
        for (n, s) in k.iter() {
            match out.get(n) {
                None => out.set(n, Some(s)),
                Some(t) if t != s => out.set(n, None),
                Some(_) => {
                    let c = self.clone_node(n)?;
                    out.set(c, Some(s));
                }
            }
        }
        Ok(out)
    }

    /// No node of σ(M) has an incoming arc.
    pub fn is_source(&self, m: &Marking) -> bool {
        m.nodes().all(|n| self.in_degree(n) == 0)
    }

    /// A marking of value `e(U) * 2^{e(X)}` with the same support size as `U`.
    ///
    /// `U` is cloned unless it is a source none of whose nodes belongs to a
    /// registered marking; `X` is always cloned so no parallel arcs arise.
    pub fn mul_pow2(&mut self, u: &Marking, x: &Marking) -> Result<Marking> {
        self.check_marking(u)?;
        self.check_marking(x)?;
        if x.is_empty() {
            return self.clone_marking(u);
        }
        let exclusive = self.is_source(u) && u.nodes().all(|n| self.marking_refs(n) == 0);
        let v = if exclusive {
            u.clone()
        } else {
            self.clone_marking(u)?
        };
        if v.is_empty() {
            return Ok(v);
        }
        let xc = self.clone_marking(x)?;
        for p in v.nodes() {
            for (q, s) in xc.iter() {
                self.add_arc_unchecked(p, q, s)?;
            }
        }
        Ok(v)
    }

    pub fn register_marking(&mut self, m: Marking) -> Result<MarkingId> {
        self.check_marking(&m)?;
        for n in m.nodes() {
            self.node_mut(n)?.marking_refs += 1;
        }
        self.markings.push(Some(m));
        Ok(MarkingId(self.markings.len() as u32 - 1))
    }

    pub fn marking(&self, id: MarkingId) -> &Marking {
        self.markings
            .get(id.0 as usize)
            .and_then(Option::as_ref)
            .expect("unknown marking handle")
    }

    pub fn try_marking(&self, id: MarkingId) -> Result<&Marking> {
        self.markings
            .get(id.0 as usize)
            .and_then(Option::as_ref)
            .ok_or(CircuitError::UnknownMarking(id.0))
    }

    /// Replaces the contents of a registered marking.
    pub fn replace_marking(&mut self, id: MarkingId, m: Marking) -> Result<Marking> {
        self.check_marking(&m)?;
        self.try_marking(id)?;
        for n in m.nodes() {
            self.node_mut(n)?.marking_refs += 1;
        }
        let old = self.markings[id.0 as usize].replace(m).unwrap();
        for n in old.nodes() {
            if let Ok(node) = self.node_mut(n) {
                node.marking_refs -= 1;
            }
        }
        Ok(old)
    }

    pub fn release_marking(&mut self, id: MarkingId) -> Result<Marking> {
        self.try_marking(id)?;
        let old = self.markings[id.0 as usize].take().unwrap();
        for n in old.nodes() {
            if let Ok(node) = self.node_mut(n) {
                node.marking_refs -= 1;
            }
        }
        Ok(old)
    }

    pub fn marking_ids(&self) -> Vec<MarkingId> {
        self.markings
            .iter()
            .enumerate()
            .filter(|(_, m)| m.is_some())
            .map(|(i, _)| MarkingId(i as u32))
            .collect()
    }

    /// Every node after all of its successors (leaves first).
    pub fn bottom_up_order(&self) -> Vec<NodeId> {
        self.bottom_up_order_of(self.node_ids())
    }

    /// Bottom-up order of the sub-DAG induced by `nodes`, ignoring arcs that leave it.
    pub fn bottom_up_order_of(&self, nodes: impl IntoIterator<Item = NodeId>) -> Vec<NodeId> {
        let nodes: Vec<NodeId> = nodes.into_iter().collect();
        let inside: HashSet<NodeId> = nodes.iter().copied().collect();
        // Kahn on the reversed relation: a node is ready once all successors are placed.
        let mut pending: HashMap<NodeId, usize> = HashMap::with_capacity(nodes.len());
        let mut preds: HashMap<NodeId, Vec<NodeId>> = HashMap::new();
        let mut ready = Vec::new();
        for &n in &nodes {
            let mut c = 0;
            for t in self.succ(n).nodes() {
                if inside.contains(&t) {
                    c += 1;
                    preds.entry(t).or_default().push(n);
                }
            }
            if c == 0 {
                ready.push(n);
            }
            pending.insert(n, c);
        }
        ready.reverse();
        let mut out = Vec::with_capacity(nodes.len());
        while let Some(n) = ready.pop() {
            out.push(n);
            if let Some(ps) = preds.get(&n) {
                for &p in ps {
                    let c = pending.get_mut(&p).unwrap();
                    *c -= 1;
                    if *c == 0 {
                        ready.push(p);
                    }
                }
            }
        }
        out
    }

    pub fn is_acyclic(&self) -> bool {
        self.bottom_up_order().len() == self.live
    }

    /// Moves all nodes and markings of `other` into `self` under fresh ids.
    /// Returns the node map and the new handles of `other`'s markings.
    pub fn absorb(
        &mut self,
        other: &PowerCircuit,
    ) -> (HashMap<NodeId, NodeId>, HashMap<MarkingId, MarkingId>) {
        let mut map = HashMap::with_capacity(other.live);
        for n in other.bottom_up_order() {
            let succ = other.succ(n).remap(|t| map[&t]);
            let id = self.add_node(&succ).expect("absorb: successors exist");
            map.insert(n, id);
        }
        let mut handles = HashMap::new();
        for h in other.marking_ids() {
            let m = other.marking(h).remap(|t| map[&t]);
            handles.insert(
                h,
                self.register_marking(m)
                    .expect("absorb: marking nodes exist"),
            );
        }
        (map, handles)
    }

    /// Copies the sub-DAG reachable from `roots` into a fresh circuit.
    /// Returns the copy and the map from old to new node ids.
    pub fn extract(&self, roots: &[&Marking]) -> (PowerCircuit, HashMap<NodeId, NodeId>) {
        let mut seen = HashSet::new();
        let mut stack: Vec<NodeId> = roots.iter().flat_map(|m| m.nodes()).collect();
        let mut reach = Vec::new();
        while let Some(n) = stack.pop() {
            if !seen.insert(n) {
                continue;
            }
            reach.push(n);
            stack.extend(self.succ(n).nodes());
        }
        let mut out = PowerCircuit::new();
        let mut map = HashMap::with_capacity(reach.len());
        for n in self.bottom_up_order_of(reach) {
            let succ = self.succ(n).remap(|t| map[&t]);
            map.insert(n, out.add_node(&succ).unwrap());
        }
        (out, map)
    }

    /// Removes every node that is unreachable from registered markings.
    pub fn collect_garbage(&mut self) -> usize {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack: Vec<NodeId> = self
            .markings
            .iter()
            .flatten()
            .flat_map(|m| m.nodes())
            .collect();
        while let Some(n) = stack.pop() {
            if std::mem::replace(&mut seen[n.index()], true) {
                continue;
            }
            stack.extend(self.succ(n).nodes());
        }
        let dead: Vec<NodeId> = self.node_ids().filter(|n| !seen[n.index()]).collect();
        // Sources first so that in-degrees drop to zero as we go.
        let mut order = self.bottom_up_order_of(dead.iter().copied());
        order.reverse();
        for &n in &order {
            self.remove_node(n).expect("garbage node is unreferenced");
        }
        order.len()
    }
}
