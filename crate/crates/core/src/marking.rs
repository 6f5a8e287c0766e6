//! Node identifiers, arc signs and markings (signed sparse node sets).

use std::collections::btree_map::{self, BTreeMap};
use std::fmt;
use std::ops::Neg;

/// Stable identifier of a node inside one [`PowerCircuit`](crate::PowerCircuit).
///
/// Identifiers are handed out in increasing order and never reused.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

/// A nonzero sign. Absence from a map encodes 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    #[inline]
    pub fn to_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    /// `None` for 0.
    pub fn from_i64(v: i64) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// A signed subset of nodes, i.e. a map `node -> {-1, 0, +1}` with 0 left implicit.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Marking {
    signs: BTreeMap<NodeId, Sign>,
}

impl Marking {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(node: NodeId, sign: Sign) -> Self {
        let mut m = Self::new();
        m.set(node, Some(sign));
        m
    }

    pub fn get(&self, node: NodeId) -> Option<Sign> {
        self.signs.get(&node).copied()
    }

    /// Sets the sign of `node`; `None` removes it.
    pub fn set(&mut self, node: NodeId, sign: Option<Sign>) {
        match sign {
            Some(s) => {
                self.signs.insert(node, s);
            }
            None => {
                self.signs.remove(&node);
            }
        }
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.signs.contains_key(&node)
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, Sign)> + '_ {
        self.signs.iter().map(|(&n, &s)| (n, s))
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.signs.keys().copied()
    }

    /// σ(M): the nodes with nonzero sign.
    pub fn support(&self) -> Vec<NodeId> {
        self.signs.keys().copied().collect()
    }

    pub fn negate(&self) -> Marking {
        Marking {
            signs: self.signs.iter().map(|(&n, &s)| (n, -s)).collect(),
        }
    }

    pub fn is_disjoint(&self, other: &Marking) -> bool {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small.nodes().all(|n| !large.contains(n))
    }

    /// Union of two markings with disjoint supports.
    ///
    /// Panics if the supports overlap; use
    /// [`PowerCircuit::add_markings`](crate::PowerCircuit::add_markings) otherwise.
    pub fn disjoint_union(&self, other: &Marking) -> Marking {
        let mut out = self.clone();
        for (n, s) in other.iter() {
            let prev = out.signs.insert(n, s);
            assert!(
                prev.is_none(),
                "disjoint_union on overlapping supports at {n}"
            );
        }
        out
    }

    /// Applies a node substitution; nodes missing from `map` are kept.
    ///
    /// Panics if two nodes map to the same target.
    pub fn remap(&self, map: impl Fn(NodeId) -> NodeId) -> Marking {
        let mut out = Marking::new();
        for (n, s) in self.iter() {
            let prev = out.signs.insert(map(n), s);
            assert!(prev.is_none(), "remap is not injective on the support");
        }
        out
    }
}

impl FromIterator<(NodeId, Sign)> for Marking {
    fn from_iter<I: IntoIterator<Item = (NodeId, Sign)>>(iter: I) -> Self {
        Marking {
            signs: iter.into_iter().collect(),
        }
    }
}

impl<'a> IntoIterator for &'a Marking {
    type Item = (&'a NodeId, &'a Sign);
    type IntoIter = btree_map::Iter<'a, NodeId, Sign>;
    fn into_iter(self) -> Self::IntoIter {
        self.signs.iter()
    }
}

impl fmt::Display for Marking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("0");
        }
        for (i, (n, s)) in self.iter().enumerate() {
            if i > 0 || s == Sign::Minus {
                write!(f, "{s}")?;
            }
            write!(f, "{n}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(pairs: &[(u32, i64)]) -> Marking {
        pairs
            .iter()
            .map(|&(n, s)| (NodeId(n), Sign::from_i64(s).unwrap()))
            .collect()
    }

    #[test]
    fn support_of_empty_and_pair() {
        assert!(Marking::new().support().is_empty());
        assert_eq!(m(&[(1, 1), (2, -1)]).support(), vec![NodeId(1), NodeId(2)]);
    }

    #[test]
    fn negate_is_involution() {
        let a = m(&[(3, 1), (5, -1)]);
        assert_eq!(a.negate().get(NodeId(3)), Some(Sign::Minus));
        assert_eq!(a.negate().negate(), a);
        assert!(Marking::new().negate().is_empty());
    }

    #[test]
    #[should_panic]
    fn disjoint_union_rejects_overlap() {
        m(&[(1, 1)]).disjoint_union(&m(&[(1, -1)]));
    }
}
