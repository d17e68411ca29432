//! Finite quantum sets: ordered lists of labeled atoms, each a positive dimension.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Atom {
    pub label: String,
    pub dim: usize,
}

impl Atom {
    pub fn new(label: impl Into<String>, dim: usize) -> Self {
        Self {
            label: label.into(),
            dim,
        }
    }
}

/// A finite quantum set. Atom order is part of the value; all block indexing
/// elsewhere uses atom indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct QuantumSet {
    atoms: Vec<Atom>,
}

impl QuantumSet {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        let mut seen = HashSet::new();
        for a in &atoms {
            if a.dim == 0 {
                return Err(Error::InvalidDimension(format!(
                    "atom `{}` has dimension 0",
                    a.label
                )));
            }
            if !seen.insert(a.label.as_str()) {
                return Err(Error::DuplicateLabel(a.label.clone()));
            }
        }
        Ok(Self { atoms })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// One-dimensional atoms, one per label, in input order.
    pub fn classical<S: AsRef<str>>(labels: &[S]) -> Result<Self> {
        Self::new(
            labels
                .iter()
                .map(|l| Atom::new(l.as_ref(), 1))
                .collect(),
        )
    }

    /// The monoidal unit: a single one-dimensional atom.
    pub fn unit() -> Self {
        Self {
            atoms: vec![Atom::new("*", 1)],
        }
    }

    /// The quantum set with a single atom `ℂ^n`.
    pub fn qn(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension("Q_n needs n >= 1".into()));
        }
        Ok(Self {
            atoms: vec![Atom::new("Q", n)],
        })
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn dim(&self, i: usize) -> usize {
        self.atoms[i].dim
    }

    pub fn dims(&self) -> Vec<usize> {
        self.atoms.iter().map(|a| a.dim).collect()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.atoms[i].label
    }

    pub fn total_dim(&self) -> usize {
        self.atoms.iter().map(|a| a.dim).sum()
    }

    pub fn is_classical(&self) -> bool {
        self.atoms.iter().all(|a| a.dim == 1)
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a.label == label)
    }

    /// Offsets of each atom inside `ℂ^{total_dim}` for the block-diagonal embedding.
    pub fn offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.atoms
            .iter()
            .map(|a| {
                let o = acc;
                acc += a.dim;
                o
            })
            .collect()
    }

    /// Cartesian product; atom `(i, j)` sits at index `i·|Y| + j`.
    pub fn product(&self, other: &QuantumSet) -> QuantumSet {
        let mut atoms = Vec::with_capacity(self.len() * other.len());
        for a in &self.atoms {
            for b in &other.atoms {
                atoms.push(Atom::new(format!("({},{})", a.label, b.label), a.dim * b.dim));
            }
        }
        QuantumSet { atoms }
    }

    /// Disjoint union with `L.`/`R.` tagged labels.
    pub fn coproduct(&self, other: &QuantumSet) -> QuantumSet {
        let left = self
            .atoms
            .iter()
            .map(|a| Atom::new(format!("L.{}", a.label), a.dim));
        let right = other
            .atoms
            .iter()
            .map(|a| Atom::new(format!("R.{}", a.label), a.dim));
        QuantumSet {
            atoms: left.chain(right).collect(),
        }
    }

    /// The largest classical subset together with the indices of its atoms here.
    pub fn classical_part(&self) -> (QuantumSet, Vec<usize>) {
        let idx: Vec<usize> = (0..self.len()).filter(|&i| self.atoms[i].dim == 1).collect();
        let atoms = idx.iter().map(|&i| self.atoms[i].clone()).collect();
        (QuantumSet { atoms }, idx)
    }

    /// Atom permutation sorting by dimension, then label.
    pub fn canonical_order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&a, &b| {
            let (x, y) = (&self.atoms[a], &self.atoms[b]);
            x.dim.cmp(&y.dim).then_with(|| x.label.cmp(&y.label))
        });
        idx
    }

    pub fn subset(&self, indices: &[usize]) -> Result<QuantumSet> {
        let mut atoms = Vec::with_capacity(indices.len());
        for &i in indices {
            let a = self
                .atoms
                .get(i)
                .ok_or_else(|| Error::Invalid(format!("atom index {i} out of range")))?;
            atoms.push(a.clone());
        }
        QuantumSet::new(atoms)
    }
}

impl fmt::Display for QuantumSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, a) in self.atoms.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}:{}", a.label, a.dim)?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_sets() {
        let x = QuantumSet::classical(&["a", "b"]).unwrap();
        assert_eq!(x.atoms(), &[Atom::new("a", 1), Atom::new("b", 1)]);
        assert!(QuantumSet::classical::<&str>(&[]).unwrap().is_empty());
        let one = QuantumSet::classical(&["*"]).unwrap();
        assert_eq!(one, QuantumSet::unit());
        assert!(matches!(
            QuantumSet::classical(&["a", "a"]),
            Err(Error::DuplicateLabel(_))
        ));
    }

    #[test]
    fn qn_sets() {
        assert_eq!(QuantumSet::qn(1).unwrap().dims(), vec![1]);
        assert_eq!(QuantumSet::qn(3).unwrap().dims(), vec![3]);
        assert_eq!(QuantumSet::qn(2).unwrap().len(), 1);
        assert!(QuantumSet::qn(0).is_err());
    }

    #[test]
    fn products() {
        let ab = QuantumSet::classical(&["a", "b"]).unwrap();
        let c = QuantumSet::classical(&["c"]).unwrap();
        let p = ab.product(&c);
        assert_eq!(p.atoms(), &[Atom::new("(a,c)", 1), Atom::new("(b,c)", 1)]);
        let q = QuantumSet::qn(2).unwrap().product(&QuantumSet::qn(3).unwrap());
        assert_eq!(q.dims(), vec![6]);
        assert!(ab.product(&QuantumSet::empty()).is_empty());
    }

    #[test]
    fn coproducts() {
        let a = QuantumSet::classical(&["a"]).unwrap();
        let s = a.coproduct(&a);
        assert_eq!(s.atoms(), &[Atom::new("L.a", 1), Atom::new("R.a", 1)]);
        let q = QuantumSet::qn(2).unwrap().coproduct(&QuantumSet::qn(3).unwrap());
        assert_eq!(q.dims(), vec![2, 3]);
        let e = QuantumSet::empty().coproduct(&a);
        assert_eq!(e.dims(), a.dims());
    }

    #[test]
    fn dimensions_multiply_and_add() {
        let x = QuantumSet::new(vec![Atom::new("a", 2), Atom::new("b", 1)]).unwrap();
        let y = QuantumSet::new(vec![Atom::new("c", 3), Atom::new("d", 2)]).unwrap();
        assert_eq!(x.product(&y).len(), 4);
        assert_eq!(x.product(&y).total_dim(), 3 * 5);
        assert_eq!(x.coproduct(&y).total_dim(), 8);
    }

    #[test]
    fn canonical_order_sorts_by_dim_then_label() {
        let x = QuantumSet::new(vec![
            Atom::new("z", 2),
            Atom::new("b", 1),
            Atom::new("a", 1),
        ])
        .unwrap();
        assert_eq!(x.canonical_order(), vec![2, 1, 0]);
    }
}
