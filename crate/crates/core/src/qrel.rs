//! Relations between finite quantum sets: the dagger-ordered category of
//! block-indexed operator subspaces.
//!
//! A relation `R : X → Y` stores, for every atom pair `(i, j)`, a subspace
//! `R(i, j)` of `dim(Y_j) × dim(X_i)` matrices. Blocks are stored densely.

use crate::error::{Error, Result};
use crate::numkernel::{identity, Matrix, SpanBuilder, Subspace, C64, DEFAULT_TOL};
use crate::qset::QuantumSet;

#[derive(Clone, Debug)]
pub struct Relation {
    src: QuantumSet,
    dst: QuantumSet,
    blocks: Vec<Subspace>,
    tol: f64,
}

fn same_set(what: &str, a: &QuantumSet, b: &QuantumSet) -> Result<()> {
    if a != b {
        return Err(Error::SetMismatch(format!("{what}: {a} vs {b}")));
    }
    Ok(())
}

impl Relation {
    /// Builds a relation blockwise; `f(i, j)` gives the block from atom `i` of
    /// `src` to atom `j` of `dst`.
    pub fn from_fn<F>(src: &QuantumSet, dst: &QuantumSet, tol: f64, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> Result<Subspace>,
    {
        let mut blocks = Vec::with_capacity(src.len() * dst.len());
        for i in 0..src.len() {
            for j in 0..dst.len() {
                let b = f(i, j)?;
                let expected = (dst.dim(j), src.dim(i));
                if b.shape() != expected {
                    return Err(Error::ShapeMismatch {
                        expected,
                        found: b.shape(),
                    });
                }
                blocks.push(b.with_tol(tol));
            }
        }
        Ok(Self {
            src: src.clone(),
            dst: dst.clone(),
            blocks,
            tol,
        })
    }

    pub fn zero(src: &QuantumSet, dst: &QuantumSet) -> Self {
        Self::zero_with_tol(src, dst, DEFAULT_TOL)
    }

    pub fn zero_with_tol(src: &QuantumSet, dst: &QuantumSet, tol: f64) -> Self {
        Self::from_fn(src, dst, tol, |i, j| {
            Ok(Subspace::zero(dst.dim(j), src.dim(i), tol))
        })
        .expect("zero blocks have matching shapes")
    }

    pub fn full(src: &QuantumSet, dst: &QuantumSet) -> Self {
        Self::full_with_tol(src, dst, DEFAULT_TOL)
    }

    pub fn full_with_tol(src: &QuantumSet, dst: &QuantumSet, tol: f64) -> Self {
        Self::from_fn(src, dst, tol, |i, j| {
            Ok(Subspace::full(dst.dim(j), src.dim(i), tol))
        })
        .expect("full blocks have matching shapes")
    }

    pub fn identity(x: &QuantumSet) -> Self {
        Self::identity_with_tol(x, DEFAULT_TOL)
    }

    /// `span{1}` on diagonal atom pairs, zero elsewhere.
    pub fn identity_with_tol(x: &QuantumSet, tol: f64) -> Self {
        Self::from_fn(x, x, tol, |i, j| {
            let d = x.dim(i);
            if i == j {
                Ok(unit_span(&identity(d), tol))
            } else {
                Ok(Subspace::zero(x.dim(j), d, tol))
            }
        })
        .expect("identity blocks have matching shapes")
    }

    pub fn src(&self) -> &QuantumSet {
        &self.src
    }

    pub fn dst(&self) -> &QuantumSet {
        &self.dst
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Block from atom `i` of the source to atom `j` of the target.
    pub fn block(&self, i: usize, j: usize) -> &Subspace {
        &self.blocks[i * self.dst.len() + j]
    }

    pub fn blocks(&self) -> impl Iterator<Item = (usize, usize, &Subspace)> {
        let n = self.dst.len();
        self.blocks
            .iter()
            .enumerate()
            .map(move |(k, b)| (k / n, k % n, b))
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(Subspace::is_zero)
    }

    /// Same relation with a different tolerance.
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self.blocks = self.blocks.into_iter().map(|b| b.with_tol(tol)).collect();
        self
    }

    /// `R†`: block `(j, i)` holds the adjoints of block `(i, j)`.
    pub fn dagger(&self) -> Relation {
        Relation::from_fn(&self.dst, &self.src, self.tol, |j, i| {
            Ok(self.block(i, j).adjoint())
        })
        .expect("adjoint blocks have transposed shapes")
    }

    /// `self ∘ first`, where `first : X → Y` and `self : Y → Z`.
    pub fn compose(&self, first: &Relation) -> Result<Relation> {
        same_set("compose", first.dst(), self.src())?;
        let tol = self.tol.max(first.tol);
        let x = first.src();
        let z = self.dst();
        Relation::from_fn(x, z, tol, |i, k| {
            let mut b = SpanBuilder::new(z.dim(k), x.dim(i), tol);
            for j in 0..self.src.len() {
                let r = first.block(i, j);
                let s = self.block(j, k);
                if r.is_zero() || s.is_zero() {
                    continue;
                }
                for sv in s.basis() {
                    for rv in r.basis() {
                        if b.is_full() {
                            return Ok(b.finish());
                        }
                        b.push(&(sv * rv))?;
                    }
                }
            }
            Ok(b.finish())
        })
    }

    pub fn join(&self, other: &Relation) -> Result<Relation> {
        same_set("join source", &self.src, &other.src)?;
        same_set("join target", &self.dst, &other.dst)?;
        let tol = self.tol.max(other.tol);
        Relation::from_fn(&self.src, &self.dst, tol, |i, j| {
            self.block(i, j).join(other.block(i, j))
        })
    }

    /// n-ary join; `None` when `rels` is empty.
    pub fn join_all<'a>(rels: impl IntoIterator<Item = &'a Relation>) -> Result<Option<Relation>> {
        let mut acc: Option<Relation> = None;
        for r in rels {
            acc = Some(match acc {
                None => r.clone(),
                Some(a) => a.join(r)?,
            });
        }
        Ok(acc)
    }

    /// Blockwise containment `self ≤ other`.
    pub fn leq(&self, other: &Relation) -> Result<bool> {
        same_set("order source", &self.src, &other.src)?;
        same_set("order target", &self.dst, &other.dst)?;
        for (a, b) in self.blocks.iter().zip(&other.blocks) {
            if !a.leq(b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn equal(&self, other: &Relation) -> Result<bool> {
        Ok(self.leq(other)? && other.leq(self)?)
    }

    /// Monoidal product; block `((i1,i2),(j1,j2))` is spanned by Kronecker
    /// products, consistent with [`QuantumSet::product`].
    pub fn tensor(&self, other: &Relation) -> Relation {
        let src = self.src.product(&other.src);
        let dst = self.dst.product(&other.dst);
        let tol = self.tol.max(other.tol);
        let (n2, m2) = (other.src.len(), other.dst.len());
        Relation::from_fn(&src, &dst, tol, |a, b| {
            let (i1, i2) = (a / n2, a % n2);
            let (j1, j2) = (b / m2, b % m2);
            Ok(self.block(i1, j1).kron(other.block(i2, j2)))
        })
        .expect("Kronecker blocks have product shapes")
    }

    /// Image of a classical relation `r ⊆ X × Y` given by label pairs.
    pub fn from_classical<S: AsRef<str>>(
        src_labels: &[S],
        dst_labels: &[S],
        pairs: &[(S, S)],
    ) -> Result<Relation> {
        let x = QuantumSet::classical(src_labels)?;
        let y = QuantumSet::classical(dst_labels)?;
        let mut idx = Vec::with_capacity(pairs.len());
        for (a, b) in pairs {
            let i = x
                .index_of(a.as_ref())
                .ok_or_else(|| Error::UnknownLabel(a.as_ref().to_string()))?;
            let j = y
                .index_of(b.as_ref())
                .ok_or_else(|| Error::UnknownLabel(b.as_ref().to_string()))?;
            idx.push((i, j));
        }
        Relation::from_index_pairs(&x, &y, &idx)
    }

    /// Classical relation between classical quantum sets, by atom indices.
    pub fn from_index_pairs(
        x: &QuantumSet,
        y: &QuantumSet,
        pairs: &[(usize, usize)],
    ) -> Result<Relation> {
        if !x.is_classical() || !y.is_classical() {
            return Err(Error::Precondition(
                "classical relations need one-dimensional atoms".into(),
            ));
        }
        for &(i, j) in pairs {
            if i >= x.len() || j >= y.len() {
                return Err(Error::Invalid(format!("pair ({i},{j}) out of range")));
            }
        }
        Relation::from_fn(x, y, DEFAULT_TOL, |i, j| {
            if pairs.contains(&(i, j)) {
                Ok(Subspace::full(1, 1, DEFAULT_TOL))
            } else {
                Ok(Subspace::zero(1, 1, DEFAULT_TOL))
            }
        })
    }

    /// Graph of a map between classical quantum sets, `f[i]` = image of atom `i`.
    pub fn from_map(x: &QuantumSet, y: &QuantumSet, f: &[usize]) -> Result<Relation> {
        if f.len() != x.len() {
            return Err(Error::Invalid(format!(
                "map has {} entries for {} atoms",
                f.len(),
                x.len()
            )));
        }
        let pairs: Vec<(usize, usize)> = f.iter().enumerate().map(|(i, &j)| (i, j)).collect();
        Relation::from_index_pairs(x, y, &pairs)
    }

    /// `F† ∘ F ≥ Id_X` and `F ∘ F† ≤ Id_Y`, evaluated block by block.
    pub fn is_function(&self) -> Result<bool> {
        let (x, y) = (&self.src, &self.dst);
        // Diagonal blocks of F† ∘ F must contain the identity.
        for i in 0..x.len() {
            let d = x.dim(i);
            let mut b = SpanBuilder::new(d, d, self.tol);
            for j in 0..y.len() {
                let f = self.block(i, j);
                for a in f.basis() {
                    let ad = a.adjoint();
                    for c in f.basis() {
                        if b.is_full() {
                            break;
                        }
                        b.push(&(&ad * c))?;
                    }
                }
            }
            if !b.is_full() && !b.finish().contains(&identity(d))? {
                return Ok(false);
            }
        }
        // Block (j, k) of F ∘ F† is spanned by a c† with a ∈ F(i, k), c ∈ F(i, j).
        for j in 0..y.len() {
            for k in 0..y.len() {
                let scalars = (j == k).then(|| unit_span(&identity(y.dim(j)), self.tol));
                for i in 0..x.len() {
                    let (fj, fk) = (self.block(i, j), self.block(i, k));
                    for a in fk.basis() {
                        for c in fj.basis() {
                            let p = a * c.adjoint();
                            let inside = match &scalars {
                                Some(s) => s.contains(&p)?,
                                None => p.norm() <= self.tol * a.norm().max(1.0) * c.norm().max(1.0),
                            };
                            if !inside {
                                return Ok(false);
                            }
                        }
                    }
                }
            }
        }
        Ok(true)
    }

    /// Inclusion `J_W : W → X` of a sublist of atoms, matched by label in order.
    pub fn inclusion_function(w: &QuantumSet, x: &QuantumSet) -> Result<Relation> {
        let mut mapping = Vec::with_capacity(w.len());
        let mut cursor = 0;
        for a in w.atoms() {
            let pos = x.atoms()[cursor..]
                .iter()
                .position(|b| b.label == a.label)
                .map(|p| p + cursor)
                .ok_or_else(|| Error::UnknownLabel(a.label.clone()))?;
            if x.dim(pos) != a.dim {
                return Err(Error::InvalidDimension(format!(
                    "atom `{}` has dimension {} in the subset but {} in the superset",
                    a.label,
                    a.dim,
                    x.dim(pos)
                )));
            }
            mapping.push(pos);
            cursor = pos + 1;
        }
        Relation::injection(w, x, &mapping)
    }

    /// `span{1}` from atom `i` of `x` to atom `mapping[i]` of `y`; dimensions must agree.
    pub fn injection(x: &QuantumSet, y: &QuantumSet, mapping: &[usize]) -> Result<Relation> {
        if mapping.len() != x.len() {
            return Err(Error::Invalid("mapping length differs from atom count".into()));
        }
        for (i, &j) in mapping.iter().enumerate() {
            if j >= y.len() || x.dim(i) != y.dim(j) {
                return Err(Error::InvalidDimension(format!(
                    "atom {i} cannot be sent to atom {j}"
                )));
            }
        }
        Relation::from_fn(x, y, DEFAULT_TOL, |i, j| {
            if mapping[i] == j {
                Ok(unit_span(&identity(x.dim(i)), DEFAULT_TOL))
            } else {
                Ok(Subspace::zero(y.dim(j), x.dim(i), DEFAULT_TOL))
            }
        })
    }

    /// Braiding `X × Y → Y × X` (the swap on each atom pair).
    pub fn braiding(x: &QuantumSet, y: &QuantumSet) -> Relation {
        let src = x.product(y);
        let dst = y.product(x);
        let (nx, ny) = (x.len(), y.len());
        Relation::from_fn(&src, &dst, DEFAULT_TOL, |a, b| {
            let (i, j) = (a / ny, a % ny);
            let (j2, i2) = (b / nx, b % nx);
            let (da, db) = (x.dim(i), y.dim(j));
            if i == i2 && j == j2 {
                Ok(unit_span(&swap_matrix(da, db), DEFAULT_TOL))
            } else {
                Ok(Subspace::zero(dst.dim(b), src.dim(a), DEFAULT_TOL))
            }
        })
        .expect("swap blocks have matching shapes")
    }

    /// Associator `(X × Y) × Z → X × (Y × Z)`.
    pub fn associator(x: &QuantumSet, y: &QuantumSet, z: &QuantumSet) -> Relation {
        let src = x.product(y).product(z);
        let dst = x.product(&y.product(z));
        // Both products enumerate atoms in the same lexicographic order.
        let mapping: Vec<usize> = (0..src.len()).collect();
        Relation::injection(&src, &dst, &mapping).expect("associator preserves dimensions")
    }

    /// Left unitor `1 × X → X`.
    pub fn left_unitor(x: &QuantumSet) -> Relation {
        let src = QuantumSet::unit().product(x);
        let mapping: Vec<usize> = (0..x.len()).collect();
        Relation::injection(&src, x, &mapping).expect("unitor preserves dimensions")
    }

    /// Right unitor `X × 1 → X`.
    pub fn right_unitor(x: &QuantumSet) -> Relation {
        let src = x.product(&QuantumSet::unit());
        let mapping: Vec<usize> = (0..x.len()).collect();
        Relation::injection(&src, x, &mapping).expect("unitor preserves dimensions")
    }

    /// `R + S : X1 + X2 → Y1 + Y2`, block diagonal.
    pub fn direct_sum(&self, other: &Relation) -> Relation {
        let src = self.src.coproduct(&other.src);
        let dst = self.dst.coproduct(&other.dst);
        let (n1, m1) = (self.src.len(), self.dst.len());
        let tol = self.tol.max(other.tol);
        Relation::from_fn(&src, &dst, tol, |i, j| {
            match (i < n1, j < m1) {
                (true, true) => Ok(self.block(i, j).clone()),
                (false, false) => Ok(other.block(i - n1, j - m1).clone()),
                _ => Ok(Subspace::zero(dst.dim(j), src.dim(i), tol)),
            }
        })
        .expect("direct sum keeps block shapes")
    }
}

fn unit_span(m: &Matrix, tol: f64) -> Subspace {
    Subspace::span(m.nrows(), m.ncols(), std::iter::once(m), tol).expect("single matrix")
}

/// Permutation `ℂ^a ⊗ ℂ^b → ℂ^b ⊗ ℂ^a`, `e_i ⊗ e_j ↦ e_j ⊗ e_i`.
pub fn swap_matrix(a: usize, b: usize) -> Matrix {
    let n = a * b;
    let mut m = Matrix::zeros(n, n);
    for i in 0..a {
        for j in 0..b {
            m[(j * a + i, i * b + j)] = C64::new(1.0, 0.0);
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::{pauli_x, unit};
    use crate::qset::Atom;

    fn ab() -> QuantumSet {
        QuantumSet::classical(&["a", "b"]).unwrap()
    }

    fn span1(m: Matrix) -> Subspace {
        unit_span(&m, DEFAULT_TOL)
    }

    #[test]
    fn identity_pattern() {
        let id = Relation::identity(&ab());
        assert_eq!(id.block(0, 0).dim(), 1);
        assert_eq!(id.block(1, 1).dim(), 1);
        assert!(id.block(0, 1).is_zero());
        assert!(id.block(1, 0).is_zero());
        let q2 = QuantumSet::qn(2).unwrap();
        let idq = Relation::identity(&q2);
        assert!(idq.block(0, 0).equal(&span1(identity(2))).unwrap());
    }

    #[test]
    fn order_bounds() {
        let q2 = QuantumSet::qn(2).unwrap();
        let id = Relation::identity(&q2);
        let full = Relation::full(&q2, &q2);
        let zero = Relation::zero(&q2, &q2);
        assert!(zero.leq(&id).unwrap());
        assert!(id.leq(&full).unwrap());
        assert!(!full.leq(&id).unwrap());
    }

    #[test]
    fn dagger_examples() {
        let x = ab();
        assert!(Relation::identity(&x).dagger().equal(&Relation::identity(&x)).unwrap());
        let r = Relation::from_classical(&["a", "b"], &["a", "b"], &[("a", "b")]).unwrap();
        let rd = Relation::from_classical(&["a", "b"], &["a", "b"], &[("b", "a")]).unwrap();
        assert!(r.dagger().equal(&rd).unwrap());
        assert!(r.dagger().dagger().equal(&r).unwrap());
    }

    #[test]
    fn compose_examples() {
        let labels = ["a", "b", "c"];
        let r = Relation::from_classical(&labels, &labels, &[("a", "b")]).unwrap();
        let s = Relation::from_classical(&labels, &labels, &[("b", "c")]).unwrap();
        let sr = Relation::from_classical(&labels, &labels, &[("a", "c")]).unwrap();
        assert!(s.compose(&r).unwrap().equal(&sr).unwrap());
        let x = QuantumSet::classical(&labels).unwrap();
        assert!(Relation::identity(&x).compose(&r).unwrap().equal(&r).unwrap());
    }

    #[test]
    fn compose_of_matrix_units() {
        let q2 = QuantumSet::qn(2).unwrap();
        let r = Relation::from_fn(&q2, &q2, DEFAULT_TOL, |_, _| Ok(span1(unit(2, 2, 0, 0)))).unwrap();
        let s = Relation::from_fn(&q2, &q2, DEFAULT_TOL, |_, _| Ok(span1(unit(2, 2, 1, 0)))).unwrap();
        let sr = s.compose(&r).unwrap();
        assert!(sr.block(0, 0).equal(&span1(unit(2, 2, 1, 0))).unwrap());
        assert!(r.compose(&s).unwrap().is_zero());
    }

    #[test]
    fn compose_mismatch() {
        let r = Relation::identity(&ab());
        let s = Relation::identity(&QuantumSet::qn(2).unwrap());
        assert!(matches!(s.compose(&r), Err(Error::SetMismatch(_))));
    }

    #[test]
    fn join_examples() {
        let q2 = QuantumSet::qn(2).unwrap();
        let e11 = Relation::from_fn(&q2, &q2, DEFAULT_TOL, |_, _| Ok(span1(unit(2, 2, 0, 0)))).unwrap();
        let e22 = Relation::from_fn(&q2, &q2, DEFAULT_TOL, |_, _| Ok(span1(unit(2, 2, 1, 1)))).unwrap();
        assert!(e11.join(&e11).unwrap().equal(&e11).unwrap());
        assert!(e11.join(&Relation::zero(&q2, &q2)).unwrap().equal(&e11).unwrap());
        assert_eq!(e11.join(&e22).unwrap().block(0, 0).dim(), 2);
        assert!(Relation::join_all(std::iter::empty()).unwrap().is_none());
    }

    #[test]
    fn tensor_examples() {
        let x = ab();
        let y = QuantumSet::qn(2).unwrap();
        let idt = Relation::identity(&x).tensor(&Relation::identity(&y));
        assert!(idt.equal(&Relation::identity(&x.product(&y))).unwrap());

        let r = Relation::from_classical(&["a", "b"], &["a", "b"], &[("a", "b")]).unwrap();
        let s = Relation::from_classical(&["c", "d"], &["c", "d"], &[("c", "c"), ("d", "c")]).unwrap();
        let rs = r.tensor(&s);
        let labels = ["(a,c)", "(a,d)", "(b,c)", "(b,d)"];
        let expected = Relation::from_classical(
            &labels,
            &labels,
            &[("(a,c)", "(b,c)"), ("(a,d)", "(b,c)")],
        )
        .unwrap();
        assert!(rs.equal(&expected).unwrap());

        let q2 = QuantumSet::qn(2).unwrap();
        let sx = Relation::from_fn(&q2, &q2, DEFAULT_TOL, |_, _| Ok(span1(pauli_x()))).unwrap();
        let t = sx.tensor(&Relation::identity(&q2));
        assert!(t
            .block(0, 0)
            .equal(&span1(pauli_x().kronecker(&identity(2))))
            .unwrap());
    }

    #[test]
    fn classical_relations() {
        let l = ["a", "b"];
        let all = Relation::from_classical(
            &l,
            &l,
            &[("a", "a"), ("a", "b"), ("b", "a"), ("b", "b")],
        )
        .unwrap();
        assert!(all.equal(&Relation::full(&ab(), &ab())).unwrap());
        let none = Relation::from_classical::<&str>(&l, &l, &[]).unwrap();
        assert!(none.is_zero());
        assert!(matches!(
            Relation::from_classical(&l, &l, &[("a", "z")]),
            Err(Error::UnknownLabel(_))
        ));
    }

    #[test]
    fn functions() {
        let f = Relation::from_classical(&["a", "b"], &["c", "d"], &[("a", "c"), ("b", "c")]).unwrap();
        assert!(f.is_function().unwrap());
        let g = Relation::from_classical(&["a", "b"], &["c", "d"], &[("a", "c"), ("a", "d")]).unwrap();
        assert!(!g.is_function().unwrap());
        let partial = Relation::from_classical(&["a", "b"], &["c", "d"], &[("a", "c")]).unwrap();
        assert!(!partial.is_function().unwrap());
    }

    #[test]
    fn inclusions() {
        let x = QuantumSet::new(vec![Atom::new("a", 1), Atom::new("B", 2)]).unwrap();
        assert!(Relation::inclusion_function(&x, &x)
            .unwrap()
            .equal(&Relation::identity(&x))
            .unwrap());
        let e = Relation::inclusion_function(&QuantumSet::empty(), &x).unwrap();
        assert!(e.src().is_empty());
        let w = QuantumSet::classical(&["a"]).unwrap();
        let j = Relation::inclusion_function(&w, &x).unwrap();
        assert_eq!(j.block(0, 0).dim(), 1);
        assert!(j.block(0, 1).is_zero());
        assert!(j.is_function().unwrap());
        let bad = QuantumSet::classical(&["B"]).unwrap();
        assert!(Relation::inclusion_function(&bad, &x).is_err());
        let missing = QuantumSet::classical(&["z"]).unwrap();
        assert!(matches!(
            Relation::inclusion_function(&missing, &x),
            Err(Error::UnknownLabel(_))
        ));
    }

    #[test]
    fn braiding_is_a_bijection() {
        let x = QuantumSet::new(vec![Atom::new("a", 2), Atom::new("b", 1)]).unwrap();
        let y = QuantumSet::qn(3).unwrap();
        let b = Relation::braiding(&x, &y);
        assert!(b.is_function().unwrap());
        assert!(b.dagger().is_function().unwrap());
        let back = Relation::braiding(&y, &x).compose(&b).unwrap();
        assert!(back.equal(&Relation::identity(&x.product(&y))).unwrap());
    }
}
