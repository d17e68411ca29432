//! Unital †-closed matrix algebras `M ⊆ M_m(ℂ)` and relations between them.

use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::numkernel::{identity, null_space_stacked, unit, unvec, Matrix, SpanBuilder, Subspace, C64, DEFAULT_TOL};

#[derive(Clone, Debug, PartialEq)]
enum Kind {
    Full,
    Blocks(Vec<usize>),
    Generated(Vec<Matrix>),
}

/// A matrix †-algebra with lazily cached basis and commutant.
#[derive(Debug)]
pub struct MatrixAlgebra {
    ambient: usize,
    kind: Kind,
    tol: f64,
    basis: OnceLock<Subspace>,
    commutant: OnceLock<Subspace>,
}

impl Clone for MatrixAlgebra {
    fn clone(&self) -> Self {
        Self {
            ambient: self.ambient,
            kind: self.kind.clone(),
            tol: self.tol,
            basis: self.basis.clone(),
            commutant: self.commutant.clone(),
        }
    }
}

/// Linear map `x ↦ gx − xg` on column-major `vec(x)`.
fn commutator_map(g: &Matrix) -> Matrix {
    let m = g.nrows();
    let id = identity(m);
    id.kronecker(g) - g.transpose().kronecker(&id)
}

/// `{x : gx = xg for every g}`, from the null space of the stacked commutator maps.
pub fn numeric_commutant(m: usize, generators: &[Matrix], tol: f64) -> Result<Subspace> {
    for g in generators {
        if g.shape() != (m, m) {
            return Err(Error::ShapeMismatch {
                expected: (m, m),
                found: g.shape(),
            });
        }
    }
    if generators.is_empty() {
        return Ok(Subspace::full(m, m, tol));
    }
    let scale = generators.iter().map(|g| g.norm()).fold(0.0, f64::max);
    let ns = null_space_stacked(m * m, generators.iter().map(commutator_map), scale, tol)?;
    let mats: Vec<Matrix> = ns.basis().iter().map(|v| unvec(v, m, m)).collect();
    Subspace::span(m, m, mats.iter(), tol)
}

/// Diagonal matrix with distinct entries `1, 2, …, m`.
fn distinct_diagonal(m: usize) -> Matrix {
    Matrix::from_fn(m, m, |i, j| if i == j { C64::new((i + 1) as f64, 0.0) } else { C64::new(0.0, 0.0) })
}

/// Cyclic shift inside each diagonal block.
fn block_shift(dims: &[usize]) -> Matrix {
    let m: usize = dims.iter().sum();
    let mut s = Matrix::zeros(m, m);
    let mut off = 0;
    for &d in dims {
        for i in 0..d {
            s[(off + (i + 1) % d, off + i)] = C64::new(1.0, 0.0);
        }
        off += d;
    }
    s
}

impl MatrixAlgebra {
    /// All of `M_m(ℂ)`.
    pub fn full(m: usize) -> Result<Arc<Self>> {
        if m == 0 {
            return Err(Error::InvalidDimension("ambient dimension must be positive".into()));
        }
        Ok(Arc::new(Self {
            ambient: m,
            kind: Kind::Full,
            tol: DEFAULT_TOL,
            basis: OnceLock::new(),
            commutant: OnceLock::new(),
        }))
    }

    /// Diagonal matrices in `M_m(ℂ)`.
    pub fn diag(m: usize) -> Result<Arc<Self>> {
        Self::blockdiag(&vec![1; m])
    }

    /// `⊕ M_{n_i}(ℂ)` embedded block-diagonally with multiplicity one.
    pub fn blockdiag(dims: &[usize]) -> Result<Arc<Self>> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidDimension("block dimensions must be positive".into()));
        }
        Ok(Arc::new(Self {
            ambient: dims.iter().sum(),
            kind: Kind::Blocks(dims.to_vec()),
            tol: DEFAULT_TOL,
            basis: OnceLock::new(),
            commutant: OnceLock::new(),
        }))
    }

    /// The †-algebra generated by `generators` inside `M_m(ℂ)`.
    pub fn from_generators(m: usize, generators: &[Matrix], tol: f64) -> Result<Arc<Self>> {
        if m == 0 {
            return Err(Error::InvalidDimension("ambient dimension must be positive".into()));
        }
        let mut gens = Vec::with_capacity(2 * generators.len());
        for g in generators {
            if g.shape() != (m, m) {
                return Err(Error::ShapeMismatch {
                    expected: (m, m),
                    found: g.shape(),
                });
            }
            if !crate::numkernel::is_finite(g) {
                return Err(Error::NonFinite);
            }
            gens.push(g.clone());
            gens.push(g.adjoint());
        }
        let alg = Self {
            ambient: m,
            kind: Kind::Generated(gens),
            tol,
            basis: OnceLock::new(),
            commutant: OnceLock::new(),
        };
        let basis = alg.word_closure()?;
        let _ = alg.basis.set(basis);
        Ok(Arc::new(alg))
    }

    /// Span of all words in the generators: start from `span{1}` and multiply
    /// newly found elements by generators until the dimension stops growing.
    fn word_closure(&self) -> Result<Subspace> {
        let m = self.ambient;
        let gens = self.generators();
        let mut b = SpanBuilder::new(m, m, self.tol);
        b.push(&identity(m))?;
        let mut frontier = vec![identity(m)];
        while !frontier.is_empty() && !b.is_full() {
            let mut next = Vec::new();
            for w in &frontier {
                for g in &gens {
                    let gw = g * w;
                    if b.push(&gw)? {
                        next.push(gw);
                    }
                }
            }
            frontier = next;
        }
        Ok(b.finish())
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn is_full(&self) -> bool {
        self.kind == Kind::Full
    }

    /// Block dimensions for block-diagonal algebras.
    pub fn block_spec(&self) -> Option<&[usize]> {
        match &self.kind {
            Kind::Blocks(d) => Some(d),
            _ => None,
        }
    }

    /// A generating set closed under adjoints.
    pub fn generators(&self) -> Vec<Matrix> {
        let m = self.ambient;
        match &self.kind {
            Kind::Full if m == 1 => vec![identity(1)],
            Kind::Full => {
                let s = block_shift(&[m]);
                vec![distinct_diagonal(m), s.adjoint(), s]
            }
            Kind::Blocks(dims) => {
                let s = block_shift(dims);
                vec![distinct_diagonal(m), s.adjoint(), s]
            }
            Kind::Generated(g) => g.clone(),
        }
    }

    pub fn basis(&self) -> &Subspace {
        self.basis.get_or_init(|| {
            let m = self.ambient;
            match &self.kind {
                Kind::Full => Subspace::full(m, m, self.tol),
                Kind::Blocks(dims) => {
                    let mut units = Vec::new();
                    let mut off = 0;
                    for &d in dims {
                        for i in 0..d {
                            for j in 0..d {
                                units.push(unit(m, m, off + i, off + j));
                            }
                        }
                        off += d;
                    }
                    Subspace::span(m, m, units.iter(), self.tol).expect("square units")
                }
                Kind::Generated(_) => self.word_closure().expect("generators validated"),
            }
        })
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            Kind::Full => self.ambient * self.ambient,
            Kind::Blocks(dims) => dims.iter().map(|d| d * d).sum(),
            Kind::Generated(_) => self.basis().dim(),
        }
    }

    /// `M′`. For the full matrix algebra this is `span{1}`; otherwise it is
    /// computed numerically from the generators.
    pub fn commutant(&self) -> &Subspace {
        self.commutant.get_or_init(|| {
            let m = self.ambient;
            match &self.kind {
                Kind::Full => scalar_span(m, self.tol),
                _ => numeric_commutant(m, &self.generators(), self.tol).expect("generators are square"),
            }
        })
    }

    /// Minimal central projections, known for full and block-diagonal algebras.
    pub fn central_projections(&self) -> Option<Vec<Matrix>> {
        let m = self.ambient;
        match &self.kind {
            Kind::Full => Some(vec![identity(m)]),
            Kind::Blocks(dims) => {
                let mut out = Vec::with_capacity(dims.len());
                let mut off = 0;
                for &d in dims {
                    let mut p = Matrix::zeros(m, m);
                    for i in off..off + d {
                        p[(i, i)] = C64::new(1.0, 0.0);
                    }
                    out.push(p);
                    off += d;
                }
                Some(out)
            }
            Kind::Generated(_) => None,
        }
    }

    pub fn contains(&self, x: &Matrix) -> Result<bool> {
        if x.shape() != (self.ambient, self.ambient) {
            return Err(Error::ShapeMismatch {
                expected: (self.ambient, self.ambient),
                found: x.shape(),
            });
        }
        match &self.kind {
            Kind::Full => Ok(true),
            Kind::Blocks(dims) => {
                let mut off = 0;
                let mut outside = x.clone();
                for &d in dims {
                    outside.view_mut((off, off), (d, d)).fill(C64::new(0.0, 0.0));
                    off += d;
                }
                Ok(outside.norm() <= self.tol * x.norm().max(1.0))
            }
            Kind::Generated(_) => self.basis().contains(x),
        }
    }

    /// Orthogonal (Hilbert–Schmidt) projection onto the algebra.
    pub fn project(&self, x: &Matrix) -> Result<Matrix> {
        match &self.kind {
            Kind::Full => Ok(x.clone()),
            Kind::Blocks(dims) => {
                let mut p = Matrix::zeros(self.ambient, self.ambient);
                let mut off = 0;
                for &d in dims {
                    p.view_mut((off, off), (d, d)).copy_from(&x.view((off, off), (d, d)));
                    off += d;
                }
                Ok(p)
            }
            Kind::Generated(_) => self.basis().project(x),
        }
    }
}

pub(crate) fn scalar_span(m: usize, tol: f64) -> Subspace {
    Subspace::span(m, m, std::iter::once(&identity(m)), tol).expect("square")
}

/// A quantum relation between matrix algebras: a subspace `R ⊆ M_{n×m}(ℂ)`
/// with `N′ · R · M′ ⊆ R`.
#[derive(Clone, Debug)]
pub struct QuantumRelationW {
    src: Arc<MatrixAlgebra>,
    dst: Arc<MatrixAlgebra>,
    space: Subspace,
}

impl QuantumRelationW {
    /// Validates the bimodule condition.
    pub fn new(src: Arc<MatrixAlgebra>, dst: Arc<MatrixAlgebra>, space: Subspace) -> Result<Self> {
        let (n, m) = (dst.ambient(), src.ambient());
        if space.shape() != (n, m) {
            return Err(Error::ShapeMismatch {
                expected: (n, m),
                found: space.shape(),
            });
        }
        let r = Self { src, dst, space };
        if !r.bimodule_closure()?.space.leq(&r.space)? {
            return Err(Error::Precondition("space is not an N′–M′ bimodule".into()));
        }
        Ok(r)
    }

    /// `span{b′ x a′}` over the given spanning set.
    pub fn generated(src: Arc<MatrixAlgebra>, dst: Arc<MatrixAlgebra>, spanning: &[Matrix], tol: f64) -> Result<Self> {
        let (n, m) = (dst.ambient(), src.ambient());
        let raw = Subspace::span(n, m, spanning.iter(), tol)?;
        Self { src, dst, space: raw }.bimodule_closure()
    }

    fn bimodule_closure(&self) -> Result<Self> {
        let (n, m) = (self.dst.ambient(), self.src.ambient());
        let mut b = SpanBuilder::new(n, m, self.space.tol());
        'outer: for bp in self.dst.commutant().basis() {
            for x in self.space.basis() {
                let bx = bp * x;
                for ap in self.src.commutant().basis() {
                    if b.is_full() {
                        break 'outer;
                    }
                    b.push(&(&bx * ap))?;
                }
            }
        }
        Ok(Self {
            src: self.src.clone(),
            dst: self.dst.clone(),
            space: b.finish(),
        })
    }

    pub fn src(&self) -> &Arc<MatrixAlgebra> {
        &self.src
    }

    pub fn dst(&self) -> &Arc<MatrixAlgebra> {
        &self.dst
    }

    pub fn space(&self) -> &Subspace {
        &self.space
    }

    pub fn dagger(&self) -> Self {
        Self {
            src: self.dst.clone(),
            dst: self.src.clone(),
            space: self.space.adjoint(),
        }
    }

    /// `self · first = span{s r}`, where `first : M → N` and `self : N → P`.
    pub fn compose(&self, first: &QuantumRelationW) -> Result<Self> {
        if self.src.ambient() != first.dst.ambient() {
            return Err(Error::SetMismatch("composed relations do not meet".into()));
        }
        Ok(Self {
            src: first.src.clone(),
            dst: self.dst.clone(),
            space: self.space.product(&first.space)?,
        })
    }

    pub fn leq(&self, other: &QuantumRelationW) -> Result<bool> {
        self.space.leq(&other.space)
    }

    pub fn equal(&self, other: &QuantumRelationW) -> Result<bool> {
        self.space.equal(&other.space)
    }

    pub fn join(&self, other: &QuantumRelationW) -> Result<Self> {
        Ok(Self {
            src: self.src.clone(),
            dst: self.dst.clone(),
            space: self.space.join(&other.space)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::{pauli_x, pauli_y};

    #[test]
    fn full_algebra() {
        let a = MatrixAlgebra::full(2).unwrap();
        assert_eq!(a.basis().dim(), 4);
        assert_eq!(a.commutant().dim(), 1);
        assert!(a.commutant().contains(&identity(2)).unwrap());
    }

    #[test]
    fn diagonal_algebra_is_its_own_commutant() {
        let a = MatrixAlgebra::blockdiag(&[1, 1]).unwrap();
        assert_eq!(a.basis().dim(), 2);
        assert!(a.commutant().equal(a.basis()).unwrap());
    }

    #[test]
    fn pauli_x_generates_two_dimensions() {
        let a = MatrixAlgebra::from_generators(2, &[pauli_x()], DEFAULT_TOL).unwrap();
        let expected = Subspace::span(2, 2, [identity(2), pauli_x()].iter(), DEFAULT_TOL).unwrap();
        assert!(a.basis().equal(&expected).unwrap());
        assert!(a.commutant().equal(&expected).unwrap());
        assert!(!a.contains(&pauli_y()).unwrap());
    }

    #[test]
    fn analytic_commutants_match_numeric() {
        for m in 1..=4 {
            let a = MatrixAlgebra::full(m).unwrap();
            let numeric = numeric_commutant(m, a.basis().basis(), DEFAULT_TOL).unwrap();
            assert!(numeric.equal(a.commutant()).unwrap());
        }
        let b = MatrixAlgebra::blockdiag(&[2, 1, 3]).unwrap();
        let centre = b.central_projections().unwrap();
        let oracle = Subspace::span(6, 6, centre.iter(), DEFAULT_TOL).unwrap();
        assert!(b.commutant().equal(&oracle).unwrap());
    }

    #[test]
    fn closure_of_block_generators_matches_units() {
        let b = MatrixAlgebra::blockdiag(&[2, 1, 3]).unwrap();
        let g = MatrixAlgebra::from_generators(6, &b.generators(), DEFAULT_TOL).unwrap();
        assert!(g.basis().equal(b.basis()).unwrap());
        assert_eq!(b.dim(), 14);
    }

    #[test]
    fn bimodule_condition_is_enforced() {
        let d = MatrixAlgebra::diag(2).unwrap();
        let s = Subspace::span(2, 2, std::iter::once(&pauli_x()), DEFAULT_TOL).unwrap();
        assert!(QuantumRelationW::new(d.clone(), d.clone(), s).is_err());
        let r = QuantumRelationW::generated(d.clone(), d, &[pauli_x()], DEFAULT_TOL).unwrap();
        assert_eq!(r.space().dim(), 2);
    }
}
