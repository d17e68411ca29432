//! Dense complex matrices and tolerance-governed subspace arithmetic.
//!
//! Every rank or containment decision in the crate is routed through a
//! [`Subspace`] and its tolerance. Subspaces are spans of rectangular
//! matrices, orthonormal for the Hilbert–Schmidt inner product
//! `⟨a, b⟩ = tr(a† b)`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Matrix = DMatrix<C64>;

/// Default relative tolerance for rank and containment decisions.
pub const DEFAULT_TOL: f64 = 1e-9;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(n: usize) -> Matrix {
    Matrix::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> Matrix {
    Matrix::zeros(rows, cols)
}

/// Matrix unit `E_ij` of the given shape.
pub fn unit(rows: usize, cols: usize, i: usize, j: usize) -> Matrix {
    let mut m = Matrix::zeros(rows, cols);
    m[(i, j)] = C64::new(1.0, 0.0);
    m
}

pub fn from_real_rows(rows: &[&[f64]]) -> Matrix {
    let r = rows.len();
    let cols = rows.first().map_or(0, |row| row.len());
    Matrix::from_fn(r, cols, |i, j| C64::new(rows[i][j], 0.0))
}

pub fn pauli_x() -> Matrix {
    from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
}

pub fn pauli_y() -> Matrix {
    let mut m = Matrix::zeros(2, 2);
    m[(0, 1)] = c(0.0, -1.0);
    m[(1, 0)] = c(0.0, 1.0);
    m
}

pub fn pauli_z() -> Matrix {
    from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]])
}

/// Hilbert–Schmidt inner product `tr(a† b)`.
pub fn hs_inner(a: &Matrix, b: &Matrix) -> C64 {
    a.dotc(b)
}

pub fn hs_norm(a: &Matrix) -> f64 {
    a.norm()
}

/// Largest singular value.
pub fn op_norm(a: &Matrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone()
        .singular_values()
        .iter()
        .fold(0.0_f64, |acc, s| acc.max(*s))
}

pub fn is_finite(a: &Matrix) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn hermitian_defect(a: &Matrix) -> f64 {
    (a - a.adjoint()).norm()
}

/// `‖a − b‖_HS`, or infinity when shapes differ.
pub fn distance(a: &Matrix, b: &Matrix) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    (a - b).norm()
}

fn check_shape(expected: (usize, usize), m: &Matrix) -> Result<()> {
    if m.shape() != expected {
        return Err(Error::ShapeMismatch {
            expected,
            found: m.shape(),
        });
    }
    Ok(())
}

/// A linear subspace of `rows × cols` complex matrices with an HS-orthonormal basis.
#[derive(Clone, Debug)]
pub struct Subspace {
    rows: usize,
    cols: usize,
    basis: Vec<Matrix>,
    tol: f64,
}

/// Incremental modified Gram–Schmidt with one reorthogonalization pass.
#[derive(Clone, Debug)]
pub struct SpanBuilder {
    rows: usize,
    cols: usize,
    basis: Vec<Matrix>,
    tol: f64,
}

impl SpanBuilder {
    pub fn new(rows: usize, cols: usize, tol: f64) -> Self {
        Self {
            rows,
            cols,
            basis: Vec::new(),
            tol,
        }
    }

    pub fn from_subspace(s: &Subspace) -> Self {
        Self {
            rows: s.rows,
            cols: s.cols,
            basis: s.basis.clone(),
            tol: s.tol,
        }
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() >= self.rows * self.cols
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Adds a vector; returns whether it enlarged the span.
    pub fn push(&mut self, v: &Matrix) -> Result<bool> {
        check_shape((self.rows, self.cols), v)?;
        if self.is_full() {
            return Ok(false);
        }
        let input_norm = v.norm();
        if !input_norm.is_finite() {
            return Err(Error::NonFinite);
        }
        let threshold = self.tol * input_norm.max(1.0);
        if input_norm <= threshold {
            return Ok(false);
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &self.basis {
                let coeff = q.dotc(&w);
                w.zip_apply(q, |a, b| *a -= coeff * b);
            }
        }
        let norm = w.norm();
        if norm <= threshold {
            return Ok(false);
        }
        w.unscale_mut(norm);
        self.basis.push(w);
        Ok(true)
    }

    pub fn extend<'a>(&mut self, vs: impl IntoIterator<Item = &'a Matrix>) -> Result<()> {
        for v in vs {
            if self.is_full() {
                break;
            }
            self.push(v)?;
        }
        Ok(())
    }

    pub fn finish(self) -> Subspace {
        Subspace {
            rows: self.rows,
            cols: self.cols,
            basis: self.basis,
            tol: self.tol,
        }
    }
}

/// Orthonormal basis of the span of `spanning`.
///
/// Vectors whose residual after projection is at most `tol·max(1, ‖v‖)` are
/// dropped. All inputs must share one shape; an empty input gives a 0×0 zero
/// subspace, so callers that know the shape should prefer [`Subspace::span`].
pub fn orthonormalize(spanning: &[Matrix], tol: f64) -> Result<Subspace> {
    let (rows, cols) = spanning.first().map_or((0, 0), |m| m.shape());
    Subspace::span(rows, cols, spanning, tol)
}

impl Subspace {
    pub fn zero(rows: usize, cols: usize, tol: f64) -> Self {
        Self {
            rows,
            cols,
            basis: Vec::new(),
            tol,
        }
    }

    /// All of `L(ℂ^cols, ℂ^rows)`, spanned by matrix units.
    pub fn full(rows: usize, cols: usize, tol: f64) -> Self {
        let mut basis = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                basis.push(unit(rows, cols, i, j));
            }
        }
        Self {
            rows,
            cols,
            basis,
            tol,
        }
    }

    pub fn span<'a>(
        rows: usize,
        cols: usize,
        spanning: impl IntoIterator<Item = &'a Matrix>,
        tol: f64,
    ) -> Result<Self> {
        let mut b = SpanBuilder::new(rows, cols, tol);
        for v in spanning {
            check_shape((rows, cols), v)?;
            if !b.is_full() {
                b.push(v)?;
            }
        }
        Ok(b.finish())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.rows * self.cols
    }

    pub fn basis(&self) -> &[Matrix] {
        &self.basis
    }

    pub fn into_basis(self) -> Vec<Matrix> {
        self.basis
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    /// Largest deviation of the basis Gram matrix from the identity.
    pub fn gram_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for (i, a) in self.basis.iter().enumerate() {
            for (j, b) in self.basis.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((a.dotc(b) - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    pub fn project(&self, v: &Matrix) -> Result<Matrix> {
        check_shape(self.shape(), v)?;
        let mut p = Matrix::zeros(self.rows, self.cols);
        for q in &self.basis {
            let coeff = q.dotc(v);
            p.zip_apply(q, |a, b| *a += coeff * b);
        }
        Ok(p)
    }

    /// `‖v − proj(v)‖_HS`.
    pub fn residual(&self, v: &Matrix) -> Result<f64> {
        check_shape(self.shape(), v)?;
        if self.is_full() {
            return Ok(0.0);
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &self.basis {
                let coeff = q.dotc(&w);
                w.zip_apply(q, |a, b| *a -= coeff * b);
            }
        }
        Ok(w.norm())
    }

    pub fn contains(&self, v: &Matrix) -> Result<bool> {
        let r = self.residual(v)?;
        Ok(r <= self.tol * v.norm().max(1.0))
    }

    /// `self ≤ other`: every basis vector of `self` lies in `other`.
    pub fn leq(&self, other: &Subspace) -> Result<bool> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch {
                expected: other.shape(),
                found: self.shape(),
            });
        }
        if self.dim() > other.dim() {
            return Ok(false);
        }
        let tol = self.tol.max(other.tol);
        for v in &self.basis {
            if other.residual(v)? > tol * v.norm().max(1.0) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Mutual containment.
    pub fn equal(&self, other: &Subspace) -> Result<bool> {
        Ok(self.dim() == other.dim() && self.leq(other)? && other.leq(self)?)
    }

    /// `{ s† : s ∈ self }`.
    pub fn adjoint(&self) -> Subspace {
        Subspace {
            rows: self.cols,
            cols: self.rows,
            basis: self.basis.iter().map(|b| b.adjoint()).collect(),
            tol: self.tol,
        }
    }

    pub fn join(&self, other: &Subspace) -> Result<Subspace> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch {
                expected: self.shape(),
                found: other.shape(),
            });
        }
        let mut b = SpanBuilder::from_subspace(self);
        b.tol = self.tol.max(other.tol);
        b.extend(other.basis.iter())?;
        Ok(b.finish())
    }

    /// `self · other = span{ s t }`.
    pub fn product(&self, other: &Subspace) -> Result<Subspace> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                expected: (other.rows, other.cols),
                found: (self.cols, other.cols),
            });
        }
        let mut b = SpanBuilder::new(self.rows, other.cols, self.tol.max(other.tol));
        'outer: for s in &self.basis {
            for t in &other.basis {
                if b.is_full() {
                    break 'outer;
                }
                b.push(&(s * t))?;
            }
        }
        Ok(b.finish())
    }

    /// `span{ s ⊗ t }`; Kronecker products of orthonormal bases are orthonormal.
    pub fn kron(&self, other: &Subspace) -> Subspace {
        let mut basis = Vec::with_capacity(self.dim() * other.dim());
        for s in &self.basis {
            for t in &other.basis {
                basis.push(s.kronecker(t));
            }
        }
        Subspace {
            rows: self.rows * other.rows,
            cols: self.cols * other.cols,
            basis,
            tol: self.tol.max(other.tol),
        }
    }

    /// `{ a s b : s ∈ self }` for fixed `a`, `b`.
    pub fn sandwich(&self, left: &Matrix, right: &Matrix) -> Result<Subspace> {
        if left.ncols() != self.rows || right.nrows() != self.cols {
            return Err(Error::ShapeMismatch {
                expected: (left.ncols(), right.nrows()),
                found: self.shape(),
            });
        }
        let mut b = SpanBuilder::new(left.nrows(), right.ncols(), self.tol);
        for s in &self.basis {
            b.push(&(left * s * right))?;
        }
        Ok(b.finish())
    }
}

/// Hermitian PSD square root.
pub fn psd_sqrt(a: &Matrix, tol: f64) -> Result<Matrix> {
    if a.nrows() != a.ncols() {
        return Err(Error::ShapeMismatch {
            expected: (a.nrows(), a.nrows()),
            found: a.shape(),
        });
    }
    if !is_finite(a) {
        return Err(Error::NonFinite);
    }
    let scale = a.norm().max(1.0);
    let defect = hermitian_defect(a);
    if defect > tol * scale {
        return Err(Error::NotHermitian(defect));
    }
    let h = (a + a.adjoint()).scale(0.5);
    let eig = h.symmetric_eigen();
    let n = a.nrows();
    let mut root = Matrix::zeros(n, n);
    for k in 0..n {
        let lambda = eig.eigenvalues[k];
        if lambda < -tol * scale {
            return Err(Error::NegativeEigenvalue(lambda));
        }
        let s = lambda.max(0.0).sqrt();
        if s == 0.0 {
            continue;
        }
        let v = eig.eigenvectors.column(k);
        root += (v * v.adjoint()).scale(s);
    }
    Ok(root)
}

/// Reduces a tall matrix to a square one with the same singular values.
fn compress_rows(m: Matrix) -> Matrix {
    if m.nrows() > m.ncols() {
        m.qr().r()
    } else {
        m
    }
}

fn null_space_of_square(m: Matrix, floor: f64, tol: f64) -> Subspace {
    let cols = m.ncols();
    let m = if m.nrows() < cols {
        m.resize_vertically(cols, C64::new(0.0, 0.0))
    } else {
        m
    };
    if cols == 0 {
        return Subspace::zero(0, 1, tol);
    }
    let svd = m.svd(false, true);
    let sigma_max = svd.singular_values.iter().fold(0.0_f64, |a, s| a.max(*s));
    let v_t = svd.v_t.expect("requested right singular vectors");
    let threshold = tol * sigma_max.max(floor);
    let candidates: Vec<Matrix> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] <= threshold)
        .map(|k| Matrix::from_fn(cols, 1, |i, _| v_t[(k, i)].conj()))
        .collect();
    // Singular vectors are orthonormal already; one more pass cleans up rounding.
    Subspace::span(cols, 1, candidates.iter(), tol).expect("column vectors share a shape")
}

/// Orthonormal basis (as column vectors) of `{x : ‖Mx‖ ≤ tol·‖M‖·‖x‖}`.
pub fn null_space(m: &Matrix, tol: f64) -> Subspace {
    null_space_of_square(compress_rows(m.clone()), 0.0, tol)
}

/// Null space of the vertical stack of `blocks`, compressed block by block so
/// that the working matrix never exceeds `2·cols` rows.
///
/// Singular values up to `tol·max(σ_max, scale)` count as zero; `scale` is
/// the size of the terms the blocks were computed from, so a stack that is
/// pure rounding noise is recognised as zero.
pub fn null_space_stacked<I>(cols: usize, blocks: I, scale: f64, tol: f64) -> Result<Subspace>
where
    I: IntoIterator<Item = Matrix>,
{
    let mut acc = Matrix::zeros(0, cols);
    for b in blocks {
        if b.ncols() != cols {
            return Err(Error::ShapeMismatch {
                expected: (b.nrows(), cols),
                found: b.shape(),
            });
        }
        let rows = acc.nrows() + b.nrows();
        let mut stacked = acc.resize_vertically(rows, C64::new(0.0, 0.0));
        let start = rows - b.nrows();
        stacked.view_mut((start, 0), b.shape()).copy_from(&b);
        acc = if stacked.nrows() > 2 * cols {
            compress_rows(stacked)
        } else {
            stacked
        };
    }
    Ok(null_space_of_square(compress_rows(acc), scale, tol))
}

/// Number of singular values above `tol·σ_max`.
pub fn numeric_rank(m: &Matrix, tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().singular_values();
    let max = sv.iter().fold(0.0_f64, |a, s| a.max(*s));
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > tol * max).count()
}

/// Column-major vectorization.
pub fn vec_of(m: &Matrix) -> Matrix {
    Matrix::from_column_slice(m.len(), 1, m.as_slice())
}

pub fn unvec(v: &Matrix, rows: usize, cols: usize) -> Matrix {
    Matrix::from_column_slice(rows, cols, v.as_slice())
}

/// Stacked vectorization of a list of matrices, one column per matrix.
pub fn stack_columns(ms: &[Matrix]) -> Matrix {
    let len = ms.first().map_or(0, |m| m.len());
    Matrix::from_fn(len, ms.len(), |i, j| ms[j].as_slice()[i])
}

/// The `Q` factor of a thin QR decomposition, with column phases chosen so
/// that `R` has a positive real diagonal.
pub fn orthonormal_factor(m: &Matrix) -> Matrix {
    let cols = m.ncols();
    let qr = m.clone().qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..cols {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}
