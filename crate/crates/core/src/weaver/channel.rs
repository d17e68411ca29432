//! Completely positive maps between matrix algebras, their quantum
//! relations `T_φ`, and the cohomomorphism correspondence.

use std::sync::Arc;

use super::algebra::{MatrixAlgebra, QuantumRelationW};
use crate::error::{Error, Result};
use crate::numkernel::{hs_inner, identity, psd_sqrt, Matrix, SpanBuilder, Subspace, C64};

/// `φ(a) = Σ v a v†` from `src ⊆ M_m` to `dst ⊆ M_n`.
#[derive(Clone, Debug)]
pub struct CPMap {
    src: Arc<MatrixAlgebra>,
    dst: Arc<MatrixAlgebra>,
    kraus: Vec<Matrix>,
    tol: f64,
}

/// Hermitian `A^{-1/2}` for positive definite `A`.
fn inv_sqrt(a: &Matrix, tol: f64) -> Result<Matrix> {
    let h = (a + a.adjoint()).scale(0.5);
    let eig = h.symmetric_eigen();
    let n = a.nrows();
    let mut out = Matrix::zeros(n, n);
    let scale = eig.eigenvalues.iter().fold(0.0_f64, |m, x| m.max(x.abs())).max(1.0);
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda <= tol * scale {
            return Err(Error::NegativeEigenvalue(lambda));
        }
        let v = eig.eigenvectors.column(k);
        out += (v * v.adjoint()).scale(1.0 / lambda.sqrt());
    }
    Ok(out)
}

/// Largest eigenvalue of a Hermitian matrix.
fn max_eigenvalue(a: &Matrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    let h = (a + a.adjoint()).scale(0.5);
    h.symmetric_eigen().eigenvalues.iter().fold(f64::NEG_INFINITY, |m, x| m.max(*x))
}

/// Elements `c_h = S^{-1/2} e_h` of a commutant basis rescaled so that
/// `Σ c_h c_h† = 1`; they span the same space.
fn resolution_of_identity(commutant: &Subspace, tol: f64) -> Result<Vec<Matrix>> {
    let m = commutant.rows();
    let mut s = Matrix::zeros(m, m);
    for e in commutant.basis() {
        s += e * e.adjoint();
    }
    let r = inv_sqrt(&s, tol)?;
    Ok(commutant.basis().iter().map(|e| &r * e).collect())
}

impl CPMap {
    /// Validates shapes, `Σ v†v ≤ 1` and `φ(a) ∈ dst` on a basis of `src`.
    pub fn new(src: Arc<MatrixAlgebra>, dst: Arc<MatrixAlgebra>, kraus: Vec<Matrix>, tol: f64) -> Result<Self> {
        let (n, m) = (dst.ambient(), src.ambient());
        for v in &kraus {
            if v.shape() != (n, m) {
                return Err(Error::ShapeMismatch {
                    expected: (n, m),
                    found: v.shape(),
                });
            }
            if !crate::numkernel::is_finite(v) {
                return Err(Error::NonFinite);
            }
        }
        let phi = Self { src, dst, kraus, tol };
        let top = max_eigenvalue(&phi.kraus_gram());
        if top > 1.0 + tol.max(1e-12) * 10.0 {
            return Err(Error::Precondition(format!(
                "Σ v†v has eigenvalue {top} above 1"
            )));
        }
        if !phi.dst.is_full() {
            for a in phi.src.basis().basis() {
                if !phi.dst.contains(&phi.apply(a))? {
                    return Err(Error::Precondition("φ leaves the target algebra".into()));
                }
            }
        }
        Ok(phi)
    }

    pub fn src(&self) -> &Arc<MatrixAlgebra> {
        &self.src
    }

    pub fn dst(&self) -> &Arc<MatrixAlgebra> {
        &self.dst
    }

    pub fn kraus(&self) -> &[Matrix] {
        &self.kraus
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn apply(&self, a: &Matrix) -> Matrix {
        let n = self.dst.ambient();
        let mut out = Matrix::zeros(n, n);
        for v in &self.kraus {
            out += v * a * v.adjoint();
        }
        out
    }

    /// `Σ v†v`.
    pub fn kraus_gram(&self) -> Matrix {
        let m = self.src.ambient();
        let mut s = Matrix::zeros(m, m);
        for v in &self.kraus {
            s += v.adjoint() * v;
        }
        s
    }

    /// `max |tr φ(a) − tr a|` over a basis of `src`.
    pub fn trace_defect(&self) -> f64 {
        let proj = self.src.project(&self.kraus_gram()).expect("square");
        (proj - identity(self.src.ambient())).norm()
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.trace_defect() <= self.tol * 10.0
    }

    pub fn is_trace_nonincreasing(&self) -> bool {
        max_eigenvalue(&self.kraus_gram()) <= 1.0 + self.tol * 10.0
    }

    /// `ψ ∘ φ`, with Kraus operators `w v`.
    pub fn then(&self, next: &CPMap) -> Result<CPMap> {
        if next.src.ambient() != self.dst.ambient() {
            return Err(Error::SetMismatch("channels do not compose".into()));
        }
        let mut kraus = Vec::with_capacity(self.kraus.len() * next.kraus.len());
        for w in &next.kraus {
            for v in &self.kraus {
                kraus.push(w * v);
            }
        }
        CPMap::new(self.src.clone(), next.dst.clone(), kraus, self.tol.max(next.tol))
    }

    /// Kraus operators `d_j v_i c_h` for the same map on `src` whose span is
    /// exactly `T_φ`; `c_h` and `d_j` run over rescaled bases of the
    /// commutants with `Σ c c† = 1` and `Σ d d† = 1`.
    pub fn spanning_kraus(&self) -> Result<Vec<Matrix>> {
        let cs = resolution_of_identity(self.src.commutant(), self.tol)?;
        let ds = resolution_of_identity(self.dst.commutant(), self.tol)?;
        let mut out = Vec::with_capacity(cs.len() * ds.len() * self.kraus.len());
        for d in &ds {
            for v in &self.kraus {
                let dv = d * v;
                for c in &cs {
                    out.push(&dv * c);
                }
            }
        }
        Ok(out)
    }
}

/// `T_φ = span{b′ v a′}`.
pub fn t_phi(phi: &CPMap) -> Result<QuantumRelationW> {
    QuantumRelationW::generated(phi.src.clone(), phi.dst.clone(), &phi.kraus, phi.tol)
}

/// The confusability relation `T_φ† · T_φ` on `src`.
pub fn confusability(phi: &CPMap) -> Result<QuantumRelationW> {
    let t = t_phi(phi)?;
    t.dagger().compose(&t)
}

fn check_vector(x: &Matrix, len: usize) -> Result<()> {
    if x.shape() != (len, 1) {
        return Err(Error::ShapeMismatch {
            expected: (len, 1),
            found: x.shape(),
        });
    }
    if x.norm() == 0.0 {
        return Err(Error::Invalid("state vector is zero".into()));
    }
    Ok(())
}

fn decide(trace_side: f64, subspace_side: f64, tol: f64, what: &str) -> Result<bool> {
    let a = trace_side > tol;
    let b = subspace_side > tol;
    if a != b {
        return Err(Error::NumericalDisagreement(format!(
            "{what}: trace test {trace_side:e} vs subspace test {subspace_side:e}"
        )));
    }
    Ok(a)
}

/// Whether the channel can confuse `x1` and `x2`.
///
/// Evaluates `tr(φ(x1 x1†) φ(x2 x2†))` with a Kraus family spanning `T_φ`
/// and `x1† (T_φ† T_φ) x2`, and fails if the two disagree.
pub fn confusable(phi: &CPMap, x1: &Matrix, x2: &Matrix) -> Result<bool> {
    let m = phi.src.ambient();
    check_vector(x1, m)?;
    check_vector(x2, m)?;
    let ks = phi.spanning_kraus()?;
    let spanning = CPMap {
        src: phi.src.clone(),
        dst: phi.dst.clone(),
        kraus: ks,
        tol: phi.tol,
    };
    // tr(φ(x1 x1†) φ(x2 x2†)) expanded as Σ_ij |x1† v_i† v_j x2|², which
    // keeps full relative precision when the trace is tiny.
    let left: Vec<Matrix> = spanning.kraus.iter().map(|v| v * x1).collect();
    let right: Vec<Matrix> = spanning.kraus.iter().map(|v| v * x2).collect();
    let mut t = 0.0;
    for a in &left {
        for b in &right {
            t += (a.adjoint() * b)[(0, 0)].norm_sqr();
        }
    }
    let weight: f64 = spanning.kraus.iter().map(|k| k.norm_squared()).sum();
    let scale = x1.norm() * x2.norm();
    let trace_side = t.sqrt() / (scale * weight.max(f64::MIN_POSITIVE));
    let tt = confusability(phi)?;
    let subspace_side = tt
        .space()
        .basis()
        .iter()
        .map(|b| (x1.adjoint() * b * x2)[(0, 0)].norm())
        .fold(0.0_f64, f64::max)
        / scale;
    decide(trace_side, subspace_side, phi.tol, "confusability")
}

/// Whether `x1 ∈ ℂ^m` can be sent to `x2 ∈ ℂ^n` with nonzero probability;
/// compares `tr(x2 x2† φ(x1 x1†))` against `x2† T_φ x1`.
pub fn transition_possible(phi: &CPMap, x1: &Matrix, x2: &Matrix) -> Result<bool> {
    check_vector(x1, phi.src.ambient())?;
    check_vector(x2, phi.dst.ambient())?;
    let ks = phi.spanning_kraus()?;
    let mut t = 0.0;
    let mut weight = 0.0;
    for k in &ks {
        t += (x2.adjoint() * k * x1)[(0, 0)].norm_sqr();
        weight += k.norm_squared();
    }
    let scale = x1.norm() * x2.norm();
    let trace_side = t.sqrt() / (scale * weight.max(f64::MIN_POSITIVE).sqrt());
    let subspace_side = t_phi(phi)?
        .space()
        .basis()
        .iter()
        .map(|b| (x2.adjoint() * b * x1)[(0, 0)].norm())
        .fold(0.0_f64, f64::max)
        / scale;
    decide(trace_side, subspace_side, phi.tol, "transition")
}

fn check_on(r: &QuantumRelationW, alg: &Arc<MatrixAlgebra>, what: &str) -> Result<()> {
    if r.src().ambient() != alg.ambient() || r.dst().ambient() != alg.ambient() {
        return Err(Error::SetMismatch(format!("{what} is not a relation on the expected algebra")));
    }
    Ok(())
}

/// `T_φ · R · T_φ†` on `dst`.
pub fn pushforward(phi: &CPMap, r: &QuantumRelationW) -> Result<QuantumRelationW> {
    check_on(r, &phi.src, "R")?;
    let t = t_phi(phi)?;
    t.compose(r)?.compose(&t.dagger())
}

/// `T_φ† · S · T_φ` on `src`.
pub fn pullback(phi: &CPMap, s: &QuantumRelationW) -> Result<QuantumRelationW> {
    check_on(s, &phi.dst, "S")?;
    let t = t_phi(phi)?;
    t.dagger().compose(s)?.compose(&t)
}

/// `pushforward(φ, R) ≤ S`.
pub fn is_cp_morphism(phi: &CPMap, r: &QuantumRelationW, s: &QuantumRelationW) -> Result<bool> {
    pushforward(phi, r)?.leq(s)
}

/// Residuals of the checks that `φ†` is a unital †-homomorphism and `φ`
/// preserves the trace.
#[derive(Clone, Debug, PartialEq)]
pub struct CohomReport {
    pub multiplicativity: f64,
    pub adjoint: f64,
    pub unit: f64,
    pub range: f64,
    pub trace: f64,
    pub passed: bool,
}

/// `φ† : N → M` as the Hilbert–Schmidt adjoint of `φ` restricted to `M`,
/// assembled from the matrix of `φ` in orthonormal bases.
pub fn hs_adjoint(phi: &CPMap) -> impl Fn(&Matrix) -> Matrix + '_ {
    let src_basis: Vec<Matrix> = phi.src.basis().basis().to_vec();
    let images: Vec<Matrix> = src_basis.iter().map(|a| phi.apply(a)).collect();
    move |b: &Matrix| {
        let m = phi.src.ambient();
        let mut out = Matrix::zeros(m, m);
        for (a, fa) in src_basis.iter().zip(&images) {
            // ⟨a, π(b)⟩ = ⟨φ(a), b⟩
            let c = hs_inner(fa, b);
            out += a.scale(1.0) * c;
        }
        out
    }
}

pub fn is_tp_cohomomorphism(phi: &CPMap) -> Result<CohomReport> {
    let pi = hs_adjoint(phi);
    let dst_basis = phi.dst.basis().basis();
    let images: Vec<Matrix> = dst_basis.iter().map(&pi).collect();
    let mut multiplicativity = 0.0_f64;
    let mut adjoint = 0.0_f64;
    let mut range = 0.0_f64;
    for (b1, p1) in dst_basis.iter().zip(&images) {
        adjoint = adjoint.max((pi(&b1.adjoint()) - p1.adjoint()).norm());
        let proj = phi.src.project(p1)?;
        range = range.max((&proj - p1).norm());
        for (b2, p2) in dst_basis.iter().zip(&images) {
            multiplicativity = multiplicativity.max((pi(&(b1 * b2)) - p1 * p2).norm());
        }
    }
    let unit = (pi(&identity(phi.dst.ambient())) - identity(phi.src.ambient())).norm();
    let mut trace = 0.0_f64;
    for a in phi.src.basis().basis() {
        trace = trace.max((phi.apply(a).trace() - a.trace()).norm());
    }
    let tol = phi.tol * 10.0;
    let passed = multiplicativity <= tol && adjoint <= tol && unit <= tol && range <= tol && trace <= tol;
    Ok(CohomReport {
        multiplicativity,
        adjoint,
        unit,
        range,
        trace,
        passed,
    })
}

/// `{v : b v = v φ†(b) for all b ∈ N}`; checked against `T_φ`.
pub fn intertwiner_space(phi: &CPMap) -> Result<QuantumRelationW> {
    let report = is_tp_cohomomorphism(phi)?;
    if !report.passed {
        return Err(Error::Precondition("map is not a trace-preserving †-cohomomorphism".into()));
    }
    let (n, m) = (phi.dst.ambient(), phi.src.ambient());
    let pi = hs_adjoint(phi);
    let gens = phi.dst.generators();
    let images: Vec<Matrix> = gens.iter().map(&pi).collect();
    let scale = gens.iter().chain(&images).map(|b| b.norm()).fold(0.0, f64::max);
    // vec(b v − v π(b)) = (1_m ⊗ b − π(b)ᵀ ⊗ 1_n) vec(v)
    let blocks = gens
        .iter()
        .zip(&images)
        .map(|(b, p)| identity(m).kronecker(b) - p.transpose().kronecker(&identity(n)));
    let ns = crate::numkernel::null_space_stacked(n * m, blocks, scale, phi.tol)?;
    let mats: Vec<Matrix> = ns.basis().iter().map(|v| crate::numkernel::unvec(v, n, m)).collect();
    let space = Subspace::span(n, m, mats.iter(), phi.tol)?;
    let f = QuantumRelationW::new(phi.src.clone(), phi.dst.clone(), space)?;
    if !f.equal(&t_phi(phi)?)? {
        return Err(Error::Verification("intertwiner space differs from T_φ".into()));
    }
    Ok(f)
}

/// `M′ ⊆ F† · F` and `F · F† ⊆ N′`.
pub fn satisfies_function_conditions(f: &QuantumRelationW) -> Result<bool> {
    let ff = f.dagger().compose(f)?;
    if !f.src().commutant().leq(ff.space())? {
        return Ok(false);
    }
    let ffd = f.compose(&f.dagger())?;
    ffd.space().leq(f.dst().commutant())
}

/// Reconstructs the trace-preserving †-cohomomorphism `φ` with `T_φ = F`.
///
/// `φ†(b)` is the least-squares solution `X` of `v X = b v` over a basis of
/// `F`, found from the normal equations; `φ` is its Hilbert–Schmidt adjoint, and Kraus operators are read off
/// the eigendecomposition of the Choi matrix of `φ ∘ E_M`, where `E_M` is
/// the trace-preserving projection onto `M`.
pub fn intertwiner_to_cohom(f: &QuantumRelationW) -> Result<CPMap> {
    if !satisfies_function_conditions(f)? {
        return Err(Error::Precondition("F violates M′ ⊆ F†F or FF† ⊆ N′".into()));
    }
    let src = f.src().clone();
    let dst = f.dst().clone();
    let (n, m) = (dst.ambient(), src.ambient());
    let tol = f.space().tol();
    let fb = f.space().basis();
    // Normal equations of min Σ_v ‖v X − b v‖²: (Σ v†v) X = Σ v† b v. The
    // Gram matrix is invertible because 1 ∈ F† · F.
    let mut gram = Matrix::zeros(m, m);
    for v in fb {
        gram += v.adjoint() * v;
    }
    let chol = gram
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Precondition("Σ v†v is singular".into()))?;
    let dst_basis: Vec<Matrix> = dst.basis().basis().to_vec();
    let mut pis = Vec::with_capacity(dst_basis.len());
    for b in &dst_basis {
        let mut rhs = Matrix::zeros(m, m);
        for v in fb {
            rhs += v.adjoint() * b * v;
        }
        let xm = chol.solve(&rhs);
        let resid: f64 = fb.iter().map(|v| (v * &xm - b * v).norm_squared()).sum::<f64>().sqrt();
        if resid > tol * 1e3 * b.norm().max(1.0) {
            return Err(Error::Precondition(format!(
                "v X = b v has no solution (residual {resid:e})"
            )));
        }
        if !src.contains(&xm)? {
            return Err(Error::Verification("φ†(b) falls outside M".into()));
        }
        pis.push(src.project(&xm)?);
    }
    // Unital †-homomorphism checks on the basis.
    let mut pi_id = Matrix::zeros(m, m);
    let id_n = identity(n);
    for (b, p) in dst_basis.iter().zip(&pis) {
        pi_id += p * hs_inner(b, &id_n);
    }
    if (pi_id - identity(m)).norm() > tol * 1e3 {
        return Err(Error::Verification("φ† is not unital".into()));
    }
    let pi_of = |x: &Matrix| {
        let mut out = Matrix::zeros(m, m);
        for (b, p) in dst_basis.iter().zip(&pis) {
            out += p * hs_inner(b, x);
        }
        out
    };
    for (b1, p1) in dst_basis.iter().zip(&pis) {
        if (pi_of(&b1.adjoint()) - p1.adjoint()).norm() > tol * 1e3 {
            return Err(Error::Verification("φ† does not preserve adjoints".into()));
        }
        for (b2, p2) in dst_basis.iter().zip(&pis) {
            if (pi_of(&(b1 * b2)) - p1 * p2).norm() > tol * 1e3 {
                return Err(Error::Verification("φ† is not multiplicative".into()));
            }
        }
    }
    // φ(a) = Σ_k tr(π(f_k)† a) f_k over the orthonormal basis f_k of N.
    let phi_of = |a: &Matrix| {
        let mut out = Matrix::zeros(n, n);
        for (b, p) in dst_basis.iter().zip(&pis) {
            out += b * hs_inner(p, a);
        }
        out
    };
    let mut choi = Matrix::zeros(m * n, m * n);
    for i in 0..m {
        for j in 0..m {
            let e = crate::numkernel::unit(m, m, i, j);
            let img = phi_of(&src.project(&e)?);
            choi.view_mut((i * n, j * n), (n, n)).copy_from(&img);
        }
    }
    let herm = (&choi + choi.adjoint()).scale(0.5);
    let eig = herm.symmetric_eigen();
    let top = eig.eigenvalues.iter().fold(0.0_f64, |a, x| a.max(x.abs())).max(1.0);
    let mut kraus = Vec::new();
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda < -tol * 1e3 * top {
            return Err(Error::Verification(format!("Choi matrix has eigenvalue {lambda:e}")));
        }
        if lambda <= tol * top {
            continue;
        }
        let w = eig.eigenvectors.column(k);
        let s = lambda.sqrt();
        kraus.push(Matrix::from_fn(n, m, |r, i| w[i * n + r] * s));
    }
    let phi = CPMap::new(src.clone(), dst, kraus, tol)?;
    for a in src.basis().basis() {
        if (phi.apply(a) - phi_of(a)).norm() > tol * 1e3 {
            return Err(Error::Verification("Kraus operators do not reproduce φ".into()));
        }
    }
    Ok(phi)
}

/// The three conditions of the cohomomorphism correspondence, evaluated
/// for `F`, `R` on `M` and `S` on `N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoremOReport {
    /// `F · R ⊆ S · F`.
    pub intertwines: bool,
    /// `T_φ · R · T_φ† ⊆ S`.
    pub pushforward: bool,
    /// `R ⊆ T_φ† · S · T_φ`.
    pub pullback: bool,
    /// `T_φ = F` for the reconstructed `φ`.
    pub reconstructs: bool,
}

impl TheoremOReport {
    pub fn agree(&self) -> bool {
        self.intertwines == self.pushforward && self.pushforward == self.pullback
    }
}

pub fn theorem_o_check(f: &QuantumRelationW, r: &QuantumRelationW, s: &QuantumRelationW) -> Result<TheoremOReport> {
    let phi = intertwiner_to_cohom(f)?;
    let intertwines = f.compose(r)?.leq(&s.compose(f)?)?;
    let pushforward = is_cp_morphism(&phi, r, s)?;
    let pullback = r.leq(&self::pullback(&phi, s)?)?;
    let reconstructs = t_phi(&phi)?.equal(f)?;
    Ok(TheoremOReport {
        intertwines,
        pushforward,
        pullback,
        reconstructs,
    })
}

/// Hermitian basis of `R` (orthonormal, first element `1/√m`), assuming `R† = R`.
fn hermitian_basis(r: &Subspace, tol: f64) -> Result<Vec<Matrix>> {
    let m = r.rows();
    let mut b = SpanBuilder::new(m, m, tol);
    b.push(&identity(m))?;
    let half_i = C64::new(0.0, -0.5);
    for x in r.basis() {
        let xd = x.adjoint();
        b.push(&(x + &xd).scale(0.5))?;
        b.push(&((x - &xd) * half_i))?;
    }
    Ok(b
        .finish()
        .into_basis()
        .into_iter()
        .map(|h| (&h + h.adjoint()).scale(0.5))
        .collect())
}

/// A trace-preserving channel `φ : M → M_{km}(ℂ)` with `T_φ† · T_φ = R`, for
/// a reflexive symmetric quantum relation `R` on `M`.
///
/// With a Hermitian basis `1, h_2, …, h_k` of `R` and `ε = 1/(2 max ‖h_i‖)`,
/// the positive definite effects `P_i = (1 + ε h_i)/(2(k−1))` for `i ≥ 2` and
/// `P_1 = 1 − Σ P_i` span `R`; each is routed to its own output block, so
/// cross terms vanish and `T_φ† T_φ` is exactly `M′ · span{P_i} · M′`.
pub fn channel_from_operator_system(r: &QuantumRelationW) -> Result<CPMap> {
    let alg = r.src().clone();
    if r.dst().ambient() != alg.ambient() {
        return Err(Error::Precondition("R must be a relation on one algebra".into()));
    }
    let m = alg.ambient();
    let tol = r.space().tol();
    if !r.dagger().space().equal(r.space())? {
        return Err(Error::NotSymmetric("R† differs from R".into()));
    }
    if !alg.commutant().leq(r.space())? {
        return Err(Error::Precondition("R is not reflexive: M′ ⊄ R".into()));
    }
    let closed = QuantumRelationW::generated(alg.clone(), alg.clone(), r.space().basis(), tol)?;
    if !closed.space().leq(r.space())? {
        return Err(Error::Precondition("M′ · R · M′ differs from R".into()));
    }
    let hs = hermitian_basis(r.space(), tol)?;
    let k = hs.len();
    if k == 1 {
        return CPMap::new(alg.clone(), MatrixAlgebra::full(m)?, vec![identity(m)], tol);
    }
    let eps = 1.0 / (2.0 * hs.iter().map(crate::numkernel::op_norm).fold(0.0_f64, f64::max));
    let denom = 2.0 * (k - 1) as f64;
    let mut effects = Vec::with_capacity(k);
    let mut rest = identity(m);
    for h in &hs[1..] {
        let p = (identity(m) + h.scale(eps)).unscale(denom);
        rest -= &p;
        effects.push(p);
    }
    effects.insert(0, rest);
    let span = Subspace::span(m, m, effects.iter(), tol)?;
    if !span.equal(r.space())? {
        return Err(Error::Verification("effects do not span R".into()));
    }
    let dst = MatrixAlgebra::full(k * m)?;
    let mut kraus = Vec::with_capacity(k);
    for (i, p) in effects.iter().enumerate() {
        let root = psd_sqrt(p, tol)?;
        let mut w = Matrix::zeros(k * m, m);
        w.view_mut((i * m, 0), (m, m)).copy_from(&root);
        kraus.push(w);
    }
    let phi = CPMap::new(alg, dst, kraus, tol)?;
    let defect = (phi.kraus_gram() - identity(m)).norm();
    if defect > 10.0 * tol {
        return Err(Error::Verification(format!("Σ w†w deviates from 1 by {defect:e}")));
    }
    if !confusability(&phi)?.space().equal(r.space())? {
        return Err(Error::Verification("T_φ† T_φ differs from R".into()));
    }
    Ok(phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::{pauli_x, unit, DEFAULT_TOL};
    use crate::random;

    fn identity_channel(m: usize) -> CPMap {
        let a = MatrixAlgebra::full(m).unwrap();
        CPMap::new(a.clone(), a, vec![identity(m)], DEFAULT_TOL).unwrap()
    }

    fn depolarizing() -> CPMap {
        let a = MatrixAlgebra::full(2).unwrap();
        let kraus = (0..2)
            .flat_map(|i| (0..2).map(move |j| unit(2, 2, i, j).scale(std::f64::consts::FRAC_1_SQRT_2)))
            .collect();
        CPMap::new(a.clone(), a, kraus, DEFAULT_TOL).unwrap()
    }

    fn basis_vector(m: usize, i: usize) -> Matrix {
        unit(m, 1, i, 0)
    }

    #[test]
    fn t_phi_examples() {
        assert_eq!(t_phi(&identity_channel(3)).unwrap().space().dim(), 1);
        assert_eq!(t_phi(&depolarizing()).unwrap().space().dim(), 4);
    }

    #[test]
    fn remixed_kraus_gives_same_t() {
        let mut rng = random::rng(5);
        let a = MatrixAlgebra::full(2).unwrap();
        let b = MatrixAlgebra::full(3).unwrap();
        let gs: Vec<Matrix> = (0..2).map(|_| random::gaussian_matrix(&mut rng, 3, 2)).collect();
        let mut s = Matrix::zeros(2, 2);
        for g in &gs {
            s += g.adjoint() * g;
        }
        let norm = inv_sqrt(&s, DEFAULT_TOL).unwrap();
        let kraus: Vec<Matrix> = gs.iter().map(|g| g * &norm).collect();
        let phi = CPMap::new(a.clone(), b.clone(), kraus.clone(), DEFAULT_TOL).unwrap();
        let u = random::isometry(&mut rng, 4, 2);
        let mixed: Vec<Matrix> = (0..4)
            .map(|j| {
                let mut w = Matrix::zeros(3, 2);
                for (i, v) in kraus.iter().enumerate() {
                    w += v * u[(j, i)];
                }
                w
            })
            .collect();
        let psi = CPMap::new(a, b, mixed, DEFAULT_TOL).unwrap();
        assert!(t_phi(&phi).unwrap().equal(&t_phi(&psi).unwrap()).unwrap());
    }

    #[test]
    fn confusability_examples() {
        let id = identity_channel(2);
        let (e0, e1) = (basis_vector(2, 0), basis_vector(2, 1));
        assert!(!confusable(&id, &e0, &e1).unwrap());
        assert!(confusable(&id, &e0, &e0).unwrap());
        assert!(confusable(&depolarizing(), &e0, &e1).unwrap());
        assert!(!transition_possible(&id, &e0, &e1).unwrap());
        assert!(transition_possible(&id, &e0, &e0).unwrap());
    }

    #[test]
    fn cohomomorphism_examples() {
        assert!(is_tp_cohomomorphism(&identity_channel(2)).unwrap().passed);
        assert!(!is_tp_cohomomorphism(&depolarizing()).unwrap().passed);
        // Dual of f : {0,1,2} → {0,1,2,3}.
        let f = [2usize, 0, 2];
        let m = MatrixAlgebra::diag(3).unwrap();
        let n = MatrixAlgebra::diag(4).unwrap();
        let kraus: Vec<Matrix> = f.iter().enumerate().map(|(x, &y)| unit(4, 3, y, x)).collect();
        let phi = CPMap::new(m, n, kraus.clone(), DEFAULT_TOL).unwrap();
        assert!(is_tp_cohomomorphism(&phi).unwrap().passed);
        let space = intertwiner_space(&phi).unwrap();
        let pattern = Subspace::span(4, 3, kraus.iter(), DEFAULT_TOL).unwrap();
        assert!(space.space().equal(&pattern).unwrap());
        let back = intertwiner_to_cohom(&space).unwrap();
        for a in phi.src().basis().basis() {
            assert!((back.apply(a) - phi.apply(a)).norm() < 1e-8);
        }
    }

    #[test]
    fn identity_relation_reconstructs_identity_channel() {
        let a = MatrixAlgebra::full(3).unwrap();
        let f = QuantumRelationW::generated(a.clone(), a.clone(), &[identity(3)], DEFAULT_TOL).unwrap();
        let phi = intertwiner_to_cohom(&f).unwrap();
        let x = random::gaussian_matrix(&mut random::rng(1), 3, 3);
        assert!((phi.apply(&x) - &x).norm() < 1e-8);
    }

    #[test]
    fn pushforward_along_identity() {
        let id = identity_channel(2);
        let a = id.src().clone();
        let r = QuantumRelationW::generated(a.clone(), a, &[identity(2), pauli_x()], DEFAULT_TOL).unwrap();
        assert!(pushforward(&id, &r).unwrap().equal(&r).unwrap());
        assert!(pullback(&id, &r).unwrap().equal(&r).unwrap());
    }

    #[test]
    fn operator_system_channels() {
        let a = MatrixAlgebra::full(2).unwrap();
        let full = QuantumRelationW::generated(a.clone(), a.clone(), a.basis().basis(), DEFAULT_TOL).unwrap();
        let phi = channel_from_operator_system(&full).unwrap();
        assert_eq!(phi.kraus().len(), 4);
        assert!(phi.is_trace_preserving());

        let scalars = QuantumRelationW::generated(a.clone(), a.clone(), &[identity(2)], DEFAULT_TOL).unwrap();
        let phi = channel_from_operator_system(&scalars).unwrap();
        assert_eq!(phi.kraus().len(), 1);

        let d = MatrixAlgebra::diag(2).unwrap();
        let looped_k2 = QuantumRelationW::generated(d.clone(), d, &[identity(2), pauli_x()], DEFAULT_TOL).unwrap();
        let phi = channel_from_operator_system(&looped_k2).unwrap();
        assert!(confusability(&phi).unwrap().equal(&looped_k2).unwrap());
    }
}
