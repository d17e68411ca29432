//! The graph homomorphism game: victory predicate, classical and quantum
//! strategies, the projective verifier, `M(G, n)` predicates, win
//! probabilities and simulation.

mod search;

use rand::Rng;

pub use search::{search_strategy, SearchConfig, SearchOutcome};

use crate::error::{Error, Result};
use crate::graph::{Graph, HomSearch};
use crate::numkernel::{hermitian_defect, identity, Matrix, Subspace, DEFAULT_TOL};
use crate::qgraph::QuantumGraph;
use crate::qrel::Relation;
use crate::qset::QuantumSet;
use crate::random;

/// A `(G, H)` homomorphism game on two simple graphs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Game {
    g: Graph,
    h: Graph,
}

impl Game {
    pub fn new(g: Graph, h: Graph) -> Result<Self> {
        if !g.is_simple() || !h.is_simple() {
            return Err(Error::Invalid("game graphs must be loopless".into()));
        }
        Ok(Self { g, h })
    }

    pub fn g(&self) -> &Graph {
        &self.g
    }

    pub fn h(&self) -> &Graph {
        &self.h
    }

    /// `(g1 = g2 ⇒ h1 = h2) ∧ (g1 ∼ g2 ⇒ h1 ∼ h2)`, by vertex index.
    pub fn win(&self, g1: usize, h1: usize, h2: usize, g2: usize) -> bool {
        (g1 != g2 || h1 == h2) && (!self.g.adjacent(g1, g2) || self.h.adjacent(h1, h2))
    }

    /// [`Game::win`] addressed by vertex labels.
    pub fn win_labels(&self, g1: &str, h1: &str, h2: &str, g2: &str) -> Result<bool> {
        let gi = |l: &str| self.g.index_of(l).ok_or_else(|| Error::UnknownLabel(l.into()));
        let hi = |l: &str| self.h.index_of(l).ok_or_else(|| Error::UnknownLabel(l.into()));
        Ok(self.win(gi(g1)?, hi(h1)?, hi(h2)?, gi(g2)?))
    }

    /// Losing tuples `(g1, h1, h2, g2)`.
    pub fn losing_tuples(&self) -> impl Iterator<Item = (usize, usize, usize, usize)> + '_ {
        let (n, m) = (self.g.len(), self.h.len());
        (0..n).flat_map(move |g1| {
            (0..n).flat_map(move |g2| {
                (0..m).flat_map(move |h1| {
                    (0..m)
                        .filter(move |&h2| !self.win(g1, h1, h2, g2))
                        .map(move |h2| (g1, h1, h2, g2))
                })
            })
        })
    }

    /// A homomorphism `G → H` if one exists (exhaustive backtracking).
    pub fn classical_hom_search(&self) -> Option<Vec<usize>> {
        HomSearch::new(&self.g, &self.h).first()
    }
}

/// Deterministic assignments mixed by shared randomness.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalStrategy {
    mixture: Vec<(f64, Vec<usize>)>,
}

impl ClassicalStrategy {
    pub fn deterministic(assignment: Vec<usize>) -> Self {
        Self {
            mixture: vec![(1.0, assignment)],
        }
    }

    /// Weights must be nonnegative and are normalized.
    pub fn mixture(parts: Vec<(f64, Vec<usize>)>) -> Result<Self> {
        let total: f64 = parts.iter().map(|(w, _)| *w).sum();
        if parts.is_empty() || parts.iter().any(|(w, _)| *w < 0.0 || !w.is_finite()) || total <= 0.0 {
            return Err(Error::Invalid("mixture weights must be nonnegative with positive sum".into()));
        }
        Ok(Self {
            mixture: parts.into_iter().map(|(w, a)| (w / total, a)).collect(),
        })
    }

    pub fn parts(&self) -> &[(f64, Vec<usize>)] {
        &self.mixture
    }

    fn check(&self, game: &Game) -> Result<()> {
        for (_, a) in &self.mixture {
            if a.len() != game.g.len() || a.iter().any(|&h| h >= game.h.len()) {
                return Err(Error::Invalid("assignment is not a map V_G → V_H".into()));
            }
        }
        Ok(())
    }

    pub fn exact_win_probability(&self, game: &Game) -> Result<f64> {
        self.check(game)?;
        let n = game.g.len();
        if n == 0 {
            return Ok(1.0);
        }
        let mut total = 0.0;
        for (w, a) in &self.mixture {
            let mut wins = 0usize;
            for g1 in 0..n {
                for g2 in 0..n {
                    if game.win(g1, a[g1], a[g2], g2) {
                        wins += 1;
                    }
                }
            }
            total += w * wins as f64 / (n * n) as f64;
        }
        Ok(total)
    }
}

/// A projective strategy over the maximally entangled state: one `n × n`
/// projection per `(g, h)`, stored at `g·|V_H| + h`.
#[derive(Clone, Debug)]
pub struct QuantumStrategy {
    n: usize,
    ng: usize,
    nh: usize,
    p: Vec<Matrix>,
}

impl QuantumStrategy {
    pub fn new(n: usize, ng: usize, nh: usize, p: Vec<Matrix>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension("strategies need n >= 1".into()));
        }
        if p.len() != ng * nh {
            return Err(Error::Invalid(format!(
                "expected {} projections, found {}",
                ng * nh,
                p.len()
            )));
        }
        for m in &p {
            if m.shape() != (n, n) {
                return Err(Error::ShapeMismatch {
                    expected: (n, n),
                    found: m.shape(),
                });
            }
            if !crate::numkernel::is_finite(m) {
                return Err(Error::NonFinite);
            }
        }
        Ok(Self { n, ng, nh, p })
    }

    /// `p(g, h) = 1_n` if `f(g) = h`, else `0`.
    pub fn from_assignment(game: &Game, f: &[usize], n: usize) -> Result<Self> {
        let (ng, nh) = (game.g.len(), game.h.len());
        if f.len() != ng || f.iter().any(|&h| h >= nh) {
            return Err(Error::Invalid("assignment is not a map V_G → V_H".into()));
        }
        let mut p = Vec::with_capacity(ng * nh);
        for &fg in f {
            for h in 0..nh {
                p.push(if fg == h { identity(n) } else { Matrix::zeros(n, n) });
            }
        }
        Self::new(n, ng, nh, p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_inputs(&self) -> usize {
        self.ng
    }

    pub fn num_outputs(&self) -> usize {
        self.nh
    }

    pub fn get(&self, g: usize, h: usize) -> &Matrix {
        &self.p[g * self.nh + h]
    }

    pub fn projections(&self) -> &[Matrix] {
        &self.p
    }

    /// The PVM `h ↦ p(g, h)` of input `g`.
    pub fn pvm(&self, g: usize) -> &[Matrix] {
        &self.p[g * self.nh..(g + 1) * self.nh]
    }

    fn check(&self, game: &Game) -> Result<()> {
        if self.ng != game.g.len() || self.nh != game.h.len() {
            return Err(Error::ShapeMismatch {
                expected: (game.g.len(), game.h.len()),
                found: (self.ng, self.nh),
            });
        }
        Ok(())
    }

    /// Block-diagonal sum; wins iff both summands win.
    pub fn direct_sum(&self, other: &QuantumStrategy) -> Result<QuantumStrategy> {
        if self.ng != other.ng || self.nh != other.nh {
            return Err(Error::ShapeMismatch {
                expected: (self.ng, self.nh),
                found: (other.ng, other.nh),
            });
        }
        let n = self.n + other.n;
        let p = self
            .p
            .iter()
            .zip(&other.p)
            .map(|(a, b)| {
                let mut m = Matrix::zeros(n, n);
                m.view_mut((0, 0), (self.n, self.n)).copy_from(a);
                m.view_mut((self.n, self.n), (other.n, other.n)).copy_from(b);
                m
            })
            .collect();
        QuantumStrategy::new(n, self.ng, self.nh, p)
    }

    /// `p(g, h) ↦ u p(g, h) u†` for a unitary `u`.
    pub fn conjugate(&self, u: &Matrix) -> Result<QuantumStrategy> {
        if u.shape() != (self.n, self.n) {
            return Err(Error::ShapeMismatch {
                expected: (self.n, self.n),
                found: u.shape(),
            });
        }
        let ud = u.adjoint();
        let p = self.p.iter().map(|m| u * m * &ud).collect();
        QuantumStrategy::new(self.n, self.ng, self.nh, p)
    }
}

/// Residuals of the projective criterion.
#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    /// max over `(g, h)` of `max(‖p − p†‖, ‖p² − p‖)`.
    pub projection_defect: f64,
    /// max over `g` of `‖Σ_h p(g, h) − 1‖`.
    pub completeness_defect: f64,
    /// max of `‖p(g1,h1) p(g2,h2)‖` over losing tuples.
    pub orthogonality_defect: f64,
    /// Losing tuple attaining `orthogonality_defect`.
    pub worst_tuple: Option<(usize, usize, usize, usize)>,
    pub tol: f64,
    pub passed: bool,
}

pub fn verify_strategy(s: &QuantumStrategy, game: &Game, tol: f64) -> Result<VerifyReport> {
    s.check(game)?;
    let mut projection_defect = 0.0_f64;
    for p in &s.p {
        projection_defect = projection_defect
            .max(hermitian_defect(p))
            .max((p * p - p).norm());
    }
    let mut completeness_defect = 0.0_f64;
    for g in 0..s.ng {
        let mut sum = -identity(s.n);
        for p in s.pvm(g) {
            sum += p;
        }
        completeness_defect = completeness_defect.max(sum.norm());
    }
    let mut orthogonality_defect = 0.0_f64;
    let mut worst_tuple = None;
    for (g1, h1, h2, g2) in game.losing_tuples() {
        let r = (s.get(g1, h1) * s.get(g2, h2)).norm();
        if worst_tuple.is_none() || r > orthogonality_defect {
            orthogonality_defect = r;
            worst_tuple = Some((g1, h1, h2, g2));
        }
    }
    let passed = projection_defect <= tol && completeness_defect <= tol && orthogonality_defect <= tol;
    Ok(VerifyReport {
        projection_defect,
        completeness_defect,
        orthogonality_defect,
        worst_tuple,
        tol,
        passed,
    })
}

fn check_square_family(p: &[Matrix]) -> Result<usize> {
    let n = p.first().map_or(0, |m| m.nrows());
    for m in p {
        if m.shape() != (n, n) {
            return Err(Error::ShapeMismatch {
                expected: (n, n),
                found: m.shape(),
            });
        }
    }
    Ok(n)
}

/// Whether `p : V → M_n` is a PVM, i.e. a vertex of `M(G, n)`.
pub fn mgn_vertex(p: &[Matrix], n: usize, tol: f64) -> Result<bool> {
    let m = check_square_family(p)?;
    if !p.is_empty() && m != n {
        return Err(Error::ShapeMismatch {
            expected: (n, n),
            found: (m, m),
        });
    }
    let mut sum = -identity(n);
    for q in p {
        if hermitian_defect(q) > tol || (q * q - q).norm() > tol {
            return Ok(false);
        }
        sum += q;
    }
    Ok(sum.norm() <= tol)
}

/// `p1(g1) p2(g2) = 0` whenever `g1 ≁ g2` in `graph`.
pub fn mgn_adjacent(p1: &[Matrix], p2: &[Matrix], graph: &Graph, tol: f64) -> Result<bool> {
    let n1 = check_square_family(p1)?;
    let n2 = check_square_family(p2)?;
    if p1.len() != graph.len() || p2.len() != graph.len() {
        return Err(Error::Invalid("families must be indexed by the graph's vertices".into()));
    }
    if n1 != n2 {
        return Err(Error::ShapeMismatch {
            expected: (n1, n1),
            found: (n2, n2),
        });
    }
    for g1 in 0..graph.len() {
        for g2 in 0..graph.len() {
            if !graph.adjacent(g1, g2) && (&p1[g1] * &p2[g2]).norm() > tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The relation `Q_n × V_G → V_H` whose block from `(Q, g)` to `h` is
/// `L(ℂⁿ, ℂ) · p(g, h)`, the row space of `p(g, h)`.
pub fn strategy_to_boxhom(s: &QuantumStrategy, game: &Game) -> Result<Relation> {
    s.check(game)?;
    let src = QuantumSet::qn(s.n)?.product(QuantumGraph::inc(&game.g).vertices());
    let dst = QuantumGraph::inc(&game.h).vertices().clone();
    Relation::from_fn(&src, &dst, DEFAULT_TOL, |g, h| {
        let p = s.get(g, h);
        let rows: Vec<Matrix> = (0..s.n).map(|k| p.rows(k, 1).into_owned()).collect();
        Subspace::span(1, s.n, rows.iter(), DEFAULT_TOL)
    })
}

/// The two graphs `Q_n □ Inc(G)` and `Inc(H)` between which
/// [`strategy_to_boxhom`] is meant to be a homomorphism.
pub fn boxhom_endpoints(game: &Game, n: usize) -> Result<(QuantumGraph, QuantumGraph)> {
    let src = QuantumGraph::qn(n)?.box_product(&QuantumGraph::inc(&game.g));
    Ok((src, QuantumGraph::inc(&game.h)))
}

/// Joint outcome distribution `P(h1, h2 | g1, g2) = tr(p(g1,h1) p(g2,h2)) / n`,
/// row-major in `(h1, h2)`.
pub fn outcome_distribution(s: &QuantumStrategy, g1: usize, g2: usize) -> Vec<f64> {
    let nh = s.nh;
    let mut out = Vec::with_capacity(nh * nh);
    for h1 in 0..nh {
        for h2 in 0..nh {
            let t = (s.get(g1, h1) * s.get(g2, h2)).trace();
            out.push(t.re / s.n as f64);
        }
    }
    out
}

/// Win probability under the uniform distribution on `V_G × V_G`.
pub fn exact_win_probability(s: &QuantumStrategy, game: &Game) -> Result<f64> {
    s.check(game)?;
    let ng = s.ng;
    if ng == 0 {
        return Ok(1.0);
    }
    let mut total = 0.0;
    for g1 in 0..ng {
        for g2 in 0..ng {
            let dist = outcome_distribution(s, g1, g2);
            for h1 in 0..s.nh {
                for h2 in 0..s.nh {
                    if game.win(g1, h1, h2, g2) {
                        total += dist[h1 * s.nh + h2];
                    }
                }
            }
        }
    }
    Ok(total / (ng * ng) as f64)
}

#[derive(Clone, Debug)]
pub enum Strategy {
    Classical(ClassicalStrategy),
    Quantum(QuantumStrategy),
}

impl Strategy {
    pub fn exact_win_probability(&self, game: &Game) -> Result<f64> {
        match self {
            Strategy::Classical(c) => c.exact_win_probability(game),
            Strategy::Quantum(q) => exact_win_probability(q, game),
        }
    }
}

fn sample_index<R: Rng + ?Sized>(rng: &mut R, weights: &[f64]) -> usize {
    let clipped: Vec<f64> = weights.iter().map(|w| w.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (k, w) in clipped.iter().enumerate() {
        if *w > 0.0 {
            if u < *w {
                return k;
            }
            u -= w;
        }
    }
    clipped.iter().rposition(|w| *w > 0.0).unwrap_or(0)
}

/// Seeded Monte Carlo estimate of the win rate. Returns `(wins, rounds)`.
pub fn simulate(strategy: &Strategy, game: &Game, rounds: usize, seed: u64) -> Result<(usize, usize)> {
    if rounds == 0 {
        return Err(Error::Invalid("rounds must be at least 1".into()));
    }
    let ng = game.g.len();
    if ng == 0 {
        return Ok((rounds, rounds));
    }
    let mut rng = random::rng(seed);
    let mut wins = 0;
    match strategy {
        Strategy::Classical(c) => {
            c.check(game)?;
            let weights: Vec<f64> = c.mixture.iter().map(|(w, _)| *w).collect();
            for _ in 0..rounds {
                let g1 = rng.random_range(0..ng);
                let g2 = rng.random_range(0..ng);
                let a = &c.mixture[sample_index(&mut rng, &weights)].1;
                if game.win(g1, a[g1], a[g2], g2) {
                    wins += 1;
                }
            }
        }
        Strategy::Quantum(s) => {
            s.check(game)?;
            let mut cache: Vec<Option<Vec<f64>>> = vec![None; ng * ng];
            for _ in 0..rounds {
                let g1 = rng.random_range(0..ng);
                let g2 = rng.random_range(0..ng);
                let dist = cache[g1 * ng + g2].get_or_insert_with(|| outcome_distribution(s, g1, g2));
                let k = sample_index(&mut rng, dist);
                if game.win(g1, k / s.nh, k % s.nh, g2) {
                    wins += 1;
                }
            }
        }
    }
    Ok((wins, rounds))
}

/// Hermitian projection onto the span of the columns of `v`.
pub(crate) fn column_projector(v: &Matrix) -> Matrix {
    v * v.adjoint()
}
