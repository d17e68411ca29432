//! Graph enumeration and seeded random generators for the conformance corpora.

use std::collections::HashSet;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::Result;
use crate::game::{Game, QuantumStrategy};
use crate::graph::{Graph, HomSearch};
use crate::numkernel::{identity, psd_sqrt, Matrix, Subspace, C64, DEFAULT_TOL};
use crate::qgraph::QuantumGraph;
use crate::qrel::Relation;
use crate::qset::{Atom, QuantumSet};
use crate::random::{self, SeededRng};
use crate::weaver::{CPMap, MatrixAlgebra};

/// Bit index of the unordered pair `i ≤ j` among `n` vertices.
fn pair_bit(i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    b * (b + 1) / 2 + a
}

fn permute_mask(mask: u32, n: usize, perm: &[usize]) -> u32 {
    let mut out = 0;
    for j in 0..n {
        for i in 0..=j {
            if mask >> pair_bit(i, j) & 1 == 1 {
                out |= 1 << pair_bit(perm[i], perm[j]);
            }
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn canonical_mask(mask: u32, n: usize, perms: &[Vec<usize>]) -> u32 {
    perms.iter().map(|p| permute_mask(mask, n, p)).min().unwrap_or(mask)
}

fn graph_of_mask(mask: u32, n: usize) -> Graph {
    let mut edges = Vec::new();
    for j in 0..n {
        for i in 0..=j {
            if mask >> pair_bit(i, j) & 1 == 1 {
                edges.push((i, j));
            }
        }
    }
    Graph::from_index_edges(n, &edges)
}

/// One representative per isomorphism class of graphs (loops allowed) on
/// exactly `n` vertices, grown one vertex at a time from the classes on `n − 1`.
pub fn looped_graph_classes(n: usize) -> Vec<Graph> {
    class_masks(n).into_iter().map(|m| graph_of_mask(m, n)).collect()
}

fn class_masks(n: usize) -> Vec<u32> {
    if n == 0 {
        return vec![0];
    }
    let perms = permutations(n);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for base in class_masks(n - 1) {
        // New vertex n − 1 owns bits pair_bit(i, n − 1) for i ≤ n − 1.
        for nbrs in 0u32..(1 << n) {
            let mut mask = base;
            for i in 0..n {
                if nbrs >> i & 1 == 1 {
                    mask |= 1 << pair_bit(i, n - 1);
                }
            }
            let c = canonical_mask(mask, n, &perms);
            if seen.insert(c) {
                out.push(c);
            }
        }
    }
    out.sort_unstable();
    out
}

/// All classes with at most `max_n` vertices.
pub fn looped_graphs_up_to(max_n: usize) -> Vec<Graph> {
    (0..=max_n).flat_map(looped_graph_classes).collect()
}

pub fn random_graph(rng: &mut SeededRng, n: usize, p: f64, loops: bool) -> Graph {
    let mut g = Graph::edgeless(n);
    for i in 0..n {
        for j in i..n {
            if (i != j || loops) && rng.random_bool(p) {
                g.add_edge(i, j);
            }
        }
    }
    g
}

pub fn random_permutation(rng: &mut SeededRng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

pub fn random_quantum_set(rng: &mut SeededRng, max_atoms: usize, max_dim: usize, prefix: &str) -> QuantumSet {
    let k = rng.random_range(1..=max_atoms);
    let atoms = (0..k)
        .map(|i| Atom::new(format!("{prefix}{i}"), rng.random_range(1..=max_dim)))
        .collect();
    QuantumSet::new(atoms).expect("distinct labels, positive dims")
}

/// A random block subspace of dimension 0, 1 or 2 (capped by the block size).
fn random_block(rng: &mut SeededRng, rows: usize, cols: usize) -> Subspace {
    let k = rng.random_range(0..=2usize);
    random::subspace(rng, rows, cols, k, DEFAULT_TOL)
}

pub fn random_relation(rng: &mut SeededRng, x: &QuantumSet, y: &QuantumSet) -> Relation {
    Relation::from_fn(x, y, DEFAULT_TOL, |i, j| Ok(random_block(rng, y.dim(j), x.dim(i))))
        .expect("blocks have the requested shapes")
}

/// Random `E` with `E† = E` on `x`.
pub fn random_symmetric_relation(rng: &mut SeededRng, x: &QuantumSet) -> Relation {
    let n = x.len();
    let mut blocks: Vec<Option<Subspace>> = vec![None; n * n];
    for i in 0..n {
        for j in i..n {
            let (di, dj) = (x.dim(i), x.dim(j));
            if i == j {
                let k = rng.random_range(0..=2usize);
                let hs: Vec<Matrix> = (0..k).map(|_| random::hermitian(rng, di)).collect();
                blocks[i * n + i] = Some(Subspace::span(di, di, hs.iter(), DEFAULT_TOL).expect("square"));
            } else {
                let b = random_block(rng, dj, di);
                blocks[j * n + i] = Some(b.adjoint());
                blocks[i * n + j] = Some(b);
            }
        }
    }
    Relation::from_fn(x, x, DEFAULT_TOL, |i, j| Ok(blocks[i * n + j].clone().expect("filled")))
        .expect("shapes match")
}

/// A quantum graph with `classical` one-dimensional atoms followed by atoms
/// of the given larger dimensions.
pub fn random_mixed_graph(rng: &mut SeededRng, classical: usize, quantum_dims: &[usize]) -> QuantumGraph {
    let mut atoms: Vec<Atom> = (0..classical).map(|i| Atom::new(format!("c{i}"), 1)).collect();
    atoms.extend(quantum_dims.iter().enumerate().map(|(i, &d)| Atom::new(format!("q{i}"), d)));
    let v = QuantumSet::new(atoms).expect("distinct labels");
    let e = random_symmetric_relation(rng, &v);
    QuantumGraph::new(v, e).expect("symmetric by construction")
}

/// A random algebra of the given ambient dimension: full, diagonal, or block diagonal.
pub fn random_algebra(rng: &mut SeededRng, m: usize) -> Arc<MatrixAlgebra> {
    match rng.random_range(0..3) {
        0 => MatrixAlgebra::full(m),
        1 => MatrixAlgebra::diag(m),
        _ => {
            let mut dims = Vec::new();
            let mut left = m;
            while left > 0 {
                let d = rng.random_range(1..=left);
                dims.push(d);
                left -= d;
            }
            MatrixAlgebra::blockdiag(&dims)
        }
    }
    .expect("positive ambient dimension")
}

/// `Σ_j p_j` over the minimal central projections, or `[1]` for a full algebra.
fn block_projections(a: &MatrixAlgebra) -> Vec<Matrix> {
    a.central_projections().unwrap_or_else(|| vec![identity(a.ambient())])
}

/// A random trace-preserving CP map `src → dst`: Kraus operators `q g`
/// with `q` a central projection of `dst`, rescaled by `S^{-1/2}`.
pub fn random_cp_map(rng: &mut SeededRng, src: Arc<MatrixAlgebra>, dst: Arc<MatrixAlgebra>) -> Result<CPMap> {
    let (m, n) = (src.ambient(), dst.ambient());
    let blocks = block_projections(&dst);
    let mut raw = Vec::new();
    let mut s = Matrix::zeros(m, m);
    // Keep drawing until Σ v†v is comfortably invertible.
    while raw.is_empty() || s.symmetric_eigenvalues().min() < 1e-2 {
        for q in &blocks {
            for _ in 0..rng.random_range(1..=2) {
                let v = q * random::gaussian_matrix(rng, n, m);
                s += v.adjoint() * &v;
                raw.push(v);
            }
        }
    }
    let root = psd_sqrt(&s, DEFAULT_TOL)?;
    let inv = root
        .try_inverse()
        .ok_or_else(|| crate::error::Error::Precondition("Kraus family is degenerate".into()))?;
    let kraus = raw.iter().map(|v| v * &inv).collect();
    CPMap::new(src, dst, kraus, DEFAULT_TOL)
}

/// Remixes a Kraus list through a random isometry `U` (`w_j = Σ_i U_ji v_i`).
pub fn remix(rng: &mut SeededRng, phi: &CPMap, extra: usize) -> Result<CPMap> {
    let k = phi.kraus().len();
    let u = random::isometry(rng, k + extra, k);
    let (n, m) = (phi.dst().ambient(), phi.src().ambient());
    let mixed = (0..k + extra)
        .map(|j| {
            let mut w = Matrix::zeros(n, m);
            for (i, v) in phi.kraus().iter().enumerate() {
                w += v * u[(j, i)];
            }
            w
        })
        .collect();
    CPMap::new(phi.src().clone(), phi.dst().clone(), mixed, phi.tol())
}

/// The pullback-dual of `f : X → Y` on diagonal algebras, Kraus `E_{f(x), x}`.
pub fn classical_dual(nx: usize, ny: usize, f: &[usize]) -> Result<CPMap> {
    let kraus = f
        .iter()
        .enumerate()
        .map(|(x, &y)| crate::numkernel::unit(ny, nx, y, x))
        .collect();
    CPMap::new(MatrixAlgebra::diag(nx)?, MatrixAlgebra::diag(ny)?, kraus, DEFAULT_TOL)
}

/// A random trace-preserving †-cohomomorphism `⊕ M_{m_j} → ⊕ M_{n_k}`,
/// dual to a unital †-homomorphism that places `c_jk` copies of block `k`
/// inside block `j`, up to a random unitary `W_j`.
pub fn random_block_cohom(rng: &mut SeededRng) -> Result<CPMap> {
    let nk: Vec<usize> = (0..rng.random_range(1..=2)).map(|_| rng.random_range(1..=2)).collect();
    let blocks_m = rng.random_range(1..=2);
    let mut mult: Vec<Vec<usize>> = Vec::new();
    let mut mj: Vec<usize> = Vec::new();
    while mult.len() < blocks_m {
        let c: Vec<usize> = nk.iter().map(|_| rng.random_range(0..=2)).collect();
        let size: usize = c.iter().zip(&nk).map(|(c, n)| c * n).sum();
        if (1..=4).contains(&size) {
            mult.push(c);
            mj.push(size);
        }
    }
    let (m, n): (usize, usize) = (mj.iter().sum(), nk.iter().sum());
    let mut kraus = Vec::new();
    let mut m_off = 0;
    for (j, c) in mult.iter().enumerate() {
        let w = random::unitary(rng, mj[j]);
        let wd = w.adjoint();
        let mut copy_off = 0;
        let mut n_off = 0;
        for (k, &copies) in c.iter().enumerate() {
            for _ in 0..copies {
                let mut u = Matrix::zeros(n, m);
                let sel = wd.rows(copy_off, nk[k]);
                u.view_mut((n_off, m_off), (nk[k], mj[j])).copy_from(&sel);
                kraus.push(u);
                copy_off += nk[k];
            }
            n_off += nk[k];
        }
        m_off += mj[j];
    }
    CPMap::new(MatrixAlgebra::blockdiag(&mj)?, MatrixAlgebra::blockdiag(&nk)?, kraus, DEFAULT_TOL)
}

/// Random Hermitian supported on a random symmetric pattern that always
/// contains at least one entry.
pub fn sparse_hermitian(rng: &mut SeededRng, m: usize) -> Matrix {
    let h = random::hermitian(rng, m);
    let mut out = Matrix::zeros(m, m);
    let (a, b) = (rng.random_range(0..m), rng.random_range(0..m));
    for i in 0..m {
        for j in i..m {
            if (i, j) == (a.min(b), a.max(b)) || rng.random_bool(0.2) {
                out[(i, j)] = h[(i, j)];
                out[(j, i)] = h[(j, i)];
            }
        }
    }
    out
}

/// One entry of the strategy corpus shared by several criteria.
#[derive(Clone, Debug)]
pub struct StrategyCase {
    pub game: Game,
    pub strategy: QuantumStrategy,
    pub kind: &'static str,
}

/// Games with classical homomorphisms, used to grow lifted strategies.
pub fn corpus_games() -> Vec<Game> {
    let pairs = [
        (Graph::cycle(5), Graph::complete(3)),
        (Graph::complete(3), Graph::complete(3)),
        (Graph::cycle(4), Graph::complete(2)),
        (Graph::path(4), Graph::complete(3)),
        (Graph::cycle(6), Graph::complete(2)),
        (Graph::complete(2), Graph::cycle(5)),
    ];
    pairs
        .into_iter()
        .map(|(g, h)| Game::new(g, h).expect("simple graphs"))
        .collect()
}

/// `p(g, h) = U D(g, h) U†` with `D(g, h)` the diagonal projection onto the
/// columns `k` whose assignment sends `g` to `h`.
pub fn lift_columns(game: &Game, cols: &[Vec<usize>], u: &Matrix) -> Result<QuantumStrategy> {
    let (ng, nh, n) = (game.g().len(), game.h().len(), cols.len());
    let ud = u.adjoint();
    let mut p = Vec::with_capacity(ng * nh);
    for g in 0..ng {
        for h in 0..nh {
            let mut d = Matrix::zeros(n, n);
            for (k, col) in cols.iter().enumerate() {
                if col[g] == h {
                    d[(k, k)] = C64::new(1.0, 0.0);
                }
            }
            p.push(u * d * &ud);
        }
    }
    QuantumStrategy::new(n, ng, nh, p)
}

fn pick_homs(rng: &mut SeededRng, homs: &[Vec<usize>], n: usize) -> Vec<Vec<usize>> {
    (0..n).map(|_| homs[rng.random_range(0..homs.len())].clone()).collect()
}

/// Winning lifts of classical homomorphisms (`n ≤ 3`), block sums, and
/// losing variants obtained by moving one column to a clashing output or by
/// rotating two outputs of one input by π/4.
pub fn strategy_corpus(seed: u64) -> Result<Vec<StrategyCase>> {
    let mut rng = random::rng(seed);
    let mut out = Vec::new();
    for game in corpus_games() {
        let homs = HomSearch::new(game.g(), game.h()).all();
        let lift = |rng: &mut SeededRng, n: usize| -> Result<QuantumStrategy> {
            let cols = pick_homs(rng, &homs, n);
            let u = random::unitary(rng, n);
            lift_columns(&game, &cols, &u)
        };
        for n in [1, 1, 2, 2, 2, 2, 3, 3, 3] {
            let s = lift(&mut rng, n)?;
            out.push(StrategyCase {
                game: game.clone(),
                strategy: s,
                kind: "lift",
            });
        }
        for _ in 0..2 {
            let s = lift(&mut rng, 1)?.direct_sum(&lift(&mut rng, 2)?)?;
            out.push(StrategyCase {
                game: game.clone(),
                strategy: s,
                kind: "block-sum",
            });
        }
        // Column moved onto the image of a neighbour: p(g, h') meets p(g2, h').
        for n in [1, 2, 3] {
            let mut cols = pick_homs(&mut rng, &homs, n);
            let edges = game.g().edges();
            let (g, g2) = edges[rng.random_range(0..edges.len())];
            let k = rng.random_range(0..n);
            cols[k][g] = cols[k][g2];
            let u = random::unitary(&mut rng, n);
            let s = lift_columns(&game, &cols, &u)?;
            out.push(StrategyCase {
                game: game.clone(),
                strategy: s.clone(),
                kind: "moved-column",
            });
            if n == 1 {
                let w = lift(&mut rng, 1)?;
                out.push(StrategyCase {
                    game: game.clone(),
                    strategy: w.direct_sum(&s)?,
                    kind: "block-sum",
                });
            }
        }
        for _ in 0..2 {
            if let Some(s) = rotated_variant(&mut rng, &game, &homs)? {
                out.push(StrategyCase {
                    game: game.clone(),
                    strategy: s,
                    kind: "rotated",
                });
            }
        }
    }
    Ok(out)
}

/// Two-dimensional lift in which, at one input `g` with `f1(g) ≠ f2(g)`, the
/// two outputs receive `(e0 ± e1)/√2` instead of `e0` and `e1`.
fn rotated_variant(rng: &mut SeededRng, game: &Game, homs: &[Vec<usize>]) -> Result<Option<QuantumStrategy>> {
    for _ in 0..20 {
        let cols = pick_homs(rng, homs, 2);
        let diff: Vec<usize> = (0..game.g().len()).filter(|&g| cols[0][g] != cols[1][g]).collect();
        if diff.is_empty() {
            continue;
        }
        let g = diff[rng.random_range(0..diff.len())];
        let base = lift_columns(game, &cols, &identity(2))?;
        let nh = game.h().len();
        let mut p = base.projections().to_vec();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let plus = Matrix::from_column_slice(2, 1, &[C64::new(r, 0.0), C64::new(r, 0.0)]);
        let minus = Matrix::from_column_slice(2, 1, &[C64::new(r, 0.0), C64::new(-r, 0.0)]);
        p[g * nh + cols[0][g]] = &plus * plus.adjoint();
        p[g * nh + cols[1][g]] = &minus * minus.adjoint();
        let s = QuantumStrategy::new(2, game.g().len(), nh, p)?;
        let u = random::unitary(rng, 2);
        return Ok(Some(s.conjugate(&u)?));
    }
    Ok(None)
}
