//! Numerical search for projective winning strategies.
//!
//! Each input `g` carries a unitary `U_g` and an assignment of its columns
//! to outputs, so `p(g, h)` is the projection onto the columns assigned to
//! `h`. The penalty `Σ tr(p(g1,h1) p(g2,h2))` over losing tuples with
//! `g1 ∼ g2` vanishes exactly on winning strategies; same-input tuples are
//! orthogonal by construction. Gradient steps on the unitaries alternate
//! with optimal reassignment of columns given the other inputs.

use rand::Rng;

use super::{column_projector, verify_strategy, Game, QuantumStrategy};
use crate::error::Result;
use crate::numkernel::{identity, orthonormal_factor, Matrix, DEFAULT_TOL};
use crate::random;

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
    /// Penalty below which a candidate is rounded and verified.
    pub penalty_tol: f64,
    /// Returned strategies pass the verifier at `tol / 1000`, so that they
    /// also pass any later check at `tol`.
    pub tol: f64,
    /// Gradient steps between column reassignments.
    pub reassign_every: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            restarts: 32,
            max_iters: 3000,
            seed: 0,
            penalty_tol: 1e-26,
            tol: DEFAULT_TOL,
            reassign_every: 20,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    /// A verifier-passing strategy, if one was found.
    pub strategy: Option<QuantumStrategy>,
    /// Index of the restart that produced `strategy`, or the number tried.
    pub restarts_tried: usize,
    /// Smallest penalty reached over all restarts.
    pub best_penalty: f64,
    /// `true` when the answer comes from exhaustive enumeration (`n = 1`).
    pub exhaustive: bool,
}

/// Looks for a winning strategy of dimension `n`. For `n = 1` the search is
/// exhaustive, so `None` proves no such strategy exists; for larger `n`,
/// `None` proves nothing.
pub fn search_strategy(game: &Game, n: usize, config: &SearchConfig) -> Result<SearchOutcome> {
    if n == 0 {
        return Err(crate::error::Error::InvalidDimension("n must be at least 1".into()));
    }
    if n == 1 {
        let strategy = match game.classical_hom_search() {
            Some(f) => {
                let s = QuantumStrategy::from_assignment(game, &f, 1)?;
                verify_strategy(&s, game, config.tol)?.passed.then_some(s)
            }
            None => None,
        };
        let best_penalty = if strategy.is_some() { 0.0 } else { f64::INFINITY };
        return Ok(SearchOutcome {
            strategy,
            restarts_tried: 0,
            best_penalty,
            exhaustive: true,
        });
    }
    let mut best_penalty = f64::INFINITY;
    for r in 0..config.restarts {
        let seed = config.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(r as u64);
        let mut state = State::random(game, n, seed);
        let penalty = state.descend(config).max(0.0);
        best_penalty = best_penalty.min(penalty);
        if penalty < config.penalty_tol {
            let s = state.rounded()?;
            if verify_strategy(&s, game, config.tol * 1e-3)?.passed {
                return Ok(SearchOutcome {
                    strategy: Some(s),
                    restarts_tried: r,
                    best_penalty,
                    exhaustive: false,
                });
            }
        }
    }
    Ok(SearchOutcome {
        strategy: None,
        restarts_tried: config.restarts,
        best_penalty,
        exhaustive: false,
    })
}

struct State<'a> {
    game: &'a Game,
    n: usize,
    u: Vec<Matrix>,
    alloc: Vec<Vec<usize>>,
    p: Vec<Matrix>,
}

impl<'a> State<'a> {
    fn random(game: &'a Game, n: usize, seed: u64) -> Self {
        let mut rng = random::rng(seed);
        let (ng, nh) = (game.g().len(), game.h().len());
        let u: Vec<Matrix> = (0..ng).map(|_| random::unitary(&mut rng, n)).collect();
        let alloc: Vec<Vec<usize>> = (0..ng)
            .map(|_| (0..n).map(|_| rng.random_range(0..nh.max(1))).collect())
            .collect();
        let mut s = Self {
            game,
            n,
            u,
            alloc,
            p: Vec::new(),
        };
        s.p = s.projectors(&s.u);
        s
    }

    fn nh(&self) -> usize {
        self.game.h().len()
    }

    fn vertex_projectors(&self, g: usize, u: &Matrix) -> Vec<Matrix> {
        let mut out = vec![Matrix::zeros(self.n, self.n); self.nh()];
        for k in 0..self.n {
            let col = u.columns(k, 1).into_owned();
            out[self.alloc[g][k]] += column_projector(&col);
        }
        out
    }

    fn projectors(&self, u: &[Matrix]) -> Vec<Matrix> {
        (0..u.len())
            .flat_map(|g| self.vertex_projectors(g, &u[g]))
            .collect()
    }

    fn penalty_of(&self, p: &[Matrix]) -> f64 {
        let (g, h, nh) = (self.game.g(), self.game.h(), self.nh());
        let mut total = 0.0;
        for g1 in 0..g.len() {
            for g2 in g.neighbors(g1) {
                for h1 in 0..nh {
                    for h2 in 0..nh {
                        if !h.adjacent(h1, h2) {
                            total += (&p[g1 * nh + h1] * &p[g2 * nh + h2]).trace().re;
                        }
                    }
                }
            }
        }
        total
    }

    /// `B(g, h) = Σ_{g2 ∼ g} Σ_{h2 ≁ h} p(g2, h2)`.
    fn b_matrices(&self, g: usize, p: &[Matrix]) -> Vec<Matrix> {
        let nh = self.nh();
        let mut col_sum = vec![Matrix::zeros(self.n, self.n); nh];
        for g2 in self.game.g().neighbors(g) {
            for h2 in 0..nh {
                col_sum[h2] += &p[g2 * nh + h2];
            }
        }
        (0..nh)
            .map(|h| {
                let mut b = Matrix::zeros(self.n, self.n);
                for (h2, s) in col_sum.iter().enumerate() {
                    if !self.game.h().adjacent(h, h2) {
                        b += s;
                    }
                }
                b
            })
            .collect()
    }

    /// Riemannian gradient of the penalty at every `U_g`.
    fn gradient(&self) -> Vec<Matrix> {
        (0..self.u.len())
            .map(|g| {
                let b = self.b_matrices(g, &self.p);
                let u = &self.u[g];
                let mut e = Matrix::zeros(self.n, self.n);
                for k in 0..self.n {
                    let col = &b[self.alloc[g][k]] * u.column(k);
                    e.set_column(k, &col);
                }
                (&e - u * e.adjoint() * u).scale(2.0)
            })
            .collect()
    }

    /// Sends each column of `U_g` to the output with the smallest local cost,
    /// one input at a time.
    fn reassign(&mut self) {
        let nh = self.nh();
        for g in 0..self.u.len() {
            let b = self.b_matrices(g, &self.p);
            for k in 0..self.n {
                let col = self.u[g].columns(k, 1).into_owned();
                let cost = |h: usize| (col.adjoint() * &b[h] * &col)[(0, 0)].re;
                let mut best = self.alloc[g][k];
                let mut best_cost = cost(best);
                for h in 0..nh {
                    let c = cost(h);
                    if c < best_cost - 1e-15 {
                        best = h;
                        best_cost = c;
                    }
                }
                self.alloc[g][k] = best;
            }
            let pv = self.vertex_projectors(g, &self.u[g]);
            for (h, m) in pv.into_iter().enumerate() {
                self.p[g * nh + h] = m;
            }
        }
    }

    /// Returns the final penalty.
    fn descend(&mut self, config: &SearchConfig) -> f64 {
        self.reassign();
        let mut penalty = self.penalty_of(&self.p);
        let mut step = 0.5_f64;
        for it in 0..config.max_iters {
            if penalty < config.penalty_tol {
                break;
            }
            if it > 0 && it % config.reassign_every.max(1) == 0 {
                self.reassign();
                penalty = self.penalty_of(&self.p);
                if penalty < config.penalty_tol {
                    break;
                }
            }
            let grad = self.gradient();
            let gnorm2: f64 = grad.iter().map(|m| m.norm_squared()).sum();
            if gnorm2 == 0.0 {
                break;
            }
            step = (step * 2.0).min(4.0);
            let mut accepted = false;
            for _ in 0..60 {
                let trial: Vec<Matrix> = self
                    .u
                    .iter()
                    .zip(&grad)
                    .map(|(u, d)| orthonormal_factor(&(u - d.scale(step))))
                    .collect();
                let p = self.projectors(&trial);
                let candidate = self.penalty_of(&p);
                if candidate <= penalty - 1e-4 * step * gnorm2 {
                    self.u = trial;
                    self.p = p;
                    penalty = candidate;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        penalty
    }

    /// Rounds candidate projections to exact PVMs: eigenvectors with
    /// eigenvalue at least 1/2 are kept, orthogonalized across outputs, and
    /// any leftover directions go to the output that weighs them most.
    fn rounded(&self) -> Result<QuantumStrategy> {
        let (ng, nh, n) = (self.u.len(), self.nh(), self.n);
        let mut out = Vec::with_capacity(ng * nh);
        for g in 0..ng {
            let cands = &self.p[g * nh..(g + 1) * nh];
            let mut kept: Vec<Matrix> = Vec::new();
            let mut owner: Vec<usize> = Vec::new();
            for (h, c) in cands.iter().enumerate() {
                let herm = (c + c.adjoint()).scale(0.5);
                let eig = herm.symmetric_eigen();
                for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
                    if lambda >= 0.5 {
                        let v = eig.eigenvectors.columns(k, 1).into_owned();
                        if let Some(w) = orthogonalize(&v, &kept) {
                            kept.push(w);
                            owner.push(h);
                        }
                    }
                }
            }
            let id = identity(n);
            for k in 0..n {
                if kept.len() == n {
                    break;
                }
                let e = id.columns(k, 1).into_owned();
                if let Some(w) = orthogonalize(&e, &kept) {
                    let weight = |h: usize| (w.adjoint() * &cands[h] * &w)[(0, 0)].re;
                    let best = (0..nh)
                        .max_by(|&a, &b| weight(a).total_cmp(&weight(b)))
                        .unwrap_or(0);
                    kept.push(w);
                    owner.push(best);
                }
            }
            let mut pv = vec![Matrix::zeros(n, n); nh];
            for (w, h) in kept.iter().zip(&owner) {
                pv[*h] += column_projector(w);
            }
            out.extend(pv);
        }
        QuantumStrategy::new(n, ng, nh, out)
    }
}

/// Normalized residual of `v` against orthonormal `basis`, if not negligible.
fn orthogonalize(v: &Matrix, basis: &[Matrix]) -> Option<Matrix> {
    let mut w = v.clone();
    for _ in 0..2 {
        for q in basis {
            let c = q.dotc(&w);
            w.zip_apply(q, |a, b| *a -= c * b);
        }
    }
    let norm = w.norm();
    (norm > 1e-6).then(|| w.unscale(norm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    #[test]
    fn n1_is_exhaustive() {
        let cfg = SearchConfig::default();
        let k3k3 = Game::new(Graph::complete(3), Graph::complete(3)).unwrap();
        let out = search_strategy(&k3k3, 1, &cfg).unwrap();
        assert!(out.exhaustive);
        assert!(out.strategy.is_some());
        let k3k2 = Game::new(Graph::complete(3), Graph::complete(2)).unwrap();
        assert!(search_strategy(&k3k2, 1, &cfg).unwrap().strategy.is_none());
    }

    #[test]
    fn c5_k3_at_n2() {
        let game = Game::new(Graph::cycle(5), Graph::complete(3)).unwrap();
        let cfg = SearchConfig {
            seed: 7,
            ..SearchConfig::default()
        };
        let out = search_strategy(&game, 2, &cfg).unwrap();
        let s = out.strategy.expect("a lift exists at n = 2");
        assert!(verify_strategy(&s, &game, DEFAULT_TOL).unwrap().passed);
    }

    #[test]
    fn impossible_game_yields_nothing() {
        let game = Game::new(Graph::complete(3), Graph::complete(2)).unwrap();
        let cfg = SearchConfig {
            restarts: 2,
            max_iters: 200,
            ..SearchConfig::default()
        };
        let out = search_strategy(&game, 2, &cfg).unwrap();
        assert!(out.strategy.is_none());
        assert!(out.best_penalty > 0.0);
    }
}
