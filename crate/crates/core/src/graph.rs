//! Classical simple-or-looped graphs and backtracking homomorphism search.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// A finite graph with a symmetric adjacency relation; loops are allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    labels: Vec<String>,
    adj: Vec<Vec<bool>>,
}

impl Graph {
    /// Builds a graph from undirected edges given by label; each pair is added both ways.
    pub fn new<S: AsRef<str>>(labels: &[S], edges: &[(S, S)]) -> Result<Self> {
        let mut g = Self::edgeless_labeled(labels)?;
        let index: HashMap<&str, usize> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_ref(), i))
            .collect();
        for (a, b) in edges {
            let i = *index
                .get(a.as_ref())
                .ok_or_else(|| Error::UnknownLabel(a.as_ref().to_string()))?;
            let j = *index
                .get(b.as_ref())
                .ok_or_else(|| Error::UnknownLabel(b.as_ref().to_string()))?;
            g.add_edge(i, j);
        }
        Ok(g)
    }

    /// Builds a graph from a directed arc list, rejecting it unless it is symmetric.
    pub fn from_arcs(labels: &[String], arcs: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::edgeless_labeled(labels)?;
        for &(i, j) in arcs {
            if i >= g.len() || j >= g.len() {
                return Err(Error::Invalid(format!("arc ({i},{j}) out of range")));
            }
            g.adj[i][j] = true;
        }
        for i in 0..g.len() {
            for j in 0..g.len() {
                if g.adj[i][j] != g.adj[j][i] {
                    return Err(Error::NotSymmetric(format!(
                        "arc {} -> {} has no reverse",
                        g.labels[i], g.labels[j]
                    )));
                }
            }
        }
        Ok(g)
    }

    /// Graph on vertices `0..n` (labels are the decimal indices) from undirected index pairs.
    pub fn from_index_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Self::edgeless(n);
        for &(i, j) in edges {
            g.add_edge(i, j);
        }
        g
    }

    fn edgeless_labeled<S: AsRef<str>>(labels: &[S]) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for l in labels {
            if !seen.insert(l.as_ref()) {
                return Err(Error::DuplicateLabel(l.as_ref().to_string()));
            }
        }
        let n = labels.len();
        Ok(Self {
            labels: labels.iter().map(|l| l.as_ref().to_string()).collect(),
            adj: vec![vec![false; n]; n],
        })
    }

    pub fn edgeless(n: usize) -> Self {
        let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        Self::edgeless_labeled(&labels).expect("decimal labels are distinct")
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::edgeless(n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    g.adj[i][j] = true;
                }
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Self::edgeless(n);
        for i in 0..n {
            g.add_edge(i, (i + 1) % n);
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let mut g = Self::edgeless(n);
        for i in 1..n {
            g.add_edge(i - 1, i);
        }
        g
    }

    /// A single vertex with a loop.
    pub fn looped_vertex() -> Self {
        let mut g = Self::edgeless(1);
        g.add_edge(0, 0);
        g
    }

    pub fn add_edge(&mut self, i: usize, j: usize) {
        self.adj[i][j] = true;
        self.adj[j][i] = true;
    }

    pub fn remove_edge(&mut self, i: usize, j: usize) {
        self.adj[i][j] = false;
        self.adj[j][i] = false;
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adj[i][j]
    }

    pub fn has_loop(&self, i: usize) -> bool {
        self.adj[i][i]
    }

    pub fn is_simple(&self) -> bool {
        (0..self.len()).all(|i| !self.adj[i][i])
    }

    /// Each undirected edge once, `i ≤ j`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.len() {
            for j in i..self.len() {
                if self.adj[i][j] {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&j| self.adj[i][j])
    }

    /// Vertices `(g, h)` at index `g·|H| + h` with labels `(g,h)`.
    pub fn box_product(&self, other: &Graph) -> Graph {
        let (n, m) = (self.len(), other.len());
        let labels: Vec<String> = self
            .labels
            .iter()
            .flat_map(|a| other.labels.iter().map(move |b| format!("({a},{b})")))
            .collect();
        let mut adj = vec![vec![false; n * m]; n * m];
        for g1 in 0..n {
            for h1 in 0..m {
                for g2 in 0..n {
                    for h2 in 0..m {
                        let e = (g1 == g2 && other.adj[h1][h2]) || (self.adj[g1][g2] && h1 == h2);
                        adj[g1 * m + h1][g2 * m + h2] = e;
                    }
                }
            }
        }
        Graph { labels, adj }
    }

    /// Disjoint union with `L.`/`R.` labels.
    pub fn coproduct(&self, other: &Graph) -> Graph {
        let n = self.len();
        let total = n + other.len();
        let labels = self
            .labels
            .iter()
            .map(|l| format!("L.{l}"))
            .chain(other.labels.iter().map(|l| format!("R.{l}")))
            .collect();
        let mut adj = vec![vec![false; total]; total];
        for i in 0..n {
            adj[i][..n].copy_from_slice(&self.adj[i]);
        }
        for i in 0..other.len() {
            adj[n + i][n..].copy_from_slice(&other.adj[i]);
        }
        Graph { labels, adj }
    }

    /// Relabels vertex `i` as vertex `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Graph {
        let n = self.len();
        let mut labels = vec![String::new(); n];
        let mut adj = vec![vec![false; n]; n];
        for i in 0..n {
            labels[perm[i]] = self.labels[i].clone();
            for j in 0..n {
                adj[perm[i]][perm[j]] = self.adj[i][j];
            }
        }
        Graph { labels, adj }
    }

    pub fn is_homomorphism(&self, f: &[usize], target: &Graph) -> bool {
        f.len() == self.len()
            && f.iter().all(|&h| h < target.len())
            && (0..self.len()).all(|i| {
                (0..self.len()).all(|j| !self.adj[i][j] || target.adj[f[i]][f[j]])
            })
    }

    /// `φ ∼ ψ` iff `φ(g) ∼ ψ(g)` for every vertex `g`.
    pub fn homs_adjacent(f1: &[usize], f2: &[usize], target: &Graph) -> bool {
        f1.iter().zip(f2).all(|(&a, &b)| target.adj[a][b])
    }
}

/// Backtracking search over homomorphisms `g → h`, vertices assigned in
/// breadth-first order so each choice is pruned against assigned neighbors.
pub struct HomSearch<'a> {
    g: &'a Graph,
    h: &'a Graph,
    order: Vec<usize>,
}

impl<'a> HomSearch<'a> {
    pub fn new(g: &'a Graph, h: &'a Graph) -> Self {
        let n = g.len();
        let mut order = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut queue = std::collections::VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                order.push(v);
                for w in g.neighbors(v) {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        Self { g, h, order }
    }

    /// Calls `visit` on each homomorphism until it returns `false`.
    pub fn for_each(&self, mut visit: impl FnMut(&[usize]) -> bool) {
        let mut f = vec![usize::MAX; self.g.len()];
        self.extend(0, &mut f, &mut visit);
    }

    fn extend(&self, depth: usize, f: &mut [usize], visit: &mut impl FnMut(&[usize]) -> bool) -> bool {
        if depth == self.order.len() {
            return visit(f);
        }
        let v = self.order[depth];
        for cand in 0..self.h.len() {
            let ok = self.g.neighbors(v).all(|w| {
                let img = if w == v { cand } else { f[w] };
                img == usize::MAX || self.h.adjacent(cand, img)
            });
            if ok {
                f[v] = cand;
                if !self.extend(depth + 1, f, visit) {
                    f[v] = usize::MAX;
                    return false;
                }
            }
        }
        f[v] = usize::MAX;
        true
    }

    pub fn first(&self) -> Option<Vec<usize>> {
        let mut found = None;
        self.for_each(|f| {
            found = Some(f.to_vec());
            false
        });
        found
    }

    pub fn all(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        self.for_each(|f| {
            out.push(f.to_vec());
            true
        });
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_homs(g: &Graph, h: &Graph) -> Vec<Vec<usize>> {
        let (n, m) = (g.len(), h.len());
        let total = m.pow(n as u32);
        let mut out = Vec::new();
        for code in 0..total {
            let mut c = code;
            let f: Vec<usize> = (0..n)
                .map(|_| {
                    let d = c % m;
                    c /= m;
                    d
                })
                .collect();
            if g.is_homomorphism(&f, h) {
                out.push(f);
            }
        }
        out.sort();
        out
    }

    #[test]
    fn c5_to_k3_exists() {
        let f = HomSearch::new(&Graph::cycle(5), &Graph::complete(3)).first().unwrap();
        assert!(Graph::cycle(5).is_homomorphism(&f, &Graph::complete(3)));
    }

    #[test]
    fn k3_to_k2_does_not() {
        assert!(HomSearch::new(&Graph::complete(3), &Graph::complete(2)).first().is_none());
        assert!(brute_force_homs(&Graph::complete(3), &Graph::complete(2)).is_empty());
    }

    #[test]
    fn search_matches_brute_force() {
        let mut h = Graph::path(3);
        h.add_edge(2, 2);
        let cases = [
            (Graph::cycle(5), Graph::complete(3)),
            (Graph::path(4), Graph::complete(2)),
            (Graph::cycle(4), h.clone()),
            (Graph::looped_vertex(), h),
            (Graph::edgeless(3), Graph::complete(2)),
        ];
        for (g, h) in cases {
            let mut found = HomSearch::new(&g, &h).all();
            found.sort();
            assert_eq!(found, brute_force_homs(&g, &h));
        }
    }

    #[test]
    fn box_product_of_edges_is_a_square() {
        let k2 = Graph::complete(2);
        let sq = k2.box_product(&k2);
        assert_eq!(sq.edges().len(), 4);
        assert!(sq.is_simple());
        assert!(!sq.adjacent(0, 3));
    }

    #[test]
    fn asymmetric_arcs_rejected() {
        let labels = vec!["a".to_string(), "b".to_string()];
        assert!(matches!(
            Graph::from_arcs(&labels, &[(0, 1)]),
            Err(Error::NotSymmetric(_))
        ));
        assert!(Graph::from_arcs(&labels, &[(0, 1), (1, 0)]).is_ok());
    }
}
