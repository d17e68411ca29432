//! JSON encodings. Complex numbers are `[re, im]` pairs (a bare number is
//! read as a real), matrices are arrays of rows.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Game, QuantumStrategy};
use crate::graph::Graph;
use crate::numkernel::{Matrix, Subspace, C64};
use crate::qgraph::QuantumGraph;
use crate::qrel::Relation;
use crate::qset::{Atom, QuantumSet};
use crate::weaver::{CPMap, MatrixAlgebra, QuantumRelationW};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexJson {
    Pair([f64; 2]),
    Real(f64),
}

pub type MatrixJson = Vec<Vec<ComplexJson>>;

pub fn matrix_to_json(m: &Matrix) -> MatrixJson {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| {
                    let z = m[(i, j)];
                    // Normalize -0.0 so that output is byte-stable.
                    ComplexJson::Pair([z.re + 0.0, z.im + 0.0])
                })
                .collect()
        })
        .collect()
}

/// Parses a matrix; `cols_hint` fixes the width of a matrix with no rows.
pub fn matrix_from_json(rows: &MatrixJson, cols_hint: Option<usize>) -> Result<Matrix> {
    let nrows = rows.len();
    let ncols = rows.first().map(Vec::len).or(cols_hint).unwrap_or(0);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Invalid("matrix rows have different lengths".into()));
    }
    let m = Matrix::from_fn(nrows, ncols, |i, j| match rows[i][j] {
        ComplexJson::Pair([re, im]) => C64::new(re, im),
        ComplexJson::Real(re) => C64::new(re, 0.0),
    });
    if !crate::numkernel::is_finite(&m) {
        return Err(Error::NonFinite);
    }
    Ok(m)
}

fn shaped(rows: &MatrixJson, shape: (usize, usize), what: &str) -> Result<Matrix> {
    let m = matrix_from_json(rows, Some(shape.1))?;
    if m.shape() != shape {
        return Err(Error::Invalid(format!(
            "{what}: expected a {}x{} matrix, found {}x{}",
            shape.0,
            shape.1,
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubspaceJson {
    pub rows: usize,
    pub cols: usize,
    pub basis: Vec<MatrixJson>,
}

impl SubspaceJson {
    pub fn from_subspace(s: &Subspace) -> Self {
        Self {
            rows: s.rows(),
            cols: s.cols(),
            basis: s.basis().iter().map(matrix_to_json).collect(),
        }
    }

    pub fn to_subspace(&self, tol: f64) -> Result<Subspace> {
        let ms = self
            .basis
            .iter()
            .map(|b| shaped(b, (self.rows, self.cols), "subspace basis"))
            .collect::<Result<Vec<_>>>()?;
        Subspace::span(self.rows, self.cols, ms.iter(), tol)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuantumSetJson {
    pub atoms: Vec<Atom>,
}

impl QuantumSetJson {
    pub fn from_set(x: &QuantumSet) -> Self {
        Self { atoms: x.atoms().to_vec() }
    }

    pub fn to_set(&self) -> Result<QuantumSet> {
        QuantumSet::new(self.atoms.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockJson {
    pub i: usize,
    pub j: usize,
    pub basis: Vec<MatrixJson>,
}

/// Omitted blocks are zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationJson {
    pub src: QuantumSetJson,
    pub dst: QuantumSetJson,
    pub blocks: Vec<BlockJson>,
}

impl RelationJson {
    pub fn from_relation(r: &Relation) -> Self {
        Self {
            src: QuantumSetJson::from_set(r.src()),
            dst: QuantumSetJson::from_set(r.dst()),
            blocks: r
                .blocks()
                .filter(|(_, _, b)| !b.is_zero())
                .map(|(i, j, b)| BlockJson {
                    i,
                    j,
                    basis: b.basis().iter().map(matrix_to_json).collect(),
                })
                .collect(),
        }
    }

    pub fn to_relation(&self, tol: f64) -> Result<Relation> {
        let src = self.src.to_set()?;
        let dst = self.dst.to_set()?;
        let mut spanning: BTreeMap<(usize, usize), Vec<Matrix>> = BTreeMap::new();
        for b in &self.blocks {
            if b.i >= src.len() || b.j >= dst.len() {
                return Err(Error::Invalid(format!("block ({}, {}) out of range", b.i, b.j)));
            }
            let shape = (dst.dim(b.j), src.dim(b.i));
            let entry = spanning.entry((b.i, b.j)).or_default();
            for m in &b.basis {
                entry.push(shaped(m, shape, "relation block")?);
            }
        }
        Relation::from_fn(&src, &dst, tol, |i, j| {
            let shape = (dst.dim(j), src.dim(i));
            match spanning.get(&(i, j)) {
                Some(ms) => Subspace::span(shape.0, shape.1, ms.iter(), tol),
                None => Ok(Subspace::zero(shape.0, shape.1, tol)),
            }
        })
    }
}

/// A quantum graph, or the classical shorthand with labels and edge pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GraphJson {
    Classical {
        vertices: Vec<String>,
        edges: Vec<[String; 2]>,
    },
    Quantum {
        vertices: QuantumSetJson,
        edges: RelationJson,
    },
}

impl GraphJson {
    pub fn from_graph(g: &Graph) -> Self {
        GraphJson::Classical {
            vertices: g.labels().to_vec(),
            edges: g
                .edges()
                .into_iter()
                .map(|(i, j)| [g.label(i).to_string(), g.label(j).to_string()])
                .collect(),
        }
    }

    pub fn from_quantum(g: &QuantumGraph) -> Self {
        GraphJson::Quantum {
            vertices: QuantumSetJson::from_set(g.vertices()),
            edges: RelationJson::from_relation(g.edges()),
        }
    }

    pub fn to_quantum(&self, tol: f64) -> Result<QuantumGraph> {
        match self {
            GraphJson::Classical { .. } => Ok(QuantumGraph::inc(&self.to_classical(tol)?)),
            GraphJson::Quantum { vertices, edges } => {
                let v = vertices.to_set()?;
                let e = edges.to_relation(tol)?;
                QuantumGraph::new(v, e)
            }
        }
    }

    /// Accepts the quantum form only when every atom is one-dimensional.
    pub fn to_classical(&self, tol: f64) -> Result<Graph> {
        match self {
            GraphJson::Classical { vertices, edges } => {
                let pairs: Vec<(&str, &str)> = edges.iter().map(|[a, b]| (a.as_str(), b.as_str())).collect();
                let labels: Vec<&str> = vertices.iter().map(String::as_str).collect();
                Graph::new(&labels, &pairs)
            }
            GraphJson::Quantum { .. } => {
                let q = self.to_quantum(tol)?;
                if !q.vertices().is_classical() {
                    return Err(Error::Invalid("expected a classical graph".into()));
                }
                let labels: Vec<String> = q.vertices().atoms().iter().map(|a| a.label.clone()).collect();
                let arcs: Vec<(usize, usize)> = q
                    .edges()
                    .blocks()
                    .filter(|(_, _, b)| !b.is_zero())
                    .map(|(i, j, _)| (i, j))
                    .collect();
                Graph::from_arcs(&labels, &arcs)
            }
        }
    }
}

/// A map between quantum sets: either a relation, or a label assignment
/// `{"x": "y", ...}` between classical graphs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MapJson {
    Relation(RelationJson),
    Assignment(BTreeMap<String, String>),
}

impl MapJson {
    pub fn to_relation(&self, src: &QuantumSet, dst: &QuantumSet, tol: f64) -> Result<Relation> {
        match self {
            MapJson::Relation(r) => r.to_relation(tol),
            MapJson::Assignment(a) => {
                let mut f = Vec::with_capacity(src.len());
                for i in 0..src.len() {
                    let x = src.label(i);
                    let y = a.get(x).ok_or_else(|| Error::UnknownLabel(x.to_string()))?;
                    f.push(dst.index_of(y).ok_or_else(|| Error::UnknownLabel(y.clone()))?);
                }
                if a.len() != src.len() {
                    return Err(Error::Invalid("assignment mentions unknown vertices".into()));
                }
                Ok(Relation::from_map(src, dst, &f)?.with_tol(tol))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameJson {
    #[serde(rename = "G")]
    pub g: GraphJson,
    #[serde(rename = "H")]
    pub h: GraphJson,
}

impl GameJson {
    pub fn from_game(game: &Game) -> Self {
        Self {
            g: GraphJson::from_graph(game.g()),
            h: GraphJson::from_graph(game.h()),
        }
    }

    pub fn to_game(&self, tol: f64) -> Result<Game> {
        Game::new(self.g.to_classical(tol)?, self.h.to_classical(tol)?)
    }
}

/// Projections keyed by `"g,h"` vertex labels; missing keys are zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyJson {
    pub n: usize,
    pub projections: BTreeMap<String, MatrixJson>,
}

impl StrategyJson {
    pub fn from_strategy(s: &QuantumStrategy, game: &Game) -> Self {
        let mut projections = BTreeMap::new();
        for g in 0..s.num_inputs() {
            for h in 0..s.num_outputs() {
                let key = format!("{},{}", game.g().label(g), game.h().label(h));
                projections.insert(key, matrix_to_json(s.get(g, h)));
            }
        }
        Self { n: s.n(), projections }
    }

    pub fn to_strategy(&self, game: &Game) -> Result<QuantumStrategy> {
        let (ng, nh, n) = (game.g().len(), game.h().len(), self.n);
        let mut p = vec![Matrix::zeros(n, n); ng * nh];
        for (key, m) in &self.projections {
            let (gl, hl) = key
                .split_once(',')
                .ok_or_else(|| Error::Invalid(format!("projection key `{key}` is not `g,h`")))?;
            let g = game.g().index_of(gl).ok_or_else(|| Error::UnknownLabel(gl.into()))?;
            let h = game.h().index_of(hl).ok_or_else(|| Error::UnknownLabel(hl.into()))?;
            p[g * nh + h] = shaped(m, (n, n), key)?;
        }
        QuantumStrategy::new(n, ng, nh, p)
    }
}

/// `{"ambient": m}` alone means the full matrix algebra.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraJson {
    pub ambient: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<MatrixJson>>,
}

impl AlgebraJson {
    pub fn from_algebra(a: &MatrixAlgebra) -> Self {
        let (blocks, generators) = match (a.is_full(), a.block_spec()) {
            (true, _) => (None, None),
            (false, Some(d)) => (Some(d.to_vec()), None),
            (false, None) => (None, Some(a.generators().iter().map(matrix_to_json).collect())),
        };
        Self {
            ambient: a.ambient(),
            blocks,
            generators,
        }
    }

    pub fn to_algebra(&self, tol: f64) -> Result<Arc<MatrixAlgebra>> {
        match (&self.blocks, &self.generators) {
            (Some(_), Some(_)) => Err(Error::Invalid("give either blocks or generators, not both".into())),
            (Some(d), None) => {
                if d.iter().sum::<usize>() != self.ambient {
                    return Err(Error::Invalid("block dimensions do not add up to ambient".into()));
                }
                MatrixAlgebra::blockdiag(d)
            }
            (None, Some(gs)) => {
                let m = self.ambient;
                let gens = gs
                    .iter()
                    .map(|g| shaped(g, (m, m), "generator"))
                    .collect::<Result<Vec<_>>>()?;
                MatrixAlgebra::from_generators(m, &gens, tol)
            }
            (None, None) => MatrixAlgebra::full(self.ambient),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CPMapJson {
    pub src: AlgebraJson,
    pub dst: AlgebraJson,
    pub kraus: Vec<MatrixJson>,
}

impl CPMapJson {
    pub fn from_map(phi: &CPMap) -> Self {
        Self {
            src: AlgebraJson::from_algebra(phi.src()),
            dst: AlgebraJson::from_algebra(phi.dst()),
            kraus: phi.kraus().iter().map(matrix_to_json).collect(),
        }
    }

    pub fn to_map(&self, tol: f64) -> Result<CPMap> {
        let src = self.src.to_algebra(tol)?;
        let dst = self.dst.to_algebra(tol)?;
        let shape = (dst.ambient(), src.ambient());
        let kraus = self
            .kraus
            .iter()
            .map(|k| shaped(k, shape, "Kraus operator"))
            .collect::<Result<Vec<_>>>()?;
        CPMap::new(src, dst, kraus, tol)
    }
}

/// The spanning set of a quantum relation between given algebras; the span
/// must already satisfy the bimodule condition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationWJson {
    pub space: Vec<MatrixJson>,
}

impl RelationWJson {
    pub fn from_relation(r: &QuantumRelationW) -> Self {
        Self {
            space: r.space().basis().iter().map(matrix_to_json).collect(),
        }
    }

    pub fn to_relation(
        &self,
        src: Arc<MatrixAlgebra>,
        dst: Arc<MatrixAlgebra>,
        tol: f64,
    ) -> Result<QuantumRelationW> {
        let shape = (dst.ambient(), src.ambient());
        let ms = self
            .space
            .iter()
            .map(|m| shaped(m, shape, "relation element"))
            .collect::<Result<Vec<_>>>()?;
        let space = Subspace::span(shape.0, shape.1, ms.iter(), tol)?;
        QuantumRelationW::new(src, dst, space)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::{pauli_y, DEFAULT_TOL};

    fn roundtrip<T: Serialize + for<'de> Deserialize<'de>>(v: &T) -> T {
        serde_json::from_str(&serde_json::to_string(v).unwrap()).unwrap()
    }

    #[test]
    fn matrix_roundtrip() {
        let m = pauli_y();
        let back = matrix_from_json(&roundtrip(&matrix_to_json(&m)), None).unwrap();
        assert_eq!(back, m);
        let reals: MatrixJson = serde_json::from_str("[[1, 0], [0, [0, 1]]]").unwrap();
        assert_eq!(matrix_from_json(&reals, None).unwrap()[(1, 1)], C64::new(0.0, 1.0));
        let ragged: MatrixJson = serde_json::from_str("[[1, 0], [0]]").unwrap();
        assert!(matrix_from_json(&ragged, None).is_err());
    }

    #[test]
    fn graph_shorthand_and_roundtrip() {
        let text = r#"{"vertices": ["a", "b", "c"], "edges": [["a", "b"], ["b", "c"]]}"#;
        let gj: GraphJson = serde_json::from_str(text).unwrap();
        let g = gj.to_classical(DEFAULT_TOL).unwrap();
        assert_eq!(g, Graph::new(&["a", "b", "c"], &[("b", "a"), ("c", "b")]).unwrap());
        let q = gj.to_quantum(DEFAULT_TOL).unwrap();
        let back = roundtrip(&GraphJson::from_quantum(&q)).to_quantum(DEFAULT_TOL).unwrap();
        assert!(back.edges().equal(q.edges()).unwrap());
        let classical_again = GraphJson::from_quantum(&q).to_classical(DEFAULT_TOL).unwrap();
        assert_eq!(classical_again, g);
    }

    #[test]
    fn strategy_roundtrip() {
        let game = Game::new(Graph::cycle(5), Graph::complete(3)).unwrap();
        let f = game.classical_hom_search().unwrap();
        let s = QuantumStrategy::from_assignment(&game, &f, 2).unwrap();
        let back = roundtrip(&StrategyJson::from_strategy(&s, &game)).to_strategy(&game).unwrap();
        assert_eq!(back.projections(), s.projections());
    }

    #[test]
    fn assignment_maps() {
        let x = QuantumSet::classical(&["a", "b"]).unwrap();
        let y = QuantumSet::classical(&["u", "v"]).unwrap();
        let mj: MapJson = serde_json::from_str(r#"{"a": "v", "b": "v"}"#).unwrap();
        let r = mj.to_relation(&x, &y, DEFAULT_TOL).unwrap();
        assert!(r.equal(&Relation::from_map(&x, &y, &[1, 1]).unwrap()).unwrap());
    }

    #[test]
    fn algebra_forms() {
        let full: AlgebraJson = serde_json::from_str(r#"{"ambient": 2}"#).unwrap();
        assert!(full.to_algebra(DEFAULT_TOL).unwrap().is_full());
        let blocks: AlgebraJson = serde_json::from_str(r#"{"ambient": 3, "blocks": [1, 2]}"#).unwrap();
        assert_eq!(blocks.to_algebra(DEFAULT_TOL).unwrap().dim(), 5);
        let bad: AlgebraJson = serde_json::from_str(r#"{"ambient": 4, "blocks": [1, 2]}"#).unwrap();
        assert!(bad.to_algebra(DEFAULT_TOL).is_err());
    }
}
