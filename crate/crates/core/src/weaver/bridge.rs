//! Embedding of finite quantum sets, relations and graphs into the
//! matrix-algebra picture.

use std::sync::Arc;

use super::algebra::{MatrixAlgebra, QuantumRelationW};
use super::channel::satisfies_function_conditions;
use crate::error::{Error, Result};
use crate::numkernel::{Matrix, Subspace};
use crate::qgraph::QuantumGraph;
use crate::qrel::Relation;
use crate::qset::QuantumSet;

/// `⊕ M_{d_i}(ℂ)` for the atoms of `x`.
pub fn algebra_of(x: &QuantumSet) -> Result<Arc<MatrixAlgebra>> {
    MatrixAlgebra::blockdiag(&x.dims())
}

/// Places block `(i, j)` of `r` at rows `offset(j)`, columns `offset(i)`.
pub fn relation_to_weaver(
    r: &Relation,
    src: Arc<MatrixAlgebra>,
    dst: Arc<MatrixAlgebra>,
) -> Result<QuantumRelationW> {
    if src.block_spec() != Some(&r.src().dims()[..]) || dst.block_spec() != Some(&r.dst().dims()[..]) {
        return Err(Error::SetMismatch("algebras do not match the relation's quantum sets".into()));
    }
    let (so, dof) = (r.src().offsets(), r.dst().offsets());
    let (m, n) = (src.ambient(), dst.ambient());
    let mut embedded = Vec::new();
    for (i, j, block) in r.blocks() {
        for b in block.basis() {
            let mut x = Matrix::zeros(n, m);
            x.view_mut((dof[j], so[i]), b.shape()).copy_from(b);
            embedded.push(x);
        }
    }
    let space = Subspace::span(n, m, embedded.iter(), r.tol())?;
    QuantumRelationW::new(src, dst, space)
}

/// The edge relation of `g` as a quantum relation on `⊕ M_{d_i}(ℂ)`.
pub fn graph_to_weaver(g: &QuantumGraph) -> Result<QuantumRelationW> {
    let a = algebra_of(g.vertices())?;
    relation_to_weaver(g.edges(), a.clone(), a)
}

/// Embeds a function and checks `M′ ⊆ F†F` and `FF† ⊆ N′`.
pub fn function_to_intertwiner(phi: &Relation) -> Result<QuantumRelationW> {
    let f = relation_to_weaver(phi, algebra_of(phi.src())?, algebra_of(phi.dst())?)?;
    if !satisfies_function_conditions(&f)? {
        return Err(Error::Verification("embedded relation is not a function".into()));
    }
    Ok(f)
}

/// Embeds a homomorphism `G → H` and additionally checks `F · R_G ⊆ R_H · F`.
pub fn hom_to_intertwiner(phi: &Relation, g: &QuantumGraph, h: &QuantumGraph) -> Result<QuantumRelationW> {
    let f = function_to_intertwiner(phi)?;
    let rg = graph_to_weaver(g)?;
    let rh = graph_to_weaver(h)?;
    if !f.compose(&rg)?.leq(&rh.compose(&f)?)? {
        return Err(Error::Verification("F · R_G ⊄ R_H · F".into()));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    #[test]
    fn classical_graph_embeds_as_adjacency_pattern() {
        let g = QuantumGraph::inc(&Graph::path(3));
        let r = graph_to_weaver(&g).unwrap();
        assert_eq!(r.space().dim(), 4);
        assert!(r.dagger().equal(&r).unwrap());
    }

    #[test]
    fn quantum_graph_blocks() {
        let q2 = QuantumGraph::qn(2).unwrap();
        let r = graph_to_weaver(&q2).unwrap();
        assert!(r.space().is_zero());
        let k = QuantumGraph::inc(&Graph::complete(2));
        let phi = Relation::full(q2.vertices(), k.vertices());
        assert!(function_to_intertwiner(&phi).is_err());
    }

    #[test]
    fn identity_is_a_hom_intertwiner() {
        let g = QuantumGraph::inc(&Graph::cycle(4)).box_product(&QuantumGraph::qn(2).unwrap());
        let id = Relation::identity(g.vertices());
        let f = hom_to_intertwiner(&id, &g, &g).unwrap();
        assert_eq!(f.space().dim(), 4);
    }
}
