//! Quantum graphs and their homomorphisms, box product, coproduct and
//! classical part.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::numkernel::{identity, SpanBuilder, Subspace, DEFAULT_TOL};
use crate::qrel::Relation;
use crate::qset::QuantumSet;

/// A quantum set with a self-adjoint edge relation.
#[derive(Clone, Debug)]
pub struct QuantumGraph {
    vertices: QuantumSet,
    edges: Relation,
}

impl QuantumGraph {
    pub fn new(vertices: QuantumSet, edges: Relation) -> Result<Self> {
        if edges.src() != &vertices || edges.dst() != &vertices {
            return Err(Error::SetMismatch(format!(
                "edge relation is not a relation on {vertices}"
            )));
        }
        if !edges.dagger().equal(&edges)? {
            return Err(Error::NotSymmetric("E† differs from E".into()));
        }
        Ok(Self { vertices, edges })
    }

    /// The empty graph.
    pub fn k0() -> Self {
        let v = QuantumSet::empty();
        let e = Relation::zero(&v, &v);
        Self { vertices: v, edges: e }
    }

    /// The monoidal unit: one vertex, no edges.
    pub fn k1() -> Self {
        let v = QuantumSet::unit();
        let e = Relation::zero(&v, &v);
        Self { vertices: v, edges: e }
    }

    /// One vertex carrying a loop.
    pub fn looped_k1() -> Self {
        let v = QuantumSet::unit();
        let e = Relation::identity(&v);
        Self { vertices: v, edges: e }
    }

    /// `Q_n` with the zero edge relation.
    pub fn qn(n: usize) -> Result<Self> {
        let v = QuantumSet::qn(n)?;
        let e = Relation::zero(&v, &v);
        Ok(Self { vertices: v, edges: e })
    }

    /// The classical graph as a quantum graph on one-dimensional atoms.
    pub fn inc(g: &Graph) -> Self {
        let v = QuantumSet::classical(g.labels()).expect("graph labels are distinct");
        let mut pairs = Vec::new();
        for i in 0..g.len() {
            for j in 0..g.len() {
                if g.adjacent(i, j) {
                    pairs.push((i, j));
                }
            }
        }
        let e = Relation::from_index_pairs(&v, &v, &pairs).expect("indices in range");
        Self { vertices: v, edges: e }
    }

    pub fn vertices(&self) -> &QuantumSet {
        &self.vertices
    }

    pub fn edges(&self) -> &Relation {
        &self.edges
    }

    /// `(E_G × Id_H) ∨ (Id_G × E_H)` on `V_G × V_H`.
    pub fn box_product(&self, other: &QuantumGraph) -> QuantumGraph {
        let left = self.edges.tensor(&Relation::identity(&other.vertices));
        let right = Relation::identity(&self.vertices).tensor(&other.edges);
        let edges = left.join(&right).expect("both sides live on the product set");
        QuantumGraph {
            vertices: self.vertices.product(&other.vertices),
            edges,
        }
    }

    pub fn coproduct(&self, other: &QuantumGraph) -> QuantumGraph {
        QuantumGraph {
            vertices: self.vertices.coproduct(&other.vertices),
            edges: self.edges.direct_sum(&other.edges),
        }
    }

    /// `Id ≤ E`.
    pub fn is_reflexive(&self) -> bool {
        Relation::identity(&self.vertices)
            .leq(&self.edges)
            .expect("same vertex set")
    }

    /// Every diagonal block of `E` is orthogonal to the identity.
    pub fn is_loopless(&self) -> bool {
        (0..self.vertices.len()).all(|i| {
            let id = identity(self.vertices.dim(i));
            self.edges
                .block(i, i)
                .project(&id)
                .map(|p| p.norm() <= self.edges.tol() * id.norm().max(1.0))
                .unwrap_or(false)
        })
    }

    /// The same graph with its edge relation transported along a bijection
    /// `Φ : V_G → W`.
    pub fn transport(&self, phi: &Relation) -> Result<QuantumGraph> {
        let e = phi.compose(&self.edges)?.compose(&phi.dagger())?;
        QuantumGraph::new(phi.dst().clone(), e)
    }
}

fn check_endpoints(phi: &Relation, g: &QuantumGraph, h: &QuantumGraph) -> Result<()> {
    if phi.src() != g.vertices() {
        return Err(Error::SetMismatch(format!(
            "map source {} is not V_G = {}",
            phi.src(),
            g.vertices()
        )));
    }
    if phi.dst() != h.vertices() {
        return Err(Error::SetMismatch(format!(
            "map target {} is not V_H = {}",
            phi.dst(),
            h.vertices()
        )));
    }
    Ok(())
}

/// `Φ` is a function and `Φ ∘ E_G ≤ E_H ∘ Φ`, the order checked one block
/// at a time so that failures exit early.
pub fn is_homomorphism(phi: &Relation, g: &QuantumGraph, h: &QuantumGraph) -> Result<bool> {
    check_endpoints(phi, g, h)?;
    if !phi.is_function()? {
        return Ok(false);
    }
    let tol = phi.tol().max(g.edges().tol()).max(h.edges().tol());
    let (v, w) = (g.vertices(), h.vertices());
    for i in 0..v.len() {
        for k in 0..w.len() {
            let shape = (w.dim(k), v.dim(i));
            let mut left = SpanBuilder::new(shape.0, shape.1, tol);
            for j in 0..v.len() {
                let (e, f) = (g.edges().block(i, j), phi.block(j, k));
                for fv in f.basis() {
                    for ev in e.basis() {
                        if left.is_full() {
                            break;
                        }
                        left.push(&(fv * ev))?;
                    }
                }
            }
            if left.dim() == 0 {
                continue;
            }
            let mut right = SpanBuilder::new(shape.0, shape.1, tol);
            for l in 0..w.len() {
                let (f, e) = (phi.block(i, l), h.edges().block(l, k));
                for ev in e.basis() {
                    for fv in f.basis() {
                        if right.is_full() {
                            break;
                        }
                        right.push(&(ev * fv))?;
                    }
                }
            }
            if !left.finish().leq(&right.finish())? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `Φ ∘ Φ† = Id_H`, `Φ† ∘ Φ = Id_G` and `Φ ∘ E_G = E_H ∘ Φ`.
pub fn is_isomorphism(phi: &Relation, g: &QuantumGraph, h: &QuantumGraph) -> Result<bool> {
    check_endpoints(phi, g, h)?;
    let pd = phi.dagger();
    if !phi.compose(&pd)?.equal(&Relation::identity(h.vertices()))? {
        return Ok(false);
    }
    if !pd.compose(phi)?.equal(&Relation::identity(g.vertices()))? {
        return Ok(false);
    }
    phi.compose(g.edges())?.equal(&h.edges().compose(phi)?)
}

/// `Φ₁† ∘ E_H ∘ Φ₂ ≥ Id_G`.
///
/// Only the diagonal blocks of the left side are formed, since `Id_G`
/// vanishes off the diagonal: block `(i, i)` is spanned by the products
/// `a† s r` with `a ∈ Φ₁(i, j)`, `s ∈ E_H(k, j)`, `r ∈ Φ₂(i, k)`.
pub fn hom_adjacent(phi1: &Relation, phi2: &Relation, g: &QuantumGraph, h: &QuantumGraph) -> Result<bool> {
    check_endpoints(phi1, g, h)?;
    check_endpoints(phi2, g, h)?;
    let tol = phi1.tol().max(phi2.tol()).max(h.edges().tol());
    let (v, w) = (g.vertices(), h.vertices());
    for i in 0..v.len() {
        let d = v.dim(i);
        let mut b = SpanBuilder::new(d, d, tol);
        'blocks: for j in 0..w.len() {
            let head = phi1.block(i, j);
            if head.is_zero() {
                continue;
            }
            for k in 0..w.len() {
                let (s, r) = (h.edges().block(k, j), phi2.block(i, k));
                if s.is_zero() || r.is_zero() {
                    continue;
                }
                for a in head.basis() {
                    let ad = a.adjoint();
                    for sv in s.basis() {
                        let left = &ad * sv;
                        for rv in r.basis() {
                            b.push(&(&left * rv))?;
                            if b.is_full() {
                                break 'blocks;
                            }
                        }
                    }
                }
            }
        }
        if b.is_full() {
            continue;
        }
        if !b.finish().contains(&identity(d))? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `Cl(G)`: the full subgraph on one-dimensional atoms, `E = J† ∘ E_G ∘ J`,
/// together with the inclusion `J`.
pub fn classical_part(g: &QuantumGraph) -> (QuantumGraph, Relation) {
    let (w, _) = g.vertices().classical_part();
    let j = Relation::inclusion_function(&w, g.vertices()).expect("sublist of atoms");
    let e = j
        .dagger()
        .compose(g.edges())
        .and_then(|r| r.compose(&j))
        .expect("composable by construction");
    (QuantumGraph { vertices: w, edges: e }, j)
}

/// Given a homomorphism `Φ : G → H` out of a classical graph, returns the
/// homomorphism `Ψ : G → Cl(H)` with `J ∘ Ψ = Φ`.
pub fn factor_through_classical_part(phi: &Relation, g: &QuantumGraph, h: &QuantumGraph) -> Result<Relation> {
    check_endpoints(phi, g, h)?;
    if !g.vertices().is_classical() {
        return Err(Error::Precondition("source graph must be classical".into()));
    }
    if !is_homomorphism(phi, g, h)? {
        return Err(Error::Precondition("map is not a homomorphism".into()));
    }
    let hv = h.vertices();
    for i in 0..g.vertices().len() {
        for k in 0..hv.len() {
            if hv.dim(k) > 1 && !phi.block(i, k).is_zero() {
                return Err(Error::Verification(format!(
                    "nonzero block into atom `{}` of dimension {}",
                    hv.label(k),
                    hv.dim(k)
                )));
            }
        }
    }
    let (cl, j) = classical_part(h);
    let (_, idx) = hv.classical_part();
    let psi = Relation::from_fn(g.vertices(), cl.vertices(), phi.tol(), |i, k| {
        Ok(phi.block(i, idx[k]).clone())
    })?;
    if !j.compose(&psi)?.equal(phi)? {
        return Err(Error::Verification("J ∘ Ψ differs from Φ".into()));
    }
    Ok(psi)
}

/// Classical graph on the one-dimensional atoms of `V_G`, `x ∼ y` iff the
/// edge block from `x` to `y` is nonzero.
pub fn classical_hom_graph(g: &QuantumGraph) -> Graph {
    let (_, idx) = g.vertices().classical_part();
    let labels: Vec<String> = idx.iter().map(|&i| g.vertices().label(i).to_string()).collect();
    let mut arcs = Vec::new();
    for (a, &x) in idx.iter().enumerate() {
        for (b, &y) in idx.iter().enumerate() {
            if !g.edges().block(x, y).is_zero() {
                arcs.push((a, b));
            }
        }
    }
    Graph::from_arcs(&labels, &arcs).expect("edge relation is self-adjoint")
}

/// Atom permutation sorting `V_G` by dimension then label, and the graph
/// transported along it. Returns the sorted graph and the isomorphism.
pub fn canonical_form(g: &QuantumGraph) -> (QuantumGraph, Relation) {
    let order = g.vertices().canonical_order();
    let sorted = g.vertices().subset(&order).expect("indices come from the set");
    let mut mapping = vec![0; order.len()];
    for (new, &old) in order.iter().enumerate() {
        mapping[old] = new;
    }
    let phi = Relation::injection(g.vertices(), &sorted, &mapping).expect("dimension-preserving");
    let h = g.transport(&phi).expect("bijections transport graphs");
    (h, phi)
}

/// `span{1}` on a square block; handy for building edge relations.
pub fn scalar_block(d: usize) -> Subspace {
    Subspace::span(d, d, std::iter::once(&identity(d)), DEFAULT_TOL).expect("square")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::HomSearch;
    use crate::numkernel::{pauli_x, unit, Matrix};
    use crate::qset::Atom;

    fn span1(m: &Matrix) -> Subspace {
        Subspace::span(m.nrows(), m.ncols(), std::iter::once(m), DEFAULT_TOL).unwrap()
    }

    #[test]
    fn constructors() {
        assert_eq!(QuantumGraph::k1().vertices().len(), 1);
        assert!(QuantumGraph::k1().edges().is_zero());
        assert!(QuantumGraph::k0().vertices().is_empty());
        let q2 = QuantumSet::qn(2).unwrap();
        let e = Relation::from_fn(&q2, &q2, DEFAULT_TOL, |_, _| Ok(span1(&pauli_x()))).unwrap();
        assert!(QuantumGraph::new(q2.clone(), e).is_ok());
        let e = Relation::from_fn(&q2, &q2, DEFAULT_TOL, |_, _| Ok(span1(&unit(2, 2, 0, 1)))).unwrap();
        assert!(matches!(QuantumGraph::new(q2, e), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn inc_examples() {
        let c5 = QuantumGraph::inc(&Graph::cycle(5));
        assert_eq!(c5.vertices().dims(), vec![1; 5]);
        assert!(c5.is_loopless());
        let l = QuantumGraph::inc(&Graph::looped_vertex());
        assert!(l.is_reflexive());
        assert_eq!(l.edges().block(0, 0).dim(), 1);
    }

    #[test]
    fn classical_box_product_matches() {
        let g = Graph::path(3);
        let h = Graph::cycle(3);
        let q = QuantumGraph::inc(&g).box_product(&QuantumGraph::inc(&h));
        let c = QuantumGraph::inc(&g.box_product(&h));
        assert!(q.edges().equal(c.edges()).unwrap());
    }

    #[test]
    fn homomorphism_examples() {
        let c5 = Graph::cycle(5);
        let k3 = Graph::complete(3);
        let (gq, hq) = (QuantumGraph::inc(&c5), QuantumGraph::inc(&k3));
        let f = HomSearch::new(&c5, &k3).first().unwrap();
        let phi = Relation::from_map(gq.vertices(), hq.vertices(), &f).unwrap();
        assert!(is_homomorphism(&phi, &gq, &hq).unwrap());
        assert!(!is_isomorphism(&phi, &gq, &hq).unwrap());
        assert!(is_homomorphism(&Relation::identity(gq.vertices()), &gq, &gq).unwrap());

        let k2 = QuantumGraph::inc(&Graph::complete(2));
        let dot = QuantumGraph::inc(&Graph::edgeless(1));
        let constant = Relation::from_map(k2.vertices(), dot.vertices(), &[0, 0]).unwrap();
        assert!(!is_homomorphism(&constant, &k2, &dot).unwrap());
    }

    #[test]
    fn permutation_is_isomorphism() {
        let c5 = Graph::cycle(5);
        let perm = [2, 4, 1, 3, 0];
        let g = QuantumGraph::inc(&c5);
        let h = QuantumGraph::inc(&c5.permuted(&perm));
        let phi = Relation::injection(g.vertices(), h.vertices(), &perm).unwrap();
        assert!(is_isomorphism(&phi, &g, &h).unwrap());
    }

    #[test]
    fn adjacency_examples() {
        let g = QuantumGraph::inc(&Graph::edgeless(2));
        let k3 = QuantumGraph::inc(&Graph::complete(3));
        let c0 = Relation::from_map(g.vertices(), k3.vertices(), &[0, 0]).unwrap();
        let c1 = Relation::from_map(g.vertices(), k3.vertices(), &[1, 1]).unwrap();
        assert!(hom_adjacent(&c0, &c1, &g, &k3).unwrap());
        let id = Relation::identity(k3.vertices());
        assert!(!hom_adjacent(&id, &id, &k3, &k3).unwrap());
        let l = QuantumGraph::looped_k1();
        let idl = Relation::identity(l.vertices());
        assert!(hom_adjacent(&idl, &idl, &l, &l).unwrap());
    }

    fn mixed() -> QuantumGraph {
        let v = QuantumSet::new(vec![Atom::new("a", 1), Atom::new("B", 2)]).unwrap();
        let e = Relation::from_fn(&v, &v, DEFAULT_TOL, |i, j| {
            Ok(if i == 0 && j == 0 {
                Subspace::full(1, 1, DEFAULT_TOL)
            } else {
                Subspace::zero(v.dim(j), v.dim(i), DEFAULT_TOL)
            })
        })
        .unwrap();
        QuantumGraph::new(v, e).unwrap()
    }

    #[test]
    fn classical_part_examples() {
        let c5 = QuantumGraph::inc(&Graph::cycle(5));
        let (cl, j) = classical_part(&c5);
        assert!(cl.edges().equal(c5.edges()).unwrap());
        assert!(j.equal(&Relation::identity(c5.vertices())).unwrap());

        let (cl, _) = classical_part(&QuantumGraph::qn(2).unwrap());
        assert!(cl.vertices().is_empty());

        let (cl, _) = classical_part(&mixed());
        assert!(cl.is_reflexive());
        assert_eq!(cl.vertices().len(), 1);
        assert_eq!(classical_hom_graph(&mixed()), Graph::new(&["a"], &[("a", "a")]).unwrap());
    }

    #[test]
    fn factorization_through_classical_part() {
        let h = mixed();
        let k1 = QuantumGraph::k1();
        let phi = Relation::from_fn(k1.vertices(), h.vertices(), DEFAULT_TOL, |_, j| {
            Ok(if j == 0 {
                Subspace::full(1, 1, DEFAULT_TOL)
            } else {
                Subspace::zero(2, 1, DEFAULT_TOL)
            })
        })
        .unwrap();
        let psi = factor_through_classical_part(&phi, &k1, &h).unwrap();
        assert_eq!(psi.dst().len(), 1);
        assert_eq!(psi.block(0, 0).dim(), 1);
    }

    #[test]
    fn canonical_form_is_isomorphic() {
        let v = QuantumSet::new(vec![Atom::new("B", 2), Atom::new("a", 1)]).unwrap();
        let e = Relation::full(&v, &v);
        let g = QuantumGraph::new(v, e).unwrap();
        let (h, phi) = canonical_form(&g);
        assert_eq!(h.vertices().dims(), vec![1, 2]);
        assert!(is_isomorphism(&phi, &g, &h).unwrap());
    }
}
