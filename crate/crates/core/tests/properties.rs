use proptest::prelude::*;
use rand::Rng;

use qgph::conformance::corpus;
use qgph::json::{QuantumSetJson, RelationJson, StrategyJson};
use qgph::qgraph::{hom_adjacent, is_homomorphism, is_isomorphism};
use qgph::random;
use qgph::weaver::t_phi;
use qgph::{Graph, QuantumGraph, QuantumSet, Relation};

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(48)
}

fn random_qgraph(rng: &mut random::SeededRng, prefix: &str) -> QuantumGraph {
    let v = corpus::random_quantum_set(rng, 2, 2, prefix);
    let e = corpus::random_symmetric_relation(rng, &v);
    QuantumGraph::new(v, e).expect("symmetric relation")
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn composition_is_associative_and_unital(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let x = corpus::random_quantum_set(&mut rng, 3, 3, "x");
        let y = corpus::random_quantum_set(&mut rng, 3, 3, "y");
        let z = corpus::random_quantum_set(&mut rng, 3, 3, "z");
        let w = corpus::random_quantum_set(&mut rng, 3, 3, "w");
        let r = corpus::random_relation(&mut rng, &x, &y);
        let s = corpus::random_relation(&mut rng, &y, &z);
        let t = corpus::random_relation(&mut rng, &z, &w);
        let left = t.compose(&s).unwrap().compose(&r).unwrap();
        let right = t.compose(&s.compose(&r).unwrap()).unwrap();
        prop_assert!(left.equal(&right).unwrap());
        prop_assert!(Relation::identity(&y).compose(&r).unwrap().equal(&r).unwrap());
        prop_assert!(r.dagger().dagger().equal(&r).unwrap());
        let sr = s.compose(&r).unwrap();
        prop_assert!(sr.dagger().equal(&r.dagger().compose(&s.dagger()).unwrap()).unwrap());
    }

    #[test]
    fn join_is_a_least_upper_bound(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let x = corpus::random_quantum_set(&mut rng, 3, 3, "x");
        let y = corpus::random_quantum_set(&mut rng, 3, 3, "y");
        let a = corpus::random_relation(&mut rng, &x, &y);
        let b = corpus::random_relation(&mut rng, &x, &y);
        let j = a.join(&b).unwrap();
        prop_assert!(a.leq(&j).unwrap() && b.leq(&j).unwrap());
        prop_assert!(j.equal(&b.join(&a).unwrap()).unwrap());
        prop_assert!(a.join(&a).unwrap().equal(&a).unwrap());
    }

    #[test]
    fn box_product_is_symmetric_and_associative(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let g = random_qgraph(&mut rng, "g");
        let h = random_qgraph(&mut rng, "h");
        let k = random_qgraph(&mut rng, "k");
        let gh = g.box_product(&h);
        let hg = h.box_product(&g);
        let swap = Relation::braiding(g.vertices(), h.vertices());
        prop_assert!(is_isomorphism(&swap, &gh, &hg).unwrap());
        let left = gh.box_product(&k);
        let right = g.box_product(&h.box_product(&k));
        let assoc = Relation::associator(g.vertices(), h.vertices(), k.vertices());
        prop_assert!(is_isomorphism(&assoc, &left, &right).unwrap());
    }

    #[test]
    fn box_product_distributes_over_coproduct(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let g = random_qgraph(&mut rng, "g");
        let h = random_qgraph(&mut rng, "h");
        let k = random_qgraph(&mut rng, "k");
        let left = g.coproduct(&h).box_product(&k);
        let right = g.box_product(&k).coproduct(&h.box_product(&k));
        let n = left.vertices().len();
        prop_assert_eq!(n, right.vertices().len());
        let id: Vec<usize> = (0..n).collect();
        let phi = Relation::injection(left.vertices(), right.vertices(), &id).unwrap();
        prop_assert!(is_isomorphism(&phi, &left, &right).unwrap());
    }

    #[test]
    fn adjacency_of_homs_is_symmetric_and_composes(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let (ng, nh, nk) = (rng.random_range(1..=3), rng.random_range(1..=3), rng.random_range(1..=3));
        let g = corpus::random_graph(&mut rng, ng, 0.5, true);
        let h = corpus::random_graph(&mut rng, nh, 0.6, true);
        let k = corpus::random_graph(&mut rng, nk, 0.7, true);
        let (ig, ih, ik) = (QuantumGraph::inc(&g), QuantumGraph::inc(&h), QuantumGraph::inc(&k));
        let rel = |f: &[usize], a: &QuantumGraph, b: &QuantumGraph| Relation::from_map(a.vertices(), b.vertices(), f).unwrap();
        let homs = qgph::graph::HomSearch::new(&g, &h).all();
        let outer = qgph::graph::HomSearch::new(&h, &k).first();
        for f1 in homs.iter().take(4) {
            for f2 in homs.iter().take(4) {
                let (p1, p2) = (rel(f1, &ig, &ih), rel(f2, &ig, &ih));
                let adj = hom_adjacent(&p1, &p2, &ig, &ih).unwrap();
                prop_assert_eq!(adj, hom_adjacent(&p2, &p1, &ig, &ih).unwrap());
                if let (true, Some(psi)) = (adj, &outer) {
                    let psi = rel(psi, &ih, &ik);
                    let (c1, c2) = (psi.compose(&p1).unwrap(), psi.compose(&p2).unwrap());
                    prop_assert!(is_homomorphism(&c1, &ig, &ik).unwrap());
                    prop_assert!(hom_adjacent(&c1, &c2, &ig, &ik).unwrap());
                }
            }
        }
    }

    #[test]
    fn classical_sources_see_only_the_classical_part(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let ng = rng.random_range(1..=3);
        let g = corpus::random_graph(&mut rng, ng, 0.5, true);
        let dims = [2];
        let h = corpus::random_mixed_graph(&mut rng, 2, &dims);
        let (cl, j) = qgph::qgraph::classical_part(&h);
        let chg = qgph::qgraph::classical_hom_graph(&h);
        let ig = QuantumGraph::inc(&g);
        let homs = qgph::graph::HomSearch::new(&g, &chg).all();
        for f in &homs {
            let direct = Relation::from_map(ig.vertices(), cl.vertices(), f).unwrap();
            prop_assert!(is_homomorphism(&j.compose(&direct).unwrap(), &ig, &h).unwrap());
        }
    }

    #[test]
    fn t_phi_is_functorial(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let (l, m, n) = (rng.random_range(1..=3), rng.random_range(1..=3), rng.random_range(1..=3));
        let a = corpus::random_algebra(&mut rng, l);
        let b = corpus::random_algebra(&mut rng, m);
        let c = corpus::random_algebra(&mut rng, n);
        let phi = corpus::random_cp_map(&mut rng, a, b.clone()).unwrap();
        let psi = corpus::random_cp_map(&mut rng, b, c).unwrap();
        let both = phi.then(&psi).unwrap();
        let composed = t_phi(&psi).unwrap().compose(&t_phi(&phi).unwrap()).unwrap();
        prop_assert!(t_phi(&both).unwrap().equal(&composed).unwrap());
    }

    #[test]
    fn relations_round_trip_through_json(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let x = corpus::random_quantum_set(&mut rng, 3, 3, "x");
        let y = corpus::random_quantum_set(&mut rng, 3, 3, "y");
        let r = corpus::random_relation(&mut rng, &x, &y);
        let text = serde_json::to_string(&RelationJson::from_relation(&r)).unwrap();
        let back: RelationJson = serde_json::from_str(&text).unwrap();
        prop_assert!(back.to_relation(r.tol()).unwrap().equal(&r).unwrap());
        let set_text = serde_json::to_string(&QuantumSetJson::from_set(&x)).unwrap();
        let set: QuantumSetJson = serde_json::from_str(&set_text).unwrap();
        prop_assert_eq!(set.to_set().unwrap(), x);
    }
}

#[test]
fn strategies_round_trip_through_json() {
    for case in corpus::strategy_corpus(3).unwrap().iter().take(20) {
        let j = StrategyJson::from_strategy(&case.strategy, &case.game);
        let back: StrategyJson = serde_json::from_str(&serde_json::to_string(&j).unwrap()).unwrap();
        let s = back.to_strategy(&case.game).unwrap();
        for (a, b) in s.projections().iter().zip(case.strategy.projections()) {
            assert!((a - b).norm() <= 1e-12);
        }
    }
}

#[test]
fn unit_is_neutral_for_box_product() {
    let g = QuantumGraph::inc(&Graph::cycle(4));
    let one = QuantumGraph::k1();
    let left = one.box_product(&g);
    let unitor = Relation::left_unitor(g.vertices());
    assert!(is_isomorphism(&unitor, &left, &g).unwrap());
    assert_eq!(QuantumSet::unit().product(g.vertices()).len(), 4);
}
