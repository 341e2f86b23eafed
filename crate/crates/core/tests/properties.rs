use std::collections::BTreeSet;

use graphmonoid::ck::induced_monoid_morphism;
use graphmonoid::corpus::{random_ck_extension, random_dag, random_element, random_graph, rng};
use graphmonoid::desing::{desingularize, required_truncation};
use graphmonoid::engine::{complete, BfsOracle, DEFAULT_BUDGET};
use graphmonoid::monoid::generators;
use graphmonoid::oracle::PathCounter;
use graphmonoid::{elem_add, Graph, Presentation};
use proptest::prelude::*;

fn edge_set(g: &Graph) -> BTreeSet<(String, String, String)> {
    g.edges()
        .iter()
        .map(|e| (e.id.to_string(), e.src.to_string(), e.dst.to_string()))
        .collect()
}

fn small_graph(seed: u64) -> Graph {
    random_graph(&mut rng(seed), 4, 2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn graph_json_round_trips(seed in any::<u64>()) {
        let g = small_graph(seed);
        prop_assert_eq!(Graph::from_json_str(&g.to_json_string()).unwrap(), g);
    }

    #[test]
    fn materialization_is_idempotent_and_stepwise(seed in any::<u64>(), k in 2usize..5) {
        let g = small_graph(seed);
        let once = g.materialize_all(k).unwrap();
        prop_assert_eq!(&once.materialize_all(k).unwrap(), &once);
        let stepped = g.materialize_all(k - 1).unwrap().materialize_all(k).unwrap();
        prop_assert_eq!(stepped.vertices(), once.vertices());
        prop_assert_eq!(edge_set(&stepped), edge_set(&once));
    }

    #[test]
    fn normal_forms_are_idempotent_and_additive(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, 4, 2);
        let rs = complete(&Presentation::from_graph(&g).unwrap(), DEFAULT_BUDGET).unwrap();
        let alphabet = generators(&g).unwrap();
        let x = random_element(&mut r, &alphabet, 4);
        let y = random_element(&mut r, &alphabet, 4);
        let nx = rs.normal_form(&x).unwrap();
        prop_assert_eq!(&rs.normal_form(&nx).unwrap(), &nx);
        let ny = rs.normal_form(&y).unwrap();
        prop_assert_eq!(
            rs.normal_form(&elem_add(&x, &y)).unwrap(),
            rs.normal_form(&elem_add(&nx, &ny)).unwrap()
        );
    }

    #[test]
    fn certificates_replay(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, 4, 2);
        let rs = complete(&Presentation::from_graph(&g).unwrap(), DEFAULT_BUDGET).unwrap();
        let alphabet = generators(&g).unwrap();
        let x = random_element(&mut r, &alphabet, 3);
        let y = random_element(&mut r, &alphabet, 3);
        for (u, v) in [(&x, &y), (&x, &rs.normal_form(&x).unwrap())] {
            let decision = rs.equal(u, v).unwrap();
            prop_assert!(rs.verify(u, v, &decision.certificate).unwrap());
        }
    }

    #[test]
    fn equality_agrees_with_exhaustive_search(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, 3, 2);
        let p = Presentation::from_graph(&g).unwrap();
        let rs = complete(&p, DEFAULT_BUDGET).unwrap();
        let alphabet = generators(&g).unwrap();
        let x = random_element(&mut r, &alphabet, 3);
        let ball = BfsOracle::new(&p).unwrap().ball(&x, 6, 5000).unwrap();
        for y in ball.elements() {
            prop_assert!(rs.equal(&x, &y).unwrap().equal);
        }
        if ball.saturated {
            let y = random_element(&mut r, &alphabet, 3);
            prop_assert_eq!(rs.equal(&x, &y).unwrap().equal, ball.contains(&y));
        }
    }

    #[test]
    fn phi_then_psi_is_identity(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, 4, 2);
        let alphabet = generators(&g).unwrap();
        let x = random_element(&mut r, &alphabet, 3);
        let level = required_truncation(&g, &x).unwrap();
        let g = g.materialize_all(level - 1).unwrap();
        let rs = complete(&Presentation::from_graph(&g).unwrap(), DEFAULT_BUDGET).unwrap();
        let d = desingularize(&g, level).unwrap();
        let back = d.psi(&d.phi(&x).unwrap()).unwrap();
        prop_assert!(rs.equal(&x, &back).unwrap().equal);
    }

    #[test]
    fn induced_maps_and_path_counts_are_additive(seed in any::<u64>()) {
        let mut r = rng(seed);
        let e = random_dag(&mut r, 5, 6);
        let m = random_ck_extension(&mut r, &e, 2, 3).unwrap();
        let map = induced_monoid_morphism(&m).unwrap();
        let alphabet = generators(&e).unwrap();
        let x = random_element(&mut r, &alphabet, 3);
        let y = random_element(&mut r, &alphabet, 3);
        prop_assert_eq!(
            map.apply(&elem_add(&x, &y)).unwrap(),
            elem_add(&map.apply(&x).unwrap(), &map.apply(&y).unwrap())
        );
        let mut counter = PathCounter::new(&e).unwrap();
        let sum = counter.gamma(&x).unwrap().checked_add(&counter.gamma(&y).unwrap()).unwrap();
        prop_assert_eq!(counter.gamma(&elem_add(&x, &y)).unwrap(), sum);
    }
}
