mod common;

use common::{arb_dag, dag_v_structures, pattern_skeleton, skeleton};
use latentpc::graph::{unshielded_colliders, Dag, EdgeKind, MarkedGraph, Pattern};
use latentpc::pc::{candidate_set, pattern_represents, pc, pc_with, ColliderRule, DsepOracle, PcConfig};
use latentpc::pc::CiOracle;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn exact_oracle_recovers_structure(g in arb_dag(9)) {
        let out = pc(&DsepOracle::new(&g)).unwrap();
        let p = &out.pattern;
        prop_assert_eq!(pattern_skeleton(p), skeleton(&g));
        prop_assert_eq!(unshielded_colliders(p), dag_v_structures(&g));
        prop_assert!(pattern_represents(p, &g).unwrap());
        prop_assert!(!p.edges().iter().any(|(a, b, _, _)| p.is_bidirected(*a, *b)));
    }

    #[test]
    fn trace_replays_to_output(g in arb_dag(8)) {
        let out = pc(&DsepOracle::new(&g)).unwrap();
        prop_assert_eq!(out.trace.replay(g.names()).unwrap(), out.pattern);
    }

    #[test]
    fn collider_rules_agree_on_dags(g in arb_dag(8)) {
        let o = DsepOracle::new(&g);
        let a = pc_with(&o, &PcConfig { collider_rule: ColliderRule::Exhaustive }).unwrap();
        let b = pc_with(&o, &PcConfig { collider_rule: ColliderRule::Sepset }).unwrap();
        prop_assert_eq!(a.pattern, b.pattern);
    }

    #[test]
    fn sepsets_separate(g in arb_dag(8)) {
        let o = DsepOracle::new(&g);
        let out = pc(&o).unwrap();
        for (&(a, b), s) in &out.sepsets {
            prop_assert!(!out.pattern.adjacent(a, b));
            prop_assert!(common::moral_separated(&g, a, b, s));
        }
    }

    #[test]
    fn pattern_is_invariant_under_equivalent_dags(g in arb_dag(7)) {
        // reversing every edge of a DAG without v-structures keeps the class
        prop_assume!(dag_v_structures(&g).is_empty() && dag_v_structures(&g.reversed()).is_empty());
        let a = pc(&DsepOracle::new(&g)).unwrap().pattern;
        let b = pc(&DsepOracle::new(&g.reversed())).unwrap().pattern;
        prop_assert_eq!(a, b);
    }
}

#[test]
fn chain_and_collider_examples() {
    let chain = Dag::build(["A", "B", "C"], &[("A", "B"), ("B", "C")]).unwrap();
    let p = pc(&DsepOracle::new(&chain)).unwrap().pattern;
    let expected = Pattern::build(
        ["A", "B", "C"],
        &[("A", "B", EdgeKind::Undirected), ("B", "C", EdgeKind::Undirected)],
    )
    .unwrap();
    assert_eq!(p, expected);

    let g = Dag::build(["A", "B", "C", "D"], &[("A", "C"), ("B", "C"), ("C", "D")]).unwrap();
    let out = pc(&DsepOracle::new(&g)).unwrap();
    assert!(out.pattern.is_directed(2, 3));
    assert!(out.trace.render(g.names()).contains("ORIENT C D | stepD rule1 via A"));
}

#[test]
fn candidates_exclude_dead_ends() {
    // D hangs off A only, so it lies on no A-B path other than through A
    let p = Pattern::build(
        ["A", "B", "C", "D"],
        &[
            ("A", "C", EdgeKind::Undirected),
            ("C", "B", EdgeKind::Undirected),
            ("A", "D", EdgeKind::Undirected),
        ],
    )
    .unwrap();
    assert_eq!(candidate_set(&p, 0, 1), vec![2]);
}

#[test]
fn query_counter_advances() {
    let g = Dag::build(["A", "B", "C"], &[("A", "B")]).unwrap();
    let o = DsepOracle::new(&g);
    pc(&o).unwrap();
    assert!(o.query_count() > 0);
}
