mod common;

use std::collections::BTreeSet;

use common::oracles;
use perfchain::fixtures;
use perfchain::interp::measure_campaign;
use perfchain::lang::{parse_program, NodeId, NodeTable};
use perfchain::model::enumerate_configs;
use perfchain::slice::{build_dependence_graph, cause_effect_chain, filter_by_coverage, EdgeKind};
use perfchain::testkit::{random_graph, random_program, ProgramShape};
use proptest::prelude::*;
use proptest::sample::subsequence;

fn pick(ids: &[NodeId], mask: &[bool]) -> BTreeSet<NodeId> {
    ids.iter().zip(mask).filter(|(_, m)| **m).map(|(n, _)| *n).collect()
}

#[test]
fn data_edges_match_def_use_enumeration() {
    for seed in 0..50 {
        let src = random_program(seed, &ProgramShape::default());
        let p = parse_program(&src).unwrap();
        let g = build_dependence_graph(&p);
        let table = NodeTable::new(&p);
        let built: BTreeSet<(NodeId, NodeId)> = g
            .edges()
            .iter()
            .filter(|e| e.kind == EdgeKind::Data)
            .filter(|e| table.get(e.from).unwrap().kind != perfchain::lang::NodeKind::OptionLoad)
            .map(|e| (e.from, e.to))
            .collect();
        assert_eq!(built, oracles::def_use_pairs(&p), "seed {seed}\n{src}");
    }
}

#[test]
fn call_edges_reach_callee_entries() {
    for seed in 0..50 {
        let p = parse_program(&random_program(seed, &ProgramShape::default())).unwrap();
        let g = build_dependence_graph(&p);
        let entries: BTreeSet<NodeId> = p.functions.iter().map(|f| f.id).collect();
        for e in g.edges() {
            assert!(g.contains(e.from) && g.contains(e.to));
            if e.kind == EdgeKind::Call {
                assert!(entries.contains(&e.to));
            }
            if e.kind == EdgeKind::Control {
                assert_ne!(e.from, e.to);
            }
        }
    }
}

#[test]
fn chop_matches_path_oracle_on_fixtures() {
    for fx in fixtures::ALL {
        let p = fx.program();
        let g = build_dependence_graph(&p);
        let ids: Vec<NodeId> = g.nodes().iter().copied().collect();
        let loads: BTreeSet<NodeId> = perfchain::lang::option_load_sites(&p).into_values().flatten().collect();
        for (k, t) in ids.iter().enumerate() {
            let targets: BTreeSet<NodeId> = ids[k..].iter().step_by(7).copied().chain([*t]).collect();
            assert_eq!(g.chop(&loads, &targets).unwrap(), oracles::path_nodes(&g, &loads, &targets));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn slices_match_closure(seed in any::<u64>(), n in 1usize..120, deg in 0.5f64..3.0, mask in proptest::collection::vec(any::<bool>(), 120), mask2 in proptest::collection::vec(proptest::bool::weighted(0.1), 120)) {
        let g = random_graph(seed, n, deg);
        let ids: Vec<NodeId> = g.nodes().iter().copied().collect();
        let within = pick(&ids, &mask);
        let set = pick(&ids, &mask2);
        prop_assert_eq!(g.backward_slice(&set).unwrap(), oracles::backward(&g, &set));
        prop_assert_eq!(g.forward_slice(&set, &within).unwrap(), oracles::forward_within(&g, &set, &within));
    }

    #[test]
    fn chop_is_path_set_and_monotone(seed in any::<u64>(), n in 1usize..120, deg in 0.5f64..3.0, s in proptest::collection::vec(proptest::bool::weighted(0.05), 120), t in proptest::collection::vec(proptest::bool::weighted(0.05), 120), extra in proptest::collection::vec(proptest::bool::weighted(0.05), 120)) {
        let g = random_graph(seed, n, deg);
        let ids: Vec<NodeId> = g.nodes().iter().copied().collect();
        let (s, t) = (pick(&ids, &s), pick(&ids, &t));
        let chop = g.chop(&s, &t).unwrap();
        prop_assert_eq!(&chop, &oracles::path_nodes(&g, &s, &t));
        let back = g.backward_slice(&t).unwrap();
        prop_assert!(chop.is_subset(&g.forward_slice(&s, &back).unwrap()));
        let more = pick(&ids, &extra);
        let s2: BTreeSet<NodeId> = s.union(&more).copied().collect();
        let t2: BTreeSet<NodeId> = t.union(&more).copied().collect();
        prop_assert!(chop.is_subset(&g.chop(&s2, &t2).unwrap()));
    }

    #[test]
    fn coverage_filter_is_intersection(a in proptest::collection::btree_set(0u32..300, 0..100), b in proptest::collection::btree_set(0u32..300, 0..100)) {
        let a: BTreeSet<NodeId> = a.into_iter().map(NodeId).collect();
        let b: BTreeSet<NodeId> = b.into_iter().map(NodeId).collect();
        let once = filter_by_coverage(&a, &b);
        prop_assert!(once.is_subset(&a));
        prop_assert_eq!(&once, &a.intersection(&b).copied().collect());
        prop_assert_eq!(filter_by_coverage(&once, &b), once);
    }

    #[test]
    fn chain_projection_is_witnessed(seed in 0u64..10_000, picks in subsequence((0..10usize).collect::<Vec<_>>(), 1..4)) {
        let src = random_program(seed, &ProgramShape::default());
        let p = parse_program(&src).unwrap();
        let g = build_dependence_graph(&p);
        let configs = enumerate_configs(&p.options, 64).unwrap();
        let recs = measure_campaign(&p, &configs[..2.min(configs.len())]).unwrap();
        let cov: BTreeSet<NodeId> = recs.iter().flat_map(|r| r.coverage.iter().copied()).collect();
        let options: BTreeSet<String> = p.options.iter().map(|o| o.name.clone()).collect();
        let hot: BTreeSet<String> = picks.iter().filter_map(|&i| p.functions.get(i)).map(|f| f.name.clone()).collect();
        let r = cause_effect_chain(&p, &g, &options, &hot, &cov).unwrap();
        let table = NodeTable::new(&p);
        prop_assert!(r.method_graph.nodes.len() <= p.functions.len());
        for e in &r.method_graph.edges {
            prop_assert!(!e.witnesses.is_empty());
            for w in &e.witnesses {
                prop_assert!(r.nodes.contains(&w.from) && r.nodes.contains(&w.to));
                prop_assert_eq!(table.function_of(w.from), Some(e.from.as_str()));
                prop_assert_eq!(table.function_of(w.to), Some(e.to.as_str()));
            }
        }
        for spans in r.highlights.values() {
            for h in spans {
                prop_assert!(r.nodes.contains(&h.node));
            }
        }
        prop_assert!(r.nodes.is_subset(&cov));
    }
}
