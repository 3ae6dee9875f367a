use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use rdfview::changeset::relevant_rules;
use rdfview::fixtures;
use rdfview::rdf::{parse_nquads, serialize_nquads};
use rdfview::relational::{eval_path, related_pivots};
use rdfview::verify::generate_instance;
use rdfview::{
    apply_update, compute_changeset, materialize_view, rdf_state_rule, reconstruct_sigma0, Iri,
    Literal, Quad, QuadDataset, RuleSet, Term,
};

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 48,
        ..ProptestConfig::default()
    }
}

fn case() -> impl Strategy<Value = (u64, usize)> {
    (any::<u64>(), 1usize..=8)
}

thread_local! {
    static RULES: RuleSet = fixtures::rules();
}

fn rules() -> RuleSet {
    RULES.with(Clone::clone)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn inverse_update_restores_state((seed, size) in case()) {
        let (s0, u) = generate_instance(seed, size);
        let s1 = apply_update(&s0, &u).unwrap();
        prop_assert_eq!(apply_update(&s1, &u.inverse()).unwrap(), s0);
    }

    #[test]
    fn relation_size_follows_update((seed, size) in case()) {
        let (s0, u) = generate_instance(seed, size);
        let s1 = apply_update(&s0, &u).unwrap();
        let before = s0.relation(u.relation()).unwrap();
        let removed = u.deletes().intersection(before).count();
        let added = u.inserts().difference(before).count();
        prop_assert_eq!(s1.relation(u.relation()).unwrap().len(), before.len() - removed + added);
    }

    #[test]
    fn reconstruction_round_trips((seed, size) in case()) {
        let (s0, u) = generate_instance(seed, size);
        let s1 = apply_update(&s0, &u).unwrap();
        prop_assert_eq!(reconstruct_sigma0(&s1, &u).unwrap(), s0);
    }

    #[test]
    fn changeset_satisfies_view_equation((seed, size) in case()) {
        let rules = rules();
        let (s0, u) = generate_instance(seed, size);
        let s1 = apply_update(&s0, &u).unwrap();
        let cs = compute_changeset(&u, &s0, &rules).unwrap();
        let m0 = materialize_view(&s0, &rules);
        let m1 = materialize_view(&s1, &rules);
        prop_assert!(cs.delta_minus.is_subset(&m0));
        prop_assert!(cs.delta_plus.is_subset(&m1));
        prop_assert_eq!(serialize_nquads(&cs.apply_to(&m0)), serialize_nquads(&m1));
        let min = cs.minimized();
        prop_assert!(min.delta_minus.intersection(&min.delta_plus).is_empty());
        prop_assert_eq!(min.apply_to(&m0), m1);
    }

    #[test]
    fn inverse_update_swaps_the_changeset((seed, size) in case()) {
        let rules = rules();
        let (s0, u) = generate_instance(seed, size);
        let s1 = apply_update(&s0, &u).unwrap();
        let fwd = compute_changeset(&u, &s0, &rules).unwrap();
        let back = compute_changeset(&u.inverse(), &s1, &rules).unwrap();
        prop_assert_eq!(&fwd.delta_minus, &back.delta_plus);
        prop_assert_eq!(&fwd.delta_plus, &back.delta_minus);
    }

    #[test]
    fn changes_stay_in_graphs_of_relevant_pivots((seed, size) in case()) {
        let rules = rules();
        let (s0, u) = generate_instance(seed, size);
        let cs = compute_changeset(&u, &s0, &rules).unwrap();
        let graphs: BTreeSet<&Iri> = relevant_rules(&rules, u.relation())
            .unwrap()
            .iter()
            .map(|r| rules.graph(&r.pivot).unwrap())
            .collect();
        for q in cs.delta_minus.iter().chain(cs.delta_plus.iter()) {
            prop_assert!(graphs.contains(&q.graph), "{} outside relevant graphs", q);
        }
    }

    #[test]
    fn view_is_union_over_rules_then_tuples((seed, size) in case()) {
        let rules = rules();
        let (s0, _) = generate_instance(seed, size);
        let mut by_rule = QuadDataset::new();
        for rule in rules.rules() {
            for p in s0.relation(&rule.pivot).unwrap() {
                by_rule.extend(rdf_state_rule(rule, p, &s0, &rules));
            }
        }
        prop_assert_eq!(by_rule, materialize_view(&s0, &rules));
    }

    #[test]
    fn each_graph_holds_one_pivot_relation((seed, size) in case()) {
        let rules = rules();
        let (s0, _) = generate_instance(seed, size);
        // Subjects in a graph come from exactly one pivot tuple each.
        let mut owners: BTreeMap<(Iri, Iri), BTreeSet<String>> = BTreeMap::new();
        for rel in rules.pivots() {
            for p in s0.relation(rel).unwrap() {
                for rule in rules.rules_for_pivot(rel) {
                    for q in rdf_state_rule(rule, p, &s0, &rules).iter() {
                        prop_assert_eq!(&q.graph, rules.graph(rel).unwrap());
                        owners
                            .entry((q.graph.clone(), q.subject.clone()))
                            .or_default()
                            .insert(format!("{p:?}"));
                    }
                }
            }
        }
        for (key, tuples) in owners {
            prop_assert_eq!(tuples.len(), 1, "{:?} minted by several tuples", key);
        }
    }

    #[test]
    fn related_pivots_inverts_path_evaluation((seed, size) in case()) {
        let rules = rules();
        let (s0, _) = generate_instance(seed, size);
        for rule in rules.rules().iter().filter(|r| !r.path.is_empty()) {
            for k in 0..=rule.path.len() {
                let prefix = rule.path.prefix(k);
                let ends = s0.relation(&rule.relations[k]).unwrap();
                for p in s0.relation(&rule.pivot).unwrap() {
                    let reached = eval_path(&prefix, &BTreeSet::from([p.clone()]), &s0).unwrap();
                    for t in ends {
                        let back = related_pivots(&prefix, t, &s0).unwrap();
                        prop_assert_eq!(reached.contains(t), back.contains(p), "{} k={}", rule.name, k);
                    }
                }
            }
        }
    }

    #[test]
    fn nquads_round_trip(
        lexicals in prop::collection::vec(any::<String>(), 1..6),
        locals in prop::collection::vec("[A-Za-z0-9_%/.-]{1,12}", 1..6),
        n in any::<i64>(),
    ) {
        let mut ds = QuadDataset::new();
        let g = Iri::new("http://example.org/g");
        for (i, lex) in lexicals.iter().enumerate() {
            let s = Iri::new(format!("http://example.org/{}", locals[i % locals.len()]));
            ds.insert(Quad::new(s.clone(), Iri::new("http://example.org/p"), Literal::string(lex.clone()), g.clone()));
            ds.insert(Quad::new(s, Iri::new("http://example.org/n"), Term::Literal(Literal::integer(n)), g.clone()));
        }
        let text = serialize_nquads(&ds);
        let back = parse_nquads(&text).unwrap();
        prop_assert_eq!(&back, &ds);
        prop_assert_eq!(serialize_nquads(&back), text);
    }
}
